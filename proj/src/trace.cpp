#include "lampi/trace.hpp"

#include <json.hpp>

namespace lampi {

std::string trace_to_json(const Trace& t) {
  nlohmann::json j;
  j["start"] = t.start;
  j["steps"] = nlohmann::json::array();
  for (auto& s : t.steps) {
    nlohmann::json step;
    step["rule"] = s.rule;
    step["path"] = s.path;
    step["result"] = s.result;
    j["steps"].push_back(std::move(step));
  }
  return j.dump(2);
}

}  // namespace lampi
