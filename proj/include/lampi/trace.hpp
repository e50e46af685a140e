#pragma once

#include <string>
#include <vector>

namespace lampi {

// One recorded rewrite step, shared by all three reduction engines.
struct Step {
  std::string rule;
  std::vector<int> path;
  std::string result;  // canonical print of the full expression/process
};

struct Trace {
  std::string start;
  std::vector<Step> steps;
};

std::string trace_to_json(const Trace& t);

}  // namespace lampi
