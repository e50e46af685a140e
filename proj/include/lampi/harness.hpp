#pragma once

#include <cstdint>
#include <random>

#include "lampi/atomize.hpp"
#include "lampi/check.hpp"
#include "lampi/lambda_reduce.hpp"
#include "lampi/pi_encode.hpp"
#include "lampi/sharing_reduce.hpp"
#include "lampi/spi_check.hpp"
#include "lampi/spi_reduce.hpp"

namespace lampi {

struct GenConfig {
  int max_depth = 4;
  int max_bag = 3;  // permutation cap applies at 4
  bool allow_fail = true;
  bool allow_check = false;
  bool closed = false;
  uint64_t seed = 1;
  int cases = 100;
};

struct Counterexample {
  uint64_t seed = 0;
  std::string subject;
  std::string detail;
};

struct CheckReport {
  std::string property;
  int cases = 0;
  int inconclusive = 0;
  std::vector<Counterexample> failures;
  bool ok() const { return failures.empty(); }
};

std::string report_to_json(const CheckReport& r);

// Derivation-directed generation: the produced judgment is accepted by the
// corresponding checker.
struct GenJudgment {
  TypeContext ctx;
  Expr expr;
  StrictPtr type;
};
GenJudgment gen_wellformed(const GenConfig& cfg, std::mt19937_64& rng);
GenJudgment gen_typed(const GenConfig& cfg, std::mt19937_64& rng);

// ---- executable metatheorems ----

// calculus: "lambda", "sharing", or "pi"
CheckReport check_diamond(const GenConfig& cfg, const std::string& calculus);
// system: "lambda-typed", "lambda-wf", "sharing-typed", "sharing-wf", "pi"
CheckReport check_subject_reduction(const GenConfig& cfg,
                                    const std::string& system);
CheckReport check_correspondence_1(const GenConfig& cfg);
CheckReport check_correspondence_2(const GenConfig& cfg, int pi_fuel = 128,
                                   size_t breadth_cap = 10000);
// stage: 1 (into sharing), 2 (into processes), or 0 (end to end)
CheckReport check_success_sensitivity(const GenConfig& cfg, int stage);
CheckReport check_type_preservation(const GenConfig& cfg, int stage);
// duality involution and congruence-law invariance of canonical forms
CheckReport check_duality_canon(const GenConfig& cfg);

}  // namespace lampi
