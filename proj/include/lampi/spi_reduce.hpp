#pragma once

#include "lampi/lambda_reduce.hpp"
#include "lampi/spi.hpp"
#include "lampi/trace.hpp"

namespace lampi {

enum class PiRuleTag { Comm, Forw, Close, Some, None };

std::string to_string(PiRuleTag t);

struct PiStep {
  PiRuleTag tag;
  std::vector<int> path;  // [choice branch, component indices...]
  ProcPtr result;         // canonical
};

// All reducts reachable by one axiom under Par/Res/NChoice closure and
// structural congruence; input and results are canonicalized.
std::vector<PiStep> pi_step_all(const ProcPtr& p);

struct PiNormalizeResult {
  bool ok = false;
  ProcPtr result;
  Trace trace;
  std::string error;
};

// Deterministic scheduler: Comm > Close > Some/None > Forw, leftmost first.
PiNormalizeResult pi_normalize(const ProcPtr& p, int fuel = 10000);

struct ReachResult {
  bool reached = false;
  int steps = 0;
  size_t visited = 0;
  std::string error;
};

// Breadth-first search for a state congruent to target.
ReachResult pi_reaches(const ProcPtr& p, const ProcPtr& target, int fuel = 128,
                       size_t breadth_cap = 10000);

SuccessResult pi_has_success(const ProcPtr& p, int fuel = 10000);

}  // namespace lampi
