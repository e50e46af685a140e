#pragma once

#include <optional>

#include "lampi/lambda.hpp"
#include "lampi/trace.hpp"

namespace lampi {

enum class RuleTag { Beta, Fetch, Fail, Cons1, Cons2, TCont, ECont, Precong };

std::string to_string(RuleTag t);

struct ReduceConfig {
  int max_bag = 4;      // permutation sums materialize at most max_bag! summands
  int fuel = 10000;
};

struct BagCapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One enabled reduction: rule instance at path [summand, spine depth].
struct LStep {
  RuleTag tag;
  std::vector<int> path;
  Expr result;
};

// Every one-step reduct of e under the contextual closures.
std::vector<LStep> step_all(const Expr& e, const ReduceConfig& cfg = {});

// Oriented precongruence laws applied along spines to a fixed point.
TermPtr precongruence_normalize_term(const TermPtr& t);
Expr precongruence_normalize(const Expr& e);

struct NormalizeResult {
  bool ok = false;           // false: out of fuel or bag cap exceeded
  Expr result;               // final (ok) or partial (not ok) expression
  Trace trace;
  std::string error;
};

// Leftmost-outermost strategy interleaved with the precongruence.
NormalizeResult normalize(const Expr& e, const ReduceConfig& cfg = {});

enum class SuccessResult { Yes, No, OutOfFuel };

SuccessResult has_success(const Expr& e, const ReduceConfig& cfg = {});

// True iff some summand has head check.
bool any_head_check(const Expr& e);

}  // namespace lampi
