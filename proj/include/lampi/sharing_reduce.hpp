#pragma once

#include "lampi/lambda_reduce.hpp"
#include "lampi/sharing.hpp"
#include "lampi/trace.hpp"

namespace lampi {

enum class SRuleTag {
  Beta,
  ExSub,
  LinFetch,
  Fail,
  Cons1,
  Cons2,
  Cons3,
  TCont,
  ECont,
  Precong
};

std::string to_string(SRuleTag t);

struct SStep {
  SRuleTag tag;
  std::vector<int> path;
  SharExpr result;
};

std::vector<SStep> shar_step_all(const SharExpr& e,
                                 const ReduceConfig& cfg = {});

SharTermPtr shar_precongruence_normalize_term(const SharTermPtr& t);
SharExpr shar_precongruence_normalize(const SharExpr& e);

struct SharNormalizeResult {
  bool ok = false;
  SharExpr result;
  Trace trace;
  std::string error;
};

SharNormalizeResult shar_normalize(const SharExpr& e,
                                   const ReduceConfig& cfg = {});

SuccessResult shar_has_success(const SharExpr& e, const ReduceConfig& cfg = {});

bool any_head_check(const SharExpr& e);

}  // namespace lampi
