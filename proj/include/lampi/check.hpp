#pragma once

#include "lampi/lambda.hpp"
#include "lampi/sharing.hpp"
#include "lampi/types.hpp"

namespace lampi {

// Evidence for a judgment; every node instantiates one rule.
struct Derivation {
  std::string rule;
  std::string ctx;
  std::string subject;
  std::string type;
  bool wf = false;            // |= judgment (vs |-)
  std::string kind;           // "term", "bag", or "sum"
  std::string calc;           // "lambda" or "sharing"
  std::vector<Derivation> premises;
};

std::string print_derivation(const Derivation& d, int indent = 0);

struct CheckResult {
  bool ok = false;
  Derivation deriv;
  std::string reason;
};

CheckResult check_typed_lambda(const TypeContext& ctx, const Expr& e,
                               const StrictPtr& type);
CheckResult check_wellformed_lambda(const TypeContext& ctx, const Expr& e,
                                    const StrictPtr& type);
CheckResult check_typed_sharing(const TypeContext& ctx, const SharExpr& e,
                                const StrictPtr& type);
CheckResult check_wellformed_sharing(const TypeContext& ctx, const SharExpr& e,
                                     const StrictPtr& type);

// Synthesis of some accepting judgment (unconstrained positions default to
// unit); used by the harness generators and the CLI on closed terms.
struct InferResult {
  bool ok = false;
  TypeContext ctx;
  StrictPtr type;
  std::string reason;
};
InferResult infer_typed_lambda(const Expr& e);
InferResult infer_wellformed_lambda(const Expr& e);
InferResult infer_typed_sharing(const SharExpr& e);
InferResult infer_wellformed_sharing(const SharExpr& e);

// Re-checks every judgment node of a produced derivation.
bool derivation_replay(const Derivation& d, std::string* why = nullptr);

// Solved type information recorded per term node during a sharing
// well-formedness check; consumed by the process translation to annotate
// restrictions.
struct SharingTypeInfo {
  struct AppInfo {
    StrictPtr sigma;
    int dom_count = 0;
    int bag_count = 0;
    StrictPtr result;
  };
  struct SubInfo {
    StrictPtr sigma;
    int shared_count = 0;
    int bag_count = 0;
  };
  std::map<const SharTerm*, AppInfo> apps;
  std::map<const SharTerm*, SubInfo> subs;
  std::map<const SharTerm*, StrictPtr> linsubs;
};

CheckResult check_wellformed_sharing_info(const TypeContext& ctx,
                                          const SharExpr& e,
                                          const StrictPtr& type,
                                          SharingTypeInfo* info);

}  // namespace lampi
