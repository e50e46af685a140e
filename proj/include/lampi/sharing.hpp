#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lampi/lambda.hpp"
#include "lampi/var.hpp"

namespace lampi {

// ---- syntax of the sharing calculus ----

struct SharTerm;
using SharTermPtr = std::shared_ptr<const SharTerm>;

struct SharBag {
  std::vector<SharTermPtr> items;
  bool empty() const { return items.empty(); }
  size_t size() const { return items.size(); }
};

struct SVar {
  Var var;
};
struct SAbs {  // body is a Share on the abstracted variable
  Var param;
  SharTermPtr body;
};
struct SApp {
  SharTermPtr fun;
  SharBag arg;
};
struct SLinSub {  // body <|arg/var|>
  SharTermPtr body;
  SharTermPtr arg;
  Var var;
};
struct SFail {  // vars form a set (sorted, unique)
  std::vector<Var> vars;
};
struct SShare {  // body [shared <- var]; shared may be empty
  SharTermPtr body;
  std::vector<Var> shared;
  Var var;
};
struct SShareSub {  // body [shared <- var] <<bag/var>>
  SharTermPtr body;
  std::vector<Var> shared;
  Var var;
  SharBag bag;
  bool has_share = true;  // false: a raw substitution, flagged by validation
};
struct SCheck {};

struct SharTerm {
  std::variant<SVar, SAbs, SApp, SLinSub, SFail, SShare, SShareSub, SCheck>
      node;
};

struct SharExpr {
  std::vector<SharTermPtr> sum;
};

SharTermPtr smk_var(Var v);
SharTermPtr smk_abs(Var param, SharTermPtr body);
SharTermPtr smk_app(SharTermPtr fun, SharBag arg);
SharTermPtr smk_linsub(SharTermPtr body, SharTermPtr arg, Var var);
SharTermPtr smk_fail(std::vector<Var> vars);  // deduplicates
SharTermPtr smk_share(SharTermPtr body, std::vector<Var> shared, Var var);
SharTermPtr smk_sharesub(SharTermPtr body, std::vector<Var> shared, Var var,
                         SharBag bag, bool has_share = true);
SharTermPtr smk_check();
SharExpr sexpr_of(SharTermPtr t);

// ---- static functions ----

VarSet shar_free_vars(const SharTermPtr& t);
VarSet shar_free_vars(const SharBag& b);
VarSet shar_free_vars(const SharExpr& e);
int shar_occurrence_count(const Var& x, const SharTermPtr& t);

HeadResult shar_head(const SharTermPtr& t);
SharTermPtr shar_linear_head_subst(const SharTermPtr& t, const SharTermPtr& n,
                                   const Var& x);

// Structural conditions on sharing and linear substitutions: each shared or
// linearly substituted variable occurs exactly once, is not itself a sharing
// variable, and linear substitutions on one variable do not nest.
struct ValidationError {
  std::string message;
};
std::optional<ValidationError> validate(const SharTermPtr& t);
std::optional<ValidationError> validate(const SharExpr& e);

SharTermPtr shar_rename_free(const SharTermPtr& t, const Var& x, const Var& y);
SharTermPtr shar_alpha_avoid(const SharTermPtr& t, const VarSet& avoid,
                             NameGen& gen);
void shar_all_vars(const SharTermPtr& t, VarSet& out);

std::vector<SharBag> shar_bag_perm_seq(const SharBag& b);

// ---- printing and parsing ----

std::string print_shar_term(const SharTermPtr& t);
std::string print_shar_bag(const SharBag& b);
std::string print_shar_expr(const SharExpr& e);
std::string alpha_print(const SharTermPtr& t);
std::string alpha_print(const SharExpr& e);

SharTermPtr canon_shar_term(const SharTermPtr& t);
SharExpr canon_shar_expr(const SharExpr& e);
std::string canonical_key(const SharTermPtr& t);
std::string canonical_key(const SharExpr& e);
bool shar_term_equal(const SharTermPtr& a, const SharTermPtr& b);
bool shar_expr_equal(const SharExpr& a, const SharExpr& b);

SharExpr parse_shar_expr(const std::string& text);
SharTermPtr parse_shar_term(const std::string& text);

}  // namespace lampi
