#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lampi/var.hpp"

namespace lampi {

// ---- syntax of the resource calculus with failure ----

struct Term;
using TermPtr = std::shared_ptr<const Term>;

// Ordered list of terms; the empty list is the empty bag 1. Concatenation is
// list append; equality is multiset equality via canonicalization.
struct Bag {
  std::vector<TermPtr> items;
  bool empty() const { return items.empty(); }
  size_t size() const { return items.size(); }
};

struct TVar {
  Var var;
};
struct TAbs {
  Var param;
  TermPtr body;
};
struct TApp {
  TermPtr fun;
  Bag arg;
};
struct TSub {  // explicit substitution  body <<bag/var>>
  TermPtr body;
  Bag bag;
  Var var;
};
struct TFail {  // fail{x,...}; vars kept sorted, duplicates allowed
  std::vector<Var> vars;
};
struct TCheck {};  // the success construct

struct Term {
  std::variant<TVar, TAbs, TApp, TSub, TFail, TCheck> node;
};

// Nonempty formal sum of terms.
struct Expr {
  std::vector<TermPtr> sum;
};

TermPtr mk_var(Var v);
TermPtr mk_abs(Var param, TermPtr body);
TermPtr mk_app(TermPtr fun, Bag arg);
TermPtr mk_sub(TermPtr body, Bag bag, Var var);
TermPtr mk_fail(std::vector<Var> vars);
TermPtr mk_check();
Expr expr_of(TermPtr t);

// ---- static functions ----

VarSet free_vars_set(const TermPtr& t);
VarSet free_vars_set(const Bag& b);
VarSet free_vars_set(const Expr& e);
VarMultiset free_vars_multiset(const TermPtr& t);
VarMultiset free_vars_multiset(const Bag& b);
int occurrence_count(const Var& x, const TermPtr& t);

struct HeadResult {
  enum Kind { HVar, HAbs, HFail, HCheck } kind;
  Var var;                      // for HVar
  TermPtr abs;                  // for HAbs
  std::vector<Var> fail_vars;   // for HFail
};

HeadResult head(const TermPtr& t);

struct HeadMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Replaces the head occurrence of x in t by n; requires head(t) = x.
TermPtr linear_head_subst(const TermPtr& t, const TermPtr& n, const Var& x);

// ---- bag utilities ----

struct IndexOutOfRange : std::runtime_error {
  using std::runtime_error::runtime_error;
};

size_t bag_size(const Bag& b);
std::pair<TermPtr, Bag> bag_remove(const Bag& b, size_t i);
// All orderings deduplicated up to term equality, sorted lexicographically by
// the canonical printing of their elements.
std::vector<Bag> bag_permutations(const Bag& b);
// All n! index permutations of b, in lexicographic index order; duplicates
// are kept. Reduction rules and the process encoding sum over this sequence.
std::vector<Bag> bag_perm_seq(const Bag& b);
std::vector<std::vector<size_t>> index_permutations(size_t n);

// ---- alpha handling ----

// Renames the free occurrences of x in t to y (capture is the caller's
// responsibility; y is expected fresh).
TermPtr rename_free(const TermPtr& t, const Var& x, const Var& y);
// Alpha-renames binders of t that clash with the given set.
TermPtr alpha_avoid(const TermPtr& t, const VarSet& avoid, NameGen& gen);
// All variables occurring anywhere in the term (free, bound, or binder).
void all_vars(const TermPtr& t, VarSet& out);

// ---- printing and parsing ----

std::string print_term(const TermPtr& t);
std::string print_bag(const Bag& b);
std::string print_expr(const Expr& e);

// Binder-insensitive print: binders are numbered by traversal position.
std::string alpha_print(const TermPtr& t);
std::string alpha_print(const Expr& e);

// Sorts bags and sums recursively by element print.
TermPtr canon_term(const TermPtr& t);
Expr canon_expr(const Expr& e);

inline std::string canonical_key(const TermPtr& t) {
  return alpha_print(canon_term(t));
}
std::string canonical_key(const Expr& e);
bool expr_equal(const Expr& a, const Expr& b);
bool term_equal(const TermPtr& a, const TermPtr& b);

Expr parse_expr(const std::string& text);
TermPtr parse_term(const std::string& text);

}  // namespace lampi
