#pragma once

#include "lampi/lambda.hpp"
#include "lampi/sharing.hpp"

namespace lampi {

struct ArityMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The translation of a term whose function position, bag element, or
// abstraction body would need a non-singleton sum is undefined.
struct EncodeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Replaces the i-th free occurrence of x (left-to-right) by fresh[i].
// Requires |fresh| = occurrence_count(x, t) and fresh distinct, not free in t.
TermPtr simultaneous_linear_subst(const TermPtr& t, const Var& x,
                                  const std::vector<Var>& fresh);

// Atomizing translation. Fresh occurrence names are formed by appending the
// occurrence index to the variable name (x -> x1, x2, ...), falling back to
// the base!k generator on collision.
struct Atomizer {
  VarSet used;
  NameGen gen;

  Var fresh_occ(const Var& x, int i);
  std::vector<Var> fresh_family(const Var& x, int n);

  // Auxiliary translation on (not necessarily closed) terms and bags;
  // a balanced non-empty explicit substitution yields a permutation sum.
  SharExpr closed_term(const TermPtr& t);
  SharBag closed_bag(const Bag& b);
  // Requires the result to be a single term.
  SharTermPtr closed_term_single(const TermPtr& t);
};

// Shares every free variable of each summand (in sorted order, innermost
// first) and then applies the auxiliary translation.
SharExpr encode_open(const Expr& e);
SharExpr encode_open_term(const TermPtr& t);

}  // namespace lampi
