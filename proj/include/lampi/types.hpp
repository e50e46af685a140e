#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lampi/var.hpp"

namespace lampi {

struct StrictType;
using StrictPtr = std::shared_ptr<const StrictType>;

// sigma^k with count 0 encoding omega (base irrelevant and may be null).
// count_meta is checker-internal: an unresolved bag/occurrence arity.
struct MultisetType {
  StrictPtr base;
  int count = 0;
  int count_meta = -1;  // -1: count is concrete
};

struct TUnit {};
struct TArrow {
  MultisetType domain;
  StrictPtr codomain;
};
struct TMeta {  // checker-internal unification variable
  int id;
};

struct StrictType {
  std::variant<TUnit, TArrow, TMeta> node;
};

StrictPtr mk_unit();
StrictPtr mk_arrow(MultisetType domain, StrictPtr codomain);
StrictPtr mk_tmeta(int id);

std::string print_strict(const StrictPtr& t);
std::string print_multiset(const MultisetType& m);

// A typing context: a multiset of strict assignments (a variable may repeat,
// possibly at different strict types) plus collapsed multiset/omega entries.
struct TypeContext {
  std::vector<std::pair<Var, StrictPtr>> strict;
  std::vector<std::pair<Var, MultisetType>> multi;  // count 0 entries are omega

  bool empty() const { return strict.empty() && multi.empty(); }
};

std::string print_context(const TypeContext& ctx);

// Type syntax: `unit`, `pi -> sigma`, `sigma^k`, `w`.
StrictPtr parse_strict_type(const std::string& text);
// Entry syntax used in contexts: a strict type, `sigma^k`, or `w`.
struct TypeEntry {
  std::optional<StrictPtr> strict;
  std::optional<MultisetType> multi;
};
// Context syntax: empty string or `x:TYPE, y:TYPE, ...`.
TypeContext parse_context(const std::string& text);

// Collapses repeated strict assignments of one variable into one multiset
// assignment; rejects variables assigned two different strict types.
struct ContextError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
TypeContext translate_context(const TypeContext& ctx);

bool strict_equal(const StrictPtr& a, const StrictPtr& b);

}  // namespace lampi
