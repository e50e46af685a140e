#include "lampi/types.hpp"

#include <algorithm>

#include "lampi/lexer.hpp"

namespace lampi {

StrictPtr mk_unit() {
  static StrictPtr u = std::make_shared<StrictType>(StrictType{TUnit{}});
  return u;
}
StrictPtr mk_arrow(MultisetType domain, StrictPtr codomain) {
  return std::make_shared<StrictType>(
      StrictType{TArrow{std::move(domain), std::move(codomain)}});
}
StrictPtr mk_tmeta(int id) {
  return std::make_shared<StrictType>(StrictType{TMeta{id}});
}

std::string print_strict(const StrictPtr& t) {
  if (std::holds_alternative<TUnit>(t->node)) return "unit";
  if (auto* m = std::get_if<TMeta>(&t->node))
    return "?" + std::to_string(m->id);
  auto& a = std::get<TArrow>(t->node);
  return print_multiset(a.domain) + " -> " + print_strict(a.codomain);
}

std::string print_multiset(const MultisetType& m) {
  if (m.count_meta >= 0) return "?^c" + std::to_string(m.count_meta);
  if (m.count == 0) return "w";
  std::string base = m.base ? print_strict(m.base) : "unit";
  if (m.base && std::holds_alternative<TArrow>(m.base->node))
    base = "(" + base + ")";
  return base + "^" + std::to_string(m.count);
}

std::string print_context(const TypeContext& ctx) {
  std::vector<std::string> parts;
  for (auto& [v, t] : ctx.strict)
    parts.push_back(to_string(v) + ":" + print_strict(t));
  for (auto& [v, m] : ctx.multi)
    parts.push_back(to_string(v) + ":" + print_multiset(m));
  std::sort(parts.begin(), parts.end());
  std::string out;
  for (size_t i = 0; i < parts.size(); i++) {
    if (i) out += ", ";
    out += parts[i];
  }
  return out;
}

namespace {

// type ::= "w" ["->" type] | atom ["^" num] ["->" type]
// atom ::= "unit" | "(" type-that-must-be-strict ")"
TypeEntry parse_type_at(TokenStream& ts) {
  auto arrow_from = [&](MultisetType dom) -> TypeEntry {
    TypeEntry cod = parse_type_at(ts);
    if (!cod.strict)
      throw SyntaxError("arrow codomain must be a strict type", ts.peek().pos);
    return TypeEntry{mk_arrow(std::move(dom), *cod.strict), std::nullopt};
  };

  if (ts.peek().kind == Token::Ident && ts.peek().text == "w" &&
      ts.peek().var_index < 0) {
    ts.next();
    if (ts.accept_symbol("->")) return arrow_from(MultisetType{nullptr, 0});
    return TypeEntry{std::nullopt, MultisetType{nullptr, 0}};
  }
  StrictPtr atom;
  if (ts.peek().kind == Token::Ident && ts.peek().text == "unit") {
    ts.next();
    atom = mk_unit();
  } else if (ts.accept_symbol("(")) {
    TypeEntry inner = parse_type_at(ts);
    ts.expect_symbol(")");
    if (!inner.strict)
      throw SyntaxError("parenthesized type must be strict", ts.peek().pos);
    atom = *inner.strict;
  } else {
    throw SyntaxError("expected a type, found '" + ts.peek().text + "'",
                      ts.peek().pos);
  }
  std::optional<int> count;
  if (ts.accept_symbol("^")) count = ts.expect_number();
  if (ts.accept_symbol("->"))
    return arrow_from(MultisetType{atom, count.value_or(1)});
  if (count) return TypeEntry{std::nullopt, MultisetType{atom, *count}};
  return TypeEntry{atom, std::nullopt};
}

}  // namespace

StrictPtr parse_strict_type(const std::string& text) {
  TokenStream ts(text);
  TypeEntry e = parse_type_at(ts);
  ts.expect_end();
  if (!e.strict) throw SyntaxError("expected a strict type", 0);
  return *e.strict;
}

TypeContext parse_context(const std::string& text) {
  TypeContext out;
  TokenStream ts(text);
  if (ts.at_end()) return out;
  for (;;) {
    Var v = ts.expect_ident();
    ts.expect_symbol(":");
    TypeEntry e = parse_type_at(ts);
    if (e.strict)
      out.strict.emplace_back(v, *e.strict);
    else
      out.multi.emplace_back(v, *e.multi);
    if (!ts.accept_symbol(",")) break;
  }
  ts.expect_end();
  return out;
}

bool strict_equal(const StrictPtr& a, const StrictPtr& b) {
  return print_strict(a) == print_strict(b);
}

TypeContext translate_context(const TypeContext& ctx) {
  TypeContext out;
  std::map<Var, std::vector<StrictPtr>> grouped;
  std::vector<Var> order;
  for (auto& [v, t] : ctx.strict) {
    if (!grouped.count(v)) order.push_back(v);
    grouped[v].push_back(t);
  }
  for (auto& v : order) {
    auto& types = grouped[v];
    for (auto& t : types)
      if (!strict_equal(t, types[0]))
        throw ContextError("variable " + to_string(v) +
                           " has assignments of different strict types");
    out.multi.emplace_back(v, MultisetType{types[0], int(types.size())});
  }
  for (auto& [v, m] : ctx.multi) {
    if (grouped.count(v))
      throw ContextError("variable " + to_string(v) +
                         " has both strict and multiset assignments");
    out.multi.emplace_back(v, m);
  }
  return out;
}

}  // namespace lampi
