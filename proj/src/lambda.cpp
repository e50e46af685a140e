#include "lampi/lambda.hpp"

#include <algorithm>
#include <map>

#include "lampi/lexer.hpp"

namespace lampi {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

TermPtr mk_var(Var v) { return std::make_shared<Term>(Term{TVar{std::move(v)}}); }
TermPtr mk_abs(Var param, TermPtr body) {
  return std::make_shared<Term>(Term{TAbs{std::move(param), std::move(body)}});
}
TermPtr mk_app(TermPtr fun, Bag arg) {
  return std::make_shared<Term>(Term{TApp{std::move(fun), std::move(arg)}});
}
TermPtr mk_sub(TermPtr body, Bag bag, Var var) {
  return std::make_shared<Term>(
      Term{TSub{std::move(body), std::move(bag), std::move(var)}});
}
TermPtr mk_fail(std::vector<Var> vars) {
  std::sort(vars.begin(), vars.end());
  return std::make_shared<Term>(Term{TFail{std::move(vars)}});
}
TermPtr mk_check() { return std::make_shared<Term>(Term{TCheck{}}); }
Expr expr_of(TermPtr t) { return Expr{{std::move(t)}}; }

// ---- free variables ----

VarSet free_vars_set(const TermPtr& t) {
  return std::visit(
      overloaded{
          [](const TVar& n) { return VarSet{n.var}; },
          [](const TAbs& n) {
            VarSet s = free_vars_set(n.body);
            s.erase(n.param);
            return s;
          },
          [](const TApp& n) {
            return set_union(free_vars_set(n.fun), free_vars_set(n.arg));
          },
          [](const TSub& n) {
            VarSet s = free_vars_set(n.body);
            s.erase(n.var);
            return set_union(std::move(s), free_vars_set(n.bag));
          },
          [](const TFail& n) { return VarSet(n.vars.begin(), n.vars.end()); },
          [](const TCheck&) { return VarSet{}; },
      },
      t->node);
}

VarSet free_vars_set(const Bag& b) {
  VarSet s;
  for (auto& m : b.items) s = set_union(std::move(s), free_vars_set(m));
  return s;
}

VarSet free_vars_set(const Expr& e) {
  VarSet s;
  for (auto& m : e.sum) s = set_union(std::move(s), free_vars_set(m));
  return s;
}

VarMultiset free_vars_multiset(const TermPtr& t) {
  return std::visit(
      overloaded{
          [](const TVar& n) {
            VarMultiset m;
            m.add(n.var);
            return m;
          },
          [](const TAbs& n) {
            VarMultiset m = free_vars_multiset(n.body);
            m.remove_all(n.param);
            return m;
          },
          [](const TApp& n) {
            VarMultiset m = free_vars_multiset(n.fun);
            m.add_all(free_vars_multiset(n.arg));
            return m;
          },
          [](const TSub& n) {
            VarMultiset m = free_vars_multiset(n.body);
            m.remove_all(n.var);
            m.add_all(free_vars_multiset(n.bag));
            return m;
          },
          [](const TFail& n) {
            VarMultiset m;
            for (auto& v : n.vars) m.add(v);
            return m;
          },
          [](const TCheck&) { return VarMultiset{}; },
      },
      t->node);
}

VarMultiset free_vars_multiset(const Bag& b) {
  VarMultiset m;
  for (auto& t : b.items) m.add_all(free_vars_multiset(t));
  return m;
}

int occurrence_count(const Var& x, const TermPtr& t) {
  return free_vars_multiset(t).count(x);
}

// ---- head and linear head substitution ----

HeadResult head(const TermPtr& t) {
  return std::visit(
      overloaded{
          [](const TVar& n) {
            return HeadResult{HeadResult::HVar, n.var, nullptr, {}};
          },
          [&](const TAbs&) {
            return HeadResult{HeadResult::HAbs, {}, t, {}};
          },
          [](const TApp& n) { return head(n.fun); },
          [](const TSub& n) {
            if (occurrence_count(n.var, n.body) == int(n.bag.size()))
              return head(n.body);
            return HeadResult{HeadResult::HFail, {}, nullptr, {}};
          },
          [](const TFail& n) {
            return HeadResult{HeadResult::HFail, {}, nullptr, n.vars};
          },
          [](const TCheck&) {
            return HeadResult{HeadResult::HCheck, {}, nullptr, {}};
          },
      },
      t->node);
}

TermPtr linear_head_subst(const TermPtr& t, const TermPtr& n, const Var& x) {
  HeadResult h = head(t);
  if (h.kind != HeadResult::HVar || h.var != x)
    throw HeadMismatch("linear_head_subst: head(t) is not " + to_string(x));
  return std::visit(
      overloaded{
          [&](const TVar&) { return n; },
          [&](const TApp& a) {
            return mk_app(linear_head_subst(a.fun, n, x), a.arg);
          },
          [&](const TSub& s) {
            // x != s.var holds: head computation passed through the binder
            return mk_sub(linear_head_subst(s.body, n, x), s.bag, s.var);
          },
          [&](const auto&) -> TermPtr {
            throw HeadMismatch("linear_head_subst: unexpected shape");
          },
      },
      t->node);
}

// ---- bag utilities ----

size_t bag_size(const Bag& b) { return b.items.size(); }

std::pair<TermPtr, Bag> bag_remove(const Bag& b, size_t i) {
  if (i >= b.items.size())
    throw IndexOutOfRange("bag_remove: index " + std::to_string(i));
  Bag rest;
  rest.items.reserve(b.items.size() - 1);
  for (size_t j = 0; j < b.items.size(); j++)
    if (j != i) rest.items.push_back(b.items[j]);
  return {b.items[i], rest};
}

std::vector<std::vector<size_t>> index_permutations(size_t n) {
  std::vector<size_t> idx(n);
  for (size_t i = 0; i < n; i++) idx[i] = i;
  std::vector<std::vector<size_t>> out;
  do {
    out.push_back(idx);
  } while (std::next_permutation(idx.begin(), idx.end()));
  return out;
}

std::vector<Bag> bag_perm_seq(const Bag& b) {
  std::vector<Bag> out;
  for (auto& perm : index_permutations(b.items.size())) {
    Bag p;
    for (size_t i : perm) p.items.push_back(b.items[i]);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<Bag> bag_permutations(const Bag& b) {
  std::map<std::string, Bag> seen;
  for (auto& p : bag_perm_seq(b)) {
    std::string key;
    for (auto& t : p.items) key += canonical_key(t) + "\x1f";
    seen.emplace(std::move(key), p);
  }
  std::vector<Bag> out;
  out.reserve(seen.size());
  for (auto& [k, p] : seen) out.push_back(p);
  return out;
}

// ---- alpha handling ----

TermPtr rename_free(const TermPtr& t, const Var& x, const Var& y) {
  auto ren_bag = [&](const Bag& b) {
    Bag out;
    for (auto& m : b.items) out.items.push_back(rename_free(m, x, y));
    return out;
  };
  return std::visit(
      overloaded{
          [&](const TVar& n) { return n.var == x ? mk_var(y) : t; },
          [&](const TAbs& n) {
            if (n.param == x) return t;
            return mk_abs(n.param, rename_free(n.body, x, y));
          },
          [&](const TApp& n) {
            return mk_app(rename_free(n.fun, x, y), ren_bag(n.arg));
          },
          [&](const TSub& n) {
            TermPtr body = n.var == x ? n.body : rename_free(n.body, x, y);
            return mk_sub(body, ren_bag(n.bag), n.var);
          },
          [&](const TFail& n) {
            std::vector<Var> vars = n.vars;
            for (auto& v : vars)
              if (v == x) v = y;
            return mk_fail(std::move(vars));
          },
          [&](const TCheck&) { return t; },
      },
      t->node);
}

void all_vars(const TermPtr& t, VarSet& out) {
  std::visit(overloaded{
                 [&](const TVar& n) { out.insert(n.var); },
                 [&](const TAbs& n) {
                   out.insert(n.param);
                   all_vars(n.body, out);
                 },
                 [&](const TApp& n) {
                   all_vars(n.fun, out);
                   for (auto& m : n.arg.items) all_vars(m, out);
                 },
                 [&](const TSub& n) {
                   out.insert(n.var);
                   all_vars(n.body, out);
                   for (auto& m : n.bag.items) all_vars(m, out);
                 },
                 [&](const TFail& n) {
                   for (auto& v : n.vars) out.insert(v);
                 },
                 [&](const TCheck&) {},
             },
             t->node);
}

TermPtr alpha_avoid(const TermPtr& t, const VarSet& avoid, NameGen& gen) {
  auto avoid_bag = [&](const Bag& b) {
    Bag out;
    for (auto& m : b.items) out.items.push_back(alpha_avoid(m, avoid, gen));
    return out;
  };
  return std::visit(
      overloaded{
          [&](const TVar&) { return t; },
          [&](const TAbs& n) {
            TermPtr body = alpha_avoid(n.body, avoid, gen);
            if (contains(avoid, n.param)) {
              Var fresh = gen.fresh(n.param.base);
              return mk_abs(fresh, rename_free(body, n.param, fresh));
            }
            return mk_abs(n.param, body);
          },
          [&](const TApp& n) {
            return mk_app(alpha_avoid(n.fun, avoid, gen), avoid_bag(n.arg));
          },
          [&](const TSub& n) {
            TermPtr body = alpha_avoid(n.body, avoid, gen);
            Bag bag = avoid_bag(n.bag);
            if (contains(avoid, n.var)) {
              Var fresh = gen.fresh(n.var.base);
              return mk_sub(rename_free(body, n.var, fresh), bag, fresh);
            }
            return mk_sub(body, bag, n.var);
          },
          [&](const TFail&) { return t; },
          [&](const TCheck&) { return t; },
      },
      t->node);
}

// ---- printing ----

namespace {

// env maps bound variables to placeholder names for alpha printing.
using AlphaEnv = std::map<Var, std::string>;

std::string print_var(const Var& v, const AlphaEnv* env) {
  if (env) {
    auto it = env->find(v);
    if (it != env->end()) return it->second;
  }
  return to_string(v);
}

std::string show_term(const TermPtr& t, const AlphaEnv* env, int* binder_count);

std::string show_bag(const Bag& b, const AlphaEnv* env, int* binder_count) {
  if (b.items.empty()) return "1";
  std::string out;
  for (size_t i = 0; i < b.items.size(); i++) {
    if (i) out += "*";
    out += "[" + show_term(b.items[i], env, binder_count) + "]";
  }
  return out;
}

bool needs_parens_in_fun_pos(const TermPtr& t) {
  return std::holds_alternative<TAbs>(t->node);
}

std::string show_term(const TermPtr& t, const AlphaEnv* env,
                      int* binder_count) {
  return std::visit(
      overloaded{
          [&](const TVar& n) { return print_var(n.var, env); },
          [&](const TAbs& n) {
            if (env) {
              AlphaEnv inner = *env;
              inner[n.param] = "%" + std::to_string((*binder_count)++);
              std::string p = inner[n.param];
              return "\\" + p + ". " + show_term(n.body, &inner, binder_count);
            }
            return "\\" + to_string(n.param) + ". " +
                   show_term(n.body, env, binder_count);
          },
          [&](const TApp& n) {
            std::string f = show_term(n.fun, env, binder_count);
            if (needs_parens_in_fun_pos(n.fun)) f = "(" + f + ")";
            return f + " " + show_bag(n.arg, env, binder_count);
          },
          [&](const TSub& n) {
            std::string bag;
            std::string body;
            if (env) {
              bag = show_bag(n.bag, env, binder_count);
              AlphaEnv inner = *env;
              inner[n.var] = "%" + std::to_string((*binder_count)++);
              body = show_term(n.body, &inner, binder_count);
              std::string bp = inner[n.var];
              if (needs_parens_in_fun_pos(n.body)) body = "(" + body + ")";
              return body + " <<" + bag + "/" + bp + ">>";
            }
            bag = show_bag(n.bag, env, binder_count);
            body = show_term(n.body, env, binder_count);
            if (needs_parens_in_fun_pos(n.body)) body = "(" + body + ")";
            return body + " <<" + bag + "/" + to_string(n.var) + ">>";
          },
          [&](const TFail& n) {
            std::string out = "fail{";
            for (size_t i = 0; i < n.vars.size(); i++) {
              if (i) out += ",";
              out += print_var(n.vars[i], env);
            }
            return out + "}";
          },
          [&](const TCheck&) { return std::string("check"); },
      },
      t->node);
}

}  // namespace

std::string print_term(const TermPtr& t) { return show_term(t, nullptr, nullptr); }
std::string print_bag(const Bag& b) { return show_bag(b, nullptr, nullptr); }

std::string print_expr(const Expr& e) {
  std::string out;
  for (size_t i = 0; i < e.sum.size(); i++) {
    if (i) out += " + ";
    out += print_term(e.sum[i]);
  }
  return out;
}

std::string alpha_print(const TermPtr& t) {
  AlphaEnv env;
  int count = 0;
  return show_term(t, &env, &count);
}

std::string alpha_print(const Expr& e) {
  std::string out;
  for (size_t i = 0; i < e.sum.size(); i++) {
    if (i) out += " + ";
    out += alpha_print(e.sum[i]);
  }
  return out;
}

TermPtr canon_term(const TermPtr& t) {
  auto canon_bag = [](const Bag& b) {
    std::vector<std::pair<std::string, TermPtr>> keyed;
    keyed.reserve(b.items.size());
    for (auto& m : b.items) {
      TermPtr c = canon_term(m);
      keyed.emplace_back(alpha_print(c), c);
    }
    std::sort(keyed.begin(), keyed.end(),
              [](const auto& a, const auto& c) { return a.first < c.first; });
    Bag out;
    for (auto& [k, m] : keyed) out.items.push_back(m);
    return out;
  };
  return std::visit(
      overloaded{
          [&](const TVar&) { return t; },
          [&](const TAbs& n) { return mk_abs(n.param, canon_term(n.body)); },
          [&](const TApp& n) {
            return mk_app(canon_term(n.fun), canon_bag(n.arg));
          },
          [&](const TSub& n) {
            return mk_sub(canon_term(n.body), canon_bag(n.bag), n.var);
          },
          [&](const TFail&) { return t; },
          [&](const TCheck&) { return t; },
      },
      t->node);
}

Expr canon_expr(const Expr& e) {
  std::vector<std::pair<std::string, TermPtr>> keyed;
  keyed.reserve(e.sum.size());
  for (auto& m : e.sum) {
    TermPtr c = canon_term(m);
    keyed.emplace_back(alpha_print(c), c);
  }
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  Expr out;
  for (auto& [k, m] : keyed) out.sum.push_back(m);
  return out;
}

std::string canonical_key(const Expr& e) { return alpha_print(canon_expr(e)); }

bool expr_equal(const Expr& a, const Expr& b) {
  return canonical_key(a) == canonical_key(b);
}

bool term_equal(const TermPtr& a, const TermPtr& b) {
  return canonical_key(a) == canonical_key(b);
}

// ---- parsing ----

namespace {

TermPtr parse_term_at(TokenStream& ts);

Bag parse_bag_at(TokenStream& ts) {
  if (ts.accept_symbol("(")) {
    Bag inner = parse_bag_at(ts);
    ts.expect_symbol(")");
    return inner;
  }
  if (ts.peek().kind == Token::Number && ts.peek().number == 1) {
    ts.next();
    return Bag{};
  }
  Bag out;
  ts.expect_symbol("[");
  out.items.push_back(parse_term_at(ts));
  ts.expect_symbol("]");
  while (ts.accept_symbol("*")) {
    if (ts.peek().kind == Token::Number && ts.peek().number == 1) {
      ts.next();
      break;  // trailing empty bag is the identity
    }
    ts.expect_symbol("[");
    out.items.push_back(parse_term_at(ts));
    ts.expect_symbol("]");
  }
  return out;
}

bool starts_bag(const TokenStream& ts) {
  if (ts.is_symbol("[") ||
      (ts.peek().kind == Token::Number && ts.peek().number == 1))
    return true;
  // parenthesized bag in argument position, e.g. (\x. x) ([y]*[z])
  return ts.is_symbol("(") &&
         (ts.is_symbol("[", 1) ||
          (ts.peek(1).kind == Token::Number && ts.peek(1).number == 1));
}

TermPtr parse_atom(TokenStream& ts) {
  const Token& t = ts.peek();
  if (ts.accept_symbol("(")) {
    TermPtr inner = parse_term_at(ts);
    ts.expect_symbol(")");
    return inner;
  }
  if (t.kind == Token::Ident) {
    if (t.text == "fail") {
      ts.next();
      ts.expect_symbol("{");
      std::vector<Var> vars;
      if (!ts.is_symbol("}")) {
        vars.push_back(ts.expect_ident());
        while (ts.accept_symbol(",")) vars.push_back(ts.expect_ident());
      }
      ts.expect_symbol("}");
      return mk_fail(std::move(vars));
    }
    if (t.text == "check" && t.var_index < 0) {
      ts.next();
      return mk_check();
    }
    ts.next();
    return mk_var(t.as_var());
  }
  throw SyntaxError("expected a term, found '" + t.text + "'", t.pos);
}

TermPtr parse_term_at(TokenStream& ts) {
  if (ts.accept_symbol("\\")) {
    Var param = ts.expect_ident();
    ts.expect_symbol(".");
    return mk_abs(param, parse_term_at(ts));
  }
  TermPtr acc = parse_atom(ts);
  for (;;) {
    if (starts_bag(ts)) {
      acc = mk_app(acc, parse_bag_at(ts));
    } else if (ts.accept_symbol("<<")) {
      Bag b = parse_bag_at(ts);
      ts.expect_symbol("/");
      Var v = ts.expect_ident();
      ts.expect_symbol(">>");
      acc = mk_sub(acc, std::move(b), v);
    } else {
      break;
    }
  }
  return acc;
}

}  // namespace

Expr parse_expr(const std::string& text) {
  TokenStream ts(text);
  Expr out;
  out.sum.push_back(parse_term_at(ts));
  while (ts.accept_symbol("+")) out.sum.push_back(parse_term_at(ts));
  ts.expect_end();
  return out;
}

TermPtr parse_term(const std::string& text) {
  TokenStream ts(text);
  TermPtr t = parse_term_at(ts);
  ts.expect_end();
  return t;
}

}  // namespace lampi
