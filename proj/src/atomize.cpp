#include "lampi/atomize.hpp"

#include <algorithm>

namespace lampi {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

TermPtr subst_walk(const TermPtr& t, const Var& x,
                   const std::vector<Var>& fresh, size_t& next) {
  return std::visit(
      overloaded{
          [&](const TVar& n) {
            if (n.var != x) return t;
            if (next >= fresh.size())
              throw ArityMismatch("more occurrences than fresh names");
            return mk_var(fresh[next++]);
          },
          [&](const TAbs& n) {
            if (n.param == x) return t;
            return mk_abs(n.param, subst_walk(n.body, x, fresh, next));
          },
          [&](const TApp& n) {
            TermPtr fun = subst_walk(n.fun, x, fresh, next);
            Bag arg;
            for (auto& m : n.arg.items)
              arg.items.push_back(subst_walk(m, x, fresh, next));
            return mk_app(fun, arg);
          },
          [&](const TSub& n) {
            TermPtr body =
                n.var == x ? n.body : subst_walk(n.body, x, fresh, next);
            Bag bag;
            for (auto& m : n.bag.items)
              bag.items.push_back(subst_walk(m, x, fresh, next));
            return mk_sub(body, bag, n.var);
          },
          [&](const TFail& n) {
            std::vector<Var> vars;
            vars.reserve(n.vars.size());
            for (auto& v : n.vars) {
              if (v == x) {
                if (next >= fresh.size())
                  throw ArityMismatch("more occurrences than fresh names");
                vars.push_back(fresh[next++]);
              } else {
                vars.push_back(v);
              }
            }
            return mk_fail(std::move(vars));
          },
          [&](const TCheck&) { return t; },
      },
      t->node);
}

}  // namespace

TermPtr simultaneous_linear_subst(const TermPtr& t, const Var& x,
                                  const std::vector<Var>& fresh) {
  if (int(fresh.size()) != occurrence_count(x, t))
    throw ArityMismatch("fresh name count " + std::to_string(fresh.size()) +
                        " does not match occurrences of " + to_string(x));
  size_t next = 0;
  return subst_walk(t, x, fresh, next);
}

Var Atomizer::fresh_occ(const Var& x, int i) {
  if (x.index < 0) {
    Var candidate{x.base + std::to_string(i), -1};
    if (!contains(used, candidate)) {
      used.insert(candidate);
      return candidate;
    }
  }
  for (;;) {
    Var candidate = gen.fresh(x.base);
    if (!contains(used, candidate)) {
      used.insert(candidate);
      return candidate;
    }
  }
}

std::vector<Var> Atomizer::fresh_family(const Var& x, int n) {
  std::vector<Var> out;
  out.reserve(n);
  for (int i = 1; i <= n; i++) out.push_back(fresh_occ(x, i));
  return out;
}

SharTermPtr Atomizer::closed_term_single(const TermPtr& t) {
  SharExpr e = closed_term(t);
  if (e.sum.size() != 1)
    throw EncodeError(
        "translation of a subterm in term position is a non-singleton sum: " +
        print_term(t));
  return e.sum[0];
}

SharBag Atomizer::closed_bag(const Bag& b) {
  SharBag out;
  for (auto& m : b.items) out.items.push_back(closed_term_single(m));
  return out;
}

SharExpr Atomizer::closed_term(const TermPtr& t) {
  return std::visit(
      overloaded{
          [&](const TVar& n) { return sexpr_of(smk_var(n.var)); },
          [&](const TAbs& n) {
            int occ = occurrence_count(n.param, n.body);
            std::vector<Var> family = fresh_family(n.param, occ);
            TermPtr renamed =
                simultaneous_linear_subst(n.body, n.param, family);
            SharTermPtr inner = closed_term_single(renamed);
            return sexpr_of(
                smk_abs(n.param, smk_share(inner, family, n.param)));
          },
          [&](const TApp& n) {
            SharTermPtr fun = closed_term_single(n.fun);
            return sexpr_of(smk_app(fun, closed_bag(n.arg)));
          },
          [&](const TSub& n) {
            int occ = occurrence_count(n.var, n.body);
            std::vector<Var> family = fresh_family(n.var, occ);
            TermPtr renamed = simultaneous_linear_subst(n.body, n.var, family);
            if (occ == int(n.bag.size()) && occ >= 1) {
              SharTermPtr body = closed_term_single(renamed);
              SharBag bag = closed_bag(n.bag);
              SharExpr out;
              for (auto& bi : shar_bag_perm_seq(bag)) {
                SharTermPtr chain = body;
                for (size_t j = 0; j < family.size(); j++)
                  chain = smk_linsub(chain, bi.items[j], family[j]);
                out.sum.push_back(std::move(chain));
              }
              return out;
            }
            SharTermPtr body = closed_term_single(renamed);
            return sexpr_of(
                smk_sharesub(body, family, n.var, closed_bag(n.bag)));
          },
          [&](const TFail& n) { return sexpr_of(smk_fail(n.vars)); },
          [&](const TCheck&) { return sexpr_of(smk_check()); },
      },
      t->node);
}

SharExpr encode_open_term(const TermPtr& t) {
  Atomizer az;
  all_vars(t, az.used);
  VarSet fv = free_vars_set(t);
  // free variables shared in sorted order, first variable innermost
  std::vector<std::pair<Var, std::vector<Var>>> wrappers;
  TermPtr cur = t;
  for (auto& x : fv) {
    int occ = occurrence_count(x, cur);
    std::vector<Var> family = az.fresh_family(x, occ);
    cur = simultaneous_linear_subst(cur, x, family);
    wrappers.emplace_back(x, std::move(family));
  }
  SharExpr closed = az.closed_term(cur);
  SharExpr out;
  for (auto& summand : closed.sum) {
    SharTermPtr wrapped = summand;
    for (auto& [x, family] : wrappers)
      wrapped = smk_share(wrapped, family, x);
    out.sum.push_back(std::move(wrapped));
  }
  return out;
}

SharExpr encode_open(const Expr& e) {
  SharExpr out;
  for (auto& m : e.sum) {
    SharExpr part = encode_open_term(m);
    for (auto& s : part.sum) out.sum.push_back(std::move(s));
  }
  return out;
}

}  // namespace lampi
