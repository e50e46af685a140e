#include "lampi/lambda_reduce.hpp"

#include <algorithm>
#include <set>

namespace lampi {

std::string to_string(RuleTag t) {
  switch (t) {
    case RuleTag::Beta: return "R:Beta";
    case RuleTag::Fetch: return "R:Fetch";
    case RuleTag::Fail: return "R:Fail";
    case RuleTag::Cons1: return "R:Cons1";
    case RuleTag::Cons2: return "R:Cons2";
    case RuleTag::TCont: return "R:TCont";
    case RuleTag::ECont: return "R:ECont";
    case RuleTag::Precong: return "Precong";
  }
  return "?";
}

namespace {

void check_bag_cap(const Bag& b, const ReduceConfig& cfg) {
  if (int(b.size()) > cfg.max_bag)
    throw BagCapExceeded("bag of size " + std::to_string(b.size()) +
                         " exceeds permutation cap " +
                         std::to_string(cfg.max_bag));
}

std::vector<Var> multiset_to_vec(const VarMultiset& m) { return m.items; }

// Sum of one fail term per permutation of b (n! summands).
std::vector<TermPtr> perm_fail_sum(const Bag& b, VarMultiset vars,
                                   const ReduceConfig& cfg) {
  check_bag_cap(b, cfg);
  size_t count = 1;
  for (size_t i = 2; i <= b.size(); i++) count *= i;
  TermPtr f = mk_fail(multiset_to_vec(vars));
  return std::vector<TermPtr>(count, f);
}

struct Axiom {
  RuleTag tag;
  std::vector<TermPtr> summands;
};

// Rule instances with t itself as the redex.
std::vector<Axiom> axioms_at(const TermPtr& t, const ReduceConfig& cfg,
                             NameGen& gen) {
  std::vector<Axiom> out;
  if (auto* app = std::get_if<TApp>(&t->node)) {
    if (auto* abs = std::get_if<TAbs>(&app->fun->node)) {
      out.push_back({RuleTag::Beta, {mk_sub(abs->body, app->arg, abs->param)}});
    } else if (auto* fl = std::get_if<TFail>(&app->fun->node)) {
      VarMultiset vars;
      for (auto& v : fl->vars) vars.add(v);
      vars.add_all(free_vars_multiset(app->arg));
      out.push_back({RuleTag::Cons1, perm_fail_sum(app->arg, vars, cfg)});
    }
  } else if (auto* sub = std::get_if<TSub>(&t->node)) {
    if (auto* fl = std::get_if<TFail>(&sub->body->node)) {
      // R:Cons2; the k = #(z,xs) = 0 and empty-bag case is left to the
      // precongruence.
      int zocc = 0;
      for (auto& v : fl->vars)
        if (v == sub->var) zocc++;
      if (int(sub->bag.size()) + zocc != 0) {
        VarMultiset vars;
        for (auto& v : fl->vars)
          if (v != sub->var) vars.add(v);
        vars.add_all(free_vars_multiset(sub->bag));
        out.push_back({RuleTag::Cons2, perm_fail_sum(sub->bag, vars, cfg)});
      }
    } else {
      int occ = occurrence_count(sub->var, sub->body);
      int size = int(sub->bag.size());
      HeadResult h = head(sub->body);
      if (occ == size && size >= 1 && h.kind == HeadResult::HVar &&
          h.var == sub->var) {
        std::vector<TermPtr> summands;
        for (size_t i = 0; i < sub->bag.size(); i++) {
          auto [ni, rest] = bag_remove(sub->bag, i);
          TermPtr body = alpha_avoid(sub->body, free_vars_set(ni), gen);
          summands.push_back(
              mk_sub(linear_head_subst(body, ni, sub->var), rest, sub->var));
        }
        out.push_back({RuleTag::Fetch, std::move(summands)});
      } else if (occ != size) {
        VarMultiset vars = free_vars_multiset(sub->body);
        vars.remove_all(sub->var);
        vars.add_all(free_vars_multiset(sub->bag));
        out.push_back({RuleTag::Fail, perm_fail_sum(sub->bag, vars, cfg)});
      }
    }
  }
  return out;
}

// Rebuilds the term context stack (innermost last) around each summand.
TermPtr rebuild(const std::vector<const Term*>& spine, size_t depth,
                TermPtr core) {
  for (size_t d = depth; d-- > 0;) {
    const Term* layer = spine[d];
    if (auto* app = std::get_if<TApp>(&layer->node)) {
      core = mk_app(core, app->arg);
    } else {
      auto& sub = std::get<TSub>(layer->node);
      core = mk_sub(core, sub.bag, sub.var);
    }
  }
  return core;
}

}  // namespace

std::vector<LStep> step_all(const Expr& e, const ReduceConfig& cfg) {
  std::vector<LStep> out;
  std::set<std::string> seen;
  NameGen gen;
  gen.counter = 1000000;  // avoid colliding with user-visible fresh names
  for (size_t i = 0; i < e.sum.size(); i++) {
    // spine[d] is the term at depth d (0 = summand root)
    std::vector<const Term*> spine;
    TermPtr cur = e.sum[i];
    while (true) {
      spine.push_back(cur.get());
      if (auto* app = std::get_if<TApp>(&cur->node)) cur = app->fun;
      else if (auto* sub = std::get_if<TSub>(&cur->node)) cur = sub->body;
      else break;
    }
    // one redex per summand: the leftmost-outermost applicable instance;
    // non-determinism lives at sum level only
    for (size_t d = 0; d < spine.size(); d++) {
      TermPtr at = (d == 0) ? e.sum[i]
                            : [&] {
                                const Term* parent = spine[d - 1];
                                if (auto* app = std::get_if<TApp>(&parent->node))
                                  return app->fun;
                                return std::get<TSub>(parent->node).body;
                              }();
      auto axioms = axioms_at(at, cfg, gen);
      if (axioms.empty()) continue;
      auto& ax = axioms.front();
      Expr result;
      result.sum.reserve(e.sum.size() + ax.summands.size() - 1);
      for (size_t j = 0; j < i; j++) result.sum.push_back(e.sum[j]);
      for (auto& s : ax.summands) result.sum.push_back(rebuild(spine, d, s));
      for (size_t j = i + 1; j < e.sum.size(); j++)
        result.sum.push_back(e.sum[j]);
      std::string key = to_string(ax.tag) + "@" + std::to_string(i) + "." +
                        std::to_string(d) + ":" + canonical_key(result);
      if (seen.insert(key).second)
        out.push_back({ax.tag, {int(i), int(d)}, std::move(result)});
      break;
    }
  }
  return out;
}

namespace {

// One pass of the oriented laws along the spine; returns null if unchanged.
TermPtr precong_once(const TermPtr& t) {
  if (auto* app = std::get_if<TApp>(&t->node)) {
    if (TermPtr f = precong_once(app->fun)) return mk_app(f, app->arg);
    return nullptr;
  }
  auto* sub = std::get_if<TSub>(&t->node);
  if (!sub) return nullptr;
  if (TermPtr b = precong_once(sub->body))
    return mk_sub(b, sub->bag, sub->var);
  // garbage collection: M<<1/x>> -> M when x not free in M
  if (sub->bag.empty() && !contains(free_vars_set(sub->body), sub->var))
    return sub->body;
  // substitution moves toward the head past an independent application
  if (auto* app = std::get_if<TApp>(&sub->body->node)) {
    if (!contains(free_vars_set(app->arg), sub->var))
      return mk_app(mk_sub(app->fun, sub->bag, sub->var), app->arg);
  }
  // independent substitutions ordered by variable print, innermost least
  if (auto* inner = std::get_if<TSub>(&sub->body->node)) {
    if (inner->var != sub->var &&
        to_string(sub->var) < to_string(inner->var) &&
        !contains(free_vars_set(inner->bag), sub->var) &&
        !contains(free_vars_set(sub->bag), inner->var)) {
      return mk_sub(mk_sub(inner->body, sub->bag, sub->var), inner->bag,
                    inner->var);
    }
  }
  return nullptr;
}

}  // namespace

TermPtr precongruence_normalize_term(const TermPtr& t) {
  TermPtr cur = t;
  for (int guard = 0; guard < 10000; guard++) {
    TermPtr next = precong_once(cur);
    if (!next) return cur;
    cur = next;
  }
  return cur;
}

Expr precongruence_normalize(const Expr& e) {
  Expr out;
  for (auto& m : e.sum) out.sum.push_back(precongruence_normalize_term(m));
  return out;
}

NormalizeResult normalize(const Expr& e, const ReduceConfig& cfg) {
  NormalizeResult res;
  res.trace.start = print_expr(e);
  Expr cur = e;
  int fuel = cfg.fuel;
  try {
    for (;;) {
      Expr pc = precongruence_normalize(cur);
      if (canonical_key(pc) != canonical_key(cur)) {
        cur = pc;
        res.trace.steps.push_back(
            {to_string(RuleTag::Precong), {}, print_expr(cur)});
      }
      auto steps = step_all(cur, cfg);
      if (steps.empty()) {
        res.ok = true;
        res.result = cur;
        return res;
      }
      // leftmost-outermost: smallest summand index, then smallest depth
      const LStep* best = &steps[0];
      for (auto& s : steps)
        if (s.path < best->path) best = &s;
      if (fuel-- <= 0) {
        res.result = cur;
        res.error = "out of fuel";
        return res;
      }
      cur = best->result;
      res.trace.steps.push_back(
          {to_string(best->tag), best->path, print_expr(cur)});
    }
  } catch (const BagCapExceeded& ex) {
    res.result = cur;
    res.error = ex.what();
    return res;
  }
}

bool any_head_check(const Expr& e) {
  for (auto& m : e.sum)
    if (head(m).kind == HeadResult::HCheck) return true;
  return false;
}

SuccessResult has_success(const Expr& e, const ReduceConfig& cfg) {
  if (any_head_check(e)) return SuccessResult::Yes;
  NormalizeResult nr = normalize(e, cfg);
  // a summand whose head is check is irreducible, so scanning every state of
  // the deterministic trace is complete (by the diamond property)
  for (auto& st : nr.trace.steps) {
    Expr x = parse_expr(st.result);
    if (any_head_check(x)) return SuccessResult::Yes;
  }
  if (!nr.ok) return SuccessResult::OutOfFuel;
  return SuccessResult::No;
}

}  // namespace lampi
