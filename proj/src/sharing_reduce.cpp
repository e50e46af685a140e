#include "lampi/sharing_reduce.hpp"

#include <algorithm>
#include <set>

namespace lampi {

std::string to_string(SRuleTag t) {
  switch (t) {
    case SRuleTag::Beta: return "RS:Beta";
    case SRuleTag::ExSub: return "RS:Ex-Sub";
    case SRuleTag::LinFetch: return "RS:Lin-Fetch";
    case SRuleTag::Fail: return "RS:Fail";
    case SRuleTag::Cons1: return "RS:Cons1";
    case SRuleTag::Cons2: return "RS:Cons2";
    case SRuleTag::Cons3: return "RS:Cons3";
    case SRuleTag::TCont: return "RS:TCont";
    case SRuleTag::ECont: return "RS:ECont";
    case SRuleTag::Precong: return "Precong";
  }
  return "?";
}

namespace {

void check_bag_cap(const SharBag& b, const ReduceConfig& cfg) {
  if (int(b.size()) > cfg.max_bag)
    throw BagCapExceeded("bag of size " + std::to_string(b.size()) +
                         " exceeds permutation cap " +
                         std::to_string(cfg.max_bag));
}

std::vector<SharTermPtr> perm_fail_sum(const SharBag& b, VarSet vars,
                                       const ReduceConfig& cfg) {
  check_bag_cap(b, cfg);
  size_t count = 1;
  for (size_t i = 2; i <= b.size(); i++) count *= i;
  SharTermPtr f = smk_fail(std::vector<Var>(vars.begin(), vars.end()));
  return std::vector<SharTermPtr>(count, f);
}

struct SAxiom {
  SRuleTag tag;
  std::vector<SharTermPtr> summands;
};

std::vector<SAxiom> axioms_at(const SharTermPtr& t, const ReduceConfig& cfg,
                              NameGen& gen) {
  std::vector<SAxiom> out;
  if (auto* app = std::get_if<SApp>(&t->node)) {
    if (auto* abs = std::get_if<SAbs>(&app->fun->node)) {
      if (auto* sh = std::get_if<SShare>(&abs->body->node);
          sh && sh->var == abs->param) {
        out.push_back({SRuleTag::Beta, {smk_sharesub(sh->body, sh->shared,
                                                     sh->var, app->arg)}});
      }
    } else if (auto* fl = std::get_if<SFail>(&app->fun->node)) {
      VarSet vars(fl->vars.begin(), fl->vars.end());
      vars = set_union(std::move(vars), shar_free_vars(app->arg));
      out.push_back({SRuleTag::Cons1, perm_fail_sum(app->arg, vars, cfg)});
    }
  } else if (auto* ss = std::get_if<SShareSub>(&t->node); ss && ss->has_share) {
    if (auto* fl = std::get_if<SFail>(&ss->body->node)) {
      if (int(ss->bag.size()) + int(ss->shared.size()) != 0) {
        VarSet vars;
        for (auto& v : fl->vars)
          if (!std::count(ss->shared.begin(), ss->shared.end(), v) &&
              v != ss->var)
            vars.insert(v);
        vars = set_union(std::move(vars), shar_free_vars(ss->bag));
        out.push_back({SRuleTag::Cons2, perm_fail_sum(ss->bag, vars, cfg)});
      }
    } else if (ss->shared.size() == ss->bag.size() && !ss->bag.empty()) {
      check_bag_cap(ss->bag, cfg);
      std::vector<SharTermPtr> summands;
      for (auto& bi : shar_bag_perm_seq(ss->bag)) {
        VarSet avoid = shar_free_vars(bi);
        SharTermPtr chain = shar_alpha_avoid(ss->body, avoid, gen);
        for (size_t j = 0; j < ss->shared.size(); j++)
          chain = smk_linsub(chain, bi.items[j], ss->shared[j]);
        summands.push_back(std::move(chain));
      }
      out.push_back({SRuleTag::ExSub, std::move(summands)});
    } else if (ss->shared.size() != ss->bag.size()) {
      VarSet vars = shar_free_vars(ss->body);
      for (auto& v : ss->shared) vars.erase(v);
      vars.erase(ss->var);
      vars = set_union(std::move(vars), shar_free_vars(ss->bag));
      out.push_back({SRuleTag::Fail, perm_fail_sum(ss->bag, vars, cfg)});
    }
  } else if (auto* ls = std::get_if<SLinSub>(&t->node)) {
    if (auto* fl = std::get_if<SFail>(&ls->body->node)) {
      if (std::count(fl->vars.begin(), fl->vars.end(), ls->var)) {
        VarSet vars;
        for (auto& v : fl->vars)
          if (v != ls->var) vars.insert(v);
        vars = set_union(std::move(vars), shar_free_vars(ls->arg));
        out.push_back({SRuleTag::Cons3,
                       {smk_fail(std::vector<Var>(vars.begin(), vars.end()))}});
      }
    } else {
      HeadResult h = shar_head(ls->body);
      if (h.kind == HeadResult::HVar && h.var == ls->var) {
        SharTermPtr body =
            shar_alpha_avoid(ls->body, shar_free_vars(ls->arg), gen);
        out.push_back(
            {SRuleTag::LinFetch,
             {shar_linear_head_subst(body, ls->arg, ls->var)}});
      }
    }
  }
  return out;
}

// Evaluation contexts: application function position, linear substitution
// body, bare sharing body, and the degenerate [<-x]<<1/x>> wrapper.
bool context_descends(const SharTermPtr& t, SharTermPtr& child) {
  if (auto* app = std::get_if<SApp>(&t->node)) {
    child = app->fun;
    return true;
  }
  if (auto* ls = std::get_if<SLinSub>(&t->node)) {
    child = ls->body;
    return true;
  }
  if (auto* sh = std::get_if<SShare>(&t->node)) {
    child = sh->body;
    return true;
  }
  if (auto* ss = std::get_if<SShareSub>(&t->node)) {
    if (ss->has_share && ss->shared.empty() && ss->bag.empty()) {
      child = ss->body;
      return true;
    }
  }
  return false;
}

SharTermPtr rebuild(const std::vector<const SharTerm*>& spine, size_t depth,
                    SharTermPtr core) {
  for (size_t d = depth; d-- > 0;) {
    const SharTerm* layer = spine[d];
    if (auto* app = std::get_if<SApp>(&layer->node)) {
      core = smk_app(core, app->arg);
    } else if (auto* ls = std::get_if<SLinSub>(&layer->node)) {
      core = smk_linsub(core, ls->arg, ls->var);
    } else if (auto* sh = std::get_if<SShare>(&layer->node)) {
      core = smk_share(core, sh->shared, sh->var);
    } else {
      auto& ss = std::get<SShareSub>(layer->node);
      core = smk_sharesub(core, ss.shared, ss.var, ss.bag, ss.has_share);
    }
  }
  return core;
}

}  // namespace

std::vector<SStep> shar_step_all(const SharExpr& e, const ReduceConfig& cfg) {
  std::vector<SStep> out;
  std::set<std::string> seen;
  NameGen gen;
  gen.counter = 1000000;
  for (size_t i = 0; i < e.sum.size(); i++) {
    std::vector<const SharTerm*> spine;
    std::vector<SharTermPtr> holders;
    SharTermPtr cur = e.sum[i];
    while (true) {
      spine.push_back(cur.get());
      holders.push_back(cur);
      SharTermPtr child;
      if (!context_descends(cur, child)) break;
      cur = child;
    }
    // one redex per summand (leftmost-outermost), as in the source calculus
    for (size_t d = 0; d < spine.size(); d++) {
      auto axioms = axioms_at(holders[d], cfg, gen);
      if (axioms.empty()) continue;
      auto& ax = axioms.front();
      SharExpr result;
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

SharTermPtr sprecong_once(const SharTermPtr& t) {
  // recurse along evaluation contexts first
  SharTermPtr child;
  if (context_descends(t, child)) {
    if (SharTermPtr c2 = sprecong_once(child)) {
      if (auto* app = std::get_if<SApp>(&t->node)) return smk_app(c2, app->arg);
      if (auto* ls = std::get_if<SLinSub>(&t->node))
        return smk_linsub(c2, ls->arg, ls->var);
      if (auto* sh = std::get_if<SShare>(&t->node))
        return smk_share(c2, sh->shared, sh->var);
      auto& ss = std::get<SShareSub>(t->node);
      return smk_sharesub(c2, ss.shared, ss.var, ss.bag, ss.has_share);
    }
  }
  auto disjoint = [](const std::vector<Var>& vs, const VarSet& s) {
    for (auto& v : vs)
      if (contains(s, v)) return false;
    return true;
  };
  if (auto* ss = std::get_if<SShareSub>(&t->node); ss && ss->has_share) {
    // M[<-x]<<1/x>>  ->  M
    if (ss->shared.empty() && ss->bag.empty()) return ss->body;
    // (M A)[xs<-x]<<B/x>>  ->  (M[xs<-x]<<B/x>>) A
    if (auto* app = std::get_if<SApp>(&ss->body->node)) {
      VarSet afv = shar_free_vars(app->arg);
      if (disjoint(ss->shared, afv) && !contains(afv, ss->var))
        return smk_app(
            smk_sharesub(app->fun, ss->shared, ss->var, ss->bag, true),
            app->arg);
    }
    // nested substituted shares ordered by variable print, innermost least
    if (auto* inner = std::get_if<SShareSub>(&ss->body->node);
        inner && inner->has_share) {
      if (inner->var != ss->var &&
          to_string(ss->var) < to_string(inner->var)) {
        VarSet innerbag_fv = shar_free_vars(inner->bag);
        VarSet outerbag_fv = shar_free_vars(ss->bag);
        if (disjoint(ss->shared, innerbag_fv) &&
            !contains(innerbag_fv, ss->var) &&
            disjoint(inner->shared, outerbag_fv) &&
            !contains(outerbag_fv, inner->var)) {
          return smk_sharesub(
              smk_sharesub(inner->body, ss->shared, ss->var, ss->bag, true),
              inner->shared, inner->var, inner->bag, true);
        }
      }
    }
  }
  if (auto* ls = std::get_if<SLinSub>(&t->node)) {
    // (M B) <|N/x|>  ->  (M <|N/x|>) B
    if (auto* app = std::get_if<SApp>(&ls->body->node)) {
      if (!contains(shar_free_vars(app->arg), ls->var))
        return smk_app(smk_linsub(app->fun, ls->arg, ls->var), app->arg);
    }
    // independent linear substitutions ordered by variable print
    if (auto* inner = std::get_if<SLinSub>(&ls->body->node)) {
      if (inner->var != ls->var &&
          to_string(ls->var) < to_string(inner->var) &&
          !contains(shar_free_vars(inner->arg), ls->var) &&
          !contains(shar_free_vars(ls->arg), inner->var)) {
        return smk_linsub(smk_linsub(inner->body, ls->arg, ls->var),
                          inner->arg, inner->var);
      }
    }
  }
  return nullptr;
}

}  // namespace

SharTermPtr shar_precongruence_normalize_term(const SharTermPtr& t) {
  SharTermPtr cur = t;
  for (int guard = 0; guard < 10000; guard++) {
    SharTermPtr next = sprecong_once(cur);
    if (!next) return cur;
    cur = next;
  }
  return cur;
}

SharExpr shar_precongruence_normalize(const SharExpr& e) {
  SharExpr out;
  for (auto& m : e.sum)
    out.sum.push_back(shar_precongruence_normalize_term(m));
  return out;
}

SharNormalizeResult shar_normalize(const SharExpr& e,
                                   const ReduceConfig& cfg) {
  SharNormalizeResult res;
  res.trace.start = print_shar_expr(e);
  SharExpr cur = e;
  int fuel = cfg.fuel;
  try {
    for (;;) {
      SharExpr pc = shar_precongruence_normalize(cur);
      if (canonical_key(pc) != canonical_key(cur)) {
        cur = pc;
        res.trace.steps.push_back(
            {to_string(SRuleTag::Precong), {}, print_shar_expr(cur)});
      }
      auto steps = shar_step_all(cur, cfg);
      if (steps.empty()) {
        res.ok = true;
        res.result = cur;
        return res;
      }
      const SStep* best = &steps[0];
      for (auto& s : steps)
        if (s.path < best->path) best = &s;
      if (fuel-- <= 0) {
        res.result = cur;
        res.error = "out of fuel";
        return res;
      }
      cur = best->result;
      res.trace.steps.push_back(
          {to_string(best->tag), best->path, print_shar_expr(cur)});
    }
  } catch (const BagCapExceeded& ex) {
    res.result = cur;
    res.error = ex.what();
    return res;
  }
}

bool any_head_check(const SharExpr& e) {
  for (auto& m : e.sum)
    if (shar_head(m).kind == HeadResult::HCheck) return true;
  return false;
}

SuccessResult shar_has_success(const SharExpr& e, const ReduceConfig& cfg) {
  if (any_head_check(e)) return SuccessResult::Yes;
  SharNormalizeResult nr = shar_normalize(e, cfg);
  for (auto& st : nr.trace.steps) {
    SharExpr x = parse_shar_expr(st.result);
    if (any_head_check(x)) return SuccessResult::Yes;
  }
  if (!nr.ok) return SuccessResult::OutOfFuel;
  return SuccessResult::No;
}

}  // namespace lampi
