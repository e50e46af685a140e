#include "lampi/harness.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <json.hpp>
#include <set>

namespace lampi {

std::string report_to_json(const CheckReport& r) {
  nlohmann::json j;
  j["property"] = r.property;
  j["cases"] = r.cases;
  j["inconclusive"] = r.inconclusive;
  j["failures"] = nlohmann::json::array();
  for (auto& f : r.failures) {
    nlohmann::json c;
    c["seed"] = f.seed;
    c["subject"] = f.subject;
    c["detail"] = f.detail;
    j["failures"].push_back(std::move(c));
  }
  j["ok"] = r.ok();
  return j.dump(2);
}

// ---- generation ----

namespace {

struct Gen {
  const GenConfig& cfg;
  std::mt19937_64& rng;
  bool typed;           // size-matched, no fail/check
  TypeContext ctx;      // free-variable assignments found along the way
  int fresh_counter = 0;

  int pick(int n) { return int(rng() % uint64_t(n)); }
  bool coin() { return pick(2) == 0; }

  Var fresh_free() { return Var{"g" + std::to_string(fresh_counter++)}; }
  Var fresh_bound() { return Var{"b" + std::to_string(fresh_counter++)}; }

  StrictPtr gen_type(int depth) {
    if (depth <= 0 || pick(3) > 0) return mk_unit();
    int k = pick(cfg.max_bag + 1);
    StrictPtr base = gen_type(depth - 1);
    return mk_arrow(MultisetType{k > 0 ? base : nullptr, k},
                    gen_type(depth - 1));
  }

  using Must = std::vector<std::pair<Var, StrictPtr>>;

  void split(const Must& in, Must& a, Must& b) {
    for (auto& m : in) (coin() ? a : b).push_back(m);
  }

  // A term of the given type consuming exactly the listed assignments.
  TermPtr term(int depth, const StrictPtr& type, Must must) {
    // leaf choices
    auto leaf = [&]() -> TermPtr {
      if (must.size() == 1 && strict_equal(must[0].second, type) && coin())
        return mk_var(must[0].first);
      if (!typed && cfg.allow_fail && (coin() || depth <= 0)) {
        std::vector<Var> vars;
        for (auto& m : must) vars.push_back(m.first);
        if (!cfg.closed && must.empty() && coin()) {
          Var extra = fresh_free();
          ctx.strict.emplace_back(extra, gen_type(1));
          vars.push_back(extra);
        }
        return mk_fail(std::move(vars));
      }
      if (!typed && cfg.allow_check && must.empty() && coin()) return mk_check();
      if (must.size() == 1 && strict_equal(must[0].second, type))
        return mk_var(must[0].first);
      if (must.empty() && !cfg.closed) {
        Var v = fresh_free();
        ctx.strict.emplace_back(v, type);
        return mk_var(v);
      }
      if (must.empty() && !typed && cfg.allow_check) return mk_check();
      if (!typed && cfg.allow_fail) {
        std::vector<Var> vars;
        for (auto& m : must) vars.push_back(m.first);
        return mk_fail(std::move(vars));
      }
      // typed fallback: a variable of the right type
      if (must.empty()) {
        Var v = fresh_free();
        ctx.strict.emplace_back(v, type);
        return mk_var(v);
      }
      return nullptr;  // caller retries structurally
    };

    if (depth <= 0) {
      TermPtr l = leaf();
      if (l) return l;
    }

    for (int attempt = 0; attempt < 8; attempt++) {
      int choice = pick(5);
      switch (choice) {
        case 0: {
          if (depth <= 0) break;
          // abstraction, only when the target is an arrow
          auto* arrow = std::get_if<TArrow>(&type->node);
          if (!arrow) break;
          Var x = fresh_bound();
          Must inner = must;
          StrictPtr base =
              arrow->domain.base ? arrow->domain.base : mk_unit();
          for (int i = 0; i < arrow->domain.count; i++)
            inner.emplace_back(x, base);
          TermPtr body = term(depth - 1, arrow->codomain, inner);
          if (!body) break;
          return mk_abs(x, body);
        }
        case 1: {
          if (depth <= 0) break;
          // application
          int k = pick(cfg.max_bag + 1);
          int j = typed ? k : pick(cfg.max_bag + 1);
          StrictPtr sigma = gen_type(depth > 2 ? 1 : 0);
          Must mf, mb;
          split(must, mf, mb);
          TermPtr fun = term(
              depth - 1,
              mk_arrow(MultisetType{j > 0 ? sigma : nullptr, j}, type), mf);
          if (!fun) break;
          Bag bag;
          std::vector<Must> parts(std::max(k, 1));
          for (auto& m : mb) parts[pick(std::max(k, 1))].push_back(m);
          if (k == 0 && !mb.empty()) break;
          bool good = true;
          for (int i = 0; i < k && good; i++) {
            TermPtr el = term(depth - 1, sigma, parts[i]);
            if (!el) good = false;
            else bag.items.push_back(el);
          }
          if (!good) break;
          return mk_app(fun, bag);
        }
        case 2: {
          if (depth <= 0) break;
          // explicit substitution
          int k = pick(cfg.max_bag + 1);
          int j = typed ? k : pick(cfg.max_bag + 1);
          StrictPtr sigma = gen_type(depth > 2 ? 1 : 0);
          Var x = fresh_bound();
          Must mb, els;
          split(must, mb, els);
          Must inner = mb;
          for (int i = 0; i < k; i++) inner.emplace_back(x, sigma);
          TermPtr body = term(depth - 1, type, inner);
          if (!body) break;
          Bag bag;
          std::vector<Must> parts(std::max(j, 1));
          for (auto& m : els) parts[pick(std::max(j, 1))].push_back(m);
          if (j == 0 && !els.empty()) break;
          bool good = true;
          for (int i = 0; i < j && good; i++) {
            TermPtr el = term(depth - 1, sigma, parts[i]);
            if (!el) good = false;
            else bag.items.push_back(el);
          }
          if (!good) break;
          return mk_sub(body, bag, x);
        }
        default: {
          TermPtr l = leaf();
          if (l) return l;
          break;
        }
      }
    }
    // last resort
    if (!typed && cfg.allow_fail) {
      std::vector<Var> vars;
      for (auto& m : must) vars.push_back(m.first);
      return mk_fail(std::move(vars));
    }
    if (must.empty() && !cfg.closed) {
      Var v = fresh_free();
      ctx.strict.emplace_back(v, type);
      return mk_var(v);
    }
    return nullptr;
  }

  // Shuffling bag element order preserves the judgment.
  TermPtr shuffle_bags(const TermPtr& t) {
    if (auto* app = std::get_if<TApp>(&t->node)) {
      Bag b = app->arg;
      std::shuffle(b.items.begin(), b.items.end(), rng);
      return mk_app(shuffle_bags(app->fun), b);
    }
    if (auto* sub = std::get_if<TSub>(&t->node)) {
      Bag b = sub->bag;
      std::shuffle(b.items.begin(), b.items.end(), rng);
      return mk_sub(shuffle_bags(sub->body), b, sub->var);
    }
    if (auto* abs = std::get_if<TAbs>(&t->node))
      return mk_abs(abs->param, shuffle_bags(abs->body));
    return t;
  }
};

GenJudgment generate(const GenConfig& cfg, std::mt19937_64& rng, bool typed) {
  for (int attempt = 0; attempt < 64; attempt++) {
    Gen g{cfg, rng, typed, {}, 0};
    StrictPtr target = g.gen_type(2);
    TermPtr t = g.term(cfg.max_depth, target, {});
    if (!t) continue;
    Expr e = expr_of(t);
    if (g.coin()) e.sum.push_back(g.shuffle_bags(t));
    GenJudgment out{g.ctx, e, target};
    CheckResult r = typed ? check_typed_lambda(out.ctx, out.expr, out.type)
                          : check_wellformed_lambda(out.ctx, out.expr, out.type);
    if (!r.ok) continue;
    try {
      encode_open(out.expr);  // the harness always runs the translations
    } catch (const EncodeError&) {
      continue;
    }
    return out;
  }
  // generation is derivation-directed, so this indicates a bug
  throw std::runtime_error("generator failed to produce an accepted judgment");
}

}  // namespace

GenJudgment gen_wellformed(const GenConfig& cfg, std::mt19937_64& rng) {
  return generate(cfg, rng, false);
}
GenJudgment gen_typed(const GenConfig& cfg, std::mt19937_64& rng) {
  GenConfig c = cfg;
  c.allow_fail = false;
  c.allow_check = false;
  return generate(c, rng, true);
}

// ---- checks ----

namespace {

std::mt19937_64 case_rng(const GenConfig& cfg, int index) {
  std::mt19937_64 rng(cfg.seed * 1000003 + uint64_t(index) * 7919 + 17);
  return rng;
}

void fail_case(CheckReport& rep, const GenConfig& cfg, int index,
               const std::string& subject, const std::string& detail) {
  rep.failures.push_back({cfg.seed, subject, detail});
}

// One-step reducts as canonical keys, for each calculus.
std::vector<std::pair<std::string, Expr>> lam_reducts(const Expr& e) {
  std::vector<std::pair<std::string, Expr>> out;
  for (auto& s : step_all(e)) out.emplace_back(canonical_key(s.result), s.result);
  return out;
}
std::vector<std::pair<std::string, SharExpr>> shar_reducts(const SharExpr& e) {
  std::vector<std::pair<std::string, SharExpr>> out;
  for (auto& s : shar_step_all(e))
    out.emplace_back(canonical_key(s.result), s.result);
  return out;
}

// Shrinks a failing lambda expression by subterm replacement.
Expr shrink_expr(const Expr& e,
                 const std::function<bool(const Expr&)>& still_fails) {
  Expr cur = e;
  bool progress = true;
  auto subterms = [](const TermPtr& t) {
    std::vector<TermPtr> out;
    std::function<void(const TermPtr&)> walk = [&](const TermPtr& q) {
      out.push_back(q);
      if (auto* abs = std::get_if<TAbs>(&q->node)) walk(abs->body);
      if (auto* app = std::get_if<TApp>(&q->node)) {
        walk(app->fun);
        for (auto& m : app->arg.items) walk(m);
      }
      if (auto* sub = std::get_if<TSub>(&q->node)) {
        walk(sub->body);
        for (auto& m : sub->bag.items) walk(m);
      }
    };
    walk(t);
    return out;
  };
  while (progress) {
    progress = false;
    // fewer summands first
    if (cur.sum.size() > 1) {
      for (size_t i = 0; i < cur.sum.size(); i++) {
        Expr cand;
        for (size_t j = 0; j < cur.sum.size(); j++)
          if (j != i) cand.sum.push_back(cur.sum[j]);
        if (still_fails(cand)) {
          cur = cand;
          progress = true;
          break;
        }
      }
      if (progress) continue;
    }
    // then proper subterms of any summand
    for (size_t i = 0; i < cur.sum.size() && !progress; i++) {
      for (auto& st : subterms(cur.sum[i])) {
        if (st == cur.sum[i]) continue;
        Expr cand = cur;
        cand.sum[i] = st;
        if (still_fails(cand)) {
          cur = cand;
          progress = true;
          break;
        }
      }
    }
  }
  return cur;
}

bool diamond_holds_lambda(const Expr& e) {
  auto steps = lam_reducts(e);
  std::vector<std::set<std::string>> next(steps.size());
  for (size_t i = 0; i < steps.size(); i++)
    for (auto& r : lam_reducts(steps[i].second)) next[i].insert(r.first);
  for (size_t i = 0; i < steps.size(); i++) {
    for (size_t j = i + 1; j < steps.size(); j++) {
      if (steps[i].first == steps[j].first) continue;
      bool joined = false;
      for (auto& k : next[i])
        if (next[j].count(k)) joined = true;
      if (!joined) return false;
    }
  }
  return true;
}

bool diamond_holds_sharing(const SharExpr& e) {
  auto steps = shar_reducts(e);
  std::vector<std::set<std::string>> next(steps.size());
  for (size_t i = 0; i < steps.size(); i++)
    for (auto& r : shar_reducts(steps[i].second)) next[i].insert(r.first);
  for (size_t i = 0; i < steps.size(); i++) {
    for (size_t j = i + 1; j < steps.size(); j++) {
      if (steps[i].first == steps[j].first) continue;
      bool joined = false;
      for (auto& k : next[i])
        if (next[j].count(k)) joined = true;
      if (!joined) return false;
    }
  }
  return true;
}

bool diamond_holds_pi(const ProcPtr& p) {
  auto steps = pi_step_all(p);
  std::vector<std::string> key(steps.size());
  std::vector<std::set<std::string>> next(steps.size());
  for (size_t i = 0; i < steps.size(); i++) {
    key[i] = alpha_print(steps[i].result);
    for (auto& a : pi_step_all(steps[i].result))
      next[i].insert(alpha_print(a.result));
  }
  for (size_t i = 0; i < steps.size(); i++) {
    for (size_t j = i + 1; j < steps.size(); j++) {
      if (key[i] == key[j]) continue;
      bool joined = false;
      for (auto& k : next[i])
        if (next[j].count(k)) joined = true;
      if (!joined) return false;
    }
  }
  return true;
}

}  // namespace

CheckReport check_diamond(const GenConfig& cfg, const std::string& calculus) {
  CheckReport rep;
  rep.property = "diamond-" + calculus;
  for (int i = 0; i < cfg.cases; i++) {
    auto rng = case_rng(cfg, i);
    GenJudgment j = gen_wellformed(cfg, rng);
    rep.cases++;
    if (calculus == "lambda") {
      if (!diamond_holds_lambda(j.expr)) {
        Expr min = shrink_expr(
            j.expr, [](const Expr& e) { return !diamond_holds_lambda(e); });
        fail_case(rep, cfg, i, print_expr(min), "divergent pair does not rejoin");
      }
    } else if (calculus == "sharing") {
      SharExpr s = encode_open(j.expr);
      if (!diamond_holds_sharing(s))
        fail_case(rep, cfg, i, print_shar_expr(s),
                  "divergent pair does not rejoin");
    } else {
      SharExpr s = encode_open(j.expr);
      ProcPtr p = encode_process(s, Name{"u"});
      if (!diamond_holds_pi(p))
        fail_case(rep, cfg, i, print_process(p),
                  "divergent pair does not rejoin");
    }
  }
  return rep;
}

CheckReport check_subject_reduction(const GenConfig& cfg,
                                    const std::string& system) {
  CheckReport rep;
  rep.property = "subject-reduction-" + system;
  bool typed = system.find("typed") != std::string::npos;
  bool sharing = system.find("sharing") == 0;
  bool pi = system == "pi";
  for (int i = 0; i < cfg.cases; i++) {
    auto rng = case_rng(cfg, i);
    GenJudgment j = typed ? gen_typed(cfg, rng) : gen_wellformed(cfg, rng);
    rep.cases++;
    if (pi) {
      TypeContext collapsed = translate_context(j.ctx);
      SharExpr s = encode_open(j.expr);
      SharingTypeInfo info;
      auto wf = check_wellformed_sharing_info(collapsed, s, j.type, &info);
      if (!wf.ok) {
        fail_case(rep, cfg, i, print_shar_expr(s),
                  "translated judgment rejected: " + wf.reason);
        continue;
      }
      ProcPtr p = encode_process(s, Name{"u"}, &info);
      TypingEnv env = encode_typing_env(collapsed);
      env[Name{"u"}] = encode_strict_type(j.type);
      if (!pi_typecheck(p, env).ok) {
        fail_case(rep, cfg, i, print_process(p), "encoding rejected");
        continue;
      }
      for (auto& st : pi_step_all(p)) {
        auto r = pi_typecheck(st.result, env);
        if (!r.ok) {
          fail_case(rep, cfg, i, print_process(st.result),
                    "reduct rejected: " + r.reason);
          break;
        }
      }
      continue;
    }
    if (!sharing) {
      for (auto& st : step_all(j.expr)) {
        CheckResult r = typed ? check_typed_lambda(j.ctx, st.result, j.type)
                              : check_wellformed_lambda(j.ctx, st.result, j.type);
        if (!r.ok) {
          fail_case(rep, cfg, i,
                    print_context(j.ctx) + (typed ? " |- " : " |= ") +
                        print_expr(st.result) + " : " + print_strict(j.type),
                    "reduct rejected: " + r.reason);
          break;
        }
      }
    } else {
      TypeContext collapsed = translate_context(j.ctx);
      SharExpr s = encode_open(j.expr);
      CheckResult base = typed ? check_typed_sharing(collapsed, s, j.type)
                               : check_wellformed_sharing(collapsed, s, j.type);
      if (!base.ok) {
        fail_case(rep, cfg, i, print_shar_expr(s),
                  "translated judgment rejected: " + base.reason);
        continue;
      }
      for (auto& st : shar_step_all(s)) {
        CheckResult r = typed
                            ? check_typed_sharing(collapsed, st.result, j.type)
                            : check_wellformed_sharing(collapsed, st.result,
                                                       j.type);
        if (!r.ok) {
          fail_case(rep, cfg, i, print_shar_expr(st.result),
                    "reduct rejected: " + r.reason);
          break;
        }
      }
    }
  }
  return rep;
}

namespace {

// Bounded search over sharing reduction for a multiset-equal expression;
// returns the BFS distance or -1.
int shar_distance(const SharExpr& from, const std::string& goal, int depth) {
  std::set<std::string> visited;
  std::deque<std::pair<SharExpr, int>> frontier;
  frontier.emplace_back(from, 0);
  visited.insert(canonical_key(from));
  while (!frontier.empty()) {
    auto [cur, d] = frontier.front();
    frontier.pop_front();
    if (canonical_key(cur) == goal) return d;
    if (d >= depth) continue;
    for (auto& st : shar_step_all(cur)) {
      std::string k = canonical_key(st.result);
      if (visited.insert(k).second) frontier.emplace_back(st.result, d + 1);
    }
  }
  return -1;
}

bool shar_reach(const SharExpr& from, const std::string& goal, int depth) {
  return shar_distance(from, goal, depth) >= 0;
}

}  // namespace

CheckReport check_correspondence_1(const GenConfig& cfg) {
  CheckReport rep;
  rep.property = "correspondence-stage1";
  GenConfig closed_cfg = cfg;
  closed_cfg.closed = true;
  for (int i = 0; i < cfg.cases; i++) {
    auto rng = case_rng(cfg, i);
    GenJudgment j = gen_wellformed(closed_cfg, rng);
    rep.cases++;
    SharExpr src = encode_open(j.expr);

    // completeness with the per-rule budgets, scaled by the number of
    // copies the translation makes of the reduced summand
    for (auto& st : step_all(j.expr)) {
      int summand = st.path[0];
      int copies =
          int(encode_open_term(j.expr.sum[size_t(summand)]).sum.size());
      SharExpr tgt = encode_open(st.result);
      std::string goal = canonical_key(tgt);
      std::string goal_pc = canonical_key(shar_precongruence_normalize(tgt));
      bool ok = false;
      std::string why;
      if (st.tag == RuleTag::Beta) {
        ok = shar_reach(src, goal, 2 * copies);
        why = "beta step not matched within twice the copy count";
      } else if (st.tag == RuleTag::Fetch) {
        int budget = 2 * copies + 2 * int(tgt.sum.size()) + 2;
        ok = shar_reach(src, goal, budget) || shar_reach(src, goal_pc, budget);
        why = "fetch step not matched up to the precongruence";
      } else {
        int d = shar_distance(src, goal, copies);
        ok = d == copies;
        why = "non-beta step not matched in exactly one step per copy";
      }
      if (!ok) {
        fail_case(rep, cfg, i,
                  print_expr(j.expr) + "  --" + to_string(st.tag) + "->  " +
                      print_expr(st.result),
                  why);
        break;
      }
    }

    // soundness: any single sharing step is absorbed by a source step
    for (auto& ss : shar_step_all(src)) {
      bool matched = false;
      for (auto& st : step_all(j.expr)) {
        SharExpr tgt = encode_open(st.result);
        std::string goal = canonical_key(tgt);
        std::string goal_pc =
            canonical_key(shar_precongruence_normalize(tgt));
        std::string here = canonical_key(ss.result);
        int budget = 2 + 2 * int(tgt.sum.size());
        if (here == goal || here == goal_pc ||
            shar_reach(ss.result, goal, budget) ||
            shar_reach(ss.result, goal_pc, budget)) {
          matched = true;
          break;
        }
      }
      if (!matched && step_all(j.expr).empty()) {
        fail_case(rep, cfg, i, print_expr(j.expr),
                  "target steps from the encoding of an irreducible source");
        break;
      }
      if (!matched) {
        fail_case(rep, cfg, i,
                  print_shar_expr(src) + "  ->  " + print_shar_expr(ss.result),
                  "sharing step not absorbed by any source step");
        break;
      }
    }
  }
  return rep;
}

CheckReport check_correspondence_2(const GenConfig& cfg, int pi_fuel,
                                   size_t breadth_cap) {
  CheckReport rep;
  rep.property = "correspondence-stage2";
  GenConfig closed_cfg = cfg;
  closed_cfg.closed = true;
  for (int i = 0; i < cfg.cases; i++) {
    auto rng = case_rng(cfg, i);
    GenJudgment j = gen_wellformed(closed_cfg, rng);
    rep.cases++;
    SharExpr src = encode_open(j.expr);
    ProcPtr psrc = encode_process(src, Name{"u"});

    // completeness via bounded reachability
    for (auto& st : shar_step_all(src)) {
      ProcPtr ptgt = encode_process(st.result, Name{"u"});
      auto r = pi_reaches(psrc, ptgt, pi_fuel, breadth_cap);
      if (!r.reached) {
        if (!r.error.empty() && r.error != "exhausted reachable states") {
          rep.inconclusive++;
        } else {
          fail_case(rep, cfg, i,
                    print_shar_expr(src) + "  ->  " +
                        print_shar_expr(st.result),
                    "encoding does not reach the reduct's encoding: " +
                        r.error);
        }
        break;
      }
    }

    // soundness: a random process prefix catches up with some source reduct
    int prefix_len = int(rng() % 9);
    ProcPtr q = canonical_form(psrc);
    for (int s = 0; s < prefix_len; s++) {
      auto steps = pi_step_all(q);
      if (steps.empty()) break;
      q = steps[rng() % steps.size()].result;
    }
    // candidate source expressions reachable with the precongruence
    std::vector<SharExpr> candidates{src};
    {
      std::set<std::string> seen{canonical_key(src)};
      std::deque<std::pair<SharExpr, int>> fr;
      fr.emplace_back(src, 0);
      while (!fr.empty()) {
        auto [cur, d] = fr.front();
        fr.pop_front();
        SharExpr pc = shar_precongruence_normalize(cur);
        if (seen.insert(canonical_key(pc)).second) candidates.push_back(pc);
        if (d >= 6) continue;
        for (auto& st : shar_step_all(cur)) {
          if (seen.insert(canonical_key(st.result)).second) {
            candidates.push_back(st.result);
            fr.emplace_back(st.result, d + 1);
          }
        }
      }
    }
    bool caught = false;
    for (auto& cand : candidates) {
      ProcPtr pc = encode_process(cand, Name{"u"});
      auto r = pi_reaches(q, pc, pi_fuel, breadth_cap);
      if (r.reached) {
        caught = true;
        break;
      }
    }
    if (!caught) rep.inconclusive++;
  }
  return rep;
}

CheckReport check_success_sensitivity(const GenConfig& cfg, int stage) {
  CheckReport rep;
  rep.property = "success-sensitivity-stage" +
                 std::string(stage == 0 ? "all" : std::to_string(stage));
  GenConfig gen_cfg = cfg;
  gen_cfg.allow_check = true;
  for (int i = 0; i < cfg.cases; i++) {
    auto rng = case_rng(cfg, i);
    GenJudgment j = gen_wellformed(gen_cfg, rng);
    rep.cases++;
    SuccessResult lam = has_success(j.expr);
    SharExpr s = encode_open(j.expr);
    SuccessResult shr = shar_has_success(s);
    SuccessResult pi = SuccessResult::OutOfFuel;
    if (stage != 1) pi = pi_has_success(encode_process(s, Name{"u"}), 4096);
    if (lam == SuccessResult::OutOfFuel || shr == SuccessResult::OutOfFuel ||
        (stage != 1 && pi == SuccessResult::OutOfFuel)) {
      rep.inconclusive++;
      continue;
    }
    bool agree = true;
    std::string detail;
    if (stage == 1 || stage == 0) {
      if (lam != shr) {
        agree = false;
        detail = "source and sharing success disagree";
      }
    }
    if ((stage == 2 || stage == 0) && agree) {
      if (shr != pi) {
        agree = false;
        detail = "sharing and process success disagree";
      }
    }
    if (!agree)
      fail_case(rep, cfg, i, print_expr(j.expr), detail);
  }
  return rep;
}

CheckReport check_type_preservation(const GenConfig& cfg, int stage) {
  CheckReport rep;
  rep.property = "type-preservation-stage" + std::to_string(stage);
  for (int i = 0; i < cfg.cases; i++) {
    auto rng = case_rng(cfg, i);
    GenJudgment j = gen_wellformed(cfg, rng);
    rep.cases++;
    TypeContext collapsed;
    try {
      collapsed = translate_context(j.ctx);
    } catch (const ContextError& e) {
      rep.inconclusive++;
      continue;
    }
    SharExpr s = encode_open(j.expr);
    if (stage == 1) {
      CheckResult r = check_wellformed_sharing(collapsed, s, j.type);
      if (!r.ok)
        fail_case(rep, cfg, i,
                  print_context(collapsed) + " |= " + print_shar_expr(s) +
                      " : " + print_strict(j.type),
                  "translated judgment rejected: " + r.reason);
    } else {
      SharingTypeInfo info;
      CheckResult r = check_wellformed_sharing_info(collapsed, s, j.type, &info);
      if (!r.ok) {
        fail_case(rep, cfg, i, print_shar_expr(s),
                  "sharing judgment rejected: " + r.reason);
        continue;
      }
      ProcPtr p = encode_process(s, Name{"u"}, &info);
      TypingEnv env = encode_typing_env(collapsed);
      env[Name{"u"}] = encode_strict_type(j.type);
      auto pr = pi_typecheck(p, env);
      if (!pr.ok)
        fail_case(rep, cfg, i,
                  print_typing_env(env) + " for " + print_shar_expr(s),
                  "session judgment rejected: " + pr.reason);
    }
  }
  return rep;
}

namespace {

SPtr random_session_type(std::mt19937_64& rng, int depth) {
  int pick = int(rng() % (depth <= 0 ? 2 : 6));
  switch (pick) {
    case 0: return st_bot();
    case 1: return st_one();
    case 2: return st_tensor(random_session_type(rng, depth - 1),
                             random_session_type(rng, depth - 1));
    case 3: return st_parr(random_session_type(rng, depth - 1),
                           random_session_type(rng, depth - 1));
    case 4: return st_with(random_session_type(rng, depth - 1));
    default: return st_plus(random_session_type(rng, depth - 1));
  }
}

// One random instance of a congruence law applied somewhere in the process.
ProcPtr random_law_rewrite(const ProcPtr& p, std::mt19937_64& rng) {
  int law = int(rng() % 6);
  switch (law) {
    case 0: return p_par(p, p_nil());
    case 1: {
      if (auto* par = std::get_if<PPar>(&p->node))
        return p_par(par->right, par->left);
      return p_par(p_nil(), p);
    }
    case 2: {
      if (auto* ch = std::get_if<PChoice>(&p->node))
        return p_choice(ch->right, ch->left);
      return p;
    }
    case 3: {
      if (auto* res = std::get_if<PRes>(&p->node)) {
        if (auto* inner = std::get_if<PRes>(&res->body->node))
          return p_res(inner->name, inner->annot,
                       p_res(res->name, res->annot, inner->body));
      }
      return p;
    }
    case 4: {
      if (auto* fwd = std::get_if<PFwd>(&p->node))
        return p_fwd(fwd->b, fwd->a);
      return p;
    }
    default: {
      // scope extrusion at the top, when applicable
      if (auto* par = std::get_if<PPar>(&p->node)) {
        if (auto* res = std::get_if<PRes>(&par->left->node)) {
          if (!contains(free_names(par->right), res->name))
            return p_res(res->name, res->annot,
                         p_par(res->body, par->right));
        }
      }
      return p;
    }
  }
}

}  // namespace

CheckReport check_duality_canon(const GenConfig& cfg) {
  CheckReport rep;
  rep.property = "duality-and-canonical-form";
  auto rng = case_rng(cfg, 0);
  for (int i = 0; i < cfg.cases; i++) {
    rep.cases++;
    SPtr t = random_session_type(rng, 4);
    if (!session_equal(dual(dual(t)), t)) {
      fail_case(rep, cfg, i, print_session_type(t),
                "duality is not an involution");
      continue;
    }
  }
  GenConfig small = cfg;
  small.max_depth = 3;
  small.allow_check = true;
  for (int i = 0; i < cfg.cases; i++) {
    rep.cases++;
    auto rng2 = case_rng(cfg, i + 17);
    GenJudgment j = gen_wellformed(small, rng2);
    ProcPtr p = encode_process(encode_open(j.expr), Name{"u"});
    ProcPtr q = p;
    for (int k = 0; k < 4; k++) q = random_law_rewrite(q, rng2);
    if (canonical_key(p) != canonical_key(q)) {
      fail_case(rep, cfg, i, print_process(p),
                "congruence rewrite changed the canonical form");
    }
  }
  return rep;
}

}  // namespace lampi
