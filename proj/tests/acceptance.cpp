// Acceptance suite: one line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "lampi/harness.hpp"

using namespace lampi;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int index, const std::string& name, bool ok, double seconds,
            double budget, const std::string& detail = "") {
  bool in_budget = seconds <= budget;
  bool pass = ok && in_budget;
  if (!pass) failures++;
  std::printf("criterion %2d [%s]: %s (%.2fs, budget %.0fs)%s\n", index,
              name.c_str(), pass ? "PASS" : "FAIL", seconds, budget,
              detail.empty() ? "" : ("  -- " + detail).c_str());
  std::fflush(stdout);
}

struct Timer {
  Clock::time_point start = Clock::now();
  double elapsed() const {
    return std::chrono::duration<double>(Clock::now() - start).count();
  }
};

std::vector<std::string> reduction_tags(const Trace& t) {
  std::vector<std::string> out;
  for (auto& s : t.steps)
    if (s.rule != "Precong") out.push_back(s.rule);
  return out;
}

// Distinct summands of the canonical normal form, as printed terms.
std::multiset<std::string> distinct_summands(const Expr& e) {
  std::multiset<std::string> out;
  std::set<std::string> seen;
  for (auto& m : canon_expr(e).sum) {
    std::string s = print_term(m);
    if (seen.insert(s).second) out.insert(s);
  }
  return out;
}

void criterion_1() {
  Timer t;
  struct Case {
    std::string src, normal_form;
    std::vector<std::string> tags;
  };
  // the six reductions of the introductory example; normal forms are
  // compared by their distinct summands
  std::vector<Case> cases = {
      {"(\\x. x) [y]", "y", {"R:Beta", "R:Fetch"}},
      {"(\\x. x) ([y]*[z])", "fail{y,z}", {"R:Beta", "R:Fail"}},
      {"(\\x. x) 1", "fail{}", {"R:Beta", "R:Fail"}},
      {"(\\x. y) 1", "y", {"R:Beta"}},
      {"fail{}", "fail{}", {}},
      {"(\\x. x) [y] + (\\x. x) [z]",
       "y + z",
       {"R:Beta", "R:Fetch", "R:Beta", "R:Fetch"}},
  };
  bool ok = true;
  std::string detail;
  for (auto& c : cases) {
    NormalizeResult r = normalize(parse_expr(c.src));
    if (!r.ok) {
      ok = false;
      detail = c.src + ": " + r.error;
      break;
    }
    if (distinct_summands(r.result) != distinct_summands(parse_expr(c.normal_form))) {
      ok = false;
      detail = c.src + " normalized to " + print_expr(canon_expr(r.result));
      break;
    }
    if (reduction_tags(r.trace) != c.tags) {
      ok = false;
      detail = c.src + " used unexpected rules";
      break;
    }
  }
  report(1, "golden source traces", ok, t.elapsed(), 1, detail);
}

void criterion_2() {
  Timer t;
  NormalizeResult r =
      normalize(parse_expr("(\\x. x [x [y]]) ([z1]*[z2]*[z1])"), {4, 100});
  bool ok = r.ok && r.result.sum.size() == 6;
  std::string detail;
  if (ok) {
    for (auto& m : r.result.sum) {
      VarMultiset want;
      for (auto* v : {"y", "z1", "z2", "z1"}) want.add(Var{v});
      auto* f = std::get_if<TFail>(&m->node);
      if (!f) {
        ok = false;
        detail = "summand is not a failure term";
        break;
      }
      VarMultiset got;
      for (auto& v : f->vars) got.add(v);
      if (!(got == want)) {
        ok = false;
        detail = "summand multiset is " + print_term(m);
        break;
      }
    }
  } else if (r.ok) {
    detail = "expected 6 summands, got " + std::to_string(r.result.sum.size());
  }
  report(2, "permutation failure", ok, t.elapsed(), 1, detail);
}

void criterion_3() {
  Timer t;
  std::vector<std::pair<std::string, std::string>> cases = {
      {"(\\x. x) [y]", "(\\x. x1[x1<-x]) [y1][y1<-y]"},
      {"(\\x. x) ([y]*[z])", "(\\x. x1[x1<-x]) [y1]*[z1][y1<-y][z1<-z]"},
      {"(\\x. y) 1", "(\\x. y1[<-x]) 1[y1<-y]"},
      {"(\\x. x) [y] + (\\x. x) [z]",
       "(\\x. x1[x1<-x]) [y1][y1<-y] + (\\x. x1[x1<-x]) [z1][z1<-z]"},
  };
  bool ok = true;
  std::string detail;
  for (auto& [src, want] : cases) {
    SharExpr got = encode_open(parse_expr(src));
    if (print_shar_expr(got) != want ||
        !shar_expr_equal(got, parse_shar_expr(want))) {
      ok = false;
      detail = src + " translated to " + print_shar_expr(got);
      break;
    }
  }
  report(3, "golden atomization", ok, t.elapsed(), 1, detail);
}

void criterion_4() {
  Timer t;
  struct Case {
    std::string src, tgt;
    int steps;
  };
  std::vector<Case> cases = {
      {"x1[x1<-x]<<[\\w. w1[w1<-w]]/x>>", "x1 <|\\w. w1[w1<-w]/x1|>", 11},
      {"(\\z. z1[z1<-z])[<-x]<<[\\w. w1[w1<-w]]/x>>", "fail{}", 4},
      {"x1[x1<-x]<<1/x>>", "fail{}", 6},
  };
  bool ok = true;
  std::string detail;
  for (auto& c : cases) {
    ProcPtr p = encode_process(parse_shar_expr(c.src), Name{"u"});
    ProcPtr q = encode_process(parse_shar_expr(c.tgt), Name{"u"});
    auto r = pi_reaches(p, q, 32);
    if (!r.reached || r.steps != c.steps) {
      ok = false;
      detail = c.src + (r.reached ? " reached in " + std::to_string(r.steps) +
                                        " steps, expected " +
                                        std::to_string(c.steps)
                                  : " unreachable: " + r.error);
      break;
    }
  }
  report(4, "golden process traces", ok, t.elapsed(), 2, detail);
}

std::string summarize(const CheckReport& r) {
  if (r.ok()) return "";
  std::string s = r.property + ": " + r.failures[0].subject + " -- " +
                  r.failures[0].detail;
  return s;
}

void criterion_5() {
  Timer t;
  GenConfig cfg;
  cfg.cases = 300;
  cfg.max_depth = 4;
  cfg.max_bag = 3;
  cfg.seed = 1001;
  bool ok = true;
  std::string detail;
  for (const char* calc : {"lambda", "sharing", "pi"}) {
    auto r = check_diamond(cfg, calc);
    if (!r.ok()) {
      ok = false;
      detail = summarize(r);
      break;
    }
  }
  report(5, "diamond property", ok, t.elapsed(), 30, detail);
}

void criterion_6() {
  Timer t;
  GenConfig cfg;
  cfg.cases = 300;
  cfg.seed = 1002;
  bool ok = true;
  std::string detail;
  for (const char* sys :
       {"lambda-typed", "lambda-wf", "sharing-typed", "sharing-wf"}) {
    auto r = check_subject_reduction(cfg, sys);
    if (!r.ok()) {
      ok = false;
      detail = summarize(r);
      break;
    }
  }
  report(6, "subject reduction", ok, t.elapsed(), 60, detail);
}

void criterion_7() {
  Timer t;
  GenConfig cfg;
  cfg.cases = 200;
  cfg.seed = 1003;
  auto r = check_correspondence_1(cfg);
  report(7, "stage-1 correspondence", r.ok(), t.elapsed(), 60, summarize(r));
}

void criterion_8() {
  Timer t;
  GenConfig cfg;
  cfg.cases = 100;
  cfg.max_bag = 2;
  cfg.seed = 1004;
  auto r = check_correspondence_2(cfg, 128, 10000);
  bool ok = r.ok() && r.inconclusive * 20 < r.cases;  // < 5%
  std::string detail = summarize(r);
  if (detail.empty() && !ok)
    detail = std::to_string(r.inconclusive) + " inconclusive of " +
             std::to_string(r.cases);
  else if (r.inconclusive)
    detail += " (" + std::to_string(r.inconclusive) + " inconclusive)";
  report(8, "stage-2 correspondence", ok, t.elapsed(), 180, detail);
}

void criterion_9() {
  Timer t;
  GenConfig cfg;
  cfg.cases = 200;
  cfg.seed = 1005;
  auto r1 = check_type_preservation(cfg, 1);
  auto r2 = check_type_preservation(cfg, 2);
  bool ok = r1.ok() && r2.ok();
  report(9, "type preservation of the translations", ok, t.elapsed(), 120,
         !r1.ok() ? summarize(r1) : summarize(r2));
}

void criterion_10() {
  Timer t;
  GenConfig cfg;
  cfg.cases = 100;
  cfg.seed = 1006;
  auto r = check_success_sensitivity(cfg, 0);
  bool ok = r.ok() && r.inconclusive == 0;
  report(10, "success sensitiveness end-to-end", ok, t.elapsed(), 60,
         summarize(r));
}

void criterion_11() {
  Timer t;
  GenConfig cfg;
  cfg.cases = 1000;
  cfg.seed = 1007;
  auto r = check_duality_canon(cfg);
  report(11, "duality and canonical-form algebra", r.ok(), t.elapsed(), 10,
         summarize(r));
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  if (failures) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
