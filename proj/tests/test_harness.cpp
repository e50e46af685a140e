#include <doctest.h>

#include "lampi/harness.hpp"

using namespace lampi;

TEST_CASE("generator soundness") {
  GenConfig cfg;
  cfg.max_depth = 4;
  cfg.max_bag = 3;
  cfg.seed = 11;
  for (int i = 0; i < 50; i++) {
    std::mt19937_64 rng(cfg.seed + i);
    GenJudgment j = gen_wellformed(cfg, rng);
    CHECK(check_wellformed_lambda(j.ctx, j.expr, j.type).ok);
  }
  for (int i = 0; i < 50; i++) {
    std::mt19937_64 rng(cfg.seed + i);
    GenJudgment j = gen_typed(cfg, rng);
    CHECK(check_typed_lambda(j.ctx, j.expr, j.type).ok);
  }
  // smallest derivations exist
  GenConfig tiny = cfg;
  tiny.max_depth = 1;
  std::mt19937_64 rng(3);
  GenJudgment j = gen_wellformed(tiny, rng);
  CHECK(check_wellformed_lambda(j.ctx, j.expr, j.type).ok);
}

TEST_CASE("generator with failure and success constructs") {
  GenConfig cfg;
  cfg.seed = 23;
  cfg.allow_check = true;
  bool saw_fail = false, saw_check = false;
  for (int i = 0; i < 60; i++) {
    std::mt19937_64 rng(cfg.seed + i);
    GenJudgment j = gen_wellformed(cfg, rng);
    std::string s = print_expr(j.expr);
    if (s.find("fail") != std::string::npos) saw_fail = true;
    if (s.find("check") != std::string::npos) saw_check = true;
  }
  CHECK(saw_fail);
  CHECK(saw_check);
}

TEST_CASE("determinism given the seed") {
  GenConfig cfg;
  cfg.seed = 5;
  cfg.cases = 10;
  auto a = check_diamond(cfg, "lambda");
  auto b = check_diamond(cfg, "lambda");
  CHECK(report_to_json(a) == report_to_json(b));
}

TEST_CASE("small property runs are clean") {
  GenConfig cfg;
  cfg.seed = 42;
  cfg.cases = 25;
  cfg.max_depth = 3;
  cfg.max_bag = 2;

  auto d1 = check_diamond(cfg, "lambda");
  CHECK(d1.ok());
  auto d2 = check_diamond(cfg, "sharing");
  CHECK(d2.ok());

  auto s1 = check_subject_reduction(cfg, "lambda-wf");
  CHECK(s1.ok());
  auto s2 = check_subject_reduction(cfg, "lambda-typed");
  CHECK(s2.ok());
  auto s3 = check_subject_reduction(cfg, "sharing-wf");
  CHECK(s3.ok());

  auto c1 = check_correspondence_1(cfg);
  CHECK(c1.ok());

  auto t1 = check_type_preservation(cfg, 1);
  CHECK(t1.ok());

  auto ss = check_success_sensitivity(cfg, 1);
  CHECK(ss.ok());
  CHECK(ss.inconclusive == 0);

  auto dc = check_duality_canon(cfg);
  CHECK(dc.ok());
}

TEST_CASE("small process-level property runs are clean") {
  GenConfig cfg;
  cfg.seed = 77;
  cfg.cases = 8;
  cfg.max_depth = 3;
  cfg.max_bag = 2;

  auto d3 = check_diamond(cfg, "pi");
  CHECK(d3.ok());
  auto t2 = check_type_preservation(cfg, 2);
  CHECK(t2.ok());
  auto sp = check_subject_reduction(cfg, "pi");
  CHECK(sp.ok());
  auto c2 = check_correspondence_2(cfg);
  CHECK(c2.ok());
  CHECK(c2.inconclusive <= 1);
}
