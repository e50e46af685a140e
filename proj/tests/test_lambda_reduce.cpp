#include <doctest.h>

#include "lampi/lambda.hpp"
#include "lampi/lambda_reduce.hpp"

using namespace lampi;

namespace {

std::vector<std::string> tags_of(const Trace& t) {
  std::vector<std::string> out;
  for (auto& s : t.steps) out.push_back(s.rule);
  return out;
}

}  // namespace

TEST_CASE("step_all on the paper terms") {
  auto s1 = step_all(parse_expr("(\\x. x) [y]"));
  REQUIRE(s1.size() == 1);
  CHECK(s1[0].tag == RuleTag::Beta);
  CHECK(expr_equal(s1[0].result, parse_expr("x <<[y]/x>>")));

  CHECK(step_all(parse_expr("fail{}")).empty());

  auto s3 = step_all(parse_expr("(\\x. x) [y] + (\\x. x) [z]"));
  CHECK(s3.size() == 2);
  for (auto& s : s3) CHECK(s.tag == RuleTag::Beta);
}

TEST_CASE("fetch produces one summand per bag element") {
  auto s = step_all(parse_expr("x [x [w]] <<[a]*[b]/x>>"));
  REQUIRE(s.size() == 1);
  CHECK(s[0].tag == RuleTag::Fetch);
  CHECK(s[0].result.sum.size() == 2);
  CHECK(expr_equal(s[0].result, parse_expr("a [x [w]] <<[b]/x>> + "
                                           "b [x [w]] <<[a]/x>>")));
}

TEST_CASE("precongruence") {
  CHECK(print_expr(precongruence_normalize(parse_expr("y <<1/x>>"))) == "y");
  CHECK(print_expr(precongruence_normalize(parse_expr("y"))) == "y");
  CHECK(print_expr(precongruence_normalize(
            parse_expr("fail{y,y,z} <<1/x>>"))) == "fail{y,y,z}");
  // oriented laws: substitution moves toward the head, then sorts
  CHECK(print_expr(precongruence_normalize(parse_expr(
            "x [q] <<[a]/x>>"))) == "x <<[a]/x>> [q]");
  CHECK(print_expr(precongruence_normalize(parse_expr(
            "m <<[a]/y>> <<[b]/x>>"))) == "m <<[b]/x>> <<[a]/y>>");

  // idempotent and head-preserving
  for (std::string src :
       {"y <<1/x>>", "x [q] <<[a]/x>>", "m <<[a]/y>> <<[b]/x>>",
        "fail{y} <<1/x>>", "(\\x. x) [y]"}) {
    Expr once = precongruence_normalize(parse_expr(src));
    Expr twice = precongruence_normalize(once);
    CHECK(expr_equal(once, twice));
    auto h0 = head(parse_expr(src).sum[0]);
    auto h1 = head(once.sum[0]);
    CHECK(h0.kind == h1.kind);
  }
}

TEST_CASE("normalization of the six example terms") {
  struct Case {
    std::string src, expect;
    std::vector<std::string> rules;
  };
  // the rule tags follow the paper's derivations for M1..M6
  std::vector<Case> cases = {
      {"(\\x. x) [y]", "y", {"R:Beta", "R:Fetch", "Precong"}},
      // one fail summand per permutation of the two-element bag
      {"(\\x. x) ([y]*[z])", "fail{y,z} + fail{y,z}", {"R:Beta", "R:Fail"}},
      {"(\\x. x) 1", "fail{}", {"R:Beta", "R:Fail"}},
      {"(\\x. y) 1", "y", {"R:Beta", "Precong"}},
      {"fail{}", "fail{}", {}},
      {"(\\x. x) [y] + (\\x. x) [z]",
       "y + z",
       {"R:Beta", "R:Fetch", "Precong", "R:Beta", "R:Fetch", "Precong"}},
  };
  for (auto& c : cases) {
    CAPTURE(c.src);
    auto r = normalize(parse_expr(c.src));
    REQUIRE(r.ok);
    CHECK(print_expr(canon_expr(r.result)) == c.expect);
    CHECK(tags_of(r.trace) == c.rules);
  }
}

TEST_CASE("permutation failure keeps all n! summands") {
  auto r = normalize(parse_expr("(\\x. x [x [y]]) ([z1]*[z2]*[z1])"),
                     {4, 20});
  REQUIRE(r.ok);
  CHECK(r.result.sum.size() == 6);
  for (auto& m : r.result.sum)
    CHECK(print_term(m) == "fail{y,z1,z1,z2}");
}

TEST_CASE("bag size cap is a reported error") {
  auto r = normalize(parse_expr("(\\x. x) ([a]*[b]*[c]*[d]*[e])"), {4, 20});
  CHECK(!r.ok);
  CHECK(r.error.find("cap") != std::string::npos);
}

TEST_CASE("fuel exhaustion carries partial trace") {
  auto r = normalize(parse_expr("(\\x. x) [y]"), {4, 1});
  CHECK(!r.ok);
  CHECK(r.error == "out of fuel");
  CHECK(r.trace.steps.size() == 1);
}

TEST_CASE("diamond property on the M6 square") {
  Expr e = parse_expr("(\\x. x) [y] + (\\x. x) [z]");
  auto steps = step_all(e);
  REQUIRE(steps.size() == 2);
  auto& r1 = steps[0].result;
  auto& r2 = steps[1].result;
  REQUIRE(!expr_equal(r1, r2));
  bool joined = false;
  for (auto& a : step_all(r1))
    for (auto& b : step_all(r2))
      if (expr_equal(a.result, b.result)) joined = true;
  CHECK(joined);
}

TEST_CASE("has_success") {
  CHECK(has_success(parse_expr("check"), {4, 1}) == SuccessResult::Yes);
  CHECK(has_success(parse_expr("(\\x. x) [check]")) == SuccessResult::Yes);
  CHECK(has_success(parse_expr("fail{}")) == SuccessResult::No);
  CHECK(has_success(parse_expr("(\\x. x) 1")) == SuccessResult::No);
  // check planted under an unbalanced substitution is consumed by the failure
  CHECK(has_success(parse_expr("check <<[y]/x>>")) == SuccessResult::No);
}

TEST_CASE("reduction preserves free variable soundness") {
  for (std::string src :
       {"(\\x. x) ([y]*[z])", "fail{a} [b]", "fail{a,b} <<[c]/a>>",
        "x [x [y]] <<[z1]*[z2]*[z1]/x>>"}) {
    Expr e = parse_expr(src);
    VarSet before = free_vars_set(e);
    for (auto& s : step_all(e)) {
      for (auto& v : free_vars_set(s.result)) CHECK(contains(before, v));
    }
  }
}
