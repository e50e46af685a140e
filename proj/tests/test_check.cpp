#include <doctest.h>

#include "lampi/check.hpp"
#include "lampi/lambda_reduce.hpp"
#include "lampi/sharing_reduce.hpp"

using namespace lampi;

namespace {

bool typed_lam(const std::string& ctx, const std::string& e,
               const std::string& ty) {
  return check_typed_lambda(parse_context(ctx), parse_expr(e),
                            parse_strict_type(ty))
      .ok;
}
bool wf_lam(const std::string& ctx, const std::string& e,
            const std::string& ty) {
  return check_wellformed_lambda(parse_context(ctx), parse_expr(e),
                                 parse_strict_type(ty))
      .ok;
}
bool typed_shar(const std::string& ctx, const std::string& e,
                const std::string& ty) {
  return check_typed_sharing(parse_context(ctx), parse_shar_expr(e),
                             parse_strict_type(ty))
      .ok;
}
bool wf_shar(const std::string& ctx, const std::string& e,
             const std::string& ty) {
  return check_wellformed_sharing(parse_context(ctx), parse_shar_expr(e),
                                  parse_strict_type(ty))
      .ok;
}

}  // namespace

TEST_CASE("type syntax round trips") {
  for (std::string src : {"unit", "unit^1 -> unit", "w -> unit",
                          "(unit^1 -> unit)^2 -> unit", "unit^2 -> unit"}) {
    CHECK(print_strict(parse_strict_type(src)) == src);
  }
  CHECK(print_context(parse_context("x:unit, y:unit^2, z:w")) ==
        "x:unit, y:unit^2, z:w");
  // bare arrow domain defaults to a singleton multiset
  CHECK(print_strict(parse_strict_type("unit -> unit")) == "unit^1 -> unit");
}

TEST_CASE("typability of the example terms") {
  CHECK(typed_lam("y:unit", "(\\x. x) [y]", "unit"));
  CHECK(!typed_lam("y:unit, z:unit", "(\\x. x) ([y]*[z])", "unit"));
  CHECK(!typed_lam("", "(\\x. x) 1", "unit"));
  CHECK(typed_lam("y:unit", "(\\x. y) 1", "unit"));
  // failure and success constructs are not typable
  CHECK(!typed_lam("", "fail{}", "unit"));
  CHECK(!typed_lam("", "check", "unit"));
  CHECK(typed_lam("x:unit", "x", "unit"));
  CHECK(typed_lam("x:unit -> unit", "x", "unit^1 -> unit"));
  // a head occurrence needs an arrow while a bag occurrence needs its
  // domain; homogeneous intersections reject self-application shapes
  CHECK(!typed_lam("y:unit, y:unit", "(\\x. x [x]) ([y]*[y])", "unit"));
}

TEST_CASE("exact consumption in the typed system") {
  // two occurrences of x at different types cannot share one strict type
  CHECK(!typed_lam("y:unit", "(\\x. x [x]) ([y]*[y])", "unit"));
  // unused strict assignments are rejected
  CHECK(!typed_lam("y:unit, z:unit", "(\\x. x) [y]", "unit"));
  // omega assignments are fine unused
  CHECK(typed_lam("y:unit, z:w", "(\\x. x) [y]", "unit"));
  // heterogeneous assignments for one variable
  CHECK(typed_lam("x:unit^1 -> unit, x:unit", "x [x]", "unit"));
}

TEST_CASE("well-formedness admits mismatches and failure") {
  CHECK(wf_lam("y:unit, z:unit", "(\\x. x) ([y]*[z])", "unit"));
  CHECK(wf_lam("", "(\\x. x) 1", "unit"));
  CHECK(wf_lam("", "fail{}", "unit"));
  CHECK(wf_lam("", "fail{}", "unit^1 -> unit"));
  CHECK(wf_lam("x:unit", "x", "unit"));
  CHECK(wf_lam("", "check", "unit"));
  CHECK(wf_lam("y:unit, y:unit, z:unit", "fail{y,y,z}", "unit"));
  CHECK(!wf_lam("y:unit, z:unit", "fail{y}", "unit"));
  // every typed judgment is well-formed
  for (auto& [c, e, t] :
       std::vector<std::tuple<std::string, std::string, std::string>>{
           {"y:unit", "(\\x. x) [y]", "unit"},
           {"y:unit", "(\\x. y) 1", "unit"},
           {"x:unit -> unit", "x", "unit^1 -> unit"}}) {
    CAPTURE(e);
    CHECK(typed_lam(c, e, t));
    CHECK(wf_lam(c, e, t));
  }
}

TEST_CASE("sharing calculus judgments") {
  CHECK(typed_shar("y:unit", "(\\x. x1[x1<-x]) [y1][y1<-y]", "unit"));
  CHECK(typed_shar("y:unit^1", "(\\x. x1[x1<-x]) [y1][y1<-y]", "unit"));
  CHECK(wf_shar("", "(\\x. x1[x1<-x]) [fail{}[<-y]<<1/y>>]", "unit"));
  CHECK(wf_shar("x:w", "check[<-x]", "unit"));
  CHECK(typed_shar("", "\\x. x1[x1<-x]", "unit^1 -> unit"));
  CHECK(!typed_shar("", "\\x. x1[x1<-x]", "unit^2 -> unit"));
  CHECK(typed_shar("m:unit", "x1 <|m/x1|>", "unit"));
  // mismatched substituted sharing is only well-formed
  CHECK(!typed_shar("", "x1[x1<-x]<<1/x>>", "unit"));
  CHECK(wf_shar("", "x1[x1<-x]<<1/x>>", "unit"));
  CHECK(wf_shar("", "fail{}", "unit"));
  // two occurrences of a shared variable at one strict type
  CHECK(typed_shar(
      "f:unit^2 -> unit, y:unit, y:unit",
      "(\\x. f ([x1]*[x2])[x1,x2<-x]) ([y1]*[y2])[y1,y2<-y]", "unit"));
  CHECK(typed_shar(
      "f:unit^2 -> unit, y:unit^2",
      "(\\x. f ([x1]*[x2])[x1,x2<-x]) ([y1]*[y2])[y1,y2<-y]", "unit"));
  CHECK(!typed_shar(
      "y:unit, y:unit",
      "(\\x. x1 [x2][x1,x2<-x]) ([y1]*[y2])[y1,y2<-y]", "unit"));
}

TEST_CASE("translate_context") {
  TypeContext c = translate_context(parse_context("x:unit, x:unit, y:unit"));
  CHECK(print_context(c) == "x:unit^2, y:unit^1");
  CHECK(print_context(translate_context(parse_context(""))) == "");
  CHECK_THROWS_AS(
      translate_context(parse_context("x:unit, x:unit -> unit")),
      ContextError);
}

TEST_CASE("subject reduction spot checks") {
  struct Case {
    std::string ctx, e, ty;
    bool typed;
  };
  for (auto& c : std::vector<Case>{
           {"y:unit", "(\\x. x) [y]", "unit", true},
           {"y:unit, z:unit", "(\\x. x) ([y]*[z])", "unit", false},
           {"", "(\\x. x) 1", "unit", false},
           {"y:unit", "(\\x. y) 1", "unit", true},
           {"a:unit, b:unit", "fail{a} [b]", "unit", false},
       }) {
    CAPTURE(c.e);
    TypeContext ctx = parse_context(c.ctx);
    StrictPtr ty = parse_strict_type(c.ty);
    Expr cur = parse_expr(c.e);
    for (int i = 0; i < 10; i++) {
      CheckResult before = c.typed ? check_typed_lambda(ctx, cur, ty)
                                   : check_wellformed_lambda(ctx, cur, ty);
      REQUIRE(before.ok);
      auto steps = step_all(cur);
      if (steps.empty()) break;
      cur = steps[0].result;
      CheckResult after = c.typed ? check_typed_lambda(ctx, cur, ty)
                                  : check_wellformed_lambda(ctx, cur, ty);
      CAPTURE(print_expr(cur));
      CHECK(after.ok);
    }
  }
}

TEST_CASE("linear substitution lemma instances") {
  // Gamma, x:sigma |= M : tau with head(M) = x, Delta |= N : sigma
  // implies Gamma, Delta |= M<N/x> : tau
  struct Inst {
    std::string gamma_x, m, delta, n, tau;
  };
  for (auto& i : std::vector<Inst>{
           {"x:unit", "x", "n:unit", "n", "unit"},
           {"x:unit^1 -> unit, z:unit", "x [z]", "", "\\w. w", "unit"},
       }) {
    CAPTURE(i.m);
    TermPtr m = parse_term(i.m), n = parse_term(i.n);
    TermPtr res = linear_head_subst(m, n, {"x"});
    std::string merged = i.gamma_x;
    // drop the x assignment, then join contexts
    auto pos = merged.find("x:");
    std::string gamma;
    for (auto& part : {i.gamma_x, i.delta}) (void)part;
    TypeContext big;
    for (auto& [v, t] : parse_context(i.gamma_x).strict)
      if (v != Var{"x"}) big.strict.emplace_back(v, t);
    for (auto& [v, t] : parse_context(i.delta).strict)
      big.strict.emplace_back(v, t);
    CHECK(check_wellformed_lambda(big, expr_of(res),
                                  parse_strict_type(i.tau))
              .ok);
  }
}

TEST_CASE("derivation structure and replay") {
  CheckResult r = check_typed_lambda(parse_context("y:unit"),
                                     parse_expr("(\\x. x) [y]"),
                                     parse_strict_type("unit"));
  REQUIRE(r.ok);
  CHECK(r.deriv.rule == "T:app");
  std::string why;
  CHECK(derivation_replay(r.deriv, &why));

  CheckResult r2 = check_wellformed_sharing(
      parse_context("y:unit"), parse_shar_expr("(\\x. x1[x1<-x]) [y1][y1<-y]"),
      parse_strict_type("unit"));
  REQUIRE(r2.ok);
  CHECK(derivation_replay(r2.deriv, &why));

  CheckResult r3 = check_wellformed_lambda(
      parse_context("a:unit, b:unit"), parse_expr("fail{a} [b]"),
      parse_strict_type("unit"));
  REQUIRE(r3.ok);
  CHECK(derivation_replay(r3.deriv, &why));
}

TEST_CASE("judgment inference") {
  auto r = infer_wellformed_lambda(parse_expr("(\\x. x) ([y]*[z])"));
  REQUIRE(r.ok);
  CHECK(check_wellformed_lambda(r.ctx, parse_expr("(\\x. x) ([y]*[z])"),
                                r.type)
            .ok);

  auto r2 = infer_typed_lambda(parse_expr("\\x. x"));
  REQUIRE(r2.ok);
  CHECK(print_strict(r2.type) == "unit^1 -> unit");

  auto r3 = infer_wellformed_sharing(
      parse_shar_expr("(\\x. x1[x1<-x]) [fail{}[<-y]<<1/y>>]"));
  REQUIRE(r3.ok);

  auto r4 = infer_wellformed_lambda(parse_expr("check <<1/q>>"));
  REQUIRE(r4.ok);
}
