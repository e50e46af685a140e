#include <doctest.h>

#include "lampi/atomize.hpp"
#include "lampi/sharing.hpp"
#include "lampi/sharing_reduce.hpp"

using namespace lampi;

TEST_CASE("sharing statics") {
  auto t = parse_shar_term("x1[x1<-x]");
  auto h = shar_head(t);
  CHECK(h.kind == HeadResult::HVar);
  CHECK(h.var == Var{"x"});

  CHECK(print_shar_term(shar_linear_head_subst(parse_shar_term("x1"),
                                               parse_shar_term("\\w. w1[w1<-w]"),
                                               {"x1"})) ==
        "\\w. w1[w1<-w]");

  // |shared| = 1 but the bag is empty
  auto h2 = shar_head(parse_shar_term("x1[x1<-x]<<1/x>>"));
  CHECK(h2.kind == HeadResult::HFail);

  CHECK(shar_free_vars(parse_shar_term("y1[<-x]<<1/x>>[y1<-y]")) ==
        VarSet{{"y"}});
  CHECK(shar_free_vars(parse_shar_term("x1[x1<-x]")) == VarSet{{"x"}});
}

TEST_CASE("sharing validation") {
  CHECK(!validate(parse_shar_term("x1[x1<-x]")));
  CHECK(!validate(parse_shar_term("(\\x. x1 [x2][x1,x2<-x]) ([y1]*[y2])")));
  // the paper's C[y] counterexample: y <|N/x|> has no occurrence of x
  auto bad = parse_shar_term("y <|z/x|>");
  auto err = validate(bad);
  REQUIRE(err.has_value());
  CHECK(err->message.find("occurs 0 times") != std::string::npos);
  // fail{z} <|N/x|> likewise invalid
  CHECK(validate(parse_shar_term("fail{z} <|z2/x|>")).has_value());
  // fail{x} <|N/x|> is fine: the occurrence is inside the failure term
  CHECK(!validate(parse_shar_term("fail{x} <|z/x|>")));
  // duplicated shared variable
  CHECK(validate(parse_shar_term("x1 [x1][x1,x1<-x]")).has_value());
  // raw substitution without a sharing prefix is flagged
  CHECK(validate(parse_shar_term("y <<[z]/x>>")).has_value());
  // abstraction body must share the bound variable
  CHECK(validate(parse_shar_term("\\x. x")).has_value());
}

TEST_CASE("sharing print round trips") {
  for (std::string src :
       {"x1[x1<-x]", "(\\x. x1[x1<-x]) [y1][y1<-y]",
        "x1 <|\\w. w1[w1<-w]/x1|>", "fail{a,b}", "y1[<-x]<<1/x>>[y1<-y]",
        "(\\x. x1 [x2][x1,x2<-x]) ([y1]*[y2])[y1,y2<-y]", "check"}) {
    CAPTURE(src);
    CHECK(shar_term_equal(parse_shar_term(print_shar_term(parse_shar_term(src))),
                          parse_shar_term(src)));
  }
}

TEST_CASE("sharing reduction: beta and ex-sub") {
  // RS:Beta fuses into the substituted sharing form
  auto s1 = shar_step_all(parse_shar_expr("(\\x. x1[x1<-x]) [y1]"));
  REQUIRE(s1.size() == 1);
  CHECK(s1[0].tag == SRuleTag::Beta);
  CHECK(print_shar_expr(s1[0].result) == "x1[x1<-x]<<[y1]/x>>");

  // RS:Ex-Sub considers all k! permutations
  auto s2 = shar_step_all(
      parse_shar_expr("x1 [x2][x1,x2<-x]<<[a]*[b]/x>>"));
  REQUIRE(s2.size() == 1);
  CHECK(s2[0].tag == SRuleTag::ExSub);
  REQUIRE(s2[0].result.sum.size() == 2);
  CHECK(shar_expr_equal(
      s2[0].result,
      parse_shar_expr("x1 [x2] <|a/x1|> <|b/x2|> + x1 [x2] <|b/x1|> <|a/x2|>")));

  // RS:Lin-Fetch
  auto s3 = shar_step_all(parse_shar_expr("x1 <|z/x1|>"));
  REQUIRE(s3.size() == 1);
  CHECK(s3[0].tag == SRuleTag::LinFetch);
  CHECK(print_shar_expr(s3[0].result) == "z");
}

TEST_CASE("sharing reduction: failure rules") {
  // RS:Fail on a mismatch
  auto s1 = shar_step_all(parse_shar_expr("x1[x1<-x]<<1/x>>"));
  REQUIRE(s1.size() == 1);
  CHECK(s1[0].tag == SRuleTag::Fail);
  CHECK(print_shar_expr(s1[0].result) == "fail{}");

  // RS:Cons3 consumes an explicit linear substitution
  auto s2 = shar_step_all(parse_shar_expr("fail{x1} <|m/x1|>"));
  REQUIRE(s2.size() == 1);
  CHECK(s2[0].tag == SRuleTag::Cons3);
  CHECK(print_shar_expr(s2[0].result) == "fail{m}");

  // RS:Cons1 accumulates bag variables
  auto s3 = shar_step_all(parse_shar_expr("fail{a} [b]"));
  REQUIRE(s3.size() == 1);
  CHECK(s3[0].tag == SRuleTag::Cons1);
  CHECK(print_shar_expr(s3[0].result) == "fail{a,b}");

  // RS:Cons2 on a substituted sharing of a failure term
  auto s4 = shar_step_all(parse_shar_expr("fail{x1,q}[x1<-x]<<[m]/x>>"));
  REQUIRE(!s4.empty());
  bool found = false;
  for (auto& s : s4)
    if (s.tag == SRuleTag::Cons2 &&
        print_shar_expr(s.result) == "fail{m,q}")
      found = true;
  CHECK(found);
}

TEST_CASE("paper reduction chains") {
  // beta, ex-sub, lin-fetch, then cons2 consumes the substituted failure
  auto r1 = shar_normalize(parse_shar_expr(
      "(\\x. x1[x1<-x]) [fail{}[<-y]<<[n]/y>>]"));
  REQUIRE(r1.ok);
  CHECK(print_shar_expr(r1.result) == "fail{n}");

  // the precongruence case: fail{}[<-y]<<1/y>> collapses without a rule
  auto r2 = shar_normalize(parse_shar_expr(
      "(\\x. x1[x1<-x]) [fail{}[<-y]<<1/y>>]"));
  REQUIRE(r2.ok);
  CHECK(print_shar_expr(r2.result) == "fail{}");

  // RS:Fail inside then RS:Cons3
  auto r3 = shar_normalize(parse_shar_expr(
      "x1[<-y]<<[n]/y>>[x1<-x]<<[m]/x>>"));
  REQUIRE(r3.ok);
  CHECK(print_shar_expr(r3.result) == "fail{m,n}");
}

TEST_CASE("sharing diamond and success") {
  SharExpr e = parse_shar_expr("x1 <|m/x1|> + y1 <|n/y1|>");
  auto steps = shar_step_all(e);
  REQUIRE(steps.size() == 2);
  bool joined = false;
  for (auto& a : shar_step_all(steps[0].result))
    for (auto& b : shar_step_all(steps[1].result))
      if (shar_expr_equal(a.result, b.result)) joined = true;
  CHECK(joined);

  CHECK(shar_has_success(parse_shar_expr("check")) == SuccessResult::Yes);
  CHECK(shar_has_success(parse_shar_expr(
            "(\\x. x1[x1<-x]) [check]")) == SuccessResult::Yes);
  CHECK(shar_has_success(parse_shar_expr("fail{}")) == SuccessResult::No);
}

TEST_CASE("simultaneous linear substitution") {
  CHECK(print_term(simultaneous_linear_subst(parse_term("x"), {"x"},
                                             {Var{"x1"}})) == "x1");
  CHECK(print_term(simultaneous_linear_subst(parse_term("x [x]"), {"x"},
                                             {Var{"x1"}, Var{"x2"}})) ==
        "x1 [x2]");
  CHECK(print_term(simultaneous_linear_subst(parse_term("y"), {"x"}, {})) ==
        "y");
  CHECK_THROWS_AS(
      simultaneous_linear_subst(parse_term("x"), {"x"}, {}),
      ArityMismatch);
}

TEST_CASE("atomizing translation reproduces the worked examples") {
  CHECK(print_shar_expr(encode_open(parse_expr("(\\x. x) [y]"))) ==
        "(\\x. x1[x1<-x]) [y1][y1<-y]");
  CHECK(print_shar_expr(encode_open(parse_expr("(\\x. x) ([y]*[z])"))) ==
        "(\\x. x1[x1<-x]) [y1]*[z1][y1<-y][z1<-z]");
  CHECK(print_shar_expr(encode_open(parse_expr("(\\x. y) 1"))) ==
        "(\\x. y1[<-x]) 1[y1<-y]");
  CHECK(print_shar_expr(encode_open(
            parse_expr("(\\x. x) [y] + (\\x. x) [z]"))) ==
        "(\\x. x1[x1<-x]) [y1][y1<-y] + (\\x. x1[x1<-x]) [z1][z1<-z]");
  // two occurrences of a bound variable
  CHECK(print_shar_expr(encode_open(
            parse_expr("(\\x. x [x]) ([y]*[y])"))) ==
        "(\\x. x1 [x2][x1,x2<-x]) [y1]*[y2][y1,y2<-y]");
  // empty sharing induced on a vacuous substitution
  CHECK(print_shar_expr(encode_open(parse_expr("y <<[\\z. z]/x>>"))) ==
        "y1[<-x]<<[\\z. z1[z1<-z]]/x>>[y1<-y]");
  CHECK(print_shar_expr(encode_open(parse_expr("fail{}"))) == "fail{}");

  // every translated term satisfies the sharing structural conditions
  for (std::string src :
       {"(\\x. x) [y]", "(\\x. x [x]) ([y]*[y])", "y <<[\\z. z]/x>>",
        "fail{a,b} [c]", "(\\x. x) [check]"}) {
    CAPTURE(src);
    CHECK(!validate(encode_open(parse_expr(src))));
  }
}

TEST_CASE("translation commutes with linear head substitution") {
  // head(M) = x, closed N
  for (auto& [m, n] : std::vector<std::pair<std::string, std::string>>{
           {"x", "\\w. w"},
           {"x [z]", "\\w. w"},
           {"(x [z]) <<1/q>>", "\\u. u [u]"}}) {
    CAPTURE(m);
    TermPtr mt = parse_term(m), nt = parse_term(n);
    Atomizer a1;
    all_vars(mt, a1.used);
    all_vars(nt, a1.used);
    Atomizer a2;
    a2.used = a1.used;
    auto lhs = a1.closed_term_single(linear_head_subst(mt, nt, {"x"}));
    auto rhs = shar_linear_head_subst(a2.closed_term_single(mt),
                                      a2.closed_term_single(nt), {"x"});
    CHECK(canonical_key(lhs) == canonical_key(rhs));
  }
}
