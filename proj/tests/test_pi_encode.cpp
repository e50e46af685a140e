#include <doctest.h>

#include "lampi/atomize.hpp"
#include "lampi/pi_encode.hpp"
#include "lampi/sharing_reduce.hpp"
#include "lampi/spi_reduce.hpp"

using namespace lampi;

namespace {

ProcPtr enc(const std::string& sharing_term, const std::string& u = "u") {
  return encode_process(parse_shar_expr(sharing_term), Name{u});
}

}  // namespace

TEST_CASE("translation clauses") {
  CHECK(print_process(enc("x")) == "x.some!;[x<->u]");
  CHECK(print_process(enc("fail{x1,x2}")) ==
        "u.none! | x1.none! | x2.none!");
  CHECK(alpha_print(enc("check")) == "check");

  // the substituted-share clause cuts the sharing side against the bag side;
  // here with one shared variable and the empty bag
  ProcPtr expect = parse_process(
      "new x. ("
      "x.some!;x!(y1).(y1.some?();y1.close?;0 | "
      "x.some!;x.some?(u);x?(x1)."
      "x.some!;x!(y).(y.some?(u,x1);y.close?;x1.some!;[x1<->u] | x.none!))"
      " | x.some?();x?(y).(y.some!;y.close! | x.some?();x.none!))");
  CHECK(process_congruent(enc("x1[x1<-x]<<1/x>>"), expect));
}

TEST_CASE("worked example: adequate resources, eleven steps") {
  // N = x1 and M = \w. w1[w1<-w]; N[x1<-x] <<[M]/x>>  ->  N <|M/x1|>
  SharExpr source = parse_shar_expr("x1[x1<-x]<<[\\w. w1[w1<-w]]/x>>");
  SharExpr target_sharing = parse_shar_expr("x1 <|\\w. w1[w1<-w]/x1|>");
  auto red = shar_step_all(source);
  REQUIRE(red.size() == 1);
  CHECK(red[0].tag == SRuleTag::ExSub);
  CHECK(shar_expr_equal(red[0].result, target_sharing));

  ProcPtr p = encode_process(source, Name{"u"});
  ProcPtr q = encode_process(target_sharing, Name{"u"});
  auto r = pi_reaches(p, q, 16);
  REQUIRE(r.reached);
  CHECK(r.steps == 11);
}

TEST_CASE("worked example: excess of resources, four steps") {
  SharExpr source = parse_shar_expr(
      "(\\z. z1[z1<-z])[<-x]<<[\\w. w1[w1<-w]]/x>>");
  ProcPtr p = encode_process(source, Name{"u"});
  ProcPtr q = encode_process(parse_shar_expr("fail{}"), Name{"u"});
  auto r = pi_reaches(p, q, 16);
  REQUIRE(r.reached);
  CHECK(r.steps == 4);
}

TEST_CASE("worked example: lack of resources, six steps") {
  SharExpr source = parse_shar_expr("x1[x1<-x]<<1/x>>");
  ProcPtr p = encode_process(source, Name{"u"});
  ProcPtr q = encode_process(parse_shar_expr("fail{}"), Name{"u"});
  auto r = pi_reaches(p, q, 16);
  REQUIRE(r.reached);
  CHECK(r.steps == 6);
}

TEST_CASE("type translations") {
  CHECK(print_session_type(encode_strict_type(parse_strict_type("unit"))) ==
        "&one");
  // omega at parameter zero
  SPtr w0 = encode_multiset_type(MultisetType{nullptr, 0},
                                 TypeParams{mk_unit(), 0});
  CHECK(print_session_type(w0) == "+(&one @ +&one)");
  CHECK(session_equal(
      w0, dual(st_with(st_tensor(st_plus(st_bot()),
                                 st_with(st_plus(st_bot())))))));
  // one unfolding of a singleton multiset
  SPtr s1 = encode_multiset_type(MultisetType{mk_unit(), 1},
                                 TypeParams{mk_unit(), 0});
  CHECK(session_equal(
      s1, st_plus(st_parr(
              st_with(st_one()),
              st_plus(st_with(st_tensor(st_plus(st_with(st_one())), w0)))))));
}

TEST_CASE("parameter choice aligns multiset translations") {
  StrictPtr sigma = parse_strict_type("unit^1 -> unit");
  auto [p31, p13] = choose_params(3, 1, sigma);
  CHECK(p31.i == 0);
  CHECK(p13.i == 2);
  CHECK(print_strict(p13.sigma) == print_strict(sigma));
  auto [pa, pb] = choose_params(2, 2, sigma);
  CHECK(pa.i == 0);
  CHECK(pb.i == 0);

  // translations coincide as trees under the chosen parameters
  for (auto [j, k] : std::vector<std::pair<int, int>>{
           {3, 1}, {1, 3}, {2, 2}, {2, 0}, {0, 2}, {1, 1}, {0, 0}}) {
    CAPTURE(j);
    CAPTURE(k);
    auto [pj, pk] = choose_params(j, k, sigma);
    SPtr tj = encode_multiset_type(MultisetType{sigma, j}, pj);
    SPtr tk = encode_multiset_type(MultisetType{sigma, k}, pk);
    CHECK(session_equal(tj, tk));
  }
}

TEST_CASE("typing environment translation") {
  TypingEnv e1 = encode_typing_env(parse_context("x:unit"));
  CHECK(print_session_type(e1[Name{"x"}]) ==
        print_session_type(st_with(dual(encode_strict_type(mk_unit())))));
  CHECK(encode_typing_env(parse_context("")).empty());
  TypingEnv e2 = encode_typing_env(parse_context("x:unit^2"));
  SPtr expect = dual(encode_multiset_type(MultisetType{mk_unit(), 2},
                                          TypeParams{mk_unit(), 0}));
  CHECK(session_equal(e2[Name{"x"}], expect));
}

TEST_CASE("type preservation for the process translation") {
  struct Case {
    std::string ctx, term, type;
  };
  for (auto& c : std::vector<Case>{
           {"x:unit", "x", "unit"},
           {"", "\\x. x1[x1<-x]", "unit^1 -> unit"},
           {"y:unit^1", "(\\x. x1[x1<-x]) [y1][y1<-y]", "unit"},
           {"", "fail{}", "unit"},
           {"y:unit", "fail{y}", "unit"},
           {"y:unit^2", "fail{y}", "unit"},
           {"m:unit", "x1 <|m/x1|>", "unit"},
           {"", "x1[x1<-x]<<1/x>>", "unit"},
           {"", "(\\z. z1[z1<-z])[<-x]<<[\\w. w1[w1<-w]]/x>>",
            "unit^1 -> unit"},
           {"", "(\\x. x1[x1<-x]) [fail{}[<-y]<<1/y>>]", "unit"},
       }) {
    CAPTURE(c.term);
    TypeContext ctx = parse_context(c.ctx);
    SharExpr e = parse_shar_expr(c.term);
    StrictPtr ty = parse_strict_type(c.type);
    SharingTypeInfo info;
    CheckResult wf = check_wellformed_sharing_info(ctx, e, ty, &info);
    REQUIRE(wf.ok);
    TypingEnv env = encode_typing_env(ctx);
    env[Name{"u"}] = encode_strict_type(ty);

    // unannotated translation, cut types synthesized
    auto plain = pi_typecheck(encode_process(e, Name{"u"}), env);
    CAPTURE(plain.reason);
    CHECK(plain.ok);

    // annotated translation, cut types from the parameter-choice rule
    auto annotated = pi_typecheck(encode_process(e, Name{"u"}, &info), env);
    CAPTURE(annotated.reason);
    CHECK(annotated.ok);
  }
}

TEST_CASE("operational completeness for the process translation") {
  for (std::string src :
       {"x1[x1<-x]<<[\\w. w1[w1<-w]]/x>>",
        "(\\x. x1[x1<-x]) [\\w. w1[w1<-w]]",
        "x1[x1<-x]<<1/x>>",
        "fail{} [\\w. w1[w1<-w]]",
        "x1 <|\\w. w1[w1<-w]/x1|>"}) {
    CAPTURE(src);
    SharExpr e = parse_shar_expr(src);
    for (auto& st : shar_step_all(e)) {
      ProcPtr p = encode_process(e, Name{"u"});
      ProcPtr q = encode_process(st.result, Name{"u"});
      auto r = pi_reaches(p, q, 64);
      CAPTURE(print_shar_expr(st.result));
      CHECK(r.reached);
    }
  }
}

TEST_CASE("success sensitivity through both translations") {
  for (std::string src :
       {"(\\x. x) [check]", "check", "fail{}", "(\\x. x) 1",
        "(\\x. check) [\\w. w]", "(\\x. x) [y] + (\\x. check) 1"}) {
    CAPTURE(src);
    Expr e = parse_expr(src);
    SuccessResult lam = has_success(e);
    SharExpr shar = encode_open(e);
    SuccessResult sh = shar_has_success(shar);
    CHECK(lam == sh);
    SuccessResult pi = pi_has_success(encode_process(shar, Name{"u"}), 512);
    CHECK(sh == pi);
  }
}
