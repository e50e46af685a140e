#include <doctest.h>

#include <functional>
#include <random>

#include "lampi/spi.hpp"
#include "lampi/spi_check.hpp"
#include "lampi/spi_reduce.hpp"

using namespace lampi;

TEST_CASE("duality") {
  CHECK(print_session_type(dual(st_one())) == "bot");
  CHECK(print_session_type(dual(parse_session_type("+(&one)"))) ==
        "&+bot");
  // involution on random types
  std::mt19937_64 rng(7);
  std::function<SPtr(int)> gen = [&](int depth) -> SPtr {
    int pick = int(rng() % (depth <= 0 ? 2 : 6));
    switch (pick) {
      case 0: return st_bot();
      case 1: return st_one();
      case 2: return st_tensor(gen(depth - 1), gen(depth - 1));
      case 3: return st_parr(gen(depth - 1), gen(depth - 1));
      case 4: return st_with(gen(depth - 1));
      default: return st_plus(gen(depth - 1));
    }
  };
  for (int i = 0; i < 200; i++) {
    SPtr t = gen(4);
    CHECK(session_equal(dual(dual(t)), t));
  }
}

TEST_CASE("process parse and print round trips") {
  for (std::string src :
       {"0", "x!(y).0", "x?(y).(a.close! | b.close!)", "[x<->y]",
        "x.close?;0", "x.some!;x.close!", "x.none!", "x.some?(w1,w2);0",
        "new x. ([x<->y] | x.close!)", "new x: &one. (x.none! | 0)",
        "check | 0", "a.close! (+) b.close!"}) {
    CAPTURE(src);
    ProcPtr p = parse_process(src);
    ProcPtr q = parse_process(print_process(p));
    CHECK(alpha_print(p) == alpha_print(q));
  }
}

TEST_CASE("structural congruence laws") {
  auto congruent = [](const std::string& a, const std::string& b) {
    return process_congruent(parse_process(a), parse_process(b));
  };
  CHECK(congruent("x.close! | 0", "x.close!"));
  CHECK(congruent("a.close! | b.close!", "b.close! | a.close!"));
  CHECK(congruent("(a.close! | b.close!) | c.close!",
                  "a.close! | (b.close! | c.close!)"));
  CHECK(congruent("[x<->y]", "[y<->x]"));
  CHECK(congruent("(new x. x.close!) | y.close!",
                  "new x. (x.close! | y.close!)"));
  CHECK(congruent("0 (+) 0", "0"));
  CHECK(congruent("a.close! (+) b.close!", "b.close! (+) a.close!"));
  CHECK(congruent("new x. new y. ([x<->a] | [y<->b])",
                  "new y. new x. ([x<->a] | [y<->b])"));
  CHECK(congruent("new x. (a.close?;0 | (x.close! (+) x.none!))",
                  "(new x. (a.close?;0 | x.close!)) (+) "
                  "(new x. (a.close?;0 | x.none!))"));
  CHECK(congruent("new q. p.some!;0", "new r. p.some!;0"));
  // non-laws
  CHECK(!congruent("a.close! (+) a.close!", "a.close!"));
  CHECK(!congruent("x!(y).0", "x?(y).0"));
}

TEST_CASE("reduction axioms") {
  auto s1 = pi_step_all(parse_process("x!(y).y.close! | x?(z).z.close?;0"));
  REQUIRE(s1.size() == 1);
  CHECK(s1[0].tag == PiRuleTag::Comm);
  CHECK(process_congruent(s1[0].result,
                          parse_process("new y. (y.close! | y.close?;0)")));

  auto s2 = pi_step_all(parse_process("new x. ([x<->y] | x.close!)"));
  REQUIRE(s2.size() == 1);
  CHECK(s2[0].tag == PiRuleTag::Forw);
  CHECK(process_congruent(s2[0].result, parse_process("y.close!")));

  auto s3 = pi_step_all(parse_process("x.close! | x.close?;q.none!"));
  REQUIRE(s3.size() == 1);
  CHECK(s3[0].tag == PiRuleTag::Close);
  CHECK(process_congruent(s3[0].result, parse_process("q.none!")));

  auto s4 = pi_step_all(
      parse_process("x.some!;x.close! | x.some?(w);x.close?;w.none!"));
  REQUIRE(s4.size() == 1);
  CHECK(s4[0].tag == PiRuleTag::Some);

  auto s5 = pi_step_all(parse_process("x.none! | x.some?(w1,w2);0"));
  REQUIRE(s5.size() == 1);
  CHECK(s5[0].tag == PiRuleTag::None);
  CHECK(process_congruent(s5[0].result,
                          parse_process("w1.none! | w2.none!")));
}

TEST_CASE("confluent choice example") {
  // a dependent session either confirms or fails; both alternatives remain
  ProcPtr r = parse_process(
      "new x. (x.some?(y1,y2);y1?(z).y2?(w).0 | "
      "(x.some!;p.close! (+) x.none!))");
  auto steps = pi_step_all(r);
  REQUIRE(steps.size() == 2);
  ProcPtr a = steps[0].result, b = steps[1].result;
  REQUIRE(!process_congruent(a, b));
  bool joined = false;
  for (auto& sa : pi_step_all(a))
    for (auto& sb : pi_step_all(b))
      if (process_congruent(sa.result, sb.result)) joined = true;
  CHECK(joined);

  auto norm = pi_normalize(r);
  REQUIRE(norm.ok);
  CHECK(process_congruent(
      norm.result,
      parse_process(
          "(y1?(z).y2?(w).0 | p.close!) (+) (y1.none! | y2.none!)")));
}

TEST_CASE("pi_reaches") {
  ProcPtr p = parse_process("x!(y).y.close! | x?(z).z.close?;q.some!;0");
  CHECK(pi_reaches(p, p, 4).reached);
  auto r = pi_reaches(p, parse_process("q.some!;0"), 8);
  CHECK(r.reached);
  CHECK(r.steps == 2);
  CHECK(!pi_reaches(p, parse_process("q.none!"), 8).reached);
}

TEST_CASE("pi success") {
  CHECK(pi_has_success(parse_process("check | x.close!"), 0) ==
        SuccessResult::Yes);
  CHECK(pi_has_success(parse_process("x.some!;check"), 16) ==
        SuccessResult::No);
  CHECK(pi_has_success(parse_process(
            "x.some!;check | x.some?();x.none!"), 16) == SuccessResult::Yes);
}

TEST_CASE("session typechecking axioms") {
  CHECK(pi_typecheck(parse_process("x.close!"), parse_typing_env("x:one")).ok);
  CHECK(pi_typecheck(parse_process("[x<->u]"),
                     parse_typing_env("x:&one, u:+bot"))
            .ok);
  CHECK(pi_typecheck(parse_process("x.none!"), parse_typing_env("x:&one")).ok);
  CHECK(pi_typecheck(parse_process("x.none!"),
                     parse_typing_env("x:&(one * bot)"))
            .ok);
  CHECK(!pi_typecheck(parse_process("x.close!"), parse_typing_env("x:bot")).ok);
  CHECK(!pi_typecheck(parse_process("x.close!"),
                      parse_typing_env("x:one, y:one"))
             .ok);

  // communication: x carries one then behaves bot
  CHECK(pi_typecheck(parse_process("x!(y).(y.close! | x.close?;0)"),
                     parse_typing_env("x:(one * bot)"))
            .ok);
  CHECK(pi_typecheck(parse_process("x?(y).y.close?;x.close!"),
                     parse_typing_env("x:(bot @ one)"))
            .ok);
  // cut
  CHECK(pi_typecheck(
            parse_process("new x. (x!(y).(y.close! | x.close?;0) | "
                          "x?(y).y.close?;x.close!)"),
            parse_typing_env(""))
            .ok);
  // annotated cut
  CHECK(pi_typecheck(parse_process("new x: one. (x.close! | x.close?;0)"),
                     parse_typing_env(""))
            .ok);
  CHECK(!pi_typecheck(parse_process("new x: bot. (x.close! | x.close!)"),
                      parse_typing_env(""))
             .ok);
  // non-deterministic choice needs &-typed contexts
  CHECK(pi_typecheck(parse_process("x.none! (+) x.some!;x.close!"),
                     parse_typing_env("x:&one"))
            .ok);
  CHECK(!pi_typecheck(parse_process("x.close! (+) x.close!"),
                      parse_typing_env("x:one"))
             .ok);
  // dependency must be non-deterministic
  CHECK(pi_typecheck(parse_process("x.some?(w);(x.close?;0 | w.none!)"),
                     parse_typing_env("x:+bot, w:&one"))
            .ok);
}

TEST_CASE("type preservation under reduction") {
  std::vector<std::pair<std::string, std::string>> cases = {
      {"new x. (x.some!;x.close! | x.some?(w);x.close?;w.none!)", "w:&one"},
      {"new x. (x!(y).(y.close! | x.close?;w.none!) | "
       "x?(y).y.close?;x.close!)",
       "w:&one"},
      {"new x. ([x<->y] | x.some?(w);(x.close?;0 | w.none!))",
       "y:+bot, w:&one"},
      {"new x. (x.none! | x.some?(w);x.close?;w.none!)", "w:&one"},
  };
  for (auto& [src, envs] : cases) {
    CAPTURE(src);
    ProcPtr p = parse_process(src);
    TypingEnv env = parse_typing_env(envs);
    REQUIRE(pi_typecheck(p, env).ok);
    // every reduct re-checks with the same context
    std::vector<ProcPtr> frontier{p};
    for (int d = 0; d < 4 && !frontier.empty(); d++) {
      std::vector<ProcPtr> next;
      for (auto& q : frontier) {
        for (auto& st : pi_step_all(q)) {
          auto r = pi_typecheck(st.result, env);
          CAPTURE(print_process(st.result));
          CHECK(r.ok);
          next.push_back(st.result);
        }
      }
      frontier = std::move(next);
    }
  }
}
