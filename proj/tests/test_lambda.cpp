#include <doctest.h>

#include "lampi/lambda.hpp"
#include "lampi/lambda_reduce.hpp"

using namespace lampi;

namespace {
Bag arg_bag(const std::string& applied) {
  return std::get<TApp>(parse_term(applied)->node).arg;
}
}  // namespace

TEST_CASE("free variables, sets and multisets") {
  CHECK(free_vars_set(parse_term("fail{x1,x2}")) == VarSet{{"x1"}, {"x2"}});
  CHECK(free_vars_set(parse_term("\\x. x")).empty());
  CHECK(free_vars_set(parse_term("(\\x. x) [y]*[z]")) ==
        VarSet{{"y"}, {"z"}});

  CHECK(free_vars_multiset(parse_term("y")).count({"y"}) == 1);
  auto m1 = free_vars_multiset(arg_bag("q [y]*[y]"));
  CHECK(m1.count({"y"}) == 2);
  CHECK(free_vars_multiset(parse_term("fail{y,y,z}")).count({"y"}) == 2);
  auto m2 = free_vars_multiset(parse_term("x [x]"));
  CHECK(m2.count({"x"}) == 2);
}

TEST_CASE("occurrence counting") {
  CHECK(occurrence_count({"x"}, parse_term("x [x [y]]")) == 2);
  CHECK(occurrence_count({"x"}, parse_term("\\x. x")) == 0);
  CHECK(occurrence_count({"y"}, parse_term("(\\x. x) ([y]*[z])")) == 1);
}

TEST_CASE("head") {
  auto h1 = head(parse_term("x <<[y]/x>>"));
  CHECK(h1.kind == HeadResult::HVar);
  CHECK(h1.var == Var{"x"});

  auto h2 = head(parse_term("fail{} <<1/x>>"));
  CHECK(h2.kind == HeadResult::HFail);
  CHECK(h2.fail_vars.empty());

  auto h3 = head(parse_term("y <<[a]*[b]/x>>"));
  CHECK(h3.kind == HeadResult::HFail);

  CHECK(head(parse_term("check")).kind == HeadResult::HCheck);
}

TEST_CASE("linear head substitution") {
  auto n = parse_term("\\w. w");
  CHECK(print_term(linear_head_subst(parse_term("x"), n, {"x"})) ==
        "\\w. w");
  CHECK(print_term(linear_head_subst(parse_term("x [z]"), n, {"x"})) ==
        "(\\w. w) [z]");
  CHECK(print_term(linear_head_subst(parse_term("(x [z]) <<1/y>>"), n,
                                     {"x"})) == "(\\w. w) [z] <<1/y>>");
  CHECK_THROWS_AS(linear_head_subst(parse_term("y"), n, {"x"}), HeadMismatch);
}

TEST_CASE("bag utilities") {
  CHECK(bag_size(Bag{}) == 0);
  Bag b = arg_bag("x [y]*[z]");
  CHECK(bag_size(b) == 2);
  auto [m, rest] = bag_remove(b, 0);
  CHECK(print_term(m) == "y");
  CHECK(print_bag(rest) == "[z]");
  CHECK_THROWS_AS(bag_remove(b, 5), IndexOutOfRange);

  CHECK(bag_permutations(arg_bag("x [y]")).size() == 1);
  CHECK(bag_permutations(b).size() == 2);
  Bag dup = arg_bag("x [y]*[y]");
  CHECK(bag_permutations(dup).size() == 1);
  CHECK(bag_perm_seq(dup).size() == 2);
}

TEST_CASE("parse and print round trips") {
  auto t = parse_expr("(\\x. x) [y]");
  auto& app = std::get<TApp>(t.sum[0]->node);
  CHECK(std::holds_alternative<TAbs>(app.fun->node));
  CHECK(app.arg.size() == 1);

  auto f = parse_term("fail{y,z}");
  CHECK(std::get<TFail>(f->node).vars.size() == 2);

  std::string s = "x <<[y]*[z]/x>> + y";
  CHECK(print_expr(parse_expr(s)) == s);

  for (std::string src :
       {"\\x. x [x [y]]", "(\\x. x) 1", "fail{y,y,z} <<1/x>>",
        "x <<[\\y. y]/x>> [z]", "check", "(\\x. check) [fail{}]"}) {
    CHECK(expr_equal(parse_expr(print_expr(parse_expr(src))),
                     parse_expr(src)));
  }
}

TEST_CASE("expression equality is multiset equality") {
  CHECK(expr_equal(parse_expr("x + y"), parse_expr("y + x")));
  CHECK(!expr_equal(parse_expr("x + x"), parse_expr("x")));
  CHECK(term_equal(parse_term("z [a]*[b]"), parse_term("z [b]*[a]")));
  CHECK(expr_equal(parse_expr("\\x. x"), parse_expr("\\y. y")));
}
