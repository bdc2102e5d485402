#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "drlref/contexts.hpp"
#include "drlref/parser.hpp"
#include "drlref/printer.hpp"

using namespace drlref;

TEST_CASE("split polarity examples") {
  Expression boxed = parse("[a := 1; b := 2]x <= 1", ExprKind::Formula);
  auto [c1, s1] = split_at(boxed, {0, 0});
  CHECK(c1.polarity == Polarity::Antitone);
  CHECK(pretty(s1) == "a := 1");

  Expression notnot = parse("!!x <= 1", ExprKind::Formula);
  auto [c2, s2] = split_at(notnot, {0, 0});
  CHECK(c2.polarity == Polarity::Monotone);

  Expression ref = parse("{a := 1} <= {b := 2}", ExprKind::Formula);
  CHECK(split_at(ref, {0}).first.polarity == Polarity::Antitone);
  CHECK(split_at(ref, {1}).first.polarity == Polarity::Monotone);

  Expression equiv = parse("x <= 1 <-> y <= 1", ExprKind::Formula);
  CHECK(split_at(equiv, {0}).first.polarity == Polarity::None);

  Expression progeq = parse("{a := 1} == {b := 2}", ExprKind::Formula);
  CHECK(split_at(progeq, {0}).first.polarity == Polarity::None);
}

TEST_CASE("plug") {
  Expression boxed = parse("[a := 1; b := 2]x <= 1", ExprKind::Formula);
  auto [c, sub] = split_at(boxed, {0, 0});
  CHECK(equal(plug(c, sub), boxed));
  Expression other = parse("a := 7", ExprKind::Program);
  CHECK(pretty(plug(c, other)) == "[a := 7; b := 2]x <= 1");

  Expression test = parse("?true", ExprKind::Program);
  auto [ct, st] = split_at(test, {0});
  CHECK(pretty(plug(ct, parse("x < 5", ExprKind::Formula))) == "?x < 5");

  CHECK_THROWS_AS(plug(c, parse("x < 5", ExprKind::Formula)), KindMismatch);
}

TEST_CASE("invalid paths") {
  Expression e = parse("x := y + 1", ExprKind::Program);
  CHECK_THROWS_AS(split_at(e, {0}), InvalidPath);  // term position
  CHECK_THROWS_AS(split_at(e, {3}), InvalidPath);
}

TEST_CASE("projective context clauses") {
  ProgramPtr alpha = parse_program("z := 3");

  // b; (.)  ->  [b](.)
  Expression c1root = parse("b := 2; q := 1", ExprKind::Program);
  auto [c1, s1] = split_at(c1root, {1});
  FormulaContext f1 = projective_context(c1, alpha);
  REQUIRE(f1.boxes.size() == 1);
  CHECK(pretty(f1.boxes[0]) == "b := 2");

  // ((.) ++ d); e  ->  (.)
  Expression c2root = parse("(a := 1 ++ d := 4); e := 5", ExprKind::Program);
  auto [c2, s2] = split_at(c2root, {0, 0});
  CHECK(projective_context(c2, alpha).boxes.empty());

  // {b; (.)}*  ->  [{b; alpha}*][b](.)
  Expression c3root = parse("{b := 2; a := 1}*", ExprKind::Program);
  auto [c3, s3] = split_at(c3root, {0, 1});
  FormulaContext f3 = projective_context(c3, alpha);
  REQUIRE(f3.boxes.size() == 2);
  CHECK(pretty(f3.boxes[0]) == "{b := 2; z := 3}*");
  CHECK(pretty(f3.boxes[1]) == "b := 2");
  CHECK(pretty(f3.apply(parse_formula("x <= 1"))) ==
        "[{b := 2; z := 3}*][b := 2]x <= 1");

  // formula positions are not program contexts
  Expression c4root = parse("?x <= 1", ExprKind::Program);
  auto [c4, s4] = split_at(c4root, {0});
  CHECK_THROWS_AS(projective_context(c4, alpha), UnsupportedShape);
}

TEST_CASE("enumerate counts match the constructor grammar") {
  CHECK(enumerate_contexts(0, ExprKind::Program).size() == 1);
  CHECK(enumerate_contexts(1, ExprKind::Program).size() == 6);
  CHECK(enumerate_contexts(2, ExprKind::Program).size() == 31);
  CHECK(enumerate_contexts(3, ExprKind::Program).size() == 156);
  // 11 formula constructors: sum of 11^k for k <= depth
  CHECK(enumerate_contexts(1, ExprKind::Formula).size() == 12);
  CHECK(enumerate_contexts(2, ExprKind::Formula).size() == 133);
}

TEST_CASE("split/plug inverse over enumerated contexts") {
  for (auto kind : {ExprKind::Program, ExprKind::Formula}) {
    for (const auto& c : enumerate_contexts(2, kind)) {
      Expression sub = subexpr_at(c.root, c.path);
      CHECK(equal(plug(c, sub), c.root));
    }
  }
}

TEST_CASE("polarity equals parity of flip positions") {
  // crossing Not, a box program position, or a refinement left side flips;
  // an equivalence or program equivalence yields no polarity
  Expression e = parse(
      "!([(?x <= 1; a := 2) ++ b := 3]y <= 0 -> {c := 1} <= {d := 2})",
      ExprKind::Formula);
  struct CaseDef {
    Path path;
    Polarity expected;
  };
  // path legend: 0=under Not, then Imply(0/1), Box(0 prog,1 fml), ...
  std::vector<CaseDef> cases = {
      {{0}, Polarity::Antitone},                 // under !
      {{0, 0}, Polarity::Monotone},              // ! then -> left
      {{0, 0, 1}, Polarity::Monotone},           // box postcondition
      {{0, 0, 0}, Polarity::Antitone},           // box program
      {{0, 0, 0, 0, 0}, Polarity::Antitone},     // seq inside box program
      {{0, 0, 0, 0, 0, 0}, Polarity::Antitone},  // test formula inside
      {{0, 1}, Polarity::Antitone},              // ! then -> right
      {{0, 1, 0}, Polarity::Monotone},           // refines left: 3 flips? no:
                                                 // !, ->右(0), left(1): 2
  };
  for (const auto& cs : cases) {
    auto [c, sub] = split_at(e, cs.path);
    CHECK(c.polarity == cs.expected);
  }
}

TEST_CASE("random split/plug round trips") {
  std::mt19937_64 rng(7);
  Expression e = parse(
      "[{x := 1; {x' = v & x <= 5}}*](x <= 5 & [y := 2]y >= 0)",
      ExprKind::Formula);
  // walk all valid non-term paths
  std::vector<Path> stack = {{}};
  while (!stack.empty()) {
    Path p = stack.back();
    stack.pop_back();
    Expression sub = subexpr_at(e, p);
    if (sub.kind != ExprKind::Term) {
      auto [c, s] = split_at(e, p);
      CHECK(equal(plug(c, s), e));
    }
    for (size_t i = 0; i < arity(sub); ++i) {
      Path q = p;
      q.push_back(i);
      stack.push_back(q);
    }
  }
}

TEST_CASE("path strings") {
  CHECK(path_str({0, 1, 0}) == "0.1.0");
  CHECK(parse_path("0.1.0") == Path{0, 1, 0});
  CHECK(parse_path("") == Path{});
  CHECK_THROWS_AS(parse_path("0.x"), InvalidPath);
}
