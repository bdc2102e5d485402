#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "drlref/contexts.hpp"
#include "drlref/fuzz.hpp"
#include "drlref/gen.hpp"
#include "drlref/oracle.hpp"
#include "drlref/parser.hpp"
#include "drlref/printer.hpp"

using namespace drlref;

namespace {

State st(std::initializer_list<std::pair<const char*, double>> vals) {
  State s;
  for (auto& [n, v] : vals) s[Variable(n)] = v;
  return s;
}

}  // namespace

TEST_CASE("reach basics") {
  OracleConfig cfg;
  CHECK(reach(parse_program("?false"), st({{"x", 1}}), cfg).states.empty());

  auto r = reach(parse_program("x := 1 ++ x := 2"), st({{"x", 0}}), cfg);
  REQUIRE(r.states.size() == 2);
  CHECK(r.states[0].state.at(Variable("x")) == 1);
  CHECK(r.states[1].state.at(Variable("x")) == 2);
}

TEST_CASE("euler trajectories stop at the domain boundary") {
  OracleConfig cfg;
  ProgramPtr ode = parse_program("{x' = 1 & x <= 5}");
  auto r = reach(ode, st({{"x", 4.9}, {"x'", 0}}), cfg);
  REQUIRE(!r.states.empty());
  bool near5 = false;
  for (const auto& s : r.states) {
    double x = s.state.at(Variable("x"));
    CHECK(x <= 5.0 + 0.011);
    if (std::fabs(x - 5.0) < 0.02) near5 = true;
  }
  CHECK(near5);
  // zero duration is always included
  bool zero = false;
  for (const auto& s : r.states)
    if (std::fabs(s.state.at(Variable("x")) - 4.9) < 1e-9) zero = true;
  CHECK(zero);
  // the prime tracks the right-hand side
  CHECK(r.states[0].state.at(Variable("x", true)) == 1.0);
}

TEST_CASE("refinement verdicts") {
  OracleConfig cfg;
  CHECK(check_refinement(parse_program("?x < 0"), parse_program("?true"), cfg)
            .pass);
  Verdict v = check_refinement(parse_program("x := 1 ++ x := 2"),
                               parse_program("x := 1"), cfg);
  CHECK(!v.pass);
  REQUIRE(v.counterexample.has_value());
  CHECK(v.counterexample->output.at(Variable("x")) == 2);

  // dropped freshness side condition of the swap axiom: the scrambled
  // output set is not included in the deterministic one
  Verdict w = check_refinement(parse_program("x := 1; x := *"),
                               parse_program("x := *; x := 1"), cfg);
  CHECK(!w.pass);
  REQUIRE(w.counterexample.has_value());
}

TEST_CASE("counterexample traces replay") {
  OracleConfig cfg;
  Verdict v = check_refinement(parse_program("x := 1 ++ x := 2"),
                               parse_program("x := 1"), cfg);
  REQUIRE(v.counterexample.has_value());
  // re-run the left program and find the reported output among its states
  auto r = reach(parse_program("x := 1 ++ x := 2"), v.counterexample->initial,
                 cfg);
  bool found = false;
  for (const auto& s : r.states)
    if (s.state.at(Variable("x")) == v.counterexample->output.at(Variable("x")))
      found = true;
  CHECK(found);
}

TEST_CASE("check_formula three-valued semantics") {
  OracleConfig cfg;
  CHECK(check_formula(parse_formula("[?false]false"), st({{"x", 0}}), cfg) ==
        TriBool::True);
  CHECK(check_formula(parse_formula("{?x < 5} <= {?x < 9}"), st({{"x", 7}}),
                      cfg) == TriBool::True);
  CHECK(check_formula(parse_formula("\\forall x x <= 0"), st({}), cfg) ==
        TriBool::False);
  // a universally true statement over the grid stays unknown
  CHECK(check_formula(parse_formula("\\forall x x <= 9"), st({}), cfg) ==
        TriBool::Unknown);
  // grid-positive existentials are decided
  CHECK(check_formula(parse_formula("\\exists x x = 1"), st({}), cfg) ==
        TriBool::True);
}

TEST_CASE("determinism under a fixed seed") {
  OracleConfig cfg;
  cfg.seed = 99;
  FormulaPtr f = parse_formula("{x := *; ?x < 1} <= {x := *}");
  TriBool a = check_formula(f, st({{"x", 0.5}}), cfg);
  TriBool b = check_formula(f, st({{"x", 0.5}}), cfg);
  CHECK(a == b);
  Verdict v1 = check_refinement(parse_program("x := 1 ++ x := 2"),
                                parse_program("x := 1"), cfg);
  Verdict v2 = check_refinement(parse_program("x := 1 ++ x := 2"),
                                parse_program("x := 1"), cfg);
  REQUIRE(v1.counterexample.has_value());
  REQUIRE(v2.counterexample.has_value());
  CHECK(v1.counterexample->initial == v2.counterexample->initial);
}

TEST_CASE("oracle-level reflexivity and transitivity on samples") {
  OracleConfig cfg;
  cfg.samples = 16;
  ExprGen g(7);
  for (int i = 0; i < 10; ++i) {
    ProgramPtr a = g.program(2);
    CHECK(check_refinement(a, a, cfg).pass);
  }
}

TEST_CASE("monotone context preservation on samples") {
  OracleConfig cfg;
  cfg.samples = 8;
  // a <= a ++ b globally; check C(a) <= C(a ++ b) for shallow contexts
  ProgramPtr a = parse_program("x := 1");
  ProgramPtr ab = parse_program("x := 1 ++ y := 2");
  for (const auto& ctx : enumerate_contexts(2, ExprKind::Program)) {
    ProgramPtr ca = plug(ctx, Expression(a)).program;
    ProgramPtr cab = plug(ctx, Expression(ab)).program;
    Verdict v = check_refinement(ca, cab, cfg);
    CHECK(v.pass);
  }
}

TEST_CASE("fuzzing sound axioms finds no counterexample") {
  OracleConfig cfg;
  cfg.samples = 8;
  for (const char* ax : {"test", "boxref", "seqdistr", "composeb", "update"}) {
    FuzzReport rep = fuzz_axiom(ax, 25, cfg);
    if (rep.failures) MESSAGE(ax, ": ", rep.counterexamples[0]);
    CHECK(rep.failures == 0);
    CHECK(rep.passed > 0);
  }
}

TEST_CASE("every documented mutant is refuted") {
  OracleConfig cfg;
  cfg.samples = 32;
  for (const auto& name : mutant_names()) {
    MutantReport rep = fuzz_mutant(name, 10, cfg);
    if (!rep.found_counterexample) MESSAGE("mutant not refuted: ", name);
    CHECK(rep.found_counterexample);
  }
}

TEST_CASE("the loop counterexample guard from the fresh theorem") {
  // {c := c+1; x := *}*; x := *  vs  {c := c+1; x := *}*
  OracleConfig cfg;
  cfg.samples = 16;
  Verdict v = check_refinement(
      parse_program("{c := c + 1; x := *}*; x := *"),
      parse_program("{c := c + 1; x := *}*"), cfg);
  CHECK(!v.pass);
}
