#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "drlref/parser.hpp"
#include "drlref/printer.hpp"
#include "drlref/statics.hpp"

using namespace drlref;

TEST_CASE("parse basic program shapes") {
  ProgramPtr p = parse_program("x := x + 1; ?x <= 5");
  REQUIRE(p->kind == Program::Kind::Seq);
  CHECK(p->p1->kind == Program::Kind::Assign);
  CHECK(p->p2->kind == Program::Kind::Test);

  ProgramPtr ode = parse_program("{x' = v, v' = a & x <= e}");
  REQUIRE(ode->kind == Program::Kind::ODE);
  REQUIRE(ode->odes.size() == 2);
  CHECK(ode->odes[0].var == Variable("x"));
  CHECK(ode->odes[1].var == Variable("v"));
  CHECK(ode->fml->kind == Formula::Kind::Cmp);

  FormulaPtr ref = parse_formula("{x := 1} <= {x := 1 ++ x := 2}");
  CHECK(ref->kind == Formula::Kind::Refines);
}

TEST_CASE("precedence: ; binds tighter than ++") {
  ProgramPtr p = parse_program("a := 1; b := 2 ++ c := 3; d := 4");
  REQUIRE(p->kind == Program::Kind::Choice);
  CHECK(p->p1->kind == Program::Kind::Seq);
  CHECK(p->p2->kind == Program::Kind::Seq);
}

TEST_CASE("pretty prints fixed surface syntax") {
  CHECK(pretty(parse_program("?true")) == "?true");
  ProgramPtr p = Program::mk_star(
      Program::mk_choice(parse_program("a := 1"), parse_program("b := 2")));
  CHECK(pretty(p) == "{a := 1 ++ b := 2}*");
}

TEST_CASE("parse errors carry positions") {
  try {
    parse_program("x := ");
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(e.line == 1);
    CHECK(e.col >= 5);
  }
}

TEST_CASE("kind mismatch is reported as KindError") {
  CHECK_THROWS_AS(parse("x + 1", ExprKind::Formula), KindError);
  CHECK_THROWS_AS(parse("?x <= 1", ExprKind::Term), KindError);
  CHECK_THROWS_AS(parse("x <=", ExprKind::Formula), SyntaxError);
}

TEST_CASE("primed variables are first class") {
  ProgramPtr p = parse_program("x' := *");
  CHECK(p->kind == Program::Kind::Random);
  CHECK(p->var.primed);
  TermPtr t = parse_term("(x)'");
  REQUIRE(t->kind == Term::Kind::Var);
  CHECK(t->var == Variable("x", true));
  TermPtr d = parse_term("(x + y)'");
  CHECK(d->kind == Term::Kind::Differential);
}

TEST_CASE("free variables") {
  CHECK(free_vars(parse_program("?x < 5")) == VarSet{Variable("x")});
  CHECK(free_vars(parse_program("x := *; ?x < 5")) == VarSet{});
  CHECK(free_vars(parse_program("{x' = v & true}")) ==
        VarSet{Variable("x"), Variable("v")});
  // refinement compares outputs, so written variables are significant
  CHECK(free_vars(parse_formula("{x := 1} <= {?true}"))
            .count(Variable("x")) == 1);
}

TEST_CASE("bound variables") {
  CHECK(bound_vars(parse_program("x := 1 ++ ?true")) == VarSet{Variable("x")});
  CHECK(bound_vars(parse_program("{x' = v & true}")) ==
        (VarSet{Variable("x"), Variable("x", true)}));
  CHECK(bound_vars(parse_program("?x < 5")) == VarSet{});
}

TEST_CASE("freshness counts every syntactic occurrence") {
  CHECK(is_fresh(Variable("t"), parse_program("{x' = v & x <= e}")));
  CHECK(!is_fresh(Variable("x"), parse_program("x := *")));
  CHECK(!is_fresh(Variable("x", true), parse_program("{x' = 1 & true}")));
  CHECK(!is_fresh(Variable("x"), parse_program("{x' = 1 & true}")));
  // x fresh does not imply x' fresh and vice versa
  CHECK(is_fresh(Variable("x"), parse_formula("x' <= 1")));
  CHECK(is_fresh(Variable("x", true), parse_formula("x <= 1")));
}

TEST_CASE("alpha renaming") {
  Expression e = parse("\\forall x x <= y", ExprKind::Formula);
  Expression r = alpha_rename(e, Variable("x"), Variable("z"));
  CHECK(pretty(r) == "\\forall z z <= y");

  Expression t = parse("?x <= 1", ExprKind::Program);
  Expression rt = alpha_rename(t, Variable("x"), Variable("z"));
  CHECK(pretty(rt) == "?x <= 1");  // x is free here, not bound

  CHECK_THROWS_AS(
      alpha_rename(parse("\\forall x x <= y", ExprKind::Formula),
                   Variable("x"), Variable("y")),
      NotFresh);
}

TEST_CASE("substitution respects program binding") {
  // x is must-bound before the test, so the occurrence is not free
  FormulaPtr f = parse_formula("[x := *; ?x < 5]x < 5");
  FormulaPtr g = subst(f, Variable("x"), parse_term("y + 1"));
  CHECK(pretty(g) == pretty(f));

  FormulaPtr h = parse_formula("x < 5 & [y := 1]x < y");
  FormulaPtr h2 = subst(h, Variable("x"), parse_term("2"));
  CHECK(pretty(h2) == "2 < 5 & [y := 1]2 < y");

  // capture: replacement mentions a variable bound by the modality
  CHECK_THROWS_AS(subst(parse_formula("[y := 1]x < y"), Variable("x"),
                        parse_term("y + 1")),
                  SubstClash);
  // may-bound occurrences are rejected
  CHECK_THROWS_AS(subst(parse_formula("[y := 1 ++ x := 1]x < y"),
                        Variable("x"), parse_term("2")),
                  SubstClash);
}

namespace {

// Random AST generator for the round-trip property.
struct Gen {
  std::mt19937_64 rng;
  explicit Gen(uint64_t seed) : rng(seed) {}

  size_t pick(size_t n) { return std::uniform_int_distribution<size_t>(0, n - 1)(rng); }

  Variable var() {
    static const char* names[] = {"x", "y", "z", "v", "a"};
    return Variable(names[pick(5)], pick(4) == 0);
  }

  TermPtr term(int depth) {
    if (depth <= 0) {
      switch (pick(3)) {
        case 0: return Term::mk_var(var());
        default:
          return Term::mk_int(static_cast<long long>(pick(9)) - 4);
      }
    }
    switch (pick(5)) {
      case 0: return Term::mk_plus(term(depth - 1), term(depth - 1));
      case 1: return Term::mk_minus(term(depth - 1), term(depth - 1));
      case 2: return Term::mk_times(term(depth - 1), term(depth - 1));
      case 3: {
        // differential of a composite; variables collapse to primes
        return Term::mk_differential(
            Term::mk_plus(term(depth - 1), term(depth - 1)));
      }
      default: return term(0);
    }
  }

  FormulaPtr fml(int depth) {
    if (depth <= 0) {
      switch (pick(4)) {
        case 0: return Formula::mk_true();
        case 1: return Formula::mk_false();
        default:
          return Formula::mk_cmp(static_cast<CmpOp>(pick(5)), term(1),
                                 term(1));
      }
    }
    switch (pick(10)) {
      case 0: return Formula::mk_not(fml(depth - 1));
      case 1: return Formula::mk_and(fml(depth - 1), fml(depth - 1));
      case 2: return Formula::mk_or(fml(depth - 1), fml(depth - 1));
      case 3: return Formula::mk_imply(fml(depth - 1), fml(depth - 1));
      case 4: return Formula::mk_equiv(fml(depth - 1), fml(depth - 1));
      case 5: return Formula::mk_forall(var(), fml(depth - 1));
      case 6: return Formula::mk_exists(var(), fml(depth - 1));
      case 7: return Formula::mk_box(prog(depth - 1), fml(depth - 1));
      case 8: return Formula::mk_diamond(prog(depth - 1), fml(depth - 1));
      default:
        return pick(2) == 0
                   ? Formula::mk_refines(prog(depth - 1), prog(depth - 1))
                   : Formula::mk_progeq(prog(depth - 1), prog(depth - 1));
    }
  }

  ProgramPtr prog(int depth) {
    if (depth <= 0) {
      switch (pick(3)) {
        case 0: return Program::mk_test(fml(0));
        case 1: return Program::mk_assign(var(), term(1));
        default: return Program::mk_random(var());
      }
    }
    switch (pick(5)) {
      case 0: return Program::mk_choice(prog(depth - 1), prog(depth - 1));
      case 1: return Program::mk_seq(prog(depth - 1), prog(depth - 1));
      case 2: return Program::mk_star(prog(depth - 1));
      case 3: {
        std::vector<OdeEquation> eqs;
        eqs.push_back(OdeEquation{Variable("x"), term(1)});
        if (pick(2)) eqs.push_back(OdeEquation{Variable("v"), term(1)});
        return Program::mk_ode(std::move(eqs), fml(depth > 1 ? 1 : 0));
      }
      default: return prog(0);
    }
  }
};

}  // namespace

TEST_CASE("round trip on random ASTs") {
  Gen g(20240817);
  for (int i = 0; i < 2000; ++i) {
    FormulaPtr f = g.fml(4);
    CHECK(equal(parse_formula(pretty(f)), f));
    ProgramPtr p = g.prog(4);
    CHECK(equal(parse_program(pretty(p)), p));
    TermPtr t = g.term(4);
    CHECK(equal(parse_term(pretty(t)), t));
  }
}

TEST_CASE("fresh implies not free and not bound") {
  Gen g(99);
  for (int i = 0; i < 500; ++i) {
    ProgramPtr p = g.prog(3);
    for (const char* n : {"x", "y", "v"}) {
      Variable v(n);
      if (is_fresh(v, p)) {
        CHECK(!free_vars(p).count(v));
        CHECK(!bound_vars(p).count(v));
      }
    }
  }
}
