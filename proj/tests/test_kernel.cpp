#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "drlref/certificate.hpp"
#include "drlref/kernel.hpp"
#include "drlref/parser.hpp"
#include "drlref/printer.hpp"

using namespace drlref;

namespace {

Sequent seq1(const std::string& succ) {
  Sequent s;
  s.succ.push_back(parse_formula(succ));
  return s;
}

Bindings bind_progs(std::initializer_list<std::pair<const char*, const char*>>
                        progs) {
  Bindings b;
  for (const auto& [k, v] : progs) b[k] = BindingValue::of(parse_program(v));
  return b;
}

}  // namespace

TEST_CASE("new_goal") {
  Provable p = new_goal(seq1("{?true} <= {?true}"));
  CHECK(p.goals.size() == 1);
  CHECK(p.trace.empty());
  Sequent empty;
  Provable q = new_goal(empty);
  CHECK(q.goals.size() == 1);
}

TEST_CASE("test axiom instantiation") {
  Bindings b;
  b["p"] = BindingValue::of(parse_formula("x < 5"));
  b["q"] = BindingValue::of(parse_formula("x < 9"));
  Provable p = instantiate_axiom({"test", b});
  CHECK(p.proved());
  CHECK(pretty(p.conclusion.succ[0]) ==
        "{?x < 5} <= {?x < 9} <-> (x < 5 -> x < 9)");
}

TEST_CASE("ode_cst side condition x not in e") {
  Bindings b;
  b["x"] = BindingValue::of(Variable("x"));
  b["y"] = BindingValue::of(Variable("y"));
  b["e"] = BindingValue::of(parse_term("v + x"));
  b["q"] = BindingValue::of(parse_formula("true"));
  CHECK_THROWS_AS(instantiate_axiom({"ode_cst", b}),
                  SideConditionViolation);
  b["e"] = BindingValue::of(parse_term("v"));
  CHECK(instantiate_axiom({"ode_cst", b}).proved());
}

TEST_CASE("rand_swap requires freshness") {
  Bindings b;
  b["x"] = BindingValue::of(Variable("x"));
  b["a"] = BindingValue::of(parse_program("x := 1"));
  CHECK_THROWS_AS(instantiate_axiom({"rand_swap", b}),
                  SideConditionViolation);
  b["a"] = BindingValue::of(parse_program("y := 1"));
  CHECK(instantiate_axiom({"rand_swap", b}).proved());
}

TEST_CASE("ref_dg linearity check") {
  Bindings b;
  b["x"] = BindingValue::of(Variable("t"));
  b["ode"] = BindingValue::of(parse_program("{y' = v & true}"));
  b["c"] = BindingValue::of(parse_term("0"));
  b["e"] = BindingValue::of(parse_term("2*t + v"));
  CHECK(instantiate_axiom({"ref_dg", b}).proved());
  b["e"] = BindingValue::of(parse_term("t*t"));
  CHECK_THROWS_AS(instantiate_axiom({"ref_dg", b}),
                  SideConditionViolation);
  b["e"] = BindingValue::of(parse_term("v + 1"));
  CHECK(instantiate_axiom({"ref_dg", b}).proved());
}

TEST_CASE("every axiom with a freshness or linearity condition rejects a "
          "violating instance") {
  // update: x in e
  {
    Bindings b;
    b["x"] = BindingValue::of(Variable("x"));
    b["e"] = BindingValue::of(parse_term("x + 1"));
    CHECK_THROWS_AS(instantiate_axiom({"update", b}),
                    SideConditionViolation);
  }
  // randtestmerge: y occurs in q
  {
    Bindings b;
    b["x"] = BindingValue::of(Variable("x"));
    b["y"] = BindingValue::of(Variable("y"));
    b["q"] = BindingValue::of(parse_formula("x < y"));
    CHECK_THROWS_AS(instantiate_axiom({"randtestmerge", b}),
                    SideConditionViolation);
  }
  // DG: ghost occurs in the equation
  {
    Bindings b;
    b["ode"] = BindingValue::of(parse_program("{x' = y & true}"));
    b["p"] = BindingValue::of(parse_formula("x < 1"));
    b["y"] = BindingValue::of(Variable("y"));
    b["a"] = BindingValue::of(parse_term("1"));
    b["b"] = BindingValue::of(parse_term("0"));
    CHECK_THROWS_AS(instantiate_axiom({"DG", b}), SideConditionViolation);
  }
  // assignb: substitution clash under a modality
  {
    Bindings b;
    b["x"] = BindingValue::of(Variable("x"));
    b["e"] = BindingValue::of(parse_term("y"));
    b["p"] = BindingValue::of(parse_formula("[y := 2]x = y"));
    CHECK_THROWS_AS(instantiate_axiom({"assignb", b}),
                    SideConditionViolation);
  }
  // de_ref_l: v must be evolved
  {
    Bindings b;
    b["ode"] = BindingValue::of(parse_program("{x' = 1 & true}"));
    b["v"] = BindingValue::of(Variable("y"));
    CHECK_THROWS_AS(instantiate_axiom({"de_ref_l", b}),
                    SideConditionViolation);
  }
  // plain axioms reject primed instantiation
  {
    Bindings b;
    b["x"] = BindingValue::of(Variable("x", true));
    b["e"] = BindingValue::of(parse_term("1"));
    b["p"] = BindingValue::of(parse_formula("x' = 1"));
    CHECK_THROWS_AS(instantiate_axiom({"assignb", b}),
                    SideConditionViolation);
    CHECK(instantiate_axiom({"assignb_prime", b}).proved());
  }
}

TEST_CASE("unbound and mismatched bindings") {
  Bindings b;
  CHECK_THROWS_AS(instantiate_axiom({"boxref", b}), UnboundPlaceholder);
  b["a"] = BindingValue::of(parse_formula("true"));
  b["b"] = BindingValue::of(parse_program("?true"));
  b["p"] = BindingValue::of(parse_formula("true"));
  CHECK_THROWS_AS(instantiate_axiom({"boxref", b}), KindMismatch);
}

TEST_CASE("andr splits a conjunction") {
  Sequent g;
  g.ante.push_back(parse_formula("x = 1"));
  g.succ.push_back(parse_formula("x = 1 & x = 1"));
  Provable p = new_goal(g);
  Bindings b;
  b["j"] = BindingValue::of(size_t{0});
  p = apply_rule(p, 0, "andr", b);
  REQUIRE(p.goals.size() == 2);
  CHECK(pretty(p.goals[0]) == "x = 1 |- x = 1");
  CHECK(pretty(p.goals[1]) == "x = 1 |- x = 1");
  Bindings id;
  id["i"] = BindingValue::of(size_t{0});
  id["j"] = BindingValue::of(size_t{0});
  p = apply_rule(p, 0, "id", id);
  p = apply_rule(p, 0, "id", id);
  CHECK(p.proved());
}

TEST_CASE("G drops the context") {
  Sequent g;
  g.ante.push_back(parse_formula("y = 2"));
  g.succ.push_back(parse_formula("[x := 1]true"));
  Provable p = new_goal(g);
  Bindings b;
  b["j"] = BindingValue::of(size_t{0});
  p = apply_rule(p, 0, "G", b);
  REQUIRE(p.goals.size() == 1);
  CHECK(pretty(p.goals[0]) == "|- true");
  b["j"] = BindingValue::of(size_t{0});
  p = apply_rule(p, 0, "closeTrue", b);
  CHECK(p.proved());
}

TEST_CASE("CPE rewrites a program inside a formula") {
  Sequent g =
      seq1("[x := 1; y := 2]y > 0 <-> [(x := 1 ++ x := 1); y := 2]y > 0");
  Provable p = new_goal(g);
  Bindings b = bind_progs({{"a", "x := 1"}, {"b", "x := 1 ++ x := 1"}});
  b["j"] = BindingValue::of(size_t{0});
  p = apply_rule(p, 0, "CPE", b);
  REQUIRE(p.goals.size() == 1);
  CHECK(pretty(p.goals[0]) == "|- {x := 1} == {x := 1 ++ x := 1}");
  // mismatched sides are rejected
  Provable q = new_goal(seq1("[x := 1]y > 0 <-> [x := 2]y > 0"));
  Bindings b2 = bind_progs({{"a", "x := 1"}, {"b", "x := 3"}});
  b2["j"] = BindingValue::of(size_t{0});
  CHECK_THROWS_AS(apply_rule(q, 0, "CPE", b2), RuleMismatch);
}

TEST_CASE("admit_arith") {
  Sequent g;
  g.ante.push_back(parse_formula("a > 0 & b > 0"));
  g.succ.push_back(parse_formula("a + b > 0"));
  Provable p = new_goal(g);
  p = admit_arith(p, 0);
  CHECK(p.proved());
  REQUIRE(p.assumptions.size() == 1);
  CHECK(pretty(p.assumptions[0]) == "a > 0 & b > 0 -> a + b > 0");

  Provable q = new_goal(seq1("[?true]true"));
  CHECK_THROWS_AS(admit_arith(q, 0), NotFirstOrder);
}

TEST_CASE("certificate replay and tampering") {
  Sequent g;
  g.ante.push_back(parse_formula("x = 1"));
  g.succ.push_back(parse_formula("x = 1 & x = 1"));
  Provable p = new_goal(g);
  Bindings b;
  b["j"] = BindingValue::of(size_t{0});
  p = apply_rule(p, 0, "andr", b);
  Bindings id;
  id["i"] = BindingValue::of(size_t{0});
  id["j"] = BindingValue::of(size_t{0});
  p = apply_rule(p, 0, "id", id);
  p = apply_rule(p, 0, "id", id);

  CheckResult r = check_certificate(p);
  CHECK(r.valid);
  CHECK(r.assumptions.empty());

  // tamper with one step's bindings
  Provable bad = p;
  bad.trace[1].bindings["i"] = BindingValue::of(size_t{7});
  CheckResult rb = check_certificate(bad);
  CHECK(!rb.valid);
  CHECK(rb.failed_step == 1);

  // JSON round trip preserves validity
  std::string js = certificate_to_json(p);
  Provable back = certificate_from_json(js);
  CHECK(check_certificate(back).valid);
  CHECK(equal(back.conclusion, p.conclusion));
}

TEST_CASE("list_axioms includes the registry") {
  bool boxref = false, odecst = false, derefl = false, seqassoc = false;
  for (const auto& e : list_axioms()) {
    if (e.id == "boxref") boxref = true;
    if (e.id == "ode_cst") odecst = true;
    if (e.id == "de_ref_l") derefl = true;
    if (e.id == "seqassoc") seqassoc = true;
  }
  CHECK(boxref);
  CHECK(odecst);
  CHECK(derefl);
  CHECK(seqassoc);
  // and a healthy number of entries overall
  CHECK(list_axioms().size() > 50);
}

TEST_CASE("diamond and program equivalence normalize when matching") {
  // randomd is stated with the primitive box form; the surface diamond
  // matches through normalization.
  Sequent g = seq1("<x := *>x = 1 <-> \\exists x x = 1");
  Provable p = new_goal(g);
  Bindings b;
  b["x"] = BindingValue::of(Variable("x"));
  b["p"] = BindingValue::of(parse_formula("x = 1"));
  b["j"] = BindingValue::of(size_t{0});
  p = apply_rule(p, 0, "ax:randomd", b);
  CHECK(p.proved());
}
