#include "drlref/fuzz.hpp"

#include <functional>
#include <map>
#include <sstream>

#include "drlref/gen.hpp"
#include "drlref/kernel.hpp"
#include "drlref/printer.hpp"

namespace drlref {

namespace {

using F = Formula;
using P = Program;

BindingValue bv(Variable v) { return BindingValue::of(std::move(v)); }
BindingValue bt(TermPtr t) { return BindingValue::of(std::move(t)); }
BindingValue bf(FormulaPtr f) { return BindingValue::of(std::move(f)); }
BindingValue bp(ProgramPtr p) { return BindingValue::of(std::move(p)); }

// the ghost variable kept clear of the generator's pool
const Variable kGhost{"gh"};

ProgramPtr gen_ode(ExprGen& g, size_t max_eqs = 2) {
  std::vector<OdeEquation> eqs;
  Variable x = g.var();
  eqs.push_back(OdeEquation{x, g.term(1)});
  if (max_eqs > 1 && g.rng()() % 3 == 0) {
    Variable y = g.var();
    if (y != x) eqs.push_back(OdeEquation{y, g.term(1)});
  }
  return P::mk_ode(std::move(eqs), g.fo_formula(1));
}

TermPtr gen_linear_in(ExprGen& g, const Variable& x) {
  // e2 | x | c*x | e1*x + e2 with x not in e1, e2
  switch (g.rng()() % 4) {
    case 0: return g.term(1);
    case 1: return Term::mk_var(x);
    case 2: return Term::mk_times(g.term(1), Term::mk_var(x));
    default:
      return Term::mk_plus(Term::mk_times(g.term(1), Term::mk_var(x)),
                           g.term(1));
  }
}

using BindingGen = std::function<Bindings(ExprGen&)>;

const std::map<std::string, BindingGen>& binding_gens() {
  static const std::map<std::string, BindingGen> gens = [] {
    std::map<std::string, BindingGen> m;
    auto progs = [](std::initializer_list<const char*> keys) {
      std::vector<std::string> ks(keys.begin(), keys.end());
      return [ks](ExprGen& g) {
        Bindings b;
        for (const auto& k : ks) b[k] = bp(g.program(g.config().max_depth));
        return b;
      };
    };

    m["leqrefl"] = progs({"a"});
    m["seqidl"] = progs({"a"});
    m["seqidr"] = progs({"a"});
    m["unfold_l"] = progs({"a"});
    m["choiceL"] = progs({"a", "b"});
    m["leqantisym"] = progs({"a", "b"});
    m["loopl"] = progs({"a", "b"});
    m["loopr"] = progs({"a", "b"});
    m["unloop"] = progs({"a", "b"});
    m["leqtrans"] = progs({"a", "b", "c"});
    m["seqdistl"] = progs({"a", "b", "c"});
    m["seqdistr"] = progs({"a", "b", "c"});
    m["seqassoc"] = progs({"a", "b", "c"});
    m["choicel"] = progs({"a", "b", "c"});
    m["choicer"] = progs({"a", "b", "c"});
    m["sequence"] = progs({"a", "b", "c", "d"});

    m["test"] = [](ExprGen& g) {
      Bindings b;
      b["p"] = bf(g.fo_formula(2));
      b["q"] = bf(g.fo_formula(2));
      return b;
    };
    m["boxref"] = [](ExprGen& g) {
      Bindings b;
      b["a"] = bp(g.program(g.config().max_depth));
      b["b"] = bp(g.program(g.config().max_depth));
      b["p"] = bf(g.fo_formula(2));
      return b;
    };
    m["composeb"] = m["boxref"];
    m["K"] = [](ExprGen& g) {
      Bindings b;
      b["a"] = bp(g.program(g.config().max_depth));
      b["p"] = bf(g.fo_formula(2));
      b["q"] = bf(g.fo_formula(2));
      return b;
    };
    m["band"] = m["K"];

    auto assign_target = [](ExprGen& g, bool primed) {
      Variable x = g.var();
      return primed ? x.prime() : x;
    };
    m["assignb"] = [assign_target](ExprGen& g) {
      Bindings b;
      b["x"] = bv(assign_target(g, false));
      b["e"] = bt(g.term(2));
      b["p"] = bf(g.fo_formula(2));
      return b;
    };
    m["assignb_prime"] = [assign_target](ExprGen& g) {
      Bindings b;
      b["x"] = bv(assign_target(g, true));
      b["e"] = bt(g.term(2));
      b["p"] = bf(g.fo_formula(2));
      return b;
    };
    m["update"] = [assign_target](ExprGen& g) {
      Bindings b;
      b["x"] = bv(assign_target(g, false));
      b["e"] = bt(g.term(2));
      return b;
    };
    m["update_prime"] = [assign_target](ExprGen& g) {
      Bindings b;
      b["x"] = bv(assign_target(g, true));
      b["e"] = bt(g.term(2));
      return b;
    };
    m["assignmerge"] = [assign_target](ExprGen& g) {
      Bindings b;
      b["x"] = bv(assign_target(g, false));
      b["e1"] = bt(g.term(2));
      b["e2"] = bt(g.term(2));
      return b;
    };
    m["assignmerge_prime"] = [assign_target](ExprGen& g) {
      Bindings b;
      b["x"] = bv(assign_target(g, true));
      b["e1"] = bt(g.term(2));
      b["e2"] = bt(g.term(2));
      return b;
    };
    m["skip"] = [assign_target](ExprGen& g) {
      Bindings b;
      b["x"] = bv(assign_target(g, false));
      return b;
    };
    m["skip_prime"] = [assign_target](ExprGen& g) {
      Bindings b;
      b["x"] = bv(assign_target(g, true));
      return b;
    };
    m["randomd"] = [assign_target](ExprGen& g) {
      Bindings b;
      b["x"] = bv(assign_target(g, false));
      b["p"] = bf(g.fo_formula(2));
      return b;
    };
    m["randomd_prime"] = [assign_target](ExprGen& g) {
      Bindings b;
      b["x"] = bv(assign_target(g, true));
      b["p"] = bf(g.fo_formula(2));
      return b;
    };
    m["assigndet"] = [assign_target](ExprGen& g) {
      Bindings b;
      b["x"] = bv(assign_target(g, false));
      b["e"] = bt(g.term(2));
      b["a"] = bp(g.program(2));
      b["b"] = bp(g.program(2));
      return b;
    };
    m["assigndet_prime"] = [assign_target](ExprGen& g) {
      Bindings b;
      b["x"] = bv(assign_target(g, true));
      b["e"] = bt(g.term(2));
      b["a"] = bp(g.program(2));
      b["b"] = bp(g.program(2));
      return b;
    };
    m["randtestmerge"] = [](ExprGen& g) {
      Bindings b;
      b["x"] = bv(g.var());
      b["q"] = bf(g.fo_formula(2));
      b["y"] = bv(kGhost);
      return b;
    };
    m["randtestmerge_prime"] = [](ExprGen& g) {
      Bindings b;
      b["x"] = bv(g.var().prime());
      b["q"] = bf(g.fo_formula(2));
      b["y"] = bv(kGhost);
      return b;
    };
    m["rand_swap"] = [](ExprGen& g) {
      Variable x = g.var();
      GenConfig c = g.config();
      c.forbidden.insert(x);
      c.forbidden.insert(x.prime());
      ExprGen g2(g.rng()(), c);
      Bindings b;
      b["x"] = bv(x);
      b["a"] = bp(g2.program(c.max_depth));
      return b;
    };
    m["rand_swap_prime"] = [](ExprGen& g) {
      Variable x = g.var().prime();
      GenConfig c = g.config();
      c.forbidden.insert(x);
      c.forbidden.insert(x.base());
      ExprGen g2(g.rng()(), c);
      Bindings b;
      b["x"] = bv(x);
      b["a"] = bp(g2.program(c.max_depth));
      return b;
    };

    m["dieq0"] = [](ExprGen& g) {
      std::vector<OdeEquation> eqs;
      Variable x = g.var();
      eqs.push_back(OdeEquation{x, g.term(1)});
      Bindings b;
      b["ode"] = bp(P::mk_ode(std::move(eqs), F::mk_true()));
      b["e"] = bt(Term::mk_var(g.var()));
      return b;
    };
    m["refode"] = [](ExprGen& g) {
      ProgramPtr o1 = gen_ode(g);
      std::vector<OdeEquation> eqs;
      for (const auto& eq : o1->odes)
        eqs.push_back(OdeEquation{eq.var, g.term(1)});
      ProgramPtr o2 = P::mk_ode(std::move(eqs), g.fo_formula(1));
      Bindings b;
      b["ode1"] = bp(o1);
      b["ode2"] = bp(o2);
      return b;
    };
    m["DE"] = [](ExprGen& g) {
      Bindings b;
      b["ode"] = bp(gen_ode(g));
      b["p"] = bf(g.fo_formula(2));
      return b;
    };
    m["DG"] = [](ExprGen& g) {
      Bindings b;
      b["ode"] = bp(gen_ode(g));
      b["p"] = bf(g.fo_formula(2));
      b["y"] = bv(kGhost);
      b["a"] = bt(g.term(1));
      b["b"] = bt(g.term(1));
      return b;
    };
    m["ode_cst"] = [](ExprGen& g) {
      Variable y = g.var();
      GenConfig c = g.config();
      c.forbidden.insert(kGhost);
      c.forbidden.insert(kGhost.prime());
      ExprGen g2(g.rng()(), c);
      Bindings b;
      b["x"] = bv(kGhost);
      b["y"] = bv(y);
      // e must avoid y as well
      GenConfig c2 = c;
      c2.forbidden.insert(y);
      c2.forbidden.insert(y.prime());
      ExprGen g3(g.rng()(), c2);
      b["e"] = bt(g3.term(2));
      b["q"] = bf(g2.fo_formula(1));
      return b;
    };
    m["ref_dg"] = [](ExprGen& g) {
      GenConfig c = g.config();
      c.forbidden.insert(kGhost);
      c.forbidden.insert(kGhost.prime());
      ExprGen g2(g.rng()(), c);
      Bindings b;
      b["ode"] = bp(gen_ode(g2, 1));
      b["x"] = bv(kGhost);
      b["e"] = bt(gen_linear_in(g2, kGhost));
      b["c"] = bt(g2.term(1));
      return b;
    };
    m["de_ref_l"] = [](ExprGen& g) {
      ProgramPtr ode = gen_ode(g);
      Bindings b;
      b["ode"] = bp(ode);
      b["v"] = bv(ode->odes[g.rng()() % ode->odes.size()].var);
      return b;
    };
    return m;
  }();
  return gens;
}

std::string show_state(const State& s) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [v, x] : s) {
    if (!first) os << ", ";
    first = false;
    os << v.str() << "=" << x;
  }
  return os.str();
}

// evaluates one closed formula instance over sampled states
void run_instance(const FormulaPtr& inst, const OracleConfig& cfg,
                  FuzzReport& rep) {
  VarSet vars = all_vars(inst);
  {
    VarSet primes;
    for (const auto& v : vars)
      if (!v.primed) primes.insert(v.prime());
    vars.insert(primes.begin(), primes.end());
  }
  bool any_true = false, any_false = false;
  State bad;
  for (const State& s : sample_states(vars, cfg)) {
    TriBool r = check_formula(inst, s, cfg);
    if (r == TriBool::False) {
      any_false = true;
      bad = s;
      break;
    }
    if (r == TriBool::True) any_true = true;
  }
  if (any_false) {
    rep.failures++;
    if (rep.counterexamples.size() < 5)
      rep.counterexamples.push_back(pretty(inst) + "  at  " +
                                    show_state(bad));
  } else if (any_true) {
    rep.passed++;
  } else {
    rep.inconclusive++;
  }
}

}  // namespace

std::vector<std::string> fuzzable_axioms() {
  std::vector<std::string> out;
  for (const auto& e : list_axioms())
    if (!e.is_rule && binding_gens().count(e.id)) out.push_back(e.id);
  return out;
}

FuzzReport fuzz_axiom(const std::string& axiom_id, size_t trials,
                      const OracleConfig& cfg) {
  auto it = binding_gens().find(axiom_id);
  if (it == binding_gens().end())
    throw Error("no fuzz generator for axiom '" + axiom_id + "'");
  FuzzReport rep;
  rep.axiom = axiom_id;
  GenConfig gc;
  gc.max_depth = 3;
  gc.num_vars = 3;
  ExprGen gen(cfg.seed ^ std::hash<std::string>{}(axiom_id), gc);
  OracleConfig per = cfg;
  for (size_t k = 0; k < trials; ++k) {
    per.seed = cfg.seed + 0x9e3779b97f4a7c15ULL * (k + 1);
    FormulaPtr inst;
    for (int attempts = 0; attempts < 100 && !inst; ++attempts) {
      try {
        inst = build_axiom_instance(axiom_id, it->second(gen));
      } catch (const Error&) {
        // side condition failed for this draw; try again
      }
    }
    if (!inst) {
      rep.inconclusive++;
      continue;
    }
    rep.trials++;
    run_instance(inst, per, rep);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Side-condition-dropped mutants.  Instances are built directly (they could
// never pass the kernel checks) and must be refuted by the oracle.

namespace {


struct MutantDef {
  std::string name;
  std::string dropped;
  // generates the k-th unsound instance
  std::function<FormulaPtr(size_t)> instance;
};

ProgramPtr rnd(const Variable& v) { return P::mk_random(v); }
ProgramPtr sq(ProgramPtr a, ProgramPtr b) {
  return P::mk_seq(std::move(a), std::move(b));
}

const std::vector<MutantDef>& mutants() {
  static const std::vector<MutantDef> defs = [] {
    std::vector<MutantDef> v;
    Variable x("x"), y("y"), c("c");

    v.push_back({"rand_swap_nofresh", "x fresh for a", [=](size_t k) {
      // {x:=*; a} == {a; x:=*} with a reading or writing x
      ProgramPtr a =
          k % 2 == 0
              ? P::mk_assign(x, Term::mk_plus(Term::mk_var(x), Term::mk_int(1)))
              : P::mk_test(Formula::mk_cmp(CmpOp::Lt, Term::mk_var(x),
                                           Term::mk_int(0)));
      return Formula::mk_progeq(sq(rnd(x), a), sq(a, rnd(x)));
    }});
    v.push_back({"rand_swap_prime_nofresh", "x' fresh for a", [=](size_t) {
      // a evolves x, so it overwrites x'
      ProgramPtr a = P::mk_ode({OdeEquation{x, Term::mk_int(1)}},
                               Formula::mk_true());
      return Formula::mk_progeq(sq(rnd(x.prime()), a), sq(a, rnd(x.prime())));
    }});
    v.push_back({"ode_cst_x_in_theta", "x not in e (via the evolved alias)",
                 [=](size_t) {
      // introduced variable aliased with the evolved one, so the new
      // equation becomes self-referential: y' = 1 turns into y' = y
      // {y'=1 & true}; y:=*  ==  y:=1; {y'=y & true}; y:=*
      ProgramPtr lhs = sq(P::mk_ode({OdeEquation{y, Term::mk_int(1)}},
                                    Formula::mk_true()),
                          rnd(y));
      ProgramPtr rhs = sq(P::mk_assign(y, Term::mk_int(1)),
                          sq(P::mk_ode({OdeEquation{y, Term::mk_var(y)}},
                                       Formula::mk_true()),
                             rnd(y)));
      return Formula::mk_progeq(lhs, rhs);
    }});
    v.push_back({"ode_cst_y_in_theta", "y not in e", [=](size_t) {
      // {y'=y & true}; x:=*  ==  x:=y; {y'=x & true}; x:=*
      ProgramPtr lhs = sq(P::mk_ode({OdeEquation{y, Term::mk_var(y)}},
                                    Formula::mk_true()),
                          rnd(x));
      ProgramPtr rhs = sq(P::mk_assign(x, Term::mk_var(y)),
                          sq(P::mk_ode({OdeEquation{y, Term::mk_var(x)}},
                                       Formula::mk_true()),
                             rnd(x)));
      return Formula::mk_progeq(lhs, rhs);
    }});
    v.push_back({"ode_cst_x_in_domain", "x not in q", [=](size_t) {
      // domain mentions x: {y'=1 & x<=0}; x:=*  ==  x:=1; {y'=x & x<=0}; x:=*
      FormulaPtr dom =
          Formula::mk_cmp(CmpOp::Le, Term::mk_var(x), Term::mk_int(0));
      ProgramPtr lhs = sq(P::mk_ode({OdeEquation{y, Term::mk_int(1)}}, dom),
                          rnd(x));
      ProgramPtr rhs = sq(P::mk_assign(x, Term::mk_int(1)),
                          sq(P::mk_ode({OdeEquation{y, Term::mk_var(x)}}, dom),
                             rnd(x)));
      return Formula::mk_progeq(lhs, rhs);
    }});
    v.push_back({"ref_dg_nonlinear", "new equation linear in x", [=](size_t) {
      // ghost x' = x*x from x = 3 blows up before the horizon
      ProgramPtr base = P::mk_ode({OdeEquation{y, Term::mk_int(1)}},
                                  Formula::mk_true());
      ProgramPtr ghost = P::mk_ode(
          {OdeEquation{y, Term::mk_int(1)},
           OdeEquation{x, Term::mk_times(Term::mk_var(x), Term::mk_var(x))}},
          Formula::mk_true());
      ProgramPtr rands = sq(rnd(x), rnd(x.prime()));
      return Formula::mk_progeq(
          P::mk_seq(base, rands),
          sq(P::mk_assign(x, Term::mk_int(3)), P::mk_seq(ghost, rands)));
    }});
    v.push_back({"ref_dg_x_in_domain", "x not in q", [=](size_t) {
      // domain x < 1 cuts the ghosted evolution short
      FormulaPtr dom =
          Formula::mk_cmp(CmpOp::Lt, Term::mk_var(x), Term::mk_int(1));
      ProgramPtr base = P::mk_ode({OdeEquation{y, Term::mk_int(1)}}, dom);
      ProgramPtr ghost = P::mk_ode({OdeEquation{y, Term::mk_int(1)},
                                    OdeEquation{x, Term::mk_int(2)}},
                                   dom);
      ProgramPtr rands = sq(rnd(x), rnd(x.prime()));
      return Formula::mk_progeq(
          P::mk_seq(base, rands),
          sq(P::mk_assign(x, Term::mk_int(0)), P::mk_seq(ghost, rands)));
    }});
    v.push_back({"ref_dg_x_in_theta", "x not in the equation", [=](size_t) {
      // the base right-hand side reads the ghost
      ProgramPtr base = P::mk_ode({OdeEquation{y, Term::mk_var(x)}},
                                  Formula::mk_true());
      ProgramPtr ghost = P::mk_ode({OdeEquation{y, Term::mk_var(x)},
                                    OdeEquation{x, Term::mk_int(0)}},
                                   Formula::mk_true());
      ProgramPtr rands = sq(rnd(x), rnd(x.prime()));
      return Formula::mk_progeq(
          P::mk_seq(base, rands),
          sq(P::mk_assign(x, Term::mk_int(5)), P::mk_seq(ghost, rands)));
    }});
    v.push_back({"fresh_no_trailing_random",
                 "the final nondeterministic assignment", [=](size_t) {
      // {c:=c+1; x:=*}*; x:=*  ==  {c:=c+1; x:=*}*
      ProgramPtr body =
          sq(P::mk_assign(c, Term::mk_plus(Term::mk_var(c), Term::mk_int(1))),
             rnd(x));
      return Formula::mk_progeq(sq(P::mk_star(body), rnd(x)),
                                P::mk_star(body));
    }});
    v.push_back({"assignb_clash", "admissible substitution", [=](size_t) {
      // naive substitution under a rebinding modality
      // [x:=y][y:=2](x=y)  <->  [y:=2](y=y)
      FormulaPtr inner = Formula::mk_box(
          P::mk_assign(y, Term::mk_int(2)),
          Formula::mk_cmp(CmpOp::Eq, Term::mk_var(x), Term::mk_var(y)));
      FormulaPtr lhs =
          Formula::mk_box(P::mk_assign(x, Term::mk_var(y)), inner);
      FormulaPtr rhs = Formula::mk_box(
          P::mk_assign(y, Term::mk_int(2)),
          Formula::mk_cmp(CmpOp::Eq, Term::mk_var(y), Term::mk_var(y)));
      return Formula::mk_equiv(lhs, rhs);
    }});
    v.push_back({"update_x_in_e", "x not in e", [=](size_t) {
      // x := x+1  ==  x:=*; ?x = x+1
      TermPtr e = Term::mk_plus(Term::mk_var(x), Term::mk_int(1));
      return Formula::mk_progeq(
          P::mk_assign(x, e),
          sq(rnd(x), P::mk_test(Formula::mk_cmp(CmpOp::Eq, Term::mk_var(x),
                                                e))));
    }});
    return v;
  }();
  return defs;
}

}  // namespace

std::vector<std::string> mutant_names() {
  std::vector<std::string> out;
  for (const auto& m : mutants()) out.push_back(m.name);
  return out;
}

MutantReport fuzz_mutant(const std::string& name, size_t trials,
                         const OracleConfig& cfg) {
  const MutantDef* def = nullptr;
  for (const auto& m : mutants())
    if (m.name == name) def = &m;
  if (!def) throw Error("unknown mutant '" + name + "'");
  MutantReport rep;
  rep.name = name;
  rep.dropped_condition = def->dropped;
  OracleConfig per = cfg;
  for (size_t k = 0; k < trials; ++k) {
    per.seed = cfg.seed + 0x9e3779b97f4a7c15ULL * (k + 1);
    FormulaPtr inst = def->instance(k);
    VarSet vars = all_vars(inst);
    {
      VarSet primes;
      for (const auto& v : vars)
        if (!v.primed) primes.insert(v.prime());
      vars.insert(primes.begin(), primes.end());
    }
    rep.trials_used = k + 1;
    for (const State& s : sample_states(vars, per)) {
      if (check_formula(inst, s, per) == TriBool::False) {
        rep.found_counterexample = true;
        rep.counterexample = pretty(inst) + "  at  " + show_state(s);
        return rep;
      }
    }
  }
  return rep;
}

}  // namespace drlref
