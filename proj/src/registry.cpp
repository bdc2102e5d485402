// Axiom schema registry: builders construct the instantiated formula from
// explicit bindings and check every side condition.  No unification; the
// caller supplies all bindings.
#include <functional>

#include "drlref/kernel.hpp"
#include "drlref/printer.hpp"

namespace drlref {

namespace {

using F = Formula;
using P = Program;
using T = Term;

const Variable& get_var(const Bindings& b, const char* k,
                        const std::string& ax) {
  auto it = b.find(k);
  if (it == b.end())
    throw UnboundPlaceholder("axiom " + ax + ": variable '" + k +
                             "' not bound");
  if (it->second.kind != BindingValue::Kind::Var)
    throw KindMismatch("axiom " + ax + ": '" + k + "' must be a variable");
  return it->second.var;
}

const TermPtr& get_term(const Bindings& b, const char* k,
                        const std::string& ax) {
  auto it = b.find(k);
  if (it == b.end())
    throw UnboundPlaceholder("axiom " + ax + ": term '" + k + "' not bound");
  if (it->second.kind != BindingValue::Kind::Term)
    throw KindMismatch("axiom " + ax + ": '" + k + "' must be a term");
  return it->second.term;
}

const FormulaPtr& get_fml(const Bindings& b, const char* k,
                          const std::string& ax) {
  auto it = b.find(k);
  if (it == b.end())
    throw UnboundPlaceholder("axiom " + ax + ": formula '" + k +
                             "' not bound");
  if (it->second.kind != BindingValue::Kind::Fml)
    throw KindMismatch("axiom " + ax + ": '" + k + "' must be a formula");
  return it->second.fml;
}

const ProgramPtr& get_prog(const Bindings& b, const char* k,
                           const std::string& ax) {
  auto it = b.find(k);
  if (it == b.end())
    throw UnboundPlaceholder("axiom " + ax + ": program '" + k +
                             "' not bound");
  if (it->second.kind != BindingValue::Kind::Prog)
    throw KindMismatch("axiom " + ax + ": '" + k + "' must be a program");
  return it->second.prog;
}

void require(bool ok, const std::string& ax, const std::string& cond,
             const std::string& witness = "") {
  if (!ok) throw SideConditionViolation(ax, cond, witness);
}

void require_plain(const Variable& v, const std::string& ax) {
  require(!v.primed, ax, "variable must be unprimed", v.str());
}
void require_primed(const Variable& v, const std::string& ax) {
  require(v.primed, ax, "variable must be primed", v.str());
}

FormulaPtr subst_checked(const FormulaPtr& f, const Variable& x,
                         const TermPtr& r, const std::string& ax) {
  try {
    return subst(f, x, r);
  } catch (const SubstClash& e) {
    throw SideConditionViolation(ax, "admissible substitution", e.what());
  }
}

TermPtr subst_checked(const TermPtr& t, const Variable& x, const TermPtr& r,
                      const std::string& ax) {
  try {
    return subst(t, x, r);
  } catch (const SubstClash& e) {
    throw SideConditionViolation(ax, "admissible substitution", e.what());
  }
}

bool prime_free(const TermPtr& t) {
  for (const auto& v : all_vars(t))
    if (v.primed) return false;
  return true;
}

bool diff_free(const TermPtr& t) {
  switch (t->kind) {
    case T::Kind::Var:
    case T::Kind::Int: return true;
    case T::Kind::Differential: return false;
    default: return diff_free(t->lhs) && diff_free(t->rhs);
  }
}

// theta linear in x: matches e1*x+e2, c*x, x, or e2 with x not in e1, e2.
bool linear_in(const TermPtr& t, const Variable& x) {
  auto no_x = [&](const TermPtr& u) { return !all_vars(u).count(x); };
  if (no_x(t)) return true;
  if (t->kind == T::Kind::Var && t->var == x) return true;
  if (t->kind == T::Kind::Times && t->rhs->kind == T::Kind::Var &&
      t->rhs->var == x && no_x(t->lhs))
    return true;
  if (t->kind == T::Kind::Plus) {
    const TermPtr& l = t->lhs;
    if (no_x(t->rhs) && l->kind == T::Kind::Times &&
        l->rhs->kind == T::Kind::Var && l->rhs->var == x && no_x(l->lhs))
      return true;
  }
  return false;
}

ProgramPtr seq(ProgramPtr a, ProgramPtr b) {
  return P::mk_seq(std::move(a), std::move(b));
}
ProgramPtr seq(ProgramPtr a, ProgramPtr b, ProgramPtr c) {
  return seq(std::move(a), seq(std::move(b), std::move(c)));
}
ProgramPtr seq(ProgramPtr a, ProgramPtr b, ProgramPtr c, ProgramPtr d) {
  return seq(std::move(a), seq(std::move(b), std::move(c), std::move(d)));
}

struct AxiomDef {
  std::string id;
  std::string schema;
  std::string side;
  std::function<FormulaPtr(const Bindings&)> build;
};

// Assignment axiom, shared by the plain and the differential variant.
FormulaPtr build_assignb(const Bindings& b, const std::string& ax,
                         bool primed) {
  const Variable& x = get_var(b, "x", ax);
  primed ? require_primed(x, ax) : require_plain(x, ax);
  const TermPtr& e = get_term(b, "e", ax);
  const FormulaPtr& p = get_fml(b, "p", ax);
  return F::mk_equiv(F::mk_box(P::mk_assign(x, e), p),
                     subst_checked(p, x, e, ax));
}

FormulaPtr build_update(const Bindings& b, const std::string& ax,
                        bool primed) {
  const Variable& x = get_var(b, "x", ax);
  primed ? require_primed(x, ax) : require_plain(x, ax);
  const TermPtr& e = get_term(b, "e", ax);
  require(!free_vars(e).count(x), ax, "x not in e", pretty(e));
  return F::mk_progeq(
      P::mk_assign(x, e),
      seq(P::mk_random(x), P::mk_test(F::mk_cmp(CmpOp::Eq, T::mk_var(x), e))));
}

FormulaPtr build_randomd(const Bindings& b, const std::string& ax,
                         bool primed) {
  const Variable& x = get_var(b, "x", ax);
  primed ? require_primed(x, ax) : require_plain(x, ax);
  const FormulaPtr& p = get_fml(b, "p", ax);
  // diamond stated in its primitive box form
  return F::mk_equiv(F::mk_not(F::mk_box(P::mk_random(x), F::mk_not(p))),
                     F::mk_exists(x, p));
}

FormulaPtr build_assignmerge(const Bindings& b, const std::string& ax,
                             bool primed) {
  const Variable& x = get_var(b, "x", ax);
  primed ? require_primed(x, ax) : require_plain(x, ax);
  const TermPtr& e1 = get_term(b, "e1", ax);
  const TermPtr& e2 = get_term(b, "e2", ax);
  return F::mk_progeq(seq(P::mk_assign(x, e1), P::mk_assign(x, e2)),
                      P::mk_assign(x, subst_checked(e2, x, e1, ax)));
}

FormulaPtr build_skip(const Bindings& b, const std::string& ax, bool primed) {
  const Variable& x = get_var(b, "x", ax);
  primed ? require_primed(x, ax) : require_plain(x, ax);
  return F::mk_refines(P::mk_test(F::mk_true()), P::mk_random(x));
}

FormulaPtr build_assigndet(const Bindings& b, const std::string& ax,
                           bool primed) {
  const Variable& x = get_var(b, "x", ax);
  primed ? require_primed(x, ax) : require_plain(x, ax);
  const TermPtr& e = get_term(b, "e", ax);
  const ProgramPtr& a = get_prog(b, "a", ax);
  const ProgramPtr& bb = get_prog(b, "b", ax);
  ProgramPtr upd = P::mk_assign(x, e);
  return F::mk_equiv(F::mk_refines(seq(upd, a), seq(upd, bb)),
                     F::mk_box(upd, F::mk_refines(a, bb)));
}

FormulaPtr build_randswap(const Bindings& b, const std::string& ax,
                          bool primed) {
  const Variable& x = get_var(b, "x", ax);
  primed ? require_primed(x, ax) : require_plain(x, ax);
  const ProgramPtr& a = get_prog(b, "a", ax);
  require(is_fresh(x, a), ax, "x fresh for a", x.str());
  return F::mk_progeq(seq(P::mk_random(x), a), seq(a, P::mk_random(x)));
}

const std::vector<AxiomDef>& axiom_defs() {
  static const std::vector<AxiomDef> defs = [] {
    std::vector<AxiomDef> v;
    auto add = [&](std::string id, std::string schema, std::string side,
                   std::function<FormulaPtr(const Bindings&)> build) {
      v.push_back(AxiomDef{std::move(id), std::move(schema), std::move(side),
                           std::move(build)});
    };

    add("assignb", "[x := e]p(x) <-> p(e)", "substitution admissible",
        [](const Bindings& b) { return build_assignb(b, "assignb", false); });
    add("assignb_prime", "[x' := e]p(x') <-> p(e)",
        "substitution admissible",
        [](const Bindings& b) {
          return build_assignb(b, "assignb_prime", true);
        });

    add("dieq0",
        "[{odes & true}](e)' = 0 -> ([{odes & true}]e = 0 <-> e = 0)",
        "domain is true; e prime- and differential-free",
        [](const Bindings& b) {
          const ProgramPtr& ode = get_prog(b, "ode", "dieq0");
          require(ode->kind == P::Kind::ODE, "dieq0", "ode argument",
                  pretty(ode));
          require(ode->fml->kind == F::Kind::True, "dieq0",
                  "evolution domain is true", pretty(ode->fml));
          const TermPtr& e = get_term(b, "e", "dieq0");
          require(prime_free(e) && diff_free(e), "dieq0",
                  "e mentions no primes or differentials", pretty(e));
          TermPtr zero = T::mk_int(0);
          FormulaPtr de =
              F::mk_cmp(CmpOp::Eq, T::mk_differential(e), zero);
          FormulaPtr eq = F::mk_cmp(CmpOp::Eq, e, zero);
          return F::mk_imply(F::mk_box(ode, de),
                             F::mk_equiv(F::mk_box(ode, eq), eq));
        });

    add("boxref", "{a} <= {b} -> ([b]p -> [a]p)", "",
        [](const Bindings& b) {
          return F::mk_imply(
              F::mk_refines(get_prog(b, "a", "boxref"),
                            get_prog(b, "b", "boxref")),
              F::mk_imply(F::mk_box(get_prog(b, "b", "boxref"),
                                    get_fml(b, "p", "boxref")),
                          F::mk_box(get_prog(b, "a", "boxref"),
                                    get_fml(b, "p", "boxref"))));
        });

    add("leqtrans", "{a} <= {b} -> ({b} <= {c} -> {a} <= {c})", "",
        [](const Bindings& b) {
          auto& a = get_prog(b, "a", "leqtrans");
          auto& bb = get_prog(b, "b", "leqtrans");
          auto& c = get_prog(b, "c", "leqtrans");
          return F::mk_imply(
              F::mk_refines(a, bb),
              F::mk_imply(F::mk_refines(bb, c), F::mk_refines(a, c)));
        });

    add("sequence",
        "{a} <= {c} & [a]({b} <= {d}) -> {a; b} <= {c; d}", "",
        [](const Bindings& b) {
          auto& a = get_prog(b, "a", "sequence");
          auto& bb = get_prog(b, "b", "sequence");
          auto& c = get_prog(b, "c", "sequence");
          auto& d = get_prog(b, "d", "sequence");
          return F::mk_imply(
              F::mk_and(F::mk_refines(a, c),
                        F::mk_box(a, F::mk_refines(bb, d))),
              F::mk_refines(seq(a, bb), seq(c, d)));
        });

    add("refode",
        "{odes & q} <= {odes2 & r} <-> [{odes & q}](primes = rhs2 & r)",
        "both differential equations evolve the same variables in order",
        [](const Bindings& b) {
          auto& o1 = get_prog(b, "ode1", "refode");
          auto& o2 = get_prog(b, "ode2", "refode");
          require(o1->kind == P::Kind::ODE && o2->kind == P::Kind::ODE,
                  "refode", "both arguments are differential equations", "");
          require(o1->odes.size() == o2->odes.size(), "refode",
                  "same equation count", "");
          for (size_t i = 0; i < o1->odes.size(); ++i)
            require(o1->odes[i].var == o2->odes[i].var, "refode",
                    "same evolved variables in order",
                    o1->odes[i].var.str());
          FormulaPtr body = o2->fml;
          for (size_t i = o2->odes.size(); i-- > 0;) {
            FormulaPtr eq = F::mk_cmp(
                CmpOp::Eq, T::mk_var(o2->odes[i].var.prime()),
                o2->odes[i].rhs);
            body = F::mk_and(eq, body);
          }
          return F::mk_equiv(F::mk_refines(o1, o2), F::mk_box(o1, body));
        });

    add("composeb", "[a; b]p <-> [a][b]p", "",
        [](const Bindings& b) {
          auto& a = get_prog(b, "a", "composeb");
          auto& bb = get_prog(b, "b", "composeb");
          auto& p = get_fml(b, "p", "composeb");
          return F::mk_equiv(F::mk_box(seq(a, bb), p),
                             F::mk_box(a, F::mk_box(bb, p)));
        });

    add("leqrefl", "{a} <= {a}", "",
        [](const Bindings& b) {
          auto& a = get_prog(b, "a", "leqrefl");
          return F::mk_refines(a, a);
        });

    add("test", "{?p} <= {?q} <-> (p -> q)", "",
        [](const Bindings& b) {
          auto& p = get_fml(b, "p", "test");
          auto& q = get_fml(b, "q", "test");
          return F::mk_equiv(
              F::mk_refines(P::mk_test(p), P::mk_test(q)),
              F::mk_imply(p, q));
        });

    add("choiceL", "{a} <= {a ++ b}", "",
        [](const Bindings& b) {
          auto& a = get_prog(b, "a", "choiceL");
          auto& bb = get_prog(b, "b", "choiceL");
          return F::mk_refines(a, P::mk_choice(a, bb));
        });

    add("seqidl", "{?true; a} == {a}", "",
        [](const Bindings& b) {
          auto& a = get_prog(b, "a", "seqidl");
          return F::mk_progeq(seq(P::mk_test(F::mk_true()), a), a);
        });

    add("seqidr", "{a; ?true} == {a}", "",
        [](const Bindings& b) {
          auto& a = get_prog(b, "a", "seqidr");
          return F::mk_progeq(seq(a, P::mk_test(F::mk_true())), a);
        });

    add("seqdistl", "{a; (b ++ c)} == {(a; b) ++ (a; c)}", "",
        [](const Bindings& b) {
          auto& a = get_prog(b, "a", "seqdistl");
          auto& bb = get_prog(b, "b", "seqdistl");
          auto& c = get_prog(b, "c", "seqdistl");
          return F::mk_progeq(seq(a, P::mk_choice(bb, c)),
                              P::mk_choice(seq(a, bb), seq(a, c)));
        });

    add("seqdistr", "{(a ++ b); c} == {(a; c) ++ (b; c)}", "",
        [](const Bindings& b) {
          auto& a = get_prog(b, "a", "seqdistr");
          auto& bb = get_prog(b, "b", "seqdistr");
          auto& c = get_prog(b, "c", "seqdistr");
          return F::mk_progeq(seq(P::mk_choice(a, bb), c),
                              P::mk_choice(seq(a, c), seq(bb, c)));
        });

    add("seqassoc", "{(a; b); c} == {a; (b; c)}", "",
        [](const Bindings& b) {
          auto& a = get_prog(b, "a", "seqassoc");
          auto& bb = get_prog(b, "b", "seqassoc");
          auto& c = get_prog(b, "c", "seqassoc");
          return F::mk_progeq(seq(seq(a, bb), c), seq(a, bb, c));
        });

    auto build_randtestmerge = [](const Bindings& b, const std::string& ax,
                                  bool primed) {
      const Variable& x = get_var(b, "x", ax);
      primed ? require_primed(x, ax) : require_plain(x, ax);
      const Variable& y = get_var(b, "y", ax);
      require_plain(y, ax);
      const FormulaPtr& q = get_fml(b, "q", ax);
      require(y != x && y.prime() != x, ax, "y distinct from x", y.str());
      require(is_fresh(y, q) && is_fresh(y.prime(), q), ax, "y fresh in q",
              y.str());
      FormulaPtr qy = subst_checked(q, x, T::mk_var(y), ax);
      return F::mk_progeq(
          seq(P::mk_random(x), P::mk_test(q), P::mk_random(x)),
          seq(P::mk_random(x), P::mk_test(F::mk_exists(y, qy))));
    };
    add("randtestmerge",
        "{x := *; ?q(x); x := *} == {x := *; ?\\exists y q(y)}",
        "y fresh in q, y distinct from x",
        [build_randtestmerge](const Bindings& b) {
          return build_randtestmerge(b, "randtestmerge", false);
        });
    add("randtestmerge_prime",
        "{x' := *; ?q(x'); x' := *} == {x' := *; ?\\exists y q(y)}",
        "y fresh in q",
        [build_randtestmerge](const Bindings& b) {
          return build_randtestmerge(b, "randtestmerge_prime", true);
        });

    add("leqantisym", "{a} == {b} <-> ({a} <= {b} & {b} <= {a})", "",
        [](const Bindings& b) {
          auto& a = get_prog(b, "a", "leqantisym");
          auto& bb = get_prog(b, "b", "leqantisym");
          return F::mk_equiv(
              F::mk_progeq(a, bb),
              F::mk_and(F::mk_refines(a, bb), F::mk_refines(bb, a)));
        });

    add("band", "[a](p & q) <-> [a]p & [a]q", "",
        [](const Bindings& b) {
          auto& a = get_prog(b, "a", "band");
          auto& p = get_fml(b, "p", "band");
          auto& q = get_fml(b, "q", "band");
          return F::mk_equiv(F::mk_box(a, F::mk_and(p, q)),
                             F::mk_and(F::mk_box(a, p), F::mk_box(a, q)));
        });

    add("randomd", "<x := *>p <-> \\exists x p", "",
        [](const Bindings& b) { return build_randomd(b, "randomd", false); });
    add("randomd_prime", "<x' := *>p <-> \\exists x' p", "",
        [](const Bindings& b) {
          return build_randomd(b, "randomd_prime", true);
        });

    add("K", "[a](p -> q) -> ([a]p -> [a]q)", "",
        [](const Bindings& b) {
          auto& a = get_prog(b, "a", "K");
          auto& p = get_fml(b, "p", "K");
          auto& q = get_fml(b, "q", "K");
          return F::mk_imply(
              F::mk_box(a, F::mk_imply(p, q)),
              F::mk_imply(F::mk_box(a, p), F::mk_box(a, q)));
        });

    add("DE", "[{odes & q}]p <-> [{odes & q}][primes := rhs]p", "",
        [](const Bindings& b) {
          auto& ode = get_prog(b, "ode", "DE");
          require(ode->kind == P::Kind::ODE, "DE", "ode argument",
                  pretty(ode));
          auto& p = get_fml(b, "p", "DE");
          FormulaPtr inner = p;
          for (size_t i = ode->odes.size(); i-- > 0;)
            inner = F::mk_box(
                P::mk_assign(ode->odes[i].var.prime(), ode->odes[i].rhs),
                inner);
          return F::mk_equiv(F::mk_box(ode, p), F::mk_box(ode, inner));
        });

    add("DG",
        "[{odes & q}]p <-> \\exists y [{odes, y' = a*y + b & q}]p",
        "y and y' fresh in the equation and p; y, y' not in a, b",
        [](const Bindings& b) {
          auto& ode = get_prog(b, "ode", "DG");
          require(ode->kind == P::Kind::ODE, "DG", "ode argument",
                  pretty(ode));
          auto& p = get_fml(b, "p", "DG");
          const Variable& y = get_var(b, "y", "DG");
          require_plain(y, "DG");
          auto& a = get_term(b, "a", "DG");
          auto& bt = get_term(b, "b", "DG");
          for (const Variable& w : {y, y.prime()}) {
            require(is_fresh(w, ode) && is_fresh(w, p), "DG",
                    "ghost fresh in equation and postcondition", w.str());
            require(is_fresh(w, a) && is_fresh(w, bt), "DG",
                    "ghost not in coefficients", w.str());
          }
          auto eqs = ode->odes;
          eqs.push_back(OdeEquation{
              y, T::mk_plus(T::mk_times(a, T::mk_var(y)), bt)});
          return F::mk_equiv(
              F::mk_box(ode, p),
              F::mk_exists(y, F::mk_box(P::mk_ode(eqs, ode->fml), p)));
        });

    add("choicel", "{a ++ b} <= {c} <-> ({a} <= {c} & {b} <= {c})", "",
        [](const Bindings& b) {
          auto& a = get_prog(b, "a", "choicel");
          auto& bb = get_prog(b, "b", "choicel");
          auto& c = get_prog(b, "c", "choicel");
          return F::mk_equiv(
              F::mk_refines(P::mk_choice(a, bb), c),
              F::mk_and(F::mk_refines(a, c), F::mk_refines(bb, c)));
        });

    add("choicer", "({a} <= {b} | {a} <= {c}) -> {a} <= {b ++ c}", "",
        [](const Bindings& b) {
          auto& a = get_prog(b, "a", "choicer");
          auto& bb = get_prog(b, "b", "choicer");
          auto& c = get_prog(b, "c", "choicer");
          return F::mk_imply(
              F::mk_or(F::mk_refines(a, bb), F::mk_refines(a, c)),
              F::mk_refines(a, P::mk_choice(bb, c)));
        });

    add("update", "{x := e} == {x := *; ?x = e}", "x not in e",
        [](const Bindings& b) { return build_update(b, "update", false); });
    add("update_prime", "{x' := e} == {x' := *; ?x' = e}", "x' not in e",
        [](const Bindings& b) {
          return build_update(b, "update_prime", true);
        });

    add("assignmerge", "{x := e1; x := e2(x)} == {x := e2(e1)}",
        "substitution admissible",
        [](const Bindings& b) {
          return build_assignmerge(b, "assignmerge", false);
        });
    add("assignmerge_prime", "{x' := e1; x' := e2(x')} == {x' := e2(e1)}",
        "substitution admissible",
        [](const Bindings& b) {
          return build_assignmerge(b, "assignmerge_prime", true);
        });

    add("skip", "{?true} <= {x := *}", "",
        [](const Bindings& b) { return build_skip(b, "skip", false); });
    add("skip_prime", "{?true} <= {x' := *}", "",
        [](const Bindings& b) { return build_skip(b, "skip_prime", true); });

    add("loopl", "[{a}*]({a; b} <= {b}) -> {{a}*; b} <= {b}", "",
        [](const Bindings& b) {
          auto& a = get_prog(b, "a", "loopl");
          auto& bb = get_prog(b, "b", "loopl");
          return F::mk_imply(
              F::mk_box(P::mk_star(a), F::mk_refines(seq(a, bb), bb)),
              F::mk_refines(seq(P::mk_star(a), bb), bb));
        });

    add("loopr", "{a; b} <= {a} -> {a; {b}*} <= {a}", "",
        [](const Bindings& b) {
          auto& a = get_prog(b, "a", "loopr");
          auto& bb = get_prog(b, "b", "loopr");
          return F::mk_imply(
              F::mk_refines(seq(a, bb), a),
              F::mk_refines(seq(a, P::mk_star(bb)), a));
        });

    add("unloop", "[{a}*]({a} <= {b}) -> {{a}*} <= {{b}*}", "",
        [](const Bindings& b) {
          auto& a = get_prog(b, "a", "unloop");
          auto& bb = get_prog(b, "b", "unloop");
          return F::mk_imply(
              F::mk_box(P::mk_star(a), F::mk_refines(a, bb)),
              F::mk_refines(P::mk_star(a), P::mk_star(bb)));
        });

    add("unfold_l", "{a}* == {?true ++ (a; {a}*)}", "",
        [](const Bindings& b) {
          auto& a = get_prog(b, "a", "unfold_l");
          return F::mk_progeq(
              P::mk_star(a),
              P::mk_choice(P::mk_test(F::mk_true()), seq(a, P::mk_star(a))));
        });

    add("assigndet",
        "{x := e; a} <= {x := e; b} <-> [x := e]({a} <= {b})", "",
        [](const Bindings& b) {
          return build_assigndet(b, "assigndet", false);
        });
    add("assigndet_prime",
        "{x' := e; a} <= {x' := e; b} <-> [x' := e]({a} <= {b})", "",
        [](const Bindings& b) {
          return build_assigndet(b, "assigndet_prime", true);
        });

    add("ode_cst",
        "{{y' = e & q}; x := *} == {x := e; {y' = x & q}; x := *}",
        "x, y not in e; x not in q; x distinct from y, y'",
        [](const Bindings& b) {
          const Variable& x = get_var(b, "x", "ode_cst");
          require_plain(x, "ode_cst");
          const Variable& y = get_var(b, "y", "ode_cst");
          require_plain(y, "ode_cst");
          auto& e = get_term(b, "e", "ode_cst");
          auto& q = get_fml(b, "q", "ode_cst");
          require(x != y, "ode_cst", "x distinct from y", x.str());
          require(is_fresh(x, e), "ode_cst", "x not in e", pretty(e));
          require(is_fresh(y, e) && is_fresh(y.prime(), e), "ode_cst",
                  "y not in e", pretty(e));
          require(is_fresh(x, q), "ode_cst", "x not in q", pretty(q));
          ProgramPtr ode1 =
              P::mk_ode({OdeEquation{y, e}}, q);
          ProgramPtr ode2 =
              P::mk_ode({OdeEquation{y, T::mk_var(x)}}, q);
          return F::mk_progeq(
              seq(ode1, P::mk_random(x)),
              seq(P::mk_assign(x, e), ode2, P::mk_random(x)));
        });

    add("ref_dg",
        "{{odes & q}; x := *; x' := *} == "
        "{x := c; {odes, x' = e & q}; x := *; x' := *}",
        "e linear in x; x, x' not in the equation, q, or c",
        [](const Bindings& b) {
          const Variable& x = get_var(b, "x", "ref_dg");
          require_plain(x, "ref_dg");
          auto& ode = get_prog(b, "ode", "ref_dg");
          require(ode->kind == P::Kind::ODE, "ref_dg", "ode argument",
                  pretty(ode));
          auto& e = get_term(b, "e", "ref_dg");
          auto& c = get_term(b, "c", "ref_dg");
          require(linear_in(e, x), "ref_dg", "new equation linear in x",
                  pretty(e));
          for (const Variable& w : {x, x.prime()}) {
            require(is_fresh(w, ode), "ref_dg",
                    "ghost not in the equation", w.str());
            require(is_fresh(w, c), "ref_dg", "ghost not in c", w.str());
          }
          require(is_fresh(x.prime(), e), "ref_dg", "x' not in e", pretty(e));
          auto eqs = ode->odes;
          eqs.push_back(OdeEquation{x, e});
          ProgramPtr ode2 = P::mk_ode(eqs, ode->fml);
          ProgramPtr rands = seq(P::mk_random(x), P::mk_random(x.prime()));
          return F::mk_progeq(
              P::mk_seq(ode, rands),
              seq(P::mk_assign(x, c), P::mk_seq(ode2, rands)));
        });

    add("de_ref_l", "{odes & q} == {v' := *; {odes & q}}",
        "v is one of the evolved variables",
        [](const Bindings& b) {
          auto& ode = get_prog(b, "ode", "de_ref_l");
          require(ode->kind == P::Kind::ODE, "de_ref_l", "ode argument",
                  pretty(ode));
          const Variable& v = get_var(b, "v", "de_ref_l");
          require_plain(v, "de_ref_l");
          bool found = false;
          for (const auto& eq : ode->odes) found = found || eq.var == v;
          require(found, "de_ref_l", "v is evolved by the equation",
                  v.str());
          return F::mk_progeq(ode, seq(P::mk_random(v.prime()), ode));
        });

    add("rand_swap", "{x := *; a} == {a; x := *}", "x fresh for a",
        [](const Bindings& b) {
          return build_randswap(b, "rand_swap", false);
        });
    add("rand_swap_prime", "{x' := *; a} == {a; x' := *}",
        "x' fresh for a",
        [](const Bindings& b) {
          return build_randswap(b, "rand_swap_prime", true);
        });

    return v;
  }();
  return defs;
}

struct RuleDoc {
  const char* id;
  const char* schema;
};

const RuleDoc kRuleDocs[] = {
    {"id", "close goal when ante[i] equals succ[j]"},
    {"closeTrue", "close goal when succ[j] is true"},
    {"closeFalse", "close goal when ante[i] is false"},
    {"cut", "G |- D  from  G |- C, D  and  G, C |- D"},
    {"weakenl", "drop ante[i]"},
    {"weakenr", "drop succ[j]"},
    {"exchangel", "swap ante[i] and ante[i2]"},
    {"exchanger", "swap succ[j] and succ[j2]"},
    {"andr", "split succ[j] = p & q into two goals"},
    {"andl", "split ante[i] = p & q in place"},
    {"orr", "split succ[j] = p | q in place"},
    {"orl", "split ante[i] = p | q into two goals"},
    {"implyr", "succ[j] = p -> q moves p left"},
    {"implyl", "split ante[i] = p -> q into two goals"},
    {"notr", "succ[j] = !p moves p left"},
    {"notl", "ante[i] = !p moves p right"},
    {"equivr", "split succ[j] = p <-> q into two implication goals"},
    {"equivl", "ante[i] = p <-> q becomes p -> q, q -> p"},
    {"allr", "succ[j] = \\forall x p becomes p[x := y], y fresh"},
    {"alll", "ante[i] = \\forall x p becomes p[x := t]"},
    {"existsr", "succ[j] = \\exists x p becomes p[x := t]"},
    {"existsl", "ante[i] = \\exists x p becomes p[x := y], y fresh"},
    {"MP", "reduce succ[j] = A to B given valid B -> A"},
    {"equivifyr", "succ[j] = p -> q becomes p <-> q"},
    {"G", "succ[j] = [a]p reduces to |- p (context dropped)"},
    {"dW", "succ[j] = [{odes & q}]p reduces to q |- p"},
    {"CPE", "succ[j] = C(a) <-> C(b) reduces to |- {a} == {b}"},
};

}  // namespace

FormulaPtr build_axiom_instance(const std::string& axiom_id,
                                const Bindings& bindings) {
  for (const auto& def : axiom_defs())
    if (def.id == axiom_id) return def.build(bindings);
  throw RuleMismatch("unknown axiom '" + axiom_id + "'");
}

bool is_formula_axiom(const std::string& id) {
  for (const auto& def : axiom_defs())
    if (def.id == id) return true;
  return false;
}

const std::vector<AxiomEntry>& list_axioms() {
  static const std::vector<AxiomEntry> entries = [] {
    std::vector<AxiomEntry> v;
    for (const auto& def : axiom_defs())
      v.push_back(AxiomEntry{def.id, false, def.schema, def.side});
    for (const auto& r : kRuleDocs)
      v.push_back(AxiomEntry{r.id, true, r.schema, ""});
    return v;
  }();
  return entries;
}

}  // namespace drlref
