#include "drlref/tactics.hpp"

#include <cassert>
#include <functional>

#include "drlref/arith.hpp"
#include "drlref/printer.hpp"

namespace drlref {

namespace {

using F = Formula;
using P = Program;
using FK = Formula::Kind;
using PK = Program::Kind;

BindingValue idx(size_t i) { return BindingValue::of(i); }

void rule(Provable& p, size_t g, const std::string& r, Bindings b) {
  apply_rule_inplace(p, g, r, std::move(b));
}

Path cat(Path a, const Path& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

// ---------------------------------------------------------------------------
// Propositional tableau over the kernel's sequent rules.  The connectives,
// true and false are decomposed; everything else is an atom closed by id.

bool prop_decomposable(const FormulaPtr& f) {
  switch (f->kind) {
    case FK::Not:
    case FK::And:
    case FK::Or:
    case FK::Imply:
    case FK::Equiv:
    case FK::True:
    case FK::False: return true;
    default: return false;
  }
}

void prop_close(Provable& p, size_t g) {
  const Sequent s = p.goals.at(g);
  for (size_t i = 0; i < s.ante.size(); ++i) {
    if (s.ante[i]->kind == FK::False) {
      rule(p, g, "closeFalse", {{"i", idx(i)}});
      return;
    }
    for (size_t j = 0; j < s.succ.size(); ++j) {
      if (equal(s.ante[i], s.succ[j])) {
        rule(p, g, "id", {{"i", idx(i)}, {"j", idx(j)}});
        return;
      }
    }
  }
  for (size_t j = 0; j < s.succ.size(); ++j) {
    if (s.succ[j]->kind == FK::True) {
      rule(p, g, "closeTrue", {{"j", idx(j)}});
      return;
    }
  }
  for (size_t i = 0; i < s.ante.size(); ++i) {
    const FormulaPtr& f = s.ante[i];
    if (!prop_decomposable(f)) continue;
    switch (f->kind) {
      case FK::True: rule(p, g, "weakenl", {{"i", idx(i)}}); break;
      case FK::And: rule(p, g, "andl", {{"i", idx(i)}}); break;
      case FK::Or: rule(p, g, "orl", {{"i", idx(i)}}); break;
      case FK::Imply: rule(p, g, "implyl", {{"i", idx(i)}}); break;
      case FK::Not: rule(p, g, "notl", {{"i", idx(i)}}); break;
      case FK::Equiv: rule(p, g, "equivl", {{"i", idx(i)}}); break;
      default: break;
    }
    size_t premises = (f->kind == FK::Or || f->kind == FK::Imply) ? 2 : 1;
    for (size_t k = 0; k < premises; ++k) prop_close(p, g);
    return;
  }
  for (size_t j = 0; j < s.succ.size(); ++j) {
    const FormulaPtr& f = s.succ[j];
    if (!prop_decomposable(f)) continue;
    switch (f->kind) {
      case FK::False: rule(p, g, "weakenr", {{"j", idx(j)}}); break;
      case FK::And: rule(p, g, "andr", {{"j", idx(j)}}); break;
      case FK::Or: rule(p, g, "orr", {{"j", idx(j)}}); break;
      case FK::Imply: rule(p, g, "implyr", {{"j", idx(j)}}); break;
      case FK::Not: rule(p, g, "notr", {{"j", idx(j)}}); break;
      case FK::Equiv: rule(p, g, "equivr", {{"j", idx(j)}}); break;
      default: break;
    }
    size_t premises = (f->kind == FK::And || f->kind == FK::Equiv) ? 2 : 1;
    for (size_t k = 0; k < premises; ++k) prop_close(p, g);
    return;
  }
  throw GoalShapeMismatch("tableau cannot close goal: " + pretty(s));
}

void ax_close(Provable& p, size_t g, size_t j, const std::string& id,
              Bindings b) {
  b["j"] = idx(j);
  rule(p, g, "ax:" + id, std::move(b));
}

void cut_fml(Provable& p, size_t g, const FormulaPtr& c) {
  rule(p, g, "cut", {{"C", BindingValue::of(c)}});
}

void mp(Provable& p, size_t g, size_t j, const FormulaPtr& b) {
  rule(p, g, "MP", {{"j", idx(j)}, {"B", BindingValue::of(b)}});
}

void weaken_ante_all(Provable& p, size_t g) {
  while (!p.goals.at(g).ante.empty())
    rule(p, g, "weakenl", {{"i", idx(p.goals.at(g).ante.size() - 1)}});
}

// removes every succedent entry except the one currently at index `keep`
void weaken_succ_except(Provable& p, size_t g, size_t keep) {
  size_t kept = keep;
  while (p.goals.at(g).succ.size() > 1) {
    size_t j = kept == 0 ? 1 : 0;
    rule(p, g, "weakenr", {{"j", idx(j)}});
    if (j < kept) kept--;
  }
}

void inline_provable(Provable& p, size_t g, const Provable& fact) {
  if (!equal(p.goals.at(g), fact.conclusion))
    throw GoalShapeMismatch("inline: goal differs from fact conclusion: " +
                            pretty(p.goals.at(g)) + "   vs   " +
                            pretty(fact.conclusion));
  for (const auto& st : fact.trace) {
    if (st.rule == "admit")
      admit_arith_inplace(p, st.goal + g);
    else
      apply_rule_inplace(p, st.goal + g, st.rule, st.bindings);
  }
}

using Closer = std::function<void(Provable&, size_t)>;

Closer closer_of_axiom(const std::string& id, const Bindings& b) {
  return [id, b](Provable& p, size_t g) { ax_close(p, g, 0, id, b); };
}

Closer closer_of_provable(std::shared_ptr<const Provable> pv) {
  return [pv](Provable& p, size_t g) { inline_provable(p, g, *pv); };
}

// Cuts the axiom instance into goal g and closes the rest propositionally.
void close_via_axiom_prop(Provable& p, size_t g, const std::string& id,
                          const Bindings& b) {
  FormulaPtr inst = build_axiom_instance(id, b);
  cut_fml(p, g, inst);
  ax_close(p, g, p.goals.at(g).succ.size() - 1, id, b);
  prop_close(p, g);
}

// succ[j] must equal the tail of the (possibly curried implication) axiom
// instance Q1 -> (... -> A).  Replaces the goal by premise goals
// [Gamma |- Qk] in order at positions g, g+1, ...; returns their count.
size_t apply_fml_axiom(Provable& p, size_t g, size_t j, const std::string& id,
                       const Bindings& b) {
  FormulaPtr inst = build_axiom_instance(id, b);
  const FormulaPtr target = p.goals.at(g).succ.at(j);
  std::vector<FormulaPtr> premises;
  FormulaPtr e = inst;
  while (!equal(e, target)) {
    if (e->kind != FK::Imply)
      throw GoalShapeMismatch("axiom " + id +
                              " does not conclude the goal formula");
    premises.push_back(e->f1);
    e = e->f2;
  }
  cut_fml(p, g, inst);
  ax_close(p, g, p.goals.at(g).succ.size() - 1, id, b);
  size_t n = premises.size();
  for (size_t k = 0; k < n; ++k) {
    size_t i = p.goals.at(g + k).ante.size() - 1;
    rule(p, g + k, "implyl", {{"i", idx(i)}});
    weaken_succ_except(p, g + k, p.goals.at(g + k).succ.size() - 1);
  }
  rule(p, g + n, "id",
       {{"i", idx(p.goals.at(g + n).ante.size() - 1)}, {"j", idx(j)}});
  return n;
}

// Replaces succ[j]=A by B; |- B -> A is discharged by cutting the axiom
// instance and propositional reasoning.  The rewritten goal stays at g.
void mp_via_axiom(Provable& p, size_t g, size_t j, const FormulaPtr& b,
                  const std::string& id, const Bindings& ab) {
  mp(p, g, j, b);
  close_via_axiom_prop(p, g, id, ab);
}

// ---------------------------------------------------------------------------
// Equivalence plumbing

void equiv_trans(Provable& p, size_t g, const FormulaPtr& ab,
                 const Closer& close_ab, const FormulaPtr& bc,
                 const Closer& close_bc) {
  cut_fml(p, g, ab);
  weaken_succ_except(p, g, p.goals.at(g).succ.size() - 1);
  weaken_ante_all(p, g);
  close_ab(p, g);
  cut_fml(p, g, bc);
  weaken_succ_except(p, g, p.goals.at(g).succ.size() - 1);
  weaken_ante_all(p, g);
  close_bc(p, g);
  prop_close(p, g);
}

// closes |- [a]x <-> [a]y given a closer for |- x <-> y
void box_congr_equiv(Provable& p, size_t g, const ProgramPtr& a,
                     const FormulaPtr& x, const FormulaPtr& y,
                     const Closer& close_xy) {
  rule(p, g, "equivr", {{"j", idx(0)}});
  for (int dir = 0; dir < 2; ++dir) {
    const FormulaPtr& u = dir == 0 ? x : y;
    const FormulaPtr& v = dir == 0 ? y : x;
    mp(p, g, 0, F::mk_box(a, u));
    Bindings kb;
    kb["a"] = BindingValue::of(a);
    kb["p"] = BindingValue::of(u);
    kb["q"] = BindingValue::of(v);
    apply_fml_axiom(p, g, 0, "K", kb);
    rule(p, g, "G", {{"j", idx(0)}});
    cut_fml(p, g, F::mk_equiv(x, y));
    weaken_succ_except(p, g, p.goals.at(g).succ.size() - 1);
    close_xy(p, g);
    prop_close(p, g);
    rule(p, g, "id",
         {{"i", idx(p.goals.at(g).ante.size() - 1)}, {"j", idx(0)}});
  }
}

// ---------------------------------------------------------------------------
// Program rewriting via CPE

// |- {a} == {b} given a closer for |- {b} == {a}
void progeq_flip(Provable& p, size_t g, const ProgramPtr& a,
                 const ProgramPtr& b, const Closer& close_ba) {
  Bindings ab;
  ab["a"] = BindingValue::of(a);
  ab["b"] = BindingValue::of(b);
  mp_via_axiom(p, g, 0,
               F::mk_and(F::mk_refines(a, b), F::mk_refines(b, a)),
               "leqantisym", ab);
  FormulaPtr flipped = F::mk_progeq(b, a);
  cut_fml(p, g, flipped);
  weaken_succ_except(p, g, p.goals.at(g).succ.size() - 1);
  weaken_ante_all(p, g);
  close_ba(p, g);
  Bindings ba;
  ba["a"] = BindingValue::of(b);
  ba["b"] = BindingValue::of(a);
  cut_fml(p, g, build_axiom_instance("leqantisym", ba));
  ax_close(p, g, p.goals.at(g).succ.size() - 1, "leqantisym", ba);
  prop_close(p, g);
}

// Rewrites succ[j] by replacing the program `sub` at `path` (within
// succ[j]) by `repl`; close_eq discharges |- {sub} == {repl}.
void rewrite_prog_at(Provable& p, size_t g, size_t j, const Path& path,
                     const ProgramPtr& sub, const ProgramPtr& repl,
                     const Closer& close_eq) {
  const FormulaPtr f = p.goals.at(g).succ.at(j);
  FormulaPtr f2 = replace_at(Expression(f), path, Expression(repl)).formula;
  mp(p, g, j, f2);
  FormulaPtr equ = F::mk_equiv(f, f2);
  cut_fml(p, g, equ);
  {
    size_t jj = p.goals.at(g).succ.size() - 1;
    Bindings cb;
    cb["j"] = idx(jj);
    cb["a"] = BindingValue::of(sub);
    cb["b"] = BindingValue::of(repl);
    rule(p, g, "CPE", cb);
    close_eq(p, g);
  }
  prop_close(p, g);
}

Closer eq_closer_ax(const std::string& id, const Bindings& b, Direction dir) {
  if (dir == Direction::LtR) return closer_of_axiom(id, b);
  FormulaPtr inst = build_axiom_instance(id, b);
  ProgramPtr lhs = inst->p1, rhs = inst->p2;
  Closer base = closer_of_axiom(id, b);
  return [base, lhs, rhs](Provable& q, size_t gg) {
    progeq_flip(q, gg, rhs, lhs, base);
  };
}

Closer eq_closer_fact(std::shared_ptr<const Provable> pv, Direction dir) {
  const FormulaPtr st = pv->conclusion.succ.at(0);
  if (dir == Direction::LtR) return closer_of_provable(pv);
  ProgramPtr lhs = st->p1, rhs = st->p2;
  Closer base = closer_of_provable(pv);
  return [base, lhs, rhs](Provable& q, size_t gg) {
    progeq_flip(q, gg, rhs, lhs, base);
  };
}

// ---------------------------------------------------------------------------
// Leaf discharge and the congruence engines

struct LeafFact {
  FormulaPtr statement;
  FormulaPtr f_lhs, f_rhs;   // formula facts
  ProgramPtr p_lhs, p_rhs;   // program facts
  Closer close_stmt;
};

// closes [x |- y] where x and y relate propositionally via the statement
void close_formula_leaf(Provable& p, size_t g, const LeafFact& lf) {
  cut_fml(p, g, lf.statement);
  weaken_succ_except(p, g, p.goals.at(g).succ.size() - 1);
  weaken_ante_all(p, g);
  lf.close_stmt(p, g);
  prop_close(p, g);
}

// closes |- {x} <= {y} where (x, y) == (p_lhs, p_rhs)
void close_program_leaf(Provable& p, size_t g, const LeafFact& lf) {
  const Sequent& s = p.goals.at(g);
  if (!s.ante.empty() || s.succ.size() != 1 ||
      s.succ[0]->kind != FK::Refines)
    throw GoalShapeMismatch("program leaf expects |- {x} <= {y}");
  if (equal(s.succ[0], lf.statement)) {
    lf.close_stmt(p, g);
    return;
  }
  FormulaPtr want = F::mk_refines(lf.p_lhs, lf.p_rhs);
  if (!equal(s.succ[0], want))
    throw GoalShapeMismatch("fact does not justify the leaf refinement: " +
                            pretty(s.succ[0]));
  cut_fml(p, g, lf.statement);
  weaken_succ_except(p, g, p.goals.at(g).succ.size() - 1);
  lf.close_stmt(p, g);
  if (lf.statement->kind == FK::ProgEq) {
    Bindings ab;
    ab["a"] = BindingValue::of(lf.statement->p1);
    ab["b"] = BindingValue::of(lf.statement->p2);
    cut_fml(p, g, build_axiom_instance("leqantisym", ab));
    ax_close(p, g, p.goals.at(g).succ.size() - 1, "leqantisym", ab);
  }
  prop_close(p, g);
}

void congr_formula(Provable& p, size_t g, const Path& path,
                   const LeafFact& lf);
void congr_program(Provable& p, size_t g, const Path& path,
                   const LeafFact& lf);

// reduces a chain [y1 := e1]...[yk := ek]F of assignment boxes at succ[0]
// to the substituted first-order core and admits it.
void reduce_assign_boxes_and_admit(Provable& p, size_t g) {
  while (true) {
    const FormulaPtr f = p.goals.at(g).succ.at(0);
    if (f->kind != FK::Box || f->p1->kind != PK::Assign) break;
    Bindings ab;
    ab["x"] = BindingValue::of(f->p1->var);
    ab["e"] = BindingValue::of(f->p1->term);
    ab["p"] = BindingValue::of(f->f1);
    FormulaPtr reduced = subst(f->f1, f->p1->var, f->p1->term);
    mp_via_axiom(p, g, 0, reduced,
                 f->p1->var.primed ? "assignb_prime" : "assignb", ab);
  }
  admit_arith_inplace(p, g);
}

// [X |- Y] with X, Y differing exactly at `path`
void congr_formula(Provable& p, size_t g, const Path& path,
                   const LeafFact& lf) {
  const Sequent s = p.goals.at(g);
  if (s.ante.size() != 1 || s.succ.size() != 1)
    throw GoalShapeMismatch("congruence expects a one-one sequent");
  const FormulaPtr X = s.ante[0];
  const FormulaPtr Y = s.succ[0];
  if (path.empty()) {
    close_formula_leaf(p, g, lf);
    return;
  }
  size_t head = path.front();
  Path rest(path.begin() + 1, path.end());
  if (X->kind != Y->kind)
    throw GoalShapeMismatch("congruence: node kinds differ");
  switch (X->kind) {
    case FK::And: {
      rule(p, g, "andl", {{"i", idx(0)}});
      rule(p, g, "andr", {{"j", idx(0)}});
      for (size_t which = 0; which < 2; ++which) {
        if (which == head) {
          rule(p, g, "weakenl", {{"i", idx(1 - which)}});
          congr_formula(p, g, rest, lf);
        } else {
          rule(p, g, "id", {{"i", idx(which)}, {"j", idx(0)}});
        }
      }
      return;
    }
    case FK::Or: {
      rule(p, g, "orl", {{"i", idx(0)}});
      for (size_t which = 0; which < 2; ++which) {
        rule(p, g, "orr", {{"j", idx(0)}});
        rule(p, g, "weakenr", {{"j", idx(1 - which)}});
        if (which == head)
          congr_formula(p, g, rest, lf);
        else
          rule(p, g, "id", {{"i", idx(0)}, {"j", idx(0)}});
      }
      return;
    }
    case FK::Imply: {
      rule(p, g, "implyr", {{"j", idx(0)}});
      rule(p, g, "implyl", {{"i", idx(0)}});
      if (head == 0) {
        rule(p, g, "weakenr", {{"j", idx(0)}});
        congr_formula(p, g, rest, lf);  // [Y1 |- X1], flipped
        rule(p, g, "id", {{"i", idx(0)}, {"j", idx(0)}});
      } else {
        rule(p, g, "id", {{"i", idx(0)}, {"j", idx(1)}});
        rule(p, g, "weakenl", {{"i", idx(1)}});
        congr_formula(p, g, rest, lf);
      }
      return;
    }
    case FK::Not: {
      rule(p, g, "notr", {{"j", idx(0)}});
      rule(p, g, "notl", {{"i", idx(0)}});
      congr_formula(p, g, rest, lf);
      return;
    }
    case FK::Forall: {
      rule(p, g, "allr", {{"j", idx(0)}, {"y", BindingValue::of(Y->var)}});
      rule(p, g, "alll",
           {{"i", idx(0)}, {"t", BindingValue::of(Term::mk_var(X->var))}});
      congr_formula(p, g, rest, lf);
      return;
    }
    case FK::Exists: {
      rule(p, g, "existsl", {{"i", idx(0)}, {"y", BindingValue::of(X->var)}});
      rule(p, g, "existsr",
           {{"j", idx(0)}, {"t", BindingValue::of(Term::mk_var(Y->var))}});
      congr_formula(p, g, rest, lf);
      return;
    }
    case FK::Box: {
      if (head == 1) {
        mp(p, g, 0, X);
        Bindings kb;
        kb["a"] = BindingValue::of(X->p1);
        kb["p"] = BindingValue::of(X->f1);
        kb["q"] = BindingValue::of(Y->f1);
        apply_fml_axiom(p, g, 0, "K", kb);
        rule(p, g, "G", {{"j", idx(0)}});
        rule(p, g, "implyr", {{"j", idx(0)}});
        congr_formula(p, g, rest, lf);
        rule(p, g, "id", {{"i", idx(0)}, {"j", idx(0)}});
      } else {
        mp(p, g, 0, X);
        Bindings bb;
        bb["a"] = BindingValue::of(Y->p1);
        bb["b"] = BindingValue::of(X->p1);
        bb["p"] = BindingValue::of(X->f1);
        apply_fml_axiom(p, g, 0, "boxref", bb);
        congr_program(p, g, rest, lf);  // |- {Y-prog} <= {X-prog}
        rule(p, g, "id", {{"i", idx(0)}, {"j", idx(0)}});
      }
      return;
    }
    case FK::Refines: {
      if (head == 0) {
        mp(p, g, 0, X);
        Bindings tb;
        tb["a"] = BindingValue::of(Y->p1);
        tb["b"] = BindingValue::of(X->p1);
        tb["c"] = BindingValue::of(X->p2);
        apply_fml_axiom(p, g, 0, "leqtrans", tb);
        congr_program(p, g, rest, lf);  // |- {Y-left} <= {X-left}
        rule(p, g, "id", {{"i", idx(0)}, {"j", idx(0)}});
      } else {
        Bindings tb;
        tb["a"] = BindingValue::of(X->p1);
        tb["b"] = BindingValue::of(X->p2);
        tb["c"] = BindingValue::of(Y->p2);
        cut_fml(p, g, build_axiom_instance("leqtrans", tb));
        ax_close(p, g, p.goals.at(g).succ.size() - 1, "leqtrans", tb);
        size_t ie = p.goals.at(g).ante.size() - 1;
        rule(p, g, "implyl", {{"i", idx(ie)}});
        rule(p, g, "id", {{"i", idx(0)}, {"j", idx(1)}});
        ie = p.goals.at(g).ante.size() - 1;
        rule(p, g, "implyl", {{"i", idx(ie)}});
        rule(p, g, "weakenr", {{"j", idx(0)}});
        rule(p, g, "weakenl", {{"i", idx(0)}});
        congr_program(p, g, rest, lf);  // |- {X-right} <= {Y-right}
        rule(p, g, "id",
             {{"i", idx(p.goals.at(g).ante.size() - 1)}, {"j", idx(0)}});
      }
      return;
    }
    case FK::Diamond:
      throw UnsupportedShape(
          "rewriting under a surface diamond is not supported");
    case FK::Equiv:
    case FK::ProgEq:
      throw PolarityError("no definite polarity under an equivalence");
    default:
      throw GoalShapeMismatch("congruence hit a leaf without a hole");
  }
}

// |- {X} <= {Y} with X, Y differing exactly at `path`
void congr_program(Provable& p, size_t g, const Path& path,
                   const LeafFact& lf) {
  const Sequent s = p.goals.at(g);
  if (!s.ante.empty() || s.succ.size() != 1 ||
      s.succ[0]->kind != FK::Refines)
    throw GoalShapeMismatch("program congruence expects |- {X} <= {Y}");
  const ProgramPtr X = s.succ[0]->p1;
  const ProgramPtr Y = s.succ[0]->p2;
  if (path.empty()) {
    close_program_leaf(p, g, lf);
    return;
  }
  size_t head = path.front();
  Path rest(path.begin() + 1, path.end());
  if (X->kind != Y->kind)
    throw GoalShapeMismatch("congruence: program kinds differ");
  auto refl_close = [&](size_t gg, const ProgramPtr& a) {
    weaken_ante_all(p, gg);
    Bindings rb;
    rb["a"] = BindingValue::of(a);
    ax_close(p, gg, 0, "leqrefl", rb);
  };
  switch (X->kind) {
    case PK::Seq: {
      Bindings sb;
      sb["a"] = BindingValue::of(X->p1);
      sb["b"] = BindingValue::of(X->p2);
      sb["c"] = BindingValue::of(Y->p1);
      sb["d"] = BindingValue::of(Y->p2);
      FormulaPtr pre =
          F::mk_and(F::mk_refines(X->p1, Y->p1),
                    F::mk_box(X->p1, F::mk_refines(X->p2, Y->p2)));
      mp_via_axiom(p, g, 0, pre, "sequence", sb);
      rule(p, g, "andr", {{"j", idx(0)}});
      if (head == 0) {
        congr_program(p, g, rest, lf);
        rule(p, g, "G", {{"j", idx(0)}});
        refl_close(g, X->p2);
      } else {
        refl_close(g, X->p1);
        rule(p, g, "G", {{"j", idx(0)}});
        congr_program(p, g, rest, lf);
      }
      return;
    }
    case PK::Choice: {
      Bindings cb;
      cb["a"] = BindingValue::of(X->p1);
      cb["b"] = BindingValue::of(X->p2);
      cb["c"] = BindingValue::of(Y);
      FormulaPtr pre =
          F::mk_and(F::mk_refines(X->p1, Y), F::mk_refines(X->p2, Y));
      mp_via_axiom(p, g, 0, pre, "choicel", cb);
      rule(p, g, "andr", {{"j", idx(0)}});
      for (size_t which = 0; which < 2; ++which) {
        const ProgramPtr& xi = which == 0 ? X->p1 : X->p2;
        Bindings rb;
        rb["a"] = BindingValue::of(xi);
        rb["b"] = BindingValue::of(Y->p1);
        rb["c"] = BindingValue::of(Y->p2);
        mp_via_axiom(p, g, 0,
                     F::mk_or(F::mk_refines(xi, Y->p1),
                              F::mk_refines(xi, Y->p2)),
                     "choicer", rb);
        rule(p, g, "orr", {{"j", idx(0)}});
        rule(p, g, "weakenr", {{"j", idx(1 - which)}});
        if (which == head)
          congr_program(p, g, rest, lf);
        else
          refl_close(g, xi);
      }
      return;
    }
    case PK::Star: {
      Bindings ub;
      ub["a"] = BindingValue::of(X->p1);
      ub["b"] = BindingValue::of(Y->p1);
      mp_via_axiom(p, g, 0, F::mk_box(X, F::mk_refines(X->p1, Y->p1)),
                   "unloop", ub);
      rule(p, g, "G", {{"j", idx(0)}});
      congr_program(p, g, rest, lf);
      return;
    }
    case PK::Test: {
      Bindings tb;
      tb["p"] = BindingValue::of(X->fml);
      tb["q"] = BindingValue::of(Y->fml);
      mp_via_axiom(p, g, 0, F::mk_imply(X->fml, Y->fml), "test", tb);
      rule(p, g, "implyr", {{"j", idx(0)}});
      congr_formula(p, g, rest, lf);
      return;
    }
    case PK::ODE: {
      if (head != X->odes.size())
        throw InvalidPath(
            "only the evolution domain is a formula position of an ODE");
      Bindings ob;
      ob["ode1"] = BindingValue::of(X);
      ob["ode2"] = BindingValue::of(Y);
      FormulaPtr body = Y->fml;
      for (size_t i = Y->odes.size(); i-- > 0;)
        body = F::mk_and(
            F::mk_cmp(CmpOp::Eq, Term::mk_var(Y->odes[i].var.prime()),
                      Y->odes[i].rhs),
            body);
      mp_via_axiom(p, g, 0, F::mk_box(X, body), "refode", ob);
      for (size_t i = 0; i < Y->odes.size(); ++i) {
        const FormulaPtr cur = p.goals.at(g).succ.at(0);
        Bindings bb;
        bb["a"] = BindingValue::of(X);
        bb["p"] = BindingValue::of(cur->f1->f1);
        bb["q"] = BindingValue::of(cur->f1->f2);
        mp_via_axiom(p, g, 0,
                     F::mk_and(F::mk_box(X, cur->f1->f1),
                               F::mk_box(X, cur->f1->f2)),
                     "band", bb);
        rule(p, g, "andr", {{"j", idx(0)}});
        {
          Bindings de;
          de["ode"] = BindingValue::of(X);
          de["p"] = BindingValue::of(p.goals.at(g).succ.at(0)->f1);
          FormulaPtr inner = p.goals.at(g).succ.at(0)->f1;
          for (size_t k = X->odes.size(); k-- > 0;)
            inner = F::mk_box(
                P::mk_assign(X->odes[k].var.prime(), X->odes[k].rhs), inner);
          mp_via_axiom(p, g, 0, F::mk_box(X, inner), "DE", de);
          rule(p, g, "G", {{"j", idx(0)}});
          reduce_assign_boxes_and_admit(p, g);
        }
      }
      rule(p, g, "dW", {{"j", idx(0)}});
      congr_formula(p, g, rest, lf);
      return;
    }
    default:
      throw GoalShapeMismatch("congruence hit a program leaf without a hole");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Facts

Fact fact_from_axiom(const std::string& axiom_id, const Bindings& bindings) {
  Fact f;
  f.statement = build_axiom_instance(axiom_id, bindings);
  f.axiom = AxiomInstance{axiom_id, bindings};
  switch (f.statement->kind) {
    case FK::Refines: f.kind = Fact::Kind::Refinement; break;
    case FK::ProgEq: f.kind = Fact::Kind::ProgEquivalence; break;
    case FK::Imply: f.kind = Fact::Kind::Implication; break;
    case FK::Equiv: f.kind = Fact::Kind::Equivalence; break;
    default:
      throw KindMismatch("axiom " + axiom_id +
                         " is not usable as a rewriting fact");
  }
  return f;
}

Fact fact_from_provable(const Provable& p) {
  if (!p.proved() || p.conclusion.succ.size() != 1 ||
      !p.conclusion.ante.empty())
    throw GoalShapeMismatch("facts need a proved |- statement certificate");
  Fact f;
  f.statement = p.conclusion.succ[0];
  f.derivation = std::make_shared<Provable>(p);
  switch (f.statement->kind) {
    case FK::Refines: f.kind = Fact::Kind::Refinement; break;
    case FK::ProgEq: f.kind = Fact::Kind::ProgEquivalence; break;
    case FK::Imply: f.kind = Fact::Kind::Implication; break;
    case FK::Equiv: f.kind = Fact::Kind::Equivalence; break;
    default: throw KindMismatch("statement is not usable as a fact");
  }
  return f;
}

namespace {

Closer closer_of_fact(const Fact& f) {
  if (f.axiom) return closer_of_axiom(f.axiom->axiom_id, f.axiom->bindings);
  return closer_of_provable(f.derivation);
}

LeafFact leaf_of_fact(const Fact& f) {
  LeafFact lf;
  lf.statement = f.statement;
  lf.close_stmt = closer_of_fact(f);
  switch (f.kind) {
    case Fact::Kind::Refinement:
    case Fact::Kind::ProgEquivalence:
      lf.p_lhs = f.statement->p1;
      lf.p_rhs = f.statement->p2;
      break;
    case Fact::Kind::Implication:
    case Fact::Kind::Equivalence:
      lf.f_lhs = f.statement->f1;
      lf.f_rhs = f.statement->f2;
      break;
  }
  return lf;
}

Expression fact_lhs(const Fact& f) {
  if (f.kind == Fact::Kind::Refinement ||
      f.kind == Fact::Kind::ProgEquivalence)
    return Expression(f.statement->p1);
  return Expression(f.statement->f1);
}

Expression fact_rhs(const Fact& f) {
  if (f.kind == Fact::Kind::Refinement ||
      f.kind == Fact::Kind::ProgEquivalence)
    return Expression(f.statement->p2);
  return Expression(f.statement->f2);
}

}  // namespace

// ---------------------------------------------------------------------------
// use_at

Provable use_at(const Provable& p0, size_t goal, const Path& path,
                const Fact& fact, Direction dir, TacticSession*) {
  Provable p = p0;
  if (goal >= p.goals.size()) throw NoSuchGoal("use_at: no such goal");
  if (p.goals[goal].succ.empty())
    throw GoalShapeMismatch("use_at: goal has no succedent");
  const FormulaPtr F0 = p.goals[goal].succ[0];
  auto [ctx, sub] = split_at(Expression(F0), path);
  Expression matched = dir == Direction::LtR ? fact_lhs(fact) : fact_rhs(fact);
  Expression repl = dir == Direction::LtR ? fact_rhs(fact) : fact_lhs(fact);
  if (!equal(sub, matched))
    throw GoalShapeMismatch(
        "use_at: subexpression does not match the fact side: " + pretty(sub) +
        "   vs   " + pretty(matched));

  if (fact.kind == Fact::Kind::ProgEquivalence) {
    Closer eq_closer;
    if (dir == Direction::LtR) {
      eq_closer = closer_of_fact(fact);
    } else {
      Closer base = closer_of_fact(fact);
      ProgramPtr a = repl.program, b = matched.program;
      eq_closer = [base, a, b](Provable& q, size_t gg) {
        progeq_flip(q, gg, b, a, base);
      };
    }
    rewrite_prog_at(p, goal, 0, path, sub.program, repl.program, eq_closer);
    return p;
  }

  if (ctx.polarity == Polarity::None)
    throw PolarityError("use_at: no definite polarity at this position");
  bool anti = ctx.polarity == Polarity::Antitone;
  if (fact.kind == Fact::Kind::Refinement ||
      fact.kind == Fact::Kind::Implication) {
    if (dir == Direction::LtR && !anti)
      throw PolarityError("left-to-right rewriting needs an antitone position");
    if (dir == Direction::RtL && anti)
      throw PolarityError("right-to-left rewriting needs a monotone position");
  }
  if ((fact.kind == Fact::Kind::Refinement) !=
      (ctx.hole_kind == ExprKind::Program))
    throw KindMismatch("fact kind does not match the hole kind");

  FormulaPtr F2 = replace_at(Expression(F0), path, repl).formula;
  mp(p, goal, 0, F2);
  rule(p, goal, "implyr", {{"j", idx(0)}});
  congr_formula(p, goal, path, leaf_of_fact(fact));
  return p;
}

// ---------------------------------------------------------------------------
// Equivalence and refinement chains

namespace {

struct EqChain {
  Provable& p;
  size_t g;
  ProgramPtr current;
  ProgramPtr target;

  void rewrite(const Path& path, const ProgramPtr& sub, const ProgramPtr& repl,
               const Closer& close_eq) {
    rewrite_prog_at(p, g, 0, cat({0}, path), sub, repl, close_eq);
    current = replace_at(Expression(current), path, Expression(repl)).program;
  }

  void rewrite_ax(const Path& path, const std::string& id, const Bindings& b,
                  Direction dir) {
    FormulaPtr inst = build_axiom_instance(id, b);
    ProgramPtr sub = dir == Direction::LtR ? inst->p1 : inst->p2;
    ProgramPtr repl = dir == Direction::LtR ? inst->p2 : inst->p1;
    rewrite(path, sub, repl, eq_closer_ax(id, b, dir));
  }

  void rewrite_fact(const Path& path, const Provable& fact, Direction dir) {
    auto pv = std::make_shared<Provable>(fact);
    const FormulaPtr st = pv->conclusion.succ.at(0);
    ProgramPtr sub = dir == Direction::LtR ? st->p1 : st->p2;
    ProgramPtr repl = dir == Direction::LtR ? st->p2 : st->p1;
    rewrite(path, sub, repl, eq_closer_fact(pv, dir));
  }

  void finish() {
    if (!equal(current, target))
      throw GoalShapeMismatch("chain did not reach the target: " +
                              pretty(current) + "   vs   " + pretty(target));
    Bindings ab;
    ab["a"] = BindingValue::of(target);
    ab["b"] = BindingValue::of(target);
    mp_via_axiom(p, g, 0,
                 F::mk_and(F::mk_refines(target, target),
                           F::mk_refines(target, target)),
                 "leqantisym", ab);
    rule(p, g, "andr", {{"j", idx(0)}});
    Bindings rb;
    rb["a"] = BindingValue::of(target);
    weaken_ante_all(p, g);
    ax_close(p, g, 0, "leqrefl", rb);
    weaken_ante_all(p, g);
    ax_close(p, g, 0, "leqrefl", rb);
  }
};

EqChain start_eq_chain(Provable& p, size_t g) {
  const Sequent& s = p.goals.at(g);
  if (s.succ.size() != 1 || s.succ[0]->kind != FK::ProgEq)
    throw GoalShapeMismatch("equivalence chain expects |- {L} == {R}");
  return EqChain{p, g, s.succ[0]->p1, s.succ[0]->p2};
}

struct RefChain {
  Provable& p;
  size_t g;
  ProgramPtr current;
  ProgramPtr target;

  void rewrite_eq(const Path& path, const ProgramPtr& sub,
                  const ProgramPtr& repl, const Closer& close_eq) {
    rewrite_prog_at(p, g, 0, cat({0}, path), sub, repl, close_eq);
    current = replace_at(Expression(current), path, Expression(repl)).program;
  }

  void rewrite_eq_ax(const Path& path, const std::string& id,
                     const Bindings& b, Direction dir) {
    FormulaPtr inst = build_axiom_instance(id, b);
    ProgramPtr sub = dir == Direction::LtR ? inst->p1 : inst->p2;
    ProgramPtr repl = dir == Direction::LtR ? inst->p2 : inst->p1;
    rewrite_eq(path, sub, repl, eq_closer_ax(id, b, dir));
  }

  void rewrite_eq_fact(const Path& path, const Provable& fact,
                       Direction dir) {
    auto pv = std::make_shared<Provable>(fact);
    const FormulaPtr st = pv->conclusion.succ.at(0);
    ProgramPtr sub = dir == Direction::LtR ? st->p1 : st->p2;
    ProgramPtr repl = dir == Direction::LtR ? st->p2 : st->p1;
    rewrite_eq(path, sub, repl, eq_closer_fact(pv, dir));
  }

  // refinement step current <= next; close_ref runs on a goal
  // [Gamma |- {current} <= {next}] with the chain's antecedent preserved.
  void step(const ProgramPtr& next, const Closer& close_ref) {
    Bindings tb;
    tb["a"] = BindingValue::of(current);
    tb["b"] = BindingValue::of(next);
    tb["c"] = BindingValue::of(target);
    cut_fml(p, g, build_axiom_instance("leqtrans", tb));
    ax_close(p, g, p.goals.at(g).succ.size() - 1, "leqtrans", tb);
    size_t ie = p.goals.at(g).ante.size() - 1;
    rule(p, g, "implyl", {{"i", idx(ie)}});
    weaken_succ_except(p, g, p.goals.at(g).succ.size() - 1);
    close_ref(p, g);
    ie = p.goals.at(g).ante.size() - 1;
    rule(p, g, "implyl", {{"i", idx(ie)}});
    weaken_succ_except(p, g, p.goals.at(g).succ.size() - 1);
    rule(p, g + 1, "id",
         {{"i", idx(p.goals.at(g + 1).ante.size() - 1)}, {"j", idx(0)}});
    current = next;
  }

  // refinement step rewriting a subprogram via the congruence engine
  void step_congr(const Path& path, const ProgramPtr& sub,
                  const ProgramPtr& repl, const LeafFact& lf) {
    (void)sub;
    ProgramPtr next =
        replace_at(Expression(current), path, Expression(repl)).program;
    step(next, [&](Provable& q, size_t gg) {
      weaken_ante_all(q, gg);
      congr_program(q, gg, path, lf);
    });
  }

  void finish() {
    if (!equal(current, target))
      throw GoalShapeMismatch("refinement chain did not reach the target: " +
                              pretty(current) + "   vs   " + pretty(target));
    weaken_ante_all(p, g);
    Bindings rb;
    rb["a"] = BindingValue::of(target);
    ax_close(p, g, 0, "leqrefl", rb);
  }
};

RefChain start_ref_chain(Provable& p, size_t g) {
  const Sequent& s = p.goals.at(g);
  if (s.succ.size() != 1 || s.succ[0]->kind != FK::Refines)
    throw GoalShapeMismatch("refinement chain expects |- {L} <= {R}");
  return RefChain{p, g, s.succ[0]->p1, s.succ[0]->p2};
}

ProgramPtr test_true() { return P::mk_test(F::mk_true()); }

ProgramPtr seq2(ProgramPtr a, ProgramPtr b) {
  return P::mk_seq(std::move(a), std::move(b));
}

FormulaPtr progeq(ProgramPtr a, ProgramPtr b) {
  return F::mk_progeq(std::move(a), std::move(b));
}

Provable prove_progeq(const FormulaPtr& stmt,
                      const std::function<void(EqChain&)>& steps) {
  Sequent s;
  s.succ.push_back(stmt);
  Provable p = new_goal(s);
  EqChain ch = start_eq_chain(p, 0);
  steps(ch);
  ch.finish();
  return p;
}

std::shared_ptr<const Provable> cache_get(TacticSession* s,
                                          const std::string& key) {
  if (!s) return nullptr;
  auto it = s->cache.find(key);
  return it == s->cache.end() ? nullptr : it->second;
}

void cache_put(TacticSession* s, const std::string& key, const Provable& p) {
  if (s) s->cache[key] = std::make_shared<Provable>(p);
}

}  // namespace

// ---------------------------------------------------------------------------
// Derived facts

Provable derive_randidem(const Variable& x, TacticSession* session) {
  ProgramPtr rx = P::mk_random(x);
  FormulaPtr stmt = progeq(seq2(rx, rx), rx);
  std::string key = "randidem:" + pretty(stmt);
  if (auto c = cache_get(session, key)) return *c;

  const std::string merge = x.primed ? "randtestmerge_prime" : "randtestmerge";
  Variable y = fresh_var("y", {Expression(rx)});
  Provable p = prove_progeq(stmt, [&](EqChain& ch) {
    Bindings b1;
    b1["a"] = BindingValue::of(rx);
    ch.rewrite_ax({1}, "seqidl", b1, Direction::RtL);
    Bindings b2;
    b2["x"] = BindingValue::of(x);
    b2["q"] = BindingValue::of(F::mk_true());
    b2["y"] = BindingValue::of(y);
    ch.rewrite_ax({}, merge, b2, Direction::LtR);
    {
      // ?(\exists y true) == ?true, closed with the quantifier rules
      FormulaPtr exy = F::mk_exists(y, F::mk_true());
      FormulaPtr eq_tests = progeq(P::mk_test(exy), test_true());
      Sequent s;
      s.succ.push_back(eq_tests);
      Provable sub = new_goal(s);
      Bindings ab;
      ab["a"] = BindingValue::of(P::mk_test(exy));
      ab["b"] = BindingValue::of(test_true());
      mp_via_axiom(sub, 0, 0,
                   F::mk_and(F::mk_refines(P::mk_test(exy), test_true()),
                             F::mk_refines(test_true(), P::mk_test(exy))),
                   "leqantisym", ab);
      rule(sub, 0, "andr", {{"j", idx(0)}});
      {
        Bindings tb;
        tb["p"] = BindingValue::of(exy);
        tb["q"] = BindingValue::of(F::mk_true());
        mp_via_axiom(sub, 0, 0, F::mk_imply(exy, F::mk_true()), "test", tb);
        rule(sub, 0, "implyr", {{"j", idx(0)}});
        rule(sub, 0, "closeTrue", {{"j", idx(0)}});
      }
      {
        Bindings tb;
        tb["p"] = BindingValue::of(F::mk_true());
        tb["q"] = BindingValue::of(exy);
        mp_via_axiom(sub, 0, 0, F::mk_imply(F::mk_true(), exy), "test", tb);
        rule(sub, 0, "implyr", {{"j", idx(0)}});
        rule(sub, 0, "existsr",
             {{"j", idx(0)}, {"t", BindingValue::of(Term::mk_int(0))}});
        rule(sub, 0, "closeTrue", {{"j", idx(0)}});
      }
      ch.rewrite_fact({1}, sub, Direction::LtR);
    }
    Bindings b3;
    b3["a"] = BindingValue::of(rx);
    ch.rewrite_ax({}, "seqidr", b3, Direction::LtR);
  });
  cache_put(session, key, p);
  return p;
}

namespace {

// {x:=*; x:=e} == {x:=e}   (x not in e)
Provable derive_rand_then_assign(const Variable& x, const TermPtr& e,
                                 TacticSession* session) {
  ProgramPtr rx = P::mk_random(x);
  ProgramPtr asg = P::mk_assign(x, e);
  FormulaPtr stmt = progeq(seq2(rx, asg), asg);
  std::string key = "randassign:" + pretty(stmt);
  if (auto c = cache_get(session, key)) return *c;
  const std::string upd = x.primed ? "update_prime" : "update";
  Provable randidem = derive_randidem(x, session);
  Provable p = prove_progeq(stmt, [&](EqChain& ch) {
    Bindings ub;
    ub["x"] = BindingValue::of(x);
    ub["e"] = BindingValue::of(e);
    ch.rewrite_ax({1}, upd, ub, Direction::LtR);
    ProgramPtr tst = P::mk_test(F::mk_cmp(CmpOp::Eq, Term::mk_var(x), e));
    Bindings sb;
    sb["a"] = BindingValue::of(rx);
    sb["b"] = BindingValue::of(rx);
    sb["c"] = BindingValue::of(tst);
    ch.rewrite_ax({}, "seqassoc", sb, Direction::RtL);
    ch.rewrite_fact({0}, randidem, Direction::LtR);
    ch.rewrite_ax({}, upd, ub, Direction::RtL);
  });
  cache_put(session, key, p);
  return p;
}

// {x:=*; b} == {b} when b overwrites x before reading it
Provable derive_rand_absorb(const Variable& x, const ProgramPtr& b,
                            TacticSession* session) {
  ProgramPtr rx = P::mk_random(x);
  FormulaPtr stmt = progeq(seq2(rx, b), b);
  std::string key = "randabsorb:" + pretty(stmt);
  if (auto c = cache_get(session, key)) return *c;

  Provable p = [&]() -> Provable {
    switch (b->kind) {
      case PK::Assign:
        if (b->var == x) return derive_rand_then_assign(x, b->term, session);
        break;
      case PK::Random:
        if (b->var == x) return derive_randidem(x, session);
        break;
      case PK::ODE: {
        for (const auto& eq : b->odes) {
          if (eq.var.prime() == x) {
            return prove_progeq(stmt, [&](EqChain& ch) {
              Bindings db;
              db["ode"] = BindingValue::of(b);
              db["v"] = BindingValue::of(eq.var);
              ch.rewrite_ax({}, "de_ref_l", db, Direction::RtL);
            });
          }
        }
        break;
      }
      case PK::Seq: {
        if (must_bound_vars(b->p1).count(x)) {
          Provable left = derive_rand_absorb(x, b->p1, session);
          return prove_progeq(stmt, [&](EqChain& ch) {
            Bindings sb;
            sb["a"] = BindingValue::of(rx);
            sb["b"] = BindingValue::of(b->p1);
            sb["c"] = BindingValue::of(b->p2);
            ch.rewrite_ax({}, "seqassoc", sb, Direction::RtL);
            ch.rewrite_fact({0}, left, Direction::LtR);
          });
        }
        break;
      }
      case PK::Choice: {
        Provable l = derive_rand_absorb(x, b->p1, session);
        Provable r = derive_rand_absorb(x, b->p2, session);
        return prove_progeq(stmt, [&](EqChain& ch) {
          Bindings db;
          db["a"] = BindingValue::of(rx);
          db["b"] = BindingValue::of(b->p1);
          db["c"] = BindingValue::of(b->p2);
          ch.rewrite_ax({}, "seqdistl", db, Direction::LtR);
          ch.rewrite_fact({0}, l, Direction::LtR);
          ch.rewrite_fact({1}, r, Direction::LtR);
        });
      }
      default: break;
    }
    throw UnsupportedShape("cannot absorb " + x.str() + " := * into " +
                           pretty(b));
  }();
  cache_put(session, key, p);
  return p;
}

// global star facts ---------------------------------------------------------

Provable derive_true_refines_star(const ProgramPtr& a, TacticSession* s) {
  ProgramPtr star = P::mk_star(a);
  FormulaPtr stmt = F::mk_refines(test_true(), star);
  std::string key = "truestar:" + pretty(stmt);
  if (auto c = cache_get(s, key)) return *c;
  Sequent sq;
  sq.succ.push_back(stmt);
  Provable p = new_goal(sq);
  RefChain ch = start_ref_chain(p, 0);
  Bindings cb;
  cb["a"] = BindingValue::of(test_true());
  cb["b"] = BindingValue::of(seq2(a, star));
  ch.step(P::mk_choice(test_true(), seq2(a, star)),
          [&](Provable& q, size_t gg) {
            weaken_ante_all(q, gg);
            ax_close(q, gg, 0, "choiceL", cb);
          });
  Bindings ub;
  ub["a"] = BindingValue::of(a);
  ch.rewrite_eq_ax({}, "unfold_l", ub, Direction::RtL);
  ch.finish();
  cache_put(s, key, p);
  return p;
}

Provable derive_refines_choice_right(const ProgramPtr& g0,
                                     const ProgramPtr& d, TacticSession* s) {
  FormulaPtr stmt = F::mk_refines(g0, P::mk_choice(d, g0));
  std::string key = "injr:" + pretty(stmt);
  if (auto c = cache_get(s, key)) return *c;
  Sequent sq;
  sq.succ.push_back(stmt);
  Provable p = new_goal(sq);
  Bindings rb;
  rb["a"] = BindingValue::of(g0);
  rb["b"] = BindingValue::of(d);
  rb["c"] = BindingValue::of(g0);
  mp_via_axiom(p, 0, 0,
               F::mk_or(F::mk_refines(g0, d), F::mk_refines(g0, g0)),
               "choicer", rb);
  rule(p, 0, "orr", {{"j", idx(0)}});
  rule(p, 0, "weakenr", {{"j", idx(0)}});
  Bindings lb;
  lb["a"] = BindingValue::of(g0);
  ax_close(p, 0, 0, "leqrefl", lb);
  cache_put(s, key, p);
  return p;
}

Provable derive_step_star_absorb(const ProgramPtr& a, TacticSession* s) {
  ProgramPtr star = P::mk_star(a);
  FormulaPtr stmt = F::mk_refines(seq2(a, star), star);
  std::string key = "stepstar:" + pretty(stmt);
  if (auto c = cache_get(s, key)) return *c;
  Sequent sq;
  sq.succ.push_back(stmt);
  Provable p = new_goal(sq);
  RefChain ch = start_ref_chain(p, 0);
  Provable inj = derive_refines_choice_right(seq2(a, star), test_true(), s);
  ch.step(P::mk_choice(test_true(), seq2(a, star)),
          closer_of_provable(std::make_shared<Provable>(inj)));
  Bindings ub;
  ub["a"] = BindingValue::of(a);
  ch.rewrite_eq_ax({}, "unfold_l", ub, Direction::RtL);
  ch.finish();
  cache_put(s, key, p);
  return p;
}

Provable derive_prog_refines_star(const ProgramPtr& a, TacticSession* s) {
  ProgramPtr star = P::mk_star(a);
  FormulaPtr stmt = F::mk_refines(a, star);
  std::string key = "progstar:" + pretty(stmt);
  if (auto c = cache_get(s, key)) return *c;
  Sequent sq;
  sq.succ.push_back(stmt);
  Provable p = new_goal(sq);
  RefChain ch = start_ref_chain(p, 0);
  Bindings ib;
  ib["a"] = BindingValue::of(a);
  ch.rewrite_eq_ax({}, "seqidr", ib, Direction::RtL);
  Provable t2s = derive_true_refines_star(a, s);
  LeafFact lf;
  lf.statement = t2s.conclusion.succ[0];
  lf.p_lhs = test_true();
  lf.p_rhs = star;
  lf.close_stmt = closer_of_provable(std::make_shared<Provable>(t2s));
  ch.step_congr({1}, test_true(), star, lf);
  Provable abs = derive_step_star_absorb(a, s);
  ch.step(star, closer_of_provable(std::make_shared<Provable>(abs)));
  ch.finish();
  cache_put(s, key, p);
  return p;
}

Provable derive_star_star(const ProgramPtr& a, TacticSession* s) {
  ProgramPtr star = P::mk_star(a);
  FormulaPtr stmt = F::mk_refines(seq2(star, star), star);
  std::string key = "starstar:" + pretty(stmt);
  if (auto c = cache_get(s, key)) return *c;
  Sequent sq;
  sq.succ.push_back(stmt);
  Provable p = new_goal(sq);
  Bindings lb;
  lb["a"] = BindingValue::of(a);
  lb["b"] = BindingValue::of(star);
  mp_via_axiom(p, 0, 0,
               F::mk_box(star, F::mk_refines(seq2(a, star), star)), "loopl",
               lb);
  rule(p, 0, "G", {{"j", idx(0)}});
  Provable abs = derive_step_star_absorb(a, s);
  inline_provable(p, 0, abs);
  cache_put(s, key, p);
  return p;
}

Provable derive_star_absorb_right(const ProgramPtr& a, TacticSession* s) {
  ProgramPtr star = P::mk_star(a);
  FormulaPtr stmt = F::mk_refines(seq2(star, a), star);
  std::string key = "starabsr:" + pretty(stmt);
  if (auto c = cache_get(s, key)) return *c;
  Sequent sq;
  sq.succ.push_back(stmt);
  Provable p = new_goal(sq);
  RefChain ch = start_ref_chain(p, 0);
  Provable sub = derive_prog_refines_star(a, s);
  LeafFact lf;
  lf.statement = sub.conclusion.succ[0];
  lf.p_lhs = a;
  lf.p_rhs = star;
  lf.close_stmt = closer_of_provable(std::make_shared<Provable>(sub));
  ch.step_congr({1}, a, star, lf);
  Provable ss = derive_star_star(a, s);
  ch.step(star, closer_of_provable(std::make_shared<Provable>(ss)));
  ch.finish();
  cache_put(s, key, p);
  return p;
}

Provable derive_notfree_impl(const ProgramPtr& a, const Variable& x,
                             TacticSession* session);

// aux: {{b}*; x:=*} == {x:=*; {b; x:=*}*}   (x not free in b)
Provable derive_aux_impl(const ProgramPtr& b, const Variable& x,
                         TacticSession* session) {
  ProgramPtr rx = P::mk_random(x);
  ProgramPtr star_b = P::mk_star(b);
  ProgramPtr brx = seq2(b, rx);
  ProgramPtr star_brx = P::mk_star(brx);
  FormulaPtr stmt = progeq(seq2(star_b, rx), seq2(rx, star_brx));
  std::string key = "aux:" + pretty(stmt);
  if (auto c = cache_get(session, key)) return *c;

  const std::string skipax = x.primed ? "skip_prime" : "skip";
  Sequent sq;
  sq.succ.push_back(stmt);
  Provable p = new_goal(sq);
  Bindings ab;
  ab["a"] = BindingValue::of(seq2(star_b, rx));
  ab["b"] = BindingValue::of(seq2(rx, star_brx));
  mp_via_axiom(
      p, 0, 0,
      F::mk_and(F::mk_refines(seq2(star_b, rx), seq2(rx, star_brx)),
                F::mk_refines(seq2(rx, star_brx), seq2(star_b, rx))),
      "leqantisym", ab);
  rule(p, 0, "andr", {{"j", idx(0)}});

  // {b}*; x:=*  <=  x:=*; {b; x:=*}*
  {
    RefChain ch = start_ref_chain(p, 0);
    Bindings i1;
    i1["a"] = BindingValue::of(rx);
    ch.rewrite_eq_ax({1}, "seqidr", i1, Direction::RtL);
    {
      Bindings cb;
      cb["a"] = BindingValue::of(test_true());
      cb["b"] = BindingValue::of(seq2(brx, star_brx));
      LeafFact lf;
      lf.statement = build_axiom_instance("choiceL", cb);
      lf.p_lhs = test_true();
      lf.p_rhs = P::mk_choice(test_true(), seq2(brx, star_brx));
      lf.close_stmt = closer_of_axiom("choiceL", cb);
      ch.step_congr({1, 1}, test_true(), lf.p_rhs, lf);
    }
    Bindings u1;
    u1["a"] = BindingValue::of(brx);
    ch.rewrite_eq_ax({1, 1}, "unfold_l", u1, Direction::RtL);
    // {b}*; (x:=*; {b;x:=*}*)  <=  x:=*; {b;x:=*}*   by loopl + (B)
    {
      ProgramPtr beta = seq2(rx, star_brx);
      Sequent sb2;
      sb2.succ.push_back(F::mk_refines(seq2(b, beta), beta));
      Provable pb = new_goal(sb2);
      {
        RefChain chb = start_ref_chain(pb, 0);
        Bindings t1;
        t1["a"] = BindingValue::of(b);
        t1["b"] = BindingValue::of(rx);
        t1["c"] = BindingValue::of(star_brx);
        chb.rewrite_eq_ax({}, "seqassoc", t1, Direction::RtL);
        Provable inj = derive_refines_choice_right(seq2(brx, star_brx),
                                                   test_true(), session);
        chb.step(P::mk_choice(test_true(), seq2(brx, star_brx)),
                 closer_of_provable(std::make_shared<Provable>(inj)));
        Bindings u2;
        u2["a"] = BindingValue::of(brx);
        chb.rewrite_eq_ax({}, "unfold_l", u2, Direction::RtL);
        Bindings i2;
        i2["a"] = BindingValue::of(star_brx);
        chb.rewrite_eq_ax({}, "seqidl", i2, Direction::RtL);
        Bindings sk;
        sk["x"] = BindingValue::of(x);
        LeafFact lf;
        lf.statement = build_axiom_instance(skipax, sk);
        lf.p_lhs = test_true();
        lf.p_rhs = rx;
        lf.close_stmt = closer_of_axiom(skipax, sk);
        chb.step_congr({0}, test_true(), rx, lf);
        chb.finish();
      }
      ProgramPtr beta2 = seq2(rx, star_brx);
      Bindings ll;
      ll["a"] = BindingValue::of(b);
      ll["b"] = BindingValue::of(beta2);
      ch.step(beta2, [&](Provable& q, size_t gg) {
        weaken_ante_all(q, gg);
        mp_via_axiom(q, gg, 0,
                     F::mk_box(star_b, F::mk_refines(seq2(b, beta2), beta2)),
                     "loopl", ll);
        rule(q, gg, "G", {{"j", idx(0)}});
        inline_provable(q, gg, pb);
      });
    }
    ch.finish();
  }

  // x:=*; {b; x:=*}*  <=  {b}*; x:=*
  {
    RefChain ch = start_ref_chain(p, 0);
    Bindings i1;
    i1["a"] = BindingValue::of(seq2(rx, star_brx));
    ch.rewrite_eq_ax({}, "seqidl", i1, Direction::RtL);
    {
      Bindings cb;
      cb["a"] = BindingValue::of(test_true());
      cb["b"] = BindingValue::of(seq2(b, star_b));
      LeafFact lf;
      lf.statement = build_axiom_instance("choiceL", cb);
      lf.p_lhs = test_true();
      lf.p_rhs = P::mk_choice(test_true(), seq2(b, star_b));
      lf.close_stmt = closer_of_axiom("choiceL", cb);
      ch.step_congr({0}, test_true(), lf.p_rhs, lf);
    }
    Bindings u1;
    u1["a"] = BindingValue::of(b);
    ch.rewrite_eq_ax({0}, "unfold_l", u1, Direction::RtL);
    Bindings s1;
    s1["a"] = BindingValue::of(star_b);
    s1["b"] = BindingValue::of(rx);
    s1["c"] = BindingValue::of(star_brx);
    ch.rewrite_eq_ax({}, "seqassoc", s1, Direction::RtL);
    // ({b}*; x:=*); {b;x:=*}*  <=  {b}*; x:=*   by loopr + (A)
    {
      ProgramPtr a0 = seq2(star_b, rx);
      Sequent sa;
      sa.succ.push_back(F::mk_refines(seq2(a0, brx), a0));
      Provable pa = new_goal(sa);
      {
        RefChain cha = start_ref_chain(pa, 0);
        Bindings t1;
        t1["a"] = BindingValue::of(star_b);
        t1["b"] = BindingValue::of(rx);
        t1["c"] = BindingValue::of(brx);
        cha.rewrite_eq_ax({}, "seqassoc", t1, Direction::LtR);
        Provable ih = derive_notfree_impl(b, x, session);
        cha.rewrite_eq_fact({1}, ih, Direction::LtR);
        Bindings t2;
        t2["a"] = BindingValue::of(star_b);
        t2["b"] = BindingValue::of(b);
        t2["c"] = BindingValue::of(rx);
        cha.rewrite_eq_ax({}, "seqassoc", t2, Direction::RtL);
        Provable absr = derive_star_absorb_right(b, session);
        LeafFact lf;
        lf.statement = absr.conclusion.succ[0];
        lf.p_lhs = seq2(star_b, b);
        lf.p_rhs = star_b;
        lf.close_stmt = closer_of_provable(std::make_shared<Provable>(absr));
        cha.step_congr({0}, seq2(star_b, b), star_b, lf);
        cha.finish();
      }
      ProgramPtr a0b = seq2(star_b, rx);
      Bindings lr;
      lr["a"] = BindingValue::of(a0b);
      lr["b"] = BindingValue::of(brx);
      ch.step(a0b, [&](Provable& q, size_t gg) {
        weaken_ante_all(q, gg);
        mp_via_axiom(q, gg, 0, F::mk_refines(seq2(a0b, brx), a0b), "loopr",
                     lr);
        inline_provable(q, gg, pa);
      });
    }
    ch.finish();
  }
  cache_put(session, key, p);
  return p;
}

// (C): {{c}*; x:=*} == {{c; x:=*}*; x:=*}   (x not free in c)
Provable derive_loop_c_impl(const ProgramPtr& c, const Variable& x,
                            TacticSession* session) {
  ProgramPtr rx = P::mk_random(x);
  ProgramPtr star_c = P::mk_star(c);
  ProgramPtr crx = seq2(c, rx);
  ProgramPtr star_crx = P::mk_star(crx);
  FormulaPtr stmt = progeq(seq2(star_c, rx), seq2(star_crx, rx));
  std::string key = "loopc:" + pretty(stmt);
  if (auto cc = cache_get(session, key)) return *cc;

  const std::string skipax = x.primed ? "skip_prime" : "skip";
  Sequent sq;
  sq.succ.push_back(stmt);
  Provable p = new_goal(sq);
  Bindings ab;
  ab["a"] = BindingValue::of(seq2(star_c, rx));
  ab["b"] = BindingValue::of(seq2(star_crx, rx));
  mp_via_axiom(
      p, 0, 0,
      F::mk_and(F::mk_refines(seq2(star_c, rx), seq2(star_crx, rx)),
                F::mk_refines(seq2(star_crx, rx), seq2(star_c, rx))),
      "leqantisym", ab);
  rule(p, 0, "andr", {{"j", idx(0)}});

  // {c}*; x:=*  <=  {c; x:=*}*; x:=*
  {
    RefChain ch = start_ref_chain(p, 0);
    Bindings i1;
    i1["a"] = BindingValue::of(c);
    ch.rewrite_eq_ax({0, 0}, "seqidr", i1, Direction::RtL);
    Bindings sk;
    sk["x"] = BindingValue::of(x);
    LeafFact lf;
    lf.statement = build_axiom_instance(skipax, sk);
    lf.p_lhs = test_true();
    lf.p_rhs = rx;
    lf.close_stmt = closer_of_axiom(skipax, sk);
    ch.step_congr({0, 0, 1}, test_true(), rx, lf);
    ch.finish();
  }

  // {c; x:=*}*; x:=*  <=  {c}*; x:=*
  {
    RefChain ch = start_ref_chain(p, 0);
    Bindings i1;
    i1["a"] = BindingValue::of(rx);
    ch.rewrite_eq_ax({1}, "seqidl", i1, Direction::RtL);
    {
      Bindings cb;
      cb["a"] = BindingValue::of(test_true());
      cb["b"] = BindingValue::of(seq2(c, star_c));
      LeafFact lfc;
      lfc.statement = build_axiom_instance("choiceL", cb);
      lfc.p_lhs = test_true();
      lfc.p_rhs = P::mk_choice(test_true(), seq2(c, star_c));
      lfc.close_stmt = closer_of_axiom("choiceL", cb);
      ch.step_congr({1, 0}, test_true(), lfc.p_rhs, lfc);
    }
    Bindings u1;
    u1["a"] = BindingValue::of(c);
    ch.rewrite_eq_ax({1, 0}, "unfold_l", u1, Direction::RtL);
    // {c; x:=*}*; ({c}*; x:=*)  <=  {c}*; x:=*   by loopl + (D)
    {
      ProgramPtr beta = seq2(star_c, rx);
      Sequent sd;
      sd.succ.push_back(F::mk_refines(seq2(crx, beta), beta));
      Provable pd = new_goal(sd);
      {
        RefChain chd = start_ref_chain(pd, 0);
        Bindings t1;
        t1["a"] = BindingValue::of(c);
        t1["b"] = BindingValue::of(rx);
        t1["c"] = BindingValue::of(beta);
        chd.rewrite_eq_ax({}, "seqassoc", t1, Direction::LtR);
        Provable nf = derive_notfree_impl(star_c, x, session);
        chd.rewrite_eq_fact({1}, nf, Direction::LtR);
        Bindings t2;
        t2["a"] = BindingValue::of(c);
        t2["b"] = BindingValue::of(star_c);
        t2["c"] = BindingValue::of(rx);
        chd.rewrite_eq_ax({}, "seqassoc", t2, Direction::RtL);
        Provable abs = derive_step_star_absorb(c, session);
        LeafFact lfd;
        lfd.statement = abs.conclusion.succ[0];
        lfd.p_lhs = seq2(c, star_c);
        lfd.p_rhs = star_c;
        lfd.close_stmt = closer_of_provable(std::make_shared<Provable>(abs));
        chd.step_congr({0}, seq2(c, star_c), star_c, lfd);
        chd.finish();
      }
      ProgramPtr beta2 = seq2(star_c, rx);
      Bindings ll;
      ll["a"] = BindingValue::of(crx);
      ll["b"] = BindingValue::of(beta2);
      ch.step(beta2, [&](Provable& q, size_t gg) {
        weaken_ante_all(q, gg);
        mp_via_axiom(
            q, gg, 0,
            F::mk_box(star_crx, F::mk_refines(seq2(crx, beta2), beta2)),
            "loopl", ll);
        rule(q, gg, "G", {{"j", idx(0)}});
        inline_provable(q, gg, pd);
      });
    }
    ch.finish();
  }
  cache_put(session, key, p);
  return p;
}

Provable derive_notfree_impl(const ProgramPtr& a, const Variable& x,
                             TacticSession* session) {
  ProgramPtr rx = P::mk_random(x);
  FormulaPtr stmt = progeq(seq2(rx, seq2(a, rx)), seq2(a, rx));
  std::string key = "notfree:" + pretty(stmt);
  if (auto c = cache_get(session, key)) return *c;
  const std::string swap = x.primed ? "rand_swap_prime" : "rand_swap";

  Provable p = [&]() -> Provable {
    if (is_fresh(x, a)) {
      Provable randidem = derive_randidem(x, session);
      return prove_progeq(stmt, [&](EqChain& ch) {
        Bindings sb;
        sb["a"] = BindingValue::of(rx);
        sb["b"] = BindingValue::of(a);
        sb["c"] = BindingValue::of(rx);
        ch.rewrite_ax({}, "seqassoc", sb, Direction::RtL);
        Bindings wb;
        wb["x"] = BindingValue::of(x);
        wb["a"] = BindingValue::of(a);
        ch.rewrite_ax({0}, swap, wb, Direction::LtR);
        Bindings sb2;
        sb2["a"] = BindingValue::of(a);
        sb2["b"] = BindingValue::of(rx);
        sb2["c"] = BindingValue::of(rx);
        ch.rewrite_ax({}, "seqassoc", sb2, Direction::LtR);
        ch.rewrite_fact({1}, randidem, Direction::LtR);
      });
    }
    switch (a->kind) {
      case PK::Assign:
      case PK::Random:
      case PK::ODE: {
        Provable absorb = derive_rand_absorb(x, a, session);
        return prove_progeq(stmt, [&](EqChain& ch) {
          Bindings sb;
          sb["a"] = BindingValue::of(rx);
          sb["b"] = BindingValue::of(a);
          sb["c"] = BindingValue::of(rx);
          ch.rewrite_ax({}, "seqassoc", sb, Direction::RtL);
          ch.rewrite_fact({0}, absorb, Direction::LtR);
        });
      }
      case PK::Choice: {
        Provable ihl = derive_notfree_impl(a->p1, x, session);
        Provable ihr = derive_notfree_impl(a->p2, x, session);
        return prove_progeq(stmt, [&](EqChain& ch) {
          Bindings d1;
          d1["a"] = BindingValue::of(a->p1);
          d1["b"] = BindingValue::of(a->p2);
          d1["c"] = BindingValue::of(rx);
          ch.rewrite_ax({1}, "seqdistr", d1, Direction::LtR);
          Bindings d2;
          d2["a"] = BindingValue::of(rx);
          d2["b"] = BindingValue::of(seq2(a->p1, rx));
          d2["c"] = BindingValue::of(seq2(a->p2, rx));
          ch.rewrite_ax({}, "seqdistl", d2, Direction::LtR);
          ch.rewrite_fact({0}, ihl, Direction::LtR);
          ch.rewrite_fact({1}, ihr, Direction::LtR);
          Bindings d3;
          d3["a"] = BindingValue::of(a->p1);
          d3["b"] = BindingValue::of(a->p2);
          d3["c"] = BindingValue::of(rx);
          ch.rewrite_ax({}, "seqdistr", d3, Direction::RtL);
        });
      }
      case PK::Seq: {
        const ProgramPtr& b = a->p1;
        const ProgramPtr& c = a->p2;
        if (free_vars(c).count(x)) {
          // x is overwritten by b before c reads it
          Provable absorb = derive_rand_absorb(x, b, session);
          return prove_progeq(stmt, [&](EqChain& ch) {
            Bindings s1;
            s1["a"] = BindingValue::of(b);
            s1["b"] = BindingValue::of(c);
            s1["c"] = BindingValue::of(rx);
            ch.rewrite_ax({1}, "seqassoc", s1, Direction::LtR);
            Bindings s2;
            s2["a"] = BindingValue::of(rx);
            s2["b"] = BindingValue::of(b);
            s2["c"] = BindingValue::of(seq2(c, rx));
            ch.rewrite_ax({}, "seqassoc", s2, Direction::RtL);
            ch.rewrite_fact({0}, absorb, Direction::LtR);
            Bindings s3;
            s3["a"] = BindingValue::of(b);
            s3["b"] = BindingValue::of(c);
            s3["c"] = BindingValue::of(rx);
            ch.rewrite_ax({}, "seqassoc", s3, Direction::RtL);
          });
        }
        Provable ihb = derive_notfree_impl(b, x, session);
        Provable ihc = derive_notfree_impl(c, x, session);
        return prove_progeq(stmt, [&](EqChain& ch) {
          Bindings s1;
          s1["a"] = BindingValue::of(b);
          s1["b"] = BindingValue::of(c);
          s1["c"] = BindingValue::of(rx);
          ch.rewrite_ax({1}, "seqassoc", s1, Direction::LtR);
          ch.rewrite_fact({1, 1}, ihc, Direction::RtL);
          Bindings s2;
          s2["a"] = BindingValue::of(b);
          s2["b"] = BindingValue::of(rx);
          s2["c"] = BindingValue::of(seq2(c, rx));
          ch.rewrite_ax({1}, "seqassoc", s2, Direction::RtL);
          Bindings s3;
          s3["a"] = BindingValue::of(rx);
          s3["b"] = BindingValue::of(seq2(b, rx));
          s3["c"] = BindingValue::of(seq2(c, rx));
          ch.rewrite_ax({}, "seqassoc", s3, Direction::RtL);
          ch.rewrite_fact({0}, ihb, Direction::LtR);
          Bindings s4;
          s4["a"] = BindingValue::of(b);
          s4["b"] = BindingValue::of(rx);
          s4["c"] = BindingValue::of(seq2(c, rx));
          ch.rewrite_ax({}, "seqassoc", s4, Direction::LtR);
          ch.rewrite_fact({1}, ihc, Direction::LtR);
          Bindings s5;
          s5["a"] = BindingValue::of(b);
          s5["b"] = BindingValue::of(c);
          s5["c"] = BindingValue::of(rx);
          ch.rewrite_ax({}, "seqassoc", s5, Direction::RtL);
        });
      }
      case PK::Star: {
        Provable randidem = derive_randidem(x, session);
        Provable aux = derive_aux_impl(a->p1, x, session);
        ProgramPtr star_brx = P::mk_star(seq2(a->p1, rx));
        return prove_progeq(stmt, [&](EqChain& ch) {
          ch.rewrite_fact({1}, aux, Direction::LtR);
          Bindings s1;
          s1["a"] = BindingValue::of(rx);
          s1["b"] = BindingValue::of(rx);
          s1["c"] = BindingValue::of(star_brx);
          ch.rewrite_ax({}, "seqassoc", s1, Direction::RtL);
          ch.rewrite_fact({0}, randidem, Direction::LtR);
          ch.rewrite_fact({}, aux, Direction::RtL);
        });
      }
      case PK::Test:
        throw UnsupportedShape("test mentions " + x.str() +
                               " under a binder; rename it first");
      default:
        throw UnsupportedShape("not-free derivation: unsupported shape");
    }
  }();
  cache_put(session, key, p);
  return p;
}

}  // namespace

Provable derive_notfree(const ProgramPtr& a, const Variable& x,
                        TacticSession* session) {
  if (free_vars(a).count(x))
    throw FreshnessViolation(x.str() + " is free in " + pretty(a));
  return derive_notfree_impl(a, x, session);
}

Provable derive_aux(const ProgramPtr& b, const Variable& x,
                    TacticSession* session) {
  if (free_vars(b).count(x))
    throw FreshnessViolation(x.str() + " is free in " + pretty(b));
  return derive_aux_impl(b, x, session);
}

Provable derive_loop_c(const ProgramPtr& c, const Variable& x,
                       TacticSession* session) {
  if (free_vars(c).count(x))
    throw FreshnessViolation(x.str() + " is free in " + pretty(c));
  return derive_loop_c_impl(c, x, session);
}

Provable derive_fresh(const Context& c, const ProgramPtr& alpha,
                      const Variable& x, TacticSession* session) {
  if (c.hole_kind != ExprKind::Program || c.result_kind != ExprKind::Program)
    throw UnsupportedShape("fresh theorem needs a program context");
  {
    Expression shell = replace_at(c.root, c.path, Expression(test_true()));
    if (!is_fresh(x, shell))
      throw FreshnessViolation(x.str() + " occurs in the context shell");
  }
  if (free_vars(alpha).count(x))
    throw FreshnessViolation(x.str() + " is free in the focused program");

  ProgramPtr rx = P::mk_random(x);

  std::function<Provable(const Expression&, const Path&)> go =
      [&](const Expression& root, const Path& path) -> Provable {
    ProgramPtr ca = replace_at(root, path, Expression(alpha)).program;
    ProgramPtr carx =
        replace_at(root, path, Expression(seq2(alpha, rx))).program;
    FormulaPtr stmt = progeq(seq2(ca, rx), seq2(carx, rx));
    std::string key = "fresh:" + pretty(stmt);
    if (auto cc = cache_get(session, key)) return *cc;

    Provable out = [&]() -> Provable {
      if (path.empty()) {
        Provable randidem = derive_randidem(x, session);
        return prove_progeq(stmt, [&](EqChain& ch) {
          ch.rewrite_fact({1}, randidem, Direction::RtL);
          Bindings sb;
          sb["a"] = BindingValue::of(alpha);
          sb["b"] = BindingValue::of(rx);
          sb["c"] = BindingValue::of(rx);
          ch.rewrite_ax({}, "seqassoc", sb, Direction::RtL);
        });
      }
      size_t head = path.front();
      Path rest(path.begin() + 1, path.end());
      Expression child = child_at(root, head);
      const ProgramPtr rootp = root.program;
      ProgramPtr c1a = replace_at(child, rest, Expression(alpha)).program;
      ProgramPtr c1arx =
          replace_at(child, rest, Expression(seq2(alpha, rx))).program;
      const std::string swap = x.primed ? "rand_swap_prime" : "rand_swap";
      switch (rootp->kind) {
        case PK::Seq: {
          Provable ih = go(child, rest);
          if (head == 0) {
            const ProgramPtr gamma = rootp->p2;
            return prove_progeq(stmt, [&](EqChain& ch) {
              Bindings s1;
              s1["a"] = BindingValue::of(c1a);
              s1["b"] = BindingValue::of(gamma);
              s1["c"] = BindingValue::of(rx);
              ch.rewrite_ax({}, "seqassoc", s1, Direction::LtR);
              Bindings w;
              w["x"] = BindingValue::of(x);
              w["a"] = BindingValue::of(gamma);
              ch.rewrite_ax({1}, swap, w, Direction::RtL);
              Bindings s2;
              s2["a"] = BindingValue::of(c1a);
              s2["b"] = BindingValue::of(rx);
              s2["c"] = BindingValue::of(gamma);
              ch.rewrite_ax({}, "seqassoc", s2, Direction::RtL);
              ch.rewrite_fact({0}, ih, Direction::LtR);
              Bindings s3;
              s3["a"] = BindingValue::of(c1arx);
              s3["b"] = BindingValue::of(rx);
              s3["c"] = BindingValue::of(gamma);
              ch.rewrite_ax({}, "seqassoc", s3, Direction::LtR);
              Bindings w2;
              w2["x"] = BindingValue::of(x);
              w2["a"] = BindingValue::of(gamma);
              ch.rewrite_ax({1}, swap, w2, Direction::LtR);
              Bindings s4;
              s4["a"] = BindingValue::of(c1arx);
              s4["b"] = BindingValue::of(gamma);
              s4["c"] = BindingValue::of(rx);
              ch.rewrite_ax({}, "seqassoc", s4, Direction::RtL);
            });
          }
          const ProgramPtr gamma = rootp->p1;
          return prove_progeq(stmt, [&](EqChain& ch) {
            Bindings s1;
            s1["a"] = BindingValue::of(gamma);
            s1["b"] = BindingValue::of(c1a);
            s1["c"] = BindingValue::of(rx);
            ch.rewrite_ax({}, "seqassoc", s1, Direction::LtR);
            ch.rewrite_fact({1}, ih, Direction::LtR);
            Bindings s2;
            s2["a"] = BindingValue::of(gamma);
            s2["b"] = BindingValue::of(c1arx);
            s2["c"] = BindingValue::of(rx);
            ch.rewrite_ax({}, "seqassoc", s2, Direction::RtL);
          });
        }
        case PK::Choice: {
          Provable ih = go(child, rest);
          const ProgramPtr gamma = head == 0 ? rootp->p2 : rootp->p1;
          ProgramPtr l0 = head == 0 ? c1a : gamma;
          ProgramPtr r0 = head == 0 ? gamma : c1a;
          ProgramPtr l1 = head == 0 ? c1arx : gamma;
          ProgramPtr r1 = head == 0 ? gamma : c1arx;
          return prove_progeq(stmt, [&](EqChain& ch) {
            Bindings d1;
            d1["a"] = BindingValue::of(l0);
            d1["b"] = BindingValue::of(r0);
            d1["c"] = BindingValue::of(rx);
            ch.rewrite_ax({}, "seqdistr", d1, Direction::LtR);
            ch.rewrite_fact({head}, ih, Direction::LtR);
            Bindings d2;
            d2["a"] = BindingValue::of(l1);
            d2["b"] = BindingValue::of(r1);
            d2["c"] = BindingValue::of(rx);
            ch.rewrite_ax({}, "seqdistr", d2, Direction::RtL);
          });
        }
        case PK::Star: {
          Provable ih = go(child, rest);
          Provable loop1 = derive_loop_c_impl(c1a, x, session);
          Provable loop2 = derive_loop_c_impl(c1arx, x, session);
          return prove_progeq(stmt, [&](EqChain& ch) {
            ch.rewrite_fact({}, loop1, Direction::LtR);
            ch.rewrite_fact({0, 0}, ih, Direction::LtR);
            ch.rewrite_fact({}, loop2, Direction::RtL);
          });
        }
        default:
          throw UnsupportedShape(
              "fresh theorem allows only ;, ++ and * above the hole");
      }
    }();
    cache_put(session, key, out);
    return out;
  };

  return go(c.root, c.path);
}

Provable derive_vacuous_random(const Variable& x, const FormulaPtr& f,
                               TacticSession* session) {
  if (free_vars(f).count(x))
    throw FreshnessViolation(x.str() + " is free in " + pretty(f));
  ProgramPtr rx = P::mk_random(x);
  FormulaPtr stmt = F::mk_equiv(F::mk_box(rx, f), f);
  std::string key = "vacrand:" + pretty(stmt);
  if (auto c = cache_get(session, key)) return *c;

  const std::string randd = x.primed ? "randomd_prime" : "randomd";
  FormulaPtr notf = F::mk_not(f);
  FormulaPtr nn = F::mk_not(notf);
  FormulaPtr exn = F::mk_exists(x, notf);

  Sequent s;
  s.succ.push_back(stmt);
  Provable p = new_goal(s);

  FormulaPtr e1 = F::mk_equiv(F::mk_box(rx, f), F::mk_box(rx, nn));
  Closer close_e1 = [&](Provable& q, size_t g) {
    box_congr_equiv(q, g, rx, f, nn, [&](Provable& q2, size_t g2) {
      rule(q2, g2, "equivr", {{"j", idx(0)}});
      prop_close(q2, g2);
      prop_close(q2, g2);
    });
  };
  FormulaPtr e2 = F::mk_equiv(F::mk_box(rx, nn), F::mk_not(exn));
  Closer close_e2 = [&](Provable& q, size_t g) {
    Bindings rb;
    rb["x"] = BindingValue::of(x);
    rb["p"] = BindingValue::of(notf);
    cut_fml(q, g, build_axiom_instance(randd, rb));
    ax_close(q, g, q.goals.at(g).succ.size() - 1, randd, rb);
    prop_close(q, g);
  };
  FormulaPtr e3 = F::mk_equiv(F::mk_not(exn), f);
  Closer close_e3 = [&](Provable& q, size_t g) {
    rule(q, g, "equivr", {{"j", idx(0)}});
    rule(q, g, "notl", {{"i", idx(0)}});
    rule(q, g, "existsr",
         {{"j", idx(1)}, {"t", BindingValue::of(Term::mk_var(x))}});
    rule(q, g, "notr", {{"j", idx(1)}});
    rule(q, g, "id", {{"i", idx(0)}, {"j", idx(0)}});
    rule(q, g, "notr", {{"j", idx(0)}});
    rule(q, g, "existsl", {{"i", idx(1)}, {"y", BindingValue::of(x)}});
    rule(q, g, "notl", {{"i", idx(1)}});
    rule(q, g, "id", {{"i", idx(0)}, {"j", idx(0)}});
  };

  FormulaPtr e12 = F::mk_equiv(F::mk_box(rx, f), F::mk_not(exn));
  Closer close_e12 = [&](Provable& q, size_t g) {
    equiv_trans(q, g, e1, close_e1, e2, close_e2);
  };
  equiv_trans(p, 0, e12, close_e12, e3, close_e3);
  cache_put(session, key, p);
  return p;
}

// ---------------------------------------------------------------------------
// focus

namespace {

enum class FocusMode { Ref, EqFwd, EqBwd };

FormulaPtr proj_premise(const Expression& root, const Path& path,
                        const ProgramPtr& alpha, FocusMode mode,
                        const ProgramPtr& beta) {
  auto [cc, su] = split_at(root, path);
  (void)su;
  FormulaPtr inner = mode == FocusMode::Ref
                         ? Formula::mk_refines(alpha, beta)
                         : Formula::mk_progeq(alpha, beta);
  return projective_context(cc, alpha).apply(inner);
}

void focus_induction(Provable& p, size_t g, const Expression& root,
                     const Path& path, const ProgramPtr& alpha,
                     const ProgramPtr& beta, FocusMode mode,
                     TacticSession* session) {
  if (path.empty()) {
    if (mode == FocusMode::Ref) {
      rule(p, g, "id", {{"i", idx(0)}, {"j", idx(0)}});
    } else {
      Bindings ab;
      ab["a"] = BindingValue::of(alpha);
      ab["b"] = BindingValue::of(beta);
      cut_fml(p, g, build_axiom_instance("leqantisym", ab));
      ax_close(p, g, p.goals.at(g).succ.size() - 1, "leqantisym", ab);
      prop_close(p, g);
    }
    return;
  }

  size_t head = path.front();
  Path rest(path.begin() + 1, path.end());
  const ProgramPtr rootp = root.program;
  Expression child = child_at(root, head);
  ProgramPtr child_a = replace_at(child, rest, Expression(alpha)).program;
  ProgramPtr child_b = replace_at(child, rest, Expression(beta)).program;
  ProgramPtr lhs_sub = mode == FocusMode::EqBwd ? child_b : child_a;
  ProgramPtr rhs_sub = mode == FocusMode::EqBwd ? child_a : child_b;
  FormulaPtr sub_premise = proj_premise(child, rest, alpha, mode, beta);
  FormulaPtr sub_rel = F::mk_refines(lhs_sub, rhs_sub);

  auto recurse = [&](Provable& q, size_t gg) {
    focus_induction(q, gg, child, rest, alpha, beta, mode, session);
  };

  auto k_descent = [&](Provable& q, size_t gg, const ProgramPtr& gamma) {
    mp(q, gg, 0, F::mk_box(gamma, sub_premise));
    Bindings kb;
    kb["a"] = BindingValue::of(gamma);
    kb["p"] = BindingValue::of(sub_premise);
    kb["q"] = BindingValue::of(sub_rel);
    apply_fml_axiom(q, gg, 0, "K", kb);
    rule(q, gg, "G", {{"j", idx(0)}});
    rule(q, gg, "implyr", {{"j", idx(0)}});
    recurse(q, gg);
    rule(q, gg, "id", {{"i", idx(0)}, {"j", idx(0)}});
  };

  switch (rootp->kind) {
    case PK::Seq: {
      if (head == 0) {
        const ProgramPtr gamma = rootp->p2;
        Bindings sb;
        sb["a"] = BindingValue::of(lhs_sub);
        sb["b"] = BindingValue::of(gamma);
        sb["c"] = BindingValue::of(rhs_sub);
        sb["d"] = BindingValue::of(gamma);
        FormulaPtr pre = F::mk_and(
            sub_rel, F::mk_box(lhs_sub, F::mk_refines(gamma, gamma)));
        mp_via_axiom(p, g, 0, pre, "sequence", sb);
        rule(p, g, "andr", {{"j", idx(0)}});
        recurse(p, g);
        weaken_ante_all(p, g);
        rule(p, g, "G", {{"j", idx(0)}});
        Bindings rb;
        rb["a"] = BindingValue::of(gamma);
        ax_close(p, g, 0, "leqrefl", rb);
      } else {
        const ProgramPtr gamma = rootp->p1;
        Bindings sb;
        sb["a"] = BindingValue::of(gamma);
        sb["b"] = BindingValue::of(lhs_sub);
        sb["c"] = BindingValue::of(gamma);
        sb["d"] = BindingValue::of(rhs_sub);
        FormulaPtr pre = F::mk_and(F::mk_refines(gamma, gamma),
                                   F::mk_box(gamma, sub_rel));
        mp_via_axiom(p, g, 0, pre, "sequence", sb);
        rule(p, g, "andr", {{"j", idx(0)}});
        weaken_ante_all(p, g);
        Bindings rb;
        rb["a"] = BindingValue::of(gamma);
        ax_close(p, g, 0, "leqrefl", rb);
        k_descent(p, g, gamma);
      }
      return;
    }
    case PK::Choice: {
      const ProgramPtr gamma = head == 0 ? rootp->p2 : rootp->p1;
      ProgramPtr l1 = head == 0 ? lhs_sub : gamma;
      ProgramPtr l2 = head == 0 ? gamma : lhs_sub;
      ProgramPtr r1 = head == 0 ? rhs_sub : gamma;
      ProgramPtr r2 = head == 0 ? gamma : rhs_sub;
      ProgramPtr rhs_choice = P::mk_choice(r1, r2);
      Bindings cb;
      cb["a"] = BindingValue::of(l1);
      cb["b"] = BindingValue::of(l2);
      cb["c"] = BindingValue::of(rhs_choice);
      FormulaPtr pre = F::mk_and(F::mk_refines(l1, rhs_choice),
                                 F::mk_refines(l2, rhs_choice));
      mp_via_axiom(p, g, 0, pre, "choicel", cb);
      rule(p, g, "andr", {{"j", idx(0)}});
      for (size_t which = 0; which < 2; ++which) {
        const ProgramPtr& li = which == 0 ? l1 : l2;
        Bindings rb;
        rb["a"] = BindingValue::of(li);
        rb["b"] = BindingValue::of(r1);
        rb["c"] = BindingValue::of(r2);
        mp_via_axiom(p, g, 0,
                     F::mk_or(F::mk_refines(li, r1), F::mk_refines(li, r2)),
                     "choicer", rb);
        rule(p, g, "orr", {{"j", idx(0)}});
        rule(p, g, "weakenr", {{"j", idx(1 - which)}});
        if (which == head) {
          recurse(p, g);
        } else {
          weaken_ante_all(p, g);
          Bindings lb;
          lb["a"] = BindingValue::of(li);
          ax_close(p, g, 0, "leqrefl", lb);
        }
      }
      return;
    }
    case PK::Star: {
      ProgramPtr loop_a = P::mk_star(child_a);
      ProgramPtr loop_b = P::mk_star(child_b);
      if (mode != FocusMode::EqBwd) {
        Bindings ub;
        ub["a"] = BindingValue::of(child_a);
        ub["b"] = BindingValue::of(child_b);
        mp_via_axiom(p, g, 0, F::mk_box(loop_a, sub_rel), "unloop", ub);
        k_descent(p, g, loop_a);
      } else {
        // [ [loop_a]sub_premise |- {loop_b} <= {loop_a} ]
        RefChain ch = start_ref_chain(p, g);
        Bindings i1;
        i1["a"] = BindingValue::of(loop_b);
        ch.rewrite_eq_ax({}, "seqidl", i1, Direction::RtL);
        {
          Provable t2s = derive_true_refines_star(child_a, session);
          LeafFact lf;
          lf.statement = t2s.conclusion.succ[0];
          lf.p_lhs = test_true();
          lf.p_rhs = loop_a;
          lf.close_stmt = closer_of_provable(std::make_shared<Provable>(t2s));
          ch.step_congr({0}, test_true(), loop_a, lf);
        }
        {
          Bindings lr;
          lr["a"] = BindingValue::of(loop_a);
          lr["b"] = BindingValue::of(child_b);
          ch.step(loop_a, [&](Provable& q, size_t gg) {
            mp_via_axiom(q, gg, 0,
                         F::mk_refines(seq2(loop_a, child_b), loop_a),
                         "loopr", lr);
            RefChain ch2 = start_ref_chain(q, gg);
            ProgramPtr widened = P::mk_choice(child_a, test_true());
            {
              Bindings sb;
              sb["a"] = BindingValue::of(loop_a);
              sb["b"] = BindingValue::of(child_b);
              sb["c"] = BindingValue::of(loop_a);
              sb["d"] = BindingValue::of(widened);
              FormulaPtr pre = F::mk_and(
                  F::mk_refines(loop_a, loop_a),
                  F::mk_box(loop_a, F::mk_refines(child_b, widened)));
              ch2.step(seq2(loop_a, widened), [&](Provable& q2, size_t g2) {
                mp_via_axiom(q2, g2, 0, pre, "sequence", sb);
                rule(q2, g2, "andr", {{"j", idx(0)}});
                weaken_ante_all(q2, g2);
                Bindings rb;
                rb["a"] = BindingValue::of(loop_a);
                ax_close(q2, g2, 0, "leqrefl", rb);
                FormulaPtr target = F::mk_refines(child_b, widened);
                mp(q2, g2, 0, F::mk_box(loop_a, sub_premise));
                Bindings kb;
                kb["a"] = BindingValue::of(loop_a);
                kb["p"] = BindingValue::of(sub_premise);
                kb["q"] = BindingValue::of(target);
                apply_fml_axiom(q2, g2, 0, "K", kb);
                rule(q2, g2, "G", {{"j", idx(0)}});
                rule(q2, g2, "implyr", {{"j", idx(0)}});
                Bindings crb;
                crb["a"] = BindingValue::of(child_b);
                crb["b"] = BindingValue::of(child_a);
                crb["c"] = BindingValue::of(test_true());
                mp_via_axiom(q2, g2, 0,
                             F::mk_or(F::mk_refines(child_b, child_a),
                                      F::mk_refines(child_b, test_true())),
                             "choicer", crb);
                rule(q2, g2, "orr", {{"j", idx(0)}});
                rule(q2, g2, "weakenr", {{"j", idx(1)}});
                recurse(q2, g2);
                rule(q2, g2, "id", {{"i", idx(0)}, {"j", idx(0)}});
              });
            }
            {
              Bindings db;
              db["a"] = BindingValue::of(loop_a);
              db["b"] = BindingValue::of(child_a);
              db["c"] = BindingValue::of(test_true());
              ch2.rewrite_eq_ax({}, "seqdistl", db, Direction::LtR);
              Bindings jb;
              jb["a"] = BindingValue::of(seq2(loop_a, child_a));
              jb["b"] = BindingValue::of(seq2(loop_a, test_true()));
              jb["c"] = BindingValue::of(loop_a);
              ch2.step(loop_a, [&](Provable& q2, size_t g2) {
                weaken_ante_all(q2, g2);
                mp_via_axiom(
                    q2, g2, 0,
                    F::mk_and(
                        F::mk_refines(seq2(loop_a, child_a), loop_a),
                        F::mk_refines(seq2(loop_a, test_true()), loop_a)),
                    "choicel", jb);
                rule(q2, g2, "andr", {{"j", idx(0)}});
                Provable absr = derive_star_absorb_right(child_a, session);
                inline_provable(q2, g2, absr);
                {
                  RefChain ch3 = start_ref_chain(q2, g2);
                  Bindings ib;
                  ib["a"] = BindingValue::of(loop_a);
                  ch3.rewrite_eq_ax({}, "seqidr", ib, Direction::LtR);
                  ch3.finish();
                }
              });
            }
            ch2.finish();
          });
        }
        ch.finish();
      }
      return;
    }
    default:
      throw UnsupportedShape("focus allows only ;, ++ and * above the hole");
  }
}

// On a goal [G |- C(a) <= C(b)] (or == shaped for the Eq modes) at succ[0]:
// leaves [G |- proj(inner)] open at position g and closes the rest.
void focus_refinement_goal(Provable& p, size_t g, const Expression& prog_root,
                           const Path& prog_path, const ProgramPtr& alpha,
                           const ProgramPtr& beta, FocusMode mode,
                           TacticSession* session) {
  FormulaPtr proj = proj_premise(prog_root, prog_path, alpha, mode, beta);
  cut_fml(p, g, proj);
  weaken_succ_except(p, g, p.goals.at(g).succ.size() - 1);
  size_t g2 = g + 1;
  while (p.goals.at(g2).ante.size() > 1)
    rule(p, g2, "weakenl", {{"i", idx(0)}});
  if (mode == FocusMode::Ref) {
    focus_induction(p, g2, prog_root, prog_path, alpha, beta, mode, session);
  } else {
    ProgramPtr ca =
        replace_at(prog_root, prog_path, Expression(alpha)).program;
    ProgramPtr cb = replace_at(prog_root, prog_path, Expression(beta)).program;
    Bindings ab;
    ab["a"] = BindingValue::of(ca);
    ab["b"] = BindingValue::of(cb);
    mp_via_axiom(p, g2, 0,
                 F::mk_and(F::mk_refines(ca, cb), F::mk_refines(cb, ca)),
                 "leqantisym", ab);
    rule(p, g2, "andr", {{"j", idx(0)}});
    focus_induction(p, g2, prog_root, prog_path, alpha, beta,
                    FocusMode::EqFwd, session);
    focus_induction(p, g2, prog_root, prog_path, alpha, beta,
                    FocusMode::EqBwd, session);
  }
}

}  // namespace

Provable focus(const Provable& p0, size_t goal, const Path& path,
               const ProgramPtr& beta, TacticSession* session) {
  Provable p = p0;
  TacticSession local;
  if (!session) session = &local;
  if (goal >= p.goals.size()) throw NoSuchGoal("focus: no such goal");
  if (p.goals[goal].succ.empty())
    throw GoalShapeMismatch("focus: goal has no succedent");
  const FormulaPtr f = p.goals[goal].succ[0];

  if (f->kind == FK::Refines) {
    if (path.empty() || path[0] != 0)
      throw GoalShapeMismatch("focus: the path must address the left program");
    Path inner(path.begin() + 1, path.end());
    Expression left(f->p1);
    auto [ctx, sub] = split_at(left, inner);
    if (sub.kind != ExprKind::Program)
      throw UnsupportedShape("focus: the path addresses a formula position");
    ProgramPtr alpha = sub.program;
    ProgramPtr expect = replace_at(left, inner, Expression(beta)).program;
    if (!equal(expect, f->p2))
      throw GoalShapeMismatch(
          "focus: right side is not the context filled with beta");
    focus_refinement_goal(p, goal, left, inner, alpha, beta, FocusMode::Ref,
                          session);
    return p;
  }

  if (f->kind == FK::Box) {
    if (path.empty() || path[0] != 0)
      throw GoalShapeMismatch("focus: the path must enter the box program");
    Path inner(path.begin() + 1, path.end());
    Expression prog(f->p1);
    auto [ctx, sub] = split_at(prog, inner);
    if (sub.kind != ExprKind::Program)
      throw UnsupportedShape("focus: the path addresses a formula position");
    ProgramPtr alpha = sub.program;
    ProgramPtr cb = replace_at(prog, inner, Expression(beta)).program;
    FormulaPtr refines = F::mk_refines(f->p1, cb);
    cut_fml(p, goal, refines);
    weaken_succ_except(p, goal, p.goals.at(goal).succ.size() - 1);
    focus_refinement_goal(p, goal, prog, inner, alpha, beta, FocusMode::Ref,
                          session);
    size_t g2 = goal + 1;
    size_t ref_idx = p.goals.at(g2).ante.size() - 1;
    Bindings bb;
    bb["a"] = BindingValue::of(f->p1);
    bb["b"] = BindingValue::of(cb);
    bb["p"] = BindingValue::of(f->f1);
    cut_fml(p, g2, build_axiom_instance("boxref", bb));
    ax_close(p, g2, p.goals.at(g2).succ.size() - 1, "boxref", bb);
    size_t inst_idx = p.goals.at(g2).ante.size() - 1;
    rule(p, g2, "implyl", {{"i", idx(inst_idx)}});
    rule(p, g2, "id",
         {{"i", idx(ref_idx)}, {"j", idx(p.goals.at(g2).succ.size() - 1)}});
    size_t impl_idx = p.goals.at(g2).ante.size() - 1;
    rule(p, g2, "implyl", {{"i", idx(impl_idx)}});
    rule(p, g2, "weakenr", {{"j", idx(0)}});
    rule(p, g2, "weakenl", {{"i", idx(ref_idx)}});
    size_t g3 = g2 + 1;
    rule(p, g3, "id",
         {{"i", idx(p.goals.at(g3).ante.size() - 1)}, {"j", idx(0)}});
    return p;
  }

  throw GoalShapeMismatch("focus expects a refinement or box goal");
}

Provable focus_eq(const Provable& p0, size_t goal, const Path& path,
                  const ProgramPtr& beta, TacticSession* session) {
  Provable p = p0;
  TacticSession local;
  if (!session) session = &local;
  if (goal >= p.goals.size()) throw NoSuchGoal("focus_eq: no such goal");
  if (p.goals[goal].succ.empty())
    throw GoalShapeMismatch("focus_eq: goal has no succedent");
  const FormulaPtr f = p.goals[goal].succ[0];
  if (f->kind != FK::ProgEq)
    throw GoalShapeMismatch("focus_eq expects a program equivalence goal");
  if (path.empty() || path[0] != 0)
    throw GoalShapeMismatch("focus_eq: the path must address the left side");
  Path inner(path.begin() + 1, path.end());
  Expression left(f->p1);
  auto [ctx, sub] = split_at(left, inner);
  if (sub.kind != ExprKind::Program)
    throw UnsupportedShape("focus_eq: the path addresses a formula position");
  ProgramPtr alpha = sub.program;
  ProgramPtr expect = replace_at(left, inner, Expression(beta)).program;
  if (!equal(expect, f->p2))
    throw GoalShapeMismatch(
        "focus_eq: right side is not the context filled with beta");
  focus_refinement_goal(p, goal, left, inner, alpha, beta, FocusMode::EqFwd,
                        session);
  return p;
}

// ---------------------------------------------------------------------------
// move_random_in / move_random_out

namespace {

Path find_random_trailer(const Expression& root, const Path& alpha_path,
                         const Variable& v, Path& inner_path) {
  for (size_t k = alpha_path.size(); k-- > 0;) {
    Path node_path(alpha_path.begin(), alpha_path.begin() + k);
    Expression node = subexpr_at(root, node_path);
    if (node.kind != ExprKind::Program) continue;
    if (node.program->kind != PK::Seq) continue;
    if (alpha_path[k] != 0) continue;
    const ProgramPtr& right = node.program->p2;
    if (right->kind == PK::Random && right->var == v) {
      inner_path.assign(alpha_path.begin() + k + 1, alpha_path.end());
      return node_path;
    }
  }
  throw GoalShapeMismatch("no enclosing '; " + v.str() +
                          " := *' trailer above the program");
}

}  // namespace

Provable move_random_in(const Provable& p0, size_t goal, const Path& path,
                        const Variable& v, TacticSession* session) {
  Provable p = p0;
  TacticSession local;
  if (!session) session = &local;
  if (goal >= p.goals.size()) throw NoSuchGoal("move_random_in: no such goal");
  if (p.goals[goal].succ.empty())
    throw GoalShapeMismatch("move_random_in: goal has no succedent");
  const FormulaPtr f = p.goals[goal].succ[0];
  Expression root(f);
  Path inner;
  Path seq_path = find_random_trailer(root, path, v, inner);
  Expression seq_node = subexpr_at(root, seq_path);
  Expression left(seq_node.program->p1);
  auto [ctx, sub] = split_at(left, inner);
  ProgramPtr alpha = sub.program;
  Provable fresh = derive_fresh(ctx, alpha, v, session);
  const FormulaPtr stmt = fresh.conclusion.succ[0];
  rewrite_prog_at(
      p, goal, 0, seq_path, stmt->p1, stmt->p2,
      eq_closer_fact(std::make_shared<Provable>(fresh), Direction::LtR));
  return p;
}

Provable move_random_out(const Provable& p0, size_t goal, const Path& path,
                         const Variable& v, TacticSession* session) {
  Provable p = p0;
  TacticSession local;
  if (!session) session = &local;
  if (goal >= p.goals.size()) throw NoSuchGoal("move_random_out: no such goal");
  if (p.goals[goal].succ.empty())
    throw GoalShapeMismatch("move_random_out: goal has no succedent");
  const FormulaPtr f = p.goals[goal].succ[0];
  Expression root(f);
  if (path.empty() || path.back() != 0)
    throw GoalShapeMismatch(
        "move_random_out: the program must be the left part of 'a; v := *'");
  Path parent_path(path.begin(), path.end() - 1);
  Expression parent = subexpr_at(root, parent_path);
  if (parent.kind != ExprKind::Program || parent.program->kind != PK::Seq ||
      parent.program->p2->kind != PK::Random ||
      !(parent.program->p2->var == v))
    throw GoalShapeMismatch("move_random_out: the program is not followed by '" +
                            v.str() + " := *'");
  Path inner;
  Path seq_path = find_random_trailer(root, parent_path, v, inner);
  Expression seq_node = subexpr_at(root, seq_path);
  Expression left(seq_node.program->p1);
  auto [ctx, subp] = split_at(left, inner);
  (void)subp;
  ProgramPtr alpha = subexpr_at(root, path).program;
  Provable fresh = derive_fresh(ctx, alpha, v, session);
  const FormulaPtr stmt = fresh.conclusion.succ[0];
  rewrite_prog_at(
      p, goal, 0, seq_path, stmt->p2, stmt->p1,
      eq_closer_fact(std::make_shared<Provable>(fresh), Direction::RtL));
  return p;
}

// ---------------------------------------------------------------------------
// ghost_refactor

namespace {

// rewrites goal succ[0] between [P]f and [P; w:=*]f
void box_random_shift(Provable& p, size_t g, const Variable& w, bool intro,
                      TacticSession* session) {
  const FormulaPtr box = p.goals.at(g).succ.at(0);
  if (box->kind != FK::Box)
    throw GoalShapeMismatch("box_random_shift expects a box goal");
  ProgramPtr base, withr;
  if (intro) {
    base = box->p1;
    withr = seq2(base, P::mk_random(w));
  } else {
    withr = box->p1;
    if (withr->kind != PK::Seq || withr->p2->kind != PK::Random ||
        !(withr->p2->var == w))
      throw GoalShapeMismatch("program does not end with '" + w.str() +
                              " := *'");
    base = withr->p1;
  }
  const FormulaPtr body = box->f1;
  FormulaPtr target = intro ? F::mk_box(withr, body) : F::mk_box(base, body);
  mp(p, g, 0, target);
  FormulaPtr comp =
      F::mk_equiv(F::mk_box(withr, body),
                  F::mk_box(base, F::mk_box(P::mk_random(w), body)));
  Bindings cb;
  cb["a"] = BindingValue::of(base);
  cb["b"] = BindingValue::of(P::mk_random(w));
  cb["p"] = BindingValue::of(body);
  Provable vac = derive_vacuous_random(w, body, session);
  FormulaPtr boxcong =
      F::mk_equiv(F::mk_box(base, F::mk_box(P::mk_random(w), body)),
                  F::mk_box(base, body));
  FormulaPtr full =
      F::mk_equiv(F::mk_box(withr, body), F::mk_box(base, body));
  cut_fml(p, g, full);
  {
    weaken_succ_except(p, g, p.goals.at(g).succ.size() - 1);
    weaken_ante_all(p, g);
    equiv_trans(p, g, comp, closer_of_axiom("composeb", cb), boxcong,
                [&](Provable& q, size_t gg) {
                  box_congr_equiv(q, gg, base,
                                  F::mk_box(P::mk_random(w), body), body,
                                  [&](Provable& q2, size_t g2) {
                                    inline_provable(q2, g2, vac);
                                  });
                });
  }
  prop_close(p, g);
}

// seqassoc rewrite of the program node at `path` within succ[0]
void assoc_at(Provable& p, size_t g, const Path& path, Direction dir) {
  ProgramPtr node =
      subexpr_at(Expression(p.goals.at(g).succ.at(0)), path).program;
  ProgramPtr a, b, c;
  if (dir == Direction::LtR) {
    if (node->kind != PK::Seq || node->p1->kind != PK::Seq)
      throw GoalShapeMismatch("assoc: node is not ((a; b); c)");
    a = node->p1->p1;
    b = node->p1->p2;
    c = node->p2;
  } else {
    if (node->kind != PK::Seq || node->p2->kind != PK::Seq)
      throw GoalShapeMismatch("assoc: node is not (a; (b; c))");
    a = node->p1;
    b = node->p2->p1;
    c = node->p2->p2;
  }
  Bindings sb;
  sb["a"] = BindingValue::of(a);
  sb["b"] = BindingValue::of(b);
  sb["c"] = BindingValue::of(c);
  FormulaPtr inst = build_axiom_instance("seqassoc", sb);
  ProgramPtr sub = dir == Direction::LtR ? inst->p1 : inst->p2;
  ProgramPtr repl = dir == Direction::LtR ? inst->p2 : inst->p1;
  rewrite_prog_at(p, g, 0, path, sub, repl, eq_closer_ax("seqassoc", sb, dir));
}

}  // namespace

Provable ghost_refactor(const Provable& p0, size_t goal, const Path& path,
                        const std::string& ghost, const Variable& v,
                        std::optional<TermPtr> new_rhs,
                        std::optional<TermPtr> init,
                        const std::optional<Fact>& custom,
                        TacticSession* session) {
  Provable p = p0;
  TacticSession local;
  if (!session) session = &local;
  if (goal >= p.goals.size()) throw NoSuchGoal("ghost_refactor: no such goal");
  if (p.goals[goal].succ.empty() || p.goals[goal].succ[0]->kind != FK::Box)
    throw GoalShapeMismatch("ghost_refactor expects a box goal");
  const FormulaPtr box = p.goals[goal].succ[0];
  if (path.empty() || path[0] != 0)
    throw GoalShapeMismatch("ghost_refactor: path must enter the box program");
  Path inner(path.begin() + 1, path.end());
  ProgramPtr core = subexpr_at(Expression(box->p1), inner).program;

  bool both_vars = !custom && ghost == "ref_dg";
  std::vector<Variable> ghosts = {v};
  if (both_vars) ghosts.push_back(v.prime());

  for (const auto& w : ghosts) {
    if (!is_fresh(w, box->f1))
      throw FreshnessViolation(w.str() + " occurs in the postcondition");
    Expression shell = replace_at(Expression(box->p1), inner,
                                  Expression(P::mk_test(F::mk_true())));
    if (!is_fresh(w, shell))
      throw FreshnessViolation(w.str() + " occurs in the surrounding program");
  }

  FormulaPtr eq;
  Closer eq_fwd;
  ProgramPtr lhs_core, rhs_core;
  if (custom) {
    eq = custom->statement;
    if (eq->kind != FK::ProgEq)
      throw KindMismatch("custom ghost fact must be a program equivalence");
    eq_fwd = custom->axiom
                 ? closer_of_axiom(custom->axiom->axiom_id,
                                   custom->axiom->bindings)
                 : closer_of_provable(custom->derivation);
    auto check_side = [&](const ProgramPtr& side) {
      if (side->kind != PK::Seq || side->p2->kind != PK::Random ||
          !(side->p2->var == v))
        throw GoalShapeMismatch("custom ghost fact sides must end with '" +
                                v.str() + " := *'");
      return side->p1;
    };
    lhs_core = check_side(eq->p1);
    rhs_core = check_side(eq->p2);
  } else if (ghost == "ode_cst") {
    Bindings b;
    b["x"] = BindingValue::of(v);
    if (core->kind == PK::ODE && core->odes.size() == 1 &&
        !(core->odes[0].rhs->kind == Term::Kind::Var &&
          core->odes[0].rhs->var == v)) {
      b["y"] = BindingValue::of(core->odes[0].var);
      b["e"] = BindingValue::of(core->odes[0].rhs);
      b["q"] = BindingValue::of(core->fml);
    } else if (core->kind == PK::Seq && core->p1->kind == PK::Assign &&
               core->p1->var == v && core->p2->kind == PK::ODE &&
               core->p2->odes.size() == 1) {
      b["y"] = BindingValue::of(core->p2->odes[0].var);
      b["e"] = BindingValue::of(core->p1->term);
      b["q"] = BindingValue::of(core->p2->fml);
    } else {
      throw GoalShapeMismatch(
          "ode_cst: the program at the path matches neither side");
    }
    eq = build_axiom_instance("ode_cst", b);
    eq_fwd = closer_of_axiom("ode_cst", b);
    lhs_core = eq->p1->p1;
    rhs_core = seq2(eq->p2->p1, eq->p2->p2->p1);
  } else if (ghost == "ref_dg") {
    Bindings b;
    b["x"] = BindingValue::of(v);
    if (core->kind == PK::ODE &&
        !(core->odes.size() >= 1 && core->odes.back().var == v)) {
      if (!new_rhs || !init)
        throw GoalShapeMismatch(
            "ref_dg introduction needs the new right-hand side and initial "
            "value");
      b["ode"] = BindingValue::of(core);
      b["e"] = BindingValue::of(*new_rhs);
      b["c"] = BindingValue::of(*init);
    } else if (core->kind == PK::Seq && core->p1->kind == PK::Assign &&
               core->p1->var == v && core->p2->kind == PK::ODE &&
               !core->p2->odes.empty() && core->p2->odes.back().var == v) {
      auto eqs = core->p2->odes;
      TermPtr rhs = eqs.back().rhs;
      eqs.pop_back();
      b["ode"] = BindingValue::of(P::mk_ode(eqs, core->p2->fml));
      b["e"] = BindingValue::of(rhs);
      b["c"] = BindingValue::of(core->p1->term);
    } else {
      throw GoalShapeMismatch(
          "ref_dg: the program at the path matches neither side");
    }
    eq = build_axiom_instance("ref_dg", b);
    eq_fwd = closer_of_axiom("ref_dg", b);
    lhs_core = eq->p1->p1;
    rhs_core = seq2(eq->p2->p1, eq->p2->p2->p1);
  } else {
    throw GoalShapeMismatch("unknown ghost equivalence '" + ghost + "'");
  }

  bool forward;
  if (equal(core, lhs_core)) {
    forward = true;
  } else if (equal(core, rhs_core)) {
    forward = false;
  } else {
    throw GoalShapeMismatch(
        "program at the path matches neither side of the ghost equivalence");
  }

  // 1. append the ghost randoms to the boxed program (v, then v')
  for (const auto& w : ghosts) box_random_shift(p, goal, w, true, session);

  Path core_path{0};
  for (size_t k = 0; k < ghosts.size(); ++k) core_path.push_back(0);
  core_path = cat(core_path, inner);

  // 2. move the randoms next to the core
  p = move_random_in(p, goal, core_path, v, session);
  if (both_vars) p = move_random_in(p, goal, core_path, v.prime(), session);

  // 3. reassociate to the axiom's grouping, rewrite, reassociate back
  if (both_vars) assoc_at(p, goal, core_path, Direction::LtR);
  if (!forward) assoc_at(p, goal, core_path, Direction::LtR);
  {
    ProgramPtr from_side = forward ? eq->p1 : eq->p2;
    ProgramPtr to_side = forward ? eq->p2 : eq->p1;
    FormulaPtr eq_stmt = eq;
    Closer closer =
        forward ? eq_fwd
                : Closer([eq_stmt, eq_fwd](Provable& q, size_t gg) {
                    progeq_flip(q, gg, eq_stmt->p2, eq_stmt->p1, eq_fwd);
                  });
    rewrite_prog_at(p, goal, 0, core_path, from_side, to_side, closer);
  }
  if (forward) assoc_at(p, goal, core_path, Direction::RtL);
  if (both_vars) assoc_at(p, goal, core_path, Direction::RtL);

  // 4. move the randoms back out (v' first)
  if (both_vars)
    p = move_random_out(p, goal, cat(core_path, {0}), v.prime(), session);
  p = move_random_out(p, goal, cat(core_path, {0}), v, session);

  // 5. eliminate the trailing randoms (v' first)
  for (size_t k = ghosts.size(); k-- > 0;)
    box_random_shift(p, goal, ghosts[k], false, session);

  return p;
}

// ---------------------------------------------------------------------------

Provable refactor_box_global(const Provable& p, size_t goal, const Path& path,
                             const Fact& fact, Direction dir,
                             TacticSession* session) {
  if (goal < p.goals.size() && !p.goals[goal].succ.empty() &&
      p.goals[goal].succ[0]->kind != FK::Box)
    throw GoalShapeMismatch("refactor_box_global expects a box goal");
  return use_at(p, goal, path, fact, dir, session);
}

Provable run_script(const Sequent& goal, const std::vector<Command>& cmds) {
  TacticSession session;
  Provable p = new_goal(goal);
  for (size_t i = 0; i < cmds.size(); ++i) {
    const Command& c = cmds[i];
    try {
      switch (c.kind) {
        case Command::Kind::UseAt: {
          Fact f = c.fact ? *c.fact : fact_from_axiom(c.axiom_id, c.bindings);
          p = use_at(p, 0, c.path, f, c.dir, &session);
          break;
        }
        case Command::Kind::Focus:
          p = focus(p, 0, c.path, c.beta, &session);
          break;
        case Command::Kind::FocusEq:
          p = focus_eq(p, 0, c.path, c.beta, &session);
          break;
        case Command::Kind::MoveRandomIn:
          p = move_random_in(p, 0, c.path, c.var, &session);
          break;
        case Command::Kind::MoveRandomOut:
          p = move_random_out(p, 0, c.path, c.var, &session);
          break;
        case Command::Kind::Ghost:
          p = ghost_refactor(p, 0, c.path, c.axiom_id, c.var, c.ghost_rhs,
                             c.ghost_init, c.fact, &session);
          break;
        case Command::Kind::Arith: {
          if (p.goals.empty()) throw NoSuchGoal("no goal to admit");
          for (size_t k = p.goals[0].ante.size(); k-- > 0;)
            if (!first_order(p.goals[0].ante[k]))
              rule(p, 0, "weakenl", {{"i", idx(k)}});
          FormulaPtr obligation = fold_sequent(p.goals[0]);
          admit_arith_inplace(p, 0);
          DischargeResult r = try_discharge(Obligation{obligation, "", {}});
          if (r.status == ObligationStatus::Refuted)
            throw GoalShapeMismatch(
                "admitted obligation is refuted by sampling: " +
                pretty(obligation));
          break;
        }
        case Command::Kind::Axiom: {
          Bindings b = c.bindings;
          b["j"] = idx(0);
          rule(p, 0, "ax:" + c.axiom_id, b);
          break;
        }
        case Command::Kind::Rule:
          rule(p, 0, c.rule_id, c.bindings);
          break;
      }
    } catch (const Error& e) {
      throw ScriptError(i, e.what());
    }
  }
  return p;
}

}  // namespace drlref
