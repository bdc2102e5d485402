#include "drlref/ast.hpp"

namespace drlref {

bool valid_variable_name(const std::string& name) {
  if (name.empty()) return false;
  if (name[0] < 'a' || name[0] > 'z') return false;
  for (char c : name) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
              (c >= '0' && c <= '9') || c == '_';
    if (!ok) return false;
  }
  return true;
}

TermPtr Term::mk_var(Variable v) {
  auto t = std::make_shared<Term>();
  t->kind = Kind::Var;
  t->var = std::move(v);
  return t;
}

TermPtr Term::mk_int(long long n) {
  auto t = std::make_shared<Term>();
  t->kind = Kind::Int;
  t->value = n;
  return t;
}

static TermPtr mk_bin(Term::Kind k, TermPtr a, TermPtr b) {
  auto t = std::make_shared<Term>();
  t->kind = k;
  t->lhs = std::move(a);
  t->rhs = std::move(b);
  return t;
}

TermPtr Term::mk_plus(TermPtr a, TermPtr b) {
  return mk_bin(Kind::Plus, std::move(a), std::move(b));
}
TermPtr Term::mk_minus(TermPtr a, TermPtr b) {
  return mk_bin(Kind::Minus, std::move(a), std::move(b));
}
TermPtr Term::mk_times(TermPtr a, TermPtr b) {
  return mk_bin(Kind::Times, std::move(a), std::move(b));
}

TermPtr Term::mk_differential(TermPtr a) {
  if (a->kind == Kind::Var && !a->var.primed)
    return mk_var(a->var.prime());
  auto t = std::make_shared<Term>();
  t->kind = Kind::Differential;
  t->lhs = std::move(a);
  return t;
}

FormulaPtr Formula::mk_true() {
  auto f = std::make_shared<Formula>();
  f->kind = Kind::True;
  return f;
}
FormulaPtr Formula::mk_false() {
  auto f = std::make_shared<Formula>();
  f->kind = Kind::False;
  return f;
}
FormulaPtr Formula::mk_cmp(CmpOp op, TermPtr a, TermPtr b) {
  auto f = std::make_shared<Formula>();
  f->kind = Kind::Cmp;
  f->cmp = op;
  f->t1 = std::move(a);
  f->t2 = std::move(b);
  return f;
}
FormulaPtr Formula::mk_not(FormulaPtr g) {
  auto f = std::make_shared<Formula>();
  f->kind = Kind::Not;
  f->f1 = std::move(g);
  return f;
}
static FormulaPtr mk_binf(Formula::Kind k, FormulaPtr a, FormulaPtr b) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  f->f1 = std::move(a);
  f->f2 = std::move(b);
  return f;
}
FormulaPtr Formula::mk_and(FormulaPtr a, FormulaPtr b) {
  return mk_binf(Kind::And, std::move(a), std::move(b));
}
FormulaPtr Formula::mk_or(FormulaPtr a, FormulaPtr b) {
  return mk_binf(Kind::Or, std::move(a), std::move(b));
}
FormulaPtr Formula::mk_imply(FormulaPtr a, FormulaPtr b) {
  return mk_binf(Kind::Imply, std::move(a), std::move(b));
}
FormulaPtr Formula::mk_equiv(FormulaPtr a, FormulaPtr b) {
  return mk_binf(Kind::Equiv, std::move(a), std::move(b));
}
FormulaPtr Formula::mk_forall(Variable v, FormulaPtr g) {
  auto f = std::make_shared<Formula>();
  f->kind = Kind::Forall;
  f->var = std::move(v);
  f->f1 = std::move(g);
  return f;
}
FormulaPtr Formula::mk_exists(Variable v, FormulaPtr g) {
  auto f = std::make_shared<Formula>();
  f->kind = Kind::Exists;
  f->var = std::move(v);
  f->f1 = std::move(g);
  return f;
}
FormulaPtr Formula::mk_box(ProgramPtr p, FormulaPtr g) {
  auto f = std::make_shared<Formula>();
  f->kind = Kind::Box;
  f->p1 = std::move(p);
  f->f1 = std::move(g);
  return f;
}
FormulaPtr Formula::mk_diamond(ProgramPtr p, FormulaPtr g) {
  auto f = std::make_shared<Formula>();
  f->kind = Kind::Diamond;
  f->p1 = std::move(p);
  f->f1 = std::move(g);
  return f;
}
FormulaPtr Formula::mk_refines(ProgramPtr a, ProgramPtr b) {
  auto f = std::make_shared<Formula>();
  f->kind = Kind::Refines;
  f->p1 = std::move(a);
  f->p2 = std::move(b);
  return f;
}
FormulaPtr Formula::mk_progeq(ProgramPtr a, ProgramPtr b) {
  auto f = std::make_shared<Formula>();
  f->kind = Kind::ProgEq;
  f->p1 = std::move(a);
  f->p2 = std::move(b);
  return f;
}

ProgramPtr Program::mk_test(FormulaPtr f) {
  auto p = std::make_shared<Program>();
  p->kind = Kind::Test;
  p->fml = std::move(f);
  return p;
}
ProgramPtr Program::mk_assign(Variable v, TermPtr t) {
  auto p = std::make_shared<Program>();
  p->kind = Kind::Assign;
  p->var = std::move(v);
  p->term = std::move(t);
  return p;
}
ProgramPtr Program::mk_random(Variable v) {
  auto p = std::make_shared<Program>();
  p->kind = Kind::Random;
  p->var = std::move(v);
  return p;
}
ProgramPtr Program::mk_ode(std::vector<OdeEquation> eqs, FormulaPtr domain) {
  auto p = std::make_shared<Program>();
  p->kind = Kind::ODE;
  p->odes = std::move(eqs);
  p->fml = std::move(domain);
  return p;
}
ProgramPtr Program::mk_choice(ProgramPtr a, ProgramPtr b) {
  auto p = std::make_shared<Program>();
  p->kind = Kind::Choice;
  p->p1 = std::move(a);
  p->p2 = std::move(b);
  return p;
}
ProgramPtr Program::mk_seq(ProgramPtr a, ProgramPtr b) {
  auto p = std::make_shared<Program>();
  p->kind = Kind::Seq;
  p->p1 = std::move(a);
  p->p2 = std::move(b);
  return p;
}
ProgramPtr Program::mk_star(ProgramPtr a) {
  auto p = std::make_shared<Program>();
  p->kind = Kind::Star;
  p->p1 = std::move(a);
  return p;
}

bool equal(const TermPtr& a, const TermPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Term::Kind::Var: return a->var == b->var;
    case Term::Kind::Int: return a->value == b->value;
    case Term::Kind::Differential: return equal(a->lhs, b->lhs);
    default: return equal(a->lhs, b->lhs) && equal(a->rhs, b->rhs);
  }
}

bool equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  using K = Formula::Kind;
  switch (a->kind) {
    case K::True:
    case K::False: return true;
    case K::Cmp:
      return a->cmp == b->cmp && equal(a->t1, b->t1) && equal(a->t2, b->t2);
    case K::Not: return equal(a->f1, b->f1);
    case K::And:
    case K::Or:
    case K::Imply:
    case K::Equiv: return equal(a->f1, b->f1) && equal(a->f2, b->f2);
    case K::Forall:
    case K::Exists: return a->var == b->var && equal(a->f1, b->f1);
    case K::Box:
    case K::Diamond: return equal(a->p1, b->p1) && equal(a->f1, b->f1);
    case K::Refines:
    case K::ProgEq: return equal(a->p1, b->p1) && equal(a->p2, b->p2);
  }
  return false;
}

bool equal(const ProgramPtr& a, const ProgramPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  using K = Program::Kind;
  switch (a->kind) {
    case K::Test: return equal(a->fml, b->fml);
    case K::Assign: return a->var == b->var && equal(a->term, b->term);
    case K::Random: return a->var == b->var;
    case K::ODE: {
      if (a->odes.size() != b->odes.size()) return false;
      for (size_t i = 0; i < a->odes.size(); ++i) {
        if (a->odes[i].var != b->odes[i].var) return false;
        if (!equal(a->odes[i].rhs, b->odes[i].rhs)) return false;
      }
      return equal(a->fml, b->fml);
    }
    case K::Choice:
    case K::Seq: return equal(a->p1, b->p1) && equal(a->p2, b->p2);
    case K::Star: return equal(a->p1, b->p1);
  }
  return false;
}

bool equal(const Expression& a, const Expression& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case ExprKind::Term: return equal(a.term, b.term);
    case ExprKind::Formula: return equal(a.formula, b.formula);
    case ExprKind::Program: return equal(a.program, b.program);
  }
  return false;
}

static ProgramPtr normalize_prog(const ProgramPtr& p);

FormulaPtr normalize_derived(const FormulaPtr& f) {
  if (!f) return f;
  using K = Formula::Kind;
  switch (f->kind) {
    case K::True:
    case K::False:
    case K::Cmp: return f;
    case K::Not: return Formula::mk_not(normalize_derived(f->f1));
    case K::And:
      return Formula::mk_and(normalize_derived(f->f1), normalize_derived(f->f2));
    case K::Or:
      return Formula::mk_or(normalize_derived(f->f1), normalize_derived(f->f2));
    case K::Imply:
      return Formula::mk_imply(normalize_derived(f->f1),
                               normalize_derived(f->f2));
    case K::Equiv:
      return Formula::mk_equiv(normalize_derived(f->f1),
                               normalize_derived(f->f2));
    case K::Forall:
      return Formula::mk_forall(f->var, normalize_derived(f->f1));
    case K::Exists:
      return Formula::mk_exists(f->var, normalize_derived(f->f1));
    case K::Box:
      return Formula::mk_box(normalize_prog(f->p1), normalize_derived(f->f1));
    case K::Diamond:
      return Formula::mk_not(Formula::mk_box(
          normalize_prog(f->p1),
          Formula::mk_not(normalize_derived(f->f1))));
    case K::Refines:
      return Formula::mk_refines(normalize_prog(f->p1), normalize_prog(f->p2));
    case K::ProgEq: {
      auto a = normalize_prog(f->p1);
      auto b = normalize_prog(f->p2);
      return Formula::mk_and(Formula::mk_refines(a, b),
                             Formula::mk_refines(b, a));
    }
  }
  return f;
}

static ProgramPtr normalize_prog(const ProgramPtr& p) {
  if (!p) return p;
  using K = Program::Kind;
  switch (p->kind) {
    case K::Test: return Program::mk_test(normalize_derived(p->fml));
    case K::Assign:
    case K::Random: return p;
    case K::ODE: return Program::mk_ode(p->odes, normalize_derived(p->fml));
    case K::Choice:
      return Program::mk_choice(normalize_prog(p->p1), normalize_prog(p->p2));
    case K::Seq:
      return Program::mk_seq(normalize_prog(p->p1), normalize_prog(p->p2));
    case K::Star: return Program::mk_star(normalize_prog(p->p1));
  }
  return p;
}

}  // namespace drlref
