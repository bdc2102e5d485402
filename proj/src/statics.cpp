#include "drlref/statics.hpp"

#include <algorithm>

#include "drlref/printer.hpp"

namespace drlref {

namespace {

void insert_all(VarSet& into, const VarSet& from) {
  into.insert(from.begin(), from.end());
}

void fv_term(const TermPtr& t, VarSet& out, bool under_diff) {
  switch (t->kind) {
    case Term::Kind::Var:
      out.insert(t->var);
      if (under_diff && !t->var.primed) out.insert(t->var.prime());
      return;
    case Term::Kind::Int: return;
    case Term::Kind::Differential: fv_term(t->lhs, out, true); return;
    default:
      fv_term(t->lhs, out, under_diff);
      fv_term(t->rhs, out, under_diff);
      return;
  }
}

}  // namespace

VarSet free_vars(const TermPtr& t) {
  VarSet out;
  fv_term(t, out, false);
  return out;
}

VarSet bound_vars(const ProgramPtr& p) {
  VarSet out;
  switch (p->kind) {
    case Program::Kind::Test: return out;
    case Program::Kind::Assign:
    case Program::Kind::Random: out.insert(p->var); return out;
    case Program::Kind::ODE:
      for (const auto& eq : p->odes) {
        out.insert(eq.var);
        out.insert(eq.var.prime());
      }
      return out;
    case Program::Kind::Choice:
    case Program::Kind::Seq: {
      out = bound_vars(p->p1);
      insert_all(out, bound_vars(p->p2));
      return out;
    }
    case Program::Kind::Star: return bound_vars(p->p1);
  }
  return out;
}

VarSet must_bound_vars(const ProgramPtr& p) {
  VarSet out;
  switch (p->kind) {
    case Program::Kind::Test: return out;
    case Program::Kind::Assign:
    case Program::Kind::Random: out.insert(p->var); return out;
    case Program::Kind::ODE: return bound_vars(p);
    case Program::Kind::Seq: {
      out = must_bound_vars(p->p1);
      insert_all(out, must_bound_vars(p->p2));
      return out;
    }
    case Program::Kind::Choice: {
      VarSet a = must_bound_vars(p->p1);
      VarSet b = must_bound_vars(p->p2);
      std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                            std::inserter(out, out.begin()));
      return out;
    }
    case Program::Kind::Star: return out;  // zero iterations bind nothing
  }
  return out;
}

VarSet free_vars(const ProgramPtr& p) {
  VarSet out;
  switch (p->kind) {
    case Program::Kind::Test: return free_vars(p->fml);
    case Program::Kind::Assign: return free_vars(p->term);
    case Program::Kind::Random: return out;
    case Program::Kind::ODE: {
      for (const auto& eq : p->odes) {
        out.insert(eq.var);
        insert_all(out, free_vars(eq.rhs));
      }
      insert_all(out, free_vars(p->fml));
      // the equations' primes are overwritten on entry
      for (const auto& eq : p->odes) out.erase(eq.var.prime());
      return out;
    }
    case Program::Kind::Choice: {
      out = free_vars(p->p1);
      insert_all(out, free_vars(p->p2));
      return out;
    }
    case Program::Kind::Seq: {
      out = free_vars(p->p1);
      VarSet later = free_vars(p->p2);
      VarSet must = must_bound_vars(p->p1);
      for (const auto& v : later)
        if (!must.count(v)) out.insert(v);
      return out;
    }
    case Program::Kind::Star: return free_vars(p->p1);
  }
  return out;
}

VarSet free_vars(const FormulaPtr& f) {
  VarSet out;
  using K = Formula::Kind;
  switch (f->kind) {
    case K::True:
    case K::False: return out;
    case K::Cmp:
      out = free_vars(f->t1);
      insert_all(out, free_vars(f->t2));
      return out;
    case K::Not: return free_vars(f->f1);
    case K::And:
    case K::Or:
    case K::Imply:
    case K::Equiv:
      out = free_vars(f->f1);
      insert_all(out, free_vars(f->f2));
      return out;
    case K::Forall:
    case K::Exists:
      out = free_vars(f->f1);
      out.erase(f->var);
      return out;
    case K::Box:
    case K::Diamond: {
      out = free_vars(f->p1);
      VarSet post = free_vars(f->f1);
      VarSet must = must_bound_vars(f->p1);
      for (const auto& v : post)
        if (!must.count(v)) out.insert(v);
      return out;
    }
    case K::Refines:
    case K::ProgEq:
      // refinement compares full output states, so written variables count
      out = free_vars(f->p1);
      insert_all(out, free_vars(f->p2));
      insert_all(out, bound_vars(f->p1));
      insert_all(out, bound_vars(f->p2));
      return out;
  }
  return out;
}

VarSet free_vars(const Expression& e) {
  switch (e.kind) {
    case ExprKind::Term: return free_vars(e.term);
    case ExprKind::Formula: return free_vars(e.formula);
    case ExprKind::Program: return free_vars(e.program);
  }
  return {};
}

VarSet all_vars(const TermPtr& t) {
  VarSet out;
  switch (t->kind) {
    case Term::Kind::Var: out.insert(t->var); return out;
    case Term::Kind::Int: return out;
    case Term::Kind::Differential: return all_vars(t->lhs);
    default:
      out = all_vars(t->lhs);
      insert_all(out, all_vars(t->rhs));
      return out;
  }
}

VarSet all_vars(const FormulaPtr& f) {
  VarSet out;
  using K = Formula::Kind;
  switch (f->kind) {
    case K::True:
    case K::False: return out;
    case K::Cmp:
      out = all_vars(f->t1);
      insert_all(out, all_vars(f->t2));
      return out;
    case K::Not: return all_vars(f->f1);
    case K::And:
    case K::Or:
    case K::Imply:
    case K::Equiv:
      out = all_vars(f->f1);
      insert_all(out, all_vars(f->f2));
      return out;
    case K::Forall:
    case K::Exists:
      out = all_vars(f->f1);
      out.insert(f->var);
      return out;
    case K::Box:
    case K::Diamond:
      out = all_vars(f->p1);
      insert_all(out, all_vars(f->f1));
      return out;
    case K::Refines:
    case K::ProgEq:
      out = all_vars(f->p1);
      insert_all(out, all_vars(f->p2));
      return out;
  }
  return out;
}

VarSet all_vars(const ProgramPtr& p) {
  VarSet out;
  switch (p->kind) {
    case Program::Kind::Test: return all_vars(p->fml);
    case Program::Kind::Assign:
      out = all_vars(p->term);
      out.insert(p->var);
      return out;
    case Program::Kind::Random: out.insert(p->var); return out;
    case Program::Kind::ODE:
      for (const auto& eq : p->odes) {
        out.insert(eq.var);
        out.insert(eq.var.prime());
        insert_all(out, all_vars(eq.rhs));
      }
      insert_all(out, all_vars(p->fml));
      return out;
    case Program::Kind::Choice:
    case Program::Kind::Seq:
      out = all_vars(p->p1);
      insert_all(out, all_vars(p->p2));
      return out;
    case Program::Kind::Star: return all_vars(p->p1);
  }
  return out;
}

VarSet all_vars(const Expression& e) {
  switch (e.kind) {
    case ExprKind::Term: return all_vars(e.term);
    case ExprKind::Formula: return all_vars(e.formula);
    case ExprKind::Program: return all_vars(e.program);
  }
  return {};
}

bool is_fresh(const Variable& v, const TermPtr& t) {
  return !all_vars(t).count(v);
}
bool is_fresh(const Variable& v, const FormulaPtr& f) {
  return !all_vars(f).count(v);
}
bool is_fresh(const Variable& v, const ProgramPtr& p) {
  return !all_vars(p).count(v);
}
bool is_fresh(const Variable& v, const Expression& e) {
  return !all_vars(e).count(v);
}

// ---------------------------------------------------------------------------
// Substitution

namespace {

bool intersects(const VarSet& a, const VarSet& b) {
  for (const auto& v : a)
    if (b.count(v)) return true;
  return false;
}

struct Subst {
  const Variable& x;
  const TermPtr& r;
  VarSet r_free;

  [[noreturn]] void clash(const std::string& why) const {
    throw SubstClash("substitution of " + x.str() + " clashes: " + why);
  }

  TermPtr term(const TermPtr& t, bool under_diff) const {
    switch (t->kind) {
      case Term::Kind::Var:
        if (t->var == x) {
          if (under_diff) clash("occurrence under a differential");
          return r;
        }
        return t;
      case Term::Kind::Int: return t;
      case Term::Kind::Differential: {
        TermPtr in = term(t->lhs, true);
        return in == t->lhs ? t : Term::mk_differential(in);
      }
      default: {
        TermPtr a = term(t->lhs, under_diff);
        TermPtr b = term(t->rhs, under_diff);
        if (a == t->lhs && b == t->rhs) return t;
        switch (t->kind) {
          case Term::Kind::Plus: return Term::mk_plus(a, b);
          case Term::Kind::Minus: return Term::mk_minus(a, b);
          default: return Term::mk_times(a, b);
        }
      }
    }
  }

  FormulaPtr formula(const FormulaPtr& f) const {
    using K = Formula::Kind;
    switch (f->kind) {
      case K::True:
      case K::False: return f;
      case K::Cmp: {
        TermPtr a = term(f->t1, false), b = term(f->t2, false);
        if (a == f->t1 && b == f->t2) return f;
        return Formula::mk_cmp(f->cmp, a, b);
      }
      case K::Not: {
        FormulaPtr g = formula(f->f1);
        return g == f->f1 ? f : Formula::mk_not(g);
      }
      case K::And:
      case K::Or:
      case K::Imply:
      case K::Equiv: {
        FormulaPtr a = formula(f->f1), b = formula(f->f2);
        if (a == f->f1 && b == f->f2) return f;
        switch (f->kind) {
          case K::And: return Formula::mk_and(a, b);
          case K::Or: return Formula::mk_or(a, b);
          case K::Imply: return Formula::mk_imply(a, b);
          default: return Formula::mk_equiv(a, b);
        }
      }
      case K::Forall:
      case K::Exists: {
        if (f->var == x) return f;  // shadowed
        bool body_reads_x = free_vars(f->f1).count(x) != 0;
        if (body_reads_x && r_free.count(f->var))
          clash("quantifier would capture " + f->var.str());
        FormulaPtr g = formula(f->f1);
        if (g == f->f1) return f;
        return f->kind == K::Forall ? Formula::mk_forall(f->var, g)
                                    : Formula::mk_exists(f->var, g);
      }
      case K::Box:
      case K::Diamond: {
        ProgramPtr a = program(f->p1);
        VarSet bv = bound_vars(f->p1);
        FormulaPtr g = f->f1;
        bool post_reads_x = free_vars(f->f1).count(x) != 0;
        if (must_bound_vars(f->p1).count(x)) {
          // x rebound on every path; postcondition occurrences stay
        } else if (bv.count(x)) {
          if (post_reads_x) clash("may-bound occurrence of " + x.str());
        } else {
          if (post_reads_x && intersects(bv, r_free))
            clash("modality would capture a replaced variable");
          g = formula(f->f1);
        }
        if (a == f->p1 && g == f->f1) return f;
        return f->kind == K::Box ? Formula::mk_box(a, g)
                                 : Formula::mk_diamond(a, g);
      }
      case K::Refines:
      case K::ProgEq: {
        if (bound_vars(f->p1).count(x) || bound_vars(f->p2).count(x))
          clash("refinement compares outputs of " + x.str());
        ProgramPtr a = program(f->p1), b = program(f->p2);
        if (a == f->p1 && b == f->p2) return f;
        return f->kind == K::Refines ? Formula::mk_refines(a, b)
                                     : Formula::mk_progeq(a, b);
      }
    }
    return f;
  }

  ProgramPtr program(const ProgramPtr& p) const {
    using K = Program::Kind;
    switch (p->kind) {
      case K::Test: {
        FormulaPtr g = formula(p->fml);
        return g == p->fml ? p : Program::mk_test(g);
      }
      case K::Assign: {
        TermPtr e = term(p->term, false);
        return e == p->term ? p : Program::mk_assign(p->var, e);
      }
      case K::Random: return p;
      case K::ODE: {
        VarSet bv = bound_vars(p);
        bool reads_x = free_vars(p).count(x) != 0;
        if (bv.count(x)) {
          if (reads_x) clash("occurrence evolved by the equation");
          return p;
        }
        if (reads_x && intersects(bv, r_free))
          clash("equation would capture a replaced variable");
        std::vector<OdeEquation> eqs;
        bool changed = false;
        for (const auto& eq : p->odes) {
          TermPtr rhs = term(eq.rhs, false);
          changed = changed || rhs != eq.rhs;
          eqs.push_back(OdeEquation{eq.var, rhs});
        }
        FormulaPtr dom = formula(p->fml);
        if (!changed && dom == p->fml) return p;
        return Program::mk_ode(std::move(eqs), dom);
      }
      case K::Choice: {
        ProgramPtr a = program(p->p1), b = program(p->p2);
        if (a == p->p1 && b == p->p2) return p;
        return Program::mk_choice(a, b);
      }
      case K::Seq: {
        ProgramPtr a = program(p->p1);
        VarSet bv = bound_vars(p->p1);
        ProgramPtr b = p->p2;
        bool later_reads_x = free_vars(p->p2).count(x) != 0;
        if (must_bound_vars(p->p1).count(x)) {
          // rebound before the tail reads it
        } else if (bv.count(x)) {
          if (later_reads_x) clash("may-bound occurrence of " + x.str());
        } else {
          if (later_reads_x && intersects(bv, r_free))
            clash("sequence would capture a replaced variable");
          b = program(p->p2);
        }
        if (a == p->p1 && b == p->p2) return p;
        return Program::mk_seq(a, b);
      }
      case K::Star: {
        VarSet bv = bound_vars(p->p1);
        bool reads_x = free_vars(p->p1).count(x) != 0;
        if (bv.count(x)) {
          if (reads_x) clash("loop rebinds " + x.str());
          return p;
        }
        if (reads_x && intersects(bv, r_free))
          clash("loop would capture a replaced variable");
        ProgramPtr a = program(p->p1);
        return a == p->p1 ? p : Program::mk_star(a);
      }
    }
    return p;
  }
};

}  // namespace

TermPtr subst(const TermPtr& t, const Variable& x, const TermPtr& r) {
  Subst s{x, r, free_vars(r)};
  return s.term(t, false);
}

FormulaPtr subst(const FormulaPtr& f, const Variable& x, const TermPtr& r) {
  Subst s{x, r, free_vars(r)};
  return s.formula(f);
}

ProgramPtr subst(const ProgramPtr& p, const Variable& x, const TermPtr& r) {
  Subst s{x, r, free_vars(r)};
  return s.program(p);
}

// ---------------------------------------------------------------------------
// Alpha renaming of quantifier-bound occurrences

namespace {

FormulaPtr alpha_fml(const FormulaPtr& f, const Variable& from,
                     const Variable& to);
ProgramPtr alpha_prog(const ProgramPtr& p, const Variable& from,
                      const Variable& to);

FormulaPtr rename_region(const FormulaPtr& body, const Variable& from,
                         const Variable& to) {
  // Occurrences of from' inside the region couple with the renamed
  // variable through differential equations; refuse those conservatively.
  if (!from.primed && all_vars(body).count(from.prime()))
    throw SubstClash("cannot alpha-rename " + from.str() +
                     ": region mentions " + from.prime().str());
  return subst(body, from, Term::mk_var(to));
}

FormulaPtr alpha_fml(const FormulaPtr& f, const Variable& from,
                     const Variable& to) {
  using K = Formula::Kind;
  switch (f->kind) {
    case K::True:
    case K::False:
    case K::Cmp: return f;
    case K::Not: {
      auto g = alpha_fml(f->f1, from, to);
      return g == f->f1 ? f : Formula::mk_not(g);
    }
    case K::And:
    case K::Or:
    case K::Imply:
    case K::Equiv: {
      auto a = alpha_fml(f->f1, from, to);
      auto b = alpha_fml(f->f2, from, to);
      if (a == f->f1 && b == f->f2) return f;
      switch (f->kind) {
        case K::And: return Formula::mk_and(a, b);
        case K::Or: return Formula::mk_or(a, b);
        case K::Imply: return Formula::mk_imply(a, b);
        default: return Formula::mk_equiv(a, b);
      }
    }
    case K::Forall:
    case K::Exists: {
      if (f->var == from) {
        FormulaPtr body = rename_region(f->f1, from, to);
        return f->kind == K::Forall ? Formula::mk_forall(to, body)
                                    : Formula::mk_exists(to, body);
      }
      auto g = alpha_fml(f->f1, from, to);
      if (g == f->f1) return f;
      return f->kind == K::Forall ? Formula::mk_forall(f->var, g)
                                  : Formula::mk_exists(f->var, g);
    }
    case K::Box:
    case K::Diamond: {
      auto a = alpha_prog(f->p1, from, to);
      auto g = alpha_fml(f->f1, from, to);
      if (a == f->p1 && g == f->f1) return f;
      return f->kind == K::Box ? Formula::mk_box(a, g)
                               : Formula::mk_diamond(a, g);
    }
    case K::Refines:
    case K::ProgEq: {
      auto a = alpha_prog(f->p1, from, to);
      auto b = alpha_prog(f->p2, from, to);
      if (a == f->p1 && b == f->p2) return f;
      return f->kind == K::Refines ? Formula::mk_refines(a, b)
                                   : Formula::mk_progeq(a, b);
    }
  }
  return f;
}

ProgramPtr alpha_prog(const ProgramPtr& p, const Variable& from,
                      const Variable& to) {
  using K = Program::Kind;
  switch (p->kind) {
    case K::Test: {
      auto g = alpha_fml(p->fml, from, to);
      return g == p->fml ? p : Program::mk_test(g);
    }
    case K::Assign:
    case K::Random: return p;
    case K::ODE: {
      auto g = alpha_fml(p->fml, from, to);
      return g == p->fml ? p : Program::mk_ode(p->odes, g);
    }
    case K::Choice: {
      auto a = alpha_prog(p->p1, from, to);
      auto b = alpha_prog(p->p2, from, to);
      if (a == p->p1 && b == p->p2) return p;
      return Program::mk_choice(a, b);
    }
    case K::Seq: {
      auto a = alpha_prog(p->p1, from, to);
      auto b = alpha_prog(p->p2, from, to);
      if (a == p->p1 && b == p->p2) return p;
      return Program::mk_seq(a, b);
    }
    case K::Star: {
      auto a = alpha_prog(p->p1, from, to);
      return a == p->p1 ? p : Program::mk_star(a);
    }
  }
  return p;
}

}  // namespace

Expression alpha_rename(const Expression& e, const Variable& from,
                        const Variable& to) {
  if (!is_fresh(to, e))
    throw NotFresh("target variable " + to.str() + " occurs in expression");
  switch (e.kind) {
    case ExprKind::Term: return e;  // terms have no binders
    case ExprKind::Formula:
      return Expression(alpha_fml(e.formula, from, to));
    case ExprKind::Program:
      return Expression(alpha_prog(e.program, from, to));
  }
  return e;
}

Variable fresh_var(const std::string& base,
                   const std::vector<Expression>& avoid) {
  VarSet used;
  for (const auto& e : avoid) insert_all(used, all_vars(e));
  auto ok = [&](const Variable& v) {
    return !used.count(v) && !used.count(v.prime());
  };
  Variable v(base, false);
  if (ok(v)) return v;
  for (int i = 0;; ++i) {
    Variable vi(base + std::to_string(i), false);
    if (ok(vi)) return vi;
  }
}

}  // namespace drlref
