#include "drlref/printer.hpp"

#include <sstream>

namespace drlref {

namespace {

// Term precedence: +,- = 1; * = 2; atoms = 3.  +,-,* associate left.
void print_term(std::ostream& os, const TermPtr& t, int prec) {
  switch (t->kind) {
    case Term::Kind::Var:
      os << t->var.str();
      return;
    case Term::Kind::Int:
      if (t->value < 0 && prec > 1) {
        os << "(" << t->value << ")";
      } else {
        os << t->value;
      }
      return;
    case Term::Kind::Differential:
      os << "(";
      print_term(os, t->lhs, 0);
      os << ")'";
      return;
    case Term::Kind::Plus:
    case Term::Kind::Minus: {
      bool paren = prec > 1;
      if (paren) os << "(";
      print_term(os, t->lhs, 1);
      os << (t->kind == Term::Kind::Plus ? " + " : " - ");
      print_term(os, t->rhs, 2);
      if (paren) os << ")";
      return;
    }
    case Term::Kind::Times: {
      bool paren = prec > 2;
      if (paren) os << "(";
      print_term(os, t->lhs, 2);
      os << "*";
      print_term(os, t->rhs, 3);
      if (paren) os << ")";
      return;
    }
  }
}

void print_formula(std::ostream& os, const FormulaPtr& f, int prec);
void print_program(std::ostream& os, const ProgramPtr& p, int prec);

const char* cmp_str(CmpOp op) {
  switch (op) {
    case CmpOp::Le: return " <= ";
    case CmpOp::Lt: return " < ";
    case CmpOp::Eq: return " = ";
    case CmpOp::Ge: return " >= ";
    case CmpOp::Gt: return " > ";
  }
  return " <= ";
}

// Formula precedence: <-> = 1; -> = 2; | = 3; & = 4; prefix ops = 5;
// atoms = 6.  -> and <-> associate right, | and & left.
void print_formula(std::ostream& os, const FormulaPtr& f, int prec) {
  using K = Formula::Kind;
  switch (f->kind) {
    case K::True: os << "true"; return;
    case K::False: os << "false"; return;
    case K::Cmp:
      print_term(os, f->t1, 1);
      os << cmp_str(f->cmp);
      print_term(os, f->t2, 1);
      return;
    case K::Refines:
      os << "{";
      print_program(os, f->p1, 0);
      os << "} <= {";
      print_program(os, f->p2, 0);
      os << "}";
      return;
    case K::ProgEq:
      os << "{";
      print_program(os, f->p1, 0);
      os << "} == {";
      print_program(os, f->p2, 0);
      os << "}";
      return;
    case K::Not:
      os << "!";
      print_formula(os, f->f1, 5);
      return;
    case K::Box:
      os << "[";
      print_program(os, f->p1, 0);
      os << "]";
      print_formula(os, f->f1, 5);
      return;
    case K::Diamond:
      os << "<";
      print_program(os, f->p1, 0);
      os << ">";
      print_formula(os, f->f1, 5);
      return;
    case K::Forall:
      os << "\\forall " << f->var.str() << " ";
      print_formula(os, f->f1, 5);
      return;
    case K::Exists:
      os << "\\exists " << f->var.str() << " ";
      print_formula(os, f->f1, 5);
      return;
    case K::And: {
      bool paren = prec > 4;
      if (paren) os << "(";
      print_formula(os, f->f1, 4);
      os << " & ";
      print_formula(os, f->f2, 5);
      if (paren) os << ")";
      return;
    }
    case K::Or: {
      bool paren = prec > 3;
      if (paren) os << "(";
      print_formula(os, f->f1, 3);
      os << " | ";
      print_formula(os, f->f2, 4);
      if (paren) os << ")";
      return;
    }
    case K::Imply: {
      bool paren = prec > 2;
      if (paren) os << "(";
      print_formula(os, f->f1, 3);
      os << " -> ";
      print_formula(os, f->f2, 2);
      if (paren) os << ")";
      return;
    }
    case K::Equiv: {
      bool paren = prec > 1;
      if (paren) os << "(";
      print_formula(os, f->f1, 3);
      os << " <-> ";
      print_formula(os, f->f2, 3);
      if (paren) os << ")";
      return;
    }
  }
}

// Program precedence: ++ = 1; ; = 2; atoms = 3.  Both associate right.
void print_program(std::ostream& os, const ProgramPtr& p, int prec) {
  using K = Program::Kind;
  switch (p->kind) {
    case K::Test:
      os << "?";
      print_formula(os, p->fml, 5);
      return;
    case K::Assign:
      os << p->var.str() << " := ";
      print_term(os, p->term, 1);
      return;
    case K::Random:
      os << p->var.str() << " := *";
      return;
    case K::ODE: {
      os << "{";
      bool first = true;
      for (const auto& eq : p->odes) {
        if (!first) os << ", ";
        first = false;
        os << eq.var.str() << "' = ";
        print_term(os, eq.rhs, 1);
      }
      os << " & ";
      print_formula(os, p->fml, 0);
      os << "}";
      return;
    }
    case K::Star:
      os << "{";
      print_program(os, p->p1, 0);
      os << "}*";
      return;
    case K::Seq: {
      bool paren = prec > 2;
      if (paren) os << "(";
      print_program(os, p->p1, 3);
      os << "; ";
      print_program(os, p->p2, 2);
      if (paren) os << ")";
      return;
    }
    case K::Choice: {
      bool paren = prec > 1;
      if (paren) os << "(";
      print_program(os, p->p1, 2);
      os << " ++ ";
      print_program(os, p->p2, 1);
      if (paren) os << ")";
      return;
    }
  }
}

}  // namespace

std::string pretty(const TermPtr& t) {
  std::ostringstream os;
  print_term(os, t, 0);
  return os.str();
}

std::string pretty(const FormulaPtr& f) {
  std::ostringstream os;
  print_formula(os, f, 0);
  return os.str();
}

std::string pretty(const ProgramPtr& p) {
  std::ostringstream os;
  print_program(os, p, 0);
  return os.str();
}

std::string pretty(const Expression& e) {
  switch (e.kind) {
    case ExprKind::Term: return pretty(e.term);
    case ExprKind::Formula: return pretty(e.formula);
    case ExprKind::Program: return pretty(e.program);
  }
  return "";
}

}  // namespace drlref
