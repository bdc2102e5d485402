#include "drlref/contexts.hpp"

#include <sstream>

#include "drlref/parser.hpp"
#include "drlref/printer.hpp"

namespace drlref {

std::string path_str(const Path& p) {
  std::ostringstream os;
  for (size_t i = 0; i < p.size(); ++i) {
    if (i) os << ".";
    os << p[i];
  }
  return os.str();
}

Path parse_path(const std::string& s) {
  Path p;
  if (s.empty()) return p;
  size_t pos = 0;
  while (pos <= s.size()) {
    size_t dot = s.find('.', pos);
    std::string part = s.substr(pos, dot == std::string::npos ? dot
                                                              : dot - pos);
    if (part.empty() || part.find_first_not_of("0123456789") !=
                            std::string::npos)
      throw InvalidPath("bad path component '" + part + "' in '" + s + "'");
    p.push_back(std::stoul(part));
    if (dot == std::string::npos) break;
    pos = dot + 1;
  }
  return p;
}

size_t arity(const Expression& e) {
  switch (e.kind) {
    case ExprKind::Term:
      switch (e.term->kind) {
        case Term::Kind::Var:
        case Term::Kind::Int: return 0;
        case Term::Kind::Differential: return 1;
        default: return 2;
      }
    case ExprKind::Formula:
      switch (e.formula->kind) {
        case Formula::Kind::True:
        case Formula::Kind::False: return 0;
        case Formula::Kind::Cmp: return 2;
        case Formula::Kind::Not:
        case Formula::Kind::Forall:
        case Formula::Kind::Exists: return 1;
        default: return 2;
      }
    case ExprKind::Program:
      switch (e.program->kind) {
        case Program::Kind::Test: return 1;
        case Program::Kind::Assign: return 1;
        case Program::Kind::Random: return 0;
        case Program::Kind::ODE: return e.program->odes.size() + 1;
        case Program::Kind::Choice:
        case Program::Kind::Seq: return 2;
        case Program::Kind::Star: return 1;
      }
  }
  return 0;
}

Expression child_at(const Expression& e, size_t index) {
  if (index >= arity(e))
    throw InvalidPath("child index " + std::to_string(index) +
                      " out of range for " + pretty(e));
  switch (e.kind) {
    case ExprKind::Term: {
      const auto& t = e.term;
      if (t->kind == Term::Kind::Differential) return Expression(t->lhs);
      return Expression(index == 0 ? t->lhs : t->rhs);
    }
    case ExprKind::Formula: {
      const auto& f = e.formula;
      using K = Formula::Kind;
      switch (f->kind) {
        case K::Cmp: return Expression(index == 0 ? f->t1 : f->t2);
        case K::Not:
        case K::Forall:
        case K::Exists: return Expression(f->f1);
        case K::Box:
        case K::Diamond:
          return index == 0 ? Expression(f->p1) : Expression(f->f1);
        case K::Refines:
        case K::ProgEq:
          return index == 0 ? Expression(f->p1) : Expression(f->p2);
        default: return Expression(index == 0 ? f->f1 : f->f2);
      }
    }
    case ExprKind::Program: {
      const auto& p = e.program;
      using K = Program::Kind;
      switch (p->kind) {
        case K::Test: return Expression(p->fml);
        case K::Assign: return Expression(p->term);
        case K::ODE:
          if (index < p->odes.size()) return Expression(p->odes[index].rhs);
          return Expression(p->fml);
        case K::Choice:
        case K::Seq:
          return index == 0 ? Expression(p->p1) : Expression(p->p2);
        case K::Star: return Expression(p->p1);
        default: break;
      }
    }
  }
  throw InvalidPath("no such child");
}

Expression subexpr_at(const Expression& e, const Path& p) {
  Expression cur = e;
  for (size_t idx : p) cur = child_at(cur, idx);
  return cur;
}

namespace {

void expect_kind(const Expression& sub, ExprKind k) {
  if (sub.kind != k) throw KindMismatch("replacement has the wrong kind");
}

Expression rebuild(const Expression& e, size_t index, const Expression& sub) {
  switch (e.kind) {
    case ExprKind::Term: {
      const auto& t = e.term;
      expect_kind(sub, ExprKind::Term);
      switch (t->kind) {
        case Term::Kind::Differential:
          return Expression(Term::mk_differential(sub.term));
        case Term::Kind::Plus:
          return Expression(index == 0 ? Term::mk_plus(sub.term, t->rhs)
                                       : Term::mk_plus(t->lhs, sub.term));
        case Term::Kind::Minus:
          return Expression(index == 0 ? Term::mk_minus(sub.term, t->rhs)
                                       : Term::mk_minus(t->lhs, sub.term));
        case Term::Kind::Times:
          return Expression(index == 0 ? Term::mk_times(sub.term, t->rhs)
                                       : Term::mk_times(t->lhs, sub.term));
        default: throw InvalidPath("term leaf has no children");
      }
    }
    case ExprKind::Formula: {
      const auto& f = e.formula;
      using K = Formula::Kind;
      using F = Formula;
      switch (f->kind) {
        case K::Cmp:
          expect_kind(sub, ExprKind::Term);
          return Expression(index == 0 ? F::mk_cmp(f->cmp, sub.term, f->t2)
                                       : F::mk_cmp(f->cmp, f->t1, sub.term));
        case K::Not:
          expect_kind(sub, ExprKind::Formula);
          return Expression(F::mk_not(sub.formula));
        case K::Forall:
          expect_kind(sub, ExprKind::Formula);
          return Expression(F::mk_forall(f->var, sub.formula));
        case K::Exists:
          expect_kind(sub, ExprKind::Formula);
          return Expression(F::mk_exists(f->var, sub.formula));
        case K::And:
        case K::Or:
        case K::Imply:
        case K::Equiv: {
          expect_kind(sub, ExprKind::Formula);
          FormulaPtr a = index == 0 ? sub.formula : f->f1;
          FormulaPtr b = index == 0 ? f->f2 : sub.formula;
          switch (f->kind) {
            case K::And: return Expression(F::mk_and(a, b));
            case K::Or: return Expression(F::mk_or(a, b));
            case K::Imply: return Expression(F::mk_imply(a, b));
            default: return Expression(F::mk_equiv(a, b));
          }
        }
        case K::Box:
        case K::Diamond: {
          ProgramPtr pr = f->p1;
          FormulaPtr body = f->f1;
          if (index == 0) {
            expect_kind(sub, ExprKind::Program);
            pr = sub.program;
          } else {
            expect_kind(sub, ExprKind::Formula);
            body = sub.formula;
          }
          return Expression(f->kind == K::Box ? F::mk_box(pr, body)
                                              : F::mk_diamond(pr, body));
        }
        case K::Refines:
        case K::ProgEq: {
          expect_kind(sub, ExprKind::Program);
          ProgramPtr a = index == 0 ? sub.program : f->p1;
          ProgramPtr b = index == 0 ? f->p2 : sub.program;
          return Expression(f->kind == K::Refines ? F::mk_refines(a, b)
                                                  : F::mk_progeq(a, b));
        }
        default: throw InvalidPath("formula leaf has no children");
      }
    }
    case ExprKind::Program: {
      const auto& p = e.program;
      using K = Program::Kind;
      using P = Program;
      switch (p->kind) {
        case K::Test:
          expect_kind(sub, ExprKind::Formula);
          return Expression(P::mk_test(sub.formula));
        case K::Assign:
          expect_kind(sub, ExprKind::Term);
          return Expression(P::mk_assign(p->var, sub.term));
        case K::ODE: {
          if (index < p->odes.size()) {
            expect_kind(sub, ExprKind::Term);
            auto eqs = p->odes;
            eqs[index].rhs = sub.term;
            return Expression(P::mk_ode(std::move(eqs), p->fml));
          }
          expect_kind(sub, ExprKind::Formula);
          return Expression(P::mk_ode(p->odes, sub.formula));
        }
        case K::Choice:
        case K::Seq: {
          expect_kind(sub, ExprKind::Program);
          ProgramPtr a = index == 0 ? sub.program : p->p1;
          ProgramPtr b = index == 0 ? p->p2 : sub.program;
          return Expression(p->kind == K::Choice ? P::mk_choice(a, b)
                                                 : P::mk_seq(a, b));
        }
        case K::Star:
          expect_kind(sub, ExprKind::Program);
          return Expression(P::mk_star(sub.program));
        default: throw InvalidPath("program leaf has no children");
      }
    }
  }
  throw InvalidPath("bad expression");
}

}  // namespace

Expression replace_at(const Expression& e, const Path& p,
                      const Expression& sub) {
  if (p.empty()) {
    expect_kind(sub, e.kind);
    return sub;
  }
  size_t idx = p.front();
  if (idx >= arity(e))
    throw InvalidPath("index " + std::to_string(idx) + " invalid at " +
                      pretty(e));
  Path rest(p.begin() + 1, p.end());
  Expression child = child_at(e, idx);
  return rebuild(e, idx, replace_at(child, rest, sub));
}

std::pair<Context, Expression> split_at(const Expression& e, const Path& p) {
  // Walk the path computing polarity: negation, the program side of a box
  // or diamond-as-negated-box, the left side of a refinement, and the left
  // side of an implication flip; anything under an equivalence has no
  // definite polarity.
  Expression cur = e;
  int flips = 0;
  bool none = false;
  for (size_t step = 0; step < p.size(); ++step) {
    size_t idx = p[step];
    if (idx >= arity(cur))
      throw InvalidPath("index " + std::to_string(idx) + " invalid at " +
                        pretty(cur));
    if (cur.kind == ExprKind::Formula) {
      using K = Formula::Kind;
      switch (cur.formula->kind) {
        case K::Not: flips++; break;
        case K::Imply:
          if (idx == 0) flips++;
          break;
        case K::Equiv: none = true; break;
        case K::Box:
          if (idx == 0) flips++;
          break;
        case K::Diamond: break;  // !([a]!p): two flips on either side
        case K::Refines:
          if (idx == 0) flips++;
          break;
        case K::ProgEq: none = true; break;
        default: break;
      }
    }
    cur = child_at(cur, idx);
  }
  if (cur.kind == ExprKind::Term)
    throw InvalidPath("term positions cannot be split (no term holes)");
  if (e.kind == ExprKind::Term) throw InvalidPath("terms have no contexts");
  Context c;
  c.root = e;
  c.path = p;
  c.hole_kind = cur.kind;
  c.result_kind = e.kind;
  c.polarity = none ? Polarity::None
                    : (flips % 2 == 0 ? Polarity::Monotone
                                      : Polarity::Antitone);
  return {c, cur};
}

Expression plug(const Context& c, const Expression& e) {
  if (e.kind != c.hole_kind)
    throw KindMismatch("plugged expression kind does not match the hole");
  return replace_at(c.root, c.path, e);
}

FormulaPtr FormulaContext::apply(const FormulaPtr& f) const {
  FormulaPtr out = f;
  for (size_t i = boxes.size(); i-- > 0;)
    out = Formula::mk_box(boxes[i], out);
  return out;
}

Context FormulaContext::as_context() const {
  Context c;
  c.root = Expression(apply(Formula::mk_true()));
  c.path.assign(boxes.size(), 1);
  c.hole_kind = ExprKind::Formula;
  c.result_kind = ExprKind::Formula;
  c.polarity = Polarity::Monotone;
  return c;
}

FormulaContext projective_context(const Context& c, const ProgramPtr& alpha) {
  if (c.hole_kind != ExprKind::Program ||
      c.result_kind != ExprKind::Program)
    throw UnsupportedShape(
        "projective contexts need a program-to-program context");
  if (c.polarity != Polarity::Monotone)
    throw PolarityError("projective contexts need a monotone context");

  // Walk the alpha-plugged tree: a sequence prefix contributes [g], a loop
  // contributes [C(alpha)] (the whole loop with the hole filled), right
  // sequence parts and choices contribute nothing.
  FormulaContext out;
  Expression walk = replace_at(c.root, c.path, Expression(alpha));
  for (size_t step = 0; step < c.path.size(); ++step) {
    size_t idx = c.path[step];
    const ProgramPtr& p = walk.program;
    switch (p->kind) {
      case Program::Kind::Seq:
        if (idx == 1) out.boxes.push_back(p->p1);
        break;
      case Program::Kind::Choice:
        break;
      case Program::Kind::Star:
        out.boxes.push_back(walk.program);
        break;
      default:
        throw UnsupportedShape(
            "projective contexts allow only ;, ++ and * above the hole");
    }
    walk = child_at(walk, idx);
  }
  return out;
}

std::vector<Context> enumerate_contexts(size_t depth, ExprKind kind) {
  // Each entry is a (root-with-filler, path) pair.  Fillers are fixed small
  // expressions so counts follow the constructor grammar exactly.
  ProgramPtr g = parse_program("y := y + 1");
  FormulaPtr q = parse_formula("y <= 1");
  std::vector<Context> out;

  struct Item {
    Expression root;
    Path path;
  };

  if (kind == ExprKind::Program) {
    ProgramPtr filler = parse_program("x := 0");
    std::vector<Item> layer = {{Expression(filler), {}}};
    auto emit = [&](const Item& it) {
      out.push_back(split_at(it.root, it.path).first);
    };
    emit(layer[0]);
    for (size_t d = 0; d < depth; ++d) {
      std::vector<Item> next;
      for (const auto& it : layer) {
        const ProgramPtr& C = it.root.program;
        auto push = [&](ProgramPtr root, size_t head) {
          Item n{Expression(std::move(root)), Path{head}};
          n.path.insert(n.path.end(), it.path.begin(), it.path.end());
          emit(n);
          next.push_back(std::move(n));
        };
        push(Program::mk_seq(C, g), 0);
        push(Program::mk_seq(g, C), 1);
        push(Program::mk_choice(C, g), 0);
        push(Program::mk_choice(g, C), 1);
        push(Program::mk_star(C), 0);
      }
      layer = std::move(next);
    }
    return out;
  }

  if (kind == ExprKind::Formula) {
    FormulaPtr filler = parse_formula("x <= 0");
    std::vector<Item> layer = {{Expression(filler), {}}};
    auto emit = [&](const Item& it) {
      out.push_back(split_at(it.root, it.path).first);
    };
    emit(layer[0]);
    Variable z("z");
    for (size_t d = 0; d < depth; ++d) {
      std::vector<Item> next;
      for (const auto& it : layer) {
        const FormulaPtr& C = it.root.formula;
        auto push = [&](FormulaPtr root, Path head) {
          Item n{Expression(std::move(root)), head};
          n.path.insert(n.path.end(), it.path.begin(), it.path.end());
          emit(n);
          next.push_back(std::move(n));
        };
        push(Formula::mk_not(C), {0});
        push(Formula::mk_and(C, q), {0});
        push(Formula::mk_and(q, C), {1});
        push(Formula::mk_or(C, q), {0});
        push(Formula::mk_imply(C, q), {0});
        push(Formula::mk_imply(q, C), {1});
        push(Formula::mk_equiv(C, q), {0});
        push(Formula::mk_forall(z, C), {0});
        push(Formula::mk_box(g, C), {1});
        push(Formula::mk_box(Program::mk_test(C), q), {0, 0});
        push(Formula::mk_box(
                 Program::mk_ode({OdeEquation{Variable("y"),
                                              Term::mk_int(1)}}, C),
                 q),
             {0, 1});
      }
      layer = std::move(next);
    }
    return out;
  }

  throw KindMismatch("contexts are enumerated for programs and formulas");
}

}  // namespace drlref
