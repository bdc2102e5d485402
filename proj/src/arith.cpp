#include "drlref/arith.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "drlref/linarith.hpp"
#include "drlref/printer.hpp"

namespace drlref {

std::vector<Obligation> collect_obligations(const Provable& p) {
  std::vector<Obligation> out;
  size_t n = 0;
  for (size_t i = 0; i < p.trace.size(); ++i) {
    if (p.trace[i].rule != "admit") continue;
    if (n >= p.assumptions.size()) break;
    Obligation o;
    o.formula = p.assumptions[n++];
    o.origin = "step " + std::to_string(i);
    out.push_back(std::move(o));
  }
  return out;
}

namespace {

using FK = Formula::Kind;

// A formula valid by its structure alone (true, reflexive comparisons).
bool structurally_valid(const FormulaPtr& f) {
  switch (f->kind) {
    case FK::True: return true;
    case FK::Cmp:
      return (f->cmp == CmpOp::Le || f->cmp == CmpOp::Ge ||
              f->cmp == CmpOp::Eq) &&
             equal(f->t1, f->t2);
    case FK::And:
      return structurally_valid(f->f1) && structurally_valid(f->f2);
    case FK::Or:
      return structurally_valid(f->f1) || structurally_valid(f->f2);
    case FK::Imply: return structurally_valid(f->f2);
    case FK::Forall:
    case FK::Exists: return structurally_valid(f->f1);
    default: return false;
  }
}

bool quantifier_free(const FormulaPtr& f) {
  switch (f->kind) {
    case FK::True:
    case FK::False:
    case FK::Cmp: return true;
    case FK::Not: return quantifier_free(f->f1);
    case FK::And:
    case FK::Or:
    case FK::Imply:
    case FK::Equiv:
      return quantifier_free(f->f1) && quantifier_free(f->f2);
    default: return false;
  }
}

std::optional<Rational> eval_term_exact(
    const TermPtr& t, const std::map<Variable, Rational>& asg) {
  try {
    switch (t->kind) {
      case Term::Kind::Var: {
        auto it = asg.find(t->var);
        if (it == asg.end()) return std::nullopt;
        return it->second;
      }
      case Term::Kind::Int: return Rational(t->value);
      case Term::Kind::Plus: {
        auto a = eval_term_exact(t->lhs, asg), b = eval_term_exact(t->rhs, asg);
        if (!a || !b) return std::nullopt;
        return *a + *b;
      }
      case Term::Kind::Minus: {
        auto a = eval_term_exact(t->lhs, asg), b = eval_term_exact(t->rhs, asg);
        if (!a || !b) return std::nullopt;
        return *a - *b;
      }
      case Term::Kind::Times: {
        auto a = eval_term_exact(t->lhs, asg), b = eval_term_exact(t->rhs, asg);
        if (!a || !b) return std::nullopt;
        return *a * *b;
      }
      case Term::Kind::Differential: return std::nullopt;
    }
  } catch (const RationalOverflow&) {
    return std::nullopt;
  }
  return std::nullopt;
}

std::optional<bool> eval_exact(const FormulaPtr& f,
                               const std::map<Variable, Rational>& asg) {
  switch (f->kind) {
    case FK::True: return true;
    case FK::False: return false;
    case FK::Cmp: {
      auto a = eval_term_exact(f->t1, asg), b = eval_term_exact(f->t2, asg);
      if (!a || !b) return std::nullopt;
      switch (f->cmp) {
        case CmpOp::Le: return *a <= *b;
        case CmpOp::Lt: return *a < *b;
        case CmpOp::Eq: return *a == *b;
        case CmpOp::Ge: return *a >= *b;
        case CmpOp::Gt: return *a > *b;
      }
      return std::nullopt;
    }
    case FK::Not: {
      auto a = eval_exact(f->f1, asg);
      if (!a) return std::nullopt;
      return !*a;
    }
    case FK::And: {
      auto a = eval_exact(f->f1, asg), b = eval_exact(f->f2, asg);
      if (!a || !b) return std::nullopt;
      return *a && *b;
    }
    case FK::Or: {
      auto a = eval_exact(f->f1, asg), b = eval_exact(f->f2, asg);
      if (!a || !b) return std::nullopt;
      return *a || *b;
    }
    case FK::Imply: {
      auto a = eval_exact(f->f1, asg), b = eval_exact(f->f2, asg);
      if (!a || !b) return std::nullopt;
      return !*a || *b;
    }
    case FK::Equiv: {
      auto a = eval_exact(f->f1, asg), b = eval_exact(f->f2, asg);
      if (!a || !b) return std::nullopt;
      return *a == *b;
    }
    default: return std::nullopt;  // quantifiers need a domain
  }
}

// Three-valued sampling evaluation: quantifiers range over a small grid;
// an existential that fails on the whole grid is unknown, a universal that
// holds on the whole grid is unknown, so reported refutations are sound.
enum class Tri { T, F, U };

Tri tri_not(Tri a) {
  return a == Tri::T ? Tri::F : a == Tri::F ? Tri::T : Tri::U;
}

const double kGrid[] = {-2, -1.5, -1, -0.5, 0, 0.5, 1, 1.5, 2};

std::optional<double> eval_term_d(const TermPtr& t,
                                  std::map<Variable, double>& asg) {
  switch (t->kind) {
    case Term::Kind::Var: {
      auto it = asg.find(t->var);
      if (it == asg.end()) return std::nullopt;
      return it->second;
    }
    case Term::Kind::Int: return static_cast<double>(t->value);
    case Term::Kind::Plus: {
      auto a = eval_term_d(t->lhs, asg), b = eval_term_d(t->rhs, asg);
      if (!a || !b) return std::nullopt;
      return *a + *b;
    }
    case Term::Kind::Minus: {
      auto a = eval_term_d(t->lhs, asg), b = eval_term_d(t->rhs, asg);
      if (!a || !b) return std::nullopt;
      return *a - *b;
    }
    case Term::Kind::Times: {
      auto a = eval_term_d(t->lhs, asg), b = eval_term_d(t->rhs, asg);
      if (!a || !b) return std::nullopt;
      return *a * *b;
    }
    case Term::Kind::Differential: return std::nullopt;
  }
  return std::nullopt;
}

Tri eval_tri(const FormulaPtr& f, std::map<Variable, double>& asg) {
  switch (f->kind) {
    case FK::True: return Tri::T;
    case FK::False: return Tri::F;
    case FK::Cmp: {
      auto a = eval_term_d(f->t1, asg), b = eval_term_d(f->t2, asg);
      if (!a || !b) return Tri::U;
      bool r = false;
      switch (f->cmp) {
        case CmpOp::Le: r = *a <= *b; break;
        case CmpOp::Lt: r = *a < *b; break;
        case CmpOp::Eq: r = *a == *b; break;
        case CmpOp::Ge: r = *a >= *b; break;
        case CmpOp::Gt: r = *a > *b; break;
      }
      return r ? Tri::T : Tri::F;
    }
    case FK::Not: return tri_not(eval_tri(f->f1, asg));
    case FK::And: {
      Tri a = eval_tri(f->f1, asg);
      if (a == Tri::F) return Tri::F;
      Tri b = eval_tri(f->f2, asg);
      if (b == Tri::F) return Tri::F;
      return (a == Tri::T && b == Tri::T) ? Tri::T : Tri::U;
    }
    case FK::Or: {
      Tri a = eval_tri(f->f1, asg);
      if (a == Tri::T) return Tri::T;
      Tri b = eval_tri(f->f2, asg);
      if (b == Tri::T) return Tri::T;
      return (a == Tri::F && b == Tri::F) ? Tri::F : Tri::U;
    }
    case FK::Imply: {
      Tri a = eval_tri(f->f1, asg);
      if (a == Tri::F) return Tri::T;
      Tri b = eval_tri(f->f2, asg);
      if (b == Tri::T) return Tri::T;
      return (a == Tri::T && b == Tri::F) ? Tri::F : Tri::U;
    }
    case FK::Equiv: {
      Tri a = eval_tri(f->f1, asg);
      Tri b = eval_tri(f->f2, asg);
      if (a == Tri::U || b == Tri::U) return Tri::U;
      return a == b ? Tri::T : Tri::F;
    }
    case FK::Exists: {
      bool unknown_seen = false;
      auto saved = asg.find(f->var) != asg.end()
                       ? std::optional<double>(asg[f->var])
                       : std::nullopt;
      Tri out = Tri::U;
      for (double g : kGrid) {
        asg[f->var] = g;
        Tri r = eval_tri(f->f1, asg);
        if (r == Tri::T) {
          out = Tri::T;
          break;
        }
        if (r == Tri::U) unknown_seen = true;
      }
      (void)unknown_seen;
      if (saved) asg[f->var] = *saved;
      else asg.erase(f->var);
      return out;  // grid-false existentials stay unknown
    }
    case FK::Forall: {
      auto saved = asg.find(f->var) != asg.end()
                       ? std::optional<double>(asg[f->var])
                       : std::nullopt;
      Tri out = Tri::U;
      for (double g : kGrid) {
        asg[f->var] = g;
        Tri r = eval_tri(f->f1, asg);
        if (r == Tri::F) {
          out = Tri::F;
          break;
        }
      }
      if (saved) asg[f->var] = *saved;
      else asg.erase(f->var);
      return out;  // grid-true universals stay unknown
    }
    default: return Tri::U;
  }
}

// disjunctive normal form literals (comparison, positive?)
struct Lit {
  FormulaPtr cmp;
  bool pos;
};
using Conj = std::vector<Lit>;
using Dnf = std::vector<Conj>;

std::optional<Dnf> cross(const Dnf& a, const Dnf& b) {
  Dnf out;
  for (const auto& x : a)
    for (const auto& y : b) {
      Conj c = x;
      c.insert(c.end(), y.begin(), y.end());
      out.push_back(std::move(c));
      if (out.size() > 512) return std::nullopt;
    }
  return out;
}

std::optional<Dnf> join(const Dnf& a, const Dnf& b) {
  Dnf out = a;
  out.insert(out.end(), b.begin(), b.end());
  if (out.size() > 512) return std::nullopt;
  return out;
}

std::optional<Dnf> to_dnf(const FormulaPtr& f, bool pos) {
  switch (f->kind) {
    case FK::True: return pos ? Dnf{Conj{}} : Dnf{};
    case FK::False: return pos ? Dnf{} : Dnf{Conj{}};
    case FK::Cmp: return Dnf{Conj{Lit{f, pos}}};
    case FK::Not: return to_dnf(f->f1, !pos);
    case FK::And: {
      auto a = to_dnf(f->f1, pos), b = to_dnf(f->f2, pos);
      if (!a || !b) return std::nullopt;
      return pos ? cross(*a, *b) : join(*a, *b);
    }
    case FK::Or: {
      auto a = to_dnf(f->f1, pos), b = to_dnf(f->f2, pos);
      if (!a || !b) return std::nullopt;
      return pos ? join(*a, *b) : cross(*a, *b);
    }
    case FK::Imply: {
      auto a = to_dnf(f->f1, !pos), b = to_dnf(f->f2, pos);
      if (!a || !b) return std::nullopt;
      return pos ? join(*a, *b) : cross(*a, *b);
    }
    case FK::Equiv: {
      auto ap = to_dnf(f->f1, true), an = to_dnf(f->f1, false);
      auto bp = to_dnf(f->f2, true), bn = to_dnf(f->f2, false);
      if (!ap || !an || !bp || !bn) return std::nullopt;
      if (pos) {
        auto l = cross(*ap, *bp), r = cross(*an, *bn);
        if (!l || !r) return std::nullopt;
        return join(*l, *r);
      }
      auto l = cross(*ap, *bn), r = cross(*an, *bp);
      if (!l || !r) return std::nullopt;
      return join(*l, *r);
    }
    default: return std::nullopt;
  }
}

// literal -> linear constraints (a negated equality splits the conjunct)
std::optional<std::vector<std::vector<LinConstraint>>> conj_constraints(
    const Conj& c) {
  std::vector<std::vector<LinConstraint>> alt{{}};
  for (const Lit& l : c) {
    auto a = linearize(l.cmp->t1);
    auto b = linearize(l.cmp->t2);
    if (!a || !b) return std::nullopt;
    LinearForm diff = *a;  // lhs - rhs
    for (const auto& [v, co] : b->coeffs) {
      Rational nc = (diff.coeffs.count(v) ? diff.coeffs[v] : Rational(0)) - co;
      if (nc.is_zero()) diff.coeffs.erase(v);
      else diff.coeffs[v] = nc;
    }
    diff.constant = diff.constant - b->constant;
    LinearForm neg;
    for (const auto& [v, co] : diff.coeffs) neg.coeffs[v] = -co;
    neg.constant = -diff.constant;

    CmpOp op = l.cmp->cmp;
    auto add_all = [&](const LinConstraint& lc) {
      for (auto& alt_c : alt) alt_c.push_back(lc);
    };
    if (l.pos) {
      switch (op) {
        case CmpOp::Le: add_all({diff, LinRel::Le}); break;
        case CmpOp::Lt: add_all({diff, LinRel::Lt}); break;
        case CmpOp::Eq: add_all({diff, LinRel::Eq}); break;
        case CmpOp::Ge: add_all({neg, LinRel::Le}); break;
        case CmpOp::Gt: add_all({neg, LinRel::Lt}); break;
      }
    } else {
      switch (op) {
        case CmpOp::Le: add_all({neg, LinRel::Lt}); break;   // lhs > rhs
        case CmpOp::Lt: add_all({neg, LinRel::Le}); break;   // lhs >= rhs
        case CmpOp::Ge: add_all({diff, LinRel::Lt}); break;  // lhs < rhs
        case CmpOp::Gt: add_all({diff, LinRel::Le}); break;  // lhs <= rhs
        case CmpOp::Eq: {
          // lhs != rhs: split every alternative in two
          std::vector<std::vector<LinConstraint>> next;
          for (auto& alt_c : alt) {
            auto c1 = alt_c;
            c1.push_back({diff, LinRel::Lt});
            auto c2 = alt_c;
            c2.push_back({neg, LinRel::Lt});
            next.push_back(std::move(c1));
            next.push_back(std::move(c2));
          }
          alt = std::move(next);
          break;
        }
      }
    }
    if (alt.size() > 512) return std::nullopt;
  }
  return alt;
}

}  // namespace

DischargeResult try_discharge(const Obligation& o, uint64_t seed,
                              size_t samples) {
  DischargeResult res;
  const FormulaPtr& f = o.formula;
  if (!first_order(f)) {
    res.note = "not first-order";
    return res;
  }

  if (structurally_valid(f)) {
    res.status = ObligationStatus::Proved;
    res.note = "structurally valid";
    return res;
  }

  VarSet fv = free_vars(f);
  if (fv.empty() && quantifier_free(f)) {
    std::map<Variable, Rational> empty;
    auto v = eval_exact(f, empty);
    if (v) {
      res.status = *v ? ObligationStatus::Proved : ObligationStatus::Refuted;
      res.note = "ground evaluation";
      return res;
    }
  }

  // strip the universal prefix: validity of the matrix over free variables
  FormulaPtr matrix = f;
  while (matrix->kind == FK::Forall) matrix = matrix->f1;

  if (quantifier_free(matrix)) {
    auto dnf = to_dnf(matrix, false);  // the negation, ready for FM
    if (dnf) {
      bool all_linear = true;
      bool refutable = false;
      std::map<Variable, Rational> witness;
      for (const Conj& c : *dnf) {
        auto alts = conj_constraints(c);
        if (!alts) {
          all_linear = false;
          break;
        }
        for (auto& cs : *alts) {
          FmResult r = fourier_motzkin(cs);
          if (r.sat) {
            refutable = true;
            witness = r.witness;
            break;
          }
        }
        if (refutable) break;
      }
      if (all_linear) {
        if (!refutable) {
          res.status = ObligationStatus::Proved;
          res.note = "linear (eliminated)";
          return res;
        }
        // confirm the witness by exact evaluation of the matrix
        std::map<Variable, Rational> asg = witness;
        for (const auto& v : free_vars(matrix))
          if (!asg.count(v)) asg[v] = Rational(0);
        auto check = eval_exact(matrix, asg);
        if (check && !*check) {
          res.status = ObligationStatus::Refuted;
          for (const auto& [v, r] : asg) res.witness[v] = r.to_double();
          res.note = "linear counterexample";
          return res;
        }
      }
    }
  }

  // sampling: corners, zeros, random draws
  std::vector<Variable> vars(fv.begin(), fv.end());
  {
    VarSet mfv = free_vars(matrix);
    for (const auto& v : mfv)
      if (!fv.count(v)) vars.push_back(v);
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-10.0, 10.0);
  std::uniform_int_distribution<int> corner(0, 8);
  for (size_t k = 0; k < samples; ++k) {
    std::map<Variable, double> asg;
    for (const auto& v : vars) {
      if (k % 3 == 0)
        asg[v] = kGrid[corner(rng)];
      else
        asg[v] = dist(rng);
    }
    if (eval_tri(matrix, asg) == Tri::F) {
      res.status = ObligationStatus::Refuted;
      res.witness = asg;
      res.note = "sampled counterexample";
      return res;
    }
  }
  res.status = ObligationStatus::Unknown;
  res.note = "no witness found in " + std::to_string(samples) + " samples";
  return res;
}

namespace {

std::string smt_name(const Variable& v) {
  return v.primed ? v.name + "_prime" : v.name;
}

void smt_term(std::ostream& os, const TermPtr& t) {
  switch (t->kind) {
    case Term::Kind::Var: os << smt_name(t->var); return;
    case Term::Kind::Int:
      if (t->value < 0)
        os << "(- " << -t->value << ")";
      else
        os << t->value;
      return;
    case Term::Kind::Plus:
      os << "(+ ";
      smt_term(os, t->lhs);
      os << " ";
      smt_term(os, t->rhs);
      os << ")";
      return;
    case Term::Kind::Minus:
      os << "(- ";
      smt_term(os, t->lhs);
      os << " ";
      smt_term(os, t->rhs);
      os << ")";
      return;
    case Term::Kind::Times:
      os << "(* ";
      smt_term(os, t->lhs);
      os << " ";
      smt_term(os, t->rhs);
      os << ")";
      return;
    case Term::Kind::Differential:
      throw Error("differential terms have no SMT-LIB form");
  }
}

void smt_fml(std::ostream& os, const FormulaPtr& f) {
  switch (f->kind) {
    case FK::True: os << "true"; return;
    case FK::False: os << "false"; return;
    case FK::Cmp: {
      const char* op = f->cmp == CmpOp::Le   ? "<="
                       : f->cmp == CmpOp::Lt ? "<"
                       : f->cmp == CmpOp::Eq ? "="
                       : f->cmp == CmpOp::Ge ? ">="
                                             : ">";
      os << "(" << op << " ";
      smt_term(os, f->t1);
      os << " ";
      smt_term(os, f->t2);
      os << ")";
      return;
    }
    case FK::Not:
      os << "(not ";
      smt_fml(os, f->f1);
      os << ")";
      return;
    case FK::And:
    case FK::Or:
    case FK::Imply:
    case FK::Equiv: {
      const char* op = f->kind == FK::And    ? "and"
                       : f->kind == FK::Or   ? "or"
                       : f->kind == FK::Imply ? "=>"
                                              : "=";
      os << "(" << op << " ";
      smt_fml(os, f->f1);
      os << " ";
      smt_fml(os, f->f2);
      os << ")";
      return;
    }
    case FK::Forall:
    case FK::Exists:
      os << "(" << (f->kind == FK::Forall ? "forall" : "exists") << " (("
         << smt_name(f->var) << " Real)) ";
      smt_fml(os, f->f1);
      os << ")";
      return;
    default:
      throw Error("modal formulas have no SMT-LIB form");
  }
}

bool has_quantifier(const FormulaPtr& f) {
  switch (f->kind) {
    case FK::Forall:
    case FK::Exists: return true;
    case FK::Not: return has_quantifier(f->f1);
    case FK::And:
    case FK::Or:
    case FK::Imply:
    case FK::Equiv: return has_quantifier(f->f1) || has_quantifier(f->f2);
    default: return false;
  }
}

}  // namespace

std::string export_smtlib(const std::vector<Obligation>& obligations) {
  bool quantified = false;
  VarSet fv;
  for (const auto& o : obligations) {
    quantified = quantified || has_quantifier(o.formula);
    VarSet v = free_vars(o.formula);
    fv.insert(v.begin(), v.end());
  }
  std::ostringstream os;
  os << "; side obligations: each negated, so unsat answers prove them\n";
  os << "(set-logic " << (quantified ? "NRA" : "QF_NRA") << ")\n";
  for (const auto& v : fv)
    os << "(declare-const " << smt_name(v) << " Real)\n";
  for (const auto& o : obligations) {
    if (!o.origin.empty()) os << "; " << o.origin << "\n";
    os << "(assert (not ";
    smt_fml(os, o.formula);
    os << "))\n";
  }
  os << "(check-sat)\n";
  return os.str();
}

}  // namespace drlref
