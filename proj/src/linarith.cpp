#include "drlref/linarith.hpp"

#include <algorithm>

namespace drlref {

std::optional<LinearForm> linearize(const TermPtr& t) {
  try {
    switch (t->kind) {
      case Term::Kind::Var: {
        LinearForm f;
        f.coeffs[t->var] = Rational(1);
        return f;
      }
      case Term::Kind::Int: {
        LinearForm f;
        f.constant = Rational(t->value);
        return f;
      }
      case Term::Kind::Plus:
      case Term::Kind::Minus: {
        auto a = linearize(t->lhs);
        auto b = linearize(t->rhs);
        if (!a || !b) return std::nullopt;
        LinearForm f = *a;
        int s = t->kind == Term::Kind::Plus ? 1 : -1;
        for (const auto& [v, c] : b->coeffs) {
          Rational nc = f.coeffs.count(v) ? f.coeffs[v] : Rational(0);
          nc = s > 0 ? nc + c : nc - c;
          if (nc.is_zero()) f.coeffs.erase(v);
          else f.coeffs[v] = nc;
        }
        f.constant = s > 0 ? f.constant + b->constant
                           : f.constant - b->constant;
        return f;
      }
      case Term::Kind::Times: {
        auto a = linearize(t->lhs);
        auto b = linearize(t->rhs);
        if (!a || !b) return std::nullopt;
        // one side must be constant
        const LinearForm* cst = a->coeffs.empty() ? &*a
                              : b->coeffs.empty() ? &*b
                                                  : nullptr;
        const LinearForm* lin = cst == &*a ? &*b : &*a;
        if (!cst) return std::nullopt;
        LinearForm f;
        for (const auto& [v, c] : lin->coeffs) {
          Rational nc = c * cst->constant;
          if (!nc.is_zero()) f.coeffs[v] = nc;
        }
        f.constant = lin->constant * cst->constant;
        return f;
      }
      case Term::Kind::Differential:
        return std::nullopt;
    }
  } catch (const RationalOverflow&) {
    return std::nullopt;
  }
  return std::nullopt;
}

namespace {

Rational eval_form(const LinearForm& f,
                   const std::map<Variable, Rational>& asg) {
  Rational r = f.constant;
  for (const auto& [v, c] : f.coeffs) {
    auto it = asg.find(v);
    Rational val = it == asg.end() ? Rational(0) : it->second;
    r = r + c * val;
  }
  return r;
}

}  // namespace

FmResult fourier_motzkin(std::vector<LinConstraint> cs) {
  // collect variables
  std::vector<Variable> vars;
  for (const auto& c : cs)
    for (const auto& [v, coef] : c.lhs.coeffs) {
      (void)coef;
      if (std::find(vars.begin(), vars.end(), v) == vars.end())
        vars.push_back(v);
    }

  // substitute out equalities first, then eliminate inequalities
  struct Elimination {
    Variable var;
    // var = form (from an equality) or bounds for back-substitution
    std::optional<LinearForm> definition;
    std::vector<std::pair<LinearForm, bool>> lowers;  // form REL var
    std::vector<std::pair<LinearForm, bool>> uppers;  // var REL form
    // bool: strict
  };
  std::vector<Elimination> trail;

  auto subtract_var = [](LinearForm f, const Variable& v) {
    f.coeffs.erase(v);
    return f;
  };

  for (const Variable& v : vars) {
    // find an equality mentioning v
    Elimination e;
    e.var = v;
    bool found_eq = false;
    for (size_t i = 0; i < cs.size(); ++i) {
      if (cs[i].rel != LinRel::Eq) continue;
      auto it = cs[i].lhs.coeffs.find(v);
      if (it == cs[i].lhs.coeffs.end()) continue;
      // v = -(rest)/coef
      Rational coef = it->second;
      LinearForm rest = subtract_var(cs[i].lhs, v);
      LinearForm def;
      for (auto& [w, c] : rest.coeffs) def.coeffs[w] = -(c / coef);
      def.constant = -(rest.constant / coef);
      e.definition = def;
      cs.erase(cs.begin() + static_cast<long>(i));
      found_eq = true;
      break;
    }
    if (found_eq) {
      // substitute the definition everywhere
      std::vector<LinConstraint> next;
      for (auto& c : cs) {
        auto it = c.lhs.coeffs.find(v);
        if (it == c.lhs.coeffs.end()) {
          next.push_back(c);
          continue;
        }
        Rational coef = it->second;
        LinearForm f = subtract_var(c.lhs, v);
        for (const auto& [w, dc] : e.definition->coeffs) {
          Rational nc =
              (f.coeffs.count(w) ? f.coeffs[w] : Rational(0)) + coef * dc;
          if (nc.is_zero()) f.coeffs.erase(w);
          else f.coeffs[w] = nc;
        }
        f.constant = f.constant + coef * e.definition->constant;
        next.push_back(LinConstraint{f, c.rel});
      }
      cs = std::move(next);
      trail.push_back(std::move(e));
      continue;
    }

    // partition constraints into lower/upper bounds on v
    std::vector<LinConstraint> rest;
    for (auto& c : cs) {
      auto it = c.lhs.coeffs.find(v);
      if (it == c.lhs.coeffs.end()) {
        rest.push_back(c);
        continue;
      }
      Rational coef = it->second;
      LinearForm f = subtract_var(c.lhs, v);
      // coef*v + f REL 0  =>  v REL -f/coef (direction by sign of coef)
      LinearForm bound;
      for (auto& [w, c2] : f.coeffs) bound.coeffs[w] = -(c2 / coef);
      bound.constant = -(f.constant / coef);
      bool strict = c.rel == LinRel::Lt;
      if (coef.sign() > 0)
        e.uppers.push_back({bound, strict});  // v <= bound
      else
        e.lowers.push_back({bound, strict});  // bound <= v
    }
    // cross products
    for (const auto& [lo, lostrict] : e.lowers)
      for (const auto& [hi, histrict] : e.uppers) {
        LinearForm f;  // lo - hi REL 0
        f = lo;
        for (const auto& [w, c2] : hi.coeffs) {
          Rational nc =
              (f.coeffs.count(w) ? f.coeffs[w] : Rational(0)) - c2;
          if (nc.is_zero()) f.coeffs.erase(w);
          else f.coeffs[w] = nc;
        }
        f.constant = f.constant - hi.constant;
        rest.push_back(
            LinConstraint{f, lostrict || histrict ? LinRel::Lt : LinRel::Le});
      }
    cs = std::move(rest);
    trail.push_back(std::move(e));
  }

  // only constant constraints remain
  for (const auto& c : cs) {
    if (!c.lhs.coeffs.empty()) continue;  // can't happen
    int s = c.lhs.constant.sign();
    bool ok = c.rel == LinRel::Eq ? s == 0
            : c.rel == LinRel::Le ? s <= 0
                                  : s < 0;
    if (!ok) return FmResult{false, {}};
  }

  // back-substitute a witness
  FmResult r;
  r.sat = true;
  for (auto it = trail.rbegin(); it != trail.rend(); ++it) {
    if (it->definition) {
      r.witness[it->var] = eval_form(*it->definition, r.witness);
      continue;
    }
    std::optional<Rational> lo, hi;
    bool lostrict = false, histrict = false;
    for (const auto& [f, strict] : it->lowers) {
      Rational b = eval_form(f, r.witness);
      if (!lo || b > *lo || (b == *lo && strict)) {
        lo = b;
        lostrict = strict;
      }
    }
    for (const auto& [f, strict] : it->uppers) {
      Rational b = eval_form(f, r.witness);
      if (!hi || b < *hi || (b == *hi && strict)) {
        hi = b;
        histrict = strict;
      }
    }
    Rational val;
    if (lo && hi) {
      val = (*lo + *hi) / Rational(2);
      if (!lostrict && !histrict && *lo == *hi) val = *lo;
    } else if (lo) {
      val = lostrict ? *lo + Rational(1) : *lo;
    } else if (hi) {
      val = histrict ? *hi - Rational(1) : *hi;
    } else {
      val = Rational(0);
    }
    r.witness[it->var] = val;
  }
  return r;
}

}  // namespace drlref
