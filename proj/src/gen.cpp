#include "drlref/gen.hpp"

namespace drlref {

namespace {
const char* kNames[] = {"x", "y", "z", "v", "w", "u"};
}

ExprGen::ExprGen(uint64_t seed, GenConfig cfg) : rng_(seed), cfg_(cfg) {
  size_t n = std::min<size_t>(cfg_.num_vars, 6);
  for (size_t i = 0; i < n; ++i) {
    Variable v(kNames[i]);
    if (!cfg_.forbidden.count(v)) pool_.push_back(v);
  }
  if (pool_.empty()) pool_.push_back(Variable("q0"));
}

size_t ExprGen::pick(size_t n) {
  return std::uniform_int_distribution<size_t>(0, n - 1)(rng_);
}

Variable ExprGen::var(bool primed_ok) {
  Variable v = pool_[pick(pool_.size())];
  if (primed_ok && pick(5) == 0) {
    Variable p = v.prime();
    if (!cfg_.forbidden.count(p)) return p;
  }
  return v;
}

TermPtr ExprGen::term(size_t depth) {
  if (depth == 0 || pick(3) == 0) {
    if (pick(2) == 0) return Term::mk_var(var());
    long long c = cfg_.coeff_lo +
                  static_cast<long long>(
                      pick(static_cast<size_t>(cfg_.coeff_hi - cfg_.coeff_lo +
                                               1)));
    return Term::mk_int(c);
  }
  switch (pick(3)) {
    case 0: return Term::mk_plus(term(depth - 1), term(depth - 1));
    case 1: return Term::mk_minus(term(depth - 1), term(depth - 1));
    default: return Term::mk_times(term(depth - 1), term(depth - 1));
  }
}

FormulaPtr ExprGen::fo_formula(size_t depth) {
  if (depth == 0 || pick(3) == 0) {
    switch (pick(6)) {
      case 0: return Formula::mk_true();
      case 1: return Formula::mk_false();
      default:
        return Formula::mk_cmp(static_cast<CmpOp>(pick(5)), term(1), term(1));
    }
  }
  switch (pick(4)) {
    case 0: return Formula::mk_not(fo_formula(depth - 1));
    case 1:
      return Formula::mk_and(fo_formula(depth - 1), fo_formula(depth - 1));
    case 2:
      return Formula::mk_or(fo_formula(depth - 1), fo_formula(depth - 1));
    default:
      return Formula::mk_imply(fo_formula(depth - 1), fo_formula(depth - 1));
  }
}

ProgramPtr ExprGen::program(size_t depth) {
  if (depth == 0 || pick(3) == 0) {
    switch (pick(4)) {
      case 0: return Program::mk_test(fo_formula(1));
      case 1: return Program::mk_assign(var(), term(1));
      case 2: return Program::mk_random(var());
      default:
        if (cfg_.allow_ode) {
          std::vector<OdeEquation> eqs;
          Variable x = var();
          eqs.push_back(OdeEquation{x, term(1)});
          if (pick(3) == 0) {
            Variable y = var();
            if (y != x) eqs.push_back(OdeEquation{y, term(1)});
          }
          return Program::mk_ode(std::move(eqs), fo_formula(1));
        }
        return Program::mk_assign(var(), term(1));
    }
  }
  switch (pick(cfg_.allow_star ? 3 : 2)) {
    case 0: return Program::mk_seq(program(depth - 1), program(depth - 1));
    case 1: return Program::mk_choice(program(depth - 1), program(depth - 1));
    default: return Program::mk_star(program(depth - 1));
  }
}

}  // namespace drlref
