// Seeded random expression generator shared by the axiom fuzzer and the
// property tests.
#pragma once

#include <random>
#include <vector>

#include "drlref/ast.hpp"
#include "drlref/statics.hpp"

namespace drlref {

struct GenConfig {
  size_t max_depth = 3;
  size_t num_vars = 3;
  long long coeff_lo = -2;
  long long coeff_hi = 2;
  bool allow_ode = true;
  bool allow_star = true;
  VarSet forbidden;  // variables the output must not mention
};

class ExprGen {
 public:
  ExprGen(uint64_t seed, GenConfig cfg = {});

  Variable var(bool primed_ok = false);
  TermPtr term(size_t depth);
  FormulaPtr fo_formula(size_t depth);  // quantifier- and modality-free
  ProgramPtr program(size_t depth);

  std::mt19937_64& rng() { return rng_; }
  const GenConfig& config() const { return cfg_; }

 private:
  size_t pick(size_t n);
  std::mt19937_64 rng_;
  GenConfig cfg_;
  std::vector<Variable> pool_;
};

}  // namespace drlref
