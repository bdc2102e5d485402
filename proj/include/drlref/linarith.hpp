// Linear forms over variables with rational coefficients, and Fourier-
// Motzkin satisfiability for conjunctions of linear constraints.
#pragma once

#include <map>
#include <optional>
#include <vector>

#include "drlref/ast.hpp"
#include "drlref/rational.hpp"

namespace drlref {

struct LinearForm {
  std::map<Variable, Rational> coeffs;
  Rational constant;
};

// nullopt when the term is not linear (or overflows)
std::optional<LinearForm> linearize(const TermPtr& t);

enum class LinRel { Le, Lt, Eq };

struct LinConstraint {
  LinearForm lhs;  // lhs REL 0
  LinRel rel;
};

struct FmResult {
  bool sat = false;
  std::map<Variable, Rational> witness;
};

// Decides satisfiability of the conjunction by eliminating variables;
// on sat, back-substitutes a witness.
FmResult fourier_motzkin(std::vector<LinConstraint> constraints);

}  // namespace drlref
