// Empirical validation of the axiom registry: random well-formed
// instantiations checked against the bounded oracle, plus documented
// side-condition-dropped mutants that the oracle must refute.
#pragma once

#include <string>
#include <vector>

#include "drlref/oracle.hpp"

namespace drlref {

struct FuzzReport {
  std::string axiom;
  size_t trials = 0;
  size_t passed = 0;        // at least one state conclusively true, none false
  size_t inconclusive = 0;  // sampling could not decide
  size_t failures = 0;      // a state falsified the instance
  std::vector<std::string> counterexamples;
};

// every instantiable (formula-valued) axiom of the registry
std::vector<std::string> fuzzable_axioms();

FuzzReport fuzz_axiom(const std::string& axiom_id, size_t trials,
                      const OracleConfig& cfg);

struct MutantReport {
  std::string name;
  std::string dropped_condition;
  bool found_counterexample = false;
  size_t trials_used = 0;
  std::string counterexample;
};

std::vector<std::string> mutant_names();

// instances violate one documented side condition; the oracle must find a
// counterexample within the trial budget
MutantReport fuzz_mutant(const std::string& name, size_t trials,
                         const OracleConfig& cfg);

}  // namespace drlref
