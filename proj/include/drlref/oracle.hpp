// Bounded relational semantics used as a falsification oracle: sampled
// initial states, loop unrolling, explicit Euler integration, approximate
// reachable-set inclusion for refinement.  The oracle refutes; it never
// proves.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "drlref/ast.hpp"
#include "drlref/statics.hpp"

namespace drlref {

struct OracleConfig {
  uint64_t seed = 2025;
  size_t samples = 64;          // initial states
  double box_lo = -2.0;
  double box_hi = 2.0;
  size_t unroll = 3;            // max loop iterations
  double ode_step = 0.1;        // Euler step
  double ode_horizon = 1.0;     // max duration
  size_t duration_grid = 6;     // sampled stop times (including 0)
  size_t random_grid = 9;       // values drawn for x := *
  // 0 means: pick 1e-6 for discrete programs and 1e-2 when ODEs occur
  double tol = 0.0;
  size_t max_states = 20000;
  double blowup = 1e6;          // trajectories are truncated beyond this
};

using State = std::map<Variable, double>;

struct Reached {
  State state;
  std::vector<std::string> trace;
};

struct ReachResult {
  std::vector<Reached> states;
  bool complete = true;   // false on caps or undecided tests
  std::string note;
};

ReachResult reach(const ProgramPtr& a, const State& s,
                  const OracleConfig& cfg);

struct Counterexample {
  State initial;
  State output;                     // reachable by a, unmatched by b
  std::vector<std::string> trace;   // how a reached it
};

struct Verdict {
  bool pass = true;
  bool conclusive = true;
  std::optional<Counterexample> counterexample;
  std::string note;
};

Verdict check_refinement(const ProgramPtr& a, const ProgramPtr& b,
                         const OracleConfig& cfg);

enum class TriBool { True, False, Unknown };

TriBool check_formula(const FormulaPtr& f, const State& s,
                      const OracleConfig& cfg);

// tolerance used for a formula or program pair under this config
double effective_tol(const OracleConfig& cfg, bool has_ode);
bool mentions_ode(const ProgramPtr& p);
bool mentions_ode(const FormulaPtr& f);

// deterministic sample of initial states over the variables of interest
std::vector<State> sample_states(const VarSet& vars, const OracleConfig& cfg);

}  // namespace drlref
