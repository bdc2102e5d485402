// First-order real-arithmetic obligations: collection from certificates,
// naive discharge (exact rational evaluation, Fourier-Motzkin for linear
// goals, sampling for the rest) and SMT-LIB export.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "drlref/kernel.hpp"

namespace drlref {

enum class ObligationStatus { Open, Proved, Refuted, Unknown, Exported };

struct Obligation {
  FormulaPtr formula;   // modality- and refinement-free
  std::string origin;   // step reference into a certificate
  ObligationStatus status = ObligationStatus::Open;
};

struct DischargeResult {
  ObligationStatus status = ObligationStatus::Unknown;
  std::map<Variable, double> witness;  // for refutations
  std::string note;
};

// One obligation per admitted arithmetic step, in trace order.
std::vector<Obligation> collect_obligations(const Provable& p);

// (1) closed ground formulas evaluated exactly over rationals,
// (2) purely linear obligations decided by Fourier-Motzkin elimination,
// (3) otherwise random + corner sampling for a refutation witness.
DischargeResult try_discharge(const Obligation& o, uint64_t seed = 2025,
                              size_t samples = 10000);

// SMT-LIB 2 text: one (assert (not F)) per obligation, logic QF_NRA (or
// NRA when quantifiers occur), declarations from the free variables.
std::string export_smtlib(const std::vector<Obligation>& obligations);

}  // namespace drlref
