// The soundness-critical core: axiom schema registry with side-condition
// checks, sequent proof construction and certificate replay.  Everything
// above this layer (tactics, case studies) builds proofs exclusively
// through new_goal / instantiate_axiom / apply_rule / admit_arith.
#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "drlref/ast.hpp"
#include "drlref/errors.hpp"
#include "drlref/statics.hpp"

namespace drlref {

struct Sequent {
  std::vector<FormulaPtr> ante;
  std::vector<FormulaPtr> succ;
};

bool equal(const Sequent& a, const Sequent& b);
std::string pretty(const Sequent& s);

struct BindingValue {
  enum class Kind { Var, Term, Fml, Prog, Index };
  Kind kind = Kind::Index;
  Variable var;
  TermPtr term;
  FormulaPtr fml;
  ProgramPtr prog;
  size_t index = 0;

  static BindingValue of(Variable v);
  static BindingValue of(TermPtr t);
  static BindingValue of(FormulaPtr f);
  static BindingValue of(ProgramPtr p);
  static BindingValue of(size_t i);
};

using Bindings = std::map<std::string, BindingValue>;

struct AxiomInstance {
  std::string axiom_id;
  Bindings bindings;
};

struct Step {
  std::string rule;  // rule id, "ax:<axiom>", or "admit"
  size_t goal = 0;
  Bindings bindings;
};

// A certificate: a conclusion, the open goals, the append-only step trace
// and the arithmetic facts admitted along the way.  Value semantics; every
// kernel operation returns a new Provable.
struct Provable {
  Sequent conclusion;
  std::vector<Sequent> goals;
  std::vector<Step> trace;
  std::vector<FormulaPtr> assumptions;

  bool proved() const { return goals.empty(); }
};

Provable new_goal(const Sequent& s);

// Builds the axiom instance (checking all side conditions) and returns a
// zero-goal Provable concluding |- F.
Provable instantiate_axiom(const AxiomInstance& inst);

// Replaces goals[goal] by the rule's premises. Throws NoSuchGoal,
// RuleMismatch, or SideConditionViolation.
Provable apply_rule(const Provable& p, size_t goal, const std::string& rule,
                    const Bindings& bindings);

// Closes a first-order goal, recording its folded formula as an assumption.
Provable admit_arith(const Provable& p, size_t goal);

// In-place variants used by the tactics layer to avoid quadratic trace
// copies; semantics identical to the pure versions.
void apply_rule_inplace(Provable& p, size_t goal, const std::string& rule,
                        const Bindings& bindings);
void admit_arith_inplace(Provable& p, size_t goal);

struct CheckResult {
  bool valid = false;
  size_t failed_step = 0;
  std::string reason;
  std::vector<FormulaPtr> assumptions;
};

// Full deterministic replay of the trace from the conclusion.
CheckResult check_certificate(const Provable& p);

// Builds the instantiated formula of a registered axiom, side conditions
// checked.  Exposed so tactics can cite instances in cuts.
FormulaPtr build_axiom_instance(const std::string& axiom_id,
                                const Bindings& bindings);

struct AxiomEntry {
  std::string id;
  bool is_rule;
  std::string schema;
  std::string side_conditions;
};

const std::vector<AxiomEntry>& list_axioms();
bool is_formula_axiom(const std::string& id);

// True when the formula is modality- and refinement-free (first-order).
bool first_order(const FormulaPtr& f);

// (/\ ante) -> (\/ succ), the form recorded by admit_arith.
FormulaPtr fold_sequent(const Sequent& s);

}  // namespace drlref
