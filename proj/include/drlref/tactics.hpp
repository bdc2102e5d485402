// Derived refactoring procedures built exclusively from kernel steps:
// congruence rewriting (use_at), local refinement (focus), ghost movement
// (move_random_in/out and the ghost template), and the derived facts they
// rely on.  Nothing here extends the kernel; every output replays through
// check_certificate.
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>

#include "drlref/contexts.hpp"
#include "drlref/kernel.hpp"

namespace drlref {

// A proved statement usable for rewriting: an axiom instance or a closed
// certificate.
struct Fact {
  enum class Kind { Refinement, ProgEquivalence, Implication, Equivalence };
  Kind kind;
  FormulaPtr statement;
  std::optional<AxiomInstance> axiom;
  std::shared_ptr<const Provable> derivation;
};

Fact fact_from_axiom(const std::string& axiom_id, const Bindings& bindings);
// The provable must be proved with conclusion |- statement.
Fact fact_from_provable(const Provable& p);

enum class Direction { LtR, RtL };

// Per-run cache of derived facts keyed by their statement.
struct TacticSession {
  std::map<std::string, std::shared_ptr<const Provable>> cache;
};

// Rewrites the subexpression of goals[goal].succ[0] at `path` along the
// fact.  ltr replaces the fact's left side by its right side, rtl the
// converse.  Refinement facts rewrite left-to-right at antitone positions
// and right-to-left at monotone ones; program equivalences work in any
// single-hole context; implication and formula-equivalence facts follow the
// same polarity discipline at formula positions.
Provable use_at(const Provable& p, size_t goal, const Path& path,
                const Fact& fact, Direction dir,
                TacticSession* session = nullptr);

// Local refinement: on a goal G |- [C(a)]f (or G |- C(a) <= C(b)), focusing
// the program at `path` toward beta yields the local obligation
// G |- C_a({a} <= {beta}) plus, for box goals, the rewritten goal
// G |- [C(beta)]f.  The obligation goal comes first.
Provable focus(const Provable& p, size_t goal, const Path& path,
               const ProgramPtr& beta, TacticSession* session = nullptr);

// Program-equivalence variant: the local obligation is G |- C_a({a}=={b}).
Provable focus_eq(const Provable& p, size_t goal, const Path& path,
                  const ProgramPtr& beta, TacticSession* session = nullptr);

// Ghost movement.  `path` addresses the program alpha inside
// goals[goal].succ[0]; the enclosing ...; v := * trailer is located
// automatically.  move_random_in rewrites C(alpha); v:=* into
// C(alpha; v:=*); v:=*, move_random_out the converse.
Provable move_random_in(const Provable& p, size_t goal, const Path& path,
                        const Variable& v, TacticSession* session = nullptr);
Provable move_random_out(const Provable& p, size_t goal, const Path& path,
                         const Variable& v, TacticSession* session = nullptr);

// Ghost refactoring template on a box goal: introduces v := * (and v' := *
// for the differential ghost axiom), moves it next to the program at
// `path`, rewrites with the ghost equivalence, and removes the leftovers.
// `ghost` names "ode_cst" or "ref_dg", or pass a custom fact whose sides
// end in the trailing randoms.  For the introducing direction of ref_dg,
// `new_rhs` and `init` supply the new equation right-hand side and the
// initial value.
Provable ghost_refactor(const Provable& p, size_t goal, const Path& path,
                        const std::string& ghost, const Variable& v,
                        std::optional<TermPtr> new_rhs = {},
                        std::optional<TermPtr> init = {},
                        const std::optional<Fact>& custom = {},
                        TacticSession* session = nullptr);

// Global refactoring of a box goal per a closed refinement or equivalence
// fact; dispatches to use_at with the box-position polarity.
Provable refactor_box_global(const Provable& p, size_t goal, const Path& path,
                             const Fact& fact, Direction dir,
                             TacticSession* session = nullptr);

// Derived facts (all replay through the kernel):
//   randidem:    {x:=*; x:=*} == {x:=*}
//   notfree:     {x:=*; a; x:=*} == {a; x:=*}        (x not free in a)
//   aux:         {{b}*; x:=*} == {x:=*; {b; x:=*}*}  (x not free in b)
//   loop (C):    {{c}*; x:=*} == {{c; x:=*}*; x:=*}  (x not free in c)
//   fresh:       {C(a); x:=*} == {C(a; x:=*); x:=*}  (x fresh in C shell,
//                                                     x not free in a)
//   vacuous:     [x:=*]p <-> p                        (x not free in p)
Provable derive_randidem(const Variable& x, TacticSession* session = nullptr);
Provable derive_notfree(const ProgramPtr& a, const Variable& x,
                        TacticSession* session = nullptr);
Provable derive_aux(const ProgramPtr& b, const Variable& x,
                    TacticSession* session = nullptr);
Provable derive_loop_c(const ProgramPtr& c, const Variable& x,
                       TacticSession* session = nullptr);
Provable derive_fresh(const Context& c, const ProgramPtr& alpha,
                      const Variable& x, TacticSession* session = nullptr);
Provable derive_vacuous_random(const Variable& x, const FormulaPtr& f,
                               TacticSession* session = nullptr);

// Script commands (the line-oriented surface lives in the model module).
struct Command {
  enum class Kind {
    UseAt, Focus, FocusEq, MoveRandomIn, MoveRandomOut, Ghost, Arith,
    Axiom, Rule
  };
  Kind kind;
  Path path;
  Direction dir = Direction::LtR;
  std::string axiom_id;         // UseAt by axiom, Ghost, Axiom
  std::optional<Fact> fact;     // UseAt by fact
  ProgramPtr beta;              // Focus, FocusEq
  Variable var;                 // MoveRandom*, Ghost
  std::optional<TermPtr> ghost_rhs, ghost_init;  // Ghost (introducing)
  std::string rule_id;          // Rule
  Bindings bindings;            // Axiom, Rule
  std::string text;             // source line, for error reporting
};

struct ScriptError : Error {
  size_t index;
  ScriptError(size_t i, const std::string& what)
      : Error("script command " + std::to_string(i) + ": " + what),
        index(i) {}
};

// Folds the commands over new_goal(goal); commands address goals[0].
// The `arith` command additionally fails when the admitted obligation is
// refuted by sampling.
Provable run_script(const Sequent& goal, const std::vector<Command>& cmds);

}  // namespace drlref
