// Core syntax trees for differential refinement logic: terms, formulas and
// hybrid programs are immutable, structurally shared values.
#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace drlref {

// A variable is identified by (name, primed).  x and x' are distinct
// variables; differential equations link their behavior.
struct Variable {
  std::string name;
  bool primed = false;

  Variable() = default;
  Variable(std::string n, bool p = false) : name(std::move(n)), primed(p) {}

  Variable prime() const { return Variable(name, true); }
  Variable base() const { return Variable(name, false); }

  bool operator==(const Variable& o) const {
    return primed == o.primed && name == o.name;
  }
  bool operator!=(const Variable& o) const { return !(*this == o); }
  bool operator<(const Variable& o) const {
    if (name != o.name) return name < o.name;
    return primed < o.primed;
  }
  std::string str() const { return primed ? name + "'" : name; }
};

bool valid_variable_name(const std::string& name);

class Term;
class Formula;
class Program;
using TermPtr = std::shared_ptr<const Term>;
using FormulaPtr = std::shared_ptr<const Formula>;
using ProgramPtr = std::shared_ptr<const Program>;

class Term {
 public:
  enum class Kind { Var, Int, Plus, Minus, Times, Differential };

  Kind kind;
  Variable var;          // Var
  long long value = 0;   // Int
  TermPtr lhs, rhs;      // binaries; Differential uses lhs only

  static TermPtr mk_var(Variable v);
  static TermPtr mk_int(long long n);
  static TermPtr mk_plus(TermPtr a, TermPtr b);
  static TermPtr mk_minus(TermPtr a, TermPtr b);
  static TermPtr mk_times(TermPtr a, TermPtr b);
  // (x)' for a variable collapses to the differential variable x'.
  static TermPtr mk_differential(TermPtr a);
};

enum class CmpOp { Le, Lt, Eq, Ge, Gt };

struct OdeEquation {
  Variable var;  // stored unprimed; the equation defines var'
  TermPtr rhs;
};

class Formula {
 public:
  enum class Kind {
    True, False, Cmp, Not, And, Or, Imply, Equiv,
    Forall, Exists, Box, Diamond, Refines, ProgEq
  };

  Kind kind;
  CmpOp cmp = CmpOp::Le;       // Cmp
  TermPtr t1, t2;              // Cmp
  FormulaPtr f1, f2;           // connectives
  Variable var;                // Forall/Exists
  ProgramPtr p1, p2;           // Box/Diamond (p1), Refines/ProgEq (p1,p2)

  static FormulaPtr mk_true();
  static FormulaPtr mk_false();
  static FormulaPtr mk_cmp(CmpOp op, TermPtr a, TermPtr b);
  static FormulaPtr mk_not(FormulaPtr f);
  static FormulaPtr mk_and(FormulaPtr a, FormulaPtr b);
  static FormulaPtr mk_or(FormulaPtr a, FormulaPtr b);
  static FormulaPtr mk_imply(FormulaPtr a, FormulaPtr b);
  static FormulaPtr mk_equiv(FormulaPtr a, FormulaPtr b);
  static FormulaPtr mk_forall(Variable v, FormulaPtr f);
  static FormulaPtr mk_exists(Variable v, FormulaPtr f);
  static FormulaPtr mk_box(ProgramPtr p, FormulaPtr f);
  static FormulaPtr mk_diamond(ProgramPtr p, FormulaPtr f);
  static FormulaPtr mk_refines(ProgramPtr a, ProgramPtr b);
  static FormulaPtr mk_progeq(ProgramPtr a, ProgramPtr b);
};

class Program {
 public:
  enum class Kind { Test, Assign, Random, ODE, Choice, Seq, Star };

  Kind kind;
  FormulaPtr fml;                  // Test; ODE domain
  Variable var;                    // Assign/Random target
  TermPtr term;                    // Assign rhs
  std::vector<OdeEquation> odes;   // ODE
  ProgramPtr p1, p2;               // Choice/Seq; Star uses p1

  static ProgramPtr mk_test(FormulaPtr f);
  static ProgramPtr mk_assign(Variable v, TermPtr t);
  static ProgramPtr mk_random(Variable v);
  static ProgramPtr mk_ode(std::vector<OdeEquation> eqs, FormulaPtr domain);
  static ProgramPtr mk_choice(ProgramPtr a, ProgramPtr b);
  static ProgramPtr mk_seq(ProgramPtr a, ProgramPtr b);
  static ProgramPtr mk_star(ProgramPtr a);
};

bool equal(const TermPtr& a, const TermPtr& b);
bool equal(const FormulaPtr& a, const FormulaPtr& b);
bool equal(const ProgramPtr& a, const ProgramPtr& b);

// An expression is a term, formula or program; used wherever the three
// syntax categories are handled uniformly (paths, contexts, parsing).
enum class ExprKind { Term, Formula, Program };

struct Expression {
  ExprKind kind;
  TermPtr term;
  FormulaPtr formula;
  ProgramPtr program;

  Expression() : kind(ExprKind::Term) {}
  explicit Expression(TermPtr t) : kind(ExprKind::Term), term(std::move(t)) {}
  explicit Expression(FormulaPtr f)
      : kind(ExprKind::Formula), formula(std::move(f)) {}
  explicit Expression(ProgramPtr p)
      : kind(ExprKind::Program), program(std::move(p)) {}
};

bool equal(const Expression& a, const Expression& b);

// Fold Diamond into !([ ]!) and ProgEq into the conjunction of refinements;
// used when matching axiom instances against goals.
FormulaPtr normalize_derived(const FormulaPtr& f);

}  // namespace drlref
