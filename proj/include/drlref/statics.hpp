// Static semantics: free/bound/must-bound variables, syntactic occurrence,
// admissible substitution and alpha renaming.
#pragma once

#include <set>
#include <string>

#include "drlref/ast.hpp"
#include "drlref/errors.hpp"

namespace drlref {

using VarSet = std::set<Variable>;

// Sound overapproximation of the variables whose initial value the meaning
// can depend on.  For differential equations the left-hand primes are
// overwritten on entry and therefore not free.
VarSet free_vars(const TermPtr& t);
VarSet free_vars(const FormulaPtr& f);
VarSet free_vars(const ProgramPtr& p);
VarSet free_vars(const Expression& e);

// Variables the program may write. ODEs bind both x and x'.
VarSet bound_vars(const ProgramPtr& p);
// Variables every run of the program writes.
VarSet must_bound_vars(const ProgramPtr& p);

// Every variable occurring syntactically, including binders, targets and
// both x and x' for a differential equation on x.
VarSet all_vars(const TermPtr& t);
VarSet all_vars(const FormulaPtr& f);
VarSet all_vars(const ProgramPtr& p);
VarSet all_vars(const Expression& e);

bool is_fresh(const Variable& v, const Expression& e);
bool is_fresh(const Variable& v, const TermPtr& t);
bool is_fresh(const Variable& v, const FormulaPtr& f);
bool is_fresh(const Variable& v, const ProgramPtr& p);

// Raised when a substitution would be unsound (capture, rebinding, output
// comparison on the substituted variable, or a differential scope).
struct SubstClash : Error {
  using Error::Error;
};

// Capture-avoiding substitution of free occurrences of x by the term r.
TermPtr subst(const TermPtr& t, const Variable& x, const TermPtr& r);
FormulaPtr subst(const FormulaPtr& f, const Variable& x, const TermPtr& r);
ProgramPtr subst(const ProgramPtr& p, const Variable& x, const TermPtr& r);

// Renames quantifier-bound occurrences of `from`; `to` must be fresh.
Expression alpha_rename(const Expression& e, const Variable& from,
                        const Variable& to);

// Deterministically picks a variable v (base, base0, base1, ...) such that
// neither v nor v' occurs in any of the given expressions.
Variable fresh_var(const std::string& base,
                   const std::vector<Expression>& avoid);

}  // namespace drlref
