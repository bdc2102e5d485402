// Single-hole contexts: path-addressed splitting, polarity computation and
// projective contexts (the program that runs before a hole, as a chain of
// box modalities).
#pragma once

#include <string>
#include <vector>

#include "drlref/ast.hpp"
#include "drlref/errors.hpp"

namespace drlref {

using Path = std::vector<size_t>;

std::string path_str(const Path& p);
Path parse_path(const std::string& s);

enum class Polarity { Monotone, Antitone, None };

// A single-hole context, kept as the full expression plus the hole path so
// that plug(split_at(e, p)) == e holds definitionally.
struct Context {
  Expression root;  // shell; the subexpression at `path` fills the hole
  Path path;
  ExprKind hole_kind;
  ExprKind result_kind;
  Polarity polarity;
};

// Number of children of the node at an (interior) position.
size_t arity(const Expression& e);
Expression child_at(const Expression& e, size_t index);
Expression subexpr_at(const Expression& e, const Path& p);
Expression replace_at(const Expression& e, const Path& p,
                      const Expression& sub);

// Splits e at p into a context and the addressed subexpression.  Paths into
// terms are rejected (term holes are out of scope).
std::pair<Context, Expression> split_at(const Expression& e, const Path& p);

Expression plug(const Context& c, const Expression& e);

// A formula-to-formula context of the shape [g1][g2]...[gk](.); produced by
// projective_context.
struct FormulaContext {
  std::vector<ProgramPtr> boxes;
  FormulaPtr apply(const FormulaPtr& f) const;
  Context as_context() const;
};

// For a monotone program-to-program context built from sequence, choice and
// star above the hole, the formula context holding the program that must
// run before the hole:
//   hole        -> (.)
//   g; C'       -> [g] C'_a
//   {C'}*       -> [C(a)] C'_a
//   C'; g, both choice cases -> C'_a
FormulaContext projective_context(const Context& c, const ProgramPtr& alpha);

// All context shells up to the given depth with fixed small fillers.
// Program: program-in-program shells over ;, ++, *.  Formula:
// formula-in-formula shells over the formula constructors (including holes
// passing through tests and evolution domains).
std::vector<Context> enumerate_contexts(size_t depth, ExprKind kind);

}  // namespace drlref
