// Recursive-descent parser for the ASCII concrete syntax.
//
//   terms     t ::= ident | ident' | int | t+t | t-t | t*t | (t)' | (t)
//   formulas  f ::= t<=t | t<t | t=t | t>=t | t>t | true | false | !f
//               | f&f | f|f | f->f | f<->f | \forall x f | \exists x f
//               | [a]f | <a>f | {a} <= {b} | {a} == {b} | (f)
//   programs  a ::= ?f | x:=t | x:=* | x':=t | x':=* | {x'=t,... & f}
//               | a;a | a++a | {a}* | (a)
//
// Whitespace-insensitive; ; binds tighter than ++; * is postfix on braced
// groups only.
#pragma once

#include <string>

#include "drlref/ast.hpp"
#include "drlref/errors.hpp"

namespace drlref {

TermPtr parse_term(const std::string& text);
FormulaPtr parse_formula(const std::string& text);
ProgramPtr parse_program(const std::string& text);

// Parses in the requested category; raises KindError when the text belongs
// to a different category, SyntaxError otherwise.
Expression parse(const std::string& text, ExprKind category);

}  // namespace drlref
