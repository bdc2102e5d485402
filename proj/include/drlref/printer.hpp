// Pretty printer for the ASCII concrete syntax.  parse(pretty(e)) == e.
#pragma once

#include <string>

#include "drlref/ast.hpp"

namespace drlref {

std::string pretty(const TermPtr& t);
std::string pretty(const FormulaPtr& f);
std::string pretty(const ProgramPtr& p);
std::string pretty(const Expression& e);

}  // namespace drlref
