// Certificate (de)serialization: a JSON document with the conclusion, the
// step trace and the admitted arithmetic assumptions, all expressions in the
// concrete grammar.
#pragma once

#include <string>

#include "drlref/kernel.hpp"

namespace drlref {

std::string certificate_to_json(const Provable& p);
Provable certificate_from_json(const std::string& text);

}  // namespace drlref
