#include "drlref/rational.hpp"

// header-only; this translation unit keeps the build layout uniform
namespace drlref {}
