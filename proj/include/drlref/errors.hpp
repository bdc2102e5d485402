#pragma once

#include <stdexcept>
#include <string>

namespace drlref {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SyntaxError : Error {
  int line;
  int col;
  SyntaxError(const std::string& msg, int l, int c)
      : Error(msg + " at " + std::to_string(l) + ":" + std::to_string(c)),
        line(l), col(c) {}
};

// The text parses, but as a different syntax category than requested.
struct KindError : Error {
  using Error::Error;
};

struct NotFresh : Error {
  using Error::Error;
};

struct KindMismatch : Error {
  using Error::Error;
};

struct InvalidPath : Error {
  using Error::Error;
};

struct PolarityError : Error {
  using Error::Error;
};

struct UnsupportedShape : Error {
  using Error::Error;
};

struct UnboundPlaceholder : Error {
  using Error::Error;
};

struct SideConditionViolation : Error {
  std::string axiom_id;
  std::string condition;
  SideConditionViolation(std::string ax, std::string cond,
                         const std::string& witness)
      : Error("side condition of " + ax + " violated: " + cond +
              (witness.empty() ? "" : " (" + witness + ")")),
        axiom_id(std::move(ax)), condition(std::move(cond)) {}
};

struct NoSuchGoal : Error {
  using Error::Error;
};

struct RuleMismatch : Error {
  using Error::Error;
};

struct NotFirstOrder : Error {
  using Error::Error;
};

struct GoalShapeMismatch : Error {
  using Error::Error;
};

struct FreshnessViolation : Error {
  using Error::Error;
};

struct ResourceExceeded : Error {
  using Error::Error;
};

}  // namespace drlref
