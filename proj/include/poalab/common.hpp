#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace poalab {

// Orientation of a game class. On the welfare side the "c" column of a basis
// pair holds the resource welfare W and user functions are utilities.
enum class Side { kCostMin, kWelfareMax };

std::string_view to_string(Side side);
Side side_from_string(std::string_view text);

// Malformed input: bad shapes, sign violations, unknown names.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The LP engine could not produce a trustworthy answer.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A computed result failed an independent check (oracle, certificate, ...).
class VerificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace poalab
