#ifndef GAUGEKIT_ERRORS_HPP
#define GAUGEKIT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gaugekit {

/// Syntax error from the expression parser; keeps the byte offset of the
/// offending token so front ends can point at it.
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& message, std::size_t position)
      : std::runtime_error(message + " (at position " + std::to_string(position) + ")"),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

private:
  std::size_t position_;
};

/// Incompatible matrix/form shapes in an algebraic operation.
class ShapeError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Failure while evaluating a field: singular inverse node, point outside
/// the chart, unsupported jet order, division by zero.
class EvalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace gaugekit

#endif
