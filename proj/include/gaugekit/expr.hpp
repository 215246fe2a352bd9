#ifndef GAUGEKIT_EXPR_HPP
#define GAUGEKIT_EXPR_HPP

#include <memory>
#include <string>
#include <string_view>

#include "gaugekit/jet.hpp"

namespace gaugekit {

namespace detail {
struct ExprNode;
}

/// An immutable expression tree over coordinates x1..xn, complex literals,
/// the four arithmetic operations, integer powers, and exp/sin/cos.
///
/// Grammar accepted by parse():
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := atom ('^' integer)?
///   atom   := 'x'<digits> | complex-literal | func '(' expr ')' | '(' expr ')'
///   func   := exp | sin | cos
/// Complex literals are unsigned decimals with an optional 'i' suffix.
class Expr {
public:
  Expr() = default;

  /// Parse `source` against a chart of the given dimension. Throws
  /// ParseError with the offending position; coordinate indices greater
  /// than `dimension` are rejected.
  static Expr parse(std::string_view source, int dimension);

  // Programmatic constructors.
  static Expr literal(Complex c);
  static Expr coordinate(int k);  // zero-based index

  bool valid() const noexcept { return node_ != nullptr; }
  /// Largest zero-based coordinate index referenced, or -1 for constants.
  int max_coordinate() const;

  /// Printable form that re-parses to an identical tree.
  std::string str() const;

  /// Jet of the expression at x (layout dimension = x.size()).
  ScalarJet eval(const Point& x, int order) const;
  Complex value(const Point& x) const;

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr pow(const Expr& a, long exponent);
  friend Expr exp(const Expr& a);
  friend Expr sin(const Expr& a);
  friend Expr cos(const Expr& a);
  /// Replace every occurrence of coordinate k by `replacement`.
  friend Expr substitute(const Expr& e, int k, const Expr& replacement);

private:
  explicit Expr(std::shared_ptr<const detail::ExprNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const detail::ExprNode> node_;
};

}  // namespace gaugekit

#endif
