#include "gaugekit/expr.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace gaugekit {

namespace detail {

enum class ExprKind { Coordinate, Literal, Add, Sub, Mul, Div, Pow, Exp, Sin, Cos };

struct ExprNode {
  ExprKind kind;
  Complex literal{0, 0};
  int coordinate = -1;
  long exponent = 0;
  std::shared_ptr<const ExprNode> left, right;
};

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make_literal(Complex c) {
  auto node = std::make_shared<ExprNode>();
  node->kind = ExprKind::Literal;
  node->literal = c;
  return node;
}

// Literal-only subtrees collapse back into literals so that printed
// spellings like "(0-0.5+2i)" re-parse to the node they came from.
NodePtr make(ExprKind kind, NodePtr l = nullptr, NodePtr r = nullptr) {
  const bool l_lit = l && l->kind == ExprKind::Literal;
  const bool r_lit = r && r->kind == ExprKind::Literal;
  if (l_lit && r_lit) {
    switch (kind) {
      case ExprKind::Add: return make_literal(l->literal + r->literal);
      case ExprKind::Sub: return make_literal(l->literal - r->literal);
      case ExprKind::Mul: return make_literal(l->literal * r->literal);
      case ExprKind::Div:
        if (std::abs(r->literal) != 0.0) return make_literal(l->literal / r->literal);
        break;
      default: break;
    }
  }
  auto node = std::make_shared<ExprNode>();
  node->kind = kind;
  node->left = std::move(l);
  node->right = std::move(r);
  return node;
}

int precedence(ExprKind k) {
  switch (k) {
    case ExprKind::Add:
    case ExprKind::Sub: return 1;
    case ExprKind::Mul:
    case ExprKind::Div: return 2;
    case ExprKind::Pow: return 3;
    default: return 4;
  }
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Prints a literal in grammar form. Values with a nonzero real and
// imaginary part, or negative parts, need the surrounding "(a+bi)" /
// "(0-a)" spelling; the caller adds parentheses when required.
void print_literal(std::ostream& os, Complex c, bool parenthesize) {
  const double re = c.real(), im = c.imag();
  const bool pure_real = (im == 0.0);
  const bool pure_imag = (re == 0.0 && im != 0.0);
  if (pure_real && re >= 0.0) {
    os << format_double(re);
    return;
  }
  if (pure_imag && im > 0.0) {
    os << format_double(im) << 'i';
    return;
  }
  if (parenthesize) os << '(';
  if (pure_real) {
    os << "0-" << format_double(-re);
  } else if (pure_imag) {
    os << "0-" << format_double(-im) << 'i';
  } else {
    os << (re < 0.0 ? "0-" : "") << format_double(std::abs(re));
    os << (im < 0.0 ? "-" : "+") << format_double(std::abs(im)) << 'i';
  }
  if (parenthesize) os << ')';
}

// `min_prec` is the precedence a node must reach to print without
// parentheses; right operands of the left-associative operators and the
// base of '^' demand one level more than the operator itself.
void print(std::ostream& os, const ExprNode& node, int min_prec) {
  const int prec = precedence(node.kind);
  switch (node.kind) {
    case ExprKind::Coordinate:
      os << 'x' << (node.coordinate + 1);
      return;
    case ExprKind::Literal:
      print_literal(os, node.literal, true);
      return;
    case ExprKind::Exp:
    case ExprKind::Sin:
    case ExprKind::Cos: {
      os << (node.kind == ExprKind::Exp ? "exp" : node.kind == ExprKind::Sin ? "sin" : "cos");
      os << '(';
      print(os, *node.left, 0);
      os << ')';
      return;
    }
    case ExprKind::Pow: {
      const bool wrap = prec < min_prec;
      if (wrap) os << '(';
      print(os, *node.left, 4);
      os << '^' << node.exponent;
      if (wrap) os << ')';
      return;
    }
    default: {
      const bool wrap = prec < min_prec;
      if (wrap) os << '(';
      print(os, *node.left, prec);
      switch (node.kind) {
        case ExprKind::Add: os << " + "; break;
        case ExprKind::Sub: os << " - "; break;
        case ExprKind::Mul: os << "*"; break;
        default: os << "/"; break;
      }
      print(os, *node.right, prec + 1);
      if (wrap) os << ')';
      return;
    }
  }
}

class Parser {
public:
  Parser(std::string_view src, int dimension) : src_(src), n_(dimension) {}

  NodePtr run() {
    NodePtr e = parse_expr();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected trailing input");
    return e;
  }

private:
  std::string_view src_;
  int n_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError("Expr::parse: " + message, pos_);
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  NodePtr parse_expr() {
    NodePtr e = parse_term();
    while (true) {
      if (consume('+')) {
        e = make(ExprKind::Add, e, parse_term());
      } else if (consume('-')) {
        e = make(ExprKind::Sub, e, parse_term());
      } else {
        return e;
      }
    }
  }

  NodePtr parse_term() {
    NodePtr e = parse_factor();
    while (true) {
      if (consume('*')) {
        e = make(ExprKind::Mul, e, parse_factor());
      } else if (consume('/')) {
        e = make(ExprKind::Div, e, parse_factor());
      } else {
        return e;
      }
    }
  }

  NodePtr parse_factor() {
    NodePtr base = parse_atom();
    if (consume('^')) {
      auto node = std::make_shared<ExprNode>();
      node->kind = ExprKind::Pow;
      node->left = base;
      node->exponent = parse_integer();
      return node;
    }
    return base;
  }

  long parse_integer() {
    skip_ws();
    std::size_t start = pos_;
    bool negative = false;
    if (pos_ < src_.size() && src_[pos_] == '-') {
      negative = true;
      ++pos_;
    }
    long v = 0;
    bool any = false;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
      v = v * 10 + (src_[pos_] - '0');
      any = true;
      ++pos_;
    }
    if (!any) {
      pos_ = start;
      fail("expected integer exponent");
    }
    return negative ? -v : v;
  }

  NodePtr parse_atom() {
    skip_ws();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = parse_expr();
      if (!consume(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_name();
    fail(std::string("unexpected character '") + c + "'");
  }

  NodePtr parse_number() {
    std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.'))
      ++pos_;
    double v = 0.0;
    try {
      v = std::stod(std::string(src_.substr(start, pos_ - start)));
    } catch (const std::exception&) {
      pos_ = start;
      fail("malformed number");
    }
    bool imaginary = false;
    if (pos_ < src_.size() && src_[pos_] == 'i') {
      imaginary = true;
      ++pos_;
    }
    auto node = std::make_shared<ExprNode>();
    node->kind = ExprKind::Literal;
    node->literal = imaginary ? Complex(0.0, v) : Complex(v, 0.0);
    return node;
  }

  NodePtr parse_name() {
    std::size_t start = pos_;
    while (pos_ < src_.size() && std::isalpha(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    std::string name(src_.substr(start, pos_ - start));
    if (name == "x") {
      std::size_t digits = pos_;
      long idx = 0;
      bool any = false;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        idx = idx * 10 + (src_[pos_] - '0');
        any = true;
        ++pos_;
      }
      if (!any) {
        pos_ = digits;
        fail("expected coordinate index after 'x'");
      }
      if (idx < 1 || idx > n_) {
        pos_ = start;
        fail("unknown coordinate x" + std::to_string(idx) + " on a chart of dimension " +
             std::to_string(n_));
      }
      auto node = std::make_shared<ExprNode>();
      node->kind = ExprKind::Coordinate;
      node->coordinate = static_cast<int>(idx - 1);
      return node;
    }
    if (name == "i") {
      auto node = std::make_shared<ExprNode>();
      node->kind = ExprKind::Literal;
      node->literal = Complex(0.0, 1.0);
      return node;
    }
    ExprKind kind;
    if (name == "exp") {
      kind = ExprKind::Exp;
    } else if (name == "sin") {
      kind = ExprKind::Sin;
    } else if (name == "cos") {
      kind = ExprKind::Cos;
    } else {
      pos_ = start;
      fail("unknown function '" + name + "'");
    }
    if (!consume('(')) fail("expected '(' after function name");
    NodePtr arg = parse_expr();
    if (!consume(')')) fail("expected ')'");
    return make(kind, arg);
  }
};

ScalarJet eval_node(const ExprNode& node, const Point& x, int order) {
  const int n = static_cast<int>(x.size());
  switch (node.kind) {
    case ExprKind::Coordinate:
      if (node.coordinate >= n)
        throw EvalError("Expr::eval: coordinate index exceeds point dimension");
      return ScalarJet::coordinate(n, order, node.coordinate, x[node.coordinate]);
    case ExprKind::Literal:
      return ScalarJet::constant(n, order, node.literal);
    case ExprKind::Add: return eval_node(*node.left, x, order) + eval_node(*node.right, x, order);
    case ExprKind::Sub: return eval_node(*node.left, x, order) - eval_node(*node.right, x, order);
    case ExprKind::Mul: return eval_node(*node.left, x, order) * eval_node(*node.right, x, order);
    case ExprKind::Div: return eval_node(*node.left, x, order) / eval_node(*node.right, x, order);
    case ExprKind::Pow: return pow(eval_node(*node.left, x, order), node.exponent);
    case ExprKind::Exp: return exp(eval_node(*node.left, x, order));
    case ExprKind::Sin: return sin(eval_node(*node.left, x, order));
    default: return cos(eval_node(*node.left, x, order));
  }
}

int max_coordinate_node(const ExprNode& node) {
  int m = node.kind == ExprKind::Coordinate ? node.coordinate : -1;
  if (node.left) m = std::max(m, max_coordinate_node(*node.left));
  if (node.right) m = std::max(m, max_coordinate_node(*node.right));
  return m;
}

}  // namespace
}  // namespace detail

Expr Expr::parse(std::string_view source, int dimension) {
  return Expr(detail::Parser(source, dimension).run());
}

Expr Expr::literal(Complex c) {
  auto node = std::make_shared<detail::ExprNode>();
  node->kind = detail::ExprKind::Literal;
  node->literal = c;
  return Expr(std::move(node));
}

Expr Expr::coordinate(int k) {
  if (k < 0) throw ShapeError("Expr::coordinate: negative index");
  auto node = std::make_shared<detail::ExprNode>();
  node->kind = detail::ExprKind::Coordinate;
  node->coordinate = k;
  return Expr(std::move(node));
}

int Expr::max_coordinate() const {
  return node_ ? detail::max_coordinate_node(*node_) : -1;
}

std::string Expr::str() const {
  if (!node_) return "0";
  std::ostringstream os;
  detail::print(os, *node_, 0);
  return os.str();
}

ScalarJet Expr::eval(const Point& x, int order) const {
  if (!node_) return ScalarJet::constant(static_cast<int>(x.size()), order, Complex(0, 0));
  return detail::eval_node(*node_, x, order);
}

Complex Expr::value(const Point& x) const { return eval(x, 0).value; }

Expr operator+(const Expr& a, const Expr& b) {
  return Expr(detail::make(detail::ExprKind::Add, a.node_, b.node_));
}
Expr operator-(const Expr& a, const Expr& b) {
  return Expr(detail::make(detail::ExprKind::Sub, a.node_, b.node_));
}
Expr operator*(const Expr& a, const Expr& b) {
  return Expr(detail::make(detail::ExprKind::Mul, a.node_, b.node_));
}
Expr operator/(const Expr& a, const Expr& b) {
  return Expr(detail::make(detail::ExprKind::Div, a.node_, b.node_));
}
Expr pow(const Expr& a, long exponent) {
  auto node = std::make_shared<detail::ExprNode>();
  node->kind = detail::ExprKind::Pow;
  node->left = a.node_;
  node->exponent = exponent;
  return Expr(std::move(node));
}

Expr substitute(const Expr& e, int k, const Expr& replacement) {
  using detail::ExprKind;
  if (!e.node_) return e;
  const detail::ExprNode& node = *e.node_;
  switch (node.kind) {
    case ExprKind::Coordinate:
      return node.coordinate == k ? replacement : e;
    case ExprKind::Literal:
      return e;
    case ExprKind::Pow:
      return pow(substitute(Expr(node.left), k, replacement), node.exponent);
    case ExprKind::Exp:
      return exp(substitute(Expr(node.left), k, replacement));
    case ExprKind::Sin:
      return sin(substitute(Expr(node.left), k, replacement));
    case ExprKind::Cos:
      return cos(substitute(Expr(node.left), k, replacement));
    default: {
      Expr l = substitute(Expr(node.left), k, replacement);
      Expr r = substitute(Expr(node.right), k, replacement);
      switch (node.kind) {
        case ExprKind::Add: return l + r;
        case ExprKind::Sub: return l - r;
        case ExprKind::Mul: return l * r;
        default: return l / r;
      }
    }
  }
}
Expr exp(const Expr& a) { return Expr(detail::make(detail::ExprKind::Exp, a.node_)); }
Expr sin(const Expr& a) { return Expr(detail::make(detail::ExprKind::Sin, a.node_)); }
Expr cos(const Expr& a) { return Expr(detail::make(detail::ExprKind::Cos, a.node_)); }

}  // namespace gaugekit
