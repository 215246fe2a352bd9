#include "doctest.h"

#include "gaugekit/jet.hpp"
#include "support/test_support.hpp"

using namespace gaugekit;

TEST_CASE("scalar jet of exp at 0") {
  ScalarJet x = ScalarJet::coordinate(1, 2, 0, 0.0);
  ScalarJet e = exp(x);
  CHECK(e.value.real() == doctest::Approx(1.0));
  CHECK(e.first(0).real() == doctest::Approx(1.0));
  CHECK(e.second(0, 0).real() == doctest::Approx(1.0));
}

TEST_CASE("scalar jet product rule") {
  ScalarJet x = ScalarJet::coordinate(2, 1, 0, 2.0);
  ScalarJet y = ScalarJet::coordinate(2, 1, 1, 3.0);
  ScalarJet p = x * y;
  CHECK(p.value.real() == doctest::Approx(6.0));
  CHECK(p.first(0).real() == doctest::Approx(3.0));
  CHECK(p.first(1).real() == doctest::Approx(2.0));
}

TEST_CASE("reciprocal jets against the quotient rule") {
  ScalarJet x = ScalarJet::coordinate(1, 3, 0, 0.5);
  ScalarJet w = reciprocal(ScalarJet::constant(1, 3, Complex(1, 0)) + x);
  // 1/(1+x): derivatives -1/(1+x)^2, 2/(1+x)^3, -6/(1+x)^4
  CHECK(w.value.real() == doctest::Approx(1.0 / 1.5));
  CHECK(w.first(0).real() == doctest::Approx(-1.0 / 2.25));
  CHECK(w.second(0, 0).real() == doctest::Approx(2.0 / 3.375));
  CHECK(w.third(0, 0, 0).real() == doctest::Approx(-6.0 / 5.0625));
}

TEST_CASE("mixed second partials are built symmetric") {
  ScalarJet x = ScalarJet::coordinate(2, 2, 0, 1.2);
  ScalarJet y = ScalarJet::coordinate(2, 2, 1, -0.4);
  ScalarJet f = sin(x * y);
  CHECK(f.second(0, 1) == f.second(1, 0));
}

TEST_CASE("matrix inverse jet: the 2x2 spec example") {
  // f = (I + x1 E11)^{-1}, entry (0,0) is 1/(1+x1): value 2/3, d1 = -4/9 at x1 = 0.5
  MatrixJet a(1, 1, 2, 2);
  a.value() << Complex(1.5, 0), Complex(0, 0), Complex(0, 0), Complex(1, 0);
  a.first(0) << Complex(1, 0), Complex(0, 0), Complex(0, 0), Complex(0, 0);
  MatrixJet w = inverse(a, 1);
  CHECK(w.value()(0, 0).real() == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(w.first(0)(0, 0).real() == doctest::Approx(-4.0 / 9.0).epsilon(1e-12));
}

TEST_CASE("matrix product jets satisfy a*inverse(a) = I with zero derivatives") {
  testing::Rng rng(42);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = rng.uniform_int(1, 3);
    const int size = rng.uniform_int(1, 4);
    MatrixJet a(n, 2, size, size);
    a.value() = 3.0 * Matrix::Identity(size, size);
    for (int i = 0; i < size; ++i)
      for (int j = 0; j < size; ++j) {
        a.value()(i, j) += rng.complex_coeff();
        for (int k = 0; k < n; ++k) a.first(k)(i, j) = rng.complex_coeff();
        for (int k = 0; k < n; ++k)
          for (int l = k; l < n; ++l) a.second(k, l)(i, j) = rng.complex_coeff();
      }
    MatrixJet prod = mul(a, inverse(a, 2), 2);
    CHECK((prod.value() - Matrix::Identity(size, size)).cwiseAbs().maxCoeff() <= 1e-12);
    for (int k = 0; k < n; ++k) CHECK(prod.first(k).cwiseAbs().maxCoeff() <= 1e-12);
    for (int k = 0; k < n; ++k)
      for (int l = k; l < n; ++l) CHECK(prod.second(k, l).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("singular inverse raises") {
  MatrixJet a(1, 0, 2, 2);
  a.value().setZero();
  CHECK_THROWS_AS(inverse(a, 0), EvalError);
}

TEST_CASE("block and slice round-trip") {
  MatrixJet a = MatrixJet::constant(1, 1, Matrix::Identity(2, 2));
  MatrixJet b = MatrixJet::constant(1, 1, 2.0 * Matrix::Identity(2, 2));
  MatrixJet g = block({{a, b}, {b, a}}, 1);
  CHECK(g.rows() == 4);
  CHECK(g.cols() == 4);
  MatrixJet tl = slice(g, 0, 2, 2, 2, 1);
  CHECK((tl.value() - 2.0 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("jet order above the maximum is rejected") {
  CHECK_THROWS_AS(ScalarJet(1, 4), EvalError);
  CHECK_THROWS_AS(MatrixJet(1, 5, 2, 2), EvalError);
}

TEST_CASE("affine pullback chain rule") {
  // g(y) = f(J y + b) with f = x1 * x2 on R^2, J = [[1, 2], [0, 1]], b = (0.5, -1)
  Expr f = Expr::parse("x1*x2", 2);
  RealMatrix jac(2, 2);
  jac << 1, 2, 0, 1;
  Point b(2);
  b << 0.5, -1.0;
  Point y(2);
  y << 0.25, 0.75;
  Point x = jac * y + b;
  MatrixJet fx = MatrixJet::from_scalar(f.eval(x, 2));
  MatrixJet gy = affine_pullback(fx, jac, 2);
  // oracle: compose the expressions by hand: g = (y1 + 2 y2 + 0.5)(y2 - 1)
  Expr composed = Expr::parse("(x1 + 2*x2 + 0.5)*(x2 - 1)", 2);
  ScalarJet expect = composed.eval(y, 2);
  CHECK(std::abs(gy.value()(0, 0) - expect.value) <= 1e-14);
  for (int k = 0; k < 2; ++k) CHECK(std::abs(gy.first(k)(0, 0) - expect.first(k)) <= 1e-14);
  for (int k = 0; k < 2; ++k)
    for (int l = k; l < 2; ++l)
      CHECK(std::abs(gy.second(k, l)(0, 0) - expect.second(k, l)) <= 1e-14);
}
