#include "doctest.h"

#include "gaugekit/connection.hpp"
#include "support/test_support.hpp"

using namespace gaugekit;

namespace {

Point pt2(double a, double b) {
  Point x(2);
  x << a, b;
  return x;
}

// the r=1, n=2 example A = c (x1 dx2 - x2 dx1), with F = 2c dx1^dx2
Connection vortex(double c) {
  ChartDomain box = ChartDomain::unit(2);
  std::vector<Expr> a1 = {Expr::literal(Complex(-c, 0)) * Expr::coordinate(1)};
  std::vector<Expr> a2 = {Expr::literal(Complex(c, 0)) * Expr::coordinate(0)};
  return Connection(box, 1,
                    {SmoothMatrixField::from_grid(1, 1, a1),
                     SmoothMatrixField::from_grid(1, 1, a2)});
}

Connection random_connection(testing::Rng& rng, const ChartDomain& box, int rank) {
  std::vector<SmoothMatrixField> coeff;
  for (int k = 0; k < box.dimension(); ++k)
    coeff.push_back(testing::random_poly_field(rng, box.dimension(), rank, rank));
  return Connection(box, rank, std::move(coeff));
}

// finite-difference curvature: d_k A_l - d_l A_k by central differences,
// plus the pointwise commutator
PolyForm fd_curvature(const Connection& c, const Point& x) {
  const int n = c.dimension();
  PolyForm f(n, c.rank(), c.rank());
  for (int k = 0; k < n; ++k)
    for (int l = k + 1; l < n; ++l) {
      Matrix v = testing::fd_partial(c.coeff(l), x, k) - testing::fd_partial(c.coeff(k), x, l);
      Matrix ak = c.coeff(k).value(x), al = c.coeff(l).value(x);
      f.set({k, l}, Matrix(v + ak * al - al * ak));
    }
  return f;
}

const double kPi = std::acos(-1.0);

}  // namespace

TEST_CASE("curvature of a flat connection vanishes") {
  Connection flat = Connection::flat(ChartDomain::unit(2), 3);
  CHECK(norm_inf(curvature(flat, pt2(0.4, -0.2))) == 0.0);
}

TEST_CASE("curvature of the abelian vortex") {
  Connection c = vortex(0.35);
  PolyForm f = curvature(c, pt2(0.1, 0.7));
  CHECK(std::abs(f.component(2).at(IndexTuple{0, 1})(0, 0) - Complex(0.7, 0)) <= 1e-14);
}

TEST_CASE("curvature matches the finite-difference oracle") {
  testing::Rng rng(201);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = rng.uniform_int(2, 3);
    Connection c = random_connection(rng, ChartDomain::unit(n), rng.uniform_int(1, 3));
    Point x = testing::random_point_in(c.domain(), rng, 0.8);
    CHECK(norm_inf(sub(curvature(c, x), fd_curvature(c, x))) <= 1e-7);
  }
}

TEST_CASE("curvature transforms covariantly under gauge changes") {
  testing::Rng rng(202);
  for (int trial = 0; trial < 5; ++trial) {
    Connection c = random_connection(rng, ChartDomain::unit(2), 2);
    SmoothMatrixField u = random_gauge(rng, 2, 2);
    Connection cu = gauge_transform(c, u);
    Point x = testing::random_point_in(c.domain(), rng);
    Matrix uval = u.value(x);
    Matrix uinv = uval.inverse();
    PolyForm f = curvature(c, x);
    PolyForm fu = curvature(cu, x);
    f.for_each([&](int, const IndexTuple& idx, const Matrix& v) {
      CHECK((fu.component(2).at(idx) - uval * v * uinv).cwiseAbs().maxCoeff() <= 1e-9);
    });
  }
}

TEST_CASE("chern character basics") {
  // flat rank r: constant r
  Connection flat = Connection::flat(ChartDomain::unit(2), 4);
  ChernForm ch = chern_character(flat, pt2(0.3, 0.3));
  CHECK(ch.form.component(0).at(IndexTuple{})(0, 0) == Complex(4, 0));
  CHECK(norm_inf_positive(ch.form) == 0.0);

  // vortex: ch = 1 + (i c / pi) dx1^dx2
  const double c = 0.4;
  ChernForm chv = chern_character(vortex(c), pt2(-0.2, 0.6));
  Complex deg2 = chv.form.component(2).at(IndexTuple{0, 1})(0, 0);
  CHECK(std::abs(deg2 - Complex(0, c / kPi)) <= 1e-14);
}

TEST_CASE("ch of a direct sum adds") {
  testing::Rng rng(203);
  Connection a = random_connection(rng, ChartDomain::unit(2), 2);
  Connection b = random_connection(rng, ChartDomain::unit(2), 3);
  Point x = pt2(0.25, -0.5);
  PolyForm lhs = chern_character(direct_sum(a, b), x).form;
  PolyForm rhs = add(chern_character(a, x).form, chern_character(b, x).form);
  CHECK(norm_inf(sub(lhs, rhs)) <= 1e-10);
}

TEST_CASE("ch is gauge invariant") {
  testing::Rng rng(204);
  for (int trial = 0; trial < 5; ++trial) {
    Connection c = random_connection(rng, ChartDomain::unit(2), 2);
    SmoothMatrixField u = random_gauge(rng, 2, 2);
    Point x = testing::random_point_in(c.domain(), rng);
    CHECK(norm_inf(sub(chern_character(gauge_transform(c, u), x).form,
                       chern_character(c, x).form)) <= 1e-9);
  }
}

TEST_CASE("ch closedness with order-3 jets") {
  testing::Rng rng(205);
  for (int trial = 0; trial < 5; ++trial) {
    Connection c = random_connection(rng, ChartDomain::unit(3), 2);
    FieldForm ch = chern_field(c);
    Point x = testing::random_point_in(c.domain(), rng);
    CHECK(norm_inf(exterior_derivative(ch, x)) <= 1e-8);
  }
}

TEST_CASE("dual connection parity of ch") {
  testing::Rng rng(206);
  Connection c = random_connection(rng, ChartDomain::unit(3), 2);
  Connection cd = dual(c);
  Point x = testing::random_point_in(c.domain(), rng);
  PolyForm ch = chern_character(c, x).form;
  PolyForm chd = chern_character(cd, x).form;
  // ch_j(dual) = (-1)^j ch_j
  CHECK(norm_inf(sub(restrict_degree(chd, 2), scale(Complex(-1, 0), restrict_degree(ch, 2)))) <=
        1e-10);
  CHECK(norm_inf(sub(restrict_degree(chd, 0), restrict_degree(ch, 0))) == 0.0);
  // dual of flat is flat
  Connection flat = Connection::flat(ChartDomain::unit(2), 2);
  CHECK(norm_inf(curvature(dual(flat), pt2(0, 0))) == 0.0);
}

TEST_CASE("cs_form of equal connections is exactly zero") {
  testing::Rng rng(207);
  Connection c = random_connection(rng, ChartDomain::unit(2), 2);
  CSForm cs = cs_form(c, c, pt2(0.3, 0.4), 8);
  CHECK(norm_inf(cs.form) == 0.0);
}

TEST_CASE("abelian cs against the closed form") {
  // c0 = d, c1 = vortex: the degree-1 part is (i/2pi) A1 and is t-independent
  Connection c1 = vortex(0.3);
  Connection c0 = Connection::flat(c1.domain(), 1);
  Point x = pt2(0.5, -0.1);
  CSForm cs = cs_form(c0, c1, x, 8);
  Complex a1 = c1.coeff(0).value(x)(0, 0);
  Complex a2 = c1.coeff(1).value(x)(0, 0);
  const Complex s = Complex(0, 1) / (2.0 * kPi);
  CHECK(std::abs(cs.form.component(1).at(IndexTuple{0})(0, 0) - s * a1) <= 1e-14);
  CHECK(std::abs(cs.form.component(1).at(IndexTuple{1})(0, 0) - s * a2) <= 1e-14);
  // odd degrees only
  CHECK(cs.form.component(0).empty());
  CHECK(cs.form.component(2).empty());
}

TEST_CASE("transgression: d CS = ch(c1) - ch(c0)") {
  testing::Rng rng(208);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = rng.uniform_int(2, 3);
    Connection c1 = random_connection(rng, ChartDomain::unit(n), 2);
    Connection c0 = random_connection(rng, ChartDomain::unit(n), 2);
    FieldForm cs = cs_field(c0, c1, 8);
    Point x = testing::random_point_in(c0.domain(), rng);
    FieldEvalContext ctx(x);
    PolyForm dcs = exterior_derivative(cs, ctx);
    PolyForm expected =
        sub(chern_character(c1, ctx).form, chern_character(c0, ctx).form);
    CHECK(norm_inf(sub(dcs, expected)) <= 1e-8);
  }
}

TEST_CASE("pullback along the identity map preserves the connection") {
  testing::Rng rng(209);
  Connection c = random_connection(rng, ChartDomain::unit(2), 2);
  AffineMap id{RealMatrix::Identity(2, 2), Point::Zero(2)};
  Connection pulled = pullback(id, c, c.domain());
  Point x = pt2(0.7, 0.2);
  for (int k = 0; k < 2; ++k)
    CHECK((pulled.coeff(k).value(x) - c.coeff(k).value(x)).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("pullback contracts the Jacobian correctly") {
  // f(y) = J y, pulled-back vortex coefficients satisfy A'_j = sum_k J_kj A_k(f(y))
  Connection c = vortex(0.5);
  RealMatrix jac(2, 2);
  jac << 0.5, 0.25, -0.125, 0.5;
  AffineMap f{jac, Point::Zero(2)};
  Connection pulled = pullback(f, c, ChartDomain::unit(2));
  Point y = pt2(0.4, -0.6);
  Point x = jac * y;
  for (int j = 0; j < 2; ++j) {
    Complex expect = jac(0, j) * c.coeff(0).value(x)(0, 0) +
                     jac(1, j) * c.coeff(1).value(x)(0, 0);
    CHECK(std::abs(pulled.coeff(j).value(y)(0, 0) - expect) <= 1e-15);
  }
}

TEST_CASE("induce with a coordinate projector extracts the block") {
  testing::Rng rng(210);
  Connection ambient = random_connection(rng, ChartDomain::unit(2), 4);
  Matrix p = Matrix::Zero(4, 4);
  p.topLeftCorner(2, 2) = Matrix::Identity(2, 2);
  ProjectionField proj{SmoothMatrixField::constant(p)};
  std::vector<Point> samples = sample_points(ambient.domain(), 10, 1);
  Connection induced = induce(proj, ambient, std::nullopt, samples);
  CHECK(induced.rank() == 2);
  Point x = pt2(0.3, 0.8);
  for (int k = 0; k < 2; ++k) {
    Matrix expect = ambient.coeff(k).value(x).topLeftCorner(2, 2);
    CHECK((induced.coeff(k).value(x) - expect).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("induced connection gauge-transforms under frame rotation") {
  testing::Rng rng(211);
  Connection ambient = random_connection(rng, ChartDomain::unit(2), 4);
  Matrix p = Matrix::Zero(4, 4);
  p.topLeftCorner(2, 2) = Matrix::Identity(2, 2);
  ProjectionField proj{SmoothMatrixField::constant(p)};
  std::vector<Point> samples = sample_points(ambient.domain(), 10, 1);

  // unitary 2x2 in the image of p
  Matrix u2(2, 2);
  const double th = 0.7;
  u2 << Complex(std::cos(th), 0), Complex(-std::sin(th), 0), Complex(std::sin(th), 0),
      Complex(std::cos(th), 0);
  Matrix frame = Matrix::Zero(4, 2);
  frame.topRows(2) = u2;
  Connection rotated =
      induce(proj, ambient, SmoothMatrixField::constant(frame), samples);
  Connection plain = induce(proj, ambient, std::nullopt, samples);
  Point x = pt2(-0.4, 0.1);
  for (int k = 0; k < 2; ++k) {
    Matrix expect = u2.adjoint() * plain.coeff(k).value(x) * u2;
    CHECK((rotated.coeff(k).value(x) - expect).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("induce rejects bad frames") {
  Connection ambient = Connection::flat(ChartDomain::unit(2), 3);
  Matrix p = Matrix::Zero(3, 3);
  p(0, 0) = 1;
  ProjectionField proj{SmoothMatrixField::constant(p)};
  std::vector<Point> samples = sample_points(ambient.domain(), 5, 1);
  Matrix not_orthonormal = Matrix::Zero(3, 1);
  not_orthonormal(0, 0) = 2.0;
  CHECK_THROWS_AS(
      induce(proj, ambient, SmoothMatrixField::constant(not_orthonormal), samples),
      ShapeError);
  Matrix outside = Matrix::Zero(3, 1);
  outside(1, 0) = 1.0;
  CHECK_THROWS_AS(induce(proj, ambient, SmoothMatrixField::constant(outside), samples),
                  ShapeError);
}

TEST_CASE("lemma_ss_check on block-diagonal and entangled connections") {
  testing::Rng rng(212);
  ChartDomain box = ChartDomain::unit(2);
  std::vector<Point> samples = sample_points(box, 20, 2);
  Matrix pv = Matrix::Zero(4, 4);
  pv.topLeftCorner(2, 2) = Matrix::Identity(2, 2);
  Matrix pw = Matrix::Identity(4, 4) - pv;
  ProjectionField projv{SmoothMatrixField::constant(pv)};
  ProjectionField projw{SmoothMatrixField::constant(pw)};

  // block-diagonal ambient: residuals vanish
  Connection a = random_connection(rng, box, 2);
  Connection b = random_connection(rng, box, 2);
  LemmaSSReport good = lemma_ss_check(direct_sum(a, b), projv, projw, samples);
  CHECK(good.hypotheses_hold);
  CHECK(good.block_residual_v <= 1e-12);
  CHECK(good.ch_residual <= 1e-12);

  // off-diagonal curvature: flagged inapplicable
  std::vector<SmoothMatrixField> coeff;
  Matrix e13 = Matrix::Zero(4, 4);
  e13(0, 2) = 1.0;
  coeff.push_back(smul(SmoothMatrixField::from_expr(Expr::parse("x2", 2)),
                       SmoothMatrixField::constant(e13)));
  coeff.push_back(SmoothMatrixField::zero(4, 4));
  Connection entangled(box, 4, std::move(coeff));
  LemmaSSReport bad = lemma_ss_check(entangled, projv, projw, samples);
  CHECK_FALSE(bad.hypotheses_hold);
  CHECK(bad.block_residual_w > 1e-3);
}

TEST_CASE("lemma_ss_check rejects inconsistent projectors") {
  ChartDomain box = ChartDomain::unit(2);
  std::vector<Point> samples = sample_points(box, 5, 3);
  Matrix pv = Matrix::Zero(2, 2);
  pv(0, 0) = 1;
  ProjectionField projv{SmoothMatrixField::constant(pv)};
  CHECK_THROWS_AS(
      lemma_ss_check(Connection::flat(box, 2), projv, projv, samples), ShapeError);
}
