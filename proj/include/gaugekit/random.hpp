#ifndef GAUGEKIT_RANDOM_HPP
#define GAUGEKIT_RANDOM_HPP

#include <cstdint>
#include <random>

#include "gaugekit/field.hpp"

namespace gaugekit {

/// Seeded generator for the verification batteries. Raw mt19937_64 output
/// is mapped to doubles directly so identical seeds give identical streams
/// on every platform.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  Complex complex_coeff(double magnitude = 0.5) {
    return Complex(uniform(-magnitude, magnitude), uniform(-magnitude, magnitude));
  }

private:
  std::mt19937_64 engine_;
};

/// Random polynomial of total degree <= max_degree in n coordinates.
inline Expr random_poly(Rng& rng, int n, int max_degree = 2, int terms = 4,
                        double magnitude = 0.5) {
  Expr acc = Expr::literal(rng.complex_coeff(magnitude));
  for (int t = 1; t < terms; ++t) {
    Expr mono = Expr::literal(rng.complex_coeff(magnitude));
    const int degree = rng.uniform_int(0, max_degree);
    for (int d = 0; d < degree; ++d) mono = mono * Expr::coordinate(rng.uniform_int(0, n - 1));
    acc = acc + mono;
  }
  return acc;
}

inline SmoothMatrixField random_poly_field(Rng& rng, int n, int rows, int cols,
                                           int max_degree = 2, double magnitude = 0.5) {
  std::vector<Expr> entries;
  entries.reserve(rows * cols);
  for (int e = 0; e < rows * cols; ++e)
    entries.push_back(random_poly(rng, n, max_degree, 3, magnitude));
  return SmoothMatrixField::from_grid(rows, cols, std::move(entries));
}

/// Random composite built from polynomial leaves; any inverse node is kept
/// diagonally dominant so evaluation succeeds on the unit box.
inline SmoothMatrixField random_composite_field(Rng& rng, int n, int size) {
  SmoothMatrixField a = random_poly_field(rng, n, size, size);
  SmoothMatrixField b = random_poly_field(rng, n, size, size);
  SmoothMatrixField f;
  switch (rng.uniform_int(0, 4)) {
    case 0: f = a + b; break;
    case 1: f = a * b; break;
    case 2: f = a * adjoint(b); break;
    case 3: f = smul(SmoothMatrixField::from_expr(random_poly(rng, n)), a); break;
    default: f = transpose(a) * b; break;
  }
  if (rng.uniform_int(0, 1) == 1) {
    SmoothMatrixField well =
        SmoothMatrixField::constant(3.0 * Matrix::Identity(size, size)) + a;
    f = f * inverse(well);
  }
  return f;
}

/// Gauge field u = I + 0.05 * poly; the perturbation keeps row sums below
/// one on unit-scale boxes, so u is invertible there.
inline SmoothMatrixField random_gauge(Rng& rng, int n, int size) {
  return SmoothMatrixField::identity(size) +
         scale(Complex(0.05, 0), random_poly_field(rng, n, size, size, 2, 1.0));
}

inline Point random_point_in(const ChartDomain& box, Rng& rng, double shrink = 0.9) {
  Point x(box.dimension());
  for (int k = 0; k < box.dimension(); ++k) {
    const double c = 0.5 * (box.lower(k) + box.upper(k));
    const double h = 0.5 * (box.upper(k) - box.lower(k)) * shrink;
    x[k] = c + rng.uniform(-h, h);
  }
  return x;
}

}  // namespace gaugekit

#endif
