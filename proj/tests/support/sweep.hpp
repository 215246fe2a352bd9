#ifndef GAUGEKIT_TEST_SWEEP_HPP
#define GAUGEKIT_TEST_SWEEP_HPP

#include <cstdio>
#include <string>

#include "gaugekit/random.hpp"
#include "gaugekit/scenario.hpp"

namespace gaugekit::testing {

/// Seeded scenarios spanning n, r in {1,2,3} with polynomial or trig
/// connection entries of degree <= 2, written as expression strings so the
/// grammar and scenario paths are exercised end to end.

inline std::string sweep_number(Rng& rng) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", rng.uniform(0.05, 0.35));
  return buf;
}

inline std::string sweep_coeff(Rng& rng) {
  const int shape = rng.uniform_int(0, 3);
  std::string re = sweep_number(rng);
  std::string im = sweep_number(rng);
  switch (shape) {
    case 0: return re;
    case 1: return "(0 - " + re + ")";
    case 2: return "(" + re + " + " + im + "i)";
    default: return "(0 - " + re + " - " + im + "i)";
  }
}

inline std::string sweep_monomial(Rng& rng, int n, bool trig) {
  const auto coord = [&] { return "x" + std::to_string(rng.uniform_int(1, n)); };
  if (trig) {
    switch (rng.uniform_int(0, 2)) {
      case 0: return "sin(" + coord() + ")";
      case 1: return "cos(" + coord() + ")";
      default: return coord() + "*cos(" + coord() + ")";
    }
  }
  switch (rng.uniform_int(0, 2)) {
    case 0: return coord();
    case 1: return coord() + "^2";
    default: return coord() + "*" + coord();
  }
}

inline std::string sweep_entry(Rng& rng, int n, bool trig) {
  std::string out = sweep_coeff(rng) + "*" + sweep_monomial(rng, n, trig);
  const int extra = rng.uniform_int(0, 1);
  for (int t = 0; t < extra; ++t)
    out += " + " + sweep_coeff(rng) + "*" + sweep_monomial(rng, n, trig);
  return out;
}

inline Scenario sweep_scenario(int index) {
  const int n = 1 + index % 3;
  const int r = 1 + (index / 3) % 3;
  const bool trig = index % 2 == 1;
  Rng rng(9001 + 17 * static_cast<std::uint64_t>(index));

  Scenario scn;
  scn.name = "sweep_" + std::to_string(index) + "_n" + std::to_string(n) + "_r" +
             std::to_string(r) + (trig ? "_trig" : "_poly");
  scn.chart = ChartDomain::unit(n);
  scn.rank = r;
  for (int k = 0; k < n; ++k) {
    std::vector<Expr> entries;
    for (int e = 0; e < r * r; ++e) entries.push_back(Expr::parse(sweep_entry(rng, n, trig), n));
    scn.coeff_exprs.push_back(std::move(entries));
  }
  scn.settings.samples = 100;
  scn.settings.seed = 1000 + index;
  scn.settings.rk4_steps = 8192;
  scn.settings.jet_order = 3;
  return scn;
}

}  // namespace gaugekit::testing

#endif
