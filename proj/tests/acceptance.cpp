// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Expensive transport criteria report their own timings.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "gaugekit/scenario.hpp"
#include "support/sweep.hpp"
#include "support/test_support.hpp"

using namespace gaugekit;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " FAILED{" << what << "}";
    }
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<Scenario> sweep_corpus() {
  std::vector<Scenario> out;
  for (int index = 0; index < 20; ++index) out.push_back(testing::sweep_scenario(index));
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2e", v);
  return buf;
}

// --- criterion 1: lemma certification ---------------------------------------

Outcome criterion_lemma(const std::vector<Scenario>& sweep) {
  Outcome out;
  const auto t0 = Clock::now();
  double worst_lemma = 0.0, worst_column = 0.0, min_det = 1e300, min_eig = 1e300;
  for (const Scenario& scn : sweep) {
    Connection c = scn.connection();
    FlatPresentation fp = flatten(c);
    std::vector<Point> samples = sample_points(scn.chart, 100, scn.settings.seed);
    FlatCheckReport report = verify_flat_presentation(fp, samples);
    worst_lemma = std::max(worst_lemma, report.lemma_residual);
    worst_column = std::max(worst_column, report.column_residual);
    min_det = std::min(min_det, report.min_abs_det);
    min_eig = std::min(min_eig, report.min_pair_eig);
  }
  const double elapsed = seconds_since(t0);
  out.require(worst_lemma <= 1e-9, "lemma residual " + fmt(worst_lemma));
  out.require(min_det >= 1e-8, "min |det g| " + fmt(min_det));
  out.require(worst_column <= 1e-10, "inverse column " + fmt(worst_column));
  out.require(min_eig > 0.0, "min eig " + fmt(min_eig));
  out.require(elapsed <= 60.0, "runtime " + fmt(elapsed) + " s");
  out.detail << "lemma " << fmt(worst_lemma) << ", min det " << fmt(min_det) << ", column "
             << fmt(worst_column) << ", min eig " << fmt(min_eig) << ", " << fmt(elapsed)
             << " s";
  return out;
}

// --- criterion 2: rank formulas ----------------------------------------------

Outcome criterion_ranks() {
  Outcome out;
  for (long n = 1; n <= 10; ++n)
    for (long r = 1; r <= 10; ++r) {
      RankCheck rc = rank_check(n, r);
      out.require(rc.lemma_rank == (2 * n + 2) * r, "lemma rank formula");
      out.require(rc.proposition_rank == (4 * n + 8 * r + 2) * (n + 2 * r),
                  "proposition rank formula");
      out.require(rc.consistent, "composition identity");
    }
  RankCheck base = rank_check(1, 1);
  out.require(base.lemma_rank == 4 && base.proposition_rank == 42, "n=r=1 values");
  out.detail << "all 1 <= n, r <= 10 consistent; (1,1) -> " << base.lemma_rank << ", "
             << base.proposition_rank;
  return out;
}

// --- criterion 3: structured inverse -----------------------------------------

Outcome criterion_inverse(const std::vector<Scenario>& sweep) {
  Outcome out;
  double worst_flat = 0.0, worst_ch = 0.0, worst_deg0 = 0.0, worst_ss = 0.0;
  for (const Scenario& scn : sweep) {
    Connection c = scn.connection();
    InversePair ip = structured_inverse(c);
    std::vector<Point> samples = sample_points(scn.chart, 100, scn.settings.seed);
    InverseCheckReport report = verify_inverse_pair(ip, samples);
    worst_flat = std::max(worst_flat, report.flatness_residual);
    worst_ch = std::max(worst_ch, report.ch_positive_residual);
    worst_deg0 = std::max(worst_deg0, report.ch_degree0_error);
    worst_ss = std::max(worst_ss,
                        std::max(report.ss.block_residual_v, report.ss.block_residual_w));
  }
  out.require(worst_flat <= 1e-7, "ambient flatness " + fmt(worst_flat));
  out.require(worst_ch <= 1e-7, "ch cancellation " + fmt(worst_ch));
  out.require(worst_deg0 == 0.0, "ch degree-0 " + fmt(worst_deg0));
  out.require(worst_ss <= 1e-8, "SS hypotheses " + fmt(worst_ss));
  out.detail << "flatness " << fmt(worst_flat) << ", ch " << fmt(worst_ch) << ", SS "
             << fmt(worst_ss);
  return out;
}

// --- criterion 4: trivial monodromy -------------------------------------------

// Three-doubling ladder on one loop; true when all three ratios land in
// [12, 20]. Loops whose leading error coefficient cancels (palindromic
// lines, symmetric trig fields) converge faster than 16x and are skipped
// by the caller in favor of another certification loop.
bool ladder_clean(const FlatPresentation& fp, const PathSpec& loop, int base,
                  double* lo, double* hi) {
  std::vector<PathSpec> one = {loop};
  std::vector<Matrix> h;
  for (int level = 0; level < 5; ++level)
    h.push_back(monodromy_check(fp, one, base << level).front().H);
  *lo = 1e300;
  *hi = 0.0;
  for (std::size_t i = 0; i + 2 < h.size(); ++i) {
    const double coarse = (h[i + 1] - h[i]).cwiseAbs().maxCoeff();
    const double fine = (h[i + 2] - h[i + 1]).cwiseAbs().maxCoeff();
    if (fine < 1e-12) return false;  // below the measurement floor
    const double ratio = coarse / fine;
    *lo = std::min(*lo, ratio);
    *hi = std::max(*hi, ratio);
  }
  return *lo >= 12.0 && *hi <= 20.0;
}

Outcome criterion_monodromy(const std::vector<Scenario>& sweep) {
  Outcome out;
  const auto t0 = Clock::now();
  double worst_identity = 0.0;
  double ratio_lo = 1e300, ratio_hi = 0.0;
  for (const Scenario& scn : sweep) {
    Connection c = scn.connection();
    FlatPresentation fp = flatten(c);
    std::vector<PathSpec> loops = loop_family(scn.chart, scn.settings.seed);
    out.require(loops.size() == 9, "nine loops per scenario");
    for (const auto& report : monodromy_check(fp, loops, 8192))
      worst_identity = std::max(worst_identity, report.residuals.at("identity"));

    // Fourth-order convergence, certified on a loop where the leading error
    // coefficient is nondegenerate (out-and-back lines on n = 1 charts are
    // palindromic and always superconverge, so they cannot certify).
    if (scn.chart.dimension() < 2) continue;
    bool certified = false;
    double lo = 0.0, hi = 0.0;
    for (const PathSpec& loop : loops) {
      for (int base : {64, 128}) {
        if (ladder_clean(fp, loop, base, &lo, &hi)) {
          certified = true;
          ratio_lo = std::min(ratio_lo, lo);
          ratio_hi = std::max(ratio_hi, hi);
          break;
        }
      }
      if (certified) break;
    }
    out.require(certified, scn.name + " has no loop with ratios in [12, 20]");
  }
  out.require(worst_identity <= 1e-6, "|H - I| " + fmt(worst_identity));
  out.detail << "|H - I| " << fmt(worst_identity) << ", certified ratios [" << fmt(ratio_lo)
             << ", " << fmt(ratio_hi) << "], " << fmt(seconds_since(t0)) << " s";
  return out;
}

// --- criterion 5: CS axioms ----------------------------------------------------

Outcome criterion_cs(const std::vector<Scenario>& sweep) {
  Outcome out;
  double worst_trans = 0.0, worst_self = 0.0, worst_funct = 0.0;
  for (const Scenario& scn : sweep) {
    if (scn.name.find("_poly") == std::string::npos) continue;  // polynomial scenarios
    Connection c = scn.connection();
    Connection trivial = Connection::flat(scn.chart, scn.rank);
    std::vector<Point> samples = sample_points(scn.chart, 5, scn.settings.seed);

    for (const Point& x : samples)
      worst_self = std::max(worst_self, norm_inf(cs_form(c, c, x, 8).form));

    FieldForm cs = cs_field(trivial, c, 8);
    for (const Point& x : samples) {
      FieldEvalContext ctx(x);
      PolyForm dcs = exterior_derivative(cs, ctx);
      PolyForm expect =
          sub(chern_character(c, ctx).form, chern_character(trivial, ctx).form);
      worst_trans = std::max(worst_trans, norm_inf(sub(dcs, expect)));
    }

    // affine pullback, shrunk to keep the image inside the chart
    const int n = scn.chart.dimension();
    Rng rng(scn.settings.seed * 31 + 5);
    RealMatrix jac = 0.5 * RealMatrix::Identity(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) jac(i, j) += 0.1 * rng.uniform(-1, 1);
    Point offset = 0.05 * Point::Ones(n);
    AffineMap map{jac, offset};
    Connection pulled = pullback(map, c, scn.chart);
    Connection pulled_trivial = pullback(map, trivial, scn.chart);
    FieldForm cs_pulled = cs_field(pulled_trivial, pulled, 8);
    for (const Point& y : samples) {
      PolyForm lhs = exterior_derivative(cs_pulled, y);
      PolyForm rhs = pullback_values(exterior_derivative(cs, Point(jac * y + offset)), jac);
      worst_funct = std::max(worst_funct, norm_inf(sub(lhs, rhs)));
    }
  }
  out.require(worst_trans <= 1e-8, "transgression " + fmt(worst_trans));
  out.require(worst_self == 0.0, "CS(c,c) " + fmt(worst_self));
  out.require(worst_funct <= 1e-8, "functoriality " + fmt(worst_funct));
  out.detail << "transgression " << fmt(worst_trans) << ", self " << fmt(worst_self)
             << ", functoriality " << fmt(worst_funct);
  return out;
}

// --- criterion 6: G-pipeline ----------------------------------------------------

Outcome criterion_g_pipeline() {
  Outcome out;
  const auto t0 = Clock::now();
  const std::string dir = GAUGEKIT_SCENARIO_DIR;
  for (const char* name : {"so2_rotation", "so3_trig", "sp2_traceless"}) {
    Scenario scn = Scenario::load_file(dir + "/" + name + std::string(".json"));
    Connection c = scn.connection();
    std::vector<Point> samples = sample_points(scn.chart, scn.settings.samples,
                                               scn.settings.seed);
    GInverseResult result = g_structured_inverse(c, *scn.structure, samples);
    out.require(result.report.input_compat <= 1e-9,
                std::string(name) + " input compat " + fmt(result.report.input_compat));
    out.require(result.report.inverse_compat <= 1e-9,
                std::string(name) + " inverse compat " + fmt(result.report.inverse_compat));
    out.require(result.report.ch_positive_residual <= 1e-7,
                std::string(name) + " total ch " + fmt(result.report.ch_positive_residual));
    out.require(result.report.ch_degree0_error == 0.0, std::string(name) + " ch degree 0");

    const HolonomyGroup group = scn.structure->kind() == PairingKind::symmetric
                                    ? HolonomyGroup::SO
                                    : HolonomyGroup::Sp;
    double phi_res = 0.0, det_res = 0.0;
    for (const PathSpec& loop : scn.loops()) {
      Matrix h_in = transport(c, loop, scn.settings.rk4_steps);
      HolonomyReport rin = group_membership(h_in, scn.structure, group);
      phi_res = std::max(phi_res, rin.residuals.at("phi_invariance"));
      Matrix h_inv = transport(result.inverse_conn, loop, scn.settings.rk4_steps);
      HolonomyReport rinv = group_membership(
          h_inv, std::optional<BilinearStructure>(result.structure), group);
      phi_res = std::max(phi_res, rinv.residuals.at("phi_invariance"));
      if (group == HolonomyGroup::SO) {
        det_res = std::max(det_res, rin.residuals.at("det_one"));
        det_res = std::max(det_res, rinv.residuals.at("det_one"));
      }
    }
    out.require(phi_res <= 1e-6, std::string(name) + " holonomy phi " + fmt(phi_res));
    if (group == HolonomyGroup::SO)
      out.require(det_res <= 1e-6, std::string(name) + " holonomy det " + fmt(det_res));
    out.detail << name << "(phi " << fmt(phi_res) << ") ";
  }
  out.detail << fmt(seconds_since(t0)) << " s";
  return out;
}

// --- criterion 7: dual parity and doubling ---------------------------------------

Outcome criterion_parity(const std::vector<Scenario>& sweep) {
  Outcome out;
  int flagged = 0;
  double worst_parity = 0.0, worst_pairing = 0.0, worst_explained = 0.0;
  for (std::size_t i = 0; i < sweep.size(); i += 4) {
    const Scenario& scn = sweep[i];
    Connection c = scn.connection();
    std::vector<Point> samples = sample_points(scn.chart, 30, scn.settings.seed);
    VeniceDoubleResult result = venice_double(c, PairingKind::symmetric, samples);
    worst_pairing = std::max(worst_pairing, result.compat_residual);
    for (const ParityEntry& entry : result.parity) {
      worst_parity = std::max(worst_parity, entry.dual_parity_residual);
      worst_explained = std::max(worst_explained, entry.doubling_explained_residual);
      if (!entry.doubles) ++flagged;  // odd j: expected failure, must be flagged
    }
  }
  out.require(worst_parity <= 1e-10, "dual parity " + fmt(worst_parity));
  out.require(worst_pairing <= 1e-12, "pairing compatibility " + fmt(worst_pairing));
  out.require(worst_explained <= 1e-7, "parity-explained doubling " + fmt(worst_explained));
  out.require(flagged > 0, "odd-degree doubling gaps flagged");
  out.detail << "parity " << fmt(worst_parity) << ", pairing " << fmt(worst_pairing) << ", "
             << flagged << " odd-degree gaps flagged";
  return out;
}

// --- criterion 8: calculus substrate ----------------------------------------------

Outcome criterion_substrate() {
  Outcome out;
  Rng rng(20260809);
  double dd = 0.0, leibniz = 0.0, graded = 0.0, gauge = 0.0, closed = 0.0, fd_res = 0.0;

  for (int trial = 0; trial < 20; ++trial) {
    const int n = rng.uniform_int(2, 3);
    ChartDomain box = ChartDomain::unit(n);

    // d^2 = 0
    testing::Rng trng(500 + trial);
    FormField w = testing::random_form_field(trng, n, trng.uniform_int(0, n - 2 < 0 ? 0 : n - 2), 2);
    Point x = random_point_in(box, rng);
    dd = std::max(dd, norm_inf(exterior_derivative(exterior_derivative_field(w.graded()), x)));

    // Leibniz
    const int p = trng.uniform_int(0, n - 1);
    const int q = trng.uniform_int(0, n - 1 - p < 0 ? 0 : n - 1 - p);
    FormField a = testing::random_form_field(trng, n, p, 2);
    FormField b = testing::random_form_field(trng, n, q, 2);
    FieldEvalContext ctx(x);
    PolyForm lhs = exterior_derivative(wedge(a.graded(), b.graded()), ctx);
    PolyForm rhs = add(wedge(exterior_derivative(a.graded(), ctx), eval_form(b.graded(), ctx)),
                       scale(Complex(p % 2 == 0 ? 1 : -1, 0),
                             wedge(eval_form(a.graded(), ctx),
                                   exterior_derivative(b.graded(), ctx))));
    leibniz = std::max(leibniz, norm_inf(sub(lhs, rhs)));

    // graded commutativity of the wedge on pointwise forms
    const int dp = trng.uniform_int(0, n);
    const int dq = trng.uniform_int(0, n - dp);
    PolyForm pa = testing::random_poly_form(trng, n, dp, 1);
    PolyForm pb = testing::random_poly_form(trng, n, dq, 1);
    const double sign = (dp * dq) % 2 == 0 ? 1.0 : -1.0;
    graded = std::max(graded,
                      norm_inf(sub(wedge(pa, pb), scale(Complex(sign, 0), wedge(pb, pa)))));

    // gauge invariance of ch
    std::vector<SmoothMatrixField> coeff;
    for (int k = 0; k < n; ++k) coeff.push_back(testing::random_poly_field(trng, n, 2, 2));
    Connection c(box, 2, std::move(coeff));
    SmoothMatrixField u = random_gauge(trng, n, 2);
    gauge = std::max(gauge, norm_inf(sub(chern_character(gauge_transform(c, u), x).form,
                                         chern_character(c, x).form)));

    // ch closedness with order-3 jets
    closed = std::max(closed, norm_inf(exterior_derivative(chern_field(c), x)));

    // jets against central finite differences
    SmoothMatrixField f = testing::random_composite_field(trng, n, 2);
    Point xf = random_point_in(box, rng, 0.8);
    MatrixJet jet = f.eval_jet(xf, 1);
    for (int k = 0; k < n; ++k)
      fd_res = std::max(
          fd_res, (jet.first(k) - testing::fd_partial(f, xf, k)).cwiseAbs().maxCoeff());
  }

  out.require(dd <= 1e-8, "d^2 " + fmt(dd));
  out.require(leibniz <= 1e-8, "Leibniz " + fmt(leibniz));
  out.require(graded <= 1e-8, "graded commutativity " + fmt(graded));
  out.require(gauge <= 1e-8, "gauge invariance " + fmt(gauge));
  out.require(closed <= 1e-8, "ch closedness " + fmt(closed));
  out.require(fd_res <= 1e-7, "jets vs finite differences " + fmt(fd_res));
  out.detail << "d^2 " << fmt(dd) << ", Leibniz " << fmt(leibniz) << ", gauge " << fmt(gauge)
             << ", d(ch) " << fmt(closed) << ", fd " << fmt(fd_res);
  return out;
}

// --- criterion 9: determinism -------------------------------------------------------

Outcome criterion_determinism() {
  Outcome out;
  const std::string dir = GAUGEKIT_SCENARIO_DIR;
  const std::vector<std::pair<std::string, std::string>> corpus = {
      {"x1_dx1", "flatten"},        {"abelian_vortex", "venice"},
      {"flat_rank2", "flatten"},    {"poly_n2_r2", "flatten"},
      {"trig_n3_r1", "flatten"},    {"so2_rotation", "flatten"},
      {"so3_trig", "flatten"},      {"sp2_traceless", "flatten"},
      {"x1_dx1", "ranks"},          {"abelian_vortex", "invert"},
  };
  for (const auto& [name, command] : corpus) {
    Scenario first = Scenario::load_file(dir + "/" + name + ".json");
    Scenario second = Scenario::load_file(dir + "/" + name + ".json");
    if (command == "invert") {
      first.settings.rk4_steps = 512;  // determinism, not accuracy, is under test
      second.settings.rk4_steps = 512;
    }
    const std::string once = run_command(command, first).emit_structured();
    const std::string twice = run_command(command, second).emit_structured();
    out.require(once == twice, name + "/" + command + " bytes differ");
  }

  // the CLI binary itself, end to end
  const std::string cli = GAUGEKIT_CLI_PATH;
  const std::string base =
      cli + " flatten --scenario " + dir + "/x1_dx1.json --format structured > ";
  int rc1 = std::system((base + "/tmp/gaugekit_det_1.json").c_str());
  int rc2 = std::system((base + "/tmp/gaugekit_det_2.json").c_str());
  out.require(rc1 == 0 && rc2 == 0, "CLI exit codes");
  std::ifstream f1("/tmp/gaugekit_det_1.json"), f2("/tmp/gaugekit_det_2.json");
  std::stringstream s1, s2;
  s1 << f1.rdbuf();
  s2 << f2.rdbuf();
  out.require(s1.str() == s2.str() && !s1.str().empty(), "CLI report bytes differ");
  out.detail << corpus.size() << " scenario/command pairs plus the CLI, byte-identical";
  return out;
}

}  // namespace

int main() {
  std::vector<Scenario> sweep = sweep_corpus();

  struct Entry {
    int id;
    const char* title;
    Outcome (*run)(const std::vector<Scenario>&);
    Outcome (*run0)();
  };
  const std::vector<Entry> criteria = {
      {1, "lemma certification (20 scenarios)", criterion_lemma, nullptr},
      {2, "rank formulas", nullptr, criterion_ranks},
      {3, "structured inverse", criterion_inverse, nullptr},
      {4, "trivial monodromy", criterion_monodromy, nullptr},
      {5, "Chern-Simons axioms", criterion_cs, nullptr},
      {6, "SO/Sp pipeline", nullptr, criterion_g_pipeline},
      {7, "dual parity and doubling", criterion_parity, nullptr},
      {8, "calculus substrate", nullptr, criterion_substrate},
      {9, "determinism", nullptr, criterion_determinism},
  };

  int failures = 0;
  for (const Entry& entry : criteria) {
    Outcome outcome;
    try {
      outcome = entry.run ? entry.run(sweep) : entry.run0();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail << " exception: " << e.what();
    }
    if (!outcome.pass) ++failures;
    std::printf("criterion %d: %-38s %s  [%s]\n", entry.id, entry.title,
                outcome.pass ? "PASS" : "FAIL", outcome.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("acceptance: %d/9 criteria passed\n", 9 - failures);
  return failures == 0 ? 0 : 1;
}
