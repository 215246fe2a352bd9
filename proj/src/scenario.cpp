#include "gaugekit/scenario.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include "gaugekit/random.hpp"
#include "json.hpp"

namespace gaugekit {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Settings and tolerances
// ---------------------------------------------------------------------------

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> table = {
      {"lemma_identity", 1e-9},
      {"g_inverse_column", 1e-10},
      {"det_g_min", 1e-8},
      {"pair_identity", 1e-10},
      {"pair_positivity", 0.0},
      {"h_positivity", 0.0},
      {"top_block", 1e-9},
      {"flatness", 1e-7},
      {"ch_cancellation", 1e-7},
      {"ch_degree0", 0.0},
      {"ss_block", 1e-8},
      {"ss_ch", 1e-7},
      {"monodromy", 1e-6},
      {"transporter_certificate", 1e-6},
      {"convergence_low", 12.0},
      {"convergence_high", 20.0},
      {"cs_self_zero", 0.0},
      {"cs_transgression", 1e-8},
      {"cs_functoriality", 1e-8},
      {"parallel_compat", 1e-9},
      {"g_inverse_compat", 1e-9},
      {"total_ch_positive", 1e-7},
      {"total_ch_degree0", 0.0},
      {"structure_nondegenerate", 1e-10},
      {"holonomy_group", 1e-6},
      {"holonomy_det_one", 1e-6},
      {"reversal", 1e-8},
      {"composition", 1e-9},
      {"dual_parity", 1e-10},
      {"pairing_identity", 1e-12},
      {"venice_residual", 1e-9},
      {"doubling_explained", 1e-7},
      {"d_squared", 1e-10},
      {"leibniz", 1e-9},
      {"wedge_assoc", 1e-12},
      {"gauge_invariance", 1e-9},
      {"ch_closed", 1e-8},
      {"jet_vs_fd", 1e-7},
      {"ranks_consistency", 0.0},
  };
  return table;
}

double VerifySettings::tol(const std::string& name) const {
  auto it = tolerance_overrides.find(name);
  if (it != tolerance_overrides.end()) return it->second;
  auto def = default_tolerances().find(name);
  if (def == default_tolerances().end())
    throw ShapeError("VerifySettings: unknown tolerance '" + name + "'");
  return def->second;
}

// ---------------------------------------------------------------------------
// Scenario parsing
// ---------------------------------------------------------------------------

namespace {

Complex parse_complex_entry(const json& v, int dimension) {
  if (v.is_number()) return Complex(v.get<double>(), 0.0);
  if (v.is_array()) {
    if (v.size() != 2 || !v[0].is_number() || !v[1].is_number())
      throw ShapeError("scenario: complex entries must be [re, im]");
    return Complex(v[0].get<double>(), v[1].get<double>());
  }
  if (v.is_string()) {
    Expr e = Expr::parse(v.get<std::string>(), dimension);
    if (e.max_coordinate() >= 0)
      throw ShapeError("scenario: constant entry contains a coordinate");
    return e.value(Point::Zero(dimension));
  }
  throw ShapeError("scenario: bad complex entry");
}

PathSpec parse_loop(const json& v, const ChartDomain& chart) {
  const int n = chart.dimension();
  const std::string kind = v.at("kind").get<std::string>();
  if (kind == "parametric") {
    std::vector<Expr> coords;
    for (const auto& s : v.at("coords")) coords.push_back(Expr::parse(s.get<std::string>(), 1));
    if (static_cast<int>(coords.size()) != n)
      throw ShapeError("scenario: parametric loop needs one coordinate per dimension");
    return PathSpec::from_exprs(n, std::move(coords));
  }
  Point center(n);
  const auto& c = v.at("center");
  if (static_cast<int>(c.size()) != n) throw ShapeError("scenario: loop center size mismatch");
  for (int k = 0; k < n; ++k) center[k] = c[k].get<double>();
  int axis_a = 0, axis_b = 1;
  if (v.contains("axes")) {
    axis_a = v["axes"][0].get<int>() - 1;  // axes are 1-based, like x1..xn
    axis_b = v["axes"][1].get<int>() - 1;
  }
  if (kind == "circle")
    return PathSpec::circle(center, axis_a, axis_b, v.at("radius").get<double>());
  if (kind == "rectangle") {
    const auto& hw = v.at("half_widths");
    return PathSpec::rectangle(center, axis_a, axis_b, hw[0].get<double>(),
                               hw[1].get<double>());
  }
  throw ShapeError("scenario: unknown loop kind '" + kind + "'");
}

}  // namespace

Scenario Scenario::parse(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& err) {
    throw ParseError(std::string("scenario: ") + err.what(), 0);
  }

  Scenario scn;
  scn.name = root.value("name", std::string("unnamed"));

  const auto& chart = root.at("chart");
  const int n = chart.at("dimension").get<int>();
  std::vector<std::pair<double, double>> bounds;
  for (const auto& b : chart.at("bounds"))
    bounds.emplace_back(b[0].get<double>(), b[1].get<double>());
  scn.chart = ChartDomain(n, std::move(bounds));

  scn.rank = root.at("rank").get<int>();
  const auto& conn = root.at("connection");
  if (static_cast<int>(conn.size()) != n)
    throw ShapeError("scenario: expected one coefficient matrix per coordinate");
  for (const auto& mat : conn) {
    if (static_cast<int>(mat.size()) != scn.rank * scn.rank)
      throw ShapeError("scenario: coefficient matrices are row-major lists of rank^2 entries");
    std::vector<Expr> entries;
    for (const auto& s : mat) entries.push_back(Expr::parse(s.get<std::string>(), n));
    scn.coeff_exprs.push_back(std::move(entries));
  }

  if (root.contains("structure")) {
    const auto& s = root["structure"];
    const std::string kind_name = s.at("kind").get<std::string>();
    PairingKind kind;
    if (kind_name == "symmetric")
      kind = PairingKind::symmetric;
    else if (kind_name == "antisymmetric")
      kind = PairingKind::antisymmetric;
    else
      throw ShapeError("scenario: structure kind must be symmetric or antisymmetric");
    const auto& rows = s.at("matrix");
    const int m = static_cast<int>(rows.size());
    Matrix phi(m, m);
    for (int i = 0; i < m; ++i) {
      if (static_cast<int>(rows[i].size()) != m)
        throw ShapeError("scenario: structure matrix must be square");
      for (int j = 0; j < m; ++j) phi(i, j) = parse_complex_entry(rows[i][j], n);
    }
    scn.structure = BilinearStructure::make(kind, std::move(phi));
  }

  if (root.contains("eta")) {
    FieldForm eta(n, 1, 1);
    for (const auto& term : root["eta"]) {
      IndexTuple idx;
      for (const auto& i : term.at("indices")) idx.push_back(i.get<int>() - 1);
      eta.accumulate(idx,
                     SmoothMatrixField::from_expr(
                         Expr::parse(term.at("entry").get<std::string>(), n)));
    }
    for (int p : eta.degrees())
      if (p % 2 == 0) throw ShapeError("scenario: eta must have odd degrees only");
    scn.eta = std::move(eta);
  }

  if (root.contains("loops"))
    for (const auto& loop : root["loops"]) scn.explicit_loops.push_back(parse_loop(loop, scn.chart));

  if (root.contains("settings")) {
    const auto& s = root["settings"];
    scn.settings.samples = s.value("samples", scn.settings.samples);
    scn.settings.seed = s.value("seed", scn.settings.seed);
    scn.settings.jet_order = s.value("jet_order", scn.settings.jet_order);
    scn.settings.quad_nodes = s.value("quad_nodes", scn.settings.quad_nodes);
    scn.settings.rk4_steps = s.value("rk4_steps", scn.settings.rk4_steps);
    if (s.contains("tolerances"))
      for (const auto& [key, value] : s["tolerances"].items()) {
        if (!default_tolerances().count(key))
          throw ShapeError("scenario: unknown tolerance '" + key + "'");
        scn.settings.tolerance_overrides[key] = value.get<double>();
      }
  }
  return scn;
}

Scenario Scenario::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("scenario: cannot open '" + path + "'", 0);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  Scenario scn = parse(buffer.str());
  if (scn.name == "unnamed") {
    // fall back to the file stem
    const auto slash = path.find_last_of('/');
    std::string stem = slash == std::string::npos ? path : path.substr(slash + 1);
    const auto dot = stem.find_last_of('.');
    scn.name = dot == std::string::npos ? stem : stem.substr(0, dot);
  }
  return scn;
}

Connection Scenario::connection() const {
  std::vector<SmoothMatrixField> coeff;
  coeff.reserve(coeff_exprs.size());
  for (const auto& entries : coeff_exprs)
    coeff.push_back(SmoothMatrixField::from_grid(rank, rank, entries));
  return Connection(chart, rank, std::move(coeff));
}

std::vector<PathSpec> Scenario::loops() const {
  if (!explicit_loops.empty()) return explicit_loops;
  return loop_family(chart, settings.seed);
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

bool Report::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

namespace {

std::string format_value(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

}  // namespace

std::string Report::emit_text() const {
  std::ostringstream os;
  os << "gaugekit " << command << " — scenario '" << scenario << "'\n";
  os << "settings: samples=" << settings.samples << " seed=" << settings.seed
     << " jet-order=" << settings.jet_order << " quad-nodes=" << settings.quad_nodes
     << " rk4-steps=" << settings.rk4_steps << "\n";
  if (!settings.tolerance_overrides.empty()) {
    os << "tolerance overrides:";
    for (const auto& [k, v] : settings.tolerance_overrides) os << " " << k << "=" << v;
    os << "\n";
  }
  os << "defaults: per-check bounds below; the full table is in `gaugekit --help`\n";
  int passed = 0;
  for (const auto& c : checks) passed += c.pass ? 1 : 0;
  std::vector<CheckRecord> sorted = checks;
  std::sort(sorted.begin(), sorted.end(),
            [](const CheckRecord& a, const CheckRecord& b) { return a.name < b.name; });
  for (const auto& c : sorted) {
    os << (c.pass ? "  [PASS] " : "  [FAIL] ") << c.name;
    for (std::size_t pad = c.name.size(); pad < 44; ++pad) os << ' ';
    os << " value=" << format_value(c.value);
    if (c.comparison == "info")
      os << "  (informational)";
    else
      os << "  bound" << c.comparison << format_value(c.tolerance);
    os << "  samples=" << c.samples << "  " << format_value(c.wall_ms) << "ms\n";
  }
  os << "result: " << (all_pass() ? "PASS" : "FAIL") << " (" << passed << "/" << checks.size()
     << ")\n";
  return os.str();
}

std::string Report::emit_structured() const {
  json root;
  root["command"] = command;
  root["scenario"] = scenario;
  json s;
  s["samples"] = settings.samples;
  s["seed"] = settings.seed;
  s["jet_order"] = settings.jet_order;
  s["quad_nodes"] = settings.quad_nodes;
  s["rk4_steps"] = settings.rk4_steps;
  json tols;
  for (const auto& [k, v] : default_tolerances()) {
    auto it = settings.tolerance_overrides.find(k);
    tols[k] = it == settings.tolerance_overrides.end() ? v : it->second;
  }
  s["tolerances"] = tols;
  root["settings"] = s;

  std::vector<CheckRecord> sorted = checks;
  std::sort(sorted.begin(), sorted.end(),
            [](const CheckRecord& a, const CheckRecord& b) { return a.name < b.name; });
  json list = json::array();
  for (const auto& c : sorted) {
    json rec;
    rec["name"] = c.name;
    rec["value"] = c.value;
    rec["comparison"] = c.comparison;
    if (c.comparison != "info") rec["tolerance"] = c.tolerance;
    rec["pass"] = c.pass;
    rec["samples"] = c.samples;
    list.push_back(rec);
  }
  root["checks"] = list;
  root["pass"] = all_pass();
  return root.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Runner
// ---------------------------------------------------------------------------

namespace {

class CheckList {
public:
  CheckList(const VerifySettings& settings, int samples)
      : settings_(settings), samples_(samples) {
    mark();
  }

  void mark() { last_ = std::chrono::steady_clock::now(); }

  void leq(const std::string& name, double value, const std::string& tol_name) {
    push(name, value, settings_.tol(tol_name), "<=", value <= settings_.tol(tol_name));
  }
  void geq(const std::string& name, double value, const std::string& tol_name) {
    push(name, value, settings_.tol(tol_name), ">=", value >= settings_.tol(tol_name));
  }
  void gt(const std::string& name, double value, const std::string& tol_name) {
    push(name, value, settings_.tol(tol_name), ">", value > settings_.tol(tol_name));
  }
  void info(const std::string& name, double value) { push(name, value, 0.0, "info", true); }
  void fail(const std::string& name, double value, const std::string& tol_name) {
    push(name, value, settings_.tol(tol_name), "<=", false);
  }

  std::vector<CheckRecord> take() { return std::move(records_); }

private:
  void push(const std::string& name, double value, double tol, const char* cmp, bool pass) {
    const auto now = std::chrono::steady_clock::now();
    const double ms = std::chrono::duration<double, std::milli>(now - last_).count();
    last_ = now;
    records_.push_back(CheckRecord{name, value, tol, cmp, pass, samples_, ms});
  }

  const VerifySettings& settings_;
  int samples_;
  std::chrono::steady_clock::time_point last_;
  std::vector<CheckRecord> records_;
};

std::vector<Point> scenario_samples(const Scenario& scn) {
  return sample_points(scn.chart, scn.settings.samples, scn.settings.seed);
}

void run_flatten_checks(const Scenario& scn, CheckList& out) {
  Connection c = scn.connection();
  std::vector<Point> samples = scenario_samples(scn);
  FlatPresentation fp = flatten(c);
  FlatCheckReport report = verify_flat_presentation(fp, samples);
  out.leq("flatten.lemma_identity", report.lemma_residual, "lemma_identity");
  out.leq("flatten.inverse_column", report.column_residual, "g_inverse_column");
  out.geq("flatten.det_g", report.min_abs_det, "det_g_min");
  out.leq("flatten.pair_identity", report.pair_residual, "pair_identity");
  out.gt("flatten.pair_positivity", report.min_pair_eig, "pair_positivity");
  out.gt("flatten.h_positivity", report.min_h, "h_positivity");
  out.leq("flatten.top_block", report.top_block_residual, "top_block");
  out.leq("flatten.flatness", report.flatness_residual, "flatness");
}

// Step-halving order certification. Successive transport differences must
// shrink ~16x; loops whose leading error coefficient cancels (symmetric
// fields, palindromic paths) shrink faster, so the certification searches
// the loop family for a nondegenerate ladder. Faster-than-window
// convergence everywhere is reported informationally, slower fails.
void add_convergence_checks(const Connection& c, std::span<const PathSpec> loops,
                            const std::string& prefix, CheckList& out) {
  double global_min_ratio = std::numeric_limits<double>::infinity();
  bool any_measured = false;
  const std::size_t scan = std::min<std::size_t>(loops.size(), 3);
  for (std::size_t li = 0; li < scan; ++li) {
    for (int base : {64, 128}) {
      std::vector<Matrix> h;
      for (int level = 0; level < 5; ++level)
        h.push_back(transport(c, loops[li], base << level));
      std::vector<double> diffs;
      for (int level = 0; level + 1 < 5; ++level)
        diffs.push_back((h[level + 1] - h[level]).cwiseAbs().maxCoeff());
      double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
      bool measurable = true;
      for (std::size_t i = 0; i + 1 < diffs.size(); ++i) {
        if (diffs[i + 1] < 1e-12) {
          measurable = false;
          break;
        }
        const double ratio = diffs[i] / diffs[i + 1];
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
      }
      if (!measurable) continue;
      any_measured = true;
      global_min_ratio = std::min(global_min_ratio, lo);
      if (lo >= 12.0 && hi <= 20.0) {
        out.geq(prefix + ".convergence_ratio_min", lo, "convergence_low");
        out.leq(prefix + ".convergence_ratio_max", hi, "convergence_high");
        return;
      }
    }
  }
  if (!any_measured) {
    out.info(prefix + ".convergence_below_floor", 0.0);
  } else if (global_min_ratio >= 12.0) {
    // every measured ladder shrank at least 16x per halving somewhere above
    // the window: the leading coefficient degenerates on this family
    out.info(prefix + ".convergence_order_exceeds_window", global_min_ratio);
  } else {
    out.geq(prefix + ".convergence_ratio_min", global_min_ratio, "convergence_low");
  }
}

void run_invert_checks(const Scenario& scn, CheckList& out, bool with_monodromy) {
  Connection c = scn.connection();
  std::vector<Point> samples = scenario_samples(scn);
  InversePair ip = structured_inverse(c);
  InverseCheckReport report = verify_inverse_pair(ip, samples);
  out.leq("invert.flatness", report.flatness_residual, "flatness");
  out.leq("invert.ch_cancellation", report.ch_positive_residual, "ch_cancellation");
  out.leq("invert.ch_degree0", report.ch_degree0_error, "ch_degree0");
  out.leq("invert.ss_block_v", report.ss.block_residual_v, "ss_block");
  out.leq("invert.ss_block_w", report.ss.block_residual_w, "ss_block");
  out.leq("invert.ss_ch", report.ss.ch_residual, "ss_ch");
  if (!with_monodromy) return;
  std::vector<PathSpec> loops = scn.loops();
  std::vector<HolonomyReport> reports =
      monodromy_check(ip.presentation, loops, scn.settings.rk4_steps);
  double identity = 0.0, transporter = 0.0;
  for (const auto& r : reports) {
    identity = std::max(identity, r.residuals.at("identity"));
    transporter = std::max(transporter, r.residuals.at("transporter"));
  }
  out.leq("invert.monodromy", identity, "monodromy");
  out.leq("invert.transporter", transporter, "transporter_certificate");
  add_convergence_checks(ip.ambient, loops, "invert", out);
}

void run_g_invert_checks(const Scenario& scn, CheckList& out) {
  if (!scn.structure) throw ShapeError("g-invert: scenario has no structure section");
  Connection c = scn.connection();
  std::vector<Point> samples = scenario_samples(scn);
  GInverseResult result = g_structured_inverse(c, *scn.structure, samples,
                                               scn.settings.tol("parallel_compat"));
  out.leq("g_invert.input_compat", result.report.input_compat, "parallel_compat");
  out.leq("g_invert.inverse_compat", result.report.inverse_compat, "g_inverse_compat");
  out.leq("g_invert.total_ch_positive", result.report.ch_positive_residual,
          "total_ch_positive");
  out.leq("g_invert.total_ch_degree0", result.report.ch_degree0_error, "total_ch_degree0");
  out.geq("g_invert.structure_nondegenerate", result.report.total_structure_min_sv,
          "structure_nondegenerate");
  out.info("g_invert.inverse_rank", result.inverse_conn.rank());

  // holonomy of the input and of the inverse against their structures
  const HolonomyGroup group =
      scn.structure->kind() == PairingKind::symmetric ? HolonomyGroup::SO : HolonomyGroup::Sp;
  double input_phi = 0.0, input_det = 0.0, inverse_phi = 0.0, inverse_det = 0.0;
  for (const PathSpec& loop : scn.loops()) {
    Matrix h_in = transport(c, loop, scn.settings.rk4_steps);
    HolonomyReport in_report = group_membership(h_in, scn.structure, group);
    input_phi = std::max(input_phi, in_report.residuals.at("phi_invariance"));
    if (group == HolonomyGroup::SO)
      input_det = std::max(input_det, in_report.residuals.at("det_one"));
    Matrix h_inv = transport(result.inverse_conn, loop, scn.settings.rk4_steps);
    HolonomyReport inv_report =
        group_membership(h_inv, std::optional<BilinearStructure>(result.structure), group);
    inverse_phi = std::max(inverse_phi, inv_report.residuals.at("phi_invariance"));
    if (group == HolonomyGroup::SO)
      inverse_det = std::max(inverse_det, inv_report.residuals.at("det_one"));
  }
  out.leq("g_invert.holonomy_input_phi", input_phi, "holonomy_group");
  out.leq("g_invert.holonomy_inverse_phi", inverse_phi, "holonomy_group");
  if (group == HolonomyGroup::SO) {
    out.leq("g_invert.holonomy_input_det", input_det, "holonomy_det_one");
    out.leq("g_invert.holonomy_inverse_det", inverse_det, "holonomy_det_one");
  }
}

void run_venice_checks(const Scenario& scn, CheckList& out) {
  Connection c = scn.connection();
  std::vector<Point> samples = scenario_samples(scn);
  if (scn.eta) {
    VeniceReport report = venice_verify(c, *scn.eta, samples);
    for (const auto& [degree, residual] : report.residual_by_degree)
      out.leq("venice.residual_deg" + std::to_string(degree), residual, "venice_residual");
  }
  const PairingKind kind =
      scn.structure ? scn.structure->kind() : PairingKind::symmetric;
  VeniceDoubleResult doubled = venice_double(c, kind, samples);
  out.leq("venice.pairing_compat", doubled.compat_residual, "pairing_identity");
  for (const ParityEntry& entry : doubled.parity) {
    const std::string suffix = "_deg" + std::to_string(entry.form_degree);
    out.leq("venice.dual_parity" + suffix, entry.dual_parity_residual, "dual_parity");
    out.leq("venice.doubling_explained" + suffix, entry.doubling_explained_residual,
            "doubling_explained");
    if (entry.doubles)
      out.leq("venice.doubling" + suffix, entry.doubling_residual, "doubling_explained");
    else
      out.info("venice.doubling_gap_flagged" + suffix, entry.doubling_residual);
  }
}

void run_holonomy_checks(const Scenario& scn, CheckList& out) {
  Connection c = scn.connection();
  std::vector<PathSpec> loops = scn.loops();
  const HolonomyGroup group = !scn.structure                  ? HolonomyGroup::GL
                              : scn.structure->kind() == PairingKind::symmetric
                                  ? HolonomyGroup::SO
                                  : HolonomyGroup::Sp;
  double min_abs_det = std::numeric_limits<double>::infinity();
  double phi_res = 0.0, det_res = 0.0;
  for (const PathSpec& loop : loops) {
    Matrix h = transport(c, loop, scn.settings.rk4_steps);
    HolonomyReport report = group_membership(h, scn.structure, group);
    min_abs_det = std::min(min_abs_det, report.residuals.at("abs_det"));
    if (report.residuals.count("phi_invariance"))
      phi_res = std::max(phi_res, report.residuals.at("phi_invariance"));
    if (report.residuals.count("det_one"))
      det_res = std::max(det_res, report.residuals.at("det_one"));
  }
  out.info("holonomy.min_abs_det", min_abs_det);
  if (group != HolonomyGroup::GL) out.leq("holonomy.phi_invariance", phi_res, "holonomy_group");
  if (group == HolonomyGroup::SO) out.leq("holonomy.det_one", det_res, "holonomy_det_one");

  // reversal and composition invariants on the first loop
  const PathSpec& loop = loops.front();
  Matrix h = transport(c, loop, scn.settings.rk4_steps);
  Matrix h_rev = transport(c, loop.reversed(), scn.settings.rk4_steps);
  out.leq("holonomy.reversal", (h_rev * h - Matrix::Identity(c.rank(), c.rank()))
                                   .cwiseAbs()
                                   .maxCoeff(),
          "reversal");
  add_convergence_checks(c, loops, "holonomy", out);
}

// the substrate battery: calculus invariants on seeded random inputs
void run_substrate_checks(const Scenario& scn, CheckList& out) {
  const int n = scn.chart.dimension();
  const int trials = 20;
  Rng rng(scn.settings.seed * 7919 + 13);
  Connection c = scn.connection();
  std::vector<Point> samples = scenario_samples(scn);
  const std::vector<Point> few(samples.begin(),
                               samples.begin() + std::min<std::size_t>(samples.size(), 5));

  // d(d(w)) = 0
  double dd = 0.0;
  for (int t = 0; t < trials; ++t) {
    const int degree = rng.uniform_int(0, std::max(0, n - 2));
    FormField w(n, degree, 2, 2);
    IndexTuple idx;
    auto rec = [&](auto&& self, int start) -> void {
      if (static_cast<int>(idx.size()) == degree) {
        w.set(idx, random_poly_field(rng, n, 2, 2));
        return;
      }
      for (int v = start; v < n; ++v) {
        idx.push_back(v);
        self(self, v + 1);
        idx.pop_back();
      }
    };
    rec(rec, 0);
    Point x = random_point_in(scn.chart, rng);
    dd = std::max(dd, norm_inf(exterior_derivative(exterior_derivative_field(w.graded()), x)));
  }
  out.leq("substrate.d_squared", dd, "d_squared");

  // Leibniz rule d(a^b) = da^b + (-1)^p a^db on field forms
  double leibniz = 0.0;
  for (int t = 0; t < trials; ++t) {
    const int p = rng.uniform_int(0, std::max(0, n - 1));
    const int q = rng.uniform_int(0, std::max(0, n - 1 - p));
    FieldForm a(n, 2, 2), b(n, 2, 2);
    auto fill = [&](FieldForm& dst, int degree) {
      IndexTuple idx;
      auto rec = [&](auto&& self, int start) -> void {
        if (static_cast<int>(idx.size()) == degree) {
          dst.set(idx, random_poly_field(rng, n, 2, 2));
          return;
        }
        for (int v = start; v < n; ++v) {
          idx.push_back(v);
          self(self, v + 1);
          idx.pop_back();
        }
      };
      rec(rec, 0);
    };
    fill(a, p);
    fill(b, q);
    Point x = random_point_in(scn.chart, rng);
    PolyForm lhs = exterior_derivative(wedge(a, b), x);
    FieldEvalContext ctx(x);
    PolyForm rhs = add(wedge(exterior_derivative(a, ctx), eval_form(b, ctx)),
                       scale(Complex(p % 2 == 0 ? 1 : -1, 0),
                             wedge(eval_form(a, ctx), exterior_derivative(b, ctx))));
    leibniz = std::max(leibniz, norm_inf(sub(lhs, rhs)));
  }
  out.leq("substrate.leibniz", leibniz, "leibniz");

  // wedge associativity on random pointwise forms
  double assoc = 0.0;
  for (int t = 0; t < trials; ++t) {
    PolyForm a(n, 2, 2), b(n, 2, 2), cform(n, 2, 2);
    for (PolyForm* f : {&a, &b, &cform}) {
      const int degree = rng.uniform_int(0, std::min(2, n));
      IndexTuple idx;
      auto rec = [&](auto&& self, int start) -> void {
        if (static_cast<int>(idx.size()) == degree) {
          Matrix m(2, 2);
          for (int i = 0; i < 4; ++i) m(i / 2, i % 2) = rng.complex_coeff(1.0);
          f->set(idx, m);
          return;
        }
        for (int v = start; v < n; ++v) {
          idx.push_back(v);
          self(self, v + 1);
          idx.pop_back();
        }
      };
      rec(rec, 0);
    }
    assoc = std::max(assoc, norm_inf(sub(wedge(wedge(a, b), cform), wedge(a, wedge(b, cform)))));
  }
  out.leq("substrate.wedge_assoc", assoc, "wedge_assoc");

  // gauge invariance of ch on the scenario connection
  double gauge = 0.0;
  for (int t = 0; t < 5; ++t) {
    SmoothMatrixField u = random_gauge(rng, n, c.rank());
    Connection cu = gauge_transform(c, u);
    for (const Point& x : few)
      gauge = std::max(
          gauge, norm_inf(sub(chern_character(cu, x).form, chern_character(c, x).form)));
  }
  out.leq("substrate.gauge_invariance", gauge, "gauge_invariance");

  // jet first partials against central finite differences
  double fd_res = 0.0;
  for (int t = 0; t < trials; ++t) {
    SmoothMatrixField f = random_composite_field(rng, n, 2);
    Point x = random_point_in(scn.chart, rng, 0.8);
    MatrixJet jet = f.eval_jet(x, 1);
    for (int k = 0; k < n; ++k) {
      Point xp = x, xm = x;
      xp[k] += 1e-5;
      xm[k] -= 1e-5;
      Matrix fd = (f.value(xp) - f.value(xm)) / 2e-5;
      fd_res = std::max(fd_res, (jet.first(k) - fd).cwiseAbs().maxCoeff());
    }
  }
  out.leq("substrate.jet_vs_fd", fd_res, "jet_vs_fd");

  // ch closedness needs order-3 jets of the coefficients
  if (scn.settings.jet_order >= 3) {
    double closed = 0.0;
    FieldForm ch = chern_field(c);
    for (const Point& x : few) closed = std::max(closed, norm_inf(exterior_derivative(ch, x)));
    out.leq("substrate.ch_closed", closed, "ch_closed");
  }
}

void run_cs_checks(const Scenario& scn, CheckList& out) {
  Connection c = scn.connection();
  Connection trivial = Connection::flat(scn.chart, scn.rank);
  std::vector<Point> samples = scenario_samples(scn);
  const std::vector<Point> few(samples.begin(),
                               samples.begin() + std::min<std::size_t>(samples.size(), 10));

  // CS(c, c) = 0 exactly
  double self_zero = 0.0;
  for (const Point& x : few)
    self_zero = std::max(self_zero, norm_inf(cs_form(c, c, x, scn.settings.quad_nodes).form));
  out.leq("cs.self_zero", self_zero, "cs_self_zero");

  // transgression: d CS(c, trivial) = ch(c) - ch(trivial)
  FieldForm cs = cs_field(trivial, c, scn.settings.quad_nodes);
  double residual = 0.0;
  for (const Point& x : few) {
    FieldEvalContext ctx(x);
    PolyForm dcs = exterior_derivative(cs, ctx);
    PolyForm expected = sub(chern_character(c, ctx).form, chern_character(trivial, ctx).form);
    residual = std::max(residual, norm_inf(sub(dcs, expected)));
  }
  out.leq("cs.transgression", residual, "cs_transgression");

  // functoriality at the d level under an affine pullback
  const int n = scn.chart.dimension();
  Rng rng(scn.settings.seed * 31 + 5);
  RealMatrix jac = 0.5 * RealMatrix::Identity(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) jac(i, j) += 0.1 * rng.uniform(-1, 1);
  Point offset = 0.05 * Point::Ones(n);
  // shrink until the image of the chart stays inside the chart
  for (int guard = 0; guard < 60; ++guard) {
    bool inside = true;
    for (int corner = 0; corner < (1 << n); ++corner) {
      Point y(n);
      for (int k = 0; k < n; ++k)
        y[k] = (corner >> k) & 1 ? scn.chart.upper(k) : scn.chart.lower(k);
      if (!scn.chart.contains(jac * y + offset)) inside = false;
    }
    if (inside) break;
    jac *= 0.8;
    offset *= 0.8;
  }
  AffineMap map{jac, offset};
  Connection pulled_c = pullback(map, c, scn.chart);
  Connection pulled_trivial = pullback(map, trivial, scn.chart);
  FieldForm cs_pulled = cs_field(pulled_trivial, pulled_c, scn.settings.quad_nodes);
  double functoriality = 0.0;
  for (const Point& y : few) {
    PolyForm lhs = exterior_derivative(cs_pulled, y);
    Point x = jac * y + offset;
    PolyForm rhs = pullback_values(exterior_derivative(cs, x), jac);
    functoriality = std::max(functoriality, norm_inf(sub(lhs, rhs)));
  }
  out.leq("cs.functoriality_d_level", functoriality, "cs_functoriality");
}

void run_ranks_checks(const Scenario& scn, CheckList& out) {
  RankCheck rc = rank_check(scn.chart.dimension(), scn.rank);
  out.info("ranks.lemma_rank", static_cast<double>(rc.lemma_rank));
  out.info("ranks.proposition_rank", static_cast<double>(rc.proposition_rank));
  int failures = 0;
  for (long n = 1; n <= 10; ++n)
    for (long r = 1; r <= 10; ++r)
      if (!rank_check(n, r).consistent) ++failures;
  out.leq("ranks.consistency_grid_1_10", static_cast<double>(failures), "ranks_consistency");
}

}  // namespace

Report run_command(const std::string& command, const Scenario& scenario) {
  Report report;
  report.command = command;
  report.scenario = scenario.name;
  report.settings = scenario.settings;
  CheckList list(scenario.settings, scenario.settings.samples);

  if (command == "flatten") {
    run_flatten_checks(scenario, list);
  } else if (command == "invert") {
    run_invert_checks(scenario, list, true);
  } else if (command == "g-invert") {
    run_g_invert_checks(scenario, list);
  } else if (command == "venice") {
    run_venice_checks(scenario, list);
  } else if (command == "holonomy") {
    run_holonomy_checks(scenario, list);
  } else if (command == "ranks") {
    run_ranks_checks(scenario, list);
  } else if (command == "verify") {
    run_flatten_checks(scenario, list);
    run_invert_checks(scenario, list, true);
    if (scenario.structure) run_g_invert_checks(scenario, list);
    run_venice_checks(scenario, list);
    run_holonomy_checks(scenario, list);
    run_cs_checks(scenario, list);
    run_substrate_checks(scenario, list);
    run_ranks_checks(scenario, list);
  } else {
    throw ShapeError("run_command: unknown command '" + command + "'");
  }
  report.checks = list.take();
  return report;
}

}  // namespace gaugekit
