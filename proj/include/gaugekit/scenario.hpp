#ifndef GAUGEKIT_SCENARIO_HPP
#define GAUGEKIT_SCENARIO_HPP

#include <optional>
#include <string>

#include "gaugekit/transport.hpp"

namespace gaugekit {

/// Knobs shared by every verification command. Tolerances not overridden
/// here take the documented defaults.
struct VerifySettings {
  int samples = 100;
  std::uint64_t seed = 1;
  int jet_order = 2;
  int quad_nodes = 8;
  int rk4_steps = 4096;
  std::map<std::string, double> tolerance_overrides;

  double tol(const std::string& name) const;
};

/// The default tolerance table, keyed by check-family name.
const std::map<std::string, double>& default_tolerances();

/// A scenario file: chart, connection entries as expression strings,
/// optional bilinear structure, optional odd form eta, optional explicit
/// loops, and verification settings.
class Scenario {
public:
  std::string name;
  ChartDomain chart{1, {{-1.0, 1.0}}};
  int rank = 1;
  std::vector<std::vector<Expr>> coeff_exprs;  // per coordinate, row-major r*r
  std::optional<BilinearStructure> structure;
  std::optional<FieldForm> eta;
  std::vector<PathSpec> explicit_loops;
  VerifySettings settings;

  Connection connection() const;
  /// Explicit loops if given, otherwise the seeded default family.
  std::vector<PathSpec> loops() const;

  static Scenario parse(const std::string& json_text);
  static Scenario load_file(const std::string& path);
};

struct CheckRecord {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  std::string comparison;  // "<=", ">=", ">", "info"
  bool pass = true;
  int samples = 0;
  double wall_ms = 0.0;
};

/// A command's result: one record per executed check.
struct Report {
  std::string command;
  std::string scenario;
  VerifySettings settings;
  std::vector<CheckRecord> checks;

  bool all_pass() const;
  /// Human-readable listing, including wall time.
  std::string emit_text() const;
  /// Machine-readable JSON: stable ordering, no timing, byte-identical for
  /// identical scenario and seed.
  std::string emit_structured() const;
};

/// Commands: flatten, invert, g-invert, venice, holonomy, verify, ranks.
/// Throws ShapeError for unknown commands or missing scenario sections.
Report run_command(const std::string& command, const Scenario& scenario);

}  // namespace gaugekit

#endif
