#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gaugekit/scenario.hpp"

namespace {

struct CliOptions {
  std::string scenario_path;
  long n = 0, r = 0;  // ranks command without a scenario file
  int samples = -1;
  long long seed = -1;
  int jet_order = -1;
  int quad_nodes = -1;
  int rk4_steps = -1;
  std::vector<std::string> tolerances;
  std::string format = "text";
};

void apply_overrides(gaugekit::Scenario& scn, const CliOptions& opt) {
  if (opt.samples > 0) scn.settings.samples = opt.samples;
  if (opt.seed >= 0) scn.settings.seed = static_cast<std::uint64_t>(opt.seed);
  if (opt.jet_order > 0) scn.settings.jet_order = opt.jet_order;
  if (opt.quad_nodes > 0) scn.settings.quad_nodes = opt.quad_nodes;
  if (opt.rk4_steps > 0) scn.settings.rk4_steps = opt.rk4_steps;
  for (const std::string& spec : opt.tolerances) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos)
      throw gaugekit::ShapeError("--tol expects NAME=VALUE, got '" + spec + "'");
    const std::string name = spec.substr(0, eq);
    if (!gaugekit::default_tolerances().count(name))
      throw gaugekit::ShapeError("unknown tolerance '" + name + "'");
    scn.settings.tolerance_overrides[name] = std::stod(spec.substr(eq + 1));
  }
}

int run(const std::string& command, const CliOptions& opt) {
  gaugekit::Scenario scn;
  if (!opt.scenario_path.empty()) {
    scn = gaugekit::Scenario::load_file(opt.scenario_path);
  } else if (command == "ranks" && opt.n > 0 && opt.r > 0) {
    // synthesize a minimal scenario carrying just (n, r)
    scn.name = "ranks";
    scn.chart = gaugekit::ChartDomain::unit(static_cast<int>(opt.n));
    scn.rank = static_cast<int>(opt.r);
    for (int k = 0; k < scn.chart.dimension(); ++k)
      scn.coeff_exprs.emplace_back(scn.rank * scn.rank,
                                   gaugekit::Expr::literal(gaugekit::Complex(0, 0)));
  } else {
    std::cerr << "error: --scenario is required"
              << (command == "ranks" ? " (or --n and --r)" : "") << "\n";
    return 2;
  }
  apply_overrides(scn, opt);

  gaugekit::Report report = gaugekit::run_command(command, scn);
  if (opt.format == "structured")
    std::cout << report.emit_structured();
  else
    std::cout << report.emit_text();
  return report.all_pass() ? 0 : 1;
}

}  // namespace

std::string tolerance_footer() {
  std::string out = "Tolerance defaults (override with --tol NAME=VALUE):\n";
  std::string line;
  for (const auto& [name, value] : gaugekit::default_tolerances()) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "  %-26s %g", name.c_str(), value);
    out += buf;
    out += "\n";
  }
  return out;
}

int main(int argc, char** argv) {
  CLI::App app{"gaugekit — numerical gauge calculus on chart domains:\n"
               "connection flattening, structured inverses, Chern/Chern-Simons forms,\n"
               "holonomy and monodromy certification"};
  app.require_subcommand(1);
  app.footer(tolerance_footer());

  CliOptions opt;
  const std::vector<std::string> commands = {"flatten",  "invert", "g-invert", "venice",
                                             "holonomy", "verify", "ranks"};
  const std::map<std::string, std::string> descriptions = {
      {"flatten", "certify the connection-flattening construction"},
      {"invert", "structured inverse: flat ambient, ch cancellation, monodromy"},
      {"g-invert", "SO/Sp-structured inverse pipeline"},
      {"venice", "Chern-character difference checks and the doubling parity report"},
      {"holonomy", "parallel-transport suite on the scenario connection"},
      {"verify", "the full invariant battery"},
      {"ranks", "ambient rank formulas and their consistency"},
  };
  for (const std::string& name : commands) {
    CLI::App* sub = app.add_subcommand(name, descriptions.at(name));
    sub->add_option("--scenario", opt.scenario_path, "scenario JSON file");
    if (name == "ranks") {
      sub->add_option("--n", opt.n, "chart dimension (alternative to --scenario)");
      sub->add_option("--r", opt.r, "bundle rank (alternative to --scenario)");
    }
    sub->add_option("--samples", opt.samples, "sample point count");
    sub->add_option("--seed", opt.seed, "seed for samples, loops and batteries");
    sub->add_option("--jet-order", opt.jet_order, "maximum jet order (2 or 3)")
        ->check(CLI::Range(2, 3));
    sub->add_option("--quad-nodes", opt.quad_nodes, "Gauss-Legendre nodes for CS forms");
    sub->add_option("--rk4-steps", opt.rk4_steps, "RK4 steps per transport");
    sub->add_option("--tol", opt.tolerances, "override a tolerance, NAME=VALUE")
        ->take_all();
    sub->add_option("--format", opt.format, "report format: text | structured")
        ->check(CLI::IsMember({"text", "structured"}));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  try {
    return run(app.get_subcommands().front()->get_name(), opt);
  } catch (const gaugekit::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
