#include "imexrk/cli.hpp"

#include "imexrk/constructor.hpp"
#include "imexrk/experiments.hpp"
#include "imexrk/integrator.hpp"
#include "imexrk/stability.hpp"
#include "imexrk/tableau_io.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace imexrk {
namespace {

namespace fs = std::filesystem;

std::string format(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

// Output files appear only once complete: write to a sibling temp, then rename.
void write_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + tmp.string());
    os << content;
    if (!os) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

void write_snapshot_atomic(const fs::path& path, const SpectralField& u) {
  const fs::path tmp = path.string() + ".tmp";
  write_snapshot(tmp, u);
  fs::rename(tmp, path);
}

struct ModelFlags {
  std::string model = "ac";
  double eps = 0.1;
  double cutoff = 1.0;
  std::optional<double> alpha;
  std::optional<double> beta;
  int n = 128;
  int dim = 1;
  double length = 2 * std::numbers::pi;
  bool dealias = false;

  void attach(CLI::App& cmd) {
    cmd.add_option("--model", model, "ac, ch or mbe")->check(CLI::IsMember({"ac", "ch", "mbe"}));
    cmd.add_option("--eps", eps, "interface width epsilon");
    cmd.add_option("--cutoff", cutoff, "truncation bound M of the double well");
    cmd.add_option("--alpha", alpha, "stabilization alpha (default: certificate alpha0)");
    cmd.add_option("--beta", beta, "stabilization beta (default: certificate beta0)");
    cmd.add_option("--n", n, "grid points per dimension (power of two, >= 8)");
    cmd.add_option("--dim", dim, "spatial dimension")->check(CLI::IsMember({1, 2}));
    cmd.add_option("--length", length, "periodic box length");
    cmd.add_flag("--dealias", dealias, "apply the 2/3 rule to the nonlinearity");
  }

  // Fills alpha/beta from the certificate when not given on the command line.
  ModelSpec resolve(const StabilityReport<double>& report) const {
    const Stabilization d = default_stabilization(report);
    return ModelSpec::make(parse_model_kind(model), eps, alpha.value_or(d.alpha), beta.value_or(d.beta), cutoff);
  }

  double lipschitz() const {
    return ModelSpec::make(parse_model_kind(model), eps, 0, 0, cutoff).lipschitz;
  }
};

SpectralField initial_field(const PeriodicGrid& grid, const std::string& init, std::uint64_t seed) {
  if (init == "cos") {
    const double k = 2 * std::numbers::pi / grid.length;
    return SpectralField::sample(grid, [k](double x, double) { return 0.1 * std::cos(k * x); });
  }
  return random_initial_field(grid, seed);
}

const char* kEnergyPlot =
    "import csv, sys\n"
    "import matplotlib.pyplot as plt\n"
    "rows = list(csv.DictReader(open(sys.argv[1] if len(sys.argv) > 1 else 'energy.csv')))\n"
    "t = [float(r['time']) for r in rows]\n"
    "plt.plot(t, [float(r['energy']) for r in rows], marker='.')\n"
    "plt.xlabel('time'); plt.ylabel('energy')\n"
    "plt.savefig('energy.png', dpi=150)\n";

const char* kConvergencePlot =
    "import sys\n"
    "import matplotlib.pyplot as plt\n"
    "lines = open(sys.argv[1] if len(sys.argv) > 1 else 'convergence.csv').read().split()\n"
    "rows = [l.split(',') for l in lines[1:] if not l.startswith('order=')]\n"
    "tau = [float(r[0]) for r in rows]\n"
    "plt.loglog(tau, [float(r[1]) for r in rows], marker='o', label='H1')\n"
    "plt.loglog(tau, [float(r[2]) for r in rows], marker='s', label='L2')\n"
    "plt.xlabel('tau'); plt.ylabel('error'); plt.legend()\n"
    "plt.savefig('convergence.png', dpi=150)\n";

int cmd_analyze(const std::string& tableau, std::optional<double> lipschitz, double cutoff, std::ostream& out,
                std::ostream& err) {
  ButcherPaird pair;
  try {
    pair = read_tableau_file(tableau);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  const double L = lipschitz.value_or(double_well_lipschitz(cutoff));
  const auto report = certify_unconditional(pair, L);
  out << render_report_text(report) << "\n" << render_report_kv(report);
  return report.unconditional ? kExitOk : kExitFailed;
}

struct SimulateFlags {
  std::string tableau;
  ModelFlags model;
  double tau = 0.01;
  double tend = 1.0;
  std::uint64_t seed = 0;
  std::string init = "random";
  std::string out_dir;
  bool force = false;
  int stride = 0;
  bool plot = false;
};

int cmd_simulate(const SimulateFlags& f, std::ostream& out, std::ostream& err) {
  ButcherPaird pair;
  StepPlan plan;
  try {
    pair = read_tableau_file(f.tableau);
    const auto report = certify_unconditional(pair, f.model.lipschitz());
    if (!report.unconditional && !f.force) {
      err << "error: pair is not certified (lambda_Q=" << format("%.6g", report.lambda_Q)
          << ", lambda_H0=" << format("%.6g", report.lambda_H0) << "); pass --force to run anyway\n";
      return kExitUncertified;
    }
    const ModelSpec spec = f.model.resolve(report);
    const auto grid = PeriodicGrid::make(f.model.dim, f.model.n, f.model.length);
    plan = StepPlan::make(pair, spec, grid, f.tau, f.model.dealias);
    if (!(f.tend >= f.tau)) throw std::invalid_argument("--tend must be at least --tau");
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  const SpectralField u0 = initial_field(plan.grid, f.init, f.seed);
  Trajectory traj;
  try {
    traj = run(plan, u0, f.tend, f.stride);
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << "\n";
    return kExitDiverged;
  }

  const double slack = 1e-9 * (1 + std::abs(traj.energies.front()));
  const double increase = check_monotone(traj);
  const bool decayed = increase <= slack;

  std::ostringstream csv;
  csv << "step,time,energy,mass\n";
  char line[128];
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    std::snprintf(line, sizeof line, "%zu,%.17g,%.17g,%.17g\n", k, traj.times[k], traj.energies[k], traj.mass[k]);
    csv << line;
  }
  try {
    const fs::path dir(f.out_dir);
    fs::create_directories(dir);
    for (const auto& [step, field] : traj.snapshots)
      write_snapshot_atomic(dir / ("snap_" + std::to_string(step) + ".bin"), field);
    if (f.plot) write_atomic(dir / "plot_energy.py", kEnergyPlot);
    write_atomic(dir / "energy.csv", csv.str());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  const char* label = plan.spec.kind == ModelKind::Mbe ? "observed decay" : "energy decay";
  out << "model=" << model_name(plan.spec.kind) << "\n"
      << "alpha=" << format("%.12g", plan.spec.alpha) << "\n"
      << "beta=" << format("%.12g", plan.spec.beta) << "\n"
      << "steps=" << traj.times.size() - 1 << "\n"
      << "max_energy_increase=" << format("%.6e", increase) << "\n"
      << "slack=" << format("%.6e", slack) << "\n"
      << label << ": " << (decayed ? "yes" : "no") << "\n";
  return decayed ? kExitOk : kExitFailed;
}

struct ConvergeFlags {
  std::string tableau;
  ModelFlags model;
  std::vector<double> taus;
  double tend = 1.0;
  std::uint64_t seed = 0;
  std::string init = "cos";
  std::string out_dir;
  bool plot = false;
};

int cmd_converge(const ConvergeFlags& f, std::ostream& out, std::ostream& err) {
  ConvergenceTable table;
  try {
    const ButcherPaird pair = read_tableau_file(f.tableau);
    const auto report = certify_unconditional(pair, f.model.lipschitz());
    const ModelSpec spec = f.model.resolve(report);
    const auto grid = PeriodicGrid::make(f.model.dim, f.model.n, f.model.length);
    const SpectralField u0 = initial_field(grid, f.init, f.seed);
    table = convergence_study(pair, spec, grid, u0, f.taus, f.tend);
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << "\n";
    return kExitDiverged;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  std::ostringstream csv;
  csv << "tau,h1_error,l2_error\n";
  char line[128];
  for (const auto& row : table.rows) {
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", row.tau, row.h1_error, row.l2_error);
    csv << line;
  }
  csv << "order=" << format("%.6f", table.fitted_order) << "\n";
  try {
    const fs::path dir(f.out_dir);
    fs::create_directories(dir);
    if (f.plot) write_atomic(dir / "plot_convergence.py", kConvergencePlot);
    write_atomic(dir / "convergence.csv", csv.str());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  out << csv.str();
  return kExitOk;
}

int cmd_construct(const std::string& spec_file, const std::string& out_dir, double lipschitz, std::ostream& out,
                  std::ostream& err) {
  Rk3FamilySpec spec;
  try {
    std::ifstream is(spec_file);
    if (!is) throw std::runtime_error("cannot open " + spec_file);
    std::stringstream text;
    text << is.rdbuf();
    spec = parse_rk3_spec(text.str());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  ButcherPaird pair;
  try {
    pair = construct_rk3(spec);
  } catch (const DegenerateNodesError& e) {
    err << "error: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailed;
  }

  const double residual = verify_order(pair, 3);
  const auto report = certify_unconditional(pair, lipschitz);
  const std::string text = render_report_text(report) + "\n" + render_report_kv(report) +
                           "order3_residual=" + format("%.6e", residual) + "\n";
  try {
    const fs::path dir(out_dir);
    fs::create_directories(dir);
    write_atomic(dir / "tableau.tab", render_tableau(pair, "third-order 4-stage pair\n" + render_rk3_spec(spec)));
    write_atomic(dir / "report.txt", text);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  out << text;
  return residual <= 1e-10 ? kExitOk : kExitFailed;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"IMEX Runge-Kutta energy-stability toolkit"};
  app.require_subcommand(1);

  std::string analyze_tableau;
  std::optional<double> analyze_L;
  double analyze_cutoff = 1.0;
  auto* analyze = app.add_subcommand("analyze", "certify a tableau pair");
  analyze->add_option("--tableau", analyze_tableau, "tableau file")->required();
  analyze->add_option("--lipschitz", analyze_L, "Lipschitz constant L (default 3 M^2 - 1)");
  analyze->add_option("--cutoff", analyze_cutoff, "truncation bound M");

  SimulateFlags sim;
  auto* simulate = app.add_subcommand("simulate", "integrate a phase-field model and track the energy");
  simulate->add_option("--tableau", sim.tableau, "tableau file")->required();
  sim.model.attach(*simulate);
  simulate->add_option("--tau", sim.tau, "time step");
  simulate->add_option("--tend", sim.tend, "final time");
  simulate->add_option("--seed", sim.seed, "seed of the random initial field");
  simulate->add_option("--init", sim.init, "initial field")->check(CLI::IsMember({"cos", "random"}));
  simulate->add_option("--out", sim.out_dir, "output directory")->required();
  simulate->add_flag("--force", sim.force, "run a pair without an energy certificate");
  simulate->add_option("--snapshot-stride", sim.stride, "store every k-th state as snap_{step}.bin");
  simulate->add_flag("--plot-script", sim.plot, "write plot_energy.py next to the CSV");

  ConvergeFlags conv;
  auto* converge = app.add_subcommand("converge", "self-convergence study in the H1 norm");
  converge->add_option("--tableau", conv.tableau, "tableau file")->required();
  conv.model.attach(*converge);
  converge->add_option("--taus", conv.taus, "comma-separated time steps")->required()->delimiter(',');
  converge->add_option("--tend", conv.tend, "final time");
  converge->add_option("--seed", conv.seed, "seed of the random initial field");
  converge->add_option("--init", conv.init, "initial field")->check(CLI::IsMember({"cos", "random"}));
  converge->add_option("--out", conv.out_dir, "output directory")->required();
  converge->add_flag("--plot-script", conv.plot, "write plot_convergence.py next to the CSV");

  std::string spec_file, construct_out;
  double construct_L = 2.0;
  auto* construct = app.add_subcommand("construct", "build a third-order 4-stage pair from a spec file");
  construct->add_option("--spec", spec_file, "key=value spec file")->required();
  construct->add_option("--out", construct_out, "output directory")->required();
  construct->add_option("--lipschitz", construct_L, "Lipschitz constant for the report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  if (*analyze) return cmd_analyze(analyze_tableau, analyze_L, analyze_cutoff, out, err);
  if (*simulate) return cmd_simulate(sim, out, err);
  if (*converge) return cmd_converge(conv, out, err);
  return cmd_construct(spec_file, construct_out, construct_L, out, err);
}

}  // namespace imexrk
