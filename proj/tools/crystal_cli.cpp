// Command-line front end: lattice validation, realization reports,
// simulation runs, PDE solves and the convergence experiment.
//
// Exit codes: 0 success, 1 invalid input, 2 runtime failure.

#include "crystal/density.hpp"
#include "crystal/experiment.hpp"
#include "crystal/format.hpp"
#include "crystal/lattice_spec.hpp"
#include "crystal/pde.hpp"
#include "crystal/profile_expr.hpp"
#include "crystal/simulation.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

using namespace crystal;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void print_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? " " : "  ") << format_double(m(i, j));
    out << "\n";
  }
}

int cmd_validate(const std::string& source) {
  LatticeSpec spec = load_lattice_spec(source);
  const QuotientGraph& g = spec.graph;
  std::cout << "valid: dimension " << g.dimension() << ", " << g.num_vertices() << " vertices, "
            << g.num_darts() << " darts\n";
  return 0;
}

int cmd_realize(const std::string& source, const std::string& mode, const std::string& csv) {
  LatticeSpec spec = load_lattice_spec(source);
  RealizationReport rep = report_realization(spec, realization_mode_from_name(mode));
  write_realization_text(std::cout, rep);
  if (!csv.empty()) {
    std::ofstream out(csv);
    if (!out) throw std::runtime_error("cannot write '" + csv + "'");
    write_realization_csv(out, rep);
  } else {
    std::cout << "\n";
    write_realization_csv(std::cout, rep);
  }
  return 0;
}

int cmd_diffusion(const std::string& source) {
  LatticeSpec spec = load_lattice_spec(source);
  Realization h = solve_harmonic(spec.graph, spec.basis);
  DiffusionMatrix D = diffusion_matrix(h);
  std::cout << "diffusion matrix (harmonic realization):\n";
  print_matrix(std::cout, D.entries());
  std::cout << "effective matrix (fractional coordinates):\n";
  print_matrix(std::cout, effective_matrix(D, spec.basis).entries());
  return 0;
}

struct SimulateArgs {
  std::string spec;
  std::string process = "sep";
  std::string rate = "linear";
  std::string mode = "harmonic";
  int N = 16;
  std::vector<double> times;
  std::string rho0 = "0.5";
  int replicas = 1;
  std::uint64_t seed = 0;
  std::string out;
  int grid = 0;
};

int cmd_simulate(const SimulateArgs& a) {
  LatticeSpec spec = load_lattice_spec(a.spec);
  if (a.N < 1) throw InputError("--N must be positive");
  if (a.replicas < 1) throw InputError("--replicas must be >= 1");
  if (a.times.empty()) throw InputError("--t needs at least one time");
  for (double t : a.times)
    if (!(t >= 0.0)) throw InputError("times must be >= 0");
  ResolvedRealization res = resolve_realization(spec, realization_mode_from_name(a.mode));
  const Process process = process_from_name(a.process);
  ThermoTables thermo(RateFunction::from_name(a.rate));
  ProfileExpr rho0 = parse_profile(a.rho0, spec.graph.dimension());
  Profile profile = [&rho0](const Eigen::VectorXd& u) { return rho0(u); };
  ScaledGraph sg(spec.graph, a.N);
  const int M = a.grid > 0 ? a.grid : std::max(4, a.N / 4);
  const double horizon = *std::max_element(a.times.begin(), a.times.end());

  std::filesystem::create_directories(a.out);
  std::ofstream traj(std::filesystem::path(a.out) / "trajectory.csv");
  std::vector<std::vector<double>> mean(a.times.size());
  std::vector<double> sorted = a.times;
  std::sort(sorted.begin(), sorted.end());
  std::uint64_t events = 0;
  for (int r = 0; r < a.replicas; ++r) {
    Rng init(a.seed, static_cast<std::uint64_t>(r), StreamPurpose::initial_state);
    Configuration c0 = sample_product(sg, res.realization, process, thermo, profile, init);
    SimulationOptions opt{process, horizon, sorted, a.seed, static_cast<std::uint64_t>(r)};
    SimResult result = simulate(sg, thermo.rate(), std::move(c0), opt);
    events += result.event_count;
    write_trajectory_csv(traj, result, r == 0);
    for (std::size_t k = 0; k < result.snapshots.size(); ++k) {
      TorusField f = grid_density(sg, res.realization, result.snapshots[k].state, M);
      if (mean[k].empty()) mean[k].assign(f.values.size(), 0.0);
      for (std::size_t c = 0; c < f.values.size(); ++c) mean[k][c] += f.values[c] / a.replicas;
    }
  }
  std::ofstream dens(std::filesystem::path(a.out) / "density.csv");
  TorusGrid grid(res.realization.basis(), M);
  for (std::size_t k = 0; k < sorted.size(); ++k)
    write_density_csv(dens, sorted[k], TorusField(grid, mean[k]), k == 0);
  std::cout << "simulated " << a.replicas << " replica(s) on " << sg.num_vertices() << " sites, "
            << events << " events; wrote trajectory.csv and density.csv to " << a.out << "\n";
  return 0;
}

int cmd_pde(const std::string& source, int M, double t, const std::string& rho0_text,
            const std::string& process, const std::string& rate, const std::string& out_path) {
  LatticeSpec spec = load_lattice_spec(source);
  Realization h = solve_harmonic(spec.graph, spec.basis);
  DiffusionMatrix D = diffusion_matrix(h);
  ProfileExpr rho0 = parse_profile(rho0_text, spec.graph.dimension());
  TorusGrid grid(spec.basis, M);
  TorusField initial = sample_field(grid, [&rho0](const Eigen::VectorXd& u) { return rho0(u); });
  Nonlinearity psi = process_from_name(process) == Process::exclusion
                         ? Nonlinearity::identity()
                         : Nonlinearity::from(ThermoTables(RateFunction::from_name(rate)));
  TorusField sol = solve_fd(initial, D, psi, t);
  if (out_path.empty()) {
    write_field_csv(std::cout, sol);
  } else {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write '" + out_path + "'");
    write_field_csv(out, sol);
  }
  return 0;
}

int cmd_converge(const std::string& path) {
  ExperimentConfig cfg = load_experiment_config(path);
  ConvergenceReport rep = run_convergence(cfg);
  std::cout << "diffusion matrix:\n";
  print_matrix(std::cout, rep.diffusion);
  std::cout << "estimator grid: " << rep.estimator_resolution << "\n";
  write_convergence_csv(std::cout, rep);
  std::cout << "wall time: " << rep.wall_seconds << " s\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Crystal lattice particle systems and their hydrodynamic limits"};
  app.require_subcommand(1);

  std::string spec;
  auto* validate = app.add_subcommand("validate", "Check a lattice spec");
  validate->add_option("spec", spec, "Spec file or bundled name")->required();

  std::string mode = "harmonic", csv;
  auto* realize = app.add_subcommand("realize", "Report a periodic realization");
  realize->add_option("spec", spec, "Spec file or bundled name")->required();
  realize->add_option("--mode", mode, "given|harmonic|standard");
  realize->add_option("--csv", csv, "Write the CSV table here instead of stdout");

  auto* diffusion = app.add_subcommand("diffusion", "Diffusion matrix of the harmonic realization");
  diffusion->add_option("spec", spec, "Spec file or bundled name")->required();

  SimulateArgs sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "Run SEP or ZRP replicas");
  simulate_cmd->add_option("spec", sim.spec, "Spec file or bundled name")->required();
  simulate_cmd->add_option("--process", sim.process, "sep|zrp");
  simulate_cmd->add_option("--rate", sim.rate, "linear|indicator (ZRP)");
  simulate_cmd->add_option("--mode", sim.mode, "given|harmonic|standard");
  simulate_cmd->add_option("--N", sim.N, "Scale N")->required();
  simulate_cmd->add_option("--t", sim.times, "Snapshot times")->required();
  simulate_cmd->add_option("--rho0", sim.rho0, "Initial density profile");
  simulate_cmd->add_option("--replicas", sim.replicas, "Replica count");
  simulate_cmd->add_option("--seed", sim.seed, "Master seed");
  simulate_cmd->add_option("--grid", sim.grid, "Density grid M (default max(4, N/4))");
  simulate_cmd->add_option("--out", sim.out, "Output directory")->required();

  int M = 128;
  double t = 0.0;
  std::string rho0 = "0.5", process = "sep", rate = "linear", out;
  auto* pde = app.add_subcommand("pde", "Solve the hydrodynamic equation");
  pde->add_option("spec", spec, "Spec file or bundled name")->required();
  pde->add_option("--grid", M, "Grid points per dimension");
  pde->add_option("--t", t, "Final time")->required();
  pde->add_option("--rho0", rho0, "Initial density profile")->required();
  pde->add_option("--process", process, "sep|zrp");
  pde->add_option("--rate", rate, "linear|indicator (ZRP)");
  pde->add_option("--out", out, "Output file (default stdout)");

  std::string config;
  auto* converge = app.add_subcommand("converge", "Run the convergence experiment");
  converge->add_option("config", config, "Experiment config (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*validate) return cmd_validate(spec);
    if (*realize) return cmd_realize(spec, mode, csv);
    if (*diffusion) return cmd_diffusion(spec);
    if (*simulate_cmd) return cmd_simulate(sim);
    if (*pde) return cmd_pde(spec, M, t, rho0, process, rate, out);
    if (*converge) return cmd_converge(config);
  } catch (const SpecError& e) {
    std::cerr << "invalid lattice spec: " << e.what() << "\n";
    return 1;
  } catch (const ParseError& e) {
    std::cerr << "invalid profile: " << e.what() << "\n";
    return 1;
  } catch (const InputError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
