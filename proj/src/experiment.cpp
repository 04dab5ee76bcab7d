#include "crystal/experiment.hpp"

#include "crystal/density.hpp"
#include "crystal/format.hpp"
#include "crystal/pde.hpp"
#include "crystal/profile_expr.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace crystal {

using nlohmann::json;

RealizationMode realization_mode_from_name(const std::string& name) {
  if (name == "given") return RealizationMode::given;
  if (name == "harmonic") return RealizationMode::harmonic;
  if (name == "standard") return RealizationMode::standard;
  throw std::invalid_argument("unknown realization mode '" + name +
                              "' (expected given|harmonic|standard)");
}

std::string realization_mode_name(RealizationMode mode) {
  switch (mode) {
    case RealizationMode::given: return "given";
    case RealizationMode::harmonic: return "harmonic";
    case RealizationMode::standard: return "standard";
  }
  return "harmonic";
}

namespace {

template <typename T>
T get_or(const json& doc, const char* key, T fallback) {
  auto it = doc.find(key);
  if (it == doc.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument(std::string("config field '") + key + "' has the wrong type");
  }
}

const json& require(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) throw std::invalid_argument(std::string("config is missing '") + key + "'");
  return *it;
}

Eigen::MatrixXd basis_from_json(const json& jb) {
  if (!jb.is_array() || jb.empty()) throw std::invalid_argument("basis must be a list of vectors");
  const int d = static_cast<int>(jb.size());
  Eigen::MatrixXd b(d, d);
  for (int i = 0; i < d; ++i) {
    const json& v = jb[static_cast<std::size_t>(i)];
    if (!v.is_array() || static_cast<int>(v.size()) != d)
      throw std::invalid_argument("basis vectors must have " + std::to_string(d) + " entries");
    for (int j = 0; j < d; ++j) b(j, i) = v[static_cast<std::size_t>(j)].get<double>();
  }
  return b;
}

json basis_to_json(const Eigen::MatrixXd& b) {
  json out = json::array();
  for (int i = 0; i < b.cols(); ++i) {
    json v = json::array();
    for (int j = 0; j < b.rows(); ++j) v.push_back(b(j, i));
    out.push_back(v);
  }
  return out;
}

LatticeSpec lattice_from_config(const json& lattice) {
  if (lattice.is_string()) return load_lattice_spec(lattice.get<std::string>());
  if (lattice.is_object()) return lattice_spec_from_json(lattice);
  throw std::invalid_argument("config 'lattice' must be a name, a path, or an inline spec");
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("config must be a JSON object");
  ExperimentConfig c;
  c.lattice = require(doc, "lattice");
  if (!c.lattice.is_string() && !c.lattice.is_object())
    throw std::invalid_argument("config 'lattice' must be a name, a path, or an inline spec");
  c.process = get_or<std::string>(doc, "process", c.process);
  process_from_name(c.process);
  c.rate = get_or<std::string>(doc, "rate", c.rate);
  RateFunction::from_name(c.rate);
  if (auto it = doc.find("basis"); it != doc.end() && !it->is_null()) c.basis = basis_from_json(*it);
  c.realization = realization_mode_from_name(get_or<std::string>(doc, "realization", "harmonic"));
  c.N = get_or<std::vector<int>>(doc, "N", {});
  if (c.N.empty()) throw std::invalid_argument("config 'N' must list at least one scale");
  for (std::size_t i = 0; i < c.N.size(); ++i) {
    if (c.N[i] < 1) throw std::invalid_argument("scales N must be positive");
    if (i > 0 && c.N[i] <= c.N[i - 1]) throw std::invalid_argument("N list must be strictly increasing");
  }
  c.replicas = get_or<int>(doc, "replicas", c.replicas);
  if (c.replicas < 1) throw std::invalid_argument("replicas must be >= 1");
  c.times = get_or<std::vector<double>>(doc, "times", {});
  if (c.times.empty()) throw std::invalid_argument("config 'times' must list at least one time");
  for (double t : c.times)
    if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("times must be >= 0");
  c.rho0 = require(doc, "rho0").get<std::string>();
  if (auto it = doc.find("estimator"); it != doc.end()) {
    c.estimator.kind = get_or<std::string>(*it, "kind", "grid");
    c.estimator.M = get_or<int>(*it, "M", 0);
    c.estimator.eps = get_or<double>(*it, "eps", c.estimator.eps);
  }
  if (c.estimator.kind != "grid" && c.estimator.kind != "ball")
    throw std::invalid_argument("estimator kind must be grid or ball");
  if (c.estimator.M != 0 && c.estimator.M < 4) throw std::invalid_argument("estimator M must be >= 4");
  if (!(c.estimator.eps > 0.0)) throw std::invalid_argument("estimator eps must be positive");
  c.pde_grid = get_or<int>(doc, "pde_grid", c.pde_grid);
  if (c.pde_grid < 4) throw std::invalid_argument("pde_grid must be >= 4");
  if (c.estimator.M != 0 && c.pde_grid % c.estimator.M != 0)
    throw std::invalid_argument("estimator M must divide pde_grid");
  c.seed = get_or<std::uint64_t>(doc, "seed", c.seed);
  c.output = get_or<std::string>(doc, "output", "");
  c.threads = get_or<int>(doc, "threads", 0);
  if (c.threads < 0) throw std::invalid_argument("threads must be >= 0");
  return c;
}

json ExperimentConfig::to_json() const {
  json doc;
  doc["lattice"] = lattice;
  doc["process"] = process;
  doc["rate"] = rate;
  if (basis) doc["basis"] = basis_to_json(*basis);
  doc["realization"] = realization_mode_name(realization);
  doc["N"] = N;
  doc["replicas"] = replicas;
  doc["times"] = times;
  doc["rho0"] = rho0;
  doc["estimator"] = {{"kind", estimator.kind}, {"M", estimator.M}, {"eps", estimator.eps}};
  doc["pde_grid"] = pde_grid;
  doc["seed"] = seed;
  doc["output"] = output;
  doc["threads"] = threads;
  return doc;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  return ExperimentConfig::from_json(doc);
}

ResolvedRealization resolve_realization(const LatticeSpec& spec, RealizationMode mode,
                                        const std::optional<Eigen::MatrixXd>& basis) {
  const Eigen::MatrixXd U = basis.value_or(spec.basis);
  Realization harmonic = solve_harmonic(spec.graph, U);
  switch (mode) {
    case RealizationMode::given: {
      if (!spec.positions) throw std::invalid_argument("realization mode 'given' needs positions in the spec");
      Realization given(spec.graph, U, *spec.positions);
      return {given, diffusion_matrix(harmonic), std::nullopt};
    }
    case RealizationMode::harmonic:
      return {harmonic, diffusion_matrix(harmonic), std::nullopt};
    case RealizationMode::standard: {
      StandardRealization s = standard_realization(harmonic);
      // The standard realization is the harmonic one for the lattice group A U.
      return {s.realization, diffusion_matrix(s.realization), s.transform};
    }
  }
  throw std::logic_error("unreachable");
}

int default_estimator_resolution(const QuotientGraph& g, int n_min, int pde_grid) {
  const int d = g.dimension();
  const double sites = std::pow(static_cast<double>(n_min), d) * g.num_vertices();
  int best = 0;
  for (int M = 4; M <= pde_grid; ++M)
    if (pde_grid % M == 0 && std::pow(static_cast<double>(M), d) <= sites) best = M;
  if (best == 0) throw std::invalid_argument("no estimator grid fits the smallest N; use a larger N or pde_grid");
  return best;
}

namespace {

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double standard_error(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

std::string time_label(std::size_t k) { return "t" + std::to_string(k); }

}  // namespace

ConvergenceReport run_convergence(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const LatticeSpec spec = lattice_from_config(cfg.lattice);
  const int d = spec.graph.dimension();
  const ResolvedRealization resolved = resolve_realization(spec, cfg.realization, cfg.basis);
  const Realization& real = resolved.realization;
  const Process process = process_from_name(cfg.process);
  const ThermoTables thermo(RateFunction::from_name(cfg.rate));
  const Nonlinearity psi =
      process == Process::exclusion ? Nonlinearity::identity() : Nonlinearity::from(thermo);
  const ProfileExpr rho0 = parse_profile(cfg.rho0, d);
  const Profile profile = [&rho0](const Eigen::VectorXd& u) { return rho0(u); };

  ConvergenceReport report;
  report.diffusion = resolved.pde_diffusion.entries();
  report.effective = effective_matrix(resolved.pde_diffusion, real.basis()).entries();
  const int M = cfg.estimator.M != 0
                    ? cfg.estimator.M
                    : default_estimator_resolution(spec.graph, cfg.N.front(), cfg.pde_grid);
  report.estimator_resolution = M;

  // PDE reference per time, reduced to the estimator grid.
  const TorusGrid pde_grid(real.basis(), cfg.pde_grid);
  const TorusField initial = sample_field(pde_grid, profile);
  std::vector<TorusField> pde_solutions;
  std::vector<TorusField> references;
  for (double t : cfg.times) {
    pde_solutions.push_back(solve_fd(initial, resolved.pde_diffusion, psi, t));
    if (cfg.estimator.kind == "grid") {
      references.push_back(cell_average(pde_solutions.back(), M));
    } else {
      TorusGrid coarse(real.basis(), M);
      TorusField nodes(coarse, 0.0);
      const int ratio = cfg.pde_grid / M;
      for (int c = 0; c < coarse.size(); ++c)
        nodes.values[static_cast<std::size_t>(c)] =
            pde_solutions.back().values[static_cast<std::size_t>(pde_grid.flat_index(coarse.multi_index(c) * ratio))];
      references.push_back(nodes);
    }
  }

  const double horizon = *std::max_element(cfg.times.begin(), cfg.times.end());
  const std::size_t nt = cfg.times.size();
  const std::size_t R = static_cast<std::size_t>(cfg.replicas);

  for (int N : cfg.N) {
    const ScaledGraph sg(spec.graph, N);
    // Slots indexed by replica keep the aggregate independent of scheduling.
    std::vector<std::vector<TorusField>> densities(R);
    std::vector<std::uint64_t> events(R, 0);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&]() {
      while (true) {
        const std::size_t r = next.fetch_add(1);
        if (r >= R) return;
        try {
          const std::uint64_t replica = (static_cast<std::uint64_t>(N) << 32) | r;
          Rng init_rng(cfg.seed, replica, StreamPurpose::initial_state);
          Configuration c0 = sample_product(sg, real, process, thermo, profile, init_rng);
          SimulationOptions opt;
          opt.process = process;
          opt.horizon = horizon;
          opt.snapshot_times = cfg.times;
          opt.seed = cfg.seed;
          opt.replica = replica;
          SimResult res = simulate(sg, thermo.rate(), std::move(c0), opt);
          events[r] = res.event_count;
          std::vector<TorusField> fields;
          // Snapshots come back sorted; map them back to config order.
          for (double t : cfg.times) {
            auto it = std::find_if(res.snapshots.begin(), res.snapshots.end(),
                                   [t](const Snapshot& s) { return s.time == t; });
            const Configuration& state = it->state;
            if (cfg.estimator.kind == "grid") {
              fields.push_back(grid_density(sg, real, state, M));
            } else {
              fields.push_back(ball_density(sg, real, state, TorusGrid(real.basis(), M), cfg.estimator.eps));
            }
          }
          densities[r] = std::move(fields);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next.store(R);
          return;
        }
      }
    };
    unsigned threads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                       : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(R));
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
    for (std::thread& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);

    double mean_events = 0.0;
    for (std::uint64_t e : events) mean_events += static_cast<double>(e);
    mean_events /= static_cast<double>(R);

    for (std::size_t k = 0; k < nt; ++k) {
      const TorusField& ref = references[k];
      const std::size_t cells = ref.values.size();
      std::vector<double> sum(cells, 0.0);
      std::vector<double> single(R);
      for (std::size_t r = 0; r < R; ++r) {
        const TorusField& f = densities[r][k];
        for (std::size_t c = 0; c < cells; ++c) sum[c] += f.values[c];
        single[r] = l1_distance(f, ref);
      }
      TorusField mean(ref.grid, 0.0);
      for (std::size_t c = 0; c < cells; ++c) mean.values[c] = sum[c] / static_cast<double>(R);

      // Jackknife over replicas for the error of the ensemble mean.
      double jack_se = 0.0;
      if (R > 1) {
        std::vector<double> loo(R);
        TorusField held(ref.grid, 0.0);
        for (std::size_t r = 0; r < R; ++r) {
          for (std::size_t c = 0; c < cells; ++c)
            held.values[c] = (sum[c] - densities[r][k].values[c]) / static_cast<double>(R - 1);
          loo[r] = l1_distance(held, ref);
        }
        const double m = mean_of(loo);
        double ss = 0.0;
        for (double x : loo) ss += (x - m) * (x - m);
        jack_se = std::sqrt(static_cast<double>(R - 1) / static_cast<double>(R) * ss);
      }

      ConvergenceRow row;
      row.N = N;
      row.t = cfg.times[k];
      row.l1_error = l1_distance(mean, ref);
      row.std_error = jack_se;
      row.replica_l1_mean = mean_of(single);
      row.replica_l1_se = standard_error(single);
      row.mean_events = mean_events;
      report.rows.push_back(row);

      if (!cfg.output.empty()) {
        std::filesystem::create_directories(cfg.output);
        std::ofstream out(std::filesystem::path(cfg.output) /
                          ("density_N" + std::to_string(N) + "_" + time_label(k) + ".csv"));
        write_density_csv(out, cfg.times[k], mean);
      }
    }
  }

  if (!cfg.output.empty()) {
    std::filesystem::create_directories(cfg.output);
    std::ofstream out(std::filesystem::path(cfg.output) / "convergence.csv");
    write_convergence_csv(out, report);
    for (std::size_t k = 0; k < nt; ++k) {
      std::ofstream pde(std::filesystem::path(cfg.output) / ("pde_" + time_label(k) + ".csv"));
      write_field_csv(pde, pde_solutions[k]);
    }
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

void write_convergence_csv(std::ostream& out, const ConvergenceReport& report) {
  out << "N,t,l1_error,std_error,replica_l1_mean,replica_l1_se,mean_events\n";
  for (const ConvergenceRow& r : report.rows) {
    out << r.N << "," << format_double(r.t) << "," << format_double(r.l1_error) << ","
        << format_double(r.std_error) << "," << format_double(r.replica_l1_mean) << ","
        << format_double(r.replica_l1_se) << "," << format_double(r.mean_events) << "\n";
  }
}

RealizationReport report_realization(const LatticeSpec& spec, RealizationMode mode) {
  std::optional<double> det;
  Realization r = [&]() {
    switch (mode) {
      case RealizationMode::given:
        if (!spec.positions) throw std::invalid_argument("realization mode 'given' needs positions in the spec");
        return Realization(spec.graph, spec.basis, *spec.positions);
      case RealizationMode::harmonic:
        return solve_harmonic(spec.graph, spec.basis);
      case RealizationMode::standard: {
        StandardRealization s = standard_realization(solve_harmonic(spec.graph, spec.basis));
        det = std::abs(s.transform.determinant());
        return s.realization;
      }
    }
    throw std::logic_error("unreachable");
  }();
  DiffusionMatrix D = diffusion_matrix(r);
  const double E = energy(r);
  Eigen::VectorXd res = harmonic_residual(r);
  return {std::move(r), std::move(D), E, std::move(res), det};
}

void write_realization_text(std::ostream& out, const RealizationReport& rep) {
  const Realization& r = rep.realization;
  const int d = r.dimension();
  out << "basis (columns are lattice vectors):\n";
  for (int i = 0; i < d; ++i) {
    out << " ";
    for (int j = 0; j < d; ++j) out << " " << format_double(r.basis()(i, j));
    out << "\n";
  }
  out << "positions:\n";
  for (int v = 0; v < r.graph().num_vertices(); ++v) {
    out << "  " << r.graph().vertex_ids()[static_cast<std::size_t>(v)] << ":";
    for (int i = 0; i < d; ++i) out << " " << format_double(r.positions()(i, v));
    out << "\n";
  }
  out << "diffusion matrix:\n";
  for (int i = 0; i < d; ++i) {
    out << " ";
    for (int j = 0; j < d; ++j) out << " " << format_double(rep.diffusion(i, j));
    out << "\n";
  }
  out << "energy: " << format_double(rep.energy) << "\n";
  out << "max harmonic residual: " << format_double(rep.residual.size() ? rep.residual.maxCoeff() : 0.0)
      << "\n";
  if (rep.det_transform) out << "|det A|: " << format_double(*rep.det_transform) << "\n";
}

void write_realization_csv(std::ostream& out, const RealizationReport& rep) {
  const Realization& r = rep.realization;
  const int d = r.dimension();
  out << "vertex_id";
  for (int i = 1; i <= d; ++i) out << ",sigma_" << i;
  for (int i = 1; i <= d; ++i) out << ",pos_" << i;
  out << ",harmonic_residual\n";
  for (int v = 0; v < r.graph().num_vertices(); ++v) {
    out << r.graph().vertex_ids()[static_cast<std::size_t>(v)];
    for (int i = 0; i < d; ++i) out << ",0";
    for (int i = 0; i < d; ++i) out << "," << format_double(r.positions()(i, v));
    out << "," << format_double(rep.residual[v]) << "\n";
  }
}

}  // namespace crystal
