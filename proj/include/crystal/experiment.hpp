#pragma once

// Hydrodynamic-convergence experiment and realization reports.
//
// Config document (JSON):
//
//   {
//     "lattice": "ex1_alternating",         // bundled name, file path, or inline spec
//     "process": "sep", "rate": "linear",
//     "basis": [[2]],                        // optional override
//     "realization": "harmonic",             // given | harmonic | standard
//     "N": [16, 32, 64], "replicas": 50, "times": [0.05],
//     "rho0": "0.5 + 0.3*cos(pi*x1)",
//     "estimator": {"kind": "grid", "M": 32},  // or {"kind": "ball", "eps": 0.1, "M": 32}
//     "pde_grid": 256, "seed": 1, "output": "out", "threads": 0
//   }

#include "crystal/lattice_spec.hpp"
#include "crystal/realization.hpp"
#include "crystal/simulation.hpp"
#include "crystal/torus_field.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace crystal {

enum class RealizationMode { given, harmonic, standard };
RealizationMode realization_mode_from_name(const std::string& name);
std::string realization_mode_name(RealizationMode mode);

struct EstimatorConfig {
  std::string kind = "grid";  // grid | ball
  int M = 0;                  // 0: automatic (see default_estimator_resolution)
  double eps = 0.1;           // ball radius (fractional l1)
};

struct ExperimentConfig {
  nlohmann::json lattice;  // string (name or path) or inline spec object
  std::string process = "sep";
  std::string rate = "linear";
  std::optional<Eigen::MatrixXd> basis;
  RealizationMode realization = RealizationMode::harmonic;
  std::vector<int> N;
  int replicas = 50;
  std::vector<double> times;
  std::string rho0;
  EstimatorConfig estimator;
  int pde_grid = 256;
  std::uint64_t seed = 1;
  std::string output;  // empty: no files
  int threads = 0;     // 0: hardware concurrency

  /// Throws std::invalid_argument on malformed or inconsistent documents.
  static ExperimentConfig from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;
};

ExperimentConfig load_experiment_config(const std::string& path);

/// The realization used for the empirical measure and the torus it lives on,
/// together with the diffusion matrix of the harmonic realization for the
/// same lattice group, which drives the PDE in every mode.
struct ResolvedRealization {
  Realization realization;
  DiffusionMatrix pde_diffusion;
  std::optional<Eigen::MatrixXd> transform;  // standard mode only
};

ResolvedRealization resolve_realization(const LatticeSpec& spec, RealizationMode mode,
                                        const std::optional<Eigen::MatrixXd>& basis = std::nullopt);

/// Largest divisor M >= 4 of the PDE grid with at least one site per cell on
/// average at the smallest N, i.e. M^d <= |V_Nmin|. The same M is used for
/// every N so errors at different N are directly comparable.
int default_estimator_resolution(const QuotientGraph& g, int n_min, int pde_grid);

struct ConvergenceRow {
  int N = 0;
  double t = 0.0;
  double l1_error = 0.0;         // L1(replica-mean density, cell-averaged PDE)
  double std_error = 0.0;        // jackknife over replicas
  double replica_l1_mean = 0.0;  // mean over replicas of the single-replica L1
  double replica_l1_se = 0.0;
  double mean_events = 0.0;
};

struct ConvergenceReport {
  Eigen::MatrixXd diffusion;  // D of the harmonic realization
  Eigen::MatrixXd effective;  // U^{-1} D U^{-T}
  int estimator_resolution = 0;
  std::vector<ConvergenceRow> rows;  // N-major, then time
  double wall_seconds = 0.0;         // not written to CSV
};

/// Runs the full pipeline; writes CSVs to cfg.output when it is nonempty.
ConvergenceReport run_convergence(const ExperimentConfig& cfg);

void write_convergence_csv(std::ostream& out, const ConvergenceReport& report);

struct RealizationReport {
  Realization realization;
  DiffusionMatrix diffusion;
  double energy = 0.0;
  Eigen::VectorXd residual;
  std::optional<double> det_transform;
};

RealizationReport report_realization(const LatticeSpec& spec, RealizationMode mode);
void write_realization_text(std::ostream& out, const RealizationReport& report);
/// vertex_id,sigma_1..d,pos_1..d,harmonic_residual (sigma = 0).
void write_realization_csv(std::ostream& out, const RealizationReport& report);

}  // namespace crystal
