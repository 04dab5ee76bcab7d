#pragma once

// Exact kinetic Monte Carlo for the simple exclusion process (SEP) and the
// zero-range process (ZRP) on an N-scaled finite graph, in macroscopic time.
//
// Both processes move one particle along a dart e = (x -> y) at rate
//
//   SEP:  2 N^2 p(e) eta_x (1 - eta_y)
//   ZRP:  2 N^2 p(e) g(eta_x)
//
// For SEP this is exactly N^2 times the swap generator summed over oriented
// darts (e and its inverse realize the same swap). The ZRP rate uses the
// same factor, so both processes have the hydrodynamic limit
// d/dt rho = div(D grad Psi(rho)) with D the oriented-dart diffusion matrix.

#include "crystal/lattice.hpp"
#include "crystal/realization.hpp"
#include "crystal/rng.hpp"
#include "crystal/thermo.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace crystal {

enum class Process { exclusion, zero_range };

/// "sep" or "zrp".
Process process_from_name(const std::string& name);
std::string process_name(Process p);

struct Configuration {
  std::vector<int> occupation;
  long total = 0;

  Configuration() = default;
  explicit Configuration(std::vector<int> occ);
  static Configuration empty(int sites) { return Configuration(std::vector<int>(static_cast<std::size_t>(sites), 0)); }

  int size() const { return static_cast<int>(occupation.size()); }
  int operator[](int x) const { return occupation[static_cast<std::size_t>(x)]; }
  bool is_exclusion() const;
  /// One particle from `from` to `to`.
  void move(int from, int to);
  bool operator==(const Configuration&) const = default;
};

/// Rate of a particle crossing `dart` in macroscopic time (see file comment).
double dart_rate(const ScaledGraph& sg, int dart, const Configuration& cfg, Process process,
                 const RateFunction& rate);

struct SimulationOptions {
  Process process = Process::exclusion;
  double horizon = 0.0;
  std::vector<double> snapshot_times;  // each in [0, horizon]
  std::uint64_t seed = 0;
  std::uint64_t replica = 0;
};

struct Snapshot {
  double time = 0.0;
  Configuration state;
};

struct SimResult {
  std::vector<Snapshot> snapshots;  // sorted by time
  std::uint64_t event_count = 0;
  std::uint64_t seed = 0;
  std::uint64_t replica = 0;
};

/// Gillespie simulation. Snapshots hold the state after the last event at
/// or before each requested time. Deterministic in (seed, replica).
SimResult simulate(const ScaledGraph& sg, const RateFunction& rate, Configuration initial,
                   const SimulationOptions& options);

using Profile = std::function<double(const Eigen::VectorXd&)>;

/// Independent per-site sampling from a density profile on the torus,
/// evaluated at the N-scaled positions: Bernoulli(rho) for SEP, the ZRP
/// marginal at fugacity Psi(rho) otherwise. Throws std::domain_error when the
/// profile leaves [0, 1] (SEP) or [0, inf) (ZRP).
Configuration sample_product(const ScaledGraph& sg, const Realization& r, Process process,
                             const ThermoTables& thermo, const Profile& profile, Rng& rng);

/// Sparse trajectory CSV: replica,t,vertex_flat_index,occupation (nonzero sites).
void write_trajectory_csv(std::ostream& out, const SimResult& result, bool header = true);

}  // namespace crystal
