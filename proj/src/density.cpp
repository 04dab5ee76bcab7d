#include "crystal/density.hpp"

#include "crystal/format.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace crystal {

namespace {

std::vector<Eigen::VectorXd> site_fractions(const ScaledGraph& sg, const Realization& r) {
  const int n0 = sg.base().num_vertices();
  std::vector<Eigen::VectorXd> out;
  out.reserve(static_cast<std::size_t>(sg.num_vertices()));
  for (int x = 0; x < sg.num_vertices(); ++x)
    out.push_back(scaled_position(r, sg.scale(), x % n0, sg.cell(x)).fractional);
  return out;
}

void check_match(const ScaledGraph& sg, const Realization& r, const Configuration& cfg) {
  if (cfg.size() != sg.num_vertices())
    throw std::invalid_argument("configuration does not match the graph");
  if (r.dimension() != sg.dimension()) throw std::invalid_argument("realization dimension mismatch");
}

}  // namespace

TorusField grid_density(const ScaledGraph& sg, const Realization& r, const Configuration& cfg,
                        int M) {
  check_match(sg, r, cfg);
  TorusGrid grid(r.basis(), M);
  TorusField field(grid, 0.0);
  const int d = sg.dimension();
  const int n0 = sg.base().num_vertices();
  Eigen::VectorXi idx(d);
  for (int x = 0; x < sg.num_vertices(); ++x) {
    if (cfg[x] == 0) continue;
    Eigen::VectorXd s = scaled_position(r, sg.scale(), x % n0, sg.cell(x)).fractional;
    for (int i = 0; i < d; ++i) {
      // Guard against s*M rounding up to M for s just below 1.
      idx[i] = std::min(static_cast<int>(std::floor(s[i] * M)), M - 1);
    }
    field.values[static_cast<std::size_t>(grid.flat_index(idx))] += cfg[x];
  }
  const double per_cell = static_cast<double>(sg.num_vertices()) / grid.size();
  for (double& v : field.values) v /= per_cell;
  return field;
}

TorusField ball_density(const ScaledGraph& sg, const Realization& r, const Configuration& cfg,
                        const TorusGrid& grid, double eps) {
  check_match(sg, r, cfg);
  const int d = sg.dimension();
  if (grid.dimension() != d) throw std::invalid_argument("grid dimension mismatch");
  const double limit = std::min(d / 4.0, 0.5);
  if (!(eps > 0.0) || eps > limit)
    throw std::invalid_argument("ball radius must lie in (0, " + std::to_string(limit) + "]");

  std::vector<Eigen::VectorXd> frac = site_fractions(sg, r);
  double d_factorial = 1.0;
  for (int i = 2; i <= d; ++i) d_factorial *= i;
  const double kernel = d_factorial / std::pow(2.0 * eps, d);
  const double norm = kernel / sg.num_vertices();

  TorusField field(grid, 0.0);
  for (int c = 0; c < grid.size(); ++c) {
    Eigen::VectorXd z = grid.fractional(c);
    double sum = 0.0;
    for (int x = 0; x < sg.num_vertices(); ++x) {
      if (cfg[x] == 0) continue;
      double dist = 0.0;
      for (int i = 0; i < d; ++i) {
        double delta = std::abs(frac[static_cast<std::size_t>(x)][i] - z[i]);
        dist += std::min(delta, 1.0 - delta);
      }
      if (dist <= eps) sum += cfg[x];
    }
    field.values[static_cast<std::size_t>(c)] = norm * sum;
  }
  return field;
}

double replacement_value(const ScaledGraph& sg, const Configuration& cfg,
                         const ThermoTables& thermo, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (cfg.size() != sg.num_vertices())
    throw std::invalid_argument("configuration does not match the graph");
  const int n0 = sg.base().num_vertices();
  const int cells = sg.num_cells();
  const RateFunction& g = thermo.rate();

  // Per-cell particle counts and per-site g values.
  std::vector<double> cell_mass(static_cast<std::size_t>(cells), 0.0);
  std::vector<double> g_site(static_cast<std::size_t>(sg.num_vertices()), 0.0);
  for (int x = 0; x < sg.num_vertices(); ++x) {
    cell_mass[static_cast<std::size_t>(x / n0)] += cfg[x];
    g_site[static_cast<std::size_t>(x)] = g(cfg[x]);
  }

  const std::vector<GroupElement> ball = word_ball(sg.dimension(), sg.scale(), eps * sg.scale());
  const double ball_cells = static_cast<double>(ball.size());
  double total = 0.0;
  std::vector<double> g_sum(static_cast<std::size_t>(n0));
  for (int c = 0; c < cells; ++c) {
    const GroupElement sigma = sg.cell_from_index(c);
    double mass = 0.0;
    std::fill(g_sum.begin(), g_sum.end(), 0.0);
    for (const GroupElement& tau : ball) {
      const int cc = sg.cell_index(GroupElement{sigma.coords + tau.coords}.reduced(sg.scale()));
      mass += cell_mass[static_cast<std::size_t>(cc)];
      for (int v = 0; v < n0; ++v) g_sum[static_cast<std::size_t>(v)] += g_site[static_cast<std::size_t>(cc * n0 + v)];
    }
    const double psi = thermo.fugacity(mass / (ball_cells * n0));
    for (int v = 0; v < n0; ++v) total += std::abs(g_sum[static_cast<std::size_t>(v)] / ball_cells - psi);
  }
  return total / (static_cast<double>(cells) * n0);
}

std::vector<double> replacement_diagnostic(const ScaledGraph& sg, const SimResult& traj,
                                           const ThermoTables& thermo, double eps) {
  std::vector<double> out;
  out.reserve(traj.snapshots.size());
  for (const Snapshot& s : traj.snapshots) out.push_back(replacement_value(sg, s.state, thermo, eps));
  return out;
}

void write_density_csv(std::ostream& out, double t, const TorusField& field, bool header) {
  const int d = field.grid.dimension();
  if (header) {
    out << "t";
    for (int i = 1; i <= d; ++i) out << ",cell_" << i;
    out << ",value\n";
  }
  for (int c = 0; c < field.grid.size(); ++c) {
    out << format_double(t);
    Eigen::VectorXi idx = field.grid.multi_index(c);
    for (int i = 0; i < d; ++i) out << "," << idx[i];
    out << "," << format_double(field.values[static_cast<std::size_t>(c)]) << "\n";
  }
}

}  // namespace crystal
