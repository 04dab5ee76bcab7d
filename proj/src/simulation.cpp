#include "crystal/simulation.hpp"

#include "crystal/format.hpp"
#include "crystal/rate_tree.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace crystal {

Process process_from_name(const std::string& name) {
  if (name == "sep") return Process::exclusion;
  if (name == "zrp") return Process::zero_range;
  throw std::invalid_argument("unknown process '" + name + "' (expected sep|zrp)");
}

std::string process_name(Process p) { return p == Process::exclusion ? "sep" : "zrp"; }

Configuration::Configuration(std::vector<int> occ) : occupation(std::move(occ)) {
  total = 0;
  for (int n : occupation) {
    if (n < 0) throw std::invalid_argument("occupations must be nonnegative");
    total += n;
  }
}

bool Configuration::is_exclusion() const {
  return std::all_of(occupation.begin(), occupation.end(), [](int n) { return n == 0 || n == 1; });
}

void Configuration::move(int from, int to) {
  --occupation[static_cast<std::size_t>(from)];
  ++occupation[static_cast<std::size_t>(to)];
}

double dart_rate(const ScaledGraph& sg, int dart, const Configuration& cfg, Process process,
                 const RateFunction& rate) {
  const double n = sg.scale();
  const double base = 2.0 * n * n * sg.weight(dart);
  const int from = cfg[sg.tail(dart)];
  if (process == Process::exclusion)
    return (from == 1 && cfg[sg.head(dart)] == 0) ? base : 0.0;
  return base * rate(from);
}

SimResult simulate(const ScaledGraph& sg, const RateFunction& rate, Configuration initial,
                   const SimulationOptions& options) {
  if (!(options.horizon >= 0.0)) throw std::invalid_argument("horizon must be >= 0");
  if (initial.size() != sg.num_vertices())
    throw std::invalid_argument("configuration does not match the graph");
  if (options.process == Process::exclusion && !initial.is_exclusion())
    throw std::invalid_argument("exclusion configurations must be 0/1");
  std::vector<double> times = options.snapshot_times;
  std::sort(times.begin(), times.end());
  for (double t : times)
    if (t < 0.0 || t > options.horizon)
      throw std::invalid_argument("snapshot times must lie in [0, horizon]");

  SimResult result;
  result.seed = options.seed;
  result.replica = options.replica;
  Rng rng(options.seed, options.replica, StreamPurpose::dynamics);

  Configuration state = std::move(initial);
  RateTree tree(static_cast<std::size_t>(sg.num_darts()));
  for (int e = 0; e < sg.num_darts(); ++e)
    tree.set(static_cast<std::size_t>(e), dart_rate(sg, e, state, options.process, rate));
  tree.rebuild();

  auto refresh = [&](int vertex) {
    for (int e : sg.out_darts(vertex)) {
      tree.set(static_cast<std::size_t>(e), dart_rate(sg, e, state, options.process, rate));
      if (options.process == Process::exclusion) {
        int inv = sg.inverse(e);
        tree.set(static_cast<std::size_t>(inv), dart_rate(sg, inv, state, options.process, rate));
      }
    }
  };

  std::size_t next_snapshot = 0;
  double t = 0.0;
  while (true) {
    const double total = tree.total();
    double t_next = options.horizon + 1.0;
    if (tree.active() > 0 && total > 0.0) t_next = t + rng.exponential(total);
    while (next_snapshot < times.size() && times[next_snapshot] < t_next) {
      result.snapshots.push_back({times[next_snapshot], state});
      ++next_snapshot;
    }
    if (t_next > options.horizon) break;

    std::size_t e = 0;
    do {
      e = tree.find(rng.uniform() * tree.total());
    } while (tree.rate(e) <= 0.0);
    const int dart = static_cast<int>(e);
    const int from = sg.tail(dart);
    const int to = sg.head(dart);
    state.move(from, to);
    refresh(from);
    if (to != from) refresh(to);
    t = t_next;
    ++result.event_count;
  }
  return result;
}

Configuration sample_product(const ScaledGraph& sg, const Realization& r, Process process,
                             const ThermoTables& thermo, const Profile& profile, Rng& rng) {
  const int n0 = sg.base().num_vertices();
  std::vector<int> occ(static_cast<std::size_t>(sg.num_vertices()), 0);
  for (int x = 0; x < sg.num_vertices(); ++x) {
    TorusPoint p = scaled_position(r, sg.scale(), x % n0, sg.cell(x));
    const double rho = profile(p.coords);
    if (!std::isfinite(rho)) throw std::domain_error("density profile is not finite");
    if (process == Process::exclusion) {
      if (rho < 0.0 || rho > 1.0) throw std::domain_error("exclusion density profile must lie in [0, 1]");
      occ[static_cast<std::size_t>(x)] = rng.uniform() < rho ? 1 : 0;
    } else {
      if (rho < 0.0) throw std::domain_error("zero-range density profile must be >= 0");
      occ[static_cast<std::size_t>(x)] = static_cast<int>(thermo.sample(thermo.fugacity(rho), rng));
    }
  }
  return Configuration(std::move(occ));
}

void write_trajectory_csv(std::ostream& out, const SimResult& result, bool header) {
  if (header) out << "replica,t,vertex_flat_index,occupation\n";
  for (const Snapshot& s : result.snapshots)
    for (int x = 0; x < s.state.size(); ++x)
      if (s.state[x] != 0) out << result.replica << "," << format_double(s.time) << "," << x << "," << s.state[x] << "\n";
}

}  // namespace crystal
