#include "crystal/stationarity.hpp"

#include <cmath>
#include <map>
#include <vector>

namespace crystal {

namespace {

// Residual of nu L for a generator given as a list of states and a
// transition function, with all states in one closed class.
template <typename Transitions>
double residual(const std::vector<Configuration>& states, const std::vector<double>& weights,
                Transitions&& transitions) {
  std::map<std::vector<int>, std::size_t> index;
  for (std::size_t i = 0; i < states.size(); ++i) index.emplace(states[i].occupation, i);
  std::vector<double> flow(states.size(), 0.0);
  for (std::size_t i = 0; i < states.size(); ++i) {
    transitions(states[i], [&](const Configuration& next, double rate) {
      flow[index.at(next.occupation)] += weights[i] * rate;
      flow[i] -= weights[i] * rate;
    });
  }
  double worst = 0.0;
  for (double f : flow) worst = std::max(worst, std::abs(f));
  return worst;
}

template <typename Emit>
void for_each_move(const ScaledGraph& sg, const Configuration& cfg, Process process,
                   const RateFunction& rate, Emit&& emit) {
  for (int e = 0; e < sg.num_darts(); ++e) {
    const double q = dart_rate(sg, e, cfg, process, rate);
    if (q <= 0.0) continue;
    Configuration next = cfg;
    next.move(sg.tail(e), sg.head(e));
    emit(next, q);
  }
}

void compositions(int sites, int total, int cap, std::vector<int>& cur,
                  std::vector<Configuration>& out) {
  if (static_cast<int>(cur.size()) == sites - 1) {
    if (total <= cap) {
      cur.push_back(total);
      out.emplace_back(cur);
      cur.pop_back();
    }
    return;
  }
  for (int k = 0; k <= std::min(total, cap); ++k) {
    cur.push_back(k);
    compositions(sites, total - k, cap, cur, out);
    cur.pop_back();
  }
}

}  // namespace

double sep_stationarity_residual(const QuotientGraph& g, int N, double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("density must lie in [0, 1]");
  ScaledGraph sg(g, N);
  const int n = sg.num_vertices();
  if (n > 12) throw StateSpaceTooLarge("exclusion state space limited to 12 sites");
  std::vector<Configuration> states;
  std::vector<double> weights;
  for (int mask = 0; mask < (1 << n); ++mask) {
    std::vector<int> occ(static_cast<std::size_t>(n));
    int k = 0;
    for (int x = 0; x < n; ++x) {
      occ[static_cast<std::size_t>(x)] = (mask >> x) & 1;
      k += occ[static_cast<std::size_t>(x)];
    }
    states.emplace_back(std::move(occ));
    weights.push_back(std::pow(rho, k) * std::pow(1.0 - rho, n - k));
  }
  const RateFunction unused = RateFunction::linear();
  return residual(states, weights, [&](const Configuration& c, auto&& emit) {
    for_each_move(sg, c, Process::exclusion, unused, emit);
  });
}

double zrp_stationarity_residual(const QuotientGraph& g, int N, const ThermoTables& thermo,
                                 int particles, double phi) {
  ScaledGraph sg(g, N);
  const int n = sg.num_vertices();
  if (n > 6) throw StateSpaceTooLarge("zero-range state space limited to 6 sites");
  if (particles < 0 || particles > 4)
    throw StateSpaceTooLarge("zero-range sector limited to 4 particles");
  std::vector<Configuration> states;
  std::vector<int> cur;
  compositions(n, particles, particles, cur, states);

  // Product weights conditioned on the sector.
  std::vector<double> weights;
  double total = 0.0;
  for (const Configuration& c : states) {
    double lw = 0.0;
    for (int x = 0; x < n; ++x) lw += thermo.log_marginal(c[x], phi);
    weights.push_back(std::exp(lw));
    total += weights.back();
  }
  for (double& w : weights) w /= total;
  return residual(states, weights, [&](const Configuration& c, auto&& emit) {
    for_each_move(sg, c, Process::zero_range, thermo.rate(), emit);
  });
}

double zrp_detailed_balance_defect(const ScaledGraph& sg, const Configuration& cfg,
                                   const ThermoTables& thermo, double phi) {
  const RateFunction& g = thermo.rate();
  // Only the two sites touched by a move change the product weight.
  double worst = 0.0;
  for (int e = 0; e < sg.num_darts(); ++e) {
    const int o = sg.tail(e);
    const int t = sg.head(e);
    if (o == t || cfg[o] == 0) continue;
    const double before = thermo.log_marginal(cfg[o], phi) + thermo.log_marginal(cfg[t], phi) +
                          std::log(sg.weight(e)) + std::log(g(cfg[o]));
    const double after = thermo.log_marginal(cfg[o] - 1, phi) +
                         thermo.log_marginal(cfg[t] + 1, phi) +
                         std::log(sg.weight(sg.inverse(e))) + std::log(g(cfg[t] + 1));
    worst = std::max(worst, std::abs(before - after));
  }
  return worst;
}

}  // namespace crystal
