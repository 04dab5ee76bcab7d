// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "crystal/density.hpp"
#include "crystal/experiment.hpp"
#include "crystal/pde.hpp"
#include "crystal/realization.hpp"
#include "crystal/simulation.hpp"
#include "crystal/stationarity.hpp"
#include "crystal/thermo.hpp"
#include "helpers.hpp"

#include <stdexcept>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

using namespace crystal;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void run(int id, const char* title, double time_limit, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = secs < time_limit;
  const bool pass = out.pass && in_time;
  if (!pass) ++failures;
  std::printf("criterion %d: %s  %s  [%s; %.2f s, limit %.0f s%s]\n", id, pass ? "PASS" : "FAIL", title,
              out.detail.c_str(), secs, time_limit, in_time ? "" : ", too slow");
  std::fflush(stdout);
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

Eigen::MatrixXd mat2(double a, double b, double c, double d) {
  Eigen::MatrixXd m(2, 2);
  m << a, b, c, d;
  return m;
}

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

QuotientGraph random_graph(std::mt19937& gen, int d, int n) {
  std::uniform_real_distribution<double> w(0.1, 5.0);
  std::uniform_int_distribution<int> sh(-2, 2);
  std::uniform_int_distribution<int> pick(0, n - 1);
  std::vector<std::string> ids;
  for (int v = 0; v < n; ++v) ids.push_back("v" + std::to_string(v));
  std::vector<EdgeSpec> edges;
  for (int v = 1; v < n; ++v) {
    Eigen::VectorXi s(d);
    for (int i = 0; i < d; ++i) s[i] = sh(gen);
    edges.push_back({ids[static_cast<std::size_t>(pick(gen) % v)], ids[static_cast<std::size_t>(v)], s, w(gen)});
  }
  for (int i = 0; i < d; ++i) {
    Eigen::VectorXi s = Eigen::VectorXi::Zero(d);
    s[i] = 1;
    const auto v = ids[static_cast<std::size_t>(pick(gen))];
    edges.push_back({v, v, s, w(gen)});
  }
  for (int k = std::uniform_int_distribution<int>(0, 4)(gen); k > 0; --k) {
    Eigen::VectorXi s(d);
    for (int i = 0; i < d; ++i) s[i] = sh(gen);
    const int a = pick(gen), b = pick(gen);
    if (a == b && s.isZero()) continue;
    edges.push_back({ids[static_cast<std::size_t>(a)], ids[static_cast<std::size_t>(b)], s, w(gen)});
  }
  return QuotientGraph::from_edges(d, ids, edges);
}

Eigen::MatrixXi random_unimodular(std::mt19937& gen, int d) {
  // Product of random elementary integer row operations and sign flips.
  Eigen::MatrixXi A = Eigen::MatrixXi::Identity(d, d);
  std::uniform_int_distribution<int> row(0, d - 1), mult(-2, 2);
  for (int k = 0; k < 6; ++k) {
    const int i = row(gen), j = row(gen);
    if (i == j) {
      A.row(i) *= -1;
      continue;
    }
    A.row(i) += mult(gen) * A.row(j);
  }
  return A;
}

Outcome golden_diffusion() {
  struct Case {
    const char* name;
    LatticeSpec spec;
    Eigen::MatrixXd expected;
  };
  std::vector<Case> cases = {
      {"ring 1a", testing::ring_1a(), Eigen::MatrixXd::Constant(1, 1, 2.0)},
      {"ring 1b", testing::ring_1b(), Eigen::MatrixXd::Constant(1, 1, 2.0)},
      {"square 2a", testing::bundled("square_2a"), mat2(2, 0, 0, 2)},
      {"square 2b", testing::bundled("square_2b"), mat2(4, 2, 2, 2)},
      {"hexagonal 3a", testing::bundled("hexagonal_3a"), mat2(1.5, 0, 0, 1.5)},
      {"weighted hexagonal", testing::bundled("ex2_hexagonal_weighted"), mat2(5.0 / 9, 1.0 / 9, 1.0 / 9, 2.0 / 9)},
  };
  Outcome out;
  double worst = 0.0;
  for (const Case& c : cases) {
    const double err = max_abs(diffusion_matrix(solve_harmonic(c.spec.graph, c.spec.basis)).entries() - c.expected);
    worst = std::max(worst, err);
    if (err > 1e-12) {
      out.pass = false;
      out.detail += std::string(c.name) + " off; ";
    }
  }
  out.detail += "max entry error " + fmt("%.2e", worst);
  return out;
}

Outcome harmonic_golden() {
  LatticeSpec ex1 = testing::bundled("ex1_alternating");
  const double x1 = solve_harmonic(ex1.graph, ex1.basis).position(1)[0];
  LatticeSpec hex = testing::bundled("ex2_hexagonal_weighted");
  Eigen::VectorXd shift = solve_harmonic(hex.graph, hex.basis).position(1) - hex.positions->col(1);
  const double e1 = std::abs(x1 - 4.0 / 3.0);
  const double e2 = std::max(std::abs(shift[0] - 1.0 / 3.0), std::abs(shift[1] + 1.0 / 3.0));
  return {e1 <= 1e-12 && e2 <= 1e-10,
          "x(1) = " + fmt("%.15f", x1) + " (err " + fmt("%.1e", e1) + "), white shift err " + fmt("%.1e", e2)};
}

Outcome standard_realization_check() {
  LatticeSpec sq = testing::bundled("square_2b");
  StandardRealization st = standard_realization(solve_harmonic(sq.graph, sq.basis));
  const double frob = (diffusion_matrix(st.realization).entries() - 2.0 * Eigen::MatrixXd::Identity(2, 2)).norm();
  const double det_err = std::abs(std::abs(st.transform.determinant()) - 1.0);

  std::mt19937 gen(20261019);
  double worst = 0.0;
  const int graphs = 120;
  for (int k = 0; k < graphs; ++k) {
    const int d = 1 + k % 3;
    const int n = 1 + (k / 3) % 5;
    QuotientGraph g = random_graph(gen, d, n);
    Eigen::MatrixXd U = Eigen::MatrixXd::Identity(d, d) + 0.3 * Eigen::MatrixXd::Random(d, d);
    Realization h = solve_harmonic(g, U);
    StandardRealization s = standard_realization(h);
    Eigen::MatrixXd D = diffusion_matrix(s.realization).entries();
    const double iso = std::pow(diffusion_matrix(h).entries().determinant(), 1.0 / d);
    worst = std::max(worst, (D - iso * Eigen::MatrixXd::Identity(d, d)).norm() / iso);
  }
  return {frob <= 1e-9 && det_err <= 1e-12 && worst <= 1e-8,
          "sheared square D err " + fmt("%.1e", frob) + ", |det A| err " + fmt("%.1e", det_err) + ", isotropy residual over " +
              std::to_string(graphs) + " graphs " + fmt("%.1e", worst) + " (relative)"};
}

Outcome stationarity_check() {
  LatticeSpec ex1 = testing::bundled("ex1_alternating");
  double sep = 0.0;
  for (double rho : {0.25, 0.5, 0.9}) sep = std::max(sep, sep_stationarity_residual(ex1.graph, 2, rho));
  ThermoTables lin(RateFunction::linear());
  const double zrp = zrp_stationarity_residual(testing::ring_1a().graph, 2, lin, 3, 1.0);

  double balance = 0.0;
  Realization h = solve_harmonic(ex1.graph, ex1.basis);
  ScaledGraph sg(ex1.graph, 8);
  for (RateFunction g : {RateFunction::linear(), RateFunction::indicator()}) {
    ThermoTables t(g);
    Rng rng(99, static_cast<std::uint64_t>(g.kind()), StreamPurpose::test);
    for (int i = 0; i < 10000; ++i) {
      const double alpha = 0.2 + 2.0 * rng.uniform();
      Configuration c = sample_product(sg, h, Process::zero_range, t,
                                       [alpha](const Eigen::VectorXd&) { return alpha; }, rng);
      balance = std::max(balance, zrp_detailed_balance_defect(sg, c, t, t.fugacity(alpha)));
    }
  }
  return {sep <= 1e-12 && zrp <= 1e-12 && balance <= 1e-12,
          "SEP residual " + fmt("%.1e", sep) + ", ZRP sector residual " + fmt("%.1e", zrp) +
              ", detailed-balance defect " + fmt("%.1e", balance)};
}

Outcome thermo_check() {
  ThermoTables lin(RateFunction::linear());
  ThermoTables ind(RateFunction::indicator());
  double e_lin = 0.0, e_ind = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double a = 10.0 * i / 1000.0;
    e_lin = std::max(e_lin, std::abs(lin.fugacity_numeric(a) - a));
    e_lin = std::max(e_lin, std::abs(lin.fugacity(a) - a));
    const double b = 20.0 * i / 1000.0;
    e_ind = std::max(e_ind, std::abs(ind.fugacity_numeric(b) - b / (1 + b)));
    e_ind = std::max(e_ind, std::abs(ind.fugacity(b) - b / (1 + b)));
  }
  ThermoTables tab(RateFunction::tabulated({0.0, 1.0, 1.7, 2.1, 2.3, 2.4}));
  Rng rng(5, 0, StreamPurpose::test);
  double violation = 0.0;
  for (const ThermoTables* t : {&lin, &ind, &tab}) {
    for (int i = 0; i < 1000; ++i) {
      const double a = 10.0 * rng.uniform(), b = 10.0 * rng.uniform();
      const double gap = std::abs(t->fugacity_numeric(a) - t->fugacity_numeric(b)) - t->rate().g_star() * std::abs(a - b);
      violation = std::max(violation, gap);
    }
  }
  return {e_lin <= 1e-10 && e_ind <= 1e-10 && violation <= 1e-12,
          "linear err " + fmt("%.1e", e_lin) + ", indicator err " + fmt("%.1e", e_ind) + ", worst Lipschitz excess " +
              fmt("%.1e", violation)};
}

// Random band-limited data with modes |k_i| <= 3 in fractional coordinates.
std::function<double(const Eigen::VectorXd&)> band_limited(const Eigen::MatrixXd& basis, std::mt19937& gen) {
  const int d = static_cast<int>(basis.rows());
  std::uniform_real_distribution<double> amp(-0.05, 0.05);
  std::vector<std::pair<Eigen::VectorXd, std::pair<double, double>>> modes;
  const int K = 3;
  const int count = d == 1 ? 2 * K + 1 : (2 * K + 1) * (2 * K + 1);
  for (int m = 0; m < count; ++m) {
    Eigen::VectorXd k(d);
    int rem = m;
    for (int i = 0; i < d; ++i) {
      k[i] = rem % (2 * K + 1) - K;
      rem /= 2 * K + 1;
    }
    if (k.isZero()) continue;
    modes.push_back({k, {amp(gen), amp(gen)}});
  }
  Eigen::MatrixXd inv = basis.inverse();
  return [modes, inv](const Eigen::VectorXd& u) {
    Eigen::VectorXd s = inv * u;
    double v = 0.5;
    for (const auto& [k, ab] : modes) {
      const double phase = 2 * kPi * k.dot(s);
      v += ab.first * std::cos(phase) + ab.second * std::sin(phase);
    }
    return v;
  };
}

Outcome pde_check() {
  std::mt19937 gen(314159);
  std::string detail;
  bool pass = true;
  struct Setup {
    const char* name;
    LatticeSpec spec;
    int M;
    double t;
  };
  std::vector<Setup> setups = {{"d=1", testing::bundled("ex1_alternating"), 256, 0.02},
                               {"d=2", testing::bundled("ex2_hexagonal_weighted"), 128, 0.05}};
  for (const Setup& s : setups) {
    DiffusionMatrix D = diffusion_matrix(solve_harmonic(s.spec.graph, s.spec.basis));
    auto rho0 = band_limited(s.spec.basis, gen);
    double err[2];
    double drift = 0.0;
    for (int h = 0; h < 2; ++h) {
      TorusGrid grid(s.spec.basis, s.M >> h);
      TorusField init = sample_field(grid, rho0);
      TorusField fd = solve_fd(init, D, Nonlinearity::identity(), s.t);
      TorusField sp = spectral_solve(init, D, s.t);
      err[h] = 0.0;
      for (std::size_t i = 0; i < fd.values.size(); ++i) err[h] = std::max(err[h], std::abs(fd.values[i] - sp.values[i]));
      if (h == 0) drift = std::abs(fd.mass() - init.mass()) / init.mass() / s.t;
    }
    const double ratio = err[1] / err[0];
    const bool ok = err[0] <= 1e-4 && ratio >= 3.5 && drift <= 1e-12;
    pass = pass && ok;
    detail += std::string(s.name) + " M=" + std::to_string(s.M) + ": err " + fmt("%.1e", err[0]) + ", halving ratio " +
              fmt("%.2f", ratio) + ", mass drift/t " + fmt("%.1e", drift) + (s.M == 128 ? "" : "; ");
  }
  return {pass, detail};
}

Outcome convergence_check(const std::string& process, double bound) {
  ExperimentConfig cfg = ExperimentConfig::from_json(nlohmann::json{
      {"lattice", "ex1_alternating"},
      {"process", process},
      {"rate", "linear"},
      {"realization", "harmonic"},
      {"N", {16, 32, 64}},
      {"replicas", 50},
      {"times", {0.05}},
      {"rho0", "0.5 + 0.3*cos(pi*x1)"},
      {"pde_grid", 256},
      {"seed", 1}});
  ConvergenceReport rep = run_convergence(cfg);
  bool decreasing = true;
  std::string detail = process + " (grid M=" + std::to_string(rep.estimator_resolution) + "): L1";
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    detail += " N=" + std::to_string(rep.rows[i].N) + " " + fmt("%.4f", rep.rows[i].l1_error) + "+-" +
              fmt("%.4f", rep.rows[i].std_error);
    if (i > 0 && !(rep.rows[i].l1_error < rep.rows[i - 1].l1_error)) decreasing = false;
  }
  const ConvergenceRow& last = rep.rows.back();
  const bool small = last.l1_error - 2.0 * last.std_error <= bound;
  detail += decreasing ? ", decreasing" : ", NOT decreasing";
  detail += ", bound " + fmt("%.2f", bound) + (small ? " met" : " missed");
  return {decreasing && small, detail};
}

Outcome basis_change_check() {
  std::mt19937 gen(2718);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const int d = 2 + k % 2;
    QuotientGraph g = k % 4 == 0 ? testing::bundled("ex2_hexagonal_weighted").graph : random_graph(gen, d, 1 + k % 4);
    const int dim = g.dimension();
    Eigen::MatrixXd U = Eigen::MatrixXd::Identity(dim, dim) + 0.3 * Eigen::MatrixXd::Random(dim, dim);
    Eigen::MatrixXd A = random_unimodular(gen, dim).cast<double>();
    Eigen::MatrixXd D = diffusion_matrix(solve_harmonic(g, U)).entries();
    Eigen::MatrixXd DA = diffusion_matrix(solve_harmonic(g, A * U)).entries();
    Eigen::MatrixXd expected = A * D * A.transpose();
    worst = std::max(worst, max_abs(DA - expected));
  }
  return {worst <= 1e-9, "max entry error over 20 unimodular transforms " + fmt("%.1e", worst)};
}

Outcome replacement_check() {
  LatticeSpec ex1 = testing::bundled("ex1_alternating");
  Realization h = solve_harmonic(ex1.graph, ex1.basis);
  ThermoTables thermo(RateFunction::linear());
  std::vector<double> times;
  for (int i = 1; i <= 20; ++i) times.push_back(0.005 * i);
  std::vector<double> averages;
  std::string detail = "time-averaged V:";
  for (int N : {32, 64, 128}) {
    ScaledGraph sg(ex1.graph, N);
    double total = 0.0;
    int count = 0;
    for (std::uint64_t r = 0; r < 4; ++r) {
      Rng rng(7, r, StreamPurpose::initial_state);
      Configuration c0 = sample_product(sg, h, Process::zero_range, thermo,
                                        [](const Eigen::VectorXd&) { return 1.0; }, rng);
      SimResult res = simulate(sg, thermo.rate(), c0, {Process::zero_range, times.back(), times, 7, r});
      for (double v : replacement_diagnostic(sg, res, thermo, 0.25)) {
        total += v;
        ++count;
      }
    }
    averages.push_back(total / count);
    detail += " N=" + std::to_string(N) + " " + fmt("%.4f", averages.back());
  }
  const bool decreasing = averages[1] < averages[0] && averages[2] < averages[1];
  return {decreasing, detail + (decreasing ? ", decreasing" : ", NOT decreasing")};
}

}  // namespace

int main() {
  run(1, "golden diffusion matrices", 1.0, golden_diffusion);
  run(2, "harmonic solve golden values", 1.0, harmonic_golden);
  run(3, "standard realization", 10.0, standard_realization_check);
  run(4, "exact stationarity", 5.0, stationarity_check);
  run(5, "thermodynamics", 2.0, thermo_check);
  run(6, "PDE solver vs spectral oracle", 30.0, pde_check);
  run(7, "hydrodynamic convergence", 300.0, [] {
    Outcome sep = convergence_check("sep", 0.05);
    Outcome zrp = convergence_check("zrp", 0.08);
    return Outcome{sep.pass && zrp.pass, sep.detail + "; " + zrp.detail};
  });
  run(8, "basis-change law", 2.0, basis_change_check);
  run(9, "replacement diagnostic", 120.0, replacement_check);
  std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
