#include "crystal/pde.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace crystal {

EffectiveMatrix::EffectiveMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  // Same checks as a diffusion matrix.
  entries_ = DiffusionMatrix(entries_).entries();
}

double EffectiveMatrix::max_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(entries_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

EffectiveMatrix effective_matrix(const DiffusionMatrix& D, const Eigen::MatrixXd& basis) {
  const int d = D.dimension();
  if (basis.rows() != d || basis.cols() != d) throw std::invalid_argument("basis has the wrong shape");
  if (std::abs(basis.determinant()) < 1e-14 * std::pow(std::max(basis.norm(), 1e-300), d))
    throw std::invalid_argument("basis is singular");
  Eigen::MatrixXd inv = basis.inverse();
  return EffectiveMatrix(inv * D.entries() * inv.transpose());
}

Nonlinearity Nonlinearity::identity() {
  Nonlinearity n;
  n.psi = [](double x) { return x; };
  n.lipschitz = 1.0;
  n.linear = true;
  return n;
}

Nonlinearity Nonlinearity::from(const ThermoTables& thermo) {
  if (thermo.rate().kind() == RateFunction::Kind::linear) return identity();
  auto tables = std::make_shared<const ThermoTables>(thermo);
  Nonlinearity n;
  n.psi = [tables](double x) { return tables->fugacity(x); };
  n.lipschitz = thermo.rate().g_star();
  n.linear = false;
  return n;
}

double max_stable_dt(const TorusGrid& grid, const EffectiveMatrix& Dt, const Nonlinearity& psi) {
  const double h = 1.0 / grid.resolution();
  return 0.5 * h * h / (grid.dimension() * Dt.max_eigenvalue() * std::max(1.0, psi.lipschitz));
}

double default_dt(const TorusGrid& grid, const EffectiveMatrix& Dt, const Nonlinearity& psi) {
  return 0.5 * max_stable_dt(grid, Dt, psi);
}

TorusField solve_fd(const TorusField& rho0, const DiffusionMatrix& D, const Nonlinearity& psi,
                    double t, std::optional<double> dt) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("time must be >= 0");
  for (double v : rho0.values)
    if (!std::isfinite(v)) throw std::invalid_argument("initial field must be finite");
  const TorusGrid& grid = rho0.grid;
  const int d = grid.dimension();
  const EffectiveMatrix Dt = effective_matrix(D, grid.basis());
  const double limit = max_stable_dt(grid, Dt, psi);
  double step = dt.value_or(default_dt(grid, Dt, psi));
  if (!(step > 0.0)) throw std::invalid_argument("time step must be positive");
  if (step > limit * (1.0 + 1e-12))
    throw std::invalid_argument("time step " + std::to_string(step) +
                                " exceeds the stability bound " + std::to_string(limit));
  if (t == 0.0) return rho0;
  const long steps = static_cast<long>(std::ceil(t / step - 1e-12));
  step = t / static_cast<double>(steps);

  // Periodic neighbor tables per axis.
  const int n = grid.size();
  std::vector<std::vector<int>> plus(static_cast<std::size_t>(d), std::vector<int>(static_cast<std::size_t>(n)));
  std::vector<std::vector<int>> minus = plus;
  for (int p = 0; p < n; ++p) {
    Eigen::VectorXi idx = grid.multi_index(p);
    for (int a = 0; a < d; ++a) {
      Eigen::VectorXi q = idx;
      q[a] += 1;
      plus[static_cast<std::size_t>(a)][static_cast<std::size_t>(p)] = grid.flat_index(q);
      q[a] -= 2;
      minus[static_cast<std::size_t>(a)][static_cast<std::size_t>(p)] = grid.flat_index(q);
    }
  }

  const double h2 = 1.0 / (static_cast<double>(grid.resolution()) * grid.resolution());
  std::vector<double> rho = rho0.values;
  std::vector<double> w(static_cast<std::size_t>(n));
  for (long s = 0; s < steps; ++s) {
    if (psi.linear) {
      w = rho;
    } else {
      for (int p = 0; p < n; ++p) w[static_cast<std::size_t>(p)] = psi.psi(rho[static_cast<std::size_t>(p)]);
    }
    for (int p = 0; p < n; ++p) {
      const std::size_t up = static_cast<std::size_t>(p);
      double lap = 0.0;
      for (int a = 0; a < d; ++a) {
        const auto& pa = plus[static_cast<std::size_t>(a)];
        const auto& ma = minus[static_cast<std::size_t>(a)];
        lap += Dt(a, a) * (w[static_cast<std::size_t>(pa[up])] - 2.0 * w[up] + w[static_cast<std::size_t>(ma[up])]);
        for (int b = a + 1; b < d; ++b) {
          const auto& pb = plus[static_cast<std::size_t>(b)];
          const auto& mb = minus[static_cast<std::size_t>(b)];
          const double cross = w[static_cast<std::size_t>(pb[static_cast<std::size_t>(pa[up])])] -
                               w[static_cast<std::size_t>(mb[static_cast<std::size_t>(pa[up])])] -
                               w[static_cast<std::size_t>(pb[static_cast<std::size_t>(ma[up])])] +
                               w[static_cast<std::size_t>(mb[static_cast<std::size_t>(ma[up])])];
          lap += 0.5 * Dt(a, b) * cross;
        }
      }
      rho[up] += step * lap / h2;
    }
  }
  return TorusField(grid, std::move(rho));
}

namespace {
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

TorusField spectral_solve(const TorusField& rho0, const DiffusionMatrix& D, double t,
                          const Nonlinearity& psi) {
  if (!psi.linear) throw std::invalid_argument("spectral solve requires a linear equation");
  if (!(t >= 0.0)) throw std::invalid_argument("time must be >= 0");
  const TorusGrid& grid = rho0.grid;
  if (t == 0.0) return rho0;
  const int d = grid.dimension();
  const int M = grid.resolution();
  const int n = grid.size();
  const EffectiveMatrix Dt = effective_matrix(D, grid.basis());

  fftw_complex* buf = fftw_alloc_complex(static_cast<std::size_t>(n));
  std::vector<int> dims(static_cast<std::size_t>(d), M);
  fftw_plan forward;
  fftw_plan backward;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    forward = fftw_plan_dft(d, dims.data(), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    backward = fftw_plan_dft(d, dims.data(), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  for (int p = 0; p < n; ++p) {
    buf[p][0] = rho0.values[static_cast<std::size_t>(p)];
    buf[p][1] = 0.0;
  }
  fftw_execute(forward);
  const double four_pi2 = 4.0 * std::numbers::pi * std::numbers::pi;
  Eigen::VectorXd k(d);
  for (int p = 0; p < n; ++p) {
    Eigen::VectorXi idx = grid.multi_index(p);
    bool nyquist = false;
    for (int a = 0; a < d; ++a) {
      int ka = idx[a] <= M / 2 ? idx[a] : idx[a] - M;
      if (M % 2 == 0 && idx[a] == M / 2) nyquist = true;
      k[a] = ka;
    }
    double factor = std::exp(-four_pi2 * k.dot(Dt.entries() * k) * t);
    // The Nyquist mode is real on the grid; average its two aliases.
    if (nyquist) {
      Eigen::VectorXd k2 = k;
      for (int a = 0; a < d; ++a)
        if (M % 2 == 0 && idx[a] == M / 2) k2[a] = -k[a];
      factor = 0.5 * (factor + std::exp(-four_pi2 * k2.dot(Dt.entries() * k2) * t));
    }
    buf[p][0] *= factor / n;
    buf[p][1] *= factor / n;
  }
  fftw_execute(backward);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int p = 0; p < n; ++p) out[static_cast<std::size_t>(p)] = buf[p][0];
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }
  fftw_free(buf);
  return TorusField(grid, std::move(out));
}

double l1_distance(const TorusField& a, const TorusField& b) {
  if (!(a.grid == b.grid)) throw std::invalid_argument("fields live on different grids");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) sum += std::abs(a.values[i] - b.values[i]);
  return sum / static_cast<double>(a.values.size());
}

TorusField cell_average(const TorusField& nodal, int M) {
  const TorusGrid& fine = nodal.grid;
  const int Mf = fine.resolution();
  if (M <= 0 || Mf % M != 0)
    throw std::invalid_argument("coarse resolution must divide the fine resolution");
  const int ratio = Mf / M;
  const int d = fine.dimension();
  TorusGrid coarse(fine.basis(), M);
  TorusField out(coarse, 0.0);

  // Per-axis trapezoid weights over offsets 0..ratio.
  std::vector<double> weight(static_cast<std::size_t>(ratio + 1), 1.0 / ratio);
  weight.front() *= 0.5;
  weight.back() *= 0.5;
  const int span = ratio + 1;
  int stencil = 1;
  for (int a = 0; a < d; ++a) stencil *= span;

  Eigen::VectorXi q(d);
  for (int c = 0; c < coarse.size(); ++c) {
    Eigen::VectorXi base = coarse.multi_index(c) * ratio;
    double sum = 0.0;
    for (int s = 0; s < stencil; ++s) {
      int rem = s;
      double wgt = 1.0;
      for (int a = d - 1; a >= 0; --a) {
        const int off = rem % span;
        rem /= span;
        q[a] = base[a] + off;
        wgt *= weight[static_cast<std::size_t>(off)];
      }
      sum += wgt * nodal.values[static_cast<std::size_t>(fine.flat_index(q))];
    }
    out.values[static_cast<std::size_t>(c)] = sum;
  }
  return out;
}

}  // namespace crystal
