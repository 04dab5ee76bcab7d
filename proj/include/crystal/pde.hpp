#pragma once

// Reference solvers for d/dt rho = div(D grad Psi(rho)) on the torus R^d / U Z^d.
//
// In fractional coordinates s = U^{-1} u the operator becomes
// sum_ij Dt_ij d_i d_j with Dt = U^{-1} D U^{-T}, so all solvers work on the
// unit torus with the effective matrix Dt.

#include "crystal/realization.hpp"
#include "crystal/thermo.hpp"
#include "crystal/torus_field.hpp"

#include <functional>
#include <optional>

namespace crystal {

class EffectiveMatrix {
public:
  /// Throws std::domain_error unless symmetric positive definite.
  explicit EffectiveMatrix(Eigen::MatrixXd entries);

  const Eigen::MatrixXd& entries() const { return entries_; }
  int dimension() const { return static_cast<int>(entries_.rows()); }
  double operator()(int i, int j) const { return entries_(i, j); }
  double max_eigenvalue() const;

private:
  Eigen::MatrixXd entries_;
};

/// Dt = U^{-1} D U^{-T}. Throws std::invalid_argument for singular U.
EffectiveMatrix effective_matrix(const DiffusionMatrix& D, const Eigen::MatrixXd& basis);

/// The map rho -> Psi(rho) with its Lipschitz constant.
struct Nonlinearity {
  std::function<double(double)> psi;
  double lipschitz = 1.0;
  bool linear = false;

  static Nonlinearity identity();
  /// Psi of a zero-range rate; linear rates are recognized as the identity.
  static Nonlinearity from(const ThermoTables& thermo);
};

/// Largest stable explicit step: 0.5 h^2 / (d lambda_max(Dt) max(1, L)).
double max_stable_dt(const TorusGrid& grid, const EffectiveMatrix& Dt, const Nonlinearity& psi);
/// Default step: half of max_stable_dt.
double default_dt(const TorusGrid& grid, const EffectiveMatrix& Dt, const Nonlinearity& psi);

/// Explicit Euler with the conservative (2d+1)-point diagonal stencil plus the
/// 4-corner cross-derivative stencil. The step count is ceil(t / dt) with the
/// step shrunk to land on t exactly. Throws std::invalid_argument when dt
/// exceeds max_stable_dt.
TorusField solve_fd(const TorusField& rho0, const DiffusionMatrix& D, const Nonlinearity& psi,
                    double t, std::optional<double> dt = std::nullopt);

/// Exact solution of the linear equation for the grid-sampled data via the
/// DFT: mode k decays by exp(-4 pi^2 k^T Dt k t), k taken in the symmetric
/// range. Throws std::invalid_argument for a nonlinear Psi.
TorusField spectral_solve(const TorusField& rho0, const DiffusionMatrix& D, double t,
                          const Nonlinearity& psi = Nonlinearity::identity());

/// sum |a - b| * cell volume / volume. Throws on grid mismatch.
double l1_distance(const TorusField& a, const TorusField& b);

/// Average of a nodal field over the cells [j/M, (j+1)/M)^d of a coarser grid
/// (trapezoid rule per axis). The fine resolution must be a multiple of M.
TorusField cell_average(const TorusField& nodal, int M);

}  // namespace crystal
