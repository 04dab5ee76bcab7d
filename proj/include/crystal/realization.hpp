#pragma once

// Periodic realizations of a crystal lattice in R^d.
//
// A realization is fixed by the lattice basis U (columns u_i) and the
// positions x(v) of the fundamental-domain vertices; the lift (v, s) sits at
// x(v) + U s. Harmonic realizations balance the weighted edge vectors at
// every vertex; the standard realization is the harmonic one whose diffusion
// matrix is isotropic at fixed cell volume.

#include "crystal/lattice.hpp"

#include <Eigen/Dense>

namespace crystal {

class Realization {
public:
  /// positions: d x |V0|. Throws std::invalid_argument on shape mismatch,
  /// singular basis or non-finite entries.
  Realization(QuotientGraph graph, Eigen::MatrixXd basis, Eigen::MatrixXd positions);

  const QuotientGraph& graph() const { return graph_; }
  const Eigen::MatrixXd& basis() const { return basis_; }
  const Eigen::MatrixXd& positions() const { return positions_; }
  Eigen::VectorXd position(int v) const { return positions_.col(v); }
  int dimension() const { return graph_.dimension(); }

  /// |det U|, the volume of the fundamental parallelotope.
  double cell_volume() const { return std::abs(basis_.determinant()); }

private:
  QuotientGraph graph_;
  Eigen::MatrixXd basis_;
  Eigen::MatrixXd positions_;
};

/// Symmetric positive definite d x d matrix (checked on construction).
class DiffusionMatrix {
public:
  explicit DiffusionMatrix(Eigen::MatrixXd entries);

  const Eigen::MatrixXd& entries() const { return entries_; }
  int dimension() const { return static_cast<int>(entries_.rows()); }
  double operator()(int i, int j) const { return entries_(i, j); }
  double max_eigenvalue() const;

private:
  Eigen::MatrixXd entries_;
};

/// Point of the flat torus R^d / U Z^d, stored in physical coordinates with
/// fractional (basis) coordinates in [0, 1)^d.
struct TorusPoint {
  Eigen::VectorXd coords;
  Eigen::VectorXd fractional;
};

/// x(head) - x(tail) + U shift(e).
Eigen::VectorXd edge_vector(const Realization& r, int dart);

/// (1/|V0|) sum over darts of p(e) v(e) v(e)^T.
DiffusionMatrix diffusion_matrix(const Realization& r);

/// (1/2) sum over darts of p(e) |v(e)|^2.
double energy(const Realization& r);

/// Per-vertex infinity norm of the tension sum_{e out of v} p(e) v(e).
Eigen::VectorXd harmonic_residual(const Realization& r);

/// Harmonic realization for the lattice group U Z^d, pinned at x(first vertex) = 0.
Realization solve_harmonic(const QuotientGraph& g, const Eigen::MatrixXd& basis);

struct StandardRealization {
  Realization realization;
  Eigen::MatrixXd transform;  // A; the new basis is A U
};

/// Rescales the lattice group of a harmonic realization so the diffusion
/// matrix becomes (det D)^{1/d} I with |det A| = 1. Throws std::domain_error
/// if D is not SPD.
StandardRealization standard_realization(const Realization& harmonic);

/// A D A^T. Throws std::invalid_argument if A is singular.
DiffusionMatrix transform_diffusion(const DiffusionMatrix& D, const Eigen::MatrixXd& A);

/// (x(v0) + U sigma) / N reduced into the fundamental parallelotope.
TorusPoint scaled_position(const Realization& r, int N, int v0, const GroupElement& sigma);

/// Reduces a physical point into the fundamental parallelotope of `basis`.
TorusPoint reduce_to_torus(const Eigen::MatrixXd& basis, const Eigen::VectorXd& point);

}  // namespace crystal
