#include "crystal/realization.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace crystal {

Realization::Realization(QuotientGraph graph, Eigen::MatrixXd basis, Eigen::MatrixXd positions)
    : graph_(std::move(graph)), basis_(std::move(basis)), positions_(std::move(positions)) {
  const int d = graph_.dimension();
  if (basis_.rows() != d || basis_.cols() != d)
    throw std::invalid_argument("basis must be d x d");
  if (positions_.rows() != d || positions_.cols() != graph_.num_vertices())
    throw std::invalid_argument("positions must be d x |V0|");
  if (!basis_.allFinite() || !positions_.allFinite())
    throw std::invalid_argument("realization entries must be finite");
  if (std::abs(basis_.determinant()) < 1e-14 * std::pow(basis_.norm(), d))
    throw std::invalid_argument("lattice basis is singular");
}

DiffusionMatrix::DiffusionMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() == 0)
    throw std::domain_error("diffusion matrix must be square");
  if (!entries_.allFinite()) throw std::domain_error("diffusion matrix has non-finite entries");
  const double scale = std::max(entries_.cwiseAbs().maxCoeff(), 1e-300);
  if ((entries_ - entries_.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw std::domain_error("diffusion matrix is not symmetric");
  entries_ = 0.5 * (entries_ + entries_.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(entries_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw std::domain_error("diffusion matrix is not positive definite");
}

double DiffusionMatrix::max_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(entries_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

Eigen::VectorXd edge_vector(const Realization& r, int dart) {
  const Dart& e = r.graph().dart(dart);
  return r.positions().col(e.head) - r.positions().col(e.tail) +
         r.basis() * e.shift.cast<double>();
}

DiffusionMatrix diffusion_matrix(const Realization& r) {
  const int d = r.dimension();
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(d, d);
  for (int e = 0; e < r.graph().num_darts(); ++e) {
    Eigen::VectorXd v = edge_vector(r, e);
    D.noalias() += r.graph().dart(e).weight * v * v.transpose();
  }
  return DiffusionMatrix(D / r.graph().num_vertices());
}

double energy(const Realization& r) {
  double sum = 0.0;
  for (int e = 0; e < r.graph().num_darts(); ++e)
    sum += r.graph().dart(e).weight * edge_vector(r, e).squaredNorm();
  return 0.5 * sum;
}

Eigen::VectorXd harmonic_residual(const Realization& r) {
  const int n = r.graph().num_vertices();
  Eigen::VectorXd out(n);
  for (int v = 0; v < n; ++v) {
    Eigen::VectorXd tension = Eigen::VectorXd::Zero(r.dimension());
    for (int e : r.graph().out_darts(v)) tension += r.graph().dart(e).weight * edge_vector(r, e);
    out[v] = tension.cwiseAbs().maxCoeff();
  }
  return out;
}

Realization solve_harmonic(const QuotientGraph& g, const Eigen::MatrixXd& basis) {
  const int n = g.num_vertices();
  const int d = g.dimension();
  if (basis.rows() != d || basis.cols() != d) throw std::invalid_argument("basis must be d x d");
  if (std::abs(basis.determinant()) < 1e-14 * std::pow(basis.norm(), d))
    throw std::invalid_argument("lattice basis is rank-deficient");

  // Weighted Laplacian L x = b, one right-hand side per coordinate, where
  // b(v) = sum_{e out of v} p(e) U shift(e). Loops cancel in L.
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, d);
  for (const Dart& e : g.darts()) {
    L(e.tail, e.tail) += e.weight;
    L(e.tail, e.head) -= e.weight;
    b.row(e.tail) += e.weight * (basis * e.shift.cast<double>()).transpose();
  }
  Eigen::MatrixXd positions = Eigen::MatrixXd::Zero(d, n);
  if (n > 1) {
    Eigen::MatrixXd reduced = L.bottomRightCorner(n - 1, n - 1);
    Eigen::LLT<Eigen::MatrixXd> llt(reduced);
    if (llt.info() != Eigen::Success)
      throw std::logic_error("harmonic system is singular; is the quotient graph connected?");
    Eigen::MatrixXd x = llt.solve(b.bottomRows(n - 1));
    positions.rightCols(n - 1) = x.transpose();
  }
  return Realization(g, basis, positions);
}

StandardRealization standard_realization(const Realization& harmonic) {
  const int d = harmonic.dimension();
  Eigen::MatrixXd D = diffusion_matrix(harmonic).entries();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(D);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0)
    throw std::domain_error("diffusion matrix is not positive definite");

  // D = P^T diag(lambda) P with P's rows the eigenvectors, lambda descending.
  std::vector<int> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return es.eigenvalues()[a] > es.eigenvalues()[b];
  });
  Eigen::MatrixXd P(d, d);
  Eigen::VectorXd lambda(d);
  for (int i = 0; i < d; ++i) {
    Eigen::VectorXd v = es.eigenvectors().col(order[static_cast<std::size_t>(i)]);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] < 0) v = -v;
    P.row(i) = v.transpose();
    lambda[i] = es.eigenvalues()[order[static_cast<std::size_t>(i)]];
  }
  const double log_det = lambda.array().log().sum();
  Eigen::VectorXd scale(d);
  for (int i = 0; i < d; ++i)
    scale[i] = std::exp((log_det - d * std::log(lambda[i])) / (2.0 * d));
  Eigen::MatrixXd A = scale.asDiagonal() * P;
  return {solve_harmonic(harmonic.graph(), A * harmonic.basis()), A};
}

DiffusionMatrix transform_diffusion(const DiffusionMatrix& D, const Eigen::MatrixXd& A) {
  if (A.rows() != D.dimension() || A.cols() != D.dimension())
    throw std::invalid_argument("transform has the wrong shape");
  if (std::abs(A.determinant()) < 1e-14 * std::pow(std::max(A.norm(), 1e-300), A.rows()))
    throw std::invalid_argument("transform is singular");
  return DiffusionMatrix(A * D.entries() * A.transpose());
}

TorusPoint reduce_to_torus(const Eigen::MatrixXd& basis, const Eigen::VectorXd& point) {
  Eigen::VectorXd frac = basis.partialPivLu().solve(point);
  for (Eigen::Index i = 0; i < frac.size(); ++i) {
    frac[i] -= std::floor(frac[i]);
    if (frac[i] >= 1.0) frac[i] = 0.0;
  }
  return {basis * frac, frac};
}

TorusPoint scaled_position(const Realization& r, int N, int v0, const GroupElement& sigma) {
  if (N < 1) throw std::invalid_argument("scale N must be positive");
  Eigen::VectorXd p = (r.positions().col(v0) + r.basis() * sigma.coords.cast<double>()) / N;
  return reduce_to_torus(r.basis(), p);
}

}  // namespace crystal
