#include "crystal/realization.hpp"
#include "helpers.hpp"

#include <doctest.h>
#include <stdexcept>

#include <random>

using namespace crystal;

namespace {

Eigen::MatrixXd mat2(double a, double b, double c, double d) {
  Eigen::MatrixXd m(2, 2);
  m << a, b, c, d;
  return m;
}

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

// Random connected quotient graph of full cycle rank with positive weights.
QuotientGraph random_graph(std::mt19937& gen, int d, int n) {
  std::uniform_real_distribution<double> w(0.2, 3.0);
  std::uniform_int_distribution<int> sh(-1, 1);
  std::vector<std::string> ids;
  for (int v = 0; v < n; ++v) ids.push_back("v" + std::to_string(v));
  std::vector<EdgeSpec> edges;
  for (int v = 1; v < n; ++v) {  // spanning path
    Eigen::VectorXi s(d);
    for (int i = 0; i < d; ++i) s[i] = sh(gen);
    edges.push_back({ids[static_cast<std::size_t>(v - 1)], ids[static_cast<std::size_t>(v)], s, w(gen)});
  }
  std::uniform_int_distribution<int> pick(0, n - 1);
  for (int i = 0; i < d; ++i) {  // one generator per axis
    Eigen::VectorXi s = Eigen::VectorXi::Zero(d);
    s[i] = 1;
    const auto v = ids[static_cast<std::size_t>(pick(gen))];  // a loop, so its shift is a cycle
    edges.push_back({v, v, s, w(gen)});
  }
  const int extra = std::uniform_int_distribution<int>(0, 3)(gen);
  for (int k = 0; k < extra; ++k) {
    Eigen::VectorXi s(d);
    for (int i = 0; i < d; ++i) s[i] = sh(gen);
    const int a = pick(gen), b = pick(gen);
    if (a == b && s.isZero()) continue;
    edges.push_back({ids[static_cast<std::size_t>(a)], ids[static_cast<std::size_t>(b)], s, w(gen)});
  }
  return QuotientGraph::from_edges(d, ids, edges);
}

Eigen::MatrixXd random_basis(std::mt19937& gen, int d) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd b = Eigen::MatrixXd::Identity(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) b(i, j) += 0.4 * u(gen);
  return b;
}

}  // namespace

TEST_CASE("diffusion matrices of the small examples") {
  SUBCASE("single loop") {
    Realization r = solve_harmonic(testing::ring_1a().graph, Eigen::MatrixXd::Identity(1, 1));
    CHECK(diffusion_matrix(r)(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(energy(r) == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("two-vertex ring, given positions") {
    LatticeSpec s = testing::ring_1b();
    Realization r(s.graph, s.basis, *s.positions);
    CHECK(diffusion_matrix(r)(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(harmonic_residual(r).maxCoeff() < 1e-14);
  }
  SUBCASE("square lattices") {
    LatticeSpec a = testing::bundled("square_2a");
    CHECK(max_abs(diffusion_matrix(solve_harmonic(a.graph, a.basis)).entries() - 2.0 * Eigen::MatrixXd::Identity(2, 2)) < 1e-14);
    LatticeSpec b = testing::bundled("square_2b");
    CHECK(max_abs(diffusion_matrix(solve_harmonic(b.graph, b.basis)).entries() - mat2(4, 2, 2, 2)) < 1e-14);
  }
  SUBCASE("weighted hexagonal") {
    LatticeSpec s = testing::bundled("ex2_hexagonal_weighted");
    Realization r = solve_harmonic(s.graph, s.basis);
    CHECK(max_abs(diffusion_matrix(r).entries() - mat2(5.0 / 9, 1.0 / 9, 1.0 / 9, 2.0 / 9)) < 1e-14);
    Eigen::Vector2d shift = r.position(1) - s.positions->col(1);
    CHECK(shift[0] == doctest::Approx(1.0 / 3).epsilon(1e-14));
    CHECK(shift[1] == doctest::Approx(-1.0 / 3).epsilon(1e-14));
  }
}

TEST_CASE("harmonic solve for alternating rates") {
  LatticeSpec s = testing::bundled("ex1_alternating");
  Realization r = solve_harmonic(s.graph, s.basis);
  CHECK(r.position(0)[0] == 0.0);
  CHECK(std::abs(r.position(1)[0] - 4.0 / 3.0) < 1e-14);
  CHECK(diffusion_matrix(r)(0, 0) == doctest::Approx(8.0 / 3.0).epsilon(1e-14));
  CHECK(harmonic_residual(r).maxCoeff() < 1e-13);
  // The evenly spaced positions are not harmonic.
  Realization given(s.graph, s.basis, *s.positions);
  CHECK(harmonic_residual(given).maxCoeff() > 0.1);
}

TEST_CASE("realization properties on random graphs") {
  std::mt19937 gen(20261019);
  for (int trial = 0; trial < 120; ++trial) {
    const int d = 1 + trial % 3;
    const int n = 1 + (trial / 3) % 5;
    QuotientGraph g = random_graph(gen, d, n);
    Eigen::MatrixXd U = random_basis(gen, d);
    Realization h = solve_harmonic(g, U);
    DiffusionMatrix D = diffusion_matrix(h);
    CAPTURE(trial);

    // E = |V0| tr(D) / 2.
    CHECK(energy(h) == doctest::Approx(g.num_vertices() * D.entries().trace() / 2).epsilon(1e-12));
    CHECK(harmonic_residual(h).maxCoeff() < 1e-10);

    // Translating every vertex leaves D unchanged.
    Eigen::MatrixXd moved = h.positions();
    moved.colwise() += Eigen::VectorXd::Constant(d, 0.37);
    CHECK(max_abs(diffusion_matrix(Realization(g, U, moved)).entries() - D.entries()) < 1e-12);

    // Harmonic positions minimize the energy among perturbations.
    std::normal_distribution<double> noise(0.0, 0.1);
    if (trial % 10 == 0) {
      for (int k = 0; k < 100; ++k) {
        Eigen::MatrixXd p = h.positions();
        for (int i = 0; i < p.size(); ++i) p.data()[i] += noise(gen);
        CHECK(energy(Realization(g, U, p)) >= energy(h) - 1e-12);
      }
    }

    // Standard realization: isotropic with the same determinant.
    StandardRealization s = standard_realization(h);
    Eigen::MatrixXd Ds = diffusion_matrix(s.realization).entries();
    const double scale = std::pow(D.entries().determinant(), 1.0 / d);
    CHECK(max_abs(Ds - scale * Eigen::MatrixXd::Identity(d, d)) < 1e-8 * scale);
    CHECK(std::abs(std::abs(s.transform.determinant()) - 1.0) < 1e-12);
    CHECK(max_abs(transform_diffusion(D, s.transform).entries() - Ds) < 1e-10 * scale);
  }
}

TEST_CASE("standard realization of the sheared square lattice") {
  LatticeSpec s = testing::bundled("square_2b");
  StandardRealization st = standard_realization(solve_harmonic(s.graph, s.basis));
  CHECK((diffusion_matrix(st.realization).entries() - 2.0 * Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-9);
  CHECK(std::abs(std::abs(st.transform.determinant()) - 1.0) < 1e-12);
}

TEST_CASE("basis change law") {
  LatticeSpec s = testing::bundled("ex2_hexagonal_weighted");
  DiffusionMatrix D = diffusion_matrix(solve_harmonic(s.graph, s.basis));
  Eigen::MatrixXd A = mat2(2, 1, 1, 1);
  DiffusionMatrix DA = diffusion_matrix(solve_harmonic(s.graph, A * s.basis));
  CHECK(max_abs(DA.entries() - A * D.entries() * A.transpose()) < 1e-12);
  CHECK(max_abs(transform_diffusion(DiffusionMatrix(2.0 * Eigen::MatrixXd::Identity(2, 2)),
                                    mat2(2, 0, 0, 1)).entries() -
                mat2(8, 0, 0, 2)) < 1e-15);
}

TEST_CASE("scaled positions and torus reduction") {
  LatticeSpec s = testing::ring_1b();
  Realization r(s.graph, s.basis, *s.positions);
  TorusPoint p = scaled_position(r, 4, 1, GroupElement{Eigen::VectorXi::Constant(1, 3)});
  CHECK(p.coords[0] == doctest::Approx(1.75));
  CHECK(p.fractional[0] == doctest::Approx(0.875));
  TorusPoint q = reduce_to_torus(s.basis, Eigen::VectorXd::Constant(1, -0.5));
  CHECK(q.coords[0] == doctest::Approx(1.5));
}

TEST_CASE("diffusion matrix rejects non-SPD input") {
  CHECK_THROWS_AS(DiffusionMatrix(mat2(1, 0, 0, -1)), std::domain_error);
  CHECK_THROWS_AS(DiffusionMatrix(mat2(1, 0.5, 0, 1)), std::domain_error);
}
