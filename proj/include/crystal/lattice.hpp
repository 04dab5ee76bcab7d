#pragma once

// Quotient graphs of Z^d-periodic crystal lattices and their N-scaled finite
// covers.
//
// A crystal lattice X is encoded by its finite quotient X0 = X / Z^d together
// with an integer shift vector on every dart: the dart e from u to v with
// shift k lifts to the edge from (u, s) to (v, s + k) for every s in Z^d.
// Both orientations of every edge are stored; sums over "all darts" therefore
// count each unoriented edge twice.

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace crystal {

/// Raised for malformed or invariant-violating lattice input.
class SpecError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Dart {
  int tail = 0;
  int head = 0;
  Eigen::VectorXi shift;
  double weight = 0.0;
  int inverse = -1;
};

/// One unoriented edge as listed in a lattice spec.
struct EdgeSpec {
  std::string tail;
  std::string head;
  Eigen::VectorXi shift;
  double weight = 0.0;
};

class QuotientGraph {
public:
  QuotientGraph() = default;

  /// Takes darts as given, inverse links included. No invariant checks; use
  /// validate() or from_edges().
  QuotientGraph(int dimension, std::vector<std::string> vertex_ids,
                std::vector<Dart> darts);

  /// Materializes both orientations: listed edges first (in order), then
  /// their inverses in the same order. Throws SpecError if validate() reports
  /// anything.
  static QuotientGraph from_edges(int dimension,
                                  std::vector<std::string> vertex_ids,
                                  const std::vector<EdgeSpec>& edges);

  int dimension() const { return dimension_; }
  int num_vertices() const { return static_cast<int>(vertex_ids_.size()); }
  int num_darts() const { return static_cast<int>(darts_.size()); }

  const std::vector<std::string>& vertex_ids() const { return vertex_ids_; }
  const std::vector<Dart>& darts() const { return darts_; }
  const Dart& dart(int e) const { return darts_.at(static_cast<std::size_t>(e)); }

  /// Darts whose tail is v, in dart order.
  std::span<const int> out_darts(int v) const;

  /// Throws SpecError for unknown ids.
  int vertex_index(std::string_view id) const;

private:
  int dimension_ = 0;
  std::vector<std::string> vertex_ids_;
  std::vector<Dart> darts_;
  std::vector<int> out_offsets_;
  std::vector<int> out_list_;
};

struct Diagnostic {
  std::string invariant;  // "inverse", "weight", "shift", "disconnected", "rank-deficient", ...
  std::string message;
};

/// Empty iff every QuotientGraph invariant holds.
std::vector<Diagnostic> validate(const QuotientGraph& g);

/// Rank over Q of the cycle-shift lattice of g (the homology image in Z^d).
int cycle_rank(const QuotientGraph& g);

/// Element of Gamma_N = (Z/NZ)^d.
struct GroupElement {
  Eigen::VectorXi coords;

  static GroupElement zero(int d) { return {Eigen::VectorXi::Zero(d)}; }
  GroupElement reduced(int N) const;
};

/// Word length on Gamma_N with generators +-e_i: sum_i min(s_i, N - s_i).
int word_length(const GroupElement& sigma, int N);

/// The finite graph X_N = X / N Z^d.
///
/// Vertex (v0, s) has flat index flat(s) * |V0| + v0 where flat(s) is the
/// row-major index of s in {0..N-1}^d (first coordinate slowest). Dart
/// (e, s) has flat index flat(s) * |E0| + e.
class ScaledGraph {
public:
  ScaledGraph(QuotientGraph base, int N);

  const QuotientGraph& base() const { return base_; }
  int scale() const { return scale_; }
  int dimension() const { return base_.dimension(); }
  int num_cells() const { return num_cells_; }
  int num_vertices() const { return num_cells_ * base_.num_vertices(); }
  int num_darts() const { return static_cast<int>(tail_.size()); }

  int vertex_index(int v0, const GroupElement& sigma) const;
  int base_vertex(int vertex) const { return vertex % base_.num_vertices(); }
  GroupElement cell(int vertex) const;
  int cell_index(const GroupElement& sigma) const;
  GroupElement cell_from_index(int cell) const;

  int tail(int dart) const { return tail_[static_cast<std::size_t>(dart)]; }
  int head(int dart) const { return head_[static_cast<std::size_t>(dart)]; }
  double weight(int dart) const { return weight_[static_cast<std::size_t>(dart)]; }
  int inverse(int dart) const { return inverse_[static_cast<std::size_t>(dart)]; }
  int base_dart(int dart) const { return dart % base_.num_darts(); }

  std::span<const int> out_darts(int vertex) const;

private:
  QuotientGraph base_;
  int scale_;
  int num_cells_;
  std::vector<int> tail_;
  std::vector<int> head_;
  std::vector<double> weight_;
  std::vector<int> inverse_;
  std::vector<int> out_offsets_;
  std::vector<int> out_list_;
};

/// All group elements s with word_length(s) <= radius, in row-major order.
std::vector<GroupElement> word_ball(int dimension, int N, double radius);

/// Vertices (v0, center + s) with |s| <= radius, sorted by flat index.
std::vector<int> ball_vertices(const ScaledGraph& sg, const GroupElement& center,
                               double radius);

}  // namespace crystal
