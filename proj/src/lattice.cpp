#include "crystal/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>

namespace crystal {

namespace {

std::string describe_dart(const QuotientGraph& g, int e) {
  const Dart& d = g.dart(e);
  std::ostringstream os;
  os << "dart " << e << " (";
  auto name = [&](int v) {
    return (v >= 0 && v < g.num_vertices()) ? g.vertex_ids()[static_cast<std::size_t>(v)]
                                            : std::string("?");
  };
  os << name(d.tail) << " -> " << name(d.head) << ")";
  return os.str();
}

int positive_mod(int a, int n) {
  int r = a % n;
  return r < 0 ? r + n : r;
}

// Rank of an integer row set, computed by fraction-free elimination with gcd
// normalization so entries stay small.
int integer_rank(std::vector<std::vector<long long>> rows, int cols) {
  int rank = 0;
  for (int c = 0; c < cols && rank < static_cast<int>(rows.size()); ++c) {
    auto pivot = std::find_if(rows.begin() + rank, rows.end(),
                              [c](const auto& r) { return r[static_cast<std::size_t>(c)] != 0; });
    if (pivot == rows.end()) continue;
    std::iter_swap(rows.begin() + rank, pivot);
    const auto& p = rows[static_cast<std::size_t>(rank)];
    for (std::size_t i = static_cast<std::size_t>(rank) + 1; i < rows.size(); ++i) {
      auto& r = rows[i];
      long long a = p[static_cast<std::size_t>(c)];
      long long b = r[static_cast<std::size_t>(c)];
      if (b == 0) continue;
      long long g = 0;
      for (int k = 0; k < cols; ++k) {
        auto ks = static_cast<std::size_t>(k);
        r[ks] = a * r[ks] - b * p[ks];
        g = std::gcd(g, r[ks]);
      }
      if (g > 1)
        for (auto& x : r) x /= g;
    }
    ++rank;
  }
  return rank;
}

}  // namespace

QuotientGraph::QuotientGraph(int dimension, std::vector<std::string> vertex_ids,
                             std::vector<Dart> darts)
    : dimension_(dimension), vertex_ids_(std::move(vertex_ids)), darts_(std::move(darts)) {
  const int n = num_vertices();
  out_offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
  for (const Dart& d : darts_)
    if (d.tail >= 0 && d.tail < n) ++out_offsets_[static_cast<std::size_t>(d.tail) + 1];
  std::partial_sum(out_offsets_.begin(), out_offsets_.end(), out_offsets_.begin());
  out_list_.resize(static_cast<std::size_t>(out_offsets_.back()));
  std::vector<int> fill(out_offsets_.begin(), out_offsets_.end() - 1);
  for (int e = 0; e < num_darts(); ++e) {
    int t = darts_[static_cast<std::size_t>(e)].tail;
    if (t >= 0 && t < n) out_list_[static_cast<std::size_t>(fill[static_cast<std::size_t>(t)]++)] = e;
  }
}

QuotientGraph QuotientGraph::from_edges(int dimension, std::vector<std::string> vertex_ids,
                                        const std::vector<EdgeSpec>& edges) {
  if (dimension < 1) throw SpecError("dimension must be a positive integer");
  QuotientGraph lookup(dimension, vertex_ids, {});
  const int m = static_cast<int>(edges.size());
  std::vector<Dart> darts(static_cast<std::size_t>(2 * m));
  for (int i = 0; i < m; ++i) {
    const EdgeSpec& es = edges[static_cast<std::size_t>(i)];
    if (es.shift.size() != dimension)
      throw SpecError("edge " + std::to_string(i) + ": shift has " +
                      std::to_string(es.shift.size()) + " entries, expected " +
                      std::to_string(dimension));
    Dart fwd{lookup.vertex_index(es.tail), lookup.vertex_index(es.head), es.shift, es.weight, m + i};
    Dart bwd{fwd.head, fwd.tail, -es.shift, es.weight, i};
    darts[static_cast<std::size_t>(i)] = std::move(fwd);
    darts[static_cast<std::size_t>(m + i)] = std::move(bwd);
  }
  QuotientGraph g(dimension, std::move(vertex_ids), std::move(darts));
  auto diagnostics = validate(g);
  if (!diagnostics.empty()) {
    std::string msg = "invalid lattice: ";
    for (std::size_t i = 0; i < diagnostics.size(); ++i) {
      if (i) msg += "; ";
      msg += diagnostics[i].invariant + ": " + diagnostics[i].message;
    }
    throw SpecError(msg);
  }
  return g;
}

std::span<const int> QuotientGraph::out_darts(int v) const {
  auto b = static_cast<std::size_t>(out_offsets_.at(static_cast<std::size_t>(v)));
  auto e = static_cast<std::size_t>(out_offsets_.at(static_cast<std::size_t>(v) + 1));
  return std::span<const int>(out_list_).subspan(b, e - b);
}

int QuotientGraph::vertex_index(std::string_view id) const {
  auto it = std::find(vertex_ids_.begin(), vertex_ids_.end(), id);
  if (it == vertex_ids_.end()) throw SpecError("unknown vertex id '" + std::string(id) + "'");
  return static_cast<int>(it - vertex_ids_.begin());
}

int cycle_rank(const QuotientGraph& g) {
  const int n = g.num_vertices();
  const int d = g.dimension();
  if (n == 0 || d < 1) return 0;
  // Tree potentials: shift accumulated along a BFS tree from vertex 0. Every
  // dart then contributes the cycle vector potential(tail) + shift - potential(head).
  std::vector<Eigen::VectorXi> potential(static_cast<std::size_t>(n));
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::vector<std::vector<long long>> cycles;
  for (int root = 0; root < n; ++root) {
    if (seen[static_cast<std::size_t>(root)]) continue;
    seen[static_cast<std::size_t>(root)] = true;
    potential[static_cast<std::size_t>(root)] = Eigen::VectorXi::Zero(d);
    std::queue<int> q;
    q.push(root);
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (int e : g.out_darts(v)) {
        const Dart& dart = g.dart(e);
        if (dart.head < 0 || dart.head >= n || dart.shift.size() != d) continue;
        auto h = static_cast<std::size_t>(dart.head);
        if (!seen[h]) {
          seen[h] = true;
          potential[h] = potential[static_cast<std::size_t>(v)] + dart.shift;
          q.push(dart.head);
        }
      }
    }
  }
  for (const Dart& dart : g.darts()) {
    if (dart.tail < 0 || dart.tail >= n || dart.head < 0 || dart.head >= n ||
        dart.shift.size() != d)
      continue;
    Eigen::VectorXi c = potential[static_cast<std::size_t>(dart.tail)] + dart.shift -
                        potential[static_cast<std::size_t>(dart.head)];
    if (c.isZero()) continue;
    cycles.emplace_back(c.data(), c.data() + d);
  }
  return integer_rank(std::move(cycles), d);
}

std::vector<Diagnostic> validate(const QuotientGraph& g) {
  std::vector<Diagnostic> out;
  const int n = g.num_vertices();
  const int m = g.num_darts();
  const int d = g.dimension();
  if (d < 1) out.push_back({"dimension", "dimension must be positive, got " + std::to_string(d)});
  if (n == 0) out.push_back({"vertices", "vertex set is empty"});
  bool structural_ok = true;
  for (int e = 0; e < m; ++e) {
    const Dart& dart = g.dart(e);
    if (dart.tail < 0 || dart.tail >= n || dart.head < 0 || dart.head >= n) {
      out.push_back({"vertex", describe_dart(g, e) + " references an unknown vertex"});
      structural_ok = false;
      continue;
    }
    if (dart.shift.size() != d) {
      out.push_back({"shift", describe_dart(g, e) + " has a shift of the wrong dimension"});
      structural_ok = false;
      continue;
    }
    if (!(dart.weight > 0.0) || !std::isfinite(dart.weight))
      out.push_back({"weight", describe_dart(g, e) + " has nonpositive or non-finite weight"});
    if (dart.inverse < 0 || dart.inverse >= m) {
      out.push_back({"inverse", describe_dart(g, e) + " has no inverse dart"});
      structural_ok = false;
      continue;
    }
    const Dart& inv = g.dart(dart.inverse);
    if (inv.inverse != e)
      out.push_back({"inverse", describe_dart(g, e) + ": inverse is not an involution"});
    if (inv.tail != dart.head || inv.head != dart.tail)
      out.push_back({"inverse", describe_dart(g, e) + ": inverse does not swap tail and head"});
    if (inv.shift.size() != d || inv.shift != -dart.shift)
      out.push_back({"shift", describe_dart(g, e) + ": inverse shift is not the negation"});
    if (inv.weight != dart.weight)
      out.push_back({"weight", describe_dart(g, e) + ": inverse has a different weight"});
  }
  if (n > 0) {
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    std::queue<int> q;
    q.push(0);
    seen[0] = true;
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (int e : g.out_darts(v)) {
        int h = g.dart(e).head;
        if (h >= 0 && h < n && !seen[static_cast<std::size_t>(h)]) {
          seen[static_cast<std::size_t>(h)] = true;
          q.push(h);
        }
      }
    }
    for (int v = 0; v < n; ++v)
      if (!seen[static_cast<std::size_t>(v)]) {
        out.push_back({"disconnected", "vertex '" + g.vertex_ids()[static_cast<std::size_t>(v)] +
                                           "' is not reachable from '" + g.vertex_ids()[0] + "'"});
        break;
      }
  }
  if (d >= 1 && structural_ok) {
    int rank = cycle_rank(g);
    if (rank < d)
      out.push_back({"rank-deficient", "cycle shifts span rank " + std::to_string(rank) +
                                           " but dimension is " + std::to_string(d)});
  }
  return out;
}

GroupElement GroupElement::reduced(int N) const {
  GroupElement r{coords};
  for (Eigen::Index i = 0; i < r.coords.size(); ++i) r.coords[i] = positive_mod(r.coords[i], N);
  return r;
}

int word_length(const GroupElement& sigma, int N) {
  int len = 0;
  for (Eigen::Index i = 0; i < sigma.coords.size(); ++i) {
    int s = positive_mod(sigma.coords[i], N);
    len += std::min(s, N - s);
  }
  return len;
}

ScaledGraph::ScaledGraph(QuotientGraph base, int N) : base_(std::move(base)), scale_(N) {
  if (N < 1) throw std::invalid_argument("scale N must be a positive integer");
  const int d = base_.dimension();
  num_cells_ = 1;
  for (int i = 0; i < d; ++i) num_cells_ *= N;
  const int n0 = base_.num_vertices();
  const int m0 = base_.num_darts();
  const auto total = static_cast<std::size_t>(num_cells_) * static_cast<std::size_t>(m0);
  tail_.resize(total);
  head_.resize(total);
  weight_.resize(total);
  inverse_.resize(total);
  for (int c = 0; c < num_cells_; ++c) {
    GroupElement sigma = cell_from_index(c);
    for (int e = 0; e < m0; ++e) {
      const Dart& dart = base_.dart(e);
      GroupElement target{sigma.coords + dart.shift};
      int tc = cell_index(target.reduced(N));
      auto idx = static_cast<std::size_t>(c) * static_cast<std::size_t>(m0) + static_cast<std::size_t>(e);
      tail_[idx] = c * n0 + dart.tail;
      head_[idx] = tc * n0 + dart.head;
      weight_[idx] = dart.weight;
      inverse_[idx] = tc * m0 + dart.inverse;
    }
  }
  const int nv = num_vertices();
  out_offsets_.assign(static_cast<std::size_t>(nv) + 1, 0);
  for (int t : tail_) ++out_offsets_[static_cast<std::size_t>(t) + 1];
  std::partial_sum(out_offsets_.begin(), out_offsets_.end(), out_offsets_.begin());
  out_list_.resize(tail_.size());
  std::vector<int> fill(out_offsets_.begin(), out_offsets_.end() - 1);
  for (int e = 0; e < num_darts(); ++e)
    out_list_[static_cast<std::size_t>(fill[static_cast<std::size_t>(tail_[static_cast<std::size_t>(e)])]++)] = e;
}

int ScaledGraph::cell_index(const GroupElement& sigma) const {
  int idx = 0;
  for (Eigen::Index i = 0; i < sigma.coords.size(); ++i)
    idx = idx * scale_ + positive_mod(sigma.coords[i], scale_);
  return idx;
}

GroupElement ScaledGraph::cell_from_index(int cell) const {
  const int d = dimension();
  GroupElement s{Eigen::VectorXi::Zero(d)};
  for (int i = d - 1; i >= 0; --i) {
    s.coords[i] = cell % scale_;
    cell /= scale_;
  }
  return s;
}

int ScaledGraph::vertex_index(int v0, const GroupElement& sigma) const {
  return cell_index(sigma) * base_.num_vertices() + v0;
}

GroupElement ScaledGraph::cell(int vertex) const {
  return cell_from_index(vertex / base_.num_vertices());
}

std::span<const int> ScaledGraph::out_darts(int vertex) const {
  auto b = static_cast<std::size_t>(out_offsets_[static_cast<std::size_t>(vertex)]);
  auto e = static_cast<std::size_t>(out_offsets_[static_cast<std::size_t>(vertex) + 1]);
  return std::span<const int>(out_list_).subspan(b, e - b);
}

std::vector<GroupElement> word_ball(int dimension, int N, double radius) {
  std::vector<GroupElement> out;
  if (radius < 0) return out;
  int cells = 1;
  for (int i = 0; i < dimension; ++i) cells *= N;
  GroupElement s{Eigen::VectorXi::Zero(dimension)};
  for (int c = 0; c < cells; ++c) {
    int rem = c;
    for (int i = dimension - 1; i >= 0; --i) {
      s.coords[i] = rem % N;
      rem /= N;
    }
    if (word_length(s, N) <= radius) out.push_back(s);
  }
  return out;
}

std::vector<int> ball_vertices(const ScaledGraph& sg, const GroupElement& center, double radius) {
  std::vector<int> out;
  const int n0 = sg.base().num_vertices();
  for (const GroupElement& s : word_ball(sg.dimension(), sg.scale(), radius)) {
    GroupElement t{s.coords + center.coords};
    int c = sg.cell_index(t.reduced(sg.scale()));
    for (int v = 0; v < n0; ++v) out.push_back(c * n0 + v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace crystal
