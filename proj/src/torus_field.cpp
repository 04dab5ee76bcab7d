#include "crystal/torus_field.hpp"

#include "crystal/format.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace crystal {

TorusGrid::TorusGrid(Eigen::MatrixXd basis, int resolution)
    : basis_(std::move(basis)), resolution_(resolution) {
  if (basis_.rows() != basis_.cols() || basis_.rows() < 1)
    throw std::invalid_argument("torus basis must be square");
  if (resolution_ < 4) throw std::invalid_argument("torus grid resolution must be >= 4");
  if (std::abs(basis_.determinant()) < 1e-300) throw std::invalid_argument("torus basis is singular");
  size_ = 1;
  for (int i = 0; i < dimension(); ++i) size_ *= resolution_;
}

int TorusGrid::flat_index(const Eigen::VectorXi& multi) const {
  int idx = 0;
  for (int i = 0; i < dimension(); ++i) {
    int m = multi[i] % resolution_;
    if (m < 0) m += resolution_;
    idx = idx * resolution_ + m;
  }
  return idx;
}

Eigen::VectorXi TorusGrid::multi_index(int flat) const {
  Eigen::VectorXi out(dimension());
  for (int i = dimension() - 1; i >= 0; --i) {
    out[i] = flat % resolution_;
    flat /= resolution_;
  }
  return out;
}

Eigen::VectorXd TorusGrid::fractional(int flat) const {
  return multi_index(flat).cast<double>() / resolution_;
}

Eigen::VectorXd TorusGrid::physical(int flat) const { return basis_ * fractional(flat); }

bool TorusGrid::operator==(const TorusGrid& other) const {
  return resolution_ == other.resolution_ && basis_.rows() == other.basis_.rows() &&
         basis_ == other.basis_;
}

TorusField::TorusField(TorusGrid g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
  if (static_cast<int>(values.size()) != grid.size())
    throw std::invalid_argument("field size does not match its grid");
}

TorusField::TorusField(TorusGrid g, double fill)
    : grid(std::move(g)), values(static_cast<std::size_t>(grid.size()), fill) {}

double TorusField::mass() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s * grid.cell_volume();
}

double TorusField::mean() const { return mass() / grid.volume(); }
double TorusField::min() const { return *std::min_element(values.begin(), values.end()); }
double TorusField::max() const { return *std::max_element(values.begin(), values.end()); }

TorusField sample_field(const TorusGrid& grid,
                        const std::function<double(const Eigen::VectorXd&)>& f) {
  TorusField out(grid);
  for (int i = 0; i < grid.size(); ++i) out.values[static_cast<std::size_t>(i)] = f(grid.physical(i));
  return out;
}

void write_field_csv(std::ostream& out, const TorusField& field) {
  const TorusGrid& g = field.grid;
  const int d = g.dimension();
  out << "d," << d << "\n";
  out << "M," << g.resolution() << "\n";
  out << "U";
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) out << "," << format_double(g.basis()(i, j));
  out << "\n";
  for (int i = 0; i < d; ++i) out << "i_" << (i + 1) << ",";
  out << "value\n";
  for (int k = 0; k < g.size(); ++k) {
    Eigen::VectorXi m = g.multi_index(k);
    for (int i = 0; i < d; ++i) out << m[i] << ",";
    out << format_double(field.values[static_cast<std::size_t>(k)]) << "\n";
  }
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

std::vector<std::string> expect_row(std::istream& in, const char* key) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(std::string("field CSV: missing ") + key + " row");
  auto cells = split_csv(line);
  if (cells.empty() || cells[0] != key)
    throw std::runtime_error(std::string("field CSV: expected ") + key + " row");
  return cells;
}

}  // namespace

TorusField read_field_csv(std::istream& in) {
  auto drow = expect_row(in, "d");
  if (drow.size() != 2) throw std::runtime_error("field CSV: bad d row");
  const int d = std::stoi(drow[1]);
  auto mrow = expect_row(in, "M");
  if (mrow.size() != 2) throw std::runtime_error("field CSV: bad M row");
  const int M = std::stoi(mrow[1]);
  auto urow = expect_row(in, "U");
  if (static_cast<int>(urow.size()) != 1 + d * d) throw std::runtime_error("field CSV: bad U row");
  Eigen::MatrixXd U(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) U(i, j) = std::stod(urow[static_cast<std::size_t>(1 + i * d + j)]);
  std::string header;
  std::getline(in, header);
  TorusField field(TorusGrid(U, M));
  std::vector<bool> seen(static_cast<std::size_t>(field.grid.size()), false);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_csv(line);
    if (static_cast<int>(cells.size()) != d + 1) throw std::runtime_error("field CSV: bad row '" + line + "'");
    Eigen::VectorXi m(d);
    for (int i = 0; i < d; ++i) m[i] = std::stoi(cells[static_cast<std::size_t>(i)]);
    int k = field.grid.flat_index(m);
    field.values[static_cast<std::size_t>(k)] = std::stod(cells.back());
    seen[static_cast<std::size_t>(k)] = true;
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end())
    throw std::runtime_error("field CSV: missing grid points");
  return field;
}

}  // namespace crystal
