#pragma once

// Regular grids and scalar fields on the flat torus R^d / U Z^d.
//
// Grid point i = (i_1..i_d) sits at fractional coordinates s = i / M and
// physical position U s. Flat indices are row-major (i_1 slowest).

#include <Eigen/Dense>

#include <functional>
#include <iosfwd>
#include <vector>

namespace crystal {

class TorusGrid {
public:
  /// Throws std::invalid_argument if M < 4 or U is singular.
  TorusGrid(Eigen::MatrixXd basis, int resolution);

  int dimension() const { return static_cast<int>(basis_.rows()); }
  int resolution() const { return resolution_; }
  int size() const { return size_; }
  const Eigen::MatrixXd& basis() const { return basis_; }
  double volume() const { return std::abs(basis_.determinant()); }
  double cell_volume() const { return volume() / size_; }

  int flat_index(const Eigen::VectorXi& multi) const;  // wraps periodically
  Eigen::VectorXi multi_index(int flat) const;
  Eigen::VectorXd fractional(int flat) const;
  Eigen::VectorXd physical(int flat) const;

  bool operator==(const TorusGrid& other) const;

private:
  Eigen::MatrixXd basis_;
  int resolution_;
  int size_;
};

struct TorusField {
  TorusGrid grid;
  std::vector<double> values;

  TorusField(TorusGrid g, std::vector<double> v);
  explicit TorusField(TorusGrid g, double fill = 0.0);

  /// Integral: sum of values times cell volume.
  double mass() const;
  double mean() const;
  double min() const;
  double max() const;
};

/// Samples f at every grid point (physical coordinates).
TorusField sample_field(const TorusGrid& grid,
                        const std::function<double(const Eigen::VectorXd&)>& f);

/// Field CSV: rows "d,<d>", "M,<M>", "U,<u_11>,<u_12>,...", "i_1,...,i_d,value",
/// then one row per grid point. U entries are row-major.
void write_field_csv(std::ostream& out, const TorusField& field);
TorusField read_field_csv(std::istream& in);

}  // namespace crystal
