#pragma once

// Equilibrium thermodynamics of the zero-range process.
//
// For a jump-rate function g with g(0) = 0 the product measures have
// marginals nu_phi(k) = phi^k / (g(k)! Z(phi)) with g(k)! = g(1)...g(k).
// R(phi) is the mean occupation and Psi = R^{-1} the fugacity as a function
// of density.

#include "crystal/rng.hpp"

#include <limits>
#include <string>
#include <vector>

namespace crystal {

class RateFunction {
public:
  enum class Kind { linear, indicator, tabulated };

  static RateFunction linear();
  static RateFunction indicator();
  /// values = g(0..K), continued affinely with slope g(K) - g(K-1). Throws
  /// std::invalid_argument if g(0) != 0, some g(k) <= 0 for k > 0, or the
  /// tail slope is negative.
  static RateFunction tabulated(std::vector<double> values);
  /// "linear" or "indicator".
  static RateFunction from_name(const std::string& name);

  Kind kind() const { return kind_; }
  std::string name() const;
  double operator()(long k) const;
  /// sup_k |g(k+1) - g(k)|.
  double g_star() const { return g_star_; }
  /// Radius of convergence phi* of Z (infinity when Z is entire).
  double radius() const { return radius_; }
  /// log g(k)!.
  double log_factorial(long k) const;
  /// g is nondecreasing for all k >= this index.
  long monotone_from() const;

private:
  Kind kind_ = Kind::linear;
  std::vector<double> table_;
  std::vector<double> log_fact_table_;
  double slope_ = 1.0;
  double g_star_ = 1.0;
  double radius_ = std::numeric_limits<double>::infinity();
};

class ThermoTables {
public:
  explicit ThermoTables(RateFunction rate);

  const RateFunction& rate() const { return rate_; }

  /// Z(phi). Throws std::domain_error outside [0, phi*) and
  /// std::overflow_error if Z exceeds the double range.
  double partition(double phi) const;
  double log_partition(double phi) const;
  /// R(phi).
  double mean_density(double phi) const;
  /// Psi(alpha); closed forms for linear and indicator rates.
  double fugacity(double alpha) const;
  /// Psi(alpha) by numerically inverting R, for every rate kind.
  double fugacity_numeric(double alpha) const;
  /// Number of series terms kept at phi.
  long truncation(double phi) const;

  /// log nu_phi(k).
  double log_marginal(long k, double phi) const;
  /// Draw from nu_phi by inverse CDF.
  long sample(double phi, Rng& rng) const;

  /// Cached (phi, R(phi)) grid used to bracket the inversion.
  const std::vector<double>& phi_grid() const { return phi_grid_; }
  const std::vector<double>& density_grid() const { return density_grid_; }

private:
  struct Series {
    double log_scale = 0.0;  // terms below are multiplied by exp(-log_scale)
    double z = 0.0;
    double m1 = 0.0;
    double m2 = 0.0;
    long terms = 0;
  };
  Series series(double phi) const;
  void check_phi(double phi) const;

  RateFunction rate_;
  std::vector<double> phi_grid_;
  std::vector<double> density_grid_;
};

}  // namespace crystal
