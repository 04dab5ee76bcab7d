#include "crystal/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace crystal {

namespace {
constexpr long kMaxTerms = 1'000'000;
constexpr double kTailTolerance = 1e-16;
}  // namespace

RateFunction RateFunction::linear() {
  RateFunction r;
  r.kind_ = Kind::linear;
  return r;
}

RateFunction RateFunction::indicator() {
  RateFunction r;
  r.kind_ = Kind::indicator;
  r.slope_ = 0.0;
  r.radius_ = 1.0;
  return r;
}

RateFunction RateFunction::tabulated(std::vector<double> values) {
  if (values.size() < 2) throw std::invalid_argument("tabulated rate needs g(0) and g(1)");
  if (values[0] != 0.0) throw std::invalid_argument("rate function must have g(0) = 0");
  for (std::size_t k = 1; k < values.size(); ++k)
    if (!(values[k] > 0.0) || !std::isfinite(values[k]))
      throw std::invalid_argument("rate function must be positive for k > 0");
  RateFunction r;
  r.kind_ = Kind::tabulated;
  const std::size_t K = values.size() - 1;
  r.slope_ = values[K] - values[K - 1];
  if (r.slope_ < 0.0) throw std::invalid_argument("rate function tail must be nondecreasing");
  r.g_star_ = std::abs(r.slope_);
  for (std::size_t k = 0; k + 1 < values.size(); ++k)
    r.g_star_ = std::max(r.g_star_, std::abs(values[k + 1] - values[k]));
  r.radius_ = r.slope_ > 0.0 ? std::numeric_limits<double>::infinity() : values[K];
  r.log_fact_table_.assign(values.size(), 0.0);
  for (std::size_t k = 1; k < values.size(); ++k)
    r.log_fact_table_[k] = r.log_fact_table_[k - 1] + std::log(values[k]);
  r.table_ = std::move(values);
  return r;
}

RateFunction RateFunction::from_name(const std::string& name) {
  if (name == "linear") return linear();
  if (name == "indicator") return indicator();
  throw std::invalid_argument("unknown rate kind '" + name + "' (expected linear|indicator)");
}

std::string RateFunction::name() const {
  switch (kind_) {
    case Kind::linear: return "linear";
    case Kind::indicator: return "indicator";
    case Kind::tabulated: return "tabulated";
  }
  return "unknown";
}

double RateFunction::operator()(long k) const {
  if (k <= 0) return 0.0;
  switch (kind_) {
    case Kind::linear: return static_cast<double>(k);
    case Kind::indicator: return 1.0;
    case Kind::tabulated: {
      const long K = static_cast<long>(table_.size()) - 1;
      if (k <= K) return table_[static_cast<std::size_t>(k)];
      return table_.back() + slope_ * static_cast<double>(k - K);
    }
  }
  return 0.0;
}

double RateFunction::log_factorial(long k) const {
  if (k <= 0) return 0.0;
  switch (kind_) {
    case Kind::linear: return std::lgamma(static_cast<double>(k) + 1.0);
    case Kind::indicator: return 0.0;
    case Kind::tabulated: {
      const long K = static_cast<long>(table_.size()) - 1;
      if (k <= K) return log_fact_table_[static_cast<std::size_t>(k)];
      const double extra = static_cast<double>(k - K);
      if (slope_ == 0.0) return log_fact_table_.back() + extra * std::log(table_.back());
      // prod_{j=1}^{m} (g_K + s j) = s^m Gamma(g_K/s + m + 1) / Gamma(g_K/s + 1)
      const double a = table_.back() / slope_;
      return log_fact_table_.back() + extra * std::log(slope_) + std::lgamma(a + extra + 1.0) -
             std::lgamma(a + 1.0);
    }
  }
  return 0.0;
}

long RateFunction::monotone_from() const {
  return kind_ == Kind::tabulated ? static_cast<long>(table_.size()) - 1 : 1;
}

ThermoTables::ThermoTables(RateFunction rate) : rate_(std::move(rate)) {
  // Geometric phi grid; for finite phi* it also clusters towards phi*. The
  // inversion extends it on demand.
  const bool finite = std::isfinite(rate_.radius());
  const double top = finite ? rate_.radius() : 64.0;
  std::vector<double> grid;
  for (int i = 0; i <= 40; ++i) grid.push_back(top * std::pow(2.0, -20.0 + 0.5 * i));
  if (finite) {
    grid.erase(std::remove_if(grid.begin(), grid.end(), [&](double p) { return p >= 0.5 * top; }),
               grid.end());
    for (int i = 1; i <= 40; ++i) grid.push_back(top * (1.0 - std::pow(2.0, -i)));
  }
  phi_grid_.push_back(0.0);
  density_grid_.push_back(0.0);
  for (double phi : grid) {
    if (phi <= phi_grid_.back()) continue;
    phi_grid_.push_back(phi);
    density_grid_.push_back(mean_density(phi));
  }
}

void ThermoTables::check_phi(double phi) const {
  if (!(phi >= 0.0) || !std::isfinite(phi)) throw std::domain_error("fugacity must be >= 0");
  if (phi >= rate_.radius())
    throw std::domain_error("fugacity " + std::to_string(phi) +
                            " is outside the radius of convergence " +
                            std::to_string(rate_.radius()));
}

ThermoTables::Series ThermoTables::series(double phi) const {
  check_phi(phi);
  Series s;
  s.z = 1.0;
  s.terms = 1;
  if (phi == 0.0) return s;
  const double log_phi = std::log(phi);
  double log_term = 0.0;  // log t_k, t_0 = 1
  const long monotone = rate_.monotone_from();
  for (long k = 0; k < kMaxTerms; ++k) {
    const double next = log_term + log_phi - std::log(rate_(k + 1));
    if (k + 1 >= monotone && std::isfinite(rate_.radius())) {
      // Constant tail: the remaining terms are geometric, sum them in closed form.
      const double r = phi / rate_(k + 1);
      const double n = static_cast<double>(k + 1);
      const double t = std::exp(next - s.log_scale);
      const double q = 1.0 - r;
      s.z += t / q;
      s.m1 += t * (n / q + r / (q * q));
      s.m2 += t * (n * n / q + 2.0 * n * r / (q * q) + r * (1.0 + r) / (q * q * q));
      s.terms = k + 2;
      return s;
    }
    if (k + 1 >= monotone) {
      const double r = phi / rate_(k + 2);
      if (r < 1.0) {
        const double kk = static_cast<double>(k + 1);
        const double bound = (kk * kk + 1.0) / ((1.0 - r) * (1.0 - r));
        if (std::exp(next - s.log_scale) * bound <= kTailTolerance * s.z) return s;
      }
    }
    log_term = next;
    if (log_term > s.log_scale) {
      const double f = std::exp(s.log_scale - log_term);
      s.z *= f;
      s.m1 *= f;
      s.m2 *= f;
      s.log_scale = log_term;
    }
    const double t = std::exp(log_term - s.log_scale);
    const double kk = static_cast<double>(k + 1);
    s.z += t;
    s.m1 += kk * t;
    s.m2 += kk * kk * t;
    s.terms = k + 2;
  }
  throw std::runtime_error("partition series did not converge within the term cap");
}

double ThermoTables::log_partition(double phi) const {
  if (rate_.kind() == RateFunction::Kind::indicator) {
    check_phi(phi);
    return -std::log1p(-phi);
  }
  Series s = series(phi);
  return s.log_scale + std::log(s.z);
}

double ThermoTables::partition(double phi) const {
  double lz = log_partition(phi);
  double z = std::exp(lz);
  if (!std::isfinite(z)) throw std::overflow_error("Z(phi) overflows a double");
  return z;
}

double ThermoTables::mean_density(double phi) const {
  if (rate_.kind() == RateFunction::Kind::indicator) {
    check_phi(phi);
    return phi / (1.0 - phi);
  }
  Series s = series(phi);
  return s.m1 / s.z;
}

long ThermoTables::truncation(double phi) const {
  if (rate_.kind() == RateFunction::Kind::indicator) {
    check_phi(phi);
    if (phi == 0.0) return 1;
    // smallest K with phi^K < 1e-16 (1 - phi)
    return static_cast<long>(std::ceil(std::log(kTailTolerance * (1.0 - phi)) / std::log(phi))) + 1;
  }
  return series(phi).terms;
}

double ThermoTables::fugacity(double alpha) const {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw std::domain_error("density must be >= 0");
  switch (rate_.kind()) {
    case RateFunction::Kind::linear: return alpha;
    case RateFunction::Kind::indicator: return alpha / (1.0 + alpha);
    case RateFunction::Kind::tabulated: break;
  }
  return fugacity_numeric(alpha);
}

double ThermoTables::fugacity_numeric(double alpha) const {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw std::domain_error("density must be >= 0");
  if (alpha == 0.0) return 0.0;
  const double radius = rate_.radius();

  // Bracket [lo, hi] with R(lo) <= alpha <= R(hi).
  auto it = std::lower_bound(density_grid_.begin(), density_grid_.end(), alpha);
  double lo = 0.0, hi = 0.0;
  if (it != density_grid_.end()) {
    auto i = static_cast<std::size_t>(it - density_grid_.begin());
    hi = phi_grid_[i];
    lo = i > 0 ? phi_grid_[i - 1] : 0.0;
    if (*it == alpha) return hi;
  } else if (!std::isfinite(radius)) {
    lo = phi_grid_.back();
    hi = 2.0 * lo;
    while (mean_density(hi) < alpha) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e12) throw std::domain_error("density outside the range of R");
    }
  } else {
    lo = phi_grid_.back();
    hi = radius;
  }

  // Safeguarded Newton on R(phi) - alpha, with R'(phi) = Var / phi.
  double phi = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    Series s;
    if (rate_.kind() == RateFunction::Kind::indicator) {
      s.z = 1.0 / (1.0 - phi);
      s.m1 = phi / ((1.0 - phi) * (1.0 - phi));
      s.m2 = phi * (1.0 + phi) / std::pow(1.0 - phi, 3);
    } else {
      s = series(phi);
    }
    const double mean = s.m1 / s.z;
    const double f = mean - alpha;
    if (std::abs(f) <= 1e-14 * std::max(1.0, alpha)) return phi;
    if (f < 0) lo = phi; else hi = phi;
    const double var = s.m2 / s.z - mean * mean;
    double next = phi - f * phi / var;
    if (!(var > 0.0) || !(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo <= 1e-16 * hi) return next;
    phi = next;
  }
  return phi;
}

double ThermoTables::log_marginal(long k, double phi) const {
  if (k < 0) return -std::numeric_limits<double>::infinity();
  if (phi == 0.0) {
    check_phi(phi);
    return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  }
  return static_cast<double>(k) * std::log(phi) - rate_.log_factorial(k) - log_partition(phi);
}

long ThermoTables::sample(double phi, Rng& rng) const {
  check_phi(phi);
  if (phi == 0.0) return 0;
  const double u = rng.uniform();
  if (rate_.kind() == RateFunction::Kind::indicator) {
    // P(eta >= k) = phi^k
    return static_cast<long>(std::floor(std::log1p(-u) / std::log(phi)));
  }
  const double log_z = log_partition(phi);
  const double log_phi = std::log(phi);
  double log_term = 0.0;
  double cumulative = std::exp(-log_z);
  long k = 0;
  while (cumulative <= u && k < kMaxTerms) {
    ++k;
    log_term += log_phi - std::log(rate_(k));
    const double p = std::exp(log_term - log_z);
    cumulative += p;
    // Past the mode with negligible mass left: u fell into rounding slack.
    if (p < 1e-18 && static_cast<double>(k) > phi) break;
  }
  return k;
}

}  // namespace crystal
