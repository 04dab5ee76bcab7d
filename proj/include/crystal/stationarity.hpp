#pragma once

// Brute-force checks that the product measures are invariant for the
// generators used by the simulator.

#include "crystal/lattice.hpp"
#include "crystal/simulation.hpp"
#include "crystal/thermo.hpp"

#include <stdexcept>

namespace crystal {

class StateSpaceTooLarge : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Exclusion process on X_N against Bernoulli(rho): enumerates all 2^|V_N|
/// states (|V_N| <= 12) and returns max_eta |sum_eta' nu(eta') L(eta', eta)|.
double sep_stationarity_residual(const QuotientGraph& g, int N, double rho);

/// Zero-range process on X_N restricted to the sector with `particles`
/// particles (|V_N| <= 6, particles <= 4), against the product measure at
/// fugacity phi conditioned on the sector. Same residual as above.
double zrp_stationarity_residual(const QuotientGraph& g, int N, const ThermoTables& thermo,
                                 int particles, double phi);

/// max over darts e of |log(nu(eta) p(e) g(eta_o)) - log(nu(eta^e) p(ebar) g(eta^e_t))|
/// for darts with g(eta_o) > 0, under the product measure at fugacity phi.
/// Returns 0 when no dart can fire.
double zrp_detailed_balance_defect(const ScaledGraph& sg, const Configuration& cfg,
                                   const ThermoTables& thermo, double phi);

}  // namespace crystal
