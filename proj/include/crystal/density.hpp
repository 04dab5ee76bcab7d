#pragma once

// Empirical density of a particle configuration on the torus, and the local
// replacement diagnostic for the zero-range process.

#include "crystal/lattice.hpp"
#include "crystal/realization.hpp"
#include "crystal/simulation.hpp"
#include "crystal/thermo.hpp"
#include "crystal/torus_field.hpp"

#include <iosfwd>
#include <vector>

namespace crystal {

/// Occupations binned into an M^d grid of fractional cells [j/M, (j+1)/M).
/// A cell value is count / (|V_N| / M^d): a per-site density that reads 1 on
/// a fully occupied exclusion configuration.
TorusField grid_density(const ScaledGraph& sg, const Realization& r, const Configuration& cfg,
                        int M);

/// Kernel estimate with normalized d1-ball kernels of radius eps, evaluated
/// at the points of `grid`. Distances are l1 in fractional coordinates on the
/// unit torus. The kernel is (d! / (2 eps)^d) on the ball, so each value is
/// (d! / (2 eps)^d) / |V_N| * (sum of eta inside the ball). Throws
/// std::invalid_argument unless 0 < eps <= min(d / 4, 1 / 2).
TorusField ball_density(const ScaledGraph& sg, const Realization& r, const Configuration& cfg,
                        const TorusGrid& grid, double eps);

/// Per-snapshot value of the replacement functional
///   V = mean over cells s and base vertices x of |gbar_{s x} - Psi(etabar_{s x0})|
/// where bars are averages over the vertices of the cells within word distance
/// eps N of s (etabar over those of x0's fundamental domain, i.e. all of them).
std::vector<double> replacement_diagnostic(const ScaledGraph& sg, const SimResult& traj,
                                           const ThermoTables& thermo, double eps);

/// Value of the replacement functional for one configuration.
double replacement_value(const ScaledGraph& sg, const Configuration& cfg,
                         const ThermoTables& thermo, double eps);

/// Density CSV: t,cell_1..cell_d,value.
void write_density_csv(std::ostream& out, double t, const TorusField& field, bool header = true);

}  // namespace crystal
