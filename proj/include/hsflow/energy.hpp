#pragma once
// Truncated energy of the boundary-driven flow: kinetic energy sup over a time grid and
// dissipation over (0, 2), both on the half ball B_R^+, with an envelope bound for the
// part outside B_R^+.

#include <vector>

#include "hsflow/flux.hpp"
#include "hsflow/quad.hpp"

namespace hsflow {

struct EnergyReport {
    double R = 0.0;
    /// max over the time grid of int_{B_R^+} |v|^2 dx.
    double kinetic_sup = 0.0;
    /// int_0^2 int_{B_R^+} |grad v|^2 dx dt (Fejer rule on the time grid).
    double dissipation = 0.0;
    /// Envelope bounds for the same quantities over |x| > R.
    double kinetic_tail = 0.0;
    double dissipation_tail = 0.0;
    /// Per time node: t, int |v|^2, int |grad v|^2.
    std::vector<double> times, kinetic, dissipation_density;
    /// Fitted envelope constants: |v| <= Cv <x>^{-2}, |grad v| <= Cg [<x>^{-3} + LN / (<x>^2 (x_n+1)^{2a})].
    double Cv = 0.0, Cg = 0.0;

    /// max of the two tails; the quantity the R-to-R self-consistency is checked against.
    double tail_bound() const { return kinetic_tail > dissipation_tail ? kinetic_tail : dissipation_tail; }
};

/// Time nodes t_k = 1 + cos((2k+1) pi / 2N), k < N (never t = 1 for even N), and the
/// matching Fejer first-rule weights on [0, 2].
void chebyshev_time_grid(int N, std::vector<double>& t, std::vector<double>& w);

/// Energies for each radius from one set of flow evaluations (n = 3). The spatial rule is
/// tensor Gauss-Legendre on graded panels over [0, R_max]^3 restricted to |x| < R; |v|^2
/// and |grad v|^2 are even in x_1 and x_2 for both flux shapes, so one quadrant is sampled.
/// Envelope constants are fitted on the same nodes.
std::vector<EnergyReport> energy(const FluxSpec& spec, const QuadSpec& q, const std::vector<double>& radii,
                                 int n_time = 32);

}  // namespace hsflow
