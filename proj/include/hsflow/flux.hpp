#pragma once
// Boundary flux phi(xi', s) = g(xi') h(s) e_n: a normal-only, compactly supported
// boundary velocity that is Hoelder-a in time at s = 1.

#include <array>
#include <vector>

namespace hsflow {

enum class Shape { Single, Dipole };

struct FluxSpec {
    double a = 0.5;  // time exponent, 0 < a <= 1/2
    Shape shape = Shape::Single;
    int n = 3;

    /// Throws ConfigError on a violated invariant.
    void validate() const;
};

/// Plateau half-width 1/(2 sqrt(n-1)) and support half-width 4/(5 sqrt(n-1)) of the bump.
double bump_plateau(int n);
double bump_support(int n);

/// Even 1-D bump: equal to 1 on the plateau, zero outside the support, non-increasing
/// in |zeta|, built from a quintic smoothstep (C^2). deriv in 0..3.
double bump_profile(double zeta, int n, int deriv = 0);

/// g(xi') and its partial derivatives; deriv is a multi-index over the n-1 tangential
/// axes (empty = value), total order <= 3.
double g_spatial(const std::vector<double>& xi, const FluxSpec& spec, const std::vector<int>& deriv = {});

/// h(s) = (1-s)^a on [1/2, 1], 0 outside [1/4, 1], and a C^1 cubic bridge on [1/4, 1/2].
/// deriv = 1 gives h'; at s = 1 this is -infinity for a < 1.
double h_time(double s, double a, int deriv = 0);

/// h evaluated at 1 - delta, accurate for tiny delta > 0 (no cancellation in 1 - s).
double h_near_one(double delta, double a, int deriv = 0);

/// phi(xi', s) as a vector of length n (only the last entry can be non-zero).
std::vector<double> flux(const std::vector<double>& xi, double s, const FluxSpec& spec);

/// Sup-norm constants N_1 and N_2 of the flux, by grid maximisation.
struct FluxNorms {
    double N1;
    double N2;
};
FluxNorms flux_norms(const FluxSpec& spec);

/// Heat-smoothed bump derivatives: out[k] = int Gamma_1(x - xi, T) bump^{(k)}(xi) d xi,
/// k = 0..3. These are the k-th x-derivatives of Gamma_1(T) * bump.
void smoothed_bump(double x, double T, int n, double out[4]);

/// Per-axis factors of the product form of g: g(xi') = sum_m w_m prod_j factor_j(xi_j - c_{m,j}).
/// Single bump: one term centred at 0. Dipole: +1 at (-10, 0) and -1 at (10, 0).
struct BumpTerm {
    double weight;
    std::vector<double> centre;
};
std::vector<BumpTerm> bump_terms(const FluxSpec& spec);

}  // namespace hsflow
