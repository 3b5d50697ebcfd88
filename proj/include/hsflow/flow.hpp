#pragma once
// Stokes flow in the half-space generated by the boundary flux: velocity, gradient,
// pressure and the singular main term of d_n v_i at t = 1.
//
// Tangential convolutions with E, B, C_i and A are written through the
// subordination E(x) = int_0^inf Gamma_n(x, T) dT. The tangential factor then
// becomes the heat-smoothed flux P_alpha(x', T) = d^alpha (Gamma_{n-1}(T) * g)(x')
// and the remaining kernels are one-dimensional functions of (x_n, t, T).

#include <vector>

#include "hsflow/flux.hpp"
#include "hsflow/kernels.hpp"
#include "hsflow/quad.hpp"

namespace hsflow {

struct EvalPoint {
    std::vector<double> xprime;
    double xn = 0.0;
    double t = 0.0;

    std::vector<double> full() const;
};

struct FlowSample {
    std::vector<double> velocity, velocity_err;
    /// gradient[i][j] = d_j v_i
    std::vector<std::vector<double>> gradient, gradient_err;
    double pressure = 0.0, pressure_err = 0.0;
    bool has_pressure = false;
    long evaluations = 0;
    bool converged = true;
};

enum FlowPart : unsigned { kVelocity = 1u, kGradient = 2u, kPressure = 4u };

/// All requested parts through one outer quadrature. Requires n >= 3, x_n > 0;
/// pressure requires t != 1 (DomainError).
FlowSample flow_sample(const EvalPoint& p, const FluxSpec& spec, const QuadSpec& q,
                       unsigned parts = kVelocity | kGradient | kPressure);

/// flow_sample at every point of the product grid axes[0] x ... x axes[n-2] (last axis
/// fastest) at fixed (x_n, t), sharing one outer quadrature. The T-integrand is assembled
/// from per-axis tables, so the cost grows with the number of points only through
/// cheap products.
std::vector<FlowSample> flow_on_tangential_grid(const std::vector<std::vector<double>>& axes, double xn, double t,
                                                const FluxSpec& spec, const QuadSpec& q,
                                                unsigned parts = kVelocity | kGradient);

std::vector<KernelValue> velocity(const EvalPoint& p, const FluxSpec& spec, const QuadSpec& q);

enum class GradientMethod { Analytic, FiniteDifference };

/// d_j v_i as gradient[i][j].
std::vector<std::vector<KernelValue>> gradient(const EvalPoint& p, const FluxSpec& spec, const QuadSpec& q,
                                               GradientMethod method = GradientMethod::Analytic);

struct GradientComparison {
    double max_rel_diff = 0.0;
    bool methods_disagree = false;  // max_rel_diff > 1e-3
};
/// Both gradient routes, compared entrywise relative to the largest entry.
GradientComparison compare_gradient_routes(const EvalPoint& p, const FluxSpec& spec, const QuadSpec& q);

KernelValue pressure(const EvalPoint& p, const FluxSpec& spec, const QuadSpec& q);

struct TraceRow {
    double xn;
    std::vector<double> velocity;
    double phi_n;
    double normal_error;  // v_n - phi_n
};
/// v(x', x_n, t) along a decreasing x_n sequence, against the boundary value phi(x', t).
std::vector<TraceRow> boundary_trace_check(const std::vector<double>& xprime, double t, const FluxSpec& spec,
                                           const std::vector<double>& xn_sequence, const QuadSpec& q);

/// Main singular term of d_n v_i at t = 1 (i tangential):
///   C_n int_0^{3/4} e^{-x_n^2/4s} (1/2 - x_n^2/4s) s^{-(n+2)/2} h(1-s) J_i(x', s) ds,
///   J_i(x', s) = int K(x'-xi', s) d_i g(xi') dxi',
/// through the substitution sigma = x_n^2/4s. n = 3.
KernelValue main_term_dnI2(int i, const EvalPoint& p, const FluxSpec& spec, const QuadSpec& q);

/// Same quantity as the T-integral of P_{e_i}(x', T) times -4 int Gamma_1''(x_n, s) h(1-s)
/// (4 pi (T-s))^{-1/2} ds. Independent route used for cross-checks.
KernelValue main_term_dnI2_subordinated(int i, const EvalPoint& p, const FluxSpec& spec, const QuadSpec& q);

namespace subordination {

/// Z_j(x_n, s, tau) = int_0^{x_n} w(x_n - z, s) Gamma_1^{(j)}(z, tau) dz, w(y,s) = (y/2s) e^{-y^2/4s},
/// and its x_n-derivative, in closed form: out = {Z_0, Z_1, d_n Z_0, d_n Z_1}.
void z_functions(double xn, double s, double tau, double out[4]);

/// Same by Gauss-Legendre quadrature in z (test oracle).
void z_functions_quadrature(double xn, double s, double tau, double out[4]);

enum Channel { KB1, KB2, KC0, KC1, KC0n, KC1n, KA, KAp, kChannels };

/// The eight s-integrals over the support of h(t - s), 0 < s < T:
///   KB_k  = int Gamma_1^{(k)}(x_n, s) h(t-s) (4 pi (T-s))^{-1/2} ds
///   KC_j  = int (4 pi s)^{-1/2} Z_j(x_n, s, T-s) h(t-s) ds     (KC_jn with d_n Z_j)
///   KA    = int (4 pi s)^{-1/2} Gamma_1'(x_n, T-s) h(t-s) ds   (KAp with h')
/// with_pressure = false drops KA/KAp and relaxes the singularity annotation at s = t-1.
void time_channels(double xn, double t, double T, double a, const QuadSpec& q, bool with_pressure,
                   double out[kChannels], double err[kChannels]);

/// Heat-smoothed flux derivatives P_alpha(x', T); alpha has n-1 entries each <= 3.
double smoothed_flux(const std::vector<double>& xprime, double T, const FluxSpec& spec,
                     const std::vector<int>& alpha);

}  // namespace subordination

}  // namespace hsflow
