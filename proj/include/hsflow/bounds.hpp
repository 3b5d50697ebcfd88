#pragma once
// Checkable forms of the inequalities satisfied by the kernels and the flow:
// pointwise envelopes, the two-sided bounds on K, the blow-up lower bounds and
// a few auxiliary integral and algebraic inequalities.
//
// Implicit constants are handled by calibration: a report fixes one sample as the
// calibration point, its ratio computed/envelope is C_fit, and the other samples
// are compared against 1.5 * C_fit.

#include <string>
#include <vector>

#include "hsflow/flow.hpp"
#include "hsflow/flux.hpp"
#include "hsflow/quad.hpp"

namespace hsflow {

struct EnvelopeSample {
    std::vector<double> point;
    double computed = 0.0;
    double envelope = 0.0;
    double ratio = 0.0;
};

struct EnvelopeReport {
    std::string name;
    std::vector<EnvelopeSample> samples;
    double max_ratio = 0.0;
    /// Same samples recomputed with 10x tighter quadrature.
    double refined_max_ratio = 0.0;
    int calibration_index = 0;
    double c_fit = 0.0;
    /// Samples with ratio > 1.5 * c_fit.
    int violations = 0;

    bool finite() const;
    /// |refined_max_ratio / max_ratio - 1| <= tol.
    bool stable(double tol = 0.05) const;
};

/// <x> = (1 + |x|^2)^{1/2}.
double japanese_bracket(const std::vector<double>& x);

// ---- two-sided bounds on K(x', s) ----

/// (m/((m+1)d))^{n-2} s^{(n-1)/2} (4 pi)^{(n-1)/2} (1 - 2^{(n-1)/4} e^{-d^2/8m^2 s}).
double K_lower_bound(double d, double s, double m, int n);
/// (m/((m-1)d))^{n-2} s^{(n-1)/2} (4 pi)^{(n-1)/2} + C d^{2-n} s^{(n-1)/2} e^{-d^2/8m^2 s}.
double K_upper_bound(double d, double s, double m, int n, double C);
/// The factor multiplying C in K_upper_bound.
double K_upper_tail_shape(double d, double s, double m, int n);

/// C such that C * K_upper_tail_shape = K at the anchor (d, s, m) = (5, 1, 10).
/// The upper bound already holds there with C = 0, so the anchor ratio is used.
double K_upper_constant(int n = 3);

struct KSandwichRow {
    double d, s, m;
    double K, lower, upper;
    bool holds;
};
/// 5 x 5 x 5 log-spaced lattice d in [1, 100], s in [0.01, 4], m in [2, 200], n = 3.
std::vector<KSandwichRow> K_sandwich_lattice(double C);

// ---- blow-up lower bounds at t = 1 ----

/// C1 |x'|^{1-n} log(2/x_n) - C2 |x'|^{2-n} for a = 1/2, with x_n^{2a-1} in place of the
/// logarithm for a < 1/2. Requires |x'| >= 3, 0 < x_n <= 1 (DomainError).
double lower_bound_single(const std::vector<double>& x, double a, int n, double C1, double C2);

/// Lower bound for -sgn(x_i) d_n v_i(x, 1), i tangential:
///   a = 1/2: C1 |x_i| |x'|^{-n} log(2/x_n) - C2 |x'|^{2-n} log(4|x'|/|x_i|)
///   a < 1/2: C1 |x_i| |x'|^{-n} x_n^{2a-1} - C2 |x_i|^{2a-1} |x'|^{-(n-3+2a)}
/// and exactly 0 when x_i = 0 (the derivative itself vanishes there).
double lower_bound_component(const std::vector<double>& x, int i, double a, int n, double C1, double C2);

struct LowerBoundConstants {
    double M1 = 0.0;
    double M2 = 0.0;
    double delta = 0.0;
    double m_choice = 0.0;
    double a = 0.0;
};
/// M1 = int_0^{1/2} e^{-s}(s^{-1/2-a}/2 - s^{1/2-a}) ds, M2 = int_{1/2}^inf e^{-s}(s^{1/2-a} - s^{-1/2-a}/2) ds
/// by quadrature; delta = 3/(4(n-1)). m_choice is 4(n-1)|x'| + 1 when xi_abs = 0 and
/// 3 sqrt(n-1)(1+|x'|)^2/|x_i| otherwise. For a = 1/2, M1 = +inf.
LowerBoundConstants M_constants(double a, int n = 3, double xprime_norm = 3.0, double xi_abs = 0.0);

// ---- algebraic inequalities ----

/// F = H(t) - H(t+b) - H(t+L) + H(t+b+L), H(t) = (t^2 + h^2)^{-1/2}.
double mixed_difference(double t, double b, double L, double h);

struct MixedDifferenceSign {
    bool positive_region;  // t >= h / sqrt(2 - eps)
    bool negative_region;  // t + b + L < h / sqrt(2 + eps)
    bool holds;            // the strict inequality of the active region (true if none)
};
MixedDifferenceSign mixed_difference_sign(double t, double b, double L, double h, double eps);

/// F = H(t,a) - H(t,b) - H(u,a) + H(u,b), H(x,y) = (x^2+y^2)^{-1/2}; +inf when t = a = 0.
double rectangle_difference(double t, double u, double aa, double bb);
/// F >= (3/4)(u^2 - t^2)(bb^2 - aa^2) H^5(u, bb).
bool rectangle_difference_bound_holds(double t, double u, double aa, double bb);

/// Random parameter draws inside the two regions of mixed_difference_sign (half each) and
/// inside 0 <= t < u, 0 <= a < b for rectangle_difference_bound_holds; returns the number of failures.
/// Negative-region draws keep |t| <= b <= L when t < 0.
int mixed_difference_violations(int draws, unsigned long long seed);
int rectangle_difference_violations(int draws, unsigned long long seed);

// ---- integral bounds ----

/// int_0^L r^{d-1} (r+a)^{-k} dr.
double radial_power_integral(double d, double k, double a, double L, const QuadSpec& q);
double radial_power_bound(double d, double k, double a, double L);

/// int_{R^3} (|z|+a)^{-k} (|z-x|+b)^{-m} dz with |x| = X, reduced to one radial
/// integral (the angular part is done in closed form). k + m > 3.
double two_centre_integral(double k, double m, double X, double a, double b, const QuadSpec& q);
double two_centre_bound(int d, double k, double m, double X, double a, double b);

/// int_0^1 (-log u) (b+u)^{-m} du, m >= 1, 0 < b < 10.
double log_weight_integral(double m, double b, const QuadSpec& q);
double log_weight_bound(double m, double b);

enum class IntegralBound { RadialPower, TwoCentre, LogWeight };

/// Ratio report over the documented grid for one exponent choice:
///   RadialPower: params {d, k}; grid L in {0.5,1,2,4}, a/L in {1e-4,1e-3,1e-2,1e-1}; calibrated at L=1, a=0.01.
///   TwoCentre: params {k, m} (d = 3); grid |x| in {0.5,1,2,4,8}, a, b in {1e-3,1e-2,1e-1};
///        calibrated at |x|=2, a=b=0.01.
///   LogWeight: params {m}; grid b = 10^{-6..-1} in half decades; calibrated at b = 10^{-3.5}.
EnvelopeReport integral_bound_check(IntegralBound which, const std::vector<double>& params, const QuadSpec& q);

// ---- envelope suites ----

/// (x_n^2 + |t-1|)^{a-1/2} + [a = 1/2] log(2 + 1/(x_n^2 + |t-1|)).
double LN_weight(double xn, double t, double a);

/// N1 <x>^{1-n}.
double velocity_envelope(const EvalPoint& p, double N1);
/// N2 [<x>^{-n} + sigma LN / (<x>^{n-1} (x_n+1)^{2a})], sigma = [i < n-1 and j = n-1].
double gradient_envelope(const EvalPoint& p, int i, int j, double a, double N2);
/// [1/4 <= t <= 1](1-t)^{a-1} <x>^{2-n} + [t > 1](t-1)^{a-1} <x>^{1-n}.
double pressure_envelope(const EvalPoint& p, double a);

/// Named kernel and flow envelope suites, 200 deterministic samples each.
/// Kernel suites: "golovkin", "A_gradient", "B", "B_gaussian", "C_i".
/// Flow suites (spec supplies a and the shape): "velocity", "gradient", "pressure".
std::vector<std::string> envelope_suite_names();
EnvelopeReport envelope_suite(const std::string& name, const FluxSpec& spec, const QuadSpec& q,
                              int samples = 200);
/// The three flow suites from one shared set of flow evaluations.
std::vector<EnvelopeReport> flow_envelope_suites(const FluxSpec& spec, const QuadSpec& q, int samples = 200);

}  // namespace hsflow
