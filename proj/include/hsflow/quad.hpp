#pragma once
// Adaptive Gauss-Kronrod quadrature with endpoint substitutions for the
// singular integrands of the half-space Stokes representation.

#include <functional>
#include <limits>
#include <optional>
#include <vector>

namespace hsflow {

/// Singularity annotation attached to an integration interval.
///
/// A `Power` singularity at `location` means the integrand behaves like
/// |s - location|^exponent times a smooth function. `EssentialGaussian`
/// means a factor exp(-c/(s - location)) sharply varying near the location;
/// `scale` carries c (for xn^2/4s factors, c = xn^2/4).
struct Singularity {
    enum class Kind { None, Power, EssentialGaussian };
    double location = 0.0;
    Kind kind = Kind::None;
    double exponent = 0.0;
    double scale = 0.0;

    static Singularity power(double loc, double exponent) {
        return {loc, Kind::Power, exponent, 0.0};
    }
    static Singularity essential_gaussian(double loc, double c) {
        return {loc, Kind::EssentialGaussian, 0.0, c};
    }
};

struct QuadSpec {
    double rel_tol = 1e-8;
    double abs_tol = 1e-12;
    int max_depth = 40;
    /// Interior points where the integrand is not smooth (kinks, peaks).
    std::vector<double> breakpoints;
    std::vector<Singularity> singularities;
    /// Cap on the number of live subintervals.
    int max_intervals = 4000;
    /// Extra absolute floor, as a multiple of rel_tol * integral of |f|.
    /// Zero keeps the plain max(abs_tol, rel_tol*|I|) criterion.
    double l1_floor = 0.0;

    /// Copy with both tolerances scaled by `factor` (0.1 = ten times tighter).
    QuadSpec tightened(double factor) const {
        QuadSpec q = *this;
        q.rel_tol *= factor;
        q.abs_tol *= factor;
        return q;
    }
};

struct QuadResult {
    double value = 0.0;
    double abs_error = 0.0;
    long evaluations = 0;
    bool converged = true;
    /// Radius (or upper limit) at which a Gaussian tail was cut, 0 if none.
    double truncation_radius = 0.0;
};

/// Result for vector-valued integrands; one value/error per component.
struct VecQuadResult {
    std::vector<double> value;
    std::vector<double> abs_error;
    long evaluations = 0;
    bool converged = true;
};

using Integrand = std::function<double(double)>;
/// Vector integrand: writes `dim` values for the abscissa into `out`.
using VecIntegrand = std::function<void(double, double* out)>;

/// Adaptive integration of f over [lo, hi]; hi may be +infinity.
/// Power singularities at the endpoints are removed by u = (s - e)^{1/p}
/// style substitutions; interior singular points and breakpoints split the
/// interval first.
QuadResult integrate_interval(const Integrand& f, double lo, double hi, const QuadSpec& spec);

/// Integrand that also receives x - lo and hi - x. Near a singular endpoint these
/// distances are exact, where recomputing them from x would cancel.
using OffsetIntegrand = std::function<double(double x, double from_lo, double to_hi)>;
QuadResult integrate_interval(const OffsetIntegrand& f, double lo, double hi, const QuadSpec& spec);

/// Vector version: every component must meet the tolerance.
VecQuadResult integrate_interval_vec(int dim, const VecIntegrand& f, double lo, double hi,
                                     const QuadSpec& spec);
/// Vector version with exact offsets x - lo and hi - x, as for OffsetIntegrand.
using VecOffsetIntegrand = std::function<void(double x, double from_lo, double to_hi, double* out)>;
VecQuadResult integrate_interval_vec(int dim, const VecOffsetIntegrand& f, double lo, double hi,
                                     const QuadSpec& spec);

/// Lower limit of the sigma variable sigma = xn^2/(4s) for s in (0, t].
inline double sigma_lower_limit(double xn, double t) { return xn * xn / (4.0 * t); }

/// Integrates f(s) over [s_lo, s_hi] (s_lo >= 0) after the change of
/// variables sigma = xn^2/(4s). The factor exp(-xn^2/4s) of f becomes a plain
/// exp(-sigma); the sigma range is cut where exp(-sigma) is negligible.
/// spec.breakpoints are given in s and mapped; spec.singularities are ignored.
QuadResult integrate_time_sigma(const Integrand& f, double xn, double s_lo, double s_hi,
                                const QuadSpec& spec);

/// Integrates f over the disk (or segment, when center.size() == 1) of radius
/// r around center. With a singular point, polar coordinates centered at that
/// point are used so the Jacobian cancels a |xi' - p|^{-1} singularity.
/// Supports dimension 1 and 2 only.
QuadResult integrate_disk(const std::function<double(const double*)>& f,
                          const std::vector<double>& center, double r, const QuadSpec& spec,
                          const std::optional<std::vector<double>>& singular_point = std::nullopt);

/// n-point Gauss-Legendre rule on [-1, 1] (cached, thread-safe after first use).
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const GaussRule& gauss_legendre(int n);

/// Exposes the Kronrod 21-point abscissae/weights for verification.
struct KronrodRule {
    std::vector<double> xgk;  // 11 non-negative abscissae, decreasing, last = 0
    std::vector<double> wgk;
    std::vector<double> wg;   // Gauss weights for xgk[1], xgk[3], ...
};
const KronrodRule& kronrod21();

}  // namespace hsflow
