#pragma once
// Blow-up rate regressions and dipole sign maps built on the main singular term of d_n v_i at t = 1.

#include <string>
#include <vector>

#include "hsflow/flux.hpp"
#include "hsflow/quad.hpp"

namespace hsflow {

struct RateFit {
    /// "log" (value against log(2/x_n), a = 1/2) or "power" (log|value| against log x_n, a < 1/2).
    std::string model;
    int component = 0;
    std::vector<double> xn, values;
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    /// max |value| over the samples; the fit is skipped (slope 0, r_squared NaN) below 1e-300.
    double amplitude = 0.0;
    /// Sign of the sampled values (+1, -1, or 0 when they disagree or vanish).
    int sign = 0;
};

/// n_points geometric x_n values in [xn_min, xn_max] at x' = xprime, t = 1.
RateFit blowup_rate(const FluxSpec& spec, const QuadSpec& q, const std::vector<double>& xprime, int component,
                    double xn_min, double xn_max, int n_points);

/// Least squares y = slope x + intercept.
void linear_fit(const std::vector<double>& x, const std::vector<double>& y, double& slope, double& intercept,
                double& r_squared);

enum class DipoleRegion { InsideCone, OutsideCone, Strip };
std::string region_name(DipoleRegion r);

/// Cone classification for the sign of d_3 v_1: |x2| > sqrt2 (|x1| + 12) inside,
/// |x2| < sqrt2 (|x1| - 12) outside, the strip in between.
DipoleRegion dipole_region(double x1, double x2);

struct DipoleCell {
    double x1, x2;
    double d3v1, d3v2;
    DipoleRegion region;
    /// Predicted signs (0 when nothing is predicted): d3v1 -1 inside, +1 outside;
    /// d3v2 sgn(x1 x2) when |x1|, |x2| > 1.
    int predicted1, predicted2;
    /// |x'| > 100 and a prediction exists.
    bool asserted1, asserted2;
};

/// Main terms of d_3 v_1 and d_3 v_2 for the dipole flux at t = 1 and x_n = xn_probe, for the
/// given points.
std::vector<DipoleCell> dipole_sign_map(const FluxSpec& spec, const QuadSpec& q,
                                        const std::vector<std::pair<double, double>>& points, double xn_probe);

/// grid_n x grid_n uniform grid over [x1_lo, x1_hi] x [x2_lo, x2_hi] (row-major, x2 fastest).
std::vector<std::pair<double, double>> dipole_grid(double x1_lo, double x1_hi, double x2_lo, double x2_hi,
                                                   int grid_n);

}  // namespace hsflow
