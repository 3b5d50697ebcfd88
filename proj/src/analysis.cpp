#include "hsflow/analysis.hpp"

#include <cmath>

#include "hsflow/errors.hpp"
#include "hsflow/flow.hpp"

namespace hsflow {

void linear_fit(const std::vector<double>& x, const std::vector<double>& y, double& slope, double& intercept,
                double& r_squared) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw DomainError("linear_fit: need matching samples, at least two");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw DomainError("linear_fit: abscissae coincide");
    slope = sxy / sxx;
    intercept = my - slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (slope * x[i] + intercept);
        ss_res += r * r;
    }
    r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
}

RateFit blowup_rate(const FluxSpec& spec, const QuadSpec& q, const std::vector<double>& xprime, int component,
                    double xn_min, double xn_max, int n_points) {
    spec.validate();
    if (spec.n != 3 || xprime.size() != 2) throw DomainError("blowup_rate: n = 3 only");
    if (component < 0 || component > 1) throw DomainError("blowup_rate: component must be tangential");
    if (!(xn_min > 0.0 && xn_max > xn_min && n_points >= 3)) throw DomainError("blowup_rate: bad x_n range");
    if (std::hypot(xprime[0], xprime[1]) < 3.0) throw DomainError("blowup_rate: |x'| >= 3 required");

    RateFit f;
    f.component = component;
    f.model = spec.a == 0.5 ? "log" : "power";
    int pos = 0, neg = 0;
    for (int k = 0; k < n_points; ++k) {
        const double xn = xn_min * std::pow(xn_max / xn_min, static_cast<double>(k) / (n_points - 1));
        const double v = main_term_dnI2(component, {xprime, xn, 1.0}, spec, q).value;
        f.xn.push_back(xn);
        f.values.push_back(v);
        f.amplitude = std::max(f.amplitude, std::abs(v));
        pos += v > 0.0;
        neg += v < 0.0;
    }
    f.sign = pos == n_points ? 1 : (neg == n_points ? -1 : 0);
    if (f.amplitude < 1e-300 || (f.model == "power" && f.sign == 0)) {
        f.r_squared = std::nan("");
        return f;
    }
    std::vector<double> X, Y;
    for (int k = 0; k < n_points; ++k) {
        if (f.model == "log") {
            X.push_back(std::log(2.0 / f.xn[k]));
            Y.push_back(f.values[k]);
        } else {
            X.push_back(std::log(f.xn[k]));
            Y.push_back(std::log(std::abs(f.values[k])));
        }
    }
    linear_fit(X, Y, f.slope, f.intercept, f.r_squared);
    return f;
}

std::string region_name(DipoleRegion r) {
    switch (r) {
        case DipoleRegion::InsideCone: return "inside_cone";
        case DipoleRegion::OutsideCone: return "outside_cone";
        default: return "strip";
    }
}

DipoleRegion dipole_region(double x1, double x2) {
    const double a1 = std::abs(x1), a2 = std::abs(x2);
    if (a2 > std::sqrt(2.0) * (a1 + 12.0)) return DipoleRegion::InsideCone;
    if (a2 < std::sqrt(2.0) * (a1 - 12.0)) return DipoleRegion::OutsideCone;
    return DipoleRegion::Strip;
}

std::vector<std::pair<double, double>> dipole_grid(double x1_lo, double x1_hi, double x2_lo, double x2_hi,
                                                   int grid_n) {
    if (grid_n < 1) throw DomainError("dipole_grid: grid_n >= 1 required");
    std::vector<std::pair<double, double>> pts;
    auto node = [grid_n](double lo, double hi, int k) { return grid_n == 1 ? lo : lo + (hi - lo) * k / (grid_n - 1); };
    for (int i = 0; i < grid_n; ++i)
        for (int j = 0; j < grid_n; ++j) pts.emplace_back(node(x1_lo, x1_hi, i), node(x2_lo, x2_hi, j));
    return pts;
}

std::vector<DipoleCell> dipole_sign_map(const FluxSpec& spec, const QuadSpec& q,
                                        const std::vector<std::pair<double, double>>& points, double xn_probe) {
    spec.validate();
    if (spec.shape != Shape::Dipole || spec.n != 3) throw ConfigError("dipole map needs the dipole flux with n = 3");
    if (!(xn_probe > 0.0)) throw DomainError("dipole map: x_n probe must be positive");
    std::vector<DipoleCell> out;
    for (const auto& [x1, x2] : points) {
        DipoleCell c{};
        c.x1 = x1;
        c.x2 = x2;
        const EvalPoint p{{x1, x2}, xn_probe, 1.0};
        c.d3v1 = main_term_dnI2(0, p, spec, q).value;
        c.d3v2 = main_term_dnI2(1, p, spec, q).value;
        c.region = dipole_region(x1, x2);
        c.predicted1 = c.region == DipoleRegion::InsideCone ? -1 : (c.region == DipoleRegion::OutsideCone ? 1 : 0);
        c.predicted2 = (std::abs(x1) > 1.0 && std::abs(x2) > 1.0) ? (x1 * x2 > 0.0 ? 1 : -1) : 0;
        const bool far = std::hypot(x1, x2) > 100.0;
        c.asserted1 = far && c.predicted1 != 0;
        c.asserted2 = far && c.predicted2 != 0;
        out.push_back(c);
    }
    return out;
}

}  // namespace hsflow
