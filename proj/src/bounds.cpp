#include "hsflow/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>

#include "hsflow/errors.hpp"
#include "hsflow/kernels.hpp"

namespace hsflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double norm(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

void finish_report(EnvelopeReport& r) {
    r.max_ratio = 0.0;
    for (const auto& s : r.samples) r.max_ratio = std::max(r.max_ratio, s.ratio);
    r.c_fit = r.samples.empty() ? 0.0 : r.samples[r.calibration_index].ratio;
    r.violations = 0;
    for (const auto& s : r.samples)
        if (s.ratio > 1.5 * r.c_fit) ++r.violations;
}

// Uniform [0, 1) from the raw 64-bit engine output, so sample sets do not depend on
// the standard library's distribution implementation.
struct Uniform {
    std::mt19937_64 gen;
    explicit Uniform(std::uint64_t seed) : gen(seed) {}
    double operator()() { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }
    double between(double lo, double hi) { return lo + (hi - lo) * (*this)(); }
    double log_between(double lo, double hi) { return std::exp(between(std::log(lo), std::log(hi))); }
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

QuadSpec precise() {
    QuadSpec q;
    q.rel_tol = 1e-12;
    q.abs_tol = 1e-300;
    return q;
}

}  // namespace

bool EnvelopeReport::finite() const {
    if (!std::isfinite(max_ratio) || !std::isfinite(refined_max_ratio)) return false;
    for (const auto& s : samples)
        if (!std::isfinite(s.ratio) || s.ratio < 0.0) return false;
    return true;
}

bool EnvelopeReport::stable(double tol) const {
    if (!(max_ratio > 0.0)) return false;
    return std::abs(refined_max_ratio / max_ratio - 1.0) <= tol;
}

double japanese_bracket(const std::vector<double>& x) {
    double s = 1.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

// ---------------------------------------------------------------- K bounds

double K_lower_bound(double d, double s, double m, int n) {
    if (!(d > 0.0 && s > 0.0 && m >= 2.0 && n >= 3)) throw DomainError("K_lower_bound: need d, s > 0, m >= 2, n >= 3");
    const double lead = std::pow(m / ((m + 1.0) * d), n - 2) * std::pow(4.0 * M_PI * s, 0.5 * (n - 1));
    return lead * (1.0 - std::pow(2.0, 0.25 * (n - 1)) * std::exp(-d * d / (8.0 * m * m * s)));
}

double K_upper_tail_shape(double d, double s, double m, int n) {
    if (!(d > 0.0 && s > 0.0 && m >= 2.0 && n >= 3)) throw DomainError("K_upper_bound: need d, s > 0, m >= 2, n >= 3");
    return std::pow(d, 2 - n) * std::pow(s, 0.5 * (n - 1)) * std::exp(-d * d / (8.0 * m * m * s));
}

double K_upper_bound(double d, double s, double m, int n, double C) {
    const double tail = K_upper_tail_shape(d, s, m, n);
    const double lead = std::pow(m / ((m - 1.0) * d), n - 2) * std::pow(4.0 * M_PI * s, 0.5 * (n - 1));
    return lead + C * tail;
}

double K_upper_constant(int n) {
    const double d = 5.0, s = 1.0, m = 10.0;
    std::vector<double> xp(n - 1, 0.0);
    xp[0] = d;
    const double K = n == 3 ? kernel_K_closed_form(xp, s) : kernel_K(xp, s, precise()).value;
    return K / K_upper_tail_shape(d, s, m, n);
}

std::vector<KSandwichRow> K_sandwich_lattice(double C) {
    std::vector<KSandwichRow> rows;
    auto logspace = [](double lo, double hi, int k) {
        return std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * k / 4.0);
    };
    for (int id = 0; id < 5; ++id)
        for (int is = 0; is < 5; ++is)
            for (int im = 0; im < 5; ++im) {
                KSandwichRow r;
                r.d = logspace(1.0, 100.0, id);
                r.s = logspace(0.01, 4.0, is);
                r.m = logspace(2.0, 200.0, im);
                r.K = kernel_K_closed_form({r.d, 0.0}, r.s);
                r.lower = K_lower_bound(r.d, r.s, r.m, 3);
                r.upper = K_upper_bound(r.d, r.s, r.m, 3, C);
                r.holds = r.lower <= r.K && r.K <= r.upper;
                rows.push_back(r);
            }
    return rows;
}

// ---------------------------------------------------------------- lower bounds

namespace {

void check_lower_bound_domain(const std::vector<double>& x, double a, int n) {
    if (n < 3 || static_cast<int>(x.size()) != n) throw DomainError("lower bound: x must have n >= 3 entries");
    if (!(a > 0.0 && a <= 0.5)) throw DomainError("lower bound: a must lie in (0, 1/2]");
    const double xn = x[n - 1];
    if (!(xn > 0.0 && xn <= 1.0)) throw DomainError("lower bound: need 0 < x_n <= 1");
    const double r = norm(std::vector<double>(x.begin(), x.end() - 1));
    if (r < 3.0) throw DomainError("lower bound: need |x'| >= 3");
}

}  // namespace

double lower_bound_single(const std::vector<double>& x, double a, int n, double C1, double C2) {
    check_lower_bound_domain(x, a, n);
    const double xn = x[n - 1];
    const double r = norm(std::vector<double>(x.begin(), x.end() - 1));
    const double growth = a == 0.5 ? std::log(2.0 / xn) : std::pow(xn, 2.0 * a - 1.0);
    return C1 * std::pow(r, 1 - n) * growth - C2 * std::pow(r, 2 - n);
}

double lower_bound_component(const std::vector<double>& x, int i, double a, int n, double C1, double C2) {
    check_lower_bound_domain(x, a, n);
    if (i < 0 || i >= n - 1) throw DomainError("lower_bound_component: i must be tangential");
    const double xi = std::abs(x[i]);
    if (xi == 0.0) return 0.0;
    const double xn = x[n - 1];
    const double r = norm(std::vector<double>(x.begin(), x.end() - 1));
    if (a == 0.5)
        return C1 * xi * std::pow(r, -n) * std::log(2.0 / xn) - C2 * std::pow(r, 2 - n) * std::log(4.0 * r / xi);
    return C1 * xi * std::pow(r, -n) * std::pow(xn, 2.0 * a - 1.0) -
           C2 * std::pow(xi, 2.0 * a - 1.0) * std::pow(r, -(n - 3 + 2.0 * a));
}

LowerBoundConstants M_constants(double a, int n, double xprime_norm, double xi_abs) {
    if (!(a > 0.0 && a <= 0.5)) throw DomainError("M_constants: a must lie in (0, 1/2]");
    if (n < 3) throw DomainError("M_constants: n >= 3 required");
    LowerBoundConstants c;
    c.a = a;
    c.delta = 3.0 / (4.0 * (n - 1));
    c.m_choice = xi_abs > 0.0 ? 3.0 * std::sqrt(n - 1.0) * (1.0 + xprime_norm) * (1.0 + xprime_norm) / xi_abs
                              : 4.0 * (n - 1) * xprime_norm + 1.0;
    QuadSpec q = precise();
    q.rel_tol = 1e-13;
    q.max_depth = 60;
    auto f = [a](double s) { return std::exp(-s) * (0.5 * std::pow(s, -0.5 - a) - std::pow(s, 0.5 - a)); };
    if (a < 0.5) {
        QuadSpec q1 = q;
        q1.singularities = {Singularity::power(0.0, -0.5 - a)};
        c.M1 = integrate_interval(OffsetIntegrand([&](double, double s, double) { return f(s); }), 0.0, 0.5, q1).value;
    } else {
        c.M1 = kInf;
    }
    c.M2 = -integrate_interval(Integrand(f), 0.5, kInf, q).value;
    return c;
}

// ---------------------------------------------------------------- algebraic inequalities

double mixed_difference(double t, double b, double L, double h) {
    auto H = [h](double s) { return 1.0 / std::hypot(s, h); };
    return H(t) - H(t + b) - H(t + L) + H(t + b + L);
}

MixedDifferenceSign mixed_difference_sign(double t, double b, double L, double h, double eps) {
    if (!(h > 0.0 && b > 0.0 && L > 0.0 && t > -b && eps > 0.0 && eps <= 1.0))
        throw DomainError("mixed_difference_sign: need h, b, L > 0, t > -b, eps in (0, 1]");
    MixedDifferenceSign c;
    c.positive_region = t >= h / std::sqrt(2.0 - eps);
    c.negative_region = t + b + L < h / std::sqrt(2.0 + eps);
    const double F = mixed_difference(t, b, L, h);
    const double H = 1.0 / std::hypot(t + b + L, h);
    const double rhs = 0.25 * eps * b * L * H * H * H;
    c.holds = true;
    if (c.positive_region) c.holds = F > rhs;
    if (c.negative_region) c.holds = c.holds && F < -rhs;
    return c;
}

double rectangle_difference(double t, double u, double aa, double bb) {
    if (t == 0.0 && aa == 0.0) return kInf;
    auto H = [](double x, double y) { return 1.0 / std::hypot(x, y); };
    return H(t, aa) - H(t, bb) - H(u, aa) + H(u, bb);
}

bool rectangle_difference_bound_holds(double t, double u, double aa, double bb) {
    if (!(t >= 0.0 && u >= t && aa >= 0.0 && bb >= aa)) throw DomainError("rectangle_difference_bound_holds: need 0 <= t <= u, 0 <= a <= b");
    const double H = 1.0 / std::hypot(u, bb);
    const double rhs = 0.75 * (u * u - t * t) * (bb * bb - aa * aa) * std::pow(H, 5);
    return rectangle_difference(t, u, aa, bb) >= rhs;
}

int mixed_difference_violations(int draws, unsigned long long seed) {
    Uniform u(seed);
    int bad = 0;
    for (int k = 0; k < draws; ++k) {
        const double h = u.log_between(0.1, 10.0), eps = u.between(1e-3, 1.0);
        double t, b, L;
        if (k % 2 == 0) {
            t = h / std::sqrt(2.0 - eps) * (1.0 + 3.0 * u());
            b = u.log_between(1e-3, 10.0);
            L = u.log_between(1e-3, 10.0);
        } else {
            const double c = h / std::sqrt(2.0 + eps) * u.between(0.01, 0.999);
            L = c * u.between(0.2, 0.95);
            b = L * u.between(0.01, 1.0);
            t = c - b - L;
        }
        const MixedDifferenceSign r = mixed_difference_sign(t, b, L, h, eps);
        if (!(r.positive_region || r.negative_region) || !r.holds) ++bad;
    }
    return bad;
}

int rectangle_difference_violations(int draws, unsigned long long seed) {
    Uniform u(seed);
    int bad = 0;
    for (int k = 0; k < draws; ++k) {
        const double t = k % 10 == 0 ? 0.0 : u.between(0.0, 5.0);
        const double uu = t + u.log_between(1e-3, 5.0);
        const double aa = k % 7 == 0 ? 0.0 : u.between(0.0, 5.0);
        const double bb = aa + u.log_between(1e-3, 5.0);
        if (!rectangle_difference_bound_holds(t, uu, aa, bb)) ++bad;
    }
    return bad;
}

// ---------------------------------------------------------------- integral bounds

double radial_power_integral(double d, double k, double a, double L, const QuadSpec& q) {
    QuadSpec qs = q;
    for (double p : {0.1 * a, a, 10.0 * a})
        if (p > 0.0 && p < L) qs.breakpoints.push_back(p);
    if (d < 1.0) qs.singularities = {Singularity::power(0.0, d - 1.0)};
    auto f = [d, k, a](double, double r, double) { return std::pow(r, d - 1.0) * std::pow(r + a, -k); };
    return integrate_interval(OffsetIntegrand(f), 0.0, L, qs).value;
}

double radial_power_bound(double d, double k, double a, double L) {
    if (k < d) return std::pow(L, d) * std::pow(a + L, -k);
    const double base = std::pow(L, d) * std::pow(a + L, -d);
    if (k == d) return base * (1.0 + std::max(0.0, std::log(L / a)));
    return base * std::pow(a, -(k - d));
}

double two_centre_integral(double k, double m, double X, double a, double b, const QuadSpec& q) {
    if (!(k + m > 3.0 && X > 0.0 && a > 0.0 && b > 0.0)) throw DomainError("two_centre_integral: need k + m > 3 and X, a, b > 0");
    // int w (w+b)^{-m} dw
    auto prim = [m, b](double w) {
        const double u = w + b;
        if (m == 1.0) return w - b * std::log(u);
        if (m == 2.0) return std::log(u) + b / u;
        return std::pow(u, 2.0 - m) / (2.0 - m) - b * std::pow(u, 1.0 - m) / (1.0 - m);
    };
    const GaussRule& gl = gauss_legendre(20);
    // angular average over the sphere |z| = r, written in w = |z - x|
    auto shell = [&](double r) {
        const double lo = std::abs(r - X), hi = r + X;
        if (r <= 4.0 * X) return prim(hi) - prim(lo);
        double s = 0.0;
        for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
            const double w = r + X * gl.nodes[i];
            s += gl.weights[i] * w * std::pow(w + b, -m);
        }
        return X * s;
    };
    QuadSpec qs = q;
    for (double p : {X - 10.0 * b, X - b, X, X + b, X + 10.0 * b, 0.1 * a, a, 10.0 * a, 2.0 * X, 4.0 * X})
        if (p > 0.0) qs.breakpoints.push_back(p);
    std::sort(qs.breakpoints.begin(), qs.breakpoints.end());
    qs.breakpoints.erase(std::unique(qs.breakpoints.begin(), qs.breakpoints.end()), qs.breakpoints.end());
    auto f = [&](double r) { return r * std::pow(r + a, -k) * shell(r); };
    return 2.0 * M_PI / X * integrate_interval(Integrand(f), 0.0, kInf, qs).value;
}

double two_centre_bound(int d, double k, double m, double X, double a, double b) {
    const double R = std::max({X, a, b});
    double s = std::pow(R, d - k - m);
    if (k == d) s += std::pow(R, -m) * std::log(R / a);
    if (m == d) s += std::pow(R, -k) * std::log(R / b);
    if (k > d) s += std::pow(R, -m) * std::pow(a, d - k);
    if (m > d) s += std::pow(R, -k) * std::pow(b, d - m);
    return s;
}

double log_weight_integral(double m, double b, const QuadSpec& q) {
    if (!(m >= 1.0 && b > 0.0)) throw DomainError("log_weight_integral: need m >= 1, b > 0");
    // u = e^{-y}
    auto f = [m, b](double y) {
        const double u = std::exp(-y);
        return y * u * std::pow(b + u, -m);
    };
    QuadSpec qs = q;
    const double ys = -std::log(b);
    for (double p : {ys - 5.0, ys, ys + 5.0, ys + 30.0})
        if (p > 0.0) qs.breakpoints.push_back(p);
    return integrate_interval(Integrand(f), 0.0, kInf, qs).value;
}

double log_weight_bound(double m, double b) {
    const double lb = std::log(b);
    return 1.0 + std::pow(b, 1.0 - m) * std::abs(lb) + (m == 1.0 ? lb * lb : 0.0);
}

EnvelopeReport integral_bound_check(IntegralBound which, const std::vector<double>& params, const QuadSpec& q) {
    EnvelopeReport rep;
    std::vector<std::vector<double>> grid;
    std::function<double(const std::vector<double>&, const QuadSpec&)> lhs;
    std::function<double(const std::vector<double>&)> rhs;
    switch (which) {
        case IntegralBound::RadialPower: {
            if (params.size() != 2 || !(params[0] > 0.0 && params[1] > 0.0))
                throw DomainError("radial power bound: params {d, k} with d, k > 0");
            const double d = params[0], k = params[1];
            rep.name = "radial_power_d" + fmt(d) + "_k" + fmt(k);
            for (double L : {0.5, 1.0, 2.0, 4.0})
                for (double fa : {1e-4, 1e-3, 1e-2, 1e-1}) grid.push_back({L, fa * L});
            rep.calibration_index = 1 * 4 + 2;  // L = 1, a = 0.01
            lhs = [d, k](const std::vector<double>& p, const QuadSpec& qq) { return radial_power_integral(d, k, p[1], p[0], qq); };
            rhs = [d, k](const std::vector<double>& p) { return radial_power_bound(d, k, p[1], p[0]); };
            break;
        }
        case IntegralBound::TwoCentre: {
            if (params.size() != 2 || !(params[0] > 0.0 && params[1] > 0.0 && params[0] + params[1] > 3.0))
                throw DomainError("two-centre bound: params {k, m} with k, m > 0, k + m > 3");
            const double k = params[0], m = params[1];
            rep.name = "two_centre_k" + fmt(k) + "_m" + fmt(m);
            for (double X : {0.5, 1.0, 2.0, 4.0, 8.0})
                for (double a : {1e-3, 1e-2, 1e-1})
                    for (double b : {1e-3, 1e-2, 1e-1}) grid.push_back({X, a, b});
            rep.calibration_index = 2 * 9 + 1 * 3 + 1;  // |x| = 2, a = b = 0.01
            lhs = [k, m](const std::vector<double>& p, const QuadSpec& qq) { return two_centre_integral(k, m, p[0], p[1], p[2], qq); };
            rhs = [k, m](const std::vector<double>& p) { return two_centre_bound(3, k, m, p[0], p[1], p[2]); };
            break;
        }
        case IntegralBound::LogWeight: {
            if (params.size() != 1 || !(params[0] >= 1.0)) throw DomainError("log-weight bound: params {m} with m >= 1");
            const double m = params[0];
            rep.name = "log_weight_m" + fmt(m);
            for (int e = 0; e <= 10; ++e) grid.push_back({std::pow(10.0, -6.0 + 0.5 * e)});
            rep.calibration_index = 5;  // b = 10^{-3.5}
            lhs = [m](const std::vector<double>& p, const QuadSpec& qq) { return log_weight_integral(m, p[0], qq); };
            rhs = [m](const std::vector<double>& p) { return log_weight_bound(m, p[0]); };
            break;
        }
    }
    const QuadSpec fine = q.tightened(0.1);
    rep.refined_max_ratio = 0.0;
    for (const auto& p : grid) {
        EnvelopeSample s;
        s.point = p;
        s.computed = lhs(p, q);
        s.envelope = rhs(p);
        s.ratio = std::abs(s.computed) / s.envelope;
        rep.samples.push_back(s);
        rep.refined_max_ratio = std::max(rep.refined_max_ratio, std::abs(lhs(p, fine)) / s.envelope);
    }
    finish_report(rep);
    return rep;
}

// ---------------------------------------------------------------- envelopes

double LN_weight(double xn, double t, double a) {
    const double r = xn * xn + std::abs(t - 1.0);
    double w = std::pow(r, a - 0.5);
    if (a == 0.5) w += std::log(2.0 + 1.0 / r);
    return w;
}

double velocity_envelope(const EvalPoint& p, double N1) {
    const int n = static_cast<int>(p.xprime.size()) + 1;
    return N1 * std::pow(japanese_bracket(p.full()), 1 - n);
}

double gradient_envelope(const EvalPoint& p, int i, int j, double a, double N2) {
    const int n = static_cast<int>(p.xprime.size()) + 1;
    const double br = japanese_bracket(p.full());
    double e = std::pow(br, -n);
    if (i < n - 1 && j == n - 1) e += LN_weight(p.xn, p.t, a) / (std::pow(br, n - 1) * std::pow(p.xn + 1.0, 2.0 * a));
    return N2 * e;
}

double pressure_envelope(const EvalPoint& p, double a) {
    const int n = static_cast<int>(p.xprime.size()) + 1;
    const double br = japanese_bracket(p.full());
    if (p.t >= 0.25 && p.t <= 1.0) return std::pow(1.0 - p.t, a - 1.0) * std::pow(br, 2 - n);
    if (p.t > 1.0) return std::pow(p.t - 1.0, a - 1.0) * std::pow(br, 1 - n);
    return 0.0;
}

std::vector<std::string> envelope_suite_names() {
    return {"golovkin", "A_gradient", "B", "B_gaussian", "C_i", "velocity", "gradient", "pressure"};
}

namespace {

struct KernelSuiteSample {
    SpacePoint x;
    double t;
};

// Largest ratio over the components of one kernel quantity at (x, t).
struct Ratio {
    double computed = 0.0, envelope = 1.0, ratio = 0.0;
    void take(double c, double e) {
        const double r = std::abs(c) / e;
        if (r >= ratio) *this = Ratio{std::abs(c), e, r};
    }
};

Ratio kernel_ratio(const std::string& name, const KernelSuiteSample& s, const QuadSpec& q) {
    const int n = 3;
    const std::vector<double> x = s.x.full();
    const double x2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    const double t = s.t, xn = s.x.normal;
    Ratio r;
    if (name == "golovkin") {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const int sig = (i < n - 1 && j == n - 1) ? 1 : 0;
                const double e = 1.0 / (std::sqrt(t) * std::pow(x2 + t, 0.5 * (n - sig)) * std::pow(xn * xn + t, 0.5 * sig));
                r.take(golovkin(i, j, s.x, t, q).value, e);
            }
    } else if (name == "A_gradient") {
        double g2 = 0.0;
        for (int k = 0; k < n; ++k) {
            const double v = func_A(s.x, t, multi_index(n, {k}), q).value;
            g2 += v * v;
        }
        r.take(std::sqrt(g2), 1.0 / (std::sqrt(t) * std::pow(x2 + t, 0.5 * (n - 1))));
    } else if (name == "B") {
        r.take(func_B(s.x, t, {}, q).value, 1.0 / (std::pow(x2 + t, 0.5 * (n - 2)) * std::sqrt(xn * xn + t)));
    } else if (name == "B_gaussian") {
        r.take(func_B(s.x, t, {}, q).value,
               std::exp(-xn * xn / (10.0 * t)) / (std::pow(x2 + t, 0.5 * (n - 2)) * std::sqrt(t)));
    } else if (name == "C_i") {
        const SpacePoint origin{{0.0, 0.0}, 0.0};
        for (int i = 0; i < n; ++i)
            r.take(func_Ci(i, s.x, origin, t, q).value, 1.0 / (std::sqrt(t) * std::pow(x2 + t, 0.5 * (n - 1))));
    } else {
        throw DomainError("unknown kernel envelope suite: " + name);
    }
    return r;
}

}  // namespace

EnvelopeReport envelope_suite(const std::string& name, const FluxSpec& spec, const QuadSpec& q, int samples) {
    if (name == "velocity" || name == "gradient" || name == "pressure") {
        for (auto& r : flow_envelope_suites(spec, q, samples))
            if (r.name == name) return r;
    }
    EnvelopeReport rep;
    rep.name = name;
    const auto names = envelope_suite_names();
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw DomainError("unknown envelope suite: " + name);
    Uniform u(0x5eed0000ULL + static_cast<std::uint64_t>(it - names.begin()));
    const QuadSpec fine = q.tightened(0.1);
    rep.refined_max_ratio = 0.0;
    while (static_cast<int>(rep.samples.size()) < samples) {
        const double rho = u.log_between(0.05, 20.0), th = u.between(0.0, 2.0 * M_PI);
        KernelSuiteSample s{SpacePoint{{rho * std::cos(th), rho * std::sin(th)}, u.log_between(0.01, 5.0)},
                            u.log_between(0.01, 4.0)};
        const Ratio r = kernel_ratio(name, s, q);
        // both sides underflow deep in the Gaussian tail; such points carry no information
        if (!(r.envelope > 1e-250)) continue;
        EnvelopeSample es;
        es.point = s.x.full();
        es.point.push_back(s.t);
        es.computed = r.computed;
        es.envelope = r.envelope;
        es.ratio = r.ratio;
        rep.samples.push_back(es);
        rep.refined_max_ratio = std::max(rep.refined_max_ratio, kernel_ratio(name, s, fine).ratio);
    }
    finish_report(rep);
    return rep;
}

std::vector<EnvelopeReport> flow_envelope_suites(const FluxSpec& spec, const QuadSpec& q, int samples) {
    spec.validate();
    if (spec.n != 3) throw DomainError("flow envelope suites are provided for n = 3");
    const FluxNorms N = flux_norms(spec);
    const int n = spec.n;
    EnvelopeReport rv, rg, rp;
    rv.name = "velocity";
    rg.name = "gradient";
    rp.name = "pressure";
    double fv = 0.0, fg = 0.0, fp = 0.0;
    Uniform u(0x5eed1000ULL);
    const QuadSpec fine = q.tightened(0.1);

    auto ratios = [&](const EvalPoint& p, const FlowSample& fs, Ratio& v, Ratio& g, Ratio& pr) {
        for (int i = 0; i < n; ++i) v.take(fs.velocity[i], velocity_envelope(p, N.N1));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) g.take(fs.gradient[i][j], gradient_envelope(p, i, j, spec.a, N.N2));
        pr.take(fs.pressure, pressure_envelope(p, spec.a));
    };
    for (int k = 0; k < samples; ++k) {
        const double rho = u.log_between(0.1, 20.0), th = u.between(0.0, 2.0 * M_PI);
        EvalPoint p{{rho * std::cos(th), rho * std::sin(th)}, u.log_between(1e-3, 5.0), u.between(0.25, 2.0)};
        Ratio v, g, pr, vf, gf, pf;
        ratios(p, flow_sample(p, spec, q), v, g, pr);
        ratios(p, flow_sample(p, spec, fine), vf, gf, pf);
        std::vector<double> pt = p.full();
        pt.push_back(p.t);
        rv.samples.push_back({pt, v.computed, v.envelope, v.ratio});
        rg.samples.push_back({pt, g.computed, g.envelope, g.ratio});
        rp.samples.push_back({pt, pr.computed, pr.envelope, pr.ratio});
        fv = std::max(fv, vf.ratio);
        fg = std::max(fg, gf.ratio);
        fp = std::max(fp, pf.ratio);
    }
    rv.refined_max_ratio = fv;
    rg.refined_max_ratio = fg;
    rp.refined_max_ratio = fp;
    for (auto* r : {&rv, &rg, &rp}) finish_report(*r);
    return {rv, rg, rp};
}

}  // namespace hsflow
