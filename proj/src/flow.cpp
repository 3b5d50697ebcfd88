#include "hsflow/flow.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "hsflow/errors.hpp"
#include "hsflow/special.hpp"

namespace hsflow {

std::vector<double> EvalPoint::full() const {
    std::vector<double> x = xprime;
    x.push_back(xn);
    return x;
}

namespace subordination {

namespace {

// m_k(L) = int_0^L u^k e^{-beta u^2} du for k = 0..3
void gauss_moments(double L, double beta, double m[4]) {
    const double X = beta * L * L;
    if (X < 2.0) {
        for (int k = 0; k < 4; ++k) {
            double term = 1.0, sum = 0.0;
            for (int j = 0; j < 80; ++j) {
                const double add = term / (k + 2 * j + 1);
                sum += add;
                if (std::abs(add) <= 1e-17 * std::abs(sum)) break;
                term *= -X / (j + 1);
            }
            m[k] = std::pow(L, k + 1) * sum;
        }
        return;
    }
    const double e = std::exp(-X);
    m[0] = 0.5 * std::sqrt(M_PI / beta) * std::erf(std::sqrt(X));
    m[1] = (1.0 - e) / (2.0 * beta);
    m[2] = (m[0] - L * e) / (2.0 * beta);
    m[3] = (2.0 * m[1] - L * L * e) / (2.0 * beta);
}

}  // namespace

void z_functions(double xn, double s, double tau, double out[4]) {
    // product of the two Gaussians recentred at z0 = xn tau/(s+tau); u = z - z0 in [-z0, z1]
    const double S = s + tau;
    const double beta = S / (4.0 * s * tau);
    const double z0 = xn * (tau / S), z1 = xn * (s / S);
    const double E = std::exp(-xn * xn / (4.0 * S)) / std::sqrt(4.0 * M_PI * tau);
    double a[4], b[4], M[4];
    gauss_moments(z1, beta, a);
    gauss_moments(z0, beta, b);
    for (int k = 0; k < 4; ++k) M[k] = a[k] + (k % 2 == 0 ? b[k] : -b[k]);
    const double P1 = z1 * M[0] - M[1];
    const double P2 = z1 * z0 * M[0] + (z1 - z0) * M[1] - M[2];
    const double c0 = 1.0 - z1 * z1 / (2.0 * s), c1 = z1 / s, c2 = -0.5 / s;
    const double P4 = c0 * z0 * M[0] + (c0 + c1 * z0) * M[1] + (c1 + c2 * z0) * M[2] + c2 * M[3];
    const double f0 = E / (2.0 * s), f1 = -E / (4.0 * s * tau);
    out[0] = f0 * P1;
    out[1] = f1 * P2;
    // d_n Z_0 = w(x_n, s) Gamma_1(0, tau) + Z_1; the direct form P3 cancels badly for tau >> x_n^2
    out[2] = xn / (2.0 * s) * std::exp(-xn * xn / (4.0 * s)) / std::sqrt(4.0 * M_PI * tau) + out[1];
    out[3] = f1 * P4;
}

void z_functions_quadrature(double xn, double s, double tau, double out[4]) {
    const GaussRule& gl = gauss_legendre(20);
    const int panels = 200;
    for (int k = 0; k < 4; ++k) out[k] = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double lo = xn * p / panels, hi = xn * (p + 1) / panels;
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        for (size_t i = 0; i < gl.nodes.size(); ++i) {
            const double z = mid + half * gl.nodes[i];
            const double y = xn - z;
            const double e = std::exp(-y * y / (4.0 * s));
            const double w = y / (2.0 * s) * e;
            const double wp = (1.0 - y * y / (2.0 * s)) / (2.0 * s) * e;
            const double g0 = heat1d(z, tau, 0), g1 = heat1d(z, tau, 1);
            const double wt = gl.weights[i] * half;
            out[0] += wt * w * g0;
            out[1] += wt * w * g1;
            out[2] += wt * wp * g0;
            out[3] += wt * wp * g1;
        }
    }
}

void time_channels(double xn, double t, double T, double a, const QuadSpec& q, bool with_pressure,
                   double out[kChannels], double err[kChannels]) {
    for (int k = 0; k < kChannels; ++k) out[k] = err[k] = 0.0;
    const double tm1 = t - 1.0;
    const double s_lo = std::max(0.0, tm1), s_hi = std::min(T, t - 0.25);
    if (!(s_hi > s_lo)) return;
    const bool lo_is_tm1 = tm1 >= 0.0;
    const bool hi_is_T = T <= t - 0.25;

    QuadSpec qs;
    qs.rel_tol = std::max(1e-14, 0.1 * q.rel_tol);
    qs.abs_tol = 1e-300;
    qs.l1_floor = 1.0;
    qs.max_depth = q.max_depth;
    qs.max_intervals = q.max_intervals;
    for (double b : {t - 0.5, xn * xn, 4.0 * xn * xn, T - xn * xn})
        if (b > s_lo && b < s_hi) qs.breakpoints.push_back(b);
    if (tm1 > 0.0)
        qs.singularities.push_back(Singularity::power(s_lo, with_pressure ? a - 1.0 : a));
    else
        qs.singularities.push_back(Singularity::power(0.0, tm1 == 0.0 && !with_pressure ? a - 0.5 : -0.5));
    if (hi_is_T) qs.singularities.push_back(Singularity::power(T, -0.5));

    const int dim = with_pressure ? kChannels : KA;
    auto f = [&](double s, double dlo, double dhi, double* o) {
        // 1 - (t - s) and T - s without cancellation at the singular ends
        const double delta = lo_is_tm1 ? dlo : s - tm1;
        const double tau = hi_is_T ? dhi : T - s;
        const double h0 = h_near_one(delta, a, 0);
        const double h1 = with_pressure ? h_near_one(delta, a, 1) : 0.0;
        for (int k = 0; k < dim; ++k) o[k] = 0.0;
        if (h0 == 0.0 && h1 == 0.0) return;
        const double rs = 1.0 / std::sqrt(4.0 * M_PI * s);
        const double rt = 1.0 / std::sqrt(4.0 * M_PI * tau);
        o[KB1] = heat1d(xn, s, 1) * h0 * rt;
        o[KB2] = heat1d(xn, s, 2) * h0 * rt;
        double z[4];
        z_functions(xn, s, tau, z);
        o[KC0] = rs * z[0] * h0;
        o[KC1] = rs * z[1] * h0;
        o[KC0n] = rs * z[2] * h0;
        o[KC1n] = rs * z[3] * h0;
        if (with_pressure) {
            const double gp = rs * heat1d(xn, tau, 1);
            o[KA] = gp * h0;
            o[KAp] = gp * h1;
        }
    };
    VecQuadResult r = integrate_interval_vec(dim, VecOffsetIntegrand(f), s_lo, s_hi, qs);
    for (int k = 0; k < dim; ++k) {
        out[k] = r.value[k];
        err[k] = r.abs_error[k];
    }
}

double smoothed_flux(const std::vector<double>& xprime, double T, const FluxSpec& spec,
                     const std::vector<int>& alpha) {
    const int m = spec.n - 1;
    if (static_cast<int>(xprime.size()) != m || static_cast<int>(alpha.size()) != m)
        throw DomainError("smoothed_flux: x' and alpha need n-1 entries");
    double total = 0.0;
    for (const auto& term : bump_terms(spec)) {
        double v = term.weight;
        for (int j = 0; j < m; ++j) {
            double F[4];
            smoothed_bump(xprime[j] - term.centre[j], T, spec.n, F);
            v *= F[alpha[j]];
        }
        total += v;
    }
    return total;
}

}  // namespace subordination

namespace {

using namespace subordination;

void check_point(const EvalPoint& p, const FluxSpec& spec) {
    spec.validate();
    if (spec.n < 3) throw DomainError("flow evaluation requires n >= 3");
    if (static_cast<int>(p.xprime.size()) != spec.n - 1) throw DomainError("point must have n-1 tangential coordinates");
    if (!(p.xn > 0.0)) throw DomainError("flow evaluation requires x_n > 0");
    if (!std::isfinite(p.t)) throw DomainError("time must be finite");
    if (spec.n > 8) throw DomainError("flow evaluation supports n <= 8");
}

// Per-term, per-axis heat-smoothed bump derivatives at one T.
struct SmoothedTable {
    std::vector<BumpTerm> terms;
    int m;
    std::vector<std::array<double, 4>> F;  // [term * m + axis]

    SmoothedTable(const FluxSpec& spec) : terms(bump_terms(spec)), m(spec.n - 1), F(terms.size() * m) {}

    void fill(const std::vector<double>& xprime, double T, int n) {
        for (size_t k = 0; k < terms.size(); ++k)
            for (int j = 0; j < m; ++j) smoothed_bump(xprime[j] - terms[k].centre[j], T, n, F[k * m + j].data());
    }
    double P(const int* alpha) const {
        double total = 0.0;
        for (size_t k = 0; k < terms.size(); ++k) {
            double v = terms[k].weight;
            for (int j = 0; j < m; ++j) v *= F[k * m + j][alpha[j]];
            total += v;
        }
        return total;
    }
};

// Outer variable u = log T. Below x_n^2/400 every channel carries e^{-100} or less.
struct OuterRange {
    double lo, hi;
    QuadSpec spec;
};

OuterRange outer_range(double xn, double t, double a, const QuadSpec& q, bool with_pressure) {
    OuterRange r;
    r.lo = std::log(xn * xn / 400.0);
    r.hi = std::log(1e30);
    r.spec = q;
    r.spec.breakpoints.clear();
    r.spec.singularities.clear();
    if (r.spec.l1_floor == 0.0) r.spec.l1_floor = 1.0;
    std::vector<double> bps = {xn * xn, t - 0.5, t - 0.25};
    for (double b : bps)
        if (b > 0.0 && std::log(b) > r.lo && std::log(b) < r.hi) r.spec.breakpoints.push_back(std::log(b));
    if (t > 1.0 && std::log(t - 1.0) > r.lo)
        r.spec.singularities.push_back(Singularity::power(std::log(t - 1.0), with_pressure ? a - 0.5 : a + 0.5));
    return r;
}

// Positions of velocity, gradient and pressure in the integrand vector of one point.
struct OutputLayout {
    int n;
    bool want_v, want_g, want_p;
    int iv, ig, ip;
};

// T-integrand of the requested parts at one tangential point (outer variable u = log T,
// hence the factor T).
void point_integrand(const SmoothedTable& tab, const OutputLayout& lay, const double K[kChannels], double xn,
                     double T, double ht, double hpt, double* o) {
    const int n = lay.n, m = n - 1;
    const int iv = lay.iv, ig = lay.ig, ip = lay.ip;
    const double G0 = heat1d(xn, T, 0), G1 = heat1d(xn, T, 1), G2 = heat1d(xn, T, 2);
    const double KV1 = 4.0 * K[KC1] - 4.0 * K[KB1] - 2.0 * ht * G0;
    const double KVn = 4.0 * K[KC1n] - 4.0 * K[KB2] - 2.0 * ht * G1;
    int al[8] = {0, 0, 0, 0, 0, 0, 0, 0};
    const double P0 = tab.P(al);
    double Lap = 0.0;
    for (int k = 0; k < m; ++k) {
        al[k] = 2;
        Lap += tab.P(al);
        al[k] = 0;
    }
    auto Pe = [&](int i) {
        al[i] += 1;
        const double v = tab.P(al);
        al[i] -= 1;
        return v;
    };
    if (lay.want_v) {
        for (int i = 0; i < m; ++i) o[iv + i] = T * Pe(i) * KV1;
        o[iv + m] = T * (-4.0 * Lap * K[KC0] - 2.0 * ht * P0 * G1);
    }
    if (lay.want_g) {
        for (int i = 0; i < m; ++i) {
            const double pi = Pe(i);
            for (int j = 0; j < m; ++j) {
                al[i] += 1;
                const double pij = Pe(j);
                al[i] -= 1;
                o[ig + i * n + j] = T * pij * KV1;
            }
            o[ig + i * n + m] = T * pi * KVn;
        }
        for (int j = 0; j < m; ++j) {
            double Lj = 0.0;
            for (int k = 0; k < m; ++k) {
                al[k] += 2;
                Lj += Pe(j);
                al[k] -= 2;
            }
            o[ig + m * n + j] = T * (-4.0 * Lj * K[KC0] - 2.0 * ht * Pe(j) * G1);
        }
        o[ig + m * n + m] = T * (-4.0 * Lap * K[KC0n] - 2.0 * ht * P0 * G2);
    }
    if (lay.want_p)
        o[ip] = T * (-2.0 * ht * Lap * G0 + 2.0 * hpt * P0 * G0 - 4.0 * P0 * K[KAp] + 4.0 * Lap * K[KA]);
}

}  // namespace

FlowSample flow_sample(const EvalPoint& p, const FluxSpec& spec, const QuadSpec& q, unsigned parts) {
    check_point(p, spec);
    const int n = spec.n;
    const bool want_v = parts & kVelocity, want_g = parts & kGradient, want_p = parts & kPressure;
    if (want_p && p.t == 1.0) throw DomainError("pressure is singular at t = 1");
    FlowSample out;
    out.velocity.assign(n, 0.0);
    out.velocity_err.assign(n, 0.0);
    out.gradient.assign(n, std::vector<double>(n, 0.0));
    out.gradient_err = out.gradient;
    out.has_pressure = want_p;
    if (p.t < 0.25) return out;  // h vanishes on (-inf, 1/4]

    const int iv = 0, ig = want_v ? n : 0, ip = ig + (want_g ? n * n : 0);
    const int dim = ip + (want_p ? 1 : 0);
    if (dim == 0) return out;
    const double a = spec.a, xn = p.xn, t = p.t;
    const double ht = h_time(t, a), hpt = want_p ? h_time(t, a, 1) : 0.0;
    const OuterRange R = outer_range(xn, t, a, q, want_p);
    SmoothedTable tab(spec);

    const OutputLayout lay{n, want_v, want_g, want_p, iv, ig, ip};
    auto f = [&](double u, double* o) {
        const double T = std::exp(u);
        double K[kChannels], Ke[kChannels];
        time_channels(xn, t, T, a, q, want_p, K, Ke);
        tab.fill(p.xprime, T, n);
        point_integrand(tab, lay, K, xn, T, ht, hpt, o);
    };
    VecQuadResult r = integrate_interval_vec(dim, VecIntegrand(f), R.lo, R.hi, R.spec);
    out.evaluations = r.evaluations;
    out.converged = r.converged;
    if (want_v)
        for (int i = 0; i < n; ++i) {
            out.velocity[i] = r.value[iv + i];
            out.velocity_err[i] = r.abs_error[iv + i];
        }
    if (want_g)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                out.gradient[i][j] = r.value[ig + i * n + j];
                out.gradient_err[i][j] = r.abs_error[ig + i * n + j];
            }
    if (want_p) {
        out.pressure = r.value[ip];
        out.pressure_err = r.abs_error[ip];
    }
    return out;
}

std::vector<FlowSample> flow_on_tangential_grid(const std::vector<std::vector<double>>& axes, double xn, double t,
                                                const FluxSpec& spec, const QuadSpec& q, unsigned parts) {
    const int n = spec.n, m = n - 1;
    if (static_cast<int>(axes.size()) != m) throw DomainError("flow_on_tangential_grid: need n-1 axes");
    EvalPoint probe{std::vector<double>(m, 0.0), xn, t};
    check_point(probe, spec);
    const bool want_v = parts & kVelocity, want_g = parts & kGradient, want_p = parts & kPressure;
    if (want_p && t == 1.0) throw DomainError("pressure is singular at t = 1");
    std::size_t npts = 1;
    for (const auto& ax : axes) npts *= ax.size();

    FlowSample zero;
    zero.velocity.assign(n, 0.0);
    zero.velocity_err.assign(n, 0.0);
    zero.gradient.assign(n, std::vector<double>(n, 0.0));
    zero.gradient_err = zero.gradient;
    zero.has_pressure = want_p;
    std::vector<FlowSample> out(npts, zero);
    const int iv = 0, ig = want_v ? n : 0, ip = ig + (want_g ? n * n : 0);
    const int stride = ip + (want_p ? 1 : 0);
    if (t < 0.25 || stride == 0 || npts == 0) return out;

    const double a = spec.a;
    const double ht = h_time(t, a), hpt = want_p ? h_time(t, a, 1) : 0.0;
    const OuterRange R = outer_range(xn, t, a, q, want_p);
    const OutputLayout lay{n, want_v, want_g, want_p, iv, ig, ip};
    SmoothedTable tab(spec);
    const std::size_t nterms = tab.terms.size();
    // per term and axis: smoothed bump derivatives at every coordinate of that axis
    std::vector<std::vector<std::vector<std::array<double, 4>>>> cache(
        nterms, std::vector<std::vector<std::array<double, 4>>>(m));
    for (std::size_t k = 0; k < nterms; ++k)
        for (int j = 0; j < m; ++j) cache[k][j].resize(axes[j].size());

    auto f = [&](double u, double* o) {
        const double T = std::exp(u);
        double K[kChannels], Ke[kChannels];
        time_channels(xn, t, T, a, q, want_p, K, Ke);
        for (std::size_t k = 0; k < nterms; ++k)
            for (int j = 0; j < m; ++j)
                for (std::size_t c = 0; c < axes[j].size(); ++c)
                    smoothed_bump(axes[j][c] - tab.terms[k].centre[j], T, n, cache[k][j][c].data());
        std::vector<std::size_t> idx(m, 0);
        for (std::size_t pnt = 0; pnt < npts; ++pnt) {
            std::size_t rem = pnt;
            for (int j = m - 1; j >= 0; --j) {
                idx[j] = rem % axes[j].size();
                rem /= axes[j].size();
            }
            for (std::size_t k = 0; k < nterms; ++k)
                for (int j = 0; j < m; ++j) tab.F[k * m + j] = cache[k][j][idx[j]];
            point_integrand(tab, lay, K, xn, T, ht, hpt, o + pnt * stride);
        }
    };
    const VecQuadResult r = integrate_interval_vec(static_cast<int>(npts * stride), VecIntegrand(f), R.lo, R.hi, R.spec);
    for (std::size_t pnt = 0; pnt < npts; ++pnt) {
        FlowSample& s = out[pnt];
        const double* v = r.value.data() + pnt * stride;
        const double* e = r.abs_error.data() + pnt * stride;
        s.evaluations = r.evaluations;
        s.converged = r.converged;
        if (want_v)
            for (int i = 0; i < n; ++i) {
                s.velocity[i] = v[iv + i];
                s.velocity_err[i] = e[iv + i];
            }
        if (want_g)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    s.gradient[i][j] = v[ig + i * n + j];
                    s.gradient_err[i][j] = e[ig + i * n + j];
                }
        if (want_p) {
            s.pressure = v[ip];
            s.pressure_err = e[ip];
        }
    }
    return out;
}

std::vector<KernelValue> velocity(const EvalPoint& p, const FluxSpec& spec, const QuadSpec& q) {
    const FlowSample s = flow_sample(p, spec, q, kVelocity);
    std::vector<KernelValue> v(spec.n);
    for (int i = 0; i < spec.n; ++i) v[i] = {s.velocity[i], s.velocity_err[i]};
    return v;
}

std::vector<std::vector<KernelValue>> gradient(const EvalPoint& p, const FluxSpec& spec, const QuadSpec& q,
                                               GradientMethod method) {
    const int n = spec.n;
    std::vector<std::vector<KernelValue>> g(n, std::vector<KernelValue>(n));
    if (method == GradientMethod::Analytic) {
        const FlowSample s = flow_sample(p, spec, q, kGradient);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) g[i][j] = {s.gradient[i][j], s.gradient_err[i][j]};
        return g;
    }
    check_point(p, spec);
    const QuadSpec qt = q.tightened(0.01);
    for (int j = 0; j < n; ++j) {
        const double h = j < n - 1 ? 1e-3 : 1e-3 * std::min(1.0, p.xn);
        EvalPoint lo = p, hi = p;
        if (j < n - 1) {
            lo.xprime[j] -= h;
            hi.xprime[j] += h;
        } else {
            lo.xn -= h;
            hi.xn += h;
        }
        const FlowSample a = flow_sample(hi, spec, qt, kVelocity), b = flow_sample(lo, spec, qt, kVelocity);
        for (int i = 0; i < n; ++i) {
            const double d = (a.velocity[i] - b.velocity[i]) / (2.0 * h);
            // truncation is O(h^2); the quadrature part is bounded by the two error estimates
            g[i][j] = {d, (a.velocity_err[i] + b.velocity_err[i]) / (2.0 * h)};
        }
    }
    return g;
}

GradientComparison compare_gradient_routes(const EvalPoint& p, const FluxSpec& spec, const QuadSpec& q) {
    const auto A = gradient(p, spec, q, GradientMethod::Analytic);
    const auto F = gradient(p, spec, q, GradientMethod::FiniteDifference);
    double big = 0.0, diff = 0.0;
    for (size_t i = 0; i < A.size(); ++i)
        for (size_t j = 0; j < A.size(); ++j) {
            big = std::max(big, std::abs(A[i][j].value));
            diff = std::max(diff, std::abs(A[i][j].value - F[i][j].value));
        }
    GradientComparison c;
    c.max_rel_diff = big > 0.0 ? diff / big : diff;
    c.methods_disagree = c.max_rel_diff > 1e-3;
    return c;
}

KernelValue pressure(const EvalPoint& p, const FluxSpec& spec, const QuadSpec& q) {
    const FlowSample s = flow_sample(p, spec, q, kPressure);
    return {s.pressure, s.pressure_err};
}

std::vector<TraceRow> boundary_trace_check(const std::vector<double>& xprime, double t, const FluxSpec& spec,
                                           const std::vector<double>& xn_sequence, const QuadSpec& q) {
    std::vector<TraceRow> rows;
    const double phi = g_spatial(xprime, spec) * h_time(t, spec.a);
    for (double xn : xn_sequence) {
        const FlowSample s = flow_sample({xprime, xn, t}, spec, q, kVelocity);
        rows.push_back({xn, s.velocity, phi, s.velocity.back() - phi});
    }
    return rows;
}

namespace {

void check_main_term(int i, const EvalPoint& p, const FluxSpec& spec) {
    check_point(p, spec);
    if (spec.n != 3) throw DomainError("main term is implemented for n = 3");
    if (i < 0 || i >= spec.n - 1) throw DomainError("main term needs a tangential component index");
    if (p.t != 1.0) throw DomainError("main term is defined at t = 1");
}

double kernel_K3(double d2, double s) {
    return 2.0 * M_PI * std::sqrt(M_PI * s) * bessel_i0_scaled(d2 / (8.0 * s));
}

// J_i(x', s) = int K(x' - xi', s) d_i g(xi') dxi' for n = 3
class JIntegral {
public:
    JIntegral(int i, const std::vector<double>& xprime, const FluxSpec& spec, const QuadSpec& q)
        : i_(i), x_(xprime), n_(spec.n), terms_(bump_terms(spec)), q_(q) {
        const double pl = bump_plateau(n_), su = bump_support(n_);
        const GaussRule& gl = gauss_legendre(20);
        for (const auto& term : terms_) {
            Panel pn;
            double dist2 = 0.0;
            for (int j = 0; j < 2; ++j) {
                const double c = term.centre[j];
                std::vector<std::pair<double, double>> cells = {{c - su, c - pl}, {c - pl, c + pl}, {c + pl, c + su}};
                if (j == i_) cells.erase(cells.begin() + 1);  // d_i bump vanishes on the plateau
                for (auto [lo, hi] : cells)
                    for (size_t k = 0; k < gl.nodes.size(); ++k) {
                        const double xi = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gl.nodes[k];
                        pn.xi[j].push_back(xi);
                        pn.w[j].push_back(0.5 * (hi - lo) * gl.weights[k] *
                                          bump_profile(xi - c, n_, j == i_ ? 1 : 0));
                    }
                const double gap = std::max(0.0, std::abs(x_[j] - c) - su);
                dist2 += gap * gap;
            }
            pn.far = dist2 >= 0.25;
            panels_.push_back(std::move(pn));
        }
    }

    double operator()(double s) const {
        double total = 0.0;
        for (size_t k = 0; k < terms_.size(); ++k) {
            const double wt = terms_[k].weight;
            total += wt * (panels_[k].far ? fixed(panels_[k], s) : adaptive(terms_[k], s));
        }
        return total;
    }

private:
    struct Panel {
        std::vector<double> xi[2], w[2];
        bool far = false;
    };

    double fixed(const Panel& pn, double s) const {
        double sum = 0.0;
        for (size_t a = 0; a < pn.xi[0].size(); ++a) {
            const double d0 = x_[0] - pn.xi[0][a];
            double row = 0.0;
            for (size_t b = 0; b < pn.xi[1].size(); ++b) {
                const double d1 = x_[1] - pn.xi[1][b];
                row += pn.w[1][b] * kernel_K3(d0 * d0 + d1 * d1, s);
            }
            sum += pn.w[0][a] * row;
        }
        return sum;
    }

    double adaptive(const BumpTerm& term, double s) const {
        const double pl = bump_plateau(n_), su = bump_support(n_);
        QuadSpec qa;
        qa.rel_tol = std::max(1e-13, 0.1 * q_.rel_tol);
        qa.abs_tol = 1e-300;
        qa.l1_floor = 1.0;
        auto spec_for = [&](int j) {
            QuadSpec r = qa;
            const double c = term.centre[j];
            r.breakpoints = {c - pl, c + pl};
            if (std::abs(x_[j] - c) < su) r.breakpoints.push_back(x_[j]);
            return r;
        };
        const QuadSpec q0 = spec_for(0), q1 = spec_for(1);
        auto inner = [&](double xi0) {
            const double d0 = x_[0] - xi0;
            const double f0 = bump_profile(xi0 - term.centre[0], n_, i_ == 0 ? 1 : 0);
            if (f0 == 0.0) return 0.0;
            auto g = [&](double xi1) {
                const double d1 = x_[1] - xi1;
                return bump_profile(xi1 - term.centre[1], n_, i_ == 1 ? 1 : 0) * kernel_K3(d0 * d0 + d1 * d1, s);
            };
            return f0 * integrate_interval(g, term.centre[1] - su, term.centre[1] + su, q1).value;
        };
        return integrate_interval(inner, term.centre[0] - su, term.centre[0] + su, q0).value;
    }

    int i_;
    std::vector<double> x_;
    int n_;
    std::vector<BumpTerm> terms_;
    QuadSpec q_;
    std::vector<Panel> panels_;
};

}  // namespace

KernelValue main_term_dnI2(int i, const EvalPoint& p, const FluxSpec& spec, const QuadSpec& q) {
    check_main_term(i, p, spec);
    const double xn = p.xn, a = spec.a;
    const double Cn = cn_constant(spec.n);
    const JIntegral J(i, p.xprime, spec, q);
    auto f = [&](double s) {
        const double r = xn * xn / (4.0 * s);
        const double h = h_near_one(s, a, 0);
        if (h == 0.0) return 0.0;
        return Cn * std::exp(-r) * (0.5 - r) * std::pow(s, -2.5) * h * J(s);
    };
    QuadSpec qs = q;
    qs.breakpoints = {0.5};
    if (qs.l1_floor == 0.0) qs.l1_floor = 1.0;
    const QuadResult r = integrate_time_sigma(f, xn, 0.0, 0.75, qs);
    if (!r.converged) throw QuadratureError("main term quadrature did not converge", r.value, r.abs_error);
    return {r.value, r.abs_error};
}

KernelValue main_term_dnI2_subordinated(int i, const EvalPoint& p, const FluxSpec& spec, const QuadSpec& q) {
    check_point(p, spec);
    if (i < 0 || i >= spec.n - 1) throw DomainError("main term needs a tangential component index");
    if (p.t != 1.0) throw DomainError("main term is defined at t = 1");
    const int m = spec.n - 1;
    const OuterRange R = outer_range(p.xn, 1.0, spec.a, q, false);
    SmoothedTable tab(spec);
    std::vector<int> al(m, 0);
    al[i] = 1;
    auto f = [&](double u) {
        const double T = std::exp(u);
        double K[kChannels], Ke[kChannels];
        time_channels(p.xn, 1.0, T, spec.a, q, false, K, Ke);
        tab.fill(p.xprime, T, spec.n);
        return -4.0 * T * tab.P(al.data()) * K[KB2];
    };
    QuadSpec qs = R.spec;
    const QuadResult r = integrate_interval(Integrand(f), R.lo, R.hi, qs);
    return {r.value, r.abs_error};
}

}  // namespace hsflow
