#include "hsflow/flux.hpp"

#include <algorithm>
#include <cmath>

#include "hsflow/errors.hpp"
#include "hsflow/quad.hpp"

namespace hsflow {

void FluxSpec::validate() const {
    if (!(a > 0.0 && a <= 0.5)) throw ConfigError("flux exponent a must lie in (0, 1/2]");
    if (n < 2) throw ConfigError("dimension n must be >= 2");
    if (shape == Shape::Dipole && n != 3) throw ConfigError("the dipole flux requires n = 3");
}

double bump_plateau(int n) { return 0.5 / std::sqrt(n - 1.0); }
double bump_support(int n) { return 0.8 / std::sqrt(n - 1.0); }

namespace {

// 1 - smoothstep and its derivatives on [0, 1].
double psi(double u, int k) {
    switch (k) {
        case 0:
            return 1.0 - u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
        case 1:
            return -30.0 * u * u * (1.0 - u) * (1.0 - u);
        case 2:
            return -60.0 * u * (1.0 - u) * (1.0 - 2.0 * u);
        case 3:
            return -60.0 * (1.0 - 6.0 * u + 6.0 * u * u);
        default:
            throw DomainError("bump derivatives above order 3 are not provided");
    }
}

double bump_rate(int n) { return std::sqrt(n - 1.0) / 0.3; }

// cubic bridge on [0,1]: q(0) = q'(0) = 0, q(1) = 1, q'(1) = -a/2
double bridge(double u, double a, int k) {
    const double c2 = 3.0 + 0.5 * a, c3 = 2.0 + 0.5 * a;
    if (k == 0) return std::max(0.0, u * u * (c2 - c3 * u));
    return u * (2.0 * c2 - 3.0 * c3 * u);
}

}  // namespace

double bump_profile(double zeta, int n, int deriv) {
    if (n < 2) throw DomainError("bump_profile: n >= 2 required");
    if (deriv < 0 || deriv > 3) throw DomainError("bump_profile: derivative order must be 0..3");
    const double c = bump_rate(n);
    const double az = std::abs(zeta);
    const double u = c * (az - bump_plateau(n));
    if (u <= 0.0) return deriv == 0 ? 1.0 : 0.0;
    if (u >= 1.0) return 0.0;
    const double sg = (deriv % 2 == 1 && zeta < 0.0) ? -1.0 : 1.0;
    return sg * std::pow(c, deriv) * psi(u, deriv);
}

std::vector<BumpTerm> bump_terms(const FluxSpec& spec) {
    const int m = spec.n - 1;
    if (spec.shape == Shape::Single) return {{1.0, std::vector<double>(m, 0.0)}};
    if (spec.n != 3) throw DomainError("the dipole flux requires n = 3");
    return {{1.0, {-10.0, 0.0}}, {-1.0, {10.0, 0.0}}};
}

double g_spatial(const std::vector<double>& xi, const FluxSpec& spec, const std::vector<int>& deriv) {
    const int m = spec.n - 1;
    if (static_cast<int>(xi.size()) != m) throw DomainError("g_spatial: point must have n-1 coordinates");
    if (spec.shape == Shape::Dipole && spec.n != 3) throw DomainError("the dipole flux requires n = 3");
    std::vector<int> d = deriv.empty() ? std::vector<int>(m, 0) : deriv;
    if (static_cast<int>(d.size()) != m) throw DomainError("g_spatial: multi-index has wrong length");
    int ord = 0;
    for (int k : d) ord += k;
    if (ord > 3) throw DomainError("g_spatial: derivative order above 3");
    double total = 0.0;
    for (const auto& term : bump_terms(spec)) {
        double v = term.weight;
        for (int j = 0; j < m && v != 0.0; ++j) v *= bump_profile(xi[j] - term.centre[j], spec.n, d[j]);
        total += v;
    }
    return total;
}

double h_near_one(double delta, double a, int deriv) {
    if (deriv < 0 || deriv > 1) throw DomainError("h_time: derivative order must be 0 or 1");
    if (delta < 0.0 || delta > 0.75) return 0.0;
    if (delta <= 0.5) {
        if (deriv == 0) return std::pow(delta, a);
        if (delta == 0.0) return -INFINITY;
        return -a * std::pow(delta, a - 1.0);
    }
    const double u = 4.0 * (0.75 - delta);
    const double scale = std::pow(0.5, a);
    return deriv == 0 ? scale * bridge(u, a, 0) : 4.0 * scale * bridge(u, a, 1);
}

double h_time(double s, double a, int deriv) {
    if (deriv < 0 || deriv > 1) throw DomainError("h_time: derivative order must be 0 or 1");
    if (s < 0.25 || s > 1.0) return 0.0;
    if (s >= 0.5) return h_near_one(1.0 - s, a, deriv);
    const double u = 4.0 * (s - 0.25);
    const double scale = std::pow(0.5, a);
    return deriv == 0 ? scale * bridge(u, a, 0) : 4.0 * scale * bridge(u, a, 1);
}

std::vector<double> flux(const std::vector<double>& xi, double s, const FluxSpec& spec) {
    std::vector<double> out(spec.n, 0.0);
    out[spec.n - 1] = g_spatial(xi, spec) * h_time(s, spec.a);
    return out;
}

namespace {

// Sup over a grid of |nabla^j g| (Frobenius norm of the j-th derivative tensor). The
// bump terms have disjoint supports and equal shape, so one centred product suffices;
// evenness restricts the grid to the positive orthant.
double sup_grad(int n, int j) {
    const int m = n - 1;
    const int N = m == 1 ? 100001 : (m == 2 ? 2001 : (m == 3 ? 161 : 41));
    const double R = bump_support(n);
    std::vector<std::array<double, 3>> tab(N);
    for (int i = 0; i < N; ++i)
        for (int k = 0; k < 3; ++k) tab[i][k] = bump_profile(R * i / (N - 1), n, k);
    double best = 0.0;
    std::vector<int> idx(m, 0), ax(j, 0), d(m);
    while (true) {
        double sq = 0.0;
        std::fill(ax.begin(), ax.end(), 0);
        while (true) {
            std::fill(d.begin(), d.end(), 0);
            for (int a : ax) ++d[a];
            double v = 1.0;
            for (int k = 0; k < m && v != 0.0; ++k) v *= tab[idx[k]][d[k]];
            sq += v * v;
            int p = 0;
            while (p < j && ++ax[p] == m) ax[p++] = 0;
            if (p == j) break;
        }
        best = std::max(best, sq);
        int p = 0;
        while (p < m && ++idx[p] == N) idx[p++] = 0;
        if (p == m) break;
    }
    return std::sqrt(best);
}

}  // namespace

FluxNorms flux_norms(const FluxSpec& spec) {
    spec.validate();
    double sup_h = 0.0, sup_dh = 0.0;
    for (int k = 0; k <= 200000; ++k) {
        const double s = 0.25 + 0.75 * k / 200000.0;
        sup_h = std::max(sup_h, h_time(s, spec.a));
        if (s < 1.0) sup_dh = std::max(sup_dh, std::pow(1.0 - s, 1.0 - spec.a) * std::abs(h_time(s, spec.a, 1)));
    }
    const double g0 = sup_grad(spec.n, 0), g1 = sup_grad(spec.n, 1), g2 = sup_grad(spec.n, 2);
    FluxNorms r;
    r.N1 = (g0 + g1) * sup_h;
    r.N2 = (g0 + g1 + g2) * sup_h + (g0 + g1) * sup_dh;
    return r;
}

void smoothed_bump(double x, double T, int n, double out[4]) {
    if (T <= 0.0) {
        for (int k = 0; k < 4; ++k) out[k] = bump_profile(x, n, k);
        return;
    }
    const double ax = std::abs(x);
    const double p = bump_plateau(n), qs = bump_support(n), c = bump_rate(n);
    const double s = std::sqrt(4.0 * T);
    for (int k = 0; k < 4; ++k) out[k] = 0.0;
    // plateau: only the value contributes
    {
        const double lo = (ax - p) / s, hi = (ax + p) / s;
        out[0] += lo > 0.0 ? 0.5 * (std::erfc(lo) - std::erfc(hi)) : 0.5 * (std::erf(hi) - std::erf(lo));
    }
    const GaussRule& gl = gauss_legendre(16);
    const double norm = 1.0 / (std::sqrt(M_PI) * s);
    const double c2 = c * c, c3 = c2 * c;
    // transition pieces [p, qs] (sign +1) and [-qs, -p] (odd derivatives flip sign)
    for (int side = 0; side < 2; ++side) {
        const double plo = side == 0 ? p : -qs, phi = side == 0 ? qs : -p;
        const double lo = std::max(plo, ax - 8.0 * s), hi = std::min(phi, ax + 8.0 * s);
        if (!(lo < hi)) continue;
        // cells of width s/2 in the Gaussian variable, aligned on x
        const double step = 0.5 * s;
        double a0 = lo;
        while (a0 < hi) {
            const double kcell = std::floor((a0 - ax) / step + 1e-12);
            double b0 = std::min(hi, ax + (kcell + 1.0) * step);
            if (!(b0 > a0)) b0 = std::min(hi, a0 + step);
            const double mid = 0.5 * (a0 + b0), half = 0.5 * (b0 - a0);
            for (size_t i = 0; i < gl.nodes.size(); ++i) {
                const double xi = mid + half * gl.nodes[i];
                const double w = (xi - ax) / s;
                const double gw = gl.weights[i] * half * norm * std::exp(-w * w);
                const double u = std::clamp(c * (std::abs(xi) - p), 0.0, 1.0);
                const double sg = xi < 0.0 ? -1.0 : 1.0;
                out[0] += gw * psi(u, 0);
                out[1] += gw * sg * c * psi(u, 1);
                out[2] += gw * c2 * psi(u, 2);
                out[3] += gw * sg * c3 * psi(u, 3);
            }
            a0 = b0;
        }
    }
    if (x < 0.0) {
        out[1] = -out[1];
        out[3] = -out[3];
    } else if (x == 0.0) {
        out[1] = 0.0;
        out[3] = 0.0;
    }
}

}  // namespace hsflow
