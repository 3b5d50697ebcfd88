#include "hsflow/energy.hpp"

#include <algorithm>
#include <cmath>

#include "hsflow/bounds.hpp"
#include "hsflow/errors.hpp"
#include "hsflow/flow.hpp"

namespace hsflow {

void chebyshev_time_grid(int N, std::vector<double>& t, std::vector<double>& w) {
    if (N < 2) throw DomainError("chebyshev_time_grid: N >= 2 required");
    t.assign(N, 0.0);
    w.assign(N, 0.0);
    for (int k = 0; k < N; ++k) {
        const double th = (2 * k + 1) * M_PI / (2.0 * N);
        double s = 0.0;
        for (int j = 1; j <= N / 2; ++j) s += std::cos(2 * j * th) / (4.0 * j * j - 1.0);
        t[k] = 1.0 + std::cos(th);
        w[k] = 2.0 / N * (1.0 - 2.0 * s);
    }
}

namespace {

struct Rule {
    std::vector<double> x, w;
};

Rule panel_rule(std::vector<double> breaks, int order) {
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    const GaussRule& gl = gauss_legendre(order);
    Rule r;
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
        const double c = 0.5 * (breaks[p] + breaks[p + 1]), h = 0.5 * (breaks[p + 1] - breaks[p]);
        for (int i = 0; i < order; ++i) {
            r.x.push_back(c + h * gl.nodes[i]);
            r.w.push_back(h * gl.weights[i]);
        }
    }
    return r;
}

std::vector<double> graded_breaks(std::vector<double> base, const std::vector<double>& radii, double Rmax) {
    while (base.back() < Rmax) base.push_back(std::min(2.0 * base.back(), Rmax));
    base.erase(std::remove_if(base.begin(), base.end(), [Rmax](double b) { return b > Rmax; }), base.end());
    for (double R : radii) base.push_back(R);
    return base;
}

// int_0^2 sup_{x_n} LN(x_n, t)^2 dt
double ln_square_time_integral(double a) {
    if (a < 0.5) return 1.0 / a;
    QuadSpec q;
    q.rel_tol = 1e-10;
    q.abs_tol = 1e-14;
    // tau = e^{-y}
    const QuadResult r = integrate_interval(
        [](double y) {
            const double l = 1.0 + std::log(2.0 + std::exp(y));
            return l * l * std::exp(-y);
        },
        0.0, 80.0, q);
    return 2.0 * r.value;
}

}  // namespace

std::vector<EnergyReport> energy(const FluxSpec& spec, const QuadSpec& q, const std::vector<double>& radii,
                                 int n_time) {
    spec.validate();
    if (spec.n != 3) throw DomainError("energy: n = 3 only");
    if (radii.empty()) throw DomainError("energy: no radius given");
    for (double R : radii)
        if (!(R > 0.0)) throw DomainError("energy: radii must be positive");
    const double Rmax = *std::max_element(radii.begin(), radii.end());

    const Rule tan = panel_rule(graded_breaks({0.0, 0.6, 1.2, 2.5, 5.0, 10.0}, radii, Rmax), 3);
    const Rule nor = panel_rule(graded_breaks({0.0, 0.05, 0.2, 0.5, 1.0, 2.5, 5.0, 10.0}, radii, Rmax), 3);
    std::vector<double> ts, tw;
    chebyshev_time_grid(n_time, ts, tw);

    const std::size_t nr = radii.size();
    std::vector<EnergyReport> out(nr);
    for (std::size_t r = 0; r < nr; ++r) {
        out[r].R = radii[r];
        out[r].times = ts;
        out[r].kinetic.assign(n_time, 0.0);
        out[r].dissipation_density.assign(n_time, 0.0);
    }
    double Cv = 0.0, Cg = 0.0;
    const std::size_t m = tan.x.size();
    for (int k = 0; k < n_time; ++k) {
        if (ts[k] <= 0.25) continue;  // the flux has not started
        for (std::size_t j = 0; j < nor.x.size(); ++j) {
            const double xn = nor.x[j];
            const auto s = flow_on_tangential_grid({tan.x, tan.x}, xn, ts[k], spec, q, kVelocity | kGradient);
            for (std::size_t i1 = 0; i1 < m; ++i1)
                for (std::size_t i2 = 0; i2 < m; ++i2) {
                    const FlowSample& p = s[i1 * m + i2];
                    if (!p.converged) throw QuadratureError("energy: flow sample did not converge", 0.0, 0.0);
                    double v2 = 0.0, g2 = 0.0;
                    for (int a = 0; a < 3; ++a) {
                        v2 += p.velocity[a] * p.velocity[a];
                        for (int b = 0; b < 3; ++b) g2 += p.gradient[a][b] * p.gradient[a][b];
                    }
                    const double x2 = tan.x[i1] * tan.x[i1] + tan.x[i2] * tan.x[i2] + xn * xn;
                    const double br = std::sqrt(1.0 + x2);
                    Cv = std::max(Cv, std::sqrt(v2) * br * br);
                    const double genv = 1.0 / (br * br * br) +
                                        LN_weight(xn, ts[k], spec.a) / (br * br * std::pow(xn + 1.0, 2.0 * spec.a));
                    Cg = std::max(Cg, std::sqrt(g2) / genv);
                    const double w = 4.0 * tan.w[i1] * tan.w[i2] * nor.w[j];
                    for (std::size_t r = 0; r < nr; ++r)
                        if (x2 < radii[r] * radii[r]) {
                            out[r].kinetic[k] += w * v2;
                            out[r].dissipation_density[k] += w * g2;
                        }
                }
        }
    }

    const double lam = ln_square_time_integral(spec.a);
    for (auto& e : out) {
        e.Cv = Cv;
        e.Cg = Cg;
        e.kinetic_sup = *std::max_element(e.kinetic.begin(), e.kinetic.end());
        for (int k = 0; k < n_time; ++k) e.dissipation += tw[k] * e.dissipation_density[k];
        // int_{|x|>R, x_n>0} |x|^{-p} dx = 2 pi R^{3-p} / (p-3)
        e.kinetic_tail = Cv * Cv * 2.0 * M_PI / e.R;
        e.dissipation_tail = 2.0 * Cg * Cg * (2.0 * 2.0 * M_PI / (3.0 * std::pow(e.R, 3)) + lam * 2.0 * M_PI / e.R);
    }
    return out;
}

}  // namespace hsflow
