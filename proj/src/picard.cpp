#include "hsflow/picard.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "hsflow/bounds.hpp"
#include "hsflow/errors.hpp"
#include "hsflow/flow.hpp"

namespace hsflow {

// ---------------------------------------------------------------- grid

void PicardGrid::validate() const {
    if (n_tan < 2 || n_xn < 2 || n_t < 1) throw ConfigError("Picard grid needs n_tan, n_xn >= 2 and n_t >= 1");
    if (!(half_width > 0.0 && xn_min > 0.0 && xn_max > xn_min)) throw ConfigError("Picard grid extents are invalid");
}

std::vector<double> PicardGrid::tangential_nodes() const {
    std::vector<double> x(n_tan);
    for (int i = 0; i < n_tan; ++i) x[i] = -half_width + 2.0 * half_width * i / (n_tan - 1);
    return x;
}

std::vector<double> PicardGrid::normal_nodes() const {
    std::vector<double> x(n_xn);
    const double r = std::log(xn_max / xn_min);
    for (int j = 0; j < n_xn; ++j) x[j] = xn_min * std::exp(r * j / (n_xn - 1));
    return x;
}

std::vector<double> PicardGrid::normal_cells() const {
    const std::vector<double> x = normal_nodes();
    std::vector<double> c(n_xn + 1);
    c[0] = 0.0;
    for (int j = 1; j < n_xn; ++j) c[j] = std::sqrt(x[j - 1] * x[j]);
    c[n_xn] = x[n_xn - 1] * std::sqrt(x[n_xn - 1] / x[n_xn - 2]);
    return c;
}

std::vector<double> PicardGrid::time_nodes() const {
    std::vector<double> t(n_t);
    for (int k = 0; k < n_t; ++k) t[k] = (k + 0.5) * 2.0 / n_t;
    return t;
}

std::size_t PicardGrid::size() const {
    return static_cast<std::size_t>(n_tan) * n_tan * n_xn * n_t;
}

SampledField SampledField::zeros(const PicardGrid& g) {
    SampledField f;
    f.grid = g;
    f.value.assign(g.size(), 0.0);
    f.grad.assign(g.size(), 0.0);
    return f;
}

SampledField sample_flow_field(const FluxSpec& spec, const PicardGrid& grid, const QuadSpec& q) {
    grid.validate();
    if (spec.n != 3) throw DomainError("the Picard grid is three-dimensional");
    SampledField f = SampledField::zeros(grid);
    const auto xt = grid.tangential_nodes(), xn = grid.normal_nodes(), ts = grid.time_nodes();
    for (int k = 0; k < grid.n_t; ++k)
        for (int j = 0; j < grid.n_xn; ++j) {
            const auto s = flow_on_tangential_grid({xt, xt}, xn[j], ts[k], spec, q, kVelocity | kGradient);
            for (int i1 = 0; i1 < grid.n_tan; ++i1)
                for (int i2 = 0; i2 < grid.n_tan; ++i2) {
                    const FlowSample& p = s[i1 * grid.n_tan + i2];
                    if (!p.converged) throw QuadratureError("flow sample on the Picard grid did not converge", 0.0, 0.0);
                    double v2 = 0.0, g2 = 0.0;
                    for (int a = 0; a < 3; ++a) {
                        v2 += p.velocity[a] * p.velocity[a];
                        for (int b = 0; b < 3; ++b) g2 += p.gradient[a][b] * p.gradient[a][b];
                    }
                    const std::size_t id = grid.index(i1, i2, j, k);
                    f.value[id] = std::sqrt(v2);
                    f.grad[id] = std::sqrt(g2);
                }
        }
    return f;
}

// ---------------------------------------------------------------- norms

namespace {

template <class Fn>
void for_each_point(const PicardGrid& g, Fn&& fn) {
    const auto xt = g.tangential_nodes(), xn = g.normal_nodes(), ts = g.time_nodes();
    for (int k = 0; k < g.n_t; ++k)
        for (int j = 0; j < g.n_xn; ++j)
            for (int i1 = 0; i1 < g.n_tan; ++i1)
                for (int i2 = 0; i2 < g.n_tan; ++i2) {
                    const double br = std::sqrt(1.0 + xt[i1] * xt[i1] + xt[i2] * xt[i2] + xn[j] * xn[j]);
                    fn(g.index(i1, i2, j, k), br, xn[j], ts[k]);
                }
}

double gradient_weight(double br, double xn, double t, double a) {
    return std::pow(br, -3) + LN_weight(xn, t, a) / (br * br * std::pow(xn + 1.0, 2.0 * a));
}

}  // namespace

double x_norm(const SampledField& f) {
    double s = 0.0;
    for_each_point(f.grid, [&](std::size_t id, double br, double, double) {
        s = std::max(s, (f.value[id] + f.grad[id]) * br * br * br);
    });
    return s;
}

double y_norm(const SampledField& f, double a) {
    double s = 0.0;
    for_each_point(f.grid, [&](std::size_t id, double br, double xn, double t) {
        s = std::max(s, f.value[id] * br * br + f.grad[id] / gradient_weight(br, xn, t, a));
    });
    return s;
}

SampledField y_envelope_field(const PicardGrid& grid, double a) {
    SampledField f = SampledField::zeros(grid);
    for_each_point(grid, [&](std::size_t id, double br, double xn, double t) {
        f.value[id] = 1.0 / (br * br);
        f.grad[id] = gradient_weight(br, xn, t, a);
    });
    return f;
}

// ---------------------------------------------------------------- cell weights

namespace {

using Radial = std::function<double(double)>;

struct Box {
    double lo[3], hi[3];
    double diam() const { return std::max({hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]}); }
    // distance from the origin
    double dist() const {
        double s = 0.0;
        for (int k = 0; k < 3; ++k) {
            const double d = lo[k] > 0.0 ? lo[k] : (hi[k] < 0.0 ? -hi[k] : 0.0);
            s += d * d;
        }
        return std::sqrt(s);
    }
};

double box_gauss(const Radial& f, const Box& b, int p) {
    const GaussRule& gl = gauss_legendre(p);
    double c[3], h[3];
    for (int k = 0; k < 3; ++k) {
        c[k] = 0.5 * (b.lo[k] + b.hi[k]);
        h[k] = 0.5 * (b.hi[k] - b.lo[k]);
    }
    double s = 0.0;
    for (int i = 0; i < p; ++i) {
        const double x = c[0] + h[0] * gl.nodes[i];
        for (int j = 0; j < p; ++j) {
            const double y = c[1] + h[1] * gl.nodes[j];
            double sz = 0.0;
            for (int k = 0; k < p; ++k) {
                const double z = c[2] + h[2] * gl.nodes[k];
                sz += gl.weights[k] * f(std::sqrt(x * x + y * y + z * z));
            }
            s += gl.weights[i] * gl.weights[j] * sz;
        }
    }
    return s * h[0] * h[1] * h[2];
}

// Octree refinement toward the origin; resolution floor min_diam.
double box_integral(const Radial& f, const Box& b, double min_diam) {
    const double d = b.diam(), r = b.dist();
    if (r >= 4.0 * d) return box_gauss(f, b, 4);
    if (r >= 1.5 * d || d <= min_diam) return box_gauss(f, b, 6);
    double s = 0.0;
    for (int o = 0; o < 8; ++o) {
        Box c;
        for (int k = 0; k < 3; ++k) {
            const double m = 0.5 * (b.lo[k] + b.hi[k]);
            const bool upper = (o >> k) & 1;
            c.lo[k] = upper ? m : b.lo[k];
            c.hi[k] = upper ? b.hi[k] : m;
        }
        s += box_integral(f, c, min_diam);
    }
    return s;
}

// int over [0,A] x [0,B] x [0,C] of |y|^{-2}: z in closed form, then polar coordinates
// in the (x, y) rectangle with the radial part in closed form.
double inverse_square_corner(double A, double B, double C) {
    if (A <= 0.0 || B <= 0.0 || C <= 0.0) return 0.0;
    auto G = [C](double R) { return R * std::atan(C / R) + 0.5 * C * std::log1p(R * R / (C * C)); };
    const double th = std::atan2(B, A);
    const GaussRule& gl = gauss_legendre(40);
    double s = 0.0;
    for (int part = 0; part < 2; ++part) {
        const double lo = part == 0 ? 0.0 : th, hi = part == 0 ? th : 0.5 * M_PI;
        const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
        for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
            const double t = c + h * gl.nodes[i];
            const double R = part == 0 ? A / std::cos(t) : B / std::sin(t);
            s += h * gl.weights[i] * G(R);
        }
    }
    return s;
}

}  // namespace

SurrogateBilinear::SurrogateBilinear(const PicardGrid& grid) : grid_(grid) {
    grid.validate();
    const int nt = grid.n_t, nx = grid.n_xn, m = grid.n_tan;
    const double h = 2.0 * grid.half_width / (m - 1);
    const double dt = 2.0 / nt;
    const auto xn = grid.normal_nodes();
    const auto cells = grid.normal_cells();
    w_.assign(static_cast<std::size_t>(nt) * nx * nx * m * m, 0.0);
    for (int dk = 0; dk < nt; ++dk) {
        // time integral of kappa over tau in [tl, th] with u = sqrt(tau): 2 int (r+u)^{-3} du
        const double ul = dk == 0 ? 0.0 : std::sqrt((dk - 0.5) * dt), uh = std::sqrt((dk + 0.5) * dt);
        const Radial full = [ul, uh](double r) {
            return 1.0 / ((r + ul) * (r + ul)) - 1.0 / ((r + uh) * (r + uh));
        };
        const Radial regular = [uh](double r) { return -1.0 / ((r + uh) * (r + uh)); };
        for (int jo = 0; jo < nx; ++jo)
            for (int ji = 0; ji < nx; ++ji)
                for (int d1 = 0; d1 < m; ++d1)
                    for (int d2 = 0; d2 < m; ++d2) {
                        Box b;
                        b.lo[0] = (d1 - 0.5) * h;
                        b.hi[0] = (d1 + 0.5) * h;
                        b.lo[1] = (d2 - 0.5) * h;
                        b.hi[1] = (d2 + 0.5) * h;
                        b.lo[2] = cells[ji] - xn[jo];
                        b.hi[2] = cells[ji + 1] - xn[jo];
                        const double min_diam = 1e-3 * std::min(h, cells[ji + 1] - cells[ji]);
                        double v;
                        if (b.dist() > 0.0 || dk > 0) {
                            v = box_integral(full, b, min_diam);
                        } else {
                            // own cell at the same time level: |y|^{-2} exactly on the eight octants
                            v = 0.0;
                            for (int o = 0; o < 8; ++o) {
                                double ext[3];
                                Box c;
                                for (int k = 0; k < 3; ++k) {
                                    const bool upper = (o >> k) & 1;
                                    c.lo[k] = upper ? 0.0 : b.lo[k];
                                    c.hi[k] = upper ? b.hi[k] : 0.0;
                                    ext[k] = c.hi[k] - c.lo[k];
                                }
                                v += inverse_square_corner(ext[0], ext[1], ext[2]) + box_integral(regular, c, min_diam);
                            }
                        }
                        w_[(((static_cast<std::size_t>(dk) * nx + jo) * nx + ji) * m + d1) * m + d2] = 2.0 * v;
                    }
    }
}

double SurrogateBilinear::weight(int d1, int d2, int jo, int ji, int dk) const {
    const int m = grid_.n_tan, nx = grid_.n_xn;
    return w_[(((static_cast<std::size_t>(dk) * nx + jo) * nx + ji) * m + std::abs(d1)) * m + std::abs(d2)];
}

SampledField SurrogateBilinear::apply(const SampledField& f, const SampledField& g) const {
    const PicardGrid& G = grid_;
    if (f.value.size() != G.size() || g.value.size() != G.size()) throw DomainError("fields do not match the grid");
    const int m = G.n_tan, nx = G.n_xn, nt = G.n_t;
    std::vector<double> pv(G.size()), pg(G.size());
    for (std::size_t i = 0; i < G.size(); ++i) {
        pv[i] = f.value[i] * g.value[i];
        pg[i] = f.grad[i] * g.value[i] + f.value[i] * g.grad[i];
    }
    SampledField out = SampledField::zeros(G);
    for (int ko = 0; ko < nt; ++ko)
        for (int jo = 0; jo < nx; ++jo) {
            double* ov = &out.value[G.index(0, 0, jo, ko)];
            double* og = &out.grad[G.index(0, 0, jo, ko)];
            for (int ki = 0; ki <= ko; ++ki)
                for (int ji = 0; ji < nx; ++ji) {
                    const double* W = &w_[(((static_cast<std::size_t>(ko - ki) * nx + jo) * nx + ji) * m) * m];
                    const double* iv = &pv[G.index(0, 0, ji, ki)];
                    const double* ig = &pg[G.index(0, 0, ji, ki)];
                    for (int i1 = 0; i1 < m; ++i1)
                        for (int i2 = 0; i2 < m; ++i2) {
                            double sv = 0.0, sg = 0.0;
                            for (int m1 = 0; m1 < m; ++m1) {
                                const double* Wr = W + static_cast<std::size_t>(std::abs(i1 - m1)) * m;
                                const double* vr = iv + static_cast<std::size_t>(m1) * m;
                                const double* gr = ig + static_cast<std::size_t>(m1) * m;
                                for (int m2 = 0; m2 < m; ++m2) {
                                    const double w = Wr[std::abs(i2 - m2)];
                                    sv += w * vr[m2];
                                    sg += w * gr[m2];
                                }
                            }
                            ov[i1 * m + i2] += sv;
                            og[i1 * m + i2] += sg;
                        }
                }
        }
    return out;
}

double calibrate_C1(const SurrogateBilinear& B, double a) {
    const SampledField E = y_envelope_field(B.grid(), a);
    return x_norm(B.apply(E, E));
}

double picard_threshold(double C1, double A) {
    if (!(C1 > 0.0 && A > 0.0)) throw DomainError("picard_threshold: C1 and A must be positive");
    return 1.0 / (8.0 * C1 * A);
}

PicardResult picard_iterate(double alpha, const SampledField& vhat, const SurrogateBilinear& B, int m_max) {
    if (m_max < 0) throw DomainError("picard_iterate: m_max must be >= 0");
    PicardResult r;
    r.alpha = alpha;
    const double al = std::abs(alpha);
    r.iterates.push_back(SampledField::zeros(B.grid()));
    r.x_norms.push_back(0.0);
    r.diff_norms.push_back(0.0);
    r.diff_ratios.push_back(0.0);
    for (int it = 0; it < m_max; ++it) {
        const SampledField& v = r.iterates.back();
        SampledField F = v;
        for (std::size_t i = 0; i < F.value.size(); ++i) {
            F.value[i] += al * vhat.value[i];
            F.grad[i] += al * vhat.grad[i];
        }
        SampledField next = B.apply(F, F);
        SampledField diff = next;
        for (std::size_t i = 0; i < diff.value.size(); ++i) {
            diff.value[i] = std::abs(next.value[i] - v.value[i]);
            diff.grad[i] = std::abs(next.grad[i] - v.grad[i]);
        }
        r.x_norms.push_back(x_norm(next));
        r.diff_norms.push_back(x_norm(diff));
        const std::size_t k = r.diff_norms.size() - 1;
        r.diff_ratios.push_back(k >= 2 && r.diff_norms[k - 1] > 0.0 ? r.diff_norms[k] / r.diff_norms[k - 1] : 0.0);
        r.iterates.push_back(std::move(next));
        if (!std::isfinite(r.x_norms.back()) || (k >= 2 && r.diff_ratios.back() > 1.0)) {
            r.diverged = true;
            break;
        }
    }
    return r;
}

}  // namespace hsflow
