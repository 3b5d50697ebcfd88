#include "hsflow/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "hsflow/errors.hpp"
#include "hsflow/special.hpp"

namespace hsflow {

std::vector<double> SpacePoint::full() const {
    std::vector<double> v = tangential;
    v.push_back(normal);
    return v;
}

SpacePoint SpacePoint::from_full(const std::vector<double>& x) {
    if (x.size() < 2) throw DomainError("a point needs at least two coordinates");
    SpacePoint p;
    p.tangential.assign(x.begin(), x.end() - 1);
    p.normal = x.back();
    return p;
}

std::vector<int> multi_index(int n, std::initializer_list<int> axes) {
    std::vector<int> d(n, 0);
    for (int a : axes) {
        if (a < 0 || a >= n) throw DomainError("multi_index: axis out of range");
        ++d[a];
    }
    return d;
}

double gaussian_cutoff(double t) { return std::sqrt(4.0 * t * std::log(1e16)); }

double heat1d(double y, double t, int k) {
    if (t <= 0.0) return 0.0;
    const double s = std::sqrt(4.0 * t);
    const double u = y / s;
    const double g = std::exp(-u * u) / std::sqrt(M_PI * 4.0 * t);
    switch (k) {
        case 0:
            return g;
        case 1:
            return -2.0 * u / s * g;
        case 2:
            return (4.0 * u * u - 2.0) / (s * s) * g;
        case 3:
            return -(8.0 * u * u * u - 12.0 * u) / (s * s * s) * g;
        default:
            throw DomainError("heat kernel derivatives above order 3 are not provided");
    }
}

namespace {

int order(const std::vector<int>& d) { return std::accumulate(d.begin(), d.end(), 0); }

std::vector<int> normalize_deriv(const std::vector<int>& deriv, int n) {
    if (deriv.empty()) return std::vector<int>(n, 0);
    if (static_cast<int>(deriv.size()) != n) throw DomainError("derivative multi-index has wrong length");
    for (int k : deriv)
        if (k < 0) throw DomainError("negative derivative order");
    return deriv;
}

void check_point(const SpacePoint& x) {
    if (x.dim() < 2) throw DomainError("points need dimension n >= 2");
    for (double v : x.tangential)
        if (!std::isfinite(v)) throw DomainError("non-finite coordinate");
    if (!std::isfinite(x.normal)) throw DomainError("non-finite coordinate");
}

KernelValue from_vec(const VecQuadResult& r, int k, double scale = 1.0) {
    if (!r.converged)
        throw QuadratureError("kernel quadrature did not converge", scale * r.value[k],
                              std::abs(scale) * r.abs_error[k]);
    return {scale * r.value[k], std::abs(scale) * r.abs_error[k]};
}

KernelValue from_scalar(const QuadResult& r, double scale = 1.0) {
    if (!r.converged)
        throw QuadratureError("kernel quadrature did not converge", scale * r.value,
                              std::abs(scale) * r.abs_error);
    return {scale * r.value, std::abs(scale) * r.abs_error};
}

double fd_step(double arg) { return std::max(1e-4, 1e-4 * std::abs(arg)); }

SpacePoint shifted(const SpacePoint& x, int axis, double h) {
    SpacePoint y = x;
    if (axis < static_cast<int>(y.tangential.size()))
        y.tangential[axis] += h;
    else
        y.normal += h;
    return y;
}

// Removes one derivative along some axis and differentiates numerically in it.
KernelValue fd_reduce(const std::function<KernelValue(const SpacePoint&, const std::vector<int>&)>& eval,
                      const SpacePoint& x, std::vector<int> deriv, int axis) {
    --deriv[axis];
    const double h = fd_step(x[axis]);
    const KernelValue p = eval(shifted(x, axis, h), deriv);
    const KernelValue m = eval(shifted(x, axis, -h), deriv);
    return {(p.value - m.value) / (2.0 * h), (p.abs_error + m.abs_error) / (2.0 * h)};
}

// Tangential geometry: d = |X'| and unit vector e (arbitrary when d = 0).
struct Frame {
    double d;
    std::array<double, 2> e;
};

Frame frame2(const std::vector<double>& X) {
    Frame f;
    f.d = std::hypot(X[0], X[1]);
    if (f.d > 0.0) {
        f.e = {X[0] / f.d, X[1] / f.d};
    } else {
        f.e = {1.0, 0.0};
    }
    return f;
}

QuadSpec with_breaks(const QuadSpec& q, std::vector<double> breaks) {
    QuadSpec r = q;
    r.breakpoints = std::move(breaks);
    r.singularities.clear();
    return r;
}

// Integrates over r in [0, d + cutoff] the vector integrand g(r, w, out) with
// w[k] = e^{-(d^2+r^2)/4t} I_k(dr/2t): the angular moments of a 2-D Gaussian.
VecQuadResult radial_bessel(int dim, double d, double t, const std::vector<double>& scales,
                            const QuadSpec& q,
                            const std::function<void(double, const double*, double*)>& g) {
    const double rc = gaussian_cutoff(t);
    const double hi = d + rc;
    const double st = std::sqrt(t);
    std::vector<double> br = {d, d - 2 * st, d + 2 * st, d - 6 * st, d + 6 * st, d - rc};
    for (double s : scales) br.push_back(s);
    std::vector<double> keep;
    for (double b : br)
        if (b > 0.0 && b < hi) keep.push_back(b);
    QuadSpec qq = with_breaks(q, keep);
    return integrate_interval_vec(
        dim,
        [&](double r, double* out) {
            double ib[3];
            bessel_i012_scaled(d * r / (2.0 * t), ib);
            const double e = std::exp(-(d - r) * (d - r) / (4.0 * t));
            const double w[3] = {e * ib[0], e * ib[1], e * ib[2]};
            g(r, w, out);
        },
        0.0, hi, qq);
}

// Nested polar integral over R^2 around the point c: int_0^R int_0^{2pi} f(rho, theta).
// The angular variable is centred on theta0 so that the peak sits at the middle.
QuadResult polar2(double R, double theta0, const std::vector<double>& rbreaks, const QuadSpec& q,
                  const std::function<double(double, double)>& f) {
    const QuadSpec inner = with_breaks(q.tightened(0.1), {theta0});
    bool conv = true;
    long evals = 0;
    auto radial = [&](double rho) {
        QuadResult a = integrate_interval([&](double th) { return f(rho, th); }, theta0 - M_PI,
                                          theta0 + M_PI, inner);
        conv = conv && a.converged;
        evals += a.evaluations;
        return a.value;
    };
    std::vector<double> keep;
    for (double b : rbreaks)
        if (b > 0.0 && b < R) keep.push_back(b);
    QuadResult r = integrate_interval(radial, 0.0, R, with_breaks(q, keep));
    r.converged = r.converged && conv;
    r.evaluations += evals;
    return r;
}

void require_23(int n, const char* what) {
    if (n != 2 && n != 3)
        throw DomainError(std::string(what) + " is implemented for n = 2 and n = 3 only");
}

// ---------------------------------------------------------------- A

KernelValue A_second(const SpacePoint& x, double t, const std::vector<int>& deriv, const QuadSpec& q) {
    const int n = x.dim();
    const double xn = x.normal;
    const int ax = order(deriv) == 0 ? -1 : static_cast<int>(std::find(deriv.begin(), deriv.end(), 1) - deriv.begin());
    if (n == 3) {
        const Frame fr = frame2(x.tangential);
        const double d = fr.d;
        const double pre = std::pow(4.0 * M_PI * t, -1.5) * fundamental_constant(3) * 2.0 * M_PI;
        std::vector<double> scales = {xn, 10 * xn, 100 * xn};
        VecQuadResult r;
        if (ax < 0) {
            r = radial_bessel(1, d, t, scales, q, [&](double rr, const double* w, double* o) {
                o[0] = rr / std::sqrt(rr * rr + xn * xn) * w[0];
            });
            return from_vec(r, 0, pre);
        }
        if (ax == 2) {
            r = radial_bessel(1, d, t, scales, q, [&](double rr, const double* w, double* o) {
                const double s = rr * rr + xn * xn;
                o[0] = -rr * xn / (s * std::sqrt(s)) * w[0];
            });
            return from_vec(r, 0, pre);
        }
        r = radial_bessel(1, d, t, scales, q, [&](double rr, const double* w, double* o) {
            o[0] = rr / std::sqrt(rr * rr + xn * xn) * (d * w[0] - rr * w[1]);
        });
        return from_vec(r, 0, -pre * fr.e[ax] / (2.0 * t));
    }
    // n = 2: int Gamma_1(x'-z') Gamma_1(0) E(z', x_n) dz'
    const double xp = x.tangential[0];
    const double rc = gaussian_cutoff(t);
    const double g0 = heat1d(0.0, t);
    std::vector<double> br = {0.0, xn, -xn, 10 * xn, -10 * xn, xp};
    const double lo = xp - rc, hi = xp + rc;
    std::vector<double> keep;
    for (double b : br)
        if (b > lo && b < hi) keep.push_back(b);
    QuadResult r = integrate_interval(
        [&](double z) {
            const double s = z * z + xn * xn;
            if (ax < 0) return heat1d(xp - z, t) * (-std::log(s) / (4.0 * M_PI));
            if (ax == 0) return heat1d(xp - z, t, 1) * (-std::log(s) / (4.0 * M_PI));
            return heat1d(xp - z, t) * (-xn / (2.0 * M_PI * s));
        },
        lo, hi, with_breaks(q, keep));
    return from_scalar(r, g0);
}

KernelValue A_first(const SpacePoint& x, double t, const QuadSpec& q) {
    const int n = x.dim();
    const double xn = x.normal;
    if (n == 3) {
        // polar coordinates around x': z' = x' + rho (cos th, sin th)
        const double x1 = x.tangential[0], x2 = x.tangential[1];
        const double d = std::hypot(x1, x2);
        const double th0 = std::atan2(-x2, -x1);
        const double cE = fundamental_constant(3);
        const double g = std::pow(4.0 * M_PI * t, -1.5);
        const double st = std::sqrt(t);
        QuadResult r = polar2(d + gaussian_cutoff(t), th0,
                              {xn, 10 * xn, d, d - 2 * st, d + 2 * st}, q, [&](double rho, double th) {
                                  const double z1 = x1 + rho * std::cos(th), z2 = x2 + rho * std::sin(th);
                                  return std::exp(-(z1 * z1 + z2 * z2) / (4.0 * t)) * rho /
                                         std::sqrt(rho * rho + xn * xn);
                              });
        return from_scalar(r, g * cE);
    }
    const double xp = x.tangential[0];
    const double rc = gaussian_cutoff(t);
    std::vector<double> keep;
    for (double b : {xp, xp - xn, xp + xn, 0.0})
        if (b > -rc && b < rc) keep.push_back(b);
    QuadResult r = integrate_interval(
        [&](double z) {
            const double s = (xp - z) * (xp - z) + xn * xn;
            return heat1d(z, t) * (-std::log(s) / (4.0 * M_PI));
        },
        -rc, rc, with_breaks(q, keep));
    return from_scalar(r, heat1d(0.0, t));
}

// ---------------------------------------------------------------- B

// Tangential part B'(x',t) = int Gamma'(x'-z',t) E(z',0) dz' and its tangential derivatives
// (axes lists up to two entries), n = 3.
KernelValue Bprime3(const std::vector<double>& xp, double t, const std::vector<int>& axes,
                    const QuadSpec& q) {
    const Frame fr = frame2(xp);
    const double d = fr.d;
    const double pre = fundamental_constant(3) / (4.0 * M_PI * t);
    VecQuadResult r;
    if (axes.empty()) {
        r = radial_bessel(1, d, t, {}, q, [&](double, const double* w, double* o) { o[0] = 2 * M_PI * w[0]; });
        return from_vec(r, 0, pre);
    }
    if (axes.size() == 1) {
        const double ei = fr.e[axes[0]];
        r = radial_bessel(1, d, t, {}, q, [&](double rr, const double* w, double* o) {
            o[0] = 2 * M_PI * (d * w[0] - rr * w[1]);
        });
        return from_vec(r, 0, -pre * ei / (2.0 * t));
    }
    const int i = axes[0], j = axes[1];
    const double eij = fr.e[i] * fr.e[j];
    const double dij = i == j ? 1.0 : 0.0;
    r = radial_bessel(1, d, t, {}, q, [&](double rr, const double* w, double* o) {
        const double mij = eij * (2 * M_PI * d * d * w[0] - 4 * M_PI * d * rr * w[1] +
                                  M_PI * rr * rr * (w[0] + w[2])) +
                           (dij - eij) * M_PI * rr * rr * (w[0] - w[2]);
        o[0] = mij / (4.0 * t * t) - dij / (2.0 * t) * 2 * M_PI * w[0];
    });
    return from_vec(r, 0, pre);
}

KernelValue Bprime2(double xp, double t, int l, const QuadSpec& q) {
    const double rc = gaussian_cutoff(t);
    const double lo = xp - rc, hi = xp + rc;
    std::vector<double> keep;
    if (0.0 > lo && 0.0 < hi) keep.push_back(0.0);
    if (xp > lo && xp < hi) keep.push_back(xp);
    QuadResult r = integrate_interval(
        [&](double z) {
            const double az = std::abs(z);
            if (az == 0.0) return 0.0;
            return heat1d(xp - z, t, l) * (-std::log(az) / (2.0 * M_PI));
        },
        lo, hi, with_breaks(q, keep));
    return from_scalar(r);
}

// Second representation: int Gamma'(z',t) E(x'-z',0) dz', value only.
KernelValue Bprime_second(const std::vector<double>& xp, double t, const QuadSpec& q) {
    if (xp.size() == 2) {
        const double x1 = xp[0], x2 = xp[1];
        const double d = std::hypot(x1, x2);
        const double th0 = std::atan2(-x2, -x1);
        const double st = std::sqrt(t);
        // polar around x'; the Jacobian rho cancels 1/|x'-z'|
        QuadResult r = polar2(d + gaussian_cutoff(t), th0, {d, d - 2 * st, d + 2 * st}, q,
                              [&](double rho, double th) {
                                  const double z1 = x1 + rho * std::cos(th), z2 = x2 + rho * std::sin(th);
                                  return std::exp(-(z1 * z1 + z2 * z2) / (4.0 * t));
                              });
        return from_scalar(r, fundamental_constant(3) / (4.0 * M_PI * t));
    }
    const double x = xp[0];
    const double rc = gaussian_cutoff(t);
    std::vector<double> keep;
    for (double b : {x, 0.0})
        if (b > -rc && b < rc) keep.push_back(b);
    QuadResult r = integrate_interval(
        [&](double z) {
            const double a = std::abs(x - z);
            if (a == 0.0) return 0.0;
            return heat1d(z, t) * (-std::log(a) / (2.0 * M_PI));
        },
        -rc, rc, with_breaks(q, keep));
    return from_scalar(r);
}

// ---------------------------------------------------------------- C_i

struct CiGeometry {
    int n;
    std::vector<double> X;  // x' - y'
    double Xn;              // x_n + y_n
    double xn;
};

CiGeometry ci_geometry(const SpacePoint& x, const SpacePoint& y) {
    if (x.dim() != y.dim()) throw DomainError("C_i: x and y have different dimensions");
    CiGeometry g;
    g.n = x.dim();
    g.X.resize(x.tangential.size());
    for (size_t k = 0; k < g.X.size(); ++k) g.X[k] = x.tangential[k] - y.tangential[k];
    g.Xn = x.normal + y.normal;
    g.xn = x.normal;
    return g;
}

// S_i(z_n) = int Gamma'(X'-z',t) d_i E(z', z_n) dz', differentiated in X_j when j >= 0.
KernelValue slice_S(const CiGeometry& g, int i, int j, double zn, double t, const QuadSpec& q) {
    const int n = g.n;
    const int nn = n - 1;  // normal axis
    if (n == 3) {
        const Frame fr = frame2(g.X);
        const double d = fr.d;
        const double cE = fundamental_constant(3);
        const double pre = cE / (4.0 * M_PI * t);
        const std::vector<double> sc = {zn, 10 * zn};
        VecQuadResult r;
        if (j < 0) {
            if (i < nn) {
                if (d == 0.0) return {0.0, 0.0};
                r = radial_bessel(1, d, t, sc, q, [&](double rr, const double* w, double* o) {
                    const double s = rr * rr + zn * zn;
                    o[0] = rr * rr / (s * std::sqrt(s)) * w[1];
                });
                return from_vec(r, 0, -pre * 2 * M_PI * fr.e[i]);
            }
            r = radial_bessel(1, d, t, sc, q, [&](double rr, const double* w, double* o) {
                const double s = rr * rr + zn * zn;
                o[0] = rr * zn / (s * std::sqrt(s)) * w[0];
            });
            return from_vec(r, 0, -pre * 2 * M_PI);
        }
        const double ej = fr.e[j];
        if (i < nn) {
            const double eij = fr.e[i] * ej;
            const double dij = i == j ? 1.0 : 0.0;
            r = radial_bessel(1, d, t, sc, q, [&](double rr, const double* w, double* o) {
                const double s = rr * rr + zn * zn;
                const double ang = d * eij * rr * 2 * M_PI * w[1] -
                                   rr * rr * (eij * M_PI * (w[0] + w[2]) + (dij - eij) * M_PI * (w[0] - w[2]));
                o[0] = rr / (s * std::sqrt(s)) * ang;
            });
            return from_vec(r, 0, pre / (2.0 * t));
        }
        if (d == 0.0) return {0.0, 0.0};
        r = radial_bessel(1, d, t, sc, q, [&](double rr, const double* w, double* o) {
            const double s = rr * rr + zn * zn;
            o[0] = rr * zn / (s * std::sqrt(s)) * 2 * M_PI * (d * w[0] - rr * w[1]);
        });
        return from_vec(r, 0, pre / (2.0 * t) * ej);
    }
    // n = 2
    const double X = g.X[0];
    const double rc = gaussian_cutoff(t);
    const double lo = X - rc, hi = X + rc;
    std::vector<double> keep;
    for (double b : {0.0, zn, -zn, 10 * zn, -10 * zn, X})
        if (b > lo && b < hi) keep.push_back(b);
    const int k = j < 0 ? 0 : 1;
    QuadResult r = integrate_interval(
        [&](double z) {
            const double s = z * z + zn * zn;
            const double dE = (i < nn ? -z : -zn) / (2.0 * M_PI * s);
            return heat1d(X - z, t, k) * dE;
        },
        lo, hi, with_breaks(q, keep));
    return from_scalar(r);
}

// int_0^{x_n} w(X_n - z_n) S(z_n) dz_n with w = d^k Gamma_1 / du^k (k = 1 or 2).
KernelValue ci_outer(const CiGeometry& g, int i, int j, int k, double t, const QuadSpec& q) {
    if (!(g.xn > 0.0)) throw DomainError("C_i requires x_n > 0");
    if (!(t > 0.0)) throw DomainError("C_i requires t > 0");
    const QuadSpec inner = q.tightened(0.1);
    double inner_err = 0.0;
    QuadResult r = integrate_interval(
        [&](double zn) {
            const KernelValue s = slice_S(g, i, j, zn, t, inner);
            const double w = heat1d(g.Xn - zn, t, k);
            inner_err += std::abs(w) * s.abs_error;
            return w * s.value;
        },
        0.0, g.xn, with_breaks(q, {}));
    KernelValue v = from_scalar(r);
    // inner errors accumulate over the outer nodes; weight them by a typical node weight
    v.abs_error += inner_err * g.xn / std::max<long>(1, r.evaluations);
    return v;
}

void check_axis(int i, int n, const char* what) {
    if (i < 0 || i >= n) throw DomainError(std::string(what) + ": axis index out of range");
}

}  // namespace

// ---------------------------------------------------------------- public

KernelValue heat_kernel(const std::vector<double>& x, double t, const std::vector<int>& deriv) {
    const int n = static_cast<int>(x.size());
    if (n < 1) throw DomainError("heat_kernel: empty point");
    const std::vector<int> d = normalize_deriv(deriv, n);
    if (order(d) > 3) throw DomainError("heat_kernel: derivative order above 3");
    if (t <= 0.0) return {0.0, 0.0};
    double v = 1.0;
    for (int k = 0; k < n; ++k) v *= heat1d(x[k], t, d[k]);
    return {v, 0.0};
}

KernelValue fundamental_solution(const std::vector<double>& x, const std::vector<int>& deriv) {
    const int n = static_cast<int>(x.size());
    if (n < 2) throw DomainError("fundamental_solution: n >= 2 required");
    const std::vector<int> d = normalize_deriv(deriv, n);
    const int ord = order(d);
    if (ord > 2) throw DomainError("fundamental_solution: derivative order above 2");
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    if (r2 == 0.0) throw DomainError("fundamental_solution: singular at x = 0");
    const double r = std::sqrt(r2);
    const double nb = n * unit_ball_volume(n);
    if (ord == 0) {
        if (n == 2) return {-std::log(r) / (2.0 * M_PI), 0.0};
        return {fundamental_constant(n) * std::pow(r, 2 - n), 0.0};
    }
    std::vector<int> ax;
    for (int k = 0; k < n; ++k)
        for (int m = 0; m < d[k]; ++m) ax.push_back(k);
    if (ord == 1) return {-x[ax[0]] / (nb * std::pow(r, n)), 0.0};
    const int i = ax[0], j = ax[1];
    const double dij = i == j ? 1.0 : 0.0;
    return {-(dij * r2 - n * x[i] * x[j]) / (nb * std::pow(r, n + 2)), 0.0};
}

KernelValue func_A(const SpacePoint& x, double t, const std::vector<int>& deriv, const QuadSpec& q,
                   Form form) {
    check_point(x);
    const int n = x.dim();
    require_23(n, "func_A");
    if (!(t > 0.0)) throw DomainError("func_A requires t > 0");
    const std::vector<int> d = normalize_deriv(deriv, n);
    const int ord = order(d);
    if (ord > 3) throw DomainError("func_A: derivative order above 3");
    if (x.normal == 0.0 && std::all_of(x.tangential.begin(), x.tangential.end(), [](double v) { return v == 0.0; }))
        throw DomainError("func_A: singular at x = 0");
    auto self = [&](const SpacePoint& p, const std::vector<int>& dd) { return func_A(p, t, dd, q, form); };
    if (form == Form::First) {
        if (ord == 0) return A_first(x, t, q);
        const int ax = static_cast<int>(std::find_if(d.begin(), d.end(), [](int v) { return v > 0; }) - d.begin());
        return fd_reduce(self, x, d, ax);
    }
    if (ord <= 1) return A_second(x, t, d, q);
    const int ax = static_cast<int>(std::find_if(d.begin(), d.end(), [](int v) { return v > 0; }) - d.begin());
    return fd_reduce(self, x, d, ax);
}

KernelValue func_B(const SpacePoint& x, double t, const std::vector<int>& deriv, const QuadSpec& q,
                   Form form) {
    check_point(x);
    const int n = x.dim();
    require_23(n, "func_B");
    if (!(t > 0.0)) throw DomainError("func_B requires t > 0");
    const std::vector<int> d = normalize_deriv(deriv, n);
    const int k = d[n - 1];
    const int l = order(d) - k;
    if (l + k > 3) throw DomainError("func_B: derivative order above 3");
    const double g1 = heat1d(x.normal, t, k);
    auto self = [&](const SpacePoint& p, const std::vector<int>& dd) { return func_B(p, t, dd, q, form); };
    if (form == Form::Second) {
        if (l > 0) {
            const int ax = static_cast<int>(std::find_if(d.begin(), d.end(), [](int v) { return v > 0; }) - d.begin());
            return fd_reduce(self, x, d, ax);
        }
        KernelValue b = Bprime_second(x.tangential, t, q);
        return {g1 * b.value, std::abs(g1) * b.abs_error};
    }
    if (n == 2) {
        KernelValue b = Bprime2(x.tangential[0], t, l, q);
        return {g1 * b.value, std::abs(g1) * b.abs_error};
    }
    if (l == 3) {
        const int ax = static_cast<int>(std::find_if(d.begin(), d.end(), [](int v) { return v > 0; }) - d.begin());
        return fd_reduce(self, x, d, ax);
    }
    std::vector<int> axes;
    for (int a = 0; a < n - 1; ++a)
        for (int m = 0; m < d[a]; ++m) axes.push_back(a);
    KernelValue b = Bprime3(x.tangential, t, axes, q);
    return {g1 * b.value, std::abs(g1) * b.abs_error};
}

KernelValue func_Ci(int i, const SpacePoint& x, const SpacePoint& y, double t, const QuadSpec& q,
                    int tangential_deriv) {
    check_point(x);
    check_point(y);
    const int n = x.dim();
    require_23(n, "func_Ci");
    check_axis(i, n, "func_Ci");
    if (tangential_deriv >= n - 1) throw DomainError("func_Ci: derivative axis must be tangential");
    const CiGeometry g = ci_geometry(x, y);
    return ci_outer(g, i, tangential_deriv, 1, t, q);
}

KernelValue ci_normal_derivative(int i, const SpacePoint& x, const SpacePoint& y, double t,
                                 const QuadSpec& q) {
    const int n = x.dim();
    require_23(n, "ci_normal_derivative");
    check_axis(i, n, "ci_normal_derivative");
    SpacePoint xr;  // x - y*
    xr.tangential.resize(n - 1);
    for (int k = 0; k < n - 1; ++k) xr.tangential[k] = x.tangential[k] - y.tangential[k];
    xr.normal = x.normal + y.normal;
    if (i < n - 1) {
        KernelValue c = func_Ci(n - 1, x, y, t, q, i);
        KernelValue b = func_B(xr, t, multi_index(n, {i, n - 1}), q);
        return {c.value + b.value, c.abs_error + b.abs_error};
    }
    KernelValue s{0.0, 0.0};
    for (int k = 0; k < n - 1; ++k) {
        KernelValue c = func_Ci(k, x, y, t, q, k);
        s.value -= c.value;
        s.abs_error += c.abs_error;
    }
    s.value -= 0.5 * heat_kernel(xr.full(), t, multi_index(n, {n - 1})).value;
    return s;
}

KernelValue ci_normal_derivative_leibniz(int i, const SpacePoint& x, const SpacePoint& y, double t,
                                         const QuadSpec& q) {
    check_point(x);
    check_point(y);
    const int n = x.dim();
    require_23(n, "ci_normal_derivative_leibniz");
    check_axis(i, n, "ci_normal_derivative_leibniz");
    const CiGeometry g = ci_geometry(x, y);
    KernelValue v = ci_outer(g, i, -1, 2, t, q);
    // boundary term F(y_n) S_i(x_n) from the moving upper limit
    const double fy = heat1d(y.normal, t, 1);
    if (fy != 0.0) {
        KernelValue s = slice_S(g, i, -1, g.xn, t, q.tightened(0.1));
        v.value += fy * s.value;
        v.abs_error += std::abs(fy) * s.abs_error;
    }
    return v;
}

KernelValue ci_yn_derivative(int i, const SpacePoint& x, const SpacePoint& y, double t,
                             const QuadSpec& q) {
    check_point(x);
    check_point(y);
    const int n = x.dim();
    require_23(n, "ci_yn_derivative");
    check_axis(i, n, "ci_yn_derivative");
    return ci_outer(ci_geometry(x, y), i, -1, 2, t, q);
}

KernelValue golovkin(int i, int j, const SpacePoint& x, double t, const QuadSpec& q) {
    const int n = x.dim();
    require_23(n, "golovkin");
    check_axis(i, n, "golovkin");
    check_axis(j, n, "golovkin");
    if (!(x.normal > 0.0)) throw DomainError("golovkin requires x_n > 0");
    if (!(t > 0.0)) throw DomainError("golovkin requires t > 0");
    SpacePoint zero;
    zero.tangential.assign(n - 1, 0.0);
    const int nn = n - 1;
    if (j < nn) {
        KernelValue c = func_Ci(i, x, zero, t, q, j);
        double v = -4.0 * c.value;
        if (i == j) v -= 2.0 * heat_kernel(x.full(), t, multi_index(n, {nn})).value;
        return {v, 4.0 * c.abs_error};
    }
    if (i < nn) {
        KernelValue c = func_Ci(nn, x, zero, t, q, i);
        KernelValue b = func_B(x, t, multi_index(n, {i, nn}), q);
        return {-4.0 * (c.value + b.value), 4.0 * (c.abs_error + b.abs_error)};
    }
    KernelValue s{0.0, 0.0};
    for (int k = 0; k < nn; ++k) {
        KernelValue c = func_Ci(k, x, zero, t, q, k);
        s.value += 4.0 * c.value;
        s.abs_error += 4.0 * c.abs_error;
    }
    return s;
}

KernelValue golovkin_via_ci(int i, int j, const SpacePoint& x, double t, const QuadSpec& q) {
    const int n = x.dim();
    const int nn = n - 1;
    if (j < nn) return golovkin(i, j, x, t, q);
    require_23(n, "golovkin_via_ci");
    check_axis(i, n, "golovkin_via_ci");
    if (!(x.normal > 0.0)) throw DomainError("golovkin requires x_n > 0");
    if (!(t > 0.0)) throw DomainError("golovkin requires t > 0");
    SpacePoint zero;
    zero.tangential.assign(nn, 0.0);
    KernelValue c = ci_normal_derivative_leibniz(i, x, zero, t, q);
    double v = -4.0 * c.value;
    if (i == nn) v -= 2.0 * heat_kernel(x.full(), t, multi_index(n, {nn})).value;
    return {v, 4.0 * c.abs_error};
}

KernelValue kernel_K(const std::vector<double>& xprime, double t, const QuadSpec& q) {
    const int n = static_cast<int>(xprime.size()) + 1;
    if (n < 3) throw DomainError("kernel_K requires n >= 3");
    if (!(t > 0.0)) throw DomainError("kernel_K requires t > 0");
    double d2 = 0.0;
    for (double v : xprime) d2 += v * v;
    const double d = std::sqrt(d2);
    if (n == 3) {
        VecQuadResult r = radial_bessel(1, d, t, {}, q, [&](double, const double* w, double* o) { o[0] = w[0]; });
        return from_vec(r, 0, 2.0 * M_PI);
    }
    // polar coordinates in R^{n-1}: the radial weight r^{n-2} cancels |z'|^{2-n}
    const int m = n - 1;
    const double sph = unit_sphere_area(m - 1);
    const QuadSpec inner = with_breaks(q.tightened(0.1), {});
    bool conv = true;
    auto radial = [&](double r) {
        const double kap = d * r / (2.0 * t);
        QuadResult a = integrate_interval(
            [&](double th) { return std::exp(-kap * (1.0 - std::cos(th))) * std::pow(std::sin(th), m - 2); },
            0.0, M_PI, inner);
        conv = conv && a.converged;
        return std::exp(-(d - r) * (d - r) / (4.0 * t)) * a.value;
    };
    const double rc = gaussian_cutoff(t);
    std::vector<double> keep;
    for (double b : {d, d - rc, d - 2 * std::sqrt(t), d + 2 * std::sqrt(t)})
        if (b > 0.0 && b < d + rc) keep.push_back(b);
    QuadResult r = integrate_interval(radial, 0.0, d + rc, with_breaks(q, keep));
    r.converged = r.converged && conv;
    return from_scalar(r, sph);
}

double kernel_K_closed_form(const std::vector<double>& xprime, double t) {
    if (xprime.size() != 2) throw DomainError("closed form of K is available for n = 3 only");
    if (!(t > 0.0)) throw DomainError("kernel_K requires t > 0");
    const double d2 = xprime[0] * xprime[0] + xprime[1] * xprime[1];
    return 2.0 * M_PI * std::sqrt(M_PI * t) * bessel_i0_scaled(d2 / (8.0 * t));
}

}  // namespace hsflow
