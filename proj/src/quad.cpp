#include "hsflow/quad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>

#include "hsflow/errors.hpp"

namespace hsflow {

namespace {

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
const double kXgk[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
const double kWgk[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208838939788, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
const double kWg[5] = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Map from the unit parameter v in (0,1) to the original variable, with Jacobian.
struct Piece {
    enum class Map { Linear, PowerLeft, PowerRight, LogLeft, LogRight, Infinite };
    Map map = Map::Linear;
    double a = 0.0, b = 0.0;  // original interval (b may be +inf)
    double v0 = 0.0, v1 = 1.0;
    int p = 1;  // power for the PowerLeft/PowerRight maps

    // Returns x(v) and the Jacobian; off = signed offset of x from the singular end
    // (x - a for left maps, b - x for right maps), free of cancellation.
    double x_of(double v, double& jac, double& off) const {
        const double L = b - a;
        switch (map) {
            case Map::Linear:
                jac = 1.0;
                off = v - a;
                return v;
            case Map::PowerLeft: {
                const double vp1 = p == 1 ? 1.0 : std::pow(v, p - 1);
                jac = L * p * vp1;
                off = L * vp1 * v;
                return a + off;
            }
            case Map::PowerRight: {
                const double vp1 = p == 1 ? 1.0 : std::pow(v, p - 1);
                jac = L * p * vp1;
                off = L * vp1 * v;
                return b - off;
            }
            case Map::LogLeft: {
                off = L * std::exp(v);
                jac = off;
                return a + off;
            }
            case Map::LogRight: {
                off = L * std::exp(v);
                jac = off;
                return b - off;
            }
            case Map::Infinite: {
                const double w = 1.0 - v;
                jac = 1.0 / (w * w);
                off = v / w;
                return a + off;
            }
        }
        jac = 0.0;
        off = 0.0;
        return 0.0;
    }
    bool right_map() const { return map == Map::PowerRight || map == Map::LogRight; }
};

struct Interval {
    int piece;
    double lo, hi;
    int depth;
    std::vector<double> val, err, l1;
};

// Chooses the power p in x = e + L v^p for an endpoint singularity |x-e|^beta.
int power_for_exponent(double beta) {
    const double q = 1.0 + beta;
    if (q <= 0.0) throw DomainError("non-integrable endpoint singularity");
    for (int p = 1; p <= 20; ++p) {
        const double r = p * q;
        if (std::abs(r - std::round(r)) < 1e-12 && std::round(r) >= 1.0) return p;
    }
    return std::max(1, static_cast<int>(std::ceil(2.0 / q)));
}

using CoreIntegrand = std::function<void(double, double, double, double*)>;

void eval_rule(int dim, const CoreIntegrand& f, const Piece& pc, double lo, double hi, Interval& iv,
               std::vector<double>& buf, long& nev) {
    const double c = 0.5 * (iv.lo + iv.hi);
    const double h = 0.5 * (iv.hi - iv.lo);
    // buf layout: 21 rows of dim values; row 0 is the centre,
    // rows 2k-1, 2k are the symmetric pair for xgk[k-1].
    buf.assign(static_cast<size_t>(21) * dim, 0.0);
    auto call = [&](double v, double* out) {
        double jac = 1.0, off = 0.0;
        const double x = pc.x_of(v, jac, off);
        double dlo, dhi;
        if (pc.right_map()) {
            dhi = pc.b == hi ? off : hi - x;
            dlo = x - lo;
        } else {
            dlo = pc.a == lo && pc.map != Piece::Map::Linear ? off : x - lo;
            dhi = hi - x;
        }
        f(x, dlo, dhi, out);
        for (int d = 0; d < dim; ++d) {
            out[d] *= jac;
            if (!std::isfinite(out[d])) out[d] = 0.0;  // measure-zero overflow at mapped ends
        }
    };
    call(c, &buf[0]);
    for (int k = 0; k < 10; ++k) {
        call(c - h * kXgk[k], &buf[static_cast<size_t>(2 * k + 1) * dim]);
        call(c + h * kXgk[k], &buf[static_cast<size_t>(2 * k + 2) * dim]);
    }
    nev += 21;
    iv.val.assign(dim, 0.0);
    iv.err.assign(dim, 0.0);
    iv.l1.assign(dim, 0.0);
    const double ah = std::abs(h);
    for (int d = 0; d < dim; ++d) {
        const double fc = buf[d];
        double resk = kWgk[10] * fc;
        double resg = 0.0;
        double resabs = std::abs(resk);
        for (int k = 0; k < 10; ++k) {
            const double f1 = buf[static_cast<size_t>(2 * k + 1) * dim + d];
            const double f2 = buf[static_cast<size_t>(2 * k + 2) * dim + d];
            resk += kWgk[k] * (f1 + f2);
            resabs += kWgk[k] * (std::abs(f1) + std::abs(f2));
            if (k % 2 == 1) resg += kWg[k / 2] * (f1 + f2);
        }
        const double mean = 0.5 * resk;
        double resasc = kWgk[10] * std::abs(fc - mean);
        for (int k = 0; k < 10; ++k) {
            const double f1 = buf[static_cast<size_t>(2 * k + 1) * dim + d];
            const double f2 = buf[static_cast<size_t>(2 * k + 2) * dim + d];
            resasc += kWgk[k] * (std::abs(f1 - mean) + std::abs(f2 - mean));
        }
        double err = std::abs((resk - resg) * h);
        resasc *= ah;
        resabs *= ah;
        if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
        if (resabs > std::numeric_limits<double>::min() / (50.0 * kEps))
            err = std::max(50.0 * kEps * resabs, err);
        iv.val[d] = resk * h;
        iv.err[d] = err;
        iv.l1[d] = resabs;
    }
}

// Splits [lo, hi] into mapped pieces according to breakpoints and singularities.
std::vector<Piece> build_pieces(double lo, double hi, const QuadSpec& spec) {
    std::vector<double> cuts;
    cuts.push_back(lo);
    for (double b : spec.breakpoints)
        if (b > lo && b < hi) cuts.push_back(b);
    for (const auto& s : spec.singularities)
        if (s.kind != Singularity::Kind::None && s.location > lo && s.location < hi)
            cuts.push_back(s.location);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    cuts.push_back(hi);

    auto sing_at = [&](double x) -> const Singularity* {
        for (const auto& s : spec.singularities)
            if (s.kind != Singularity::Kind::None && s.location == x) return &s;
        return nullptr;
    };

    std::vector<Piece> pieces;
    auto add_finite = [&](double a, double b, const Singularity* sa, const Singularity* sb) {
        // singular at both ends: the caller splits at the midpoint
        if (sa && sb) return std::make_pair(0.5 * (a + b), true);
        Piece p;
        p.a = a;
        p.b = b;
        const Singularity* s = sa ? sa : sb;
        if (!s) {
            p.map = Piece::Map::Linear;
            p.v0 = a;
            p.v1 = b;
        } else if (s->kind == Singularity::Kind::Power) {
            p.p = power_for_exponent(s->exponent);
            p.map = sa ? Piece::Map::PowerLeft : Piece::Map::PowerRight;
            p.v0 = 0.0;
            p.v1 = 1.0;
            if (p.p == 1) {
                p.map = Piece::Map::Linear;
                p.v0 = a;
                p.v1 = b;
            }
        } else {
            // exp(-c/|x-e|): the first fraction eps of the interval is negligible.
            const double L = b - a;
            double eps = std::min(1e-3, s->scale / (40.0 * L));
            if (!(eps > 0.0)) eps = 1e-30;
            p.map = sa ? Piece::Map::LogLeft : Piece::Map::LogRight;
            p.v0 = std::log(eps);
            p.v1 = 0.0;
        }
        pieces.push_back(p);
        return std::make_pair(0.0, false);
    };

    for (size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double a = cuts[k], b = cuts[k + 1];
        const Singularity* sa = sing_at(a);
        const Singularity* sb = std::isinf(b) ? nullptr : sing_at(b);
        if (std::isinf(b)) {
            if (sa) {
                const double m = a + 1.0;
                add_finite(a, m, sa, nullptr);
                Piece p;
                p.map = Piece::Map::Infinite;
                p.a = m;
                p.b = b;
                pieces.push_back(p);
            } else {
                Piece p;
                p.map = Piece::Map::Infinite;
                p.a = a;
                p.b = b;
                pieces.push_back(p);
            }
            continue;
        }
        auto r = add_finite(a, b, sa, sb);
        if (r.second) {
            add_finite(a, r.first, sa, nullptr);
            add_finite(r.first, b, nullptr, sb);
        }
    }
    return pieces;
}

}  // namespace

const KronrodRule& kronrod21() {
    static const KronrodRule rule = [] {
        KronrodRule r;
        r.xgk.assign(kXgk, kXgk + 11);
        r.wgk.assign(kWgk, kWgk + 11);
        r.wg.assign(kWg, kWg + 5);
        return r;
    }();
    return rule;
}

namespace {

VecQuadResult integrate_core(int dim, const CoreIntegrand& f, double lo, double hi, const QuadSpec& spec) {
    if (!(spec.rel_tol > 0.0) || !(spec.abs_tol > 0.0) || spec.max_depth < 1)
        throw ConfigError("quadrature tolerances must be positive and max_depth >= 1");
    VecQuadResult res;
    res.value.assign(dim, 0.0);
    res.abs_error.assign(dim, 0.0);
    if (lo == hi) return res;
    double sign = 1.0;
    if (lo > hi) {
        if (std::isinf(lo)) throw DomainError("integration limits: lower limit is infinite");
        std::swap(lo, hi);
        sign = -1.0;
    }
    if (std::isinf(lo)) throw DomainError("integration limits: lower limit is infinite");

    const std::vector<Piece> pieces = build_pieces(lo, hi, spec);
    std::vector<Interval> ivs;
    std::vector<double> buf;
    for (size_t k = 0; k < pieces.size(); ++k) {
        Interval iv{static_cast<int>(k), pieces[k].v0, pieces[k].v1, 0, {}, {}, {}};
        eval_rule(dim, f, pieces[k], lo, hi, iv, buf, res.evaluations);
        ivs.push_back(std::move(iv));
    }

    std::vector<double> tot(dim), totErr(dim), totL1(dim), tol(dim);
    std::vector<double> score;
    bool converged = false;
    while (true) {
        std::fill(tot.begin(), tot.end(), 0.0);
        std::fill(totErr.begin(), totErr.end(), 0.0);
        std::fill(totL1.begin(), totL1.end(), 0.0);
        for (const auto& iv : ivs)
            for (int d = 0; d < dim; ++d) {
                tot[d] += iv.val[d];
                totErr[d] += iv.err[d];
                totL1[d] += iv.l1[d];
            }
        bool ok = true;
        for (int d = 0; d < dim; ++d) {
            tol[d] = std::max({spec.abs_tol, spec.rel_tol * std::abs(tot[d]),
                               spec.l1_floor * spec.rel_tol * totL1[d]});
            if (totErr[d] > tol[d]) ok = false;
        }
        if (ok) {
            converged = true;
            break;
        }
        if (static_cast<int>(ivs.size()) >= spec.max_intervals) break;
        score.assign(ivs.size(), 0.0);
        double smax = 0.0;
        for (size_t k = 0; k < ivs.size(); ++k) {
            double s = 0.0;
            if (ivs[k].depth < spec.max_depth)
                for (int d = 0; d < dim; ++d) s = std::max(s, ivs[k].err[d] / tol[d]);
            score[k] = s;
            smax = std::max(smax, s);
        }
        if (smax <= 0.0) break;  // every offending interval is at max depth
        // Bisect every interval within a fixed fraction of the worst one; mirrored
        // intervals of a symmetric integrand carry equal scores and split together.
        const double thresh = 0.25 * smax;
        std::vector<Interval> next;
        next.reserve(ivs.size() * 2);
        for (size_t k = 0; k < ivs.size(); ++k) {
            if (score[k] < thresh || score[k] == 0.0) {
                next.push_back(std::move(ivs[k]));
                continue;
            }
            const Interval& iv = ivs[k];
            const double m = 0.5 * (iv.lo + iv.hi);
            Interval l{iv.piece, iv.lo, m, iv.depth + 1, {}, {}, {}};
            Interval r{iv.piece, m, iv.hi, iv.depth + 1, {}, {}, {}};
            eval_rule(dim, f, pieces[iv.piece], lo, hi, l, buf, res.evaluations);
            eval_rule(dim, f, pieces[iv.piece], lo, hi, r, buf, res.evaluations);
            next.push_back(std::move(l));
            next.push_back(std::move(r));
        }
        ivs.swap(next);
    }
    // Sum in sorted order so the result does not depend on the processing history.
    std::sort(ivs.begin(), ivs.end(), [](const Interval& x, const Interval& y) {
        return x.piece != y.piece ? x.piece < y.piece : x.lo < y.lo;
    });
    for (int d = 0; d < dim; ++d) {
        double v = 0.0, e = 0.0;
        for (const auto& iv : ivs) {
            v += iv.val[d];
            e += iv.err[d];
        }
        res.value[d] = sign * v;
        res.abs_error[d] = e;
    }
    res.converged = converged;
    return res;
}

QuadResult scalar_result(const VecQuadResult& v) {
    QuadResult r;
    r.value = v.value[0];
    r.abs_error = v.abs_error[0];
    r.evaluations = v.evaluations;
    r.converged = v.converged;
    return r;
}

}  // namespace

VecQuadResult integrate_interval_vec(int dim, const VecIntegrand& f, double lo, double hi,
                                     const QuadSpec& spec) {
    return integrate_core(
        dim, [&](double x, double, double, double* out) { f(x, out); }, lo, hi, spec);
}

VecQuadResult integrate_interval_vec(int dim, const VecOffsetIntegrand& f, double lo, double hi,
                                     const QuadSpec& spec) {
    return integrate_core(dim, f, lo, hi, spec);
}

QuadResult integrate_interval(const OffsetIntegrand& f, double lo, double hi, const QuadSpec& spec) {
    return scalar_result(integrate_core(
        1, [&](double x, double dlo, double dhi, double* out) { out[0] = f(x, dlo, dhi); }, lo, hi, spec));
}

QuadResult integrate_interval(const Integrand& f, double lo, double hi, const QuadSpec& spec) {
    VecQuadResult v = integrate_interval_vec(
        1, [&](double x, double* out) { out[0] = f(x); }, lo, hi, spec);
    QuadResult r;
    r.value = v.value[0];
    r.abs_error = v.abs_error[0];
    r.evaluations = v.evaluations;
    r.converged = v.converged;
    return r;
}

QuadResult integrate_time_sigma(const Integrand& f, double xn, double s_lo, double s_hi,
                                const QuadSpec& spec) {
    if (!(xn > 0.0)) throw DomainError("integrate_time_sigma requires xn > 0");
    if (!(s_lo >= 0.0) || !(s_hi > s_lo)) throw DomainError("integrate_time_sigma: bad s range");
    const double c = xn * xn / 4.0;
    const double sig_lo = c / s_hi;
    const double sig_top = s_lo > 0.0 ? c / s_lo : std::numeric_limits<double>::infinity();
    const double sig_hi = std::min(sig_top, sig_lo + 100.0);
    // ds = -c/sigma^2 dsigma; orientation reversed
    auto g = [&](double sig) { return f(c / sig) * c / (sig * sig); };
    QuadResult out;
    out.truncation_radius = sig_hi < sig_top ? sig_hi : 0.0;
    auto accumulate = [&](const QuadResult& r) {
        out.value += r.value;
        out.abs_error += r.abs_error;
        out.evaluations += r.evaluations;
        out.converged = out.converged && r.converged;
    };
    const double split = std::min(1.0, sig_hi);
    // s-space breakpoints move to sigma = c/s; singularity annotations do not carry over
    QuadSpec qlog = spec, qlin = spec;
    qlog.breakpoints.clear();
    qlin.breakpoints.clear();
    qlog.singularities.clear();
    qlin.singularities.clear();
    for (double b : spec.breakpoints) {
        if (!(b > s_lo && b < s_hi)) continue;
        const double sig = c / b;
        if (sig > sig_lo && sig < split) qlog.breakpoints.push_back(std::log(sig));
        if (sig > split && sig < sig_hi) qlin.breakpoints.push_back(sig);
    }
    if (sig_lo < split) {
        // logarithmic variable on [sig_lo, min(1, sig_hi)]
        auto gl = [&](double u) {
            const double sig = std::exp(u);
            return g(sig) * sig;
        };
        accumulate(integrate_interval(gl, std::log(sig_lo), std::log(split), qlog));
    }
    const double lo2 = std::max(sig_lo, split);
    if (lo2 < sig_hi) accumulate(integrate_interval(g, lo2, sig_hi, qlin));
    return out;
}

QuadResult integrate_disk(const std::function<double(const double*)>& f,
                          const std::vector<double>& center, double r, const QuadSpec& spec,
                          const std::optional<std::vector<double>>& singular_point) {
    const size_t m = center.size();
    if (m != 1 && m != 2)
        throw DomainError("integrate_disk supports tangential dimension 1 or 2 only");
    if (!(r > 0.0)) throw DomainError("integrate_disk requires r > 0");
    if (m == 1) {
        QuadSpec q = spec;
        if (singular_point) q.breakpoints.push_back((*singular_point)[0]);
        return integrate_interval([&](double x) { return f(&x); }, center[0] - r, center[0] + r, q);
    }
    double p[2] = {center[0], center[1]};
    if (singular_point) {
        const double dx = (*singular_point)[0] - center[0], dy = (*singular_point)[1] - center[1];
        if (dx * dx + dy * dy < r * r) {
            p[0] = (*singular_point)[0];
            p[1] = (*singular_point)[1];
        }
    }
    const double ox = p[0] - center[0], oy = p[1] - center[1];
    const double o2 = ox * ox + oy * oy;
    const QuadSpec inner = spec.tightened(0.1);
    long evals = 0;
    bool conv = true;
    auto radial = [&](double th) {
        const double ex = std::cos(th), ey = std::sin(th);
        const double b = ox * ex + oy * ey;
        const double rho_max = -b + std::sqrt(std::max(0.0, b * b - (o2 - r * r)));
        if (!(rho_max > 0.0)) return 0.0;
        QuadSpec q = inner;
        q.breakpoints.clear();
        q.singularities.clear();
        auto g = [&](double rho) {
            const double z[2] = {p[0] + rho * ex, p[1] + rho * ey};
            return f(z) * rho;
        };
        QuadResult rr = integrate_interval(g, 0.0, rho_max, q);
        evals += rr.evaluations;
        conv = conv && rr.converged;
        return rr.value;
    };
    QuadSpec outer = spec;
    outer.breakpoints = {M_PI / 2, M_PI, 3 * M_PI / 2};
    outer.singularities.clear();
    QuadResult res = integrate_interval(radial, 0.0, 2.0 * M_PI, outer);
    res.evaluations = evals;
    res.converged = res.converged && conv;
    return res;
}

const GaussRule& gauss_legendre(int n) {
    static std::mutex mu;
    static std::map<int, GaussRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    if (n < 1) throw DomainError("gauss_legendre: n must be >= 1");
    GaussRule g;
    g.nodes.assign(n, 0.0);
    g.weights.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // recompute derivative at the converged root
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        g.nodes[i] = -x;
        g.nodes[n - 1 - i] = x;
        g.weights[i] = w;
        g.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) g.nodes[n / 2] = 0.0;
    return cache.emplace(n, std::move(g)).first->second;
}

}  // namespace hsflow
