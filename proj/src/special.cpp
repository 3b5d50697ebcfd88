#include "hsflow/special.hpp"

#include <cmath>

#include "hsflow/errors.hpp"

namespace hsflow {

void bessel_i012_scaled(double x, double out[3]) {
    if (x < 0.0) throw DomainError("scaled Bessel functions need x >= 0");
    if (x <= 20.0) {
        const double h = 0.5 * x;
        const double h2 = h * h;
        double t0 = 1.0;
        double s0 = 0.0, s1 = 0.0, s2 = 0.0;
        for (int k = 0; k < 200; ++k) {
            const double t1 = t0 * h / (k + 1);
            const double t2 = t1 * h / (k + 2);
            s0 += t0;
            s1 += t1;
            s2 += t2;
            if (t0 < 1e-17 * s0) break;
            t0 *= h2 / ((k + 1.0) * (k + 1.0));
        }
        const double e = std::exp(-x);
        out[0] = s0 * e;
        out[1] = s1 * e;
        out[2] = s2 * e;
        return;
    }
    // Hankel asymptotic expansion; for x > 20 the smallest term is below 1e-17.
    const double pref = 1.0 / std::sqrt(2.0 * M_PI * x);
    for (int nu = 0; nu < 3; ++nu) {
        const double mu = 4.0 * nu * nu;
        double term = 1.0, sum = 1.0;
        for (int k = 1; k < 60; ++k) {
            const double next = -term * (mu - (2.0 * k - 1) * (2.0 * k - 1)) / (k * 8.0 * x);
            if (std::abs(next) >= std::abs(term)) break;
            term = next;
            sum += term;
            if (std::abs(term) < 1e-17 * std::abs(sum)) break;
        }
        out[nu] = pref * sum;
    }
}

double bessel_i0_scaled(double x) {
    double v[3];
    bessel_i012_scaled(x, v);
    return v[0];
}

double bessel_i1_scaled(double x) {
    double v[3];
    bessel_i012_scaled(x, v);
    return v[1];
}

double unit_ball_volume(int n) {
    if (n < 1) throw DomainError("unit_ball_volume: n >= 1 required");
    return std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

double unit_sphere_area(int n) { return n * unit_ball_volume(n); }

double fundamental_constant(int n) {
    if (n < 3) throw DomainError("fundamental_constant: n >= 3 required");
    return 1.0 / (n * (n - 2) * unit_ball_volume(n));
}

double cn_constant(int n) { return 4.0 * std::pow(4.0 * M_PI, -0.5 * n) * fundamental_constant(n); }

}  // namespace hsflow
