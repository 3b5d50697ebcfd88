#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "hsflow/errors.hpp"
#include "hsflow/kernels.hpp"
#include "hsflow/special.hpp"

using namespace hsflow;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

SpacePoint pt(double a, double b, double c) { return SpacePoint{{a, b}, c}; }

double fd(const std::function<double(double)>& f, double x) {
    const double h = std::max(1e-4, 1e-4 * std::abs(x));
    return (f(x + h) - f(x - h)) / (2 * h);
}

// identity-vs-oracle comparison with an absolute floor for values that vanish
bool close(double a, double b, double rtol, double scale) {
    return std::abs(a - b) <= rtol * std::max(std::abs(b), 1e-3 * scale);
}

}  // namespace

TEST_CASE("heat kernel") {
    CHECK(heat_kernel({0, 0, 0}, 1).value == doctest::Approx(std::pow(4 * M_PI, -1.5)).epsilon(1e-15));
    CHECK(heat_kernel({0.3, 1, 2}, -1).value == 0.0);
    CHECK(heat_kernel({0.3, 1, 2}, 0.0, {1, 0, 0}).value == 0.0);
    const double ref = -0.5 * std::pow(4 * M_PI, -1.5) * std::exp(-0.25);
    CHECK(heat_kernel({0, 0, 1}, 1, {0, 0, 1}).value == doctest::Approx(ref).epsilon(1e-14));
    // every derivative up to order three against a difference of the order below
    const std::vector<double> x = {0.4, -0.7, 1.1};
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            for (int c = 0; c < 3; ++c) {
                std::vector<int> d = {0, 0, 0};
                ++d[a];
                ++d[b];
                std::vector<int> full = d;
                ++full[c];
                const double num = fd(
                    [&](double s) {
                        std::vector<double> y = x;
                        y[c] = s;
                        return heat_kernel(y, 0.8, d).value;
                    },
                    x[c]);
                CHECK(heat_kernel(x, 0.8, full).value == doctest::Approx(num).epsilon(1e-6));
            }
    CHECK_THROWS_AS(heat_kernel(x, 1, {2, 2, 0}), DomainError);
}

TEST_CASE("fundamental solution") {
    CHECK(fundamental_solution({1, 0, 0}).value == doctest::Approx(1 / (4 * M_PI)).epsilon(1e-15));
    CHECK(fundamental_solution({0.6, 0.8}).value == doctest::Approx(0.0).scale(1));
    CHECK(fundamental_solution({1, 0, 0}, {1, 0, 0}).value == doctest::Approx(-1 / (4 * M_PI)).epsilon(1e-14));
    CHECK_THROWS_AS(fundamental_solution({0, 0, 0}), DomainError);
    for (int n : {2, 3, 4}) {
        std::vector<double> x(n);
        for (int k = 0; k < n; ++k) x[k] = 0.3 + 0.2 * k;
        for (int i = 0; i < n; ++i) {
            std::vector<int> di(n, 0);
            di[i] = 1;
            const double num = fd(
                [&](double s) {
                    std::vector<double> y = x;
                    y[i] = s;
                    return fundamental_solution(y).value;
                },
                x[i]);
            CHECK(fundamental_solution(x, di).value == doctest::Approx(num).epsilon(1e-7));
            for (int j = 0; j < n; ++j) {
                std::vector<int> dij = di;
                ++dij[j];
                const double num2 = fd(
                    [&](double s) {
                        std::vector<double> y = x;
                        y[j] = s;
                        return fundamental_solution(y, di).value;
                    },
                    x[j]);
                CHECK(fundamental_solution(x, dij).value == doctest::Approx(num2).epsilon(1e-6));
            }
        }
        // harmonic away from the origin
        double lap = 0;
        for (int i = 0; i < n; ++i) {
            std::vector<int> d(n, 0);
            d[i] = 2;
            lap += fundamental_solution(x, d).value;
        }
        CHECK(std::abs(lap) < 1e-13);
    }
}

TEST_CASE("A: both representations agree, harmonic, normal-derivative jump") {
    QuadSpec q;
    const SpacePoint x = pt(1, 0, 1);
    const double a1 = func_A(x, 1, {}, q, Form::First).value;
    const double a2 = func_A(x, 1, {}, q, Form::Second).value;
    CHECK(rel(a1, a2) < 1e-8);
    double lap = 0;
    for (int k = 0; k < 3; ++k) lap += func_A(x, 1, multi_index(3, {k, k}), q).value;
    CHECK(std::abs(lap) < 1e-4 * std::abs(a2));
    // analytic first derivatives against differences of values
    for (int k = 0; k < 3; ++k) {
        const double num = fd(
            [&](double s) {
                SpacePoint y = x;
                if (k < 2)
                    y.tangential[k] = s;
                else
                    y.normal = s;
                return func_A(y, 1, {}, q).value;
            },
            x[k]);
        CHECK(func_A(x, 1, multi_index(3, {k}), q).value == doctest::Approx(num).epsilon(1e-6).scale(1e-6));
    }
    // d_n A(x', eps, t) / Gamma(x', 0, t) -> -1/2
    double prev = 1;
    for (double e : {1e-1, 1e-2, 1e-3}) {
        const double r = func_A(pt(1, 0, e), 1, {0, 0, 1}, q).value / heat_kernel({1, 0, 0}, 1).value;
        const double err = std::abs(r + 0.5);
        CHECK(err < prev);
        prev = err;
    }
    CHECK(prev < 0.01);
    // n = 2
    const SpacePoint x2{{0.7}, 0.4};
    CHECK(rel(func_A(x2, 0.9, {}, q, Form::First).value, func_A(x2, 0.9, {}, q).value) < 1e-8);
    const double num = fd([&](double s) { return func_A(SpacePoint{{0.7}, s}, 0.9, {}, q).value; }, 0.4);
    CHECK(func_A(x2, 0.9, {0, 1}, q).value == doctest::Approx(num).epsilon(1e-6));
    CHECK_THROWS_AS(func_A(pt(0, 0, 0), 1, {}, q), DomainError);
    CHECK_THROWS_AS(func_A(x, 0, {}, q), DomainError);
    CHECK_THROWS_AS(func_A(SpacePoint{{1, 0, 0}, 1}, 1, {}, q), DomainError);
}

TEST_CASE("B: normal-derivative identity, separability, forms") {
    QuadSpec q;
    const SpacePoint x = pt(1, 0, 0.5);
    const double b = func_B(x, 1, {}, q).value;
    const double bn_second = func_B(x, 1, {0, 0, 1}, q, Form::Second).value;
    CHECK(rel(bn_second, -(0.5 / 2.0) * b) < 1e-8);
    CHECK(rel(func_B(x, 1, {}, q, Form::Second).value, b) < 1e-8);
    // 4B(x,s) = e^{-x_n^2/4s} C_n s^{-n/2} K(x',s) with K from its closed form
    const double s = 1.0;
    const double lhs = 4 * func_B(pt(2, 0, 1), s, {}, q, Form::Second).value;
    const double rhs = std::exp(-1.0 / (4 * s)) * cn_constant(3) * std::pow(s, -1.5) * kernel_K_closed_form({2, 0}, s);
    CHECK(rel(lhs, rhs) < 1e-8);
    // tangential derivatives against differences
    const SpacePoint y = pt(0.8, -0.6, 0.3);
    for (int i = 0; i < 2; ++i) {
        const double num = fd(
            [&](double v) {
                SpacePoint z = y;
                z.tangential[i] = v;
                return func_B(z, 0.7, {}, q).value;
            },
            y[i]);
        CHECK(func_B(y, 0.7, multi_index(3, {i}), q).value == doctest::Approx(num).epsilon(1e-6));
        for (int j = 0; j < 2; ++j) {
            const double num2 = fd(
                [&](double v) {
                    SpacePoint z = y;
                    z.tangential[j] = v;
                    return func_B(z, 0.7, multi_index(3, {i}), q).value;
                },
                y[j]);
            CHECK(func_B(y, 0.7, multi_index(3, {i, j}), q).value == doctest::Approx(num2).epsilon(1e-6));
        }
    }
    // third order is available through a difference
    CHECK(std::isfinite(func_B(y, 0.7, {2, 1, 0}, q).value));
    // n = 2
    const SpacePoint x2{{0.7}, 0.4};
    CHECK(rel(func_B(x2, 0.9, {}, q, Form::Second).value, func_B(x2, 0.9, {}, q).value) < 1e-8);
    CHECK_THROWS_AS(func_B(x, 1, {2, 1, 1}, q), DomainError);
}

TEST_CASE("C_i: oddness, scaling, tangential derivatives") {
    QuadSpec q;
    const SpacePoint y = pt(0.3, -0.2, 0.1);
    const SpacePoint x = pt(0.3, 1.0, 0.7);  // x_1 = y_1
    CHECK(func_Ci(0, x, y, 1.0, q).value == 0.0);
    CHECK(func_Ci(1, x, y, 1.0, q).value != 0.0);
    const double t = 0.6;
    const SpacePoint xs = pt(1.1, 0.4, 0.8), ys = pt(0.2, 0.5, 0.3);
    const double st = std::sqrt(t);
    const SpacePoint xu = pt(1.1 / st, 0.4 / st, 0.8 / st), yu = pt(0.2 / st, 0.5 / st, 0.3 / st);
    for (int i = 0; i < 3; ++i) {
        const double c = func_Ci(i, xs, ys, t, q).value;
        CHECK(rel(c, std::pow(t, -1.5) * func_Ci(i, xu, yu, 1.0, q).value) < 1e-8);
        for (int j = 0; j < 2; ++j) {
            const double num = fd(
                [&](double v) {
                    SpacePoint z = xs;
                    z.tangential[j] = v;
                    return func_Ci(i, z, ys, t, q).value;
                },
                xs[j]);
            CHECK(func_Ci(i, xs, ys, t, q, j).value == doctest::Approx(num).epsilon(1e-6));
        }
    }
    CHECK_THROWS_AS(func_Ci(3, xs, ys, t, q), DomainError);
    CHECK_THROWS_AS(func_Ci(0, pt(1, 1, 0), ys, t, q), DomainError);
    CHECK_THROWS_AS(func_Ci(0, xs, ys, t, q, 2), DomainError);
}

TEST_CASE("C_i normal derivatives: fixed points") {
    QuadSpec q;
    const SpacePoint x = pt(1, 1, 0.5), y0 = pt(0, 0, 0);
    for (int i = 0; i < 3; ++i) {
        const double num = fd(
            [&](double v) {
                SpacePoint z = x;
                z.normal = v;
                return func_Ci(i, z, y0, 1, q).value;
            },
            0.5);
        CHECK(rel(ci_normal_derivative(i, x, y0, 1, q).value, num) < 1e-4);
    }
    // d_{y_n} C_i = d_{x_n} C_i - (d_{y_n} e^{-y_n^2/4t}) d_i A(x - y', t)
    const SpacePoint y = pt(0.3, 0, 0.2);
    const double t = 1;
    for (int i = 0; i < 3; ++i) {
        const double num = fd(
            [&](double v) {
                SpacePoint z = y;
                z.normal = v;
                return func_Ci(i, x, z, t, q).value;
            },
            0.2);
        const double dg = -(0.2 / (2 * t)) * std::exp(-0.04 / (4 * t));
        const double dA = func_A(pt(x[0] - y[0], x[1] - y[1], x.normal), t, multi_index(3, {i}), q).value;
        const double rhs = ci_normal_derivative(i, x, y, t, q).value - dg * dA;
        CHECK(rel(rhs, num) < 1e-4);
        CHECK(rel(ci_yn_derivative(i, x, y, t, q).value, num) < 1e-4);
    }
}

TEST_CASE("derivative identities on a random sample") {
    QuadSpec q;
    std::mt19937 rng(20240611);
    std::uniform_real_distribution<double> U(0.1, 3.0), T(0.1, 2.0);
    int bad = 0;
    for (int s = 0; s < 50; ++s) {
        const SpacePoint x = pt(U(rng), U(rng), U(rng));
        const SpacePoint y = pt(U(rng), U(rng), U(rng));
        const double t = T(rng);
        const double scale = std::abs(func_Ci(2, x, y, t, q, 0).value) + std::abs(func_Ci(0, x, y, t, q, 0).value);
        for (int i = 0; i < 3; ++i) {
            const double num = fd(
                [&](double v) {
                    SpacePoint z = x;
                    z.normal = v;
                    return func_Ci(i, z, y, t, q).value;
                },
                x.normal);
            const double id = ci_normal_derivative(i, x, y, t, q).value;
            if (!close(id, num, 1e-4, scale)) ++bad;
            const double numy = fd(
                [&](double v) {
                    SpacePoint z = y;
                    z.normal = v;
                    return func_Ci(i, x, z, t, q).value;
                },
                y.normal);
            const double dg = -(y.normal / (2 * t)) * std::exp(-y.normal * y.normal / (4 * t));
            const double dA = func_A(pt(x[0] - y[0], x[1] - y[1], x.normal), t, multi_index(3, {i}), q).value;
            if (!close(id - dg * dA, numy, 1e-4, scale)) ++bad;
        }
    }
    CHECK(bad == 0);
}

TEST_CASE("Golovkin tensor: two representations and parity") {
    QuadSpec q;
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> U(-3, 3), N(0.1, 2.0), T(0.1, 2.0);
    double worst = 0;
    for (int s = 0; s < 20; ++s) {
        const SpacePoint x = pt(U(rng), U(rng), N(rng));
        const double t = T(rng);
        for (int i = 0; i < 3; ++i) {
            const double a = golovkin(i, 2, x, t, q).value;
            const double b = golovkin_via_ci(i, 2, x, t, q).value;
            worst = std::max(worst, std::abs(a - b) / std::max(std::abs(b), 1e-12));
        }
    }
    CHECK(worst < 1e-5);
    const SpacePoint x = pt(0.7, -0.4, 0.3);
    for (int i = 0; i < 2; ++i) {
        SpacePoint xm = x;
        xm.tangential[i] = -xm.tangential[i];
        const double a = golovkin(i, 2, x, 0.9, q).value;
        const double b = golovkin(i, 2, xm, 0.9, q).value;
        CHECK(std::abs(a + b) < 1e-10 * std::abs(a) + 1e-15);
    }
    // K_nn is even in the tangential variables
    SpacePoint xm = x;
    xm.tangential[0] = -x.tangential[0];
    CHECK(rel(golovkin(2, 2, xm, 0.9, q).value, golovkin(2, 2, x, 0.9, q).value) < 1e-10);
    // tangential columns
    const double kd = golovkin(0, 1, x, 0.9, q).value;
    CHECK(std::isfinite(kd));
    CHECK_THROWS_AS(golovkin(0, 2, pt(1, 0, 0), 1, q), DomainError);
}

TEST_CASE("K: quadrature, closed form, scaling, far field") {
    QuadSpec q;
    CHECK(rel(kernel_K({1, 0}, 1, q).value, kernel_K_closed_form({1, 0}, 1)) < 1e-10);
    CHECK(rel(kernel_K({2, 0}, 4, q).value, 2 * kernel_K({1, 0}, 1, q).value) < 1e-8);
    CHECK(rel(kernel_K({0, 0}, 1, q).value, 2 * M_PI * std::sqrt(M_PI)) < 1e-10);
    const std::vector<double> lim = {0.25, 0.05, 0.01};
    const std::vector<double> ds = {10, 50, 200};
    double prev = 1e9;
    for (int k = 0; k < 3; ++k) {
        const double v = kernel_K({ds[k], 0}, 1, q).value * ds[k];
        const double err = std::abs(v / (4 * M_PI) - 1);
        CHECK(err < lim[k]);
        CHECK(err < prev);
        prev = err;
    }
    // n = 4: scaling K(mu x', mu^2 s) = mu K(x', s) and the far-field constant
    const std::vector<double> x4 = {1.0, 0.5, -0.3};
    const std::vector<double> x4s = {2.0, 1.0, -0.6};
    CHECK(rel(kernel_K(x4s, 4, q).value, 2 * kernel_K(x4, 1, q).value) < 1e-8);
    const double d = 200;
    const double v4 = kernel_K({d, 0, 0}, 1, q).value * d * d;
    CHECK(std::abs(v4 / std::pow(4 * M_PI, 1.5) - 1) < 0.01);
    CHECK_THROWS_AS(kernel_K({1.0}, 1, q), DomainError);
}
