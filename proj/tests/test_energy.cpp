#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "hsflow/energy.hpp"
#include "hsflow/errors.hpp"

using namespace hsflow;

TEST_CASE("Chebyshev time grid") {
    std::vector<double> t, w;
    chebyshev_time_grid(32, t, w);
    REQUIRE(t.size() == 32u);
    double sum = 0.0;
    for (int k = 0; k < 32; ++k) {
        CHECK(t[k] > 0.0);
        CHECK(t[k] < 2.0);
        CHECK(std::abs(t[k] - 1.0) > 0.01);
        CHECK(w[k] > 0.0);
        sum += w[k];
    }
    CHECK(sum == doctest::Approx(2.0).epsilon(1e-14));
    // exact for polynomials up to degree N - 1
    for (int p : {1, 5, 17, 31}) {
        double s = 0.0;
        for (int k = 0; k < 32; ++k) s += w[k] * std::pow(t[k], p);
        CHECK(s == doctest::Approx(std::pow(2.0, p + 1) / (p + 1)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(chebyshev_time_grid(1, t, w), DomainError);
}

TEST_CASE("truncated energies") {
    FluxSpec spec;
    QuadSpec q;
    q.rel_tol = 1e-6;
    const auto r = energy(spec, q, {2.0, 4.0}, 8);
    REQUIRE(r.size() == 2u);
    for (const auto& e : r) {
        CHECK(std::isfinite(e.kinetic_sup));
        CHECK(std::isfinite(e.dissipation));
        CHECK(e.kinetic_sup > 0.0);
        CHECK(e.dissipation > 0.0);
        for (std::size_t k = 0; k < e.times.size(); ++k)
            if (e.times[k] < 0.25) {
                CHECK(e.kinetic[k] == 0.0);
                CHECK(e.dissipation_density[k] == 0.0);
            }
    }
    // the larger ball contains the smaller one
    CHECK(r[1].kinetic_sup >= r[0].kinetic_sup);
    CHECK(r[1].dissipation >= r[0].dissipation);
    CHECK(std::abs(r[1].kinetic_sup - r[0].kinetic_sup) < r[0].kinetic_tail);
    CHECK(std::abs(r[1].dissipation - r[0].dissipation) < r[0].dissipation_tail);
    // tails scale like 1/R
    CHECK(r[0].kinetic_tail == doctest::Approx(2.0 * r[1].kinetic_tail));
    CHECK_THROWS_AS(energy(spec, q, {}, 8), DomainError);
}
