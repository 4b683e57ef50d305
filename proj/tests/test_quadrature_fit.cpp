#include <doctest.h>

#include <cmath>

#include "ffb/fit.hpp"
#include "ffb/quadrature.hpp"
#include "support/oracles.hpp"

using namespace ffb;

TEST_CASE("graded rule integrates an endpoint power singularity") {
    // int_0^1 (1-t)^{-1/3} dt = 3/2
    QuadRule q = graded_rule_right(0.0, 1.0, 40);
    double got = q.integrate([](double t) { return std::pow(1.0 - t, -1.0 / 3.0); });
    CHECK(got == doctest::Approx(1.5).epsilon(1e-10));
}

TEST_CASE("uniform rule matches adaptive Simpson on a smooth integrand") {
    auto f = [](double t) { return std::exp(-t) * std::cos(3.0 * t); };
    double a = uniform_rule(0.0, 2.0, 8).integrate(f);
    double b = oracles::adaptive_simpson(f, 0.0, 2.0);
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("power fit recovers a synthetic exponent") {
    std::vector<double> r, v;
    for (double x : logspace(0.01, 1.0, 24)) {
        r.push_back(x);
        v.push_back(2.5 * std::pow(x, 0.7));
    }
    PowerFit pf = fit_power(r, v);
    CHECK(pf.exponent == doctest::Approx(0.7).epsilon(1e-10));
    CHECK(pf.prefactor == doctest::Approx(2.5).epsilon(1e-9));
    CHECK(pf.rsq > 0.999999);
}

TEST_CASE("fit guards") {
    CHECK_THROWS_AS(fit_line({1.0}, {2.0}), coverage_error);
    LineFit f = fit_line({0, 1, 2, 3}, {5, 5, 5, 5});
    CHECK(f.slope == doctest::Approx(0.0));
    CHECK(f.rsq == doctest::Approx(1.0));
}
