#include <doctest.h>

#include <cmath>

#include "ffb/params.hpp"
#include "ffb/riesz.hpp"
#include "support/oracles.hpp"

using namespace ffb;

TEST_CASE("psi barrier values and exponent guard") {
    EnergyParams P(0.5, 0.5, 1);
    auto psi = psi_barrier(P);
    CHECK(psi.singular_exponent == doctest::Approx(-1.0 / 3.0));
    CHECK(psi.eval(0.0) == doctest::Approx(-1.0));
    CHECK(psi.eval(0.4) == 0.0);
    CHECK(psi.eval(1.0) == 0.0);
    // exponent beta - 2 sigma stays above -1 across the parameter box
    for (double s : {0.1, 0.5, 0.9})
        for (double g : {0.1, 0.5, 0.9}) {
            EnergyParams Q(s, g, 1);
            CHECK(Q.beta() - 2 * Q.sigma() > -1.0);
            CHECK_NOTHROW(psi_barrier(Q));
        }
}

TEST_CASE("psi is integrable with the closed-form L1 norm") {
    EnergyParams P(0.5, 0.5, 1);
    CHECK(l1_norm(psi_barrier(P)) == doctest::Approx(1.0).epsilon(1e-8));
    // general closed form 2/(3 (p+1)) on the line
    for (double s : {0.3, 0.7})
        for (double g : {0.25, 0.75}) {
            EnergyParams Q(s, g, 1);
            double p = Q.beta() - 2 * Q.sigma();
            CHECK(l1_norm(psi_barrier(Q)) == doctest::Approx(2.0 / (3.0 * (p + 1.0))).epsilon(1e-8));
        }
}

TEST_CASE("riesz potential of an indicator in n = 3 matches the radial closed form") {
    RadialProfile ind;
    ind.n = 3;
    ind.r = {0.0, 2.0};
    ind.v = {1.0, 1.0};
    double sigma = 0.5, R = 2.0;
    double expect = riesz_constant(3, 1.0) * 4.0 * pi * R; // int_{B_R} |z|^{-2} dz = 4 pi R
    CHECK(riesz_potential(ind, sigma, 0.0) == doctest::Approx(expect).epsilon(1e-6));
}

TEST_CASE("riesz potential of zero is zero") {
    RadialProfile z;
    z.n = 1;
    z.r = {0.0, 1.0};
    z.v = {0.0, 0.0};
    CHECK(riesz_potential(z, 0.4, 0.3) == 0.0);
}

TEST_CASE("inversion identity across kernel regimes") {
    RadialProfile f;
    f.n = 1;
    f.r = {0.0, 1.0};
    f.v = {1.0, 0.0};
    f.exact = [](double rr) { return rr < 1.0 ? sqr(sqr(1.0 - rr * rr)) : 0.0; };
    for (double sigma : {0.3, 0.5, 0.75}) {
        CAPTURE(sigma);
        if (sigma >= 0.5) CHECK(riesz_variant_flagged(1, sigma));
        auto If = [&](double z) { return riesz_potential(f, sigma, std::abs(z)); };
        for (double x : {0.15, 0.55, 1.3}) {
            double back = frac_laplacian(If, sigma, x);
            CHECK(back == doctest::Approx(f.exact(std::abs(x))).epsilon(0.02).scale(1.0));
        }
    }
}

TEST_CASE("frac laplacian of a constant is zero") {
    double v = frac_laplacian([](double) { return 2.5; }, 0.4, 0.1);
    CHECK(v == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
}

TEST_CASE("frac laplacian of the Gaussian against the spectral oracle") {
    for (double sigma : {0.3, 0.5, 0.7}) {
        auto f = [](double z) { return std::exp(-z * z); };
        for (double x : {0.0, 0.7, 1.9}) {
            double direct = frac_laplacian(f, sigma, x);
            double oracle = oracles::spectral_gaussian(sigma, x);
            CHECK(direct == doctest::Approx(oracle).epsilon(1e-4).scale(1.0));
        }
    }
}

TEST_CASE("frac laplacian is linear") {
    auto f = [](double z) { return std::exp(-z * z); };
    auto g = [](double z) { return 1.0 / (1.0 + z * z * z * z); };
    auto comb = [&](double z) { return 2.0 * f(z) + g(z); };
    double x = 0.4, sigma = 0.6;
    CHECK(frac_laplacian(comb, sigma, x) ==
          doctest::Approx(2.0 * frac_laplacian(f, sigma, x) + frac_laplacian(g, sigma, x))
              .epsilon(1e-9));
}

TEST_CASE("fractional maximal function of the unit-ball indicator") {
    RadialProfile ind;
    ind.n = 1;
    ind.r = {0.0, 1.0};
    ind.v = {1.0, 1.0};
    auto m = frac_maximal_at(ind, 1.0, 0.0, 1e-6, 10.0);
    CHECK(m.value == doctest::Approx(2.0).epsilon(1e-3)); // |B_1| = 2 on the line
    CHECK(m.arg_rho >= 1.0);
}

TEST_CASE("maximal statistic of psi is finite at the critical exponent") {
    EnergyParams P(0.5, 0.5, 1);
    auto psi = psi_barrier(P);
    double alpha = 2.0 * P.sigma() - P.beta();
    auto m = frac_maximal_at(psi, alpha, 1.0 / 3.0);
    CHECK(std::isfinite(m.value));
    CHECK(m.arg_rho > 1e-5);
    CHECK_THROWS_AS(frac_maximal_at(psi, -0.1, 0.0), param_error);
}

TEST_CASE("holder modulus fit on synthetic data") {
    std::vector<double> r, g;
    for (double t : logspace(1e-4, 0.1, 40)) {
        r.push_back(1.0 / 3.0 - t / 3.0); // 1 - 3r = t
        g.push_back(5.0 + 2.0 * std::pow(t, 0.7));
    }
    auto fit = holder_modulus_fit(r, g, 1.0 / 3.0, 5.0);
    CHECK(fit.alpha_hat == doctest::Approx(0.7).epsilon(0.01));
    CHECK(fit.rsq > 0.999);

    auto degen = holder_modulus_fit({0.1, 0.2}, {5.0, 5.0}, 1.0 / 3.0, 5.0);
    CHECK(degen.degenerate);
    CHECK_THROWS_AS(holder_modulus_fit({0.30, 0.31, 0.32}, {1, 2, 3}, 1.0 / 3.0, 5.0),
                    coverage_error);
}

TEST_CASE("holder modulus of the Riesz potential at the ring exceeds sigma") {
    EnergyParams P(0.5, 0.5, 1);
    auto psi = psi_barrier(P);
    std::vector<double> rs, gs;
    for (double t : logspace(1e-4, 0.06, 24)) {
        rs.push_back(1.0 / 3.0 - t);
        gs.push_back(riesz_potential(psi, 0.5, 1.0 / 3.0 - t));
    }
    double g13 = riesz_potential(psi, 0.5, 1.0 / 3.0);
    auto fit = holder_modulus_fit(rs, gs, 1.0 / 3.0, g13);
    CHECK(fit.alpha_hat > P.sigma());
    CHECK(fit.alpha_hat < std::min(P.beta(), 1.0));
    CHECK(fit.rsq > 0.99);
}

TEST_CASE("radial engine domain guards") {
    RadialProfile f;
    f.n = 2;
    f.r = {0.0, 1.0};
    f.v = {1.0, 1.0};
    CHECK_THROWS_AS(riesz_potential(f, 0.4, 0.1), param_error);
    f.n = 3;
    CHECK_NOTHROW(riesz_potential(f, 0.4, 0.1));
}
