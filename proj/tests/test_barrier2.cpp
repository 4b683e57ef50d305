#include <doctest.h>

#include <cmath>

#include "ffb/barrier2.hpp"

using namespace ffb;

TEST_CASE("phi/psi dominance") {
    SUBCASE("vanishes at s = t") {
        CHECK(phi_fn(0.5, 2.0, 1.0, 1.0) == doctest::Approx(0.0));
        CHECK(psi_fn(0.5, 1.0, 1.0) == doctest::Approx(0.0));
    }
    SUBCASE("worked example gamma = 1/2, M = 2, t = 1, s = 4") {
        CHECK(phi_fn(0.5, 2.0, 1.0, 4.0) == doctest::Approx(2.25).epsilon(1e-12));
        CHECK(psi_fn(0.5, 1.0, 4.0) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("M = 2 dominates across the gamma sweep") {
        for (double gamma : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            auto chk = phi_psi_dominance_sweep(gamma, 2.0);
            CHECK(chk.holds);
        }
    }
    SUBCASE("M = 1 fails for gamma = 0.9 somewhere on the grid") {
        auto chk = phi_psi_dominance_sweep(0.9, 1.0);
        CHECK(!chk.holds);
    }
}

TEST_CASE("cutoff profile brackets and bounds") {
    CHECK(barrier_cutoff(0.4) == 0.0);
    CHECK(barrier_cutoff(0.8) == 1.0);
    for (double r : {0.55, 0.6, 0.7}) {
        CHECK(barrier_cutoff(r) > 0.0);
        CHECK(barrier_cutoff(r) < 1.0);
    }
}

TEST_CASE("zero boundary data never clears") {
    BallGrid g(3, 33);
    auto B = build_barrier_2nd(g, [](std::array<double, 3>) { return 0.0; }, 0.5);
    auto rep = verify_subsolution_2nd(g, B);
    CHECK(!rep.cleared);
    CHECK(rep.margin_nonneg < 0.0); // w = w1 + w2 dips negative without the harmonic lift
}

TEST_CASE("large averages clear the bundle and dominate the minimizer") {
    BallGrid g(3, 33);
    double A = 500.0, gamma = 0.5;
    auto B = build_barrier_2nd(g, [A](std::array<double, 3>) { return A; }, gamma);
    auto rep = verify_subsolution_2nd(g, B);
    CHECK(rep.cleared);
    CHECK(rep.w_center > 0.0);
    CHECK(rep.margin_direct > 0.0);

    auto fc = fundamental_solution_check(g, B);
    CHECK(fc.holds);

    auto mres = ball_minimize(g, [A](std::array<double, 3>) { return A; }, gamma);
    auto cmp = verify_comparison_ball(g, mres.u, B.w, 0.01 * A);
    CHECK(cmp.pass);
    std::vector<double> vmax(mres.u.size());
    for (std::size_t p = 0; p < vmax.size(); ++p) vmax[p] = std::max(mres.u[p], B.w[p]);
    CHECK(ball_energy(g, vmax, gamma).total >= mres.energy.total - 1e-9);
}

TEST_CASE("halving lambda breaks the annulus ratio") {
    BallGrid g(3, 33);
    auto B = build_barrier_2nd(g, [](std::array<double, 3>) { return 500.0; }, 0.5);
    B.lambda *= 0.5;
    for (std::size_t p = 0; p < g.count(); ++p) {
        auto X = g.position(p);
        B.w1[p] = ffb::detail::w1_radial(std::sqrt(BallGrid::norm2(X)), B.lambda, B.beta);
        B.w[p] = B.w1[p] + B.w2[p] + B.w3[p];
    }
    auto rep = verify_subsolution_2nd(g, B);
    CHECK(rep.margin_annulus_ratio < 0.0);
    CHECK(!rep.cleared);
}

TEST_CASE("dim 2 variant also builds and clears") {
    BallGrid g(2, 65);
    auto B = build_barrier_2nd(g, [](std::array<double, 3>) { return 300.0; }, 0.5);
    auto rep = verify_subsolution_2nd(g, B);
    CHECK(rep.cleared);
    auto fc = fundamental_solution_check(g, B);
    CHECK(fc.holds); // log fundamental solution branch
}

TEST_CASE("ball harmonic solve converges on harmonic polynomials") {
    // the stair-step rim carries an O(h) data-projection error; check the
    // trend and the interior accuracy rather than a fixed tight bound
    auto f = [](std::array<double, 3> X) { return X[0] * X[0] - X[2] * X[2]; };
    std::vector<double> errs, inner;
    for (int m : {33, 49, 65}) {
        BallGrid g(3, m);
        auto u = ball_harmonic(g, f);
        double e = 0.0, ei = 0.0;
        for (std::size_t p = 0; p < g.count(); ++p) {
            if (g.role(p) == BallGrid::Role::Outside) continue;
            double d = std::abs(u[p] - f(g.position(p)));
            e = std::max(e, d);
            if (BallGrid::norm2(g.position(p)) < 0.64) ei = std::max(ei, d);
        }
        errs.push_back(e);
        inner.push_back(ei);
    }
    CHECK(errs[2] < errs[1]);
    CHECK(errs[1] < errs[0]);
    CHECK(inner.back() < 0.03);
}
