#include <doctest.h>

#include "ffb/barrier_frac.hpp"
#include "ffb/energy.hpp"

using namespace ffb;

namespace {
// module-level pipeline at a reduced (but honest) resolution shared by the
// test cases; construction runs once
const BarrierFracPipeline& pipeline() {
    static BarrierFracPipeline pipe = [] {
        EnergyParams P(0.5, 0.5, 1);
        return BarrierFracPipeline(P); // production resolution
    }();
    return pipe;
}
} // namespace

TEST_CASE("static bundle invariants") {
    const auto& S = pipeline().static_part();
    CHECK(S.max_wtilde <= 1e-9);
    CHECK(S.q0 > 0.0);
    CHECK(S.min_Q_minus_absw1 >= -1e-9 * S.q0);
    CHECK(S.ring_fit.alpha_hat > 0.5);
    CHECK(S.ring_fit.alpha_hat < 2.0 / 3.0);
    CHECK(std::abs(S.hopf_exponent - 0.5) < 0.1);
    CHECK(S.delta >= 0.02);
}

TEST_CASE("flux of w1 recovers |psi| away from the ring") {
    const auto& S = pipeline().static_part();
    auto fl = dtn_flux(S.w1);
    double worst = 0.0;
    for (auto& f : fl) {
        double ax = std::abs(f.x1);
        if (ax > 1.0 / 3.0 - S.delta) continue;
        double expect = std::pow(1.0 - 3.0 * ax, -1.0 / 3.0); // beta - 2 sigma = -1/3 here
        worst = std::max(worst, std::abs(f.value / expect - 1.0));
    }
    CHECK(worst < 0.05);
}

TEST_CASE("checks flip with c0 and the threshold is two-sided") {
    auto Blo = pipeline().build(0.5);
    CHECK(!Blo.checks.pass);
    auto Bhi = pipeline().build(64.0);
    CHECK(Bhi.checks.pass);
    CHECK(Bhi.lambda_hat > 1.0);
    // w2_hat diagnostic: 0 <= w2_hat <= w2
    const Grid& g = *Bhi.unit_grid;
    for (std::size_t p = 0; p < g.node_count(); ++p) {
        if (!g.active(p)) continue;
        CHECK(Bhi.w2_hat[p] >= -1e-9);
        CHECK(Bhi.w2_hat[p] <= Bhi.w2[p] + 1e-9);
    }
}

TEST_CASE("vanishing rates above the contact region") {
    // both w2 and Q vanish on Gamma outside B_{1/3} and climb like y^{2 sigma}
    // (= y at sigma = 1/2); the coefficient ratio reproduces the lambda-fold
    // domination of Q by w2
    auto B = pipeline().build(64.0);
    const Grid& g = *B.unit_grid;
    std::vector<double> ys, ws, qs;
    for (std::size_t p = 0; p < g.node_count(); ++p) {
        if (!g.active(p)) continue;
        auto X = g.position(p);
        if (std::abs(X[0] - 0.5) > 1e-12) continue;
        if (X[2] <= 0.0 || X[2] > 0.25) continue;
        ys.push_back(X[2]);
        ws.push_back(std::max(B.w2[p], 1e-300));
        qs.push_back(std::max(B.Q[p], 1e-300));
    }
    REQUIRE(ys.size() >= 8);
    PowerFit fw = fit_power(ys, ws);
    PowerFit fq = fit_power(ys, qs);
    CHECK(fw.exponent == doctest::Approx(1.0).epsilon(0.25));
    CHECK(fq.exponent == doctest::Approx(1.0).epsilon(0.25));
    CHECK(fw.prefactor / fq.prefactor >= B.lambda_hat);
}
