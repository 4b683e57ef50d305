#include <doctest.h>

#include <cmath>

#include "ffb/grid.hpp"
#include "ffb/rescale.hpp"
#include "support/oracles.hpp"

using namespace ffb;

TEST_CASE("grading law places the first node at (1/J)^g") {
    GridConfig gc;
    gc.nx = 65;
    gc.ny = 33;
    gc.grading = 2.0;
    auto g = make_grid(gc);
    CHECK(g->y_nodes()[0] == 0.0);
    CHECK(g->y_nodes()[1] == doctest::Approx(1.0 / (32.0 * 32.0)).epsilon(1e-14));
    for (std::size_t j = 0; j + 1 < g->y_nodes().size(); ++j)
        CHECK(g->y_nodes()[j] < g->y_nodes()[j + 1]);
}

TEST_CASE("face weights reduce to 1 when a = 0") {
    CHECK(face_weight_avg(0.0, 0.0, 0.5) == doctest::Approx(1.0));
    CHECK(edge_weight_harmonic(0.0, 0.2, 0.7) == doctest::Approx(1.0));
}

TEST_CASE("face weight closed form equals numeric quadrature") {
    for (double a : {-0.8, -0.4, 0.0, 0.4, 0.8}) {
        for (auto [y1, y2] : {std::pair{0.0, 0.07}, {0.03, 0.2}, {0.5, 0.9}}) {
            double closed = face_weight_avg(a, y1, y2);
            double numeric = oracles::adaptive_simpson(
                                 [a](double y) { return std::pow(y, a); }, y1 + (y1 == 0 ? 1e-13 : 0), y2) /
                             (y2 - y1);
            // the y1=0 case needs the integrable-singularity oracle split
            if (y1 == 0.0 && a < 0) {
                // exact antiderivative instead: int_0^h y^a = h^{a+1}/(a+1)
                numeric = std::pow(y2, a + 1.0) / ((a + 1.0) * y2);
            }
            CHECK(closed == doctest::Approx(numeric).epsilon(1e-10));
        }
    }
}

TEST_CASE("example: a = 0.5 bottom face weight") {
    double h = 0.125;
    CHECK(face_weight_avg(0.5, 0.0, h) == doctest::Approx(std::pow(h, 0.5) / 1.5).epsilon(1e-12));
}

TEST_CASE("weighted volume matches the closed form") {
    for (double a : {-0.4, 0.0, 0.5}) {
        GridConfig gc;
        gc.nx = 33;
        gc.ny = 33;
        gc.a = a;
        auto g = make_grid(gc);
        Field one(g, 1.0);
        double total = weighted_integral(one);
        CHECK(total == doctest::Approx(2.0 / (a + 1.0)).epsilon(1e-8));
    }
}

TEST_CASE("weighted integral of y^{2 sigma} matches its antiderivative") {
    double sigma = 0.3, a = 1 - 2 * sigma;
    GridConfig gc;
    gc.nx = 65;
    gc.ny = 129;
    gc.a = a;
    gc.grading = 2.0;
    auto g = make_grid(gc);
    Field u = Field::from_function(g, [sigma](double, double, double y) { return std::pow(y, 2 * sigma); });
    // int_{-1}^{1} int_0^1 y^a y^{2s} = 2/(a + 2s + 1)
    CHECK(weighted_integral(u) == doctest::Approx(2.0 / (a + 2 * sigma + 1.0)).epsilon(2e-4));
}

TEST_CASE("empty region flag") {
    GridConfig gc;
    gc.nx = 17;
    gc.ny = 17;
    auto g = make_grid(gc);
    Field one(g, 1.0);
    Box empty;
    empty.x1lo = 5.0;
    empty.x1hi = 6.0;
    bool was_empty = false;
    double v = weighted_integral(one, empty, &was_empty);
    CHECK(v == 0.0);
    CHECK(was_empty);
}

TEST_CASE("trace returns the y = 0 slice in x order") {
    GridConfig gc;
    gc.nx = 33;
    gc.ny = 17;
    auto g = make_grid(gc);
    Field u = Field::from_function(g, [](double, double, double y) { return y; });
    for (const auto& t : trace(u)) CHECK(t.value == 0.0);
    Field v = Field::from_function(g, [](double x, double, double) { return x * x; });
    auto tr = trace(v);
    for (std::size_t i = 0; i + 1 < tr.size(); ++i) CHECK(tr[i].x1 < tr[i + 1].x1);
    for (const auto& t : tr) CHECK(t.value == doctest::Approx(t.x1 * t.x1));
}

TEST_CASE("refinement consistency of the weighted integral") {
    double a = 0.5;
    auto f = [](double x, double, double y) { return std::cos(x) * (1.0 + y * y); };
    // reference via iterated closed forms: int y^a (1+y^2) = 1/(a+1) + 1/(a+3); int cos = 2 sin(1)
    double exact = 2.0 * std::sin(1.0) * (1.0 / (a + 1.0) + 1.0 / (a + 3.0));
    std::vector<double> errs;
    for (int n : {17, 33, 65}) {
        GridConfig gc;
        gc.nx = n;
        gc.ny = n;
        gc.a = a;
        gc.grading = 2.0;
        auto g = make_grid(gc);
        Field u = Field::from_function(g, f);
        errs.push_back(std::abs(weighted_integral(u) - exact));
    }
    double order1 = std::log2(errs[0] / errs[1]);
    double order2 = std::log2(errs[1] / errs[2]);
    CHECK(order1 >= 1.8);
    CHECK(order2 >= 1.8);
}

TEST_CASE("rescaling identities") {
    GridConfig gc;
    gc.nx = 65;
    gc.ny = 33;
    auto g = make_grid(gc);
    double beta = 2.0 / 3.0;
    Field u = Field::from_function(g, [beta](double x, double, double y) {
        return std::pow(x * x + y * y, beta / 2.0);
    });

    SUBCASE("lambda = 1 is the identity") {
        Field v = rescale_field(u, 1.0, beta);
        for (std::size_t p = 0; p < v.values().size(); ++p)
            CHECK(v[p] == doctest::Approx(u[p]).epsilon(1e-12));
    }
    SUBCASE("homogeneous fields are fixed points") {
        Field v = rescale_field(u, 0.5, beta);
        double worst_away = 0.0, worst_all = 0.0;
        for (std::size_t p = 0; p < v.values().size(); ++p) {
            auto X = g->position(p);
            double d = std::abs(v[p] - u[p]);
            worst_all = std::max(worst_all, d);
            if (X[0] * X[0] + X[2] * X[2] > sqr(4.0 * g->dx())) worst_away = std::max(worst_away, d);
        }
        CHECK(worst_away < 5e-3);                              // smooth region: O(h^2 f'')
        CHECK(worst_all < 2.0 * std::pow(g->dx(), beta));      // kink cells: O(h^beta)
    }
    SUBCASE("pointwise evaluation oracle at 25 sample points") {
        Field v = rescale_field(u, 0.5, beta);
        for (int i = 0; i < 5; ++i)
            for (int j = 1; j <= 5; ++j) {
                double x = -0.8 + 0.4 * i, y = 0.15 * j;
                double direct = std::pow(0.5, -beta) * interpolate(u, 0.5 * x, 0.0, 0.5 * y);
                CHECK(interpolate(v, x, 0.0, y) == doctest::Approx(direct).epsilon(2e-2));
            }
    }
    SUBCASE("round trip reproduces interior values") {
        Field v = rescale_field(u, 0.5, beta);
        Field w = rescale_field(v, 2.0, beta, {0.0, 0.0}, true);
        for (std::size_t p = 0; p < w.values().size(); ++p) {
            auto X = u.grid().position(p);
            if (std::abs(X[0]) > 0.4 || X[2] > 0.4) continue;
            CHECK(w[p] == doctest::Approx(u[p]).epsilon(2e-2));
        }
    }
    SUBCASE("invalid lambda") {
        CHECK_THROWS_AS(rescale_field(u, -1.0, beta), param_error);
        CHECK_THROWS_AS(rescale_field(u, 3.0, beta), coverage_error);
    }
}

TEST_CASE("two tangential dimensions: weighted volume and interpolation") {
    GridConfig gc;
    gc.n = 2;
    gc.nx = 17;
    gc.ny = 17;
    gc.a = 0.5;
    auto g = make_grid(gc);
    Field one(g, 1.0);
    CHECK(weighted_integral(one) == doctest::Approx(4.0 * 2.0 / 3.0).epsilon(1e-8));
    Field u = Field::from_function(g, [](double x1, double x2, double y) { return x1 + 2 * x2 + y; });
    CHECK(interpolate(u, 0.31, -0.47, 0.25) == doctest::Approx(0.31 - 0.94 + 0.25).epsilon(1e-12));
    Field v = rescale_field(u, 0.5, 1.0, {0.0, 0.0});
    CHECK(interpolate(v, 0.4, 0.4, 0.2) ==
          doctest::Approx(2.0 * (0.2 + 0.4 + 0.1)).epsilon(1e-10));
}

TEST_CASE("grid configuration guards") {
    GridConfig gc;
    gc.nx = 4;
    CHECK_THROWS_AS(make_grid(gc), config_error);
    gc = {};
    gc.height = 0.0;
    CHECK_THROWS_AS(make_grid(gc), config_error);
    gc = {};
    gc.grading = 0.5;
    CHECK_THROWS_AS(make_grid(gc), config_error);
    gc = {};
    gc.a = 1.5;
    CHECK_THROWS_AS(make_grid(gc), config_error);
    gc = {};
    gc.shape = DomainShape::HalfBall;
    gc.ball_radius = 5.0;
    CHECK_THROWS_AS(make_grid(gc), config_error);
}
