#include "doctest.h"

#include "critspde/weighted_spaces.hpp"

#include <cmath>
#include <random>

using namespace critspde;

TEST_CASE("weighted Lp of constants") {
    auto g = TimeGrid::uniform(0, 1, 50);
    auto one = sample([](double) { return 1.0; }, g);
    CHECK(weighted_lp_norm(one, 2, {0, 0}) == doctest::Approx(1.0).epsilon(1e-14));
    // kappa = 1 is outside (-1, p-1) at p = 2; the same integral at p = 3 is (1/2)^{1/3}
    CHECK_THROWS(weighted_lp_norm(one, 2, {0, 1}));
    CHECK(weighted_lp_norm(one, 3, {0, 1}) == doctest::Approx(std::cbrt(0.5)).epsilon(1e-14));
}

TEST_CASE("weighted Lp of t^{-1/4} with the singular left cell") {
    auto g = TimeGrid::graded(0, 1, 400, 3.0);
    auto f = sample([](double t) { return std::pow(t, -0.25); }, g);
    CHECK(std::isinf(f.values[0]));
    CHECK(std::abs(weighted_lp_norm(f, 2, {0, 0}) - std::sqrt(2.0)) < 1e-3);
}

TEST_CASE("weighted Lp admissibility and errors") {
    auto g = TimeGrid::uniform(0, 1, 10);
    auto f = sample([](double t) { return t; }, g);
    CHECK_THROWS(weighted_lp_norm(f, 2, {0, -1.0}));
    CHECK_THROWS(weighted_lp_norm(f, 2, {0, 1.0 + 1e-12}));  // kappa = p - 1 excluded
    CHECK_NOTHROW(weighted_lp_norm(f, 2, {0, 0.999}));
    CHECK_NOTHROW(weighted_lp_norm(f, 2, {0, -0.999}));
    f.values[5] = std::nan("");
    CHECK_THROWS(weighted_lp_norm(f, 2, {0, 0}));
    CHECK_THROWS(weighted_lp_norm(sample([](double) { return 1.0; }, TimeGrid{{0, 1}}), 2, {0, 0}));
}

TEST_CASE("homogeneity, monotone restriction and the unweighting bound") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-1, 1);
    for (int trial = 0; trial < 30; ++trial) {
        double a1 = U(rng), a2 = U(rng), a3 = U(rng);
        auto fn = [&](double t) { return a1 + a2 * std::sin(3 * t) + a3 * t * t; };
        auto g = TimeGrid::uniform(0, 2, 400);
        auto f = sample(fn, g);
        double kappa = 0.5 * (U(rng) + 1);
        PowerWeight w{0, kappa};
        double n = weighted_lp_norm(f, 3, w);
        auto f2 = f;
        for (auto& v : f2.values) v *= -2.5;
        CHECK(weighted_lp_norm(f2, 3, w) == doctest::Approx(2.5 * n).epsilon(1e-13));

        // restriction to (c, 2) with the same weight
        double c = 0.5;
        auto gr = TimeGrid::uniform(c, 2, 300);
        auto fr = sample(fn, gr);
        CHECK(weighted_lp_norm(fr, 3, w) <= n * (1 + 1e-4));
        // ||f||_{L^p(c,b)} <= (c-a)^{-kappa/p} ||f||_{L^p(c,b,w)}
        double plain = weighted_lp_norm(fr, 3, {0, 0});
        CHECK(plain <= std::pow(c, -kappa / 3) * weighted_lp_norm(fr, 3, w) * (1 + 1e-9));
    }
}

TEST_CASE("slobodeckij seminorm basics") {
    auto g = TimeGrid::uniform(0, 1, 64);
    CHECK(slobodeckij_seminorm(sample([](double) { return 3.0; }, g), 0.5, 2, {0, 0}) == 0.0);
    // f(t) = t, theta = 1/2, p = 2: the double integral is exactly 1
    double v = slobodeckij_seminorm(sample([](double t) { return t; }, g), 0.5, 2, {0, 0});
    CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
    auto g2 = TimeGrid::uniform(0.37, 1.37, 64);
    double shifted = slobodeckij_seminorm(sample([](double t) { return t; }, g2), 0.5, 2, {0.37, 0});
    CHECK(shifted == doctest::Approx(v).epsilon(1e-12));
}

TEST_CASE("slobodeckij seminorm of a linear function is refinement stable") {
    auto st = refine_seminorm([](double t) { return t; }, 0, 1, 0.5, 2, {0, 0}, 32, 3);
    CHECK_FALSE(st.divergent);
    CHECK(std::abs(st.last_ratio - 1) <= 0.05);
    CHECK(st.values.back() > 0);
}

TEST_CASE("divergence detection") {
    // t^{1/4} lies in W^{theta,p} iff theta < 1/4 + 1/p
    auto finite = refine_seminorm([](double t) { return std::pow(t, 0.25); }, 0, 1, 0.6, 2, {0, 0}, 32, 5);
    CHECK_FALSE(finite.divergent);
    auto div = refine_seminorm([](double t) { return std::pow(t, 0.25); }, 0, 1, 0.9, 4, {0, 0}, 32, 5);
    CHECK(div.divergent);
    auto step = refine_seminorm([](double t) { return t < 0.5 ? 0.0 : 1.0; }, 0, 1, 0.9, 2, {0, 0}, 31, 5);
    CHECK(step.divergent);
}

TEST_CASE("embedding scaling checks") {
    auto id = check_embedding_scaling(2, 2, 0, 0, 1, 20);
    CHECK(id.pass);
    CHECK(id.worst_ratio == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(id.constant == 1.0);

    auto a = check_embedding_scaling(2, 4, 0, 0.5, 1, 20);
    CHECK(a.pass);
    CHECK(a.worst_ratio <= 1 + 1e-3);
    CHECK(a.worst_ratio > 0.95);  // the extremal power nearly attains the constant

    auto b = check_embedding_scaling(2, 4, 0.5, 0.5, 3.0, 20);
    CHECK(b.pass);

    // equality (1+kappa)/p = (1+eta)/q with p < q makes the Hoelder constant infinite
    CHECK_THROWS_AS(check_embedding_scaling(2, 4, 0, 1, 1, 5), LimitingCaseError);
    CHECK_THROWS_AS(check_embedding_scaling(4, 2, 1, 0, 1, 5), LimitingCaseError);
    CHECK_THROWS(check_embedding_scaling(4, 2, 0, 0, 1, 5));
}

TEST_CASE("mixed derivative inequality") {
    MixedOptions one;
    one.time_norm = TimeNorm::fourier;
    one.single_mode = true;
    auto r = check_mixed_derivative(0.5, 5, one);
    CHECK(r.pass);
    for (double x : r.ratios) CHECK(x == doctest::Approx(1.0).epsilon(1e-12));

    MixedOptions zero;
    zero.zero_field = true;
    CHECK(check_mixed_derivative(0.3, 3, zero).pass);

    MixedOptions coarse;
    coarse.time_cells = 48;
    MixedOptions fine = coarse;
    fine.time_cells = 96;
    auto c1 = check_mixed_derivative(0.3, 50, coarse);
    auto c2 = check_mixed_derivative(0.3, 50, fine);
    CHECK(c1.pass);
    CHECK(std::isfinite(c2.max_constant));
    CHECK(std::abs(c2.max_constant / c1.max_constant - 1) <= 0.10);

    MixedOptions four;
    four.time_norm = TimeNorm::fourier;
    CHECK(check_mixed_derivative(0.3, 50, four).max_constant <= 1 + 1e-12);
}

TEST_CASE("monomial interpolation constant is stable") {
    auto coarse = check_monomial_interpolation(0.9, 4, 1, 0.2, 5, 0.0625, 64);
    auto fine = check_monomial_interpolation(0.9, 4, 1, 0.2, 5, 0.0625, 128);
    REQUIRE(coarse.ratios.size() == 10);
    CHECK(std::isfinite(coarse.max_ratio));
    CHECK(std::abs(fine.max_ratio / coarse.max_ratio - 1) <= 0.10);
}
