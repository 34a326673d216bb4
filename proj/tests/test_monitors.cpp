#include "doctest.h"

#include "critspde/monitors.hpp"

#include <cmath>
#include <random>

using namespace critspde;

namespace {

TorusState state_from(int N, double t, const std::function<double(double)>& fn) {
    TorusState s{t, {}};
    for (double x : grid_points(N)) s.values.push_back(fn(x));
    return s;
}

std::vector<XEntry> l2_entries() {
    Setting s{SobolevScale{-1, 1, 2}, 2, 0};
    GrowthSpec g;
    g.f_terms.push_back(GrowthTerm{2, Q(2, 3), Q(2, 3)});
    return rho_star_and_x_exponents(g, s)[0].x_entries;
}

SimConfig base(double dt) {
    SimConfig c;
    c.N = 32;
    c.T = 0.5;
    c.dt = dt;
    c.snapshot_stride = 1;
    c.u0 = [](double x) { return std::cos(x); };
    return c;
}

}  // namespace

TEST_CASE("hilbert-schmidt norm closed forms") {
    NoiseSpec n;
    auto u = state_from(64, 0, [](double x) { return std::sin(x) + 0.3; });
    CHECK(hs_norm_G(u, PointMap{}, n) == 0.0);
    double expect = n.sigma(0) * n.sigma(0);
    for (int k = 1; k <= n.K; ++k) expect += 2 * n.sigma(k) * n.sigma(k);
    double one = hs_norm_G(u, [](double, double, double) { return 1.0; }, n);
    CHECK(one == doctest::Approx(std::sqrt(expect)).epsilon(1e-13));
    auto u2 = state_from(64, 0, [](double x) { return std::exp(std::cos(3 * x)); });
    CHECK(hs_norm_G(u2, [](double, double, double) { return 1.0; }, n) == doctest::Approx(one).epsilon(1e-13));
}

TEST_CASE("hilbert-schmidt norm of linear g is bounded by an L^xi norm") {
    NoiseSpec n;
    std::mt19937_64 rng(17);
    std::normal_distribution<double> Z;
    PointMap lin = [](double, double, double y) { return y; };
    for (double xi : {2.0, 3.0, 6.0}) {
        double C = hs_bound_constant(n, xi);
        for (int trial = 0; trial < 100; ++trial) {
            double a = Z(rng), b = Z(rng), c = Z(rng);
            auto u = state_from(64, 0, [&](double x) { return a + b * std::cos(x) + c * std::sin(5 * x); });
            CHECK(hs_norm_G(u, lin, n) <= C * lebesgue_norm(u.values, xi) * (1 + 1e-12));
            auto scaled = u;
            for (auto& v : scaled.values) v *= 2.5;
            CHECK(hs_norm_G(scaled, lin, n) == doctest::Approx(2.5 * hs_norm_G(u, lin, n)).epsilon(1e-13));
        }
    }
    CHECK_THROWS(hs_bound_constant(n, 1.5));
}

TEST_CASE("bessel and lebesgue norms of a single mode") {
    SpectralWorkspace ws(64);
    auto u = state_from(64, 0, [](double x) { return std::cos(3 * x); });
    CHECK(bessel_norm(ws, u.values, 0) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-13));
    CHECK(bessel_norm(ws, u.values, 1.0 / 3) == doctest::Approx(std::sqrt(M_PI) * std::pow(10.0, 1.0 / 6)).epsilon(1e-13));
    CHECK(lebesgue_norm(u.values, 2) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-13));
    auto one = state_from(64, 0, [](double) { return 1.0; });
    CHECK(lebesgue_norm(one.values, 6) == doctest::Approx(std::pow(2 * M_PI, 1.0 / 6)).epsilon(1e-13));
}

TEST_CASE("ito residual of the deterministic heat flow vanishes") {
    auto tr = simulate_path(base(1e-3));
    auto r = ito_energy_residual(tr, {});
    REQUIRE(r.size() == tr.monitors.size());
    for (double v : r) CHECK(std::abs(v) <= 1e-10);
    auto ms = monitor_series(tr, {});
    CHECK(ms.values.at("ito_residual") == r);
    CHECK(ms.values.count("energy") == 1);
    for (size_t i = 1; i < ms.times.size(); ++i) CHECK(ms.times[i] > ms.times[i - 1]);
}

TEST_CASE("ito residual with a conservative cubic drift is a step-size effect") {
    NonlinearitySpec cubic;
    cubic.f = [](double, double, double y) { return y * y * y; };
    std::vector<double> finals;
    for (double dt : {2e-3, 1e-3}) {
        auto c = base(dt);
        c.nonlinearity = cubic;
        auto tr = simulate_path(c);
        auto r = ito_energy_residual(tr, cubic);
        double worst = 0;
        for (double v : r) worst = std::max(worst, std::abs(v));
        CHECK(worst <= 1e-3 * tr.energy0);
        finals.push_back(worst);
    }
    CHECK(finals[1] < 0.6 * finals[0]);
}

TEST_CASE("ito residual under additive noise shrinks like sqrt(dt)") {
    NonlinearitySpec additive;
    additive.g = [](double, double, double) { return 1.0; };
    std::vector<double> rms;
    for (double dt : {4e-3, 1e-3}) {
        double acc = 0;
        const int paths = 100;
        for (int i = 0; i < paths; ++i) {
            auto c = base(dt);
            c.nonlinearity = additive;
            c.snapshot_stride = 0;
            c.seed = path_seed(5, i);
            auto r = ito_energy_residual(simulate_path(c), additive);
            acc += r.back() * r.back();
        }
        rms.push_back(std::sqrt(acc / paths));
    }
    // a factor 4 in dt should halve the RMS residual
    CHECK(rms[1] / rms[0] == doctest::Approx(0.5).epsilon(0.25));
}

TEST_CASE("blow-up functional basics") {
    NonlinearitySpec nl;
    nl.f = [](double, double, double y) { return y * y * y; };
    nl.g = [](double, double, double y) { return y; };
    NoiseSpec n;
    std::vector<TorusState> zero;
    for (int i = 0; i <= 10; ++i) zero.push_back(state_from(32, 0.1 * i, [](double) { return 0.0; }));
    CHECK(blowup_functional(zero, 1.0, nl, n, 2, 0, 0, 1) == 0.0);

    NonlinearitySpec lin;
    lin.g = [](double, double, double y) { return y; };
    auto c = base(1e-3);
    c.nonlinearity = lin;
    c.T = 1.0;
    c.snapshot_stride = 10;
    auto tr = simulate_path(c);
    REQUIRE(tr.status == PathStatus::completed);
    double prev = 0;
    for (double t : {0.2, 0.4, 0.6, 0.8, 1.0}) {
        double v = blowup_functional(tr.snapshots, tr.sigma_hat, lin, c.noise, 2, 0, 0, t);
        CHECK(std::isfinite(v));
        CHECK(v >= prev);
        prev = v;
    }
    double un = blowup_functional(tr.snapshots, tr.sigma_hat, lin, c.noise, 4, 0, 0, 1);
    double w = blowup_functional(tr.snapshots, tr.sigma_hat, lin, c.noise, 4, 1, 0, 1);
    CHECK(w <= un * std::pow(1.0, 1.0 / 4) * (1 + 1e-12));
    double w_half = blowup_functional(tr.snapshots, tr.sigma_hat, lin, c.noise, 4, 1, 0, 0.5);
    double un_half = blowup_functional(tr.snapshots, tr.sigma_hat, lin, c.noise, 4, 0, 0, 0.5);
    CHECK(w_half <= un_half * std::pow(0.5, 1.0 / 4) * (1 + 1e-12));
    CHECK_THROWS(blowup_functional(tr.snapshots, 0.5, lin, c.noise, 2, 0, 0, 0.8));
}

TEST_CASE("x-space norms") {
    auto entries = l2_entries();
    REQUIRE(entries.size() == 2);
    std::vector<TorusState> zero;
    for (int i = 0; i <= 10; ++i) zero.push_back(state_from(32, 0.1 * i, [](double) { return 0.0; }));
    for (double v : x_space_norm(zero, entries, 0, 0, 1)) CHECK(v == 0.0);

    // u = e^{-k^2 t} cos(kx): ||u||_{H^{1/3}}^6 = pi^3 (1+k^2) e^{-6k^2 t}
    const int k = 2;
    auto c = base(1e-4);
    c.T = 1.0;
    c.snapshot_stride = 5;
    c.u0 = [](double x) { return std::cos(k * x); };
    auto tr = simulate_path(c);
    auto xs = x_space_norm(tr.snapshots, entries, 0, 0, 1);
    double closed = std::pow(M_PI * M_PI * M_PI * (1 + k * k) * (1 - std::exp(-6.0 * k * k)) / (6.0 * k * k), 1.0 / 6);
    for (double v : xs) CHECK(std::abs(v / closed - 1) <= 1e-3);
    CHECK(xs[0] == xs[1]);
    // nondecreasing in the right endpoint
    CHECK(x_space_norm(tr.snapshots, entries, 0, 0, 0.5)[0] <= xs[0]);
}

TEST_CASE("nonlinearity bound ratio is stable under grid doubling") {
    // N^0_c <= c (1 + ||u||_X + ||u||_X^zeta) with zeta = 1 + max rho = 3
    NonlinearitySpec nl;
    nl.f = [](double, double, double y) { return y * y * y; };
    nl.g = [](double, double, double y) { return y; };
    NoiseSpec noise;
    auto entries = l2_entries();
    auto worst = [&](int N, int times) {
        std::mt19937_64 rng(123);
        std::normal_distribution<double> Z;
        double w = 0;
        for (int trial = 0; trial < 100; ++trial) {
            double amp = std::exp(2 * Z(rng));
            double a[4], b[4];
            for (int k = 0; k < 4; ++k) a[k] = Z(rng), b[k] = Z(rng);
            std::vector<TorusState> path;
            for (int i = 0; i <= times; ++i) {
                double t = double(i) / times;
                path.push_back(state_from(N, t, [&](double x) {
                    double v = 0;
                    for (int k = 0; k < 4; ++k) v += (a[k] + b[k] * t) * std::cos(k * x + k * t);
                    return amp * v;
                }));
            }
            double F = blowup_functional(path, 1.0, nl, noise, 2, 0, 0, 1);
            double X = x_space_norm(path, entries, 0, 0, 1)[0];
            double ratio = F / (1 + X + X * X * X);
            REQUIRE(std::isfinite(ratio));
            w = std::max(w, ratio);
        }
        return w;
    };
    double coarse = worst(32, 64), fine = worst(64, 128);
    CHECK(std::abs(fine / coarse - 1) <= 0.15);
}

TEST_CASE("hoelder fit of a smooth deterministic path saturates") {
    auto c = base(1e-3);
    c.T = 1.0;
    auto tr = simulate_path(c);
    auto fit = hoelder_estimate(tr.snapshots, 0.1);
    CHECK(fit.theta_time >= 0.9);
    CHECK(fit.theta_time <= 1.0);
    CHECK(fit.theta_space >= 0.9);
    CHECK(fit.t0 == 0.1);
    CHECK(fit.T == doctest::Approx(1.0));

    std::vector<TorusState> few(tr.snapshots.begin(), tr.snapshots.begin() + 20);
    CHECK_THROWS(hoelder_estimate(few, 0.001));
    CHECK_THROWS(hoelder_estimate(tr.snapshots, 0.0));
}
