#include "doctest.h"

#include "critspde/harness.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace critspde;
namespace fs = std::filesystem;

namespace {

EnsembleConfig small(const std::string& preset, int paths, double T) {
    EnsembleConfig e;
    e.base = make_preset(preset);
    e.base.sim.T = T;
    e.base.sim.N = 32;
    e.base.sim.noise.K = 10;
    e.base.sim.seed = 42;
    e.n_paths = paths;
    return e;
}

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("critspde_test_" + name);
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST_CASE("fold statistics and the wide flag") {
    auto one = fold_stats({3.0});
    CHECK(one.mean == 3.0);
    CHECK(one.variance == 0.0);
    CHECK_FALSE(one.ci_low.has_value());

    std::vector<double> xs;
    for (int i = 0; i < 40; ++i) xs.push_back(i % 2);
    auto s = fold_stats(xs);
    CHECK(s.mean == doctest::Approx(0.5));
    CHECK(s.variance == doctest::Approx(40.0 / 39 * 0.25));
    REQUIRE(s.ci_low.has_value());
    double half = 1.96 * std::sqrt(s.variance / 40);
    CHECK(*s.ci_low == doctest::Approx(0.5 - half));
    CHECK(*s.ci_high == doctest::Approx(0.5 + half));
    CHECK_FALSE(fold_stats(std::vector<double>(29, 1.0)).ci_low.has_value());
}

TEST_CASE("single-path ensemble reproduces the path functionals") {
    auto e = small("sublinear-global", 1, 0.2);
    auto st = mc_run(e);
    REQUIRE(st.paths.size() == 1);
    auto cfg = e.base.sim;
    cfg.seed = path_seed(42, 0);
    CHECK(st.seeds[0] == cfg.seed);
    auto direct = path_functionals(simulate_path(cfg), cfg, false, 0.1);
    for (const auto& [k, v] : direct.functionals) {
        CHECK(st.functionals.at(k).mean == v);
        CHECK(st.functionals.at(k).variance == 0.0);
        CHECK_FALSE(st.functionals.at(k).ci_low.has_value());
    }
    auto j = stats_to_json(st);
    CHECK(j["functionals"]["energy0"]["ci95"] == "wide");
}

TEST_CASE("deterministic ensemble has zero variance") {
    auto st = mc_run(small("cubic-conservative", 5, 0.2));
    CHECK(st.survival == 1.0);
    for (const auto& [k, v] : st.functionals) CHECK(v.variance == 0.0);
}

TEST_CASE("summaries are bitwise identical across thread counts") {
    auto e = small("sublinear-global", 24, 0.1);
    e.threads = 1;
    auto a = summary_text(mc_run(e));
    e.threads = 8;
    auto b = summary_text(mc_run(e));
    CHECK(a == b);
    e.base.sim.seed = 43;
    CHECK(summary_text(mc_run(e)) != a);
}

TEST_CASE("persisted layout and state round trip") {
    auto dir = scratch("persist");
    auto e = small("sublinear-global", 3, 0.05);
    e.base.sim.snapshot_stride = 1;
    e.outdir = dir.string();
    e.experiment = "demo";
    e.threads = 2;
    auto st = mc_run(e);
    for (int i = 0; i < 3; ++i) {
        CHECK(fs::exists(dir / "demo" / ("path_" + std::to_string(i) + ".csv")));
        CHECK(fs::exists(dir / "demo" / ("path_" + std::to_string(i) + "_states.csv")));
    }
    std::ifstream in(dir / "demo" / "summary.json");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(text == summary_text(st));
    auto j = nlohmann::json::parse(text);
    CHECK(j["schema_version"] == 1);
    CHECK(j["n_paths"] == 3);
    CHECK_FALSE(j.contains("threads"));

    // recomputing the energy series from the stored states
    auto cfg = e.base.sim;
    cfg.seed = st.seeds[1];
    auto tr = simulate_path(cfg);
    auto states = read_states_csv((dir / "demo" / "path_1_states.csv").string());
    REQUIRE(states.size() == tr.monitors.size());
    for (size_t i = 0; i < states.size(); ++i) {
        CHECK(states[i].t == tr.monitors[i].t);
        CHECK(std::abs(l2_norm_sq(states[i].values) - tr.monitors[i].energy) <= 1e-12);
    }
    fs::remove_all(dir);
}

TEST_CASE("energy constant without noise") {
    auto e = small("cubic-conservative", 4, 0.5);
    auto r = experiment_energy(e);
    CHECK_FALSE(r.invalidated);
    CHECK(r.survival == 1.0);
    // the energy identity gives sup ||u||^2 <= ||u0||^2 and 2 int ||u_x||^2 <= ||u0||^2
    double e0 = r.coarse.functionals.at("energy0").mean;
    CHECK(r.C_hat <= 1.5 * e0 / (1 + e0) * (1 + 1e-9));
    // sup_t (||u(t)||^2 + 2 int_0^t ||u_x||^2) equals ||u0||^2 up to the step-size defect
    CHECK(r.C_hat_identity <= e0 / (1 + e0) * (1 + 1e-3));
    CHECK(r.stable);
}

TEST_CASE("energy constant under additive noise is finite and refinement stable") {
    auto e = small("linear-noise", 40, 1.0);
    e.base.u0 = "cos";
    e.base.sim.u0 = initial_datum("cos", e.base.sim.N);
    auto r = experiment_energy(e);
    CHECK(std::isfinite(r.C_hat));
    CHECK(r.relative_change <= 0.10);
    CHECK(r.stable);
    auto j = to_json(r);
    CHECK(j.contains("C_hat"));
}

TEST_CASE("energy constant is monotone in the noise constant") {
    auto e = small("sublinear-global", 20, 0.5);
    e.base.maps.C_g = 1.0;
    e.base.sim.nonlinearity = build_nonlinearity(e.base.maps);
    double c1 = experiment_energy(e).C_hat;
    e.base.maps.C_g = 2.0;
    e.base.sim.nonlinearity = build_nonlinearity(e.base.maps);
    double c2 = experiment_energy(e).C_hat;
    CHECK(c2 >= c1);
}

TEST_CASE("global survival experiment") {
    auto e = small("cubic-conservative", 20, 0.5);
    auto lin = experiment_global(1.0, e);
    CHECK(lin.survival == 1.0);
    e.base.maps.C_g = 0.0;
    CHECK(experiment_global(1.0, e).survival == 1.0);
    e.base.maps.C_g = 1.0;
    auto rough = experiment_global(2.5, e);
    CHECK(rough.survival >= 0.0);
    CHECK(rough.survival <= 1.0);
    CHECK_THROWS(experiment_global(3.0, e));
}

TEST_CASE("survival is monotone in the blow-up cap") {
    auto e = small("cubic-conservative", 20, 0.5);
    e.base.maps.g = "power";
    e.base.maps.h = 2.5;
    e.base.maps.C_g = 3.0;
    e.base.sim.nonlinearity = build_nonlinearity(e.base.maps);
    e.base.sim.u0 = [](double x) { return 2 * std::cos(x); };
    double prev = -1;
    for (double cap : {3.0, 10.0, 1e6}) {
        e.base.sim.blowup_cap = cap;
        double s = mc_run(e).survival;
        CHECK(s >= prev);
        prev = s;
    }
}

TEST_CASE("regularity experiment") {
    auto heat = small("heat", 3, 1.0);
    auto rh = experiment_regularity(heat);
    CHECK(rh.median_theta_time >= 0.9);

    auto lin = small("linear-noise", 10, 1.0);
    lin.base.sim.N = 64;
    lin.base.sim.noise.K = 21;
    auto rl = experiment_regularity(lin);
    CHECK(rl.median_theta_time >= 0.4);
    CHECK(rl.median_theta_time <= 0.55);
    CHECK(rl.median_theta_space >= 0.8);
    CHECK(rl.fits.size() == 10);
}

TEST_CASE("convergence study") {
    auto lin = small("linear-noise", 50, 0.5);
    lin.base.sim.dt = 1e-2;
    auto r = convergence_study(lin, 3);
    REQUIRE(r.dts.size() == 3);
    CHECK(r.strong_order >= 0.45);

    auto heat = small("heat", 1, 1.0);
    heat.base.sim.dt = 0.1;
    auto h = convergence_study(heat, 3);
    for (double err : h.strong_errors) CHECK(err <= 1e-12);

    auto cubic = small("cubic-conservative", 1, 0.5);
    auto c = convergence_study(cubic, 3);
    CHECK(c.spectral);
    REQUIRE(!c.spatial_ratios.empty());
    CHECK(c.spatial_ratios.front() >= 10);
    CHECK_THROWS(convergence_study(cubic, 2));
}
