#include "critspde/calc_json.hpp"
#include "critspde/harness.hpp"
#include "critspde/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>

using namespace critspde;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_check_failed = 2;

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("malformed JSON in " + path + ": " + e.what());
    }
}

std::string default_outdir() {
    const char* env = std::getenv("CRITSPDE_OUTDIR");
    return env && *env ? env : "critspde_out";
}

// Simulation flags shared by simulate and montecarlo. Each one that is set
// overwrites the matching field of the config file.
struct SimFlags {
    std::string config;
    std::string preset;
    std::optional<int> N;
    std::optional<double> T, dt, blowup_cap, lambda, scale, C_g, h;
    std::optional<int> K, snapshot_stride;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> scheme, f, g, u0;
    std::string outdir;

    void attach(CLI::App* app) {
        app->add_option("--config", config, "JSON configuration file")->check(CLI::ExistingFile);
        app->add_option("--preset", preset, "Preset name (heat, linear-noise, cubic-conservative, sublinear-global, "
                                            "rough-data-chain)");
        app->add_option("--N", N, "Grid size (power of two, at least 8)");
        app->add_option("--T", T, "Final time");
        app->add_option("--dt", dt, "Time step");
        app->add_option("--seed", seed, "Seed (master seed for ensembles)");
        app->add_option("--scheme", scheme, "exp_euler or semi_implicit");
        app->add_option("--blowup-cap", blowup_cap, "Blow-up cap on the squared L2 norm");
        app->add_option("--snapshot-stride", snapshot_stride, "Keep every k-th state (0 keeps only the final one)");
        app->add_option("--lambda", lambda, "Noise colour exponent in (1/2, 1)");
        app->add_option("--K", K, "Number of forced Fourier modes");
        app->add_option("--noise-scale", scale, "Noise amplitude");
        app->add_option("--f", f, "Drift map: zero, cubic, linear");
        app->add_option("--g", g, "Noise map: zero, one, linear, sublinear, power");
        app->add_option("--C-g", C_g, "Constant of the sublinear and power noise maps");
        app->add_option("--power-h", h, "Exponent of the power noise map");
        app->add_option("--u0", u0, "Initial datum: cos, zero, rough");
        app->add_option("--outdir", outdir, "Output directory (default $CRITSPDE_OUTDIR or ./critspde_out)");
    }

    // Pulls ensemble keys out of the file so the remainder is a preset spec.
    json load(json* ensemble_keys) const {
        json j = json::object();
        if (!config.empty()) j = read_json_file(config);
        if (!j.is_object()) throw std::runtime_error("configuration must be a JSON object");
        for (const char* k : {"paths", "threads", "experiment", "outdir", "levels", "fit_hoelder"}) {
            if (!j.contains(k)) continue;
            if (!ensemble_keys) throw std::runtime_error(std::string("key '") + k + "' only applies to montecarlo");
            (*ensemble_keys)[k] = j.at(k);
            j.erase(k);
        }
        if (!preset.empty()) j["preset"] = preset;
        if (N) j["N"] = *N;
        if (T) j["T"] = *T;
        if (dt) j["dt"] = *dt;
        if (seed) j["seed"] = *seed;
        if (scheme) j["scheme"] = *scheme;
        if (blowup_cap) j["blowup_cap"] = *blowup_cap;
        if (snapshot_stride) j["snapshot_stride"] = *snapshot_stride;
        if (lambda || K || scale) {
            if (!j.contains("noise")) j["noise"] = json::object();
            if (lambda) j["noise"]["lambda"] = *lambda;
            if (K) j["noise"]["K"] = *K;
            if (scale) j["noise"]["scale"] = *scale;
        }
        if (f) j["f"] = *f;
        if (g) j["g"] = *g;
        if (C_g) j["C_g"] = *C_g;
        if (h) j["h"] = *h;
        if (u0) j["u0"] = *u0;
        return j;
    }

    std::string resolve_outdir(const json& ensemble_keys) const {
        if (!outdir.empty()) return outdir;
        if (ensemble_keys.contains("outdir")) return ensemble_keys.at("outdir").get<std::string>();
        return default_outdir();
    }
};

Preset build_preset(const json& spec) {
    try {
        return preset_from_json(spec);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("bad configuration: ") + e.what());
    }
}

int cmd_calc(const std::string& file, const std::string& format) {
    const json spec = read_json_file(file);
    const CalcInput in = parse_calc_input(spec);
    const json report = criticality_report(in);
    if (format != "json") std::cout << render_report_table(report);
    if (format != "table") std::cout << report.dump(2) << "\n";
    return report.at("window_ok").get<bool>() ? exit_ok : exit_check_failed;
}

struct PlanFlags {
    std::string variant = "l2_start";
    std::string preset;
    std::string config;
    std::string eps = "1/5", r_hat, zeta, nu = "1", s = "0.2", q = "5/2", p = "4";
    bool as_json = false;
};

int cmd_plan(PlanFlags pf) {
    if (!pf.config.empty()) {
        json j = read_json_file(pf.config);
        if (!j.is_object()) throw std::runtime_error("chain spec must be a JSON object");
        for (auto it = j.begin(); it != j.end(); ++it) {
            const auto& k = it.key();
            const auto v = it->is_string() ? it->get<std::string>() : it->dump();
            if (k == "variant") pf.variant = v;
            else if (k == "eps") pf.eps = v;
            else if (k == "r_hat") pf.r_hat = v;
            else if (k == "zeta") pf.zeta = v;
            else if (k == "nu") pf.nu = v;
            else if (k == "s") pf.s = v;
            else if (k == "q") pf.q = v;
            else if (k == "p") pf.p = v;
            else throw std::runtime_error("unknown chain spec key '" + k + "'");
        }
    }
    if (!pf.preset.empty()) {
        if (pf.preset != "rough-data-chain") throw std::runtime_error("plan only knows the rough-data-chain preset");
        pf.variant = "rough";
    }
    BootstrapChain ch;
    if (pf.variant == "l2_start") {
        L2ChainOptions o;
        o.eps = parse_q(pf.eps);
        if (!pf.r_hat.empty()) o.r_hat = parse_q(pf.r_hat);
        if (!pf.zeta.empty()) o.zeta = parse_q(pf.zeta);
        o.nu = parse_q(pf.nu);
        ch = full_chain_l2(o);
    } else if (pf.variant == "rough") {
        RoughChainOptions o;
        o.s = parse_q(pf.s);
        o.q = parse_q(pf.q);
        o.p = parse_q(pf.p);
        if (!pf.r_hat.empty()) o.r_hat = parse_q(pf.r_hat);
        if (!pf.zeta.empty()) o.zeta = parse_q(pf.zeta);
        o.nu = parse_q(pf.nu);
        ch = full_chain_rough(o);
    } else {
        throw std::runtime_error("unknown variant '" + pf.variant + "' (expected l2_start or rough)");
    }
    if (pf.as_json) std::cout << chain_to_json(ch).dump(2) << "\n";
    else std::cout << render_chain(ch);
    return ch.ok() ? exit_ok : exit_check_failed;
}

int cmd_simulate(const SimFlags& sf) {
    const Preset p = build_preset(sf.load(nullptr));
    const auto tr = simulate_path(p.sim);
    const fs::path dir = fs::path(sf.resolve_outdir(json::object())) / "simulate";
    fs::create_directories(dir);
    write_path_csv((dir / "path_0.csv").string(), tr, p.sim.nonlinearity);
    if (p.sim.snapshot_stride > 0) write_states_csv((dir / "path_0_states.csv").string(), tr.snapshots);

    const auto pr = path_functionals(tr, p.sim, false, 0.1);
    json out = {{"status", to_string(tr.status)}, {"config", preset_to_json(p)}, {"outdir", dir.string()}};
    for (const auto& [k, v] : pr.functionals) out["functionals"][k] = v;

    int code = exit_ok;
    if (p.maps.f == "zero" && p.maps.g == "zero" && p.u0 == "cos") {
        // Without forcing the cos x mode decays exactly like e^{-t}.
        const auto& u = tr.snapshots.back();
        const auto x = grid_points(p.sim.N);
        std::vector<double> diff(x.size());
        for (size_t j = 0; j < x.size(); ++j) diff[j] = u.values[j] - std::exp(-u.t) * std::cos(x[j]);
        const double err = std::sqrt(l2_norm_sq(diff));
        const bool pass = tr.status == PathStatus::completed && err <= 1e-12;
        out["heat_decay_check"] = {{"l2_error", err}, {"tolerance", 1e-12}, {"pass", pass}};
        if (!pass) code = exit_check_failed;
    }
    std::cout << out.dump(2) << "\n";
    return code;
}

struct McFlags {
    std::optional<int> paths, threads, levels;
    std::optional<std::string> experiment;
    std::optional<double> global_h;
};

int cmd_montecarlo(const SimFlags& sf, const McFlags& mf) {
    json ek = json::object();
    const Preset p = build_preset(sf.load(&ek));
    EnsembleConfig e;
    e.base = p;
    try {
        e.n_paths = mf.paths ? *mf.paths : ek.value("paths", 100);
        e.threads = mf.threads ? *mf.threads : ek.value("threads", 1);
        e.experiment = mf.experiment ? *mf.experiment : ek.value("experiment", std::string("run"));
        e.fit_hoelder = ek.value("fit_hoelder", false);
    } catch (const json::exception& ex) {
        throw std::runtime_error(std::string("bad ensemble key: ") + ex.what());
    }
    if (e.n_paths < 1 || e.threads < 1) throw std::runtime_error("paths and threads must be positive");
    e.outdir = sf.resolve_outdir(ek);
    const int levels = mf.levels ? *mf.levels : ek.value("levels", 3);

    json report;
    int code = exit_ok;
    if (e.experiment == "run") {
        report = stats_to_json(mc_run(e));
    } else if (e.experiment == "energy") {
        auto r = experiment_energy(e);
        report = to_json(r);
        if (r.invalidated || !r.stable) code = exit_check_failed;
    } else if (e.experiment == "global") {
        const double h = mf.global_h ? *mf.global_h : p.maps.h;
        report = to_json(experiment_global(h, e));
    } else if (e.experiment == "regularity") {
        report = to_json(experiment_regularity(e));
    } else if (e.experiment == "convergence") {
        e.outdir.clear();
        report = to_json(convergence_study(e, levels));
    } else {
        throw std::runtime_error("unknown experiment '" + e.experiment +
                         "' (expected run, energy, global, regularity, convergence)");
    }
    if (e.experiment != "run") {
        const fs::path dir = fs::path(sf.resolve_outdir(ek)) / e.experiment;
        fs::create_directories(dir);
        std::ofstream(dir / "report.json") << report.dump(2) << "\n";
    }
    std::cout << report.dump(2) << "\n";
    return code;
}

int cmd_verify(const std::string& suite, int threads) {
    std::vector<std::string> names;
    if (suite == "all") names = suite_names();
    else {
        bool known = false;
        for (const auto& n : suite_names()) known = known || n == suite;
        if (!known) throw std::runtime_error("unknown suite '" + suite + "'");
        names.push_back(suite);
    }
    VerifyOptions opt;
    opt.threads = threads;
    int failed = 0;
    for (const auto& n : names) {
        auto r = run_suite(n, opt);
        std::cout << format_result(r) << std::endl;
        if (!r.pass) ++failed;
    }
    return failed == 0 ? exit_ok : exit_check_failed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Critical-space exponent calculus and stochastic PDE simulator on the torus"};
    app.require_subcommand(1);

    std::string calc_file, calc_format = "both";
    auto* calc = app.add_subcommand("calc", "Criticality report for a growth specification");
    calc->add_option("spec", calc_file, "JSON specification")->required();
    calc->add_option("--format", calc_format, "table, json or both")->check(CLI::IsMember({"table", "json", "both"}));

    PlanFlags pf;
    auto* plan = app.add_subcommand("plan", "Plan and check a bootstrap chain");
    plan->add_option("--variant", pf.variant, "l2_start or rough")->check(CLI::IsMember({"l2_start", "rough"}));
    plan->add_option("--preset", pf.preset, "rough-data-chain selects the rough variant");
    plan->add_option("--config", pf.config, "JSON chain spec")->check(CLI::ExistingFile);
    plan->add_option("--eps", pf.eps, "Epsilon of the L2 chain (rational)");
    plan->add_option("--r-hat", pf.r_hat, "Final time integrability");
    plan->add_option("--zeta", pf.zeta, "Final space integrability");
    plan->add_option("--nu", pf.nu, "Noise derivative exponent");
    plan->add_option("--s", pf.s, "Rough chain: data smoothness deficit");
    plan->add_option("--q", pf.q, "Rough chain: data integrability");
    plan->add_option("--p", pf.p, "Rough chain: time integrability");
    plan->add_flag("--json", pf.as_json, "Print the chain as JSON");

    SimFlags sim_flags;
    auto* simulate = app.add_subcommand("simulate", "Simulate one path");
    sim_flags.attach(simulate);

    SimFlags mc_sim_flags;
    McFlags mf;
    auto* montecarlo = app.add_subcommand("montecarlo", "Run an ensemble or an experiment");
    mc_sim_flags.attach(montecarlo);
    montecarlo->add_option("--paths", mf.paths, "Number of paths");
    montecarlo->add_option("--threads", mf.threads, "Worker threads");
    montecarlo->add_option("--experiment", mf.experiment, "run, energy, global, regularity or convergence");
    montecarlo->add_option("--levels", mf.levels, "Refinement levels of the convergence study (at least 3)");
    montecarlo->add_option("--global-h", mf.global_h, "Exponent h of the global-existence experiment");

    std::string suite;
    int verify_threads = 0;
    auto* verify = app.add_subcommand("verify", "Run an acceptance suite or all of them");
    verify->add_option("suite", suite, "Suite name or all")->required();
    verify->add_option("--threads", verify_threads, "Worker threads for ensemble suites (default: all cores)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*calc) return cmd_calc(calc_file, calc_format);
        if (*plan) return cmd_plan(pf);
        if (*simulate) return cmd_simulate(sim_flags);
        if (*montecarlo) return cmd_montecarlo(mc_sim_flags, mf);
        if (*verify) return cmd_verify(suite, verify_threads);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    }
    return exit_usage;
}
