#pragma once

#include "critspde/monitors.hpp"
#include "critspde/presets.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace critspde {

struct EnsembleConfig {
    Preset base;          // base.sim.seed is the master seed
    int n_paths = 1;
    int threads = 1;
    std::string experiment = "run";
    std::string outdir;   // empty disables persistence
    bool fit_hoelder = false;
    double hoelder_t0_fraction = 0.1;
};

struct FunctionalStats {
    double mean = 0.0;
    double variance = 0.0;
    std::optional<double> ci_low;  // absent ("wide") when fewer than 30 paths
    std::optional<double> ci_high;
};

struct PathResult {
    std::uint64_t seed = 0;
    PathStatus status = PathStatus::completed;
    std::map<std::string, double> functionals;
};

struct EnsembleStats {
    std::string experiment;
    std::uint64_t master_seed = 0;
    int n_paths = 0;
    double survival = 0.0;
    std::map<std::string, FunctionalStats> functionals;
    std::vector<std::uint64_t> seeds;
    std::vector<PathResult> paths;
    nlohmann::json config;  // preset_to_json of the base configuration
};

// Per-path scalar functionals: sigma_hat, survived, energy0, sup_energy,
// dissipation, sup_energy_identity, final_energy, ito_residual,
// mode1_second_moment and, when requested, theta_time, theta_space, r2_time
// and r2_space.
PathResult path_functionals(const Trajectory& tr, const SimConfig& cfg, bool fit_hoelder, double t0_fraction);

// Runs the ensemble on cfg.threads workers; the reduction is a fold in path
// index order so the result does not depend on the thread count.
EnsembleStats mc_run(const EnsembleConfig& cfg);

FunctionalStats fold_stats(const std::vector<double>& samples);

nlohmann::json stats_to_json(const EnsembleStats& s);
std::string summary_text(const EnsembleStats& s);  // the bytes written to summary.json

// Persistence layout: <outdir>/<experiment>/path_<i>.csv (+ path_<i>_states.csv)
// and summary.json.
void write_path_csv(const std::string& file, const Trajectory& tr, const NonlinearitySpec& nl);
void write_states_csv(const std::string& file, const std::vector<TorusState>& states);
std::vector<TorusState> read_states_csv(const std::string& file);
void write_summary(const std::string& dir, const std::string& text);

struct EnergyReport {
    double C_hat = 0.0;          // (E sup ||u||^2 + E int ||u_x||^2) / (1 + E ||u0||^2)
    double C_hat_refined = 0.0;  // same with dt halved on the same Brownian paths
    double C_hat_identity = 0.0; // E sup_t (||u(t)||^2 + 2 int_0^t ||u_x||^2) / (1 + E ||u0||^2)
    double relative_change = 0.0;
    bool stable = false;         // relative change at most 10 percent
    double survival = 0.0;
    bool invalidated = false;    // some path blew up
    EnsembleStats coarse;
    EnsembleStats fine;
};
EnergyReport experiment_energy(const EnsembleConfig& cfg);

struct GlobalReport {
    double h = 1.0;
    double survival = 0.0;
    int n_paths = 0;
    EnsembleStats stats;
};
// Noise g(y) = C_g |y|^h with the base drift.
GlobalReport experiment_global(double h, const EnsembleConfig& cfg);

struct RegularityReport {
    double median_theta_time = 0.0;
    double median_theta_space = 0.0;
    std::vector<HoelderFit> fits;
    EnsembleStats stats;
};
RegularityReport experiment_regularity(const EnsembleConfig& cfg);

struct ConvergenceReport {
    std::vector<double> dts;
    std::vector<double> strong_errors;  // RMS over paths of the L^2 error at T
    double strong_order = 0.0;
    std::vector<int> Ns;
    std::vector<double> spatial_errors;
    std::vector<double> spatial_ratios;  // error(N) / error(2N)
    bool spectral = false;               // every ratio above round-off is at least 10
};
// Temporal refinement with common noise against a reference at a quarter of
// the finest step, plus N doubling on the deterministic part of the problem.
ConvergenceReport convergence_study(const EnsembleConfig& cfg, int levels);

nlohmann::json to_json(const EnergyReport& r);
nlohmann::json to_json(const GlobalReport& r);
nlohmann::json to_json(const RegularityReport& r);
nlohmann::json to_json(const ConvergenceReport& r);

}  // namespace critspde
