#include "critspde/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace critspde {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, r.ptr);
}

double median_of(std::vector<double> v) {
    if (v.empty()) return NAN;
    std::sort(v.begin(), v.end());
    size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean_of(const EnsembleStats& s, const std::string& name) { return s.functionals.at(name).mean; }

double l2_distance(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> d(a.size());
    for (size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    return std::sqrt(l2_norm_sq(d));
}

json stats_json(const FunctionalStats& f) {
    json j = {{"mean", f.mean}, {"variance", f.variance}};
    if (f.ci_low) j["ci95"] = {*f.ci_low, *f.ci_high};
    else j["ci95"] = "wide";
    return j;
}

}  // namespace

FunctionalStats fold_stats(const std::vector<double>& samples) {
    FunctionalStats s;
    const size_t n = samples.size();
    if (n == 0) return s;
    double sum = 0.0;
    for (double v : samples) sum += v;
    s.mean = sum / n;
    if (n > 1) {
        double ss = 0.0;
        for (double v : samples) ss += (v - s.mean) * (v - s.mean);
        s.variance = ss / (n - 1);
    }
    if (n >= 30) {
        double half = 1.96 * std::sqrt(s.variance / n);
        s.ci_low = s.mean - half;
        s.ci_high = s.mean + half;
    }
    return s;
}

PathResult path_functionals(const Trajectory& tr, const SimConfig& cfg, bool fit_hoelder, double t0_fraction) {
    PathResult r;
    r.seed = cfg.seed;
    r.status = tr.status;
    auto& f = r.functionals;
    f["sigma_hat"] = tr.sigma_hat;
    f["survived"] = tr.status == PathStatus::completed ? 1.0 : 0.0;
    f["energy0"] = tr.energy0;
    f["sup_energy"] = tr.sup_energy;
    f["dissipation"] = tr.dissipation;
    f["final_energy"] = tr.final_energy;
    double ident = tr.energy0;
    for (const auto& m : tr.monitors) ident = std::max(ident, m.energy + 2 * m.dissipation);
    f["sup_energy_identity"] = ident;
    auto res = ito_energy_residual(tr, cfg.nonlinearity);
    f["ito_residual"] = res.empty() ? 0.0 : res.back();

    SpectralWorkspace ws(cfg.N);
    std::vector<cplx> c;
    ws.forward(tr.snapshots.back().values, c);
    double cc = 2 * std::sqrt(M_PI) * c[1].real(), ss = -2 * std::sqrt(M_PI) * c[1].imag();
    f["mode1_second_moment"] = 0.5 * (cc * cc + ss * ss);

    if (fit_hoelder) {
        if (tr.status != PathStatus::completed) {
            f["theta_time"] = f["theta_space"] = f["r2_time"] = f["r2_space"] = NAN;
        } else {
            auto h = hoelder_estimate(tr.snapshots, t0_fraction * cfg.T);
            f["theta_time"] = h.theta_time;
            f["theta_space"] = h.theta_space;
            f["r2_time"] = h.r2_time;
            f["r2_space"] = h.r2_space;
        }
    }
    return r;
}

EnsembleStats mc_run(const EnsembleConfig& cfg) {
    if (cfg.n_paths < 1) throw std::runtime_error("harness.mc_run: n_paths must be >= 1");
    if (cfg.threads < 1) throw std::runtime_error("harness.mc_run: threads must be >= 1");
    if (cfg.fit_hoelder && cfg.base.sim.snapshot_stride != 1)
        throw std::runtime_error("harness.mc_run: Hoelder fits need snapshot_stride = 1");
    validate_config(cfg.base.sim);

    fs::path dir;
    if (!cfg.outdir.empty()) {
        dir = fs::path(cfg.outdir) / cfg.experiment;
        fs::create_directories(dir);
    }

    std::vector<PathResult> results(cfg.n_paths);
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&]() {
        for (int i = next++; i < cfg.n_paths; i = next++) {
            try {
                SimConfig sim = cfg.base.sim;
                sim.seed = path_seed(cfg.base.sim.seed, static_cast<std::uint64_t>(i));
                auto tr = simulate_path(sim);
                results[i] = path_functionals(tr, sim, cfg.fit_hoelder, cfg.hoelder_t0_fraction);
                if (!dir.empty()) {
                    auto stem = dir / ("path_" + std::to_string(i));
                    write_path_csv(stem.string() + ".csv", tr, sim.nonlinearity);
                    if (sim.snapshot_stride > 0) write_states_csv(stem.string() + "_states.csv", tr.snapshots);
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const int nt = std::min(cfg.threads, cfg.n_paths);
    if (nt == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    EnsembleStats s;
    s.experiment = cfg.experiment;
    s.master_seed = cfg.base.sim.seed;
    s.n_paths = cfg.n_paths;
    s.config = preset_to_json(cfg.base);
    std::map<std::string, std::vector<double>> samples;
    double survived = 0.0;
    for (const auto& r : results) {
        s.seeds.push_back(r.seed);
        if (r.status == PathStatus::completed) survived += 1.0;
        for (const auto& [k, v] : r.functionals) samples[k].push_back(v);
    }
    s.survival = survived / cfg.n_paths;
    for (const auto& [k, v] : samples) s.functionals[k] = fold_stats(v);
    s.paths = std::move(results);

    if (!dir.empty()) write_summary(dir.string(), summary_text(s));
    return s;
}

json stats_to_json(const EnsembleStats& s) {
    json f = json::object();
    for (const auto& [k, v] : s.functionals) f[k] = stats_json(v);
    return {{"schema_version", 1},
            {"experiment", s.experiment},
            {"master_seed", s.master_seed},
            {"n_paths", s.n_paths},
            {"survival", s.survival},
            {"config", s.config},
            {"functionals", f},
            {"seeds", s.seeds}};
}

std::string summary_text(const EnsembleStats& s) { return stats_to_json(s).dump(2) + "\n"; }

void write_summary(const std::string& dir, const std::string& text) {
    std::ofstream out(fs::path(dir) / "summary.json");
    if (!out) throw std::runtime_error("harness.write_summary: cannot open summary.json in " + dir);
    out << text;
    if (!out) throw std::runtime_error("harness.write_summary: write failed");
}

void write_path_csv(const std::string& file, const Trajectory& tr, const NonlinearitySpec& nl) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("harness.write_path_csv: cannot open " + file);
    auto res = ito_energy_residual(tr, nl);
    out << "t,energy,dissipation,drift,hs,noise,sup,ito_residual\n";
    for (size_t i = 0; i < tr.monitors.size(); ++i) {
        const auto& m = tr.monitors[i];
        out << fmt(m.t) << ',' << fmt(m.energy) << ',' << fmt(m.dissipation) << ',' << fmt(m.drift) << ','
            << fmt(m.hs) << ',' << fmt(m.noise) << ',' << fmt(m.sup) << ',' << fmt(res[i]) << '\n';
    }
    if (!out) throw std::runtime_error("harness.write_path_csv: write failed for " + file);
}

void write_states_csv(const std::string& file, const std::vector<TorusState>& states) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("harness.write_states_csv: cannot open " + file);
    if (states.empty()) return;
    out << 't';
    for (size_t j = 0; j < states.front().values.size(); ++j) out << ",u_" << j;
    out << '\n';
    for (const auto& s : states) {
        out << fmt(s.t);
        for (double v : s.values) out << ',' << fmt(v);
        out << '\n';
    }
    if (!out) throw std::runtime_error("harness.write_states_csv: write failed for " + file);
}

std::vector<TorusState> read_states_csv(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("harness.read_states_csv: cannot open " + file);
    std::string line;
    std::getline(in, line);  // header
    std::vector<TorusState> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        const char* p = line.data();
        const char* end = p + line.size();
        while (p < end) {
            double v;
            auto r = std::from_chars(p, end, v);
            if (r.ec != std::errc()) throw std::runtime_error("harness.read_states_csv: malformed number in " + file);
            row.push_back(v);
            p = r.ptr;
            if (p < end && *p == ',') ++p;
        }
        if (row.empty()) continue;
        out.push_back(TorusState{row.front(), std::vector<double>(row.begin() + 1, row.end())});
    }
    return out;
}

EnergyReport experiment_energy(const EnsembleConfig& cfg) {
    EnergyReport r;
    EnsembleConfig coarse = cfg, fine = cfg;
    coarse.experiment = cfg.experiment == "run" ? "energy" : cfg.experiment;
    fine.experiment = coarse.experiment + "_refined";
    coarse.base.sim.noise_substeps = 2;
    fine.base.sim.dt = cfg.base.sim.dt / 2;
    fine.base.sim.noise_substeps = 1;
    r.coarse = mc_run(coarse);
    r.fine = mc_run(fine);

    auto constant = [](const EnsembleStats& s) {
        return (mean_of(s, "sup_energy") + mean_of(s, "dissipation")) / (1 + mean_of(s, "energy0"));
    };
    r.C_hat = constant(r.coarse);
    r.C_hat_refined = constant(r.fine);
    r.C_hat_identity = mean_of(r.coarse, "sup_energy_identity") / (1 + mean_of(r.coarse, "energy0"));
    r.relative_change = std::abs(r.C_hat_refined - r.C_hat) / std::abs(r.C_hat);
    r.stable = std::isfinite(r.C_hat) && r.relative_change <= 0.10;
    r.survival = std::min(r.coarse.survival, r.fine.survival);
    r.invalidated = r.survival < 1.0;
    return r;
}

GlobalReport experiment_global(double h, const EnsembleConfig& cfg) {
    EnsembleConfig e = cfg;
    e.base.maps.g = "power";
    e.base.maps.h = h;
    e.base.sim.nonlinearity = build_nonlinearity(e.base.maps);
    if (e.experiment == "run") e.experiment = "global";
    GlobalReport r;
    r.h = h;
    r.stats = mc_run(e);
    r.survival = r.stats.survival;
    r.n_paths = r.stats.n_paths;
    return r;
}

RegularityReport experiment_regularity(const EnsembleConfig& cfg) {
    EnsembleConfig e = cfg;
    e.base.sim.snapshot_stride = 1;
    e.fit_hoelder = true;
    if (e.experiment == "run") e.experiment = "regularity";
    RegularityReport r;
    r.stats = mc_run(e);
    std::vector<double> tt, ts;
    for (const auto& p : r.stats.paths) {
        HoelderFit f;
        f.theta_time = p.functionals.at("theta_time");
        f.theta_space = p.functionals.at("theta_space");
        f.r2_time = p.functionals.at("r2_time");
        f.r2_space = p.functionals.at("r2_space");
        f.t0 = e.hoelder_t0_fraction * e.base.sim.T;
        f.T = e.base.sim.T;
        r.fits.push_back(f);
        if (std::isfinite(f.theta_time)) tt.push_back(f.theta_time);
        if (std::isfinite(f.theta_space)) ts.push_back(f.theta_space);
    }
    r.median_theta_time = median_of(tt);
    r.median_theta_space = median_of(ts);
    return r;
}

ConvergenceReport convergence_study(const EnsembleConfig& cfg, int levels) {
    if (levels < 3) throw std::runtime_error("harness.convergence_study: levels must be >= 3");
    const SimConfig& base = cfg.base.sim;
    validate_config(base);
    ConvergenceReport r;
    for (int l = 0; l < levels; ++l) r.dts.push_back(base.dt / (1 << l));
    const double dt_ref = r.dts.back() / 4;

    std::vector<double> sq(levels, 0.0);
    for (int i = 0; i < cfg.n_paths; ++i) {
        SimConfig ref = base;
        ref.seed = path_seed(base.seed, static_cast<std::uint64_t>(i));
        ref.snapshot_stride = 0;
        ref.dt = dt_ref;
        ref.noise_substeps = 1;
        auto tref = simulate_path(ref);
        if (tref.status != PathStatus::completed)
            throw std::runtime_error("harness.convergence_study: reference path blew up");
        for (int l = 0; l < levels; ++l) {
            SimConfig c = ref;
            c.dt = r.dts[l];
            c.noise_substeps = 4 << (levels - 1 - l);
            auto tr = simulate_path(c);
            if (tr.status != PathStatus::completed)
                throw std::runtime_error("harness.convergence_study: refinement path blew up");
            double e = l2_distance(tr.snapshots.back().values, tref.snapshots.back().values);
            sq[l] += e * e;
        }
    }
    std::vector<double> lx, ly;
    for (int l = 0; l < levels; ++l) {
        r.strong_errors.push_back(std::sqrt(sq[l] / cfg.n_paths));
        if (r.strong_errors.back() > 0) {
            lx.push_back(std::log(r.dts[l]));
            ly.push_back(std::log(r.strong_errors.back()));
        }
    }
    if (lx.size() >= 2) {
        double mx = 0, my = 0;
        for (size_t i = 0; i < lx.size(); ++i) mx += lx[i], my += ly[i];
        mx /= lx.size();
        my /= ly.size();
        double sxx = 0, sxy = 0;
        for (size_t i = 0; i < lx.size(); ++i) sxx += (lx[i] - mx) * (lx[i] - mx), sxy += (lx[i] - mx) * (ly[i] - my);
        r.strong_order = sxy / sxx;
    } else {
        r.strong_order = INFINITY;
    }

    // spectral accuracy on the deterministic part
    if (base.u0) {
        const int Nref = 256;
        auto run = [&](int N) {
            SimConfig c = base;
            c.N = N;
            c.nonlinearity.g = nullptr;
            c.noise.K = 0;
            c.snapshot_stride = 0;
            auto tr = simulate_path(c);
            if (tr.status != PathStatus::completed)
                throw std::runtime_error("harness.convergence_study: deterministic path blew up");
            return tr.snapshots.back().values;
        };
        auto ref = run(Nref);
        for (int N = 8; N < Nref; N *= 2) {
            auto v = run(N);
            std::vector<double> sub(N);
            for (int j = 0; j < N; ++j) sub[j] = ref[j * (Nref / N)];
            r.Ns.push_back(N);
            r.spatial_errors.push_back(l2_distance(v, sub));
        }
        r.spectral = true;
        for (size_t i = 0; i + 1 < r.spatial_errors.size(); ++i) {
            double ratio = r.spatial_errors[i] / r.spatial_errors[i + 1];
            r.spatial_ratios.push_back(ratio);
            if (r.spatial_errors[i + 1] > 1e-12 && ratio < 10) r.spectral = false;
        }
    }
    return r;
}

json to_json(const EnergyReport& r) {
    return {{"C_hat", r.C_hat},
            {"C_hat_refined", r.C_hat_refined},
            {"C_hat_identity", r.C_hat_identity},
            {"relative_change", r.relative_change},
            {"stable", r.stable},
            {"survival", r.survival},
            {"invalidated", r.invalidated},
            {"coarse", stats_to_json(r.coarse)},
            {"fine", stats_to_json(r.fine)}};
}

json to_json(const GlobalReport& r) {
    return {{"h", r.h}, {"survival", r.survival}, {"n_paths", r.n_paths}, {"stats", stats_to_json(r.stats)}};
}

json to_json(const RegularityReport& r) {
    json fits = json::array();
    for (const auto& f : r.fits)
        fits.push_back({{"theta_time", f.theta_time},
                        {"theta_space", f.theta_space},
                        {"r2_time", f.r2_time},
                        {"r2_space", f.r2_space},
                        {"t0", f.t0},
                        {"T", f.T}});
    return {{"median_theta_time", r.median_theta_time},
            {"median_theta_space", r.median_theta_space},
            {"fits", fits},
            {"stats", stats_to_json(r.stats)}};
}

json to_json(const ConvergenceReport& r) {
    return {{"dts", r.dts},
            {"strong_errors", r.strong_errors},
            {"strong_order", r.strong_order},
            {"Ns", r.Ns},
            {"spatial_errors", r.spatial_errors},
            {"spatial_ratios", r.spatial_ratios},
            {"spectral", r.spectral}};
}

}  // namespace critspde
