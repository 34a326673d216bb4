#include "critspde/verify.hpp"

#include "critspde/bootstrap_planner.hpp"
#include "critspde/harness.hpp"
#include "critspde/param_calculus.hpp"
#include "critspde/weighted_spaces.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace critspde {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int worker_count(const VerifyOptions& opt) {
    if (opt.threads > 0) return opt.threads;
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

std::string fmt(double x, int prec = 4) {
    std::ostringstream os;
    os << std::setprecision(prec) << x;
    return os.str();
}

// Each suite fills pass/detail; the caller handles timing and exceptions.
using Suite = std::function<void(SuiteResult&, const VerifyOptions&)>;

GrowthSpec single_term(const Q& rho, const Q& phi, const Q& beta) {
    GrowthSpec g;
    g.f_terms.push_back({rho, phi, beta});
    return g;
}

void suite_exponents(SuiteResult& r, const VerifyOptions&) {
    const auto t0 = Clock::now();
    Setting s{SobolevScale{-1, 1, 2}, 2, 0};
    auto rs = rho_star_and_x_exponents(single_term(2, Q(2, 3), Q(2, 3)), s);
    const double dt = since(t0);
    const auto& t = rs.at(0);
    bool ok = t.rho_star == 2 && t.r == Q(3) && t.r_conj == Q(3, 2) && !t.x_entries.empty();
    for (const auto& x : t.x_entries) ok = ok && x.time_exponent == 6 && x.space_smoothness == Q(1, 3) && x.space_q == 2;
    r.pass = ok && dt < 1e-3;
    std::ostringstream os;
    os << "rho* = " << to_string(t.rho_star) << ", r = " << (t.r ? to_string(*t.r) : "inf")
       << ", r' = " << (t.r_conj ? to_string(*t.r_conj) : "inf");
    if (!t.x_entries.empty())
        os << ", X = L^" << to_string(t.x_entries[0].time_exponent) << "(H^{"
           << to_string(t.x_entries[0].space_smoothness) << "})";
    os << ", " << fmt(dt * 1e6, 3) << " us (limit 1 ms)";
    r.detail = os.str();
}

void suite_critical_weight(SuiteResult& r, const VerifyOptions&) {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> pick(1, 997);
    int checked = 0, bad = 0;
    while (checked < 1000) {
        const Q s(pick(rng) % 331 + 1, 1000);  // (0, 1/3)
        const Q q_hi = 2 / (1 - 2 * s);
        const Q q = 2 + (q_hi - 2) * Q(pick(rng), 998);
        const Q p_min = 1 / ((3 - 2 * s) / 4 - 1 / (2 * q));
        const Q p = p_min * (1 + Q(pick(rng) % 400, 100));
        OneDParams v;
        v.variant = OneDVariant::rough;
        v.s = s;
        v.q = q;
        const auto g = one_d_growth_params(v, 1);
        const auto cw = critical_weight(g.growth, p);
        const Q expected = -1 + (p / 2) * (Q(3, 2) - s - 1 / q);
        ++checked;
        if (!cw.kappa || *cw.kappa != expected) {
            ++bad;
            continue;
        }
        const auto tr = trace_space(Setting{g.scale, p, *cw.kappa});
        if (tr.smoothness != 1 / q - Q(1, 2) || tr.q != q || tr.p != p) ++bad;
    }
    const double dt = since(t0);
    r.pass = bad == 0 && dt < 1.0;
    r.detail = std::to_string(checked - bad) + "/" + std::to_string(checked) + " exact matches, " + fmt(dt, 3) +
               " s (limit 1 s)";
}

void suite_identities(SuiteResult& r, const VerifyOptions&) {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> den(2, 40);
    int checked = 0, bad = 0;
    while (checked < 10000) {
        const Q p(den(rng) + 2, 1 + den(rng) % 3);
        if (p <= 2) continue;
        const Q kappa = Q(den(rng) % 7, 7) * (p / 2 - 1);
        const Q c = (1 + kappa) / p;
        const Q phi = 1 - c + c * Q(1 + den(rng) % 38, 40);
        const Q beta = 1 - c + (phi - 1 + c) * Q(1 + den(rng) % 39, 40);
        const Q rho(den(rng) % 9, 1 + den(rng) % 4);
        const Setting s{SobolevScale{-1, 1, 2}, p, kappa};
        const auto g = single_term(rho, phi, beta);
        ++checked;
        try {
            const auto st = star_params(g, s).at(0);
            const auto rs = rho_star_and_x_exponents(g, s).at(0);
            const bool ok = st.xi_inv + st.xi_conj_inv == 1 &&
                            st.rho_eff * (st.phi_star - 1 + c) + st.beta_star == 1 &&
                            rs.r_inv + rs.r_conj_inv == 1;
            if (!ok) ++bad;
        } catch (const std::exception&) {
            ++bad;
        }
    }
    r.pass = bad == 0;
    r.detail = std::to_string(checked - bad) + "/" + std::to_string(checked) +
               " inputs satisfy the r, xi conjugacy and star identities";
}

void suite_interpolation(SuiteResult& r, const VerifyOptions&) {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> u(1, 999);
    int checked = 0, bad = 0;
    while (checked < 10000) {
        const Q p = 2 + Q(u(rng), 100);
        const Q kappa = (p / 2 - 1) * Q(u(rng) % 10, 10);
        const Q c = (1 + kappa) / p;
        const Q psi = 1 - c + c * Q(u(rng), 1000);
        ++checked;
        try {
            const auto ie = interpolation_exponents(psi, p, kappa);
            if (ie.zeta * (psi - 1 + c) != 1 + kappa || !ie.inequality_holds) ++bad;
        } catch (const std::exception&) {
            ++bad;
        }
    }
    const auto ie = interpolation_exponents(parse_q("0.9"), 4, 1);
    const double delta = ie.delta.convert_to<double>(), zeta = ie.zeta.convert_to<double>(),
                 theta = ie.theta0.convert_to<double>();
    const auto coarse = check_monomial_interpolation(0.9, 4, 1, delta, zeta, theta, 64);
    const auto fine = check_monomial_interpolation(0.9, 4, 1, delta, zeta, theta, 128);
    const double change = std::abs(fine.max_ratio / coarse.max_ratio - 1);
    const bool numeric_ok = coarse.ratios.size() == 10 && std::isfinite(coarse.max_ratio) &&
                            std::isfinite(fine.max_ratio) && change <= 0.10;
    r.pass = bad == 0 && numeric_ok;
    r.detail = std::to_string(checked - bad) + "/" + std::to_string(checked) +
               " exact; monomial constant " + fmt(coarse.max_ratio) + " -> " + fmt(fine.max_ratio) + " (change " +
               fmt(100 * change, 3) + "%, limit 10%)";
}

const Check* find_check(const BootstrapStep& s, const std::string& name) {
    for (const auto& c : s.checks)
        if (c.name == name) return &c;
    return nullptr;
}

void suite_chain(SuiteResult& r, const VerifyOptions&) {
    const auto t0 = Clock::now();
    L2ChainOptions o;
    o.eps = Q(1, 5);
    const auto ch = full_chain_l2(o);
    const double dt = since(t0);
    std::vector<std::string> issues;
    auto need = [&](bool c, const std::string& what) {
        if (!c) issues.push_back(what);
    };
    need(ch.ok(), "some check failed");
    need(ch.steps.size() == 4, "expected four steps");
    if (ch.steps.size() == 4) {
        const auto& a = ch.steps[0];
        const auto* dw = find_check(a, "delta_window");
        need(a.tag == "2a" && a.to.p == 6, "step 2a must reach r = 6");
        need(dw && dw->witness.rfind("delta = 1/10 ", 0) == 0, "step 2a must use delta = 1/10");
        need(a.to.kappa == parse_q("1.4") && a.to.kappa == 2 - 3 * o.eps, "step 2a alpha must be 2 - 3 eps = 1.4");
        const auto* sl = find_check(ch.steps[1], "target_strictly_subcritical");
        need(ch.steps[1].tag == "2b" && sl && sl->pass, "step 2b target must have positive slack");
        need(ch.steps[2].tag == "2c" && ch.steps[2].emb_case == 4, "step 2c must use embedding case 4");
        const auto& d = ch.steps[3];
        need(d.tag == "4" && d.to.kappa == d.to.p / 4, "step 4 must use alpha_hat = r_hat/4");
        need(2 * d.to.kappa / d.to.p + 1 / d.to.scale.q >= Q(1, 2), "step 4 trace condition");
    }
    need(dt < 1e-2, "runtime above 10 ms");
    r.pass = issues.empty();
    std::ostringstream os;
    os << ch.steps.size() << " steps, " << fmt(dt * 1e3, 3) << " ms (limit 10 ms)";
    for (const auto& s : issues) os << "; " << s;
    r.detail = os.str();
}

void suite_heat(SuiteResult& r, const VerifyOptions&) {
    const auto t0 = Clock::now();
    const auto p = make_preset("heat");
    const auto tr = simulate_path(p.sim);
    const double dt = since(t0);
    const auto& u = tr.snapshots.back();
    const auto x = grid_points(p.sim.N);
    std::vector<double> diff(x.size());
    for (size_t j = 0; j < x.size(); ++j) diff[j] = u.values[j] - std::exp(-u.t) * std::cos(x[j]);
    const double err = std::sqrt(l2_norm_sq(diff));
    r.pass = tr.status == PathStatus::completed && std::abs(u.t - 1.0) < 1e-12 && err <= 1e-12 && dt < 0.1;
    r.detail = "L2 error " + fmt(err, 3) + " (limit 1e-12) at t = " + fmt(u.t, 6) + ", " + fmt(dt * 1e3, 3) +
               " ms (limit 100 ms)";
}

void suite_noise(SuiteResult& r, const VerifyOptions& opt) {
    const auto t0 = Clock::now();
    EnsembleConfig e;
    e.base = make_preset("linear-noise");
    e.n_paths = 400;
    e.threads = worker_count(opt);
    auto st = mc_run(e);
    const double dt = since(t0);
    const auto& m = st.functionals.at("mode1_second_moment");
    const double sigma1 = e.base.sim.noise.sigma(1);
    const double oracle = sigma1 * sigma1 * (1 - std::exp(-2 * e.base.sim.T)) / 2;
    const double se = std::sqrt(m.variance / st.n_paths);
    const double z = std::abs(m.mean - oracle) / se;
    r.pass = st.survival == 1.0 && z <= 3.0 && dt < 60.0;
    r.detail = "mode-1 moment " + fmt(m.mean) + " vs " + fmt(oracle) + " (" + fmt(z, 3) + " SE, limit 3), " +
               fmt(dt, 3) + " s";
}

void suite_energy(SuiteResult& r, const VerifyOptions& opt) {
    const auto t0 = Clock::now();
    EnsembleConfig e;
    e.base = make_preset("sublinear-global");
    e.n_paths = 200;
    e.threads = worker_count(opt);
    const auto rep = experiment_energy(e);
    const double dt = since(t0);
    r.pass = rep.survival == 1.0 && !rep.invalidated && std::isfinite(rep.C_hat) && std::isfinite(rep.C_hat_refined) &&
             rep.stable && dt < 300.0;
    r.detail = "survival " + fmt(rep.survival) + ", C_hat " + fmt(rep.C_hat) + " -> " + fmt(rep.C_hat_refined) +
               " (change " + fmt(100 * rep.relative_change, 3) + "%, limit 10%), " + fmt(dt, 3) + " s";
}

void suite_drift(SuiteResult& r, const VerifyOptions&) {
    const int N = 128, band = N / 8;
    SpectralWorkspace ws(N);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd(0.0, 1.0);
    const auto x = grid_points(N);
    const std::vector<std::pair<std::string, PointMap>> maps = {
        {"cubic", [](double, double, double y) { return y * y * y; }},
        {"quadratic", [](double, double, double y) { return y * y; }},
        {"sine", [](double, double, double y) { return std::sin(y); }},
    };
    double worst = 0.0;
    int bad = 0;
    for (int trial = 0; trial < 100; ++trial) {
        TorusState u{0.0, std::vector<double>(N, nd(rng))};
        for (int k = 1; k <= band; ++k) {
            const double a = nd(rng) / k, b = nd(rng) / k;
            for (int j = 0; j < N; ++j) u.values[j] += a * std::cos(k * x[j]) + b * std::sin(k * x[j]);
        }
        double l4 = 0.0;
        for (double v : u.values) l4 += v * v * v * v;
        l4 *= 2 * M_PI / N;
        for (const auto& [name, f] : maps) {
            const double rel = std::abs(drift_pairing(ws, u, f)) / (1e-8 * (1 + l4));
            worst = std::max(worst, rel);
            if (!(rel <= 1.0)) ++bad;
        }
    }
    r.pass = bad == 0;
    r.detail = "300 pairings (cubic, quadratic, sine) at N = 128, band N/8; worst |pairing| / bound = " +
               fmt(worst, 3);
}

void suite_regularity(SuiteResult& r, const VerifyOptions& opt) {
    EnsembleConfig e;
    e.base = make_preset("linear-noise");
    e.n_paths = 32;
    e.threads = worker_count(opt);
    const auto rep = experiment_regularity(e);
    r.pass = rep.median_theta_time >= 0.4 && rep.median_theta_time <= 0.55 && rep.median_theta_space >= 0.8;
    r.detail = "32 paths on (0.1, 1): median theta_time " + fmt(rep.median_theta_time, 3) +
               " (band [0.4, 0.55]), median theta_space " + fmt(rep.median_theta_space, 3) + " (at least 0.8)";
}

void suite_determinism(SuiteResult& r, const VerifyOptions&) {
    std::string texts[2];
    const int threads[2] = {1, 8};
    for (int i = 0; i < 2; ++i) {
        EnsembleConfig e;
        e.base = make_preset("sublinear-global");
        e.base.sim.T = 0.25;
        e.base.sim.seed = 20240611;
        e.n_paths = 24;
        e.threads = threads[i];
        e.fit_hoelder = true;
        e.base.sim.snapshot_stride = 1;
        texts[i] = summary_text(mc_run(e));
    }
    r.pass = texts[0] == texts[1];
    r.detail = "24-path summaries (" + std::to_string(texts[0].size()) + " bytes) at 1 and 8 threads " +
               (r.pass ? "are identical" : "differ");
}

void suite_decision_trees(SuiteResult& r, const VerifyOptions&) {
    int bad = 0;
    for (int m = 0; m < 16; ++m) {
        const bool semi = m & 1, crit = m & 2, sup = m & 4, lp = m & 8;
        const auto c = criterion_select(semi, crit, sup, lp);
        std::string want;
        if (!semi) want = !crit ? "blow_up_non_critical" : (lp ? "blow_up_lp_critical" : "blow_up_nonlinearity_functional");
        else want = !sup ? "semilinear_functional_or_serrin" : (!crit ? "semilinear_non_critical" : "semilinear_lp_critical");
        if (c.id != want) ++bad;
    }
    r.pass = bad == 0;
    r.detail = std::to_string(16 - bad) + "/16 flag combinations select the expected clause";
}

struct Entry {
    const char* name;
    Suite run;
};

const std::vector<Entry>& registry() {
    static const std::vector<Entry> r = {
        {"exponents", suite_exponents},   {"critical-weight", suite_critical_weight},
        {"identities", suite_identities}, {"interpolation", suite_interpolation},
        {"chain", suite_chain},           {"heat", suite_heat},
        {"noise", suite_noise},           {"energy", suite_energy},
        {"drift", suite_drift},           {"regularity", suite_regularity},
        {"determinism", suite_determinism}, {"decision-trees", suite_decision_trees},
    };
    return r;
}

}  // namespace

std::vector<std::string> suite_names() {
    std::vector<std::string> out;
    for (const auto& e : registry()) out.push_back(e.name);
    return out;
}

SuiteResult run_suite(const std::string& name, const VerifyOptions& opt) {
    const auto& reg = registry();
    for (size_t i = 0; i < reg.size(); ++i) {
        if (name != reg[i].name) continue;
        SuiteResult r;
        r.name = name;
        r.criterion = static_cast<int>(i) + 1;
        const auto t0 = Clock::now();
        try {
            reg[i].run(r, opt);
        } catch (const std::exception& ex) {
            r.pass = false;
            r.detail = std::string("exception: ") + ex.what();
        }
        r.seconds = since(t0);
        return r;
    }
    throw std::runtime_error("verify.run_suite: unknown suite '" + name + "'");
}

std::string format_result(const SuiteResult& r) {
    std::ostringstream os;
    os << (r.pass ? "PASS" : "FAIL") << "  " << std::setw(2) << r.criterion << "  " << std::left << std::setw(16)
       << r.name << r.detail;
    return os.str();
}

}  // namespace critspde
