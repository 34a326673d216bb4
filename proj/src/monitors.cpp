#include "critspde/monitors.hpp"

#include "critspde/weighted_spaces.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace critspde {

namespace {

double mode_weight(int k, int N) { return (k == 0 || 2 * k == N) ? 1.0 : 2.0; }

double hs_factor(const NoiseSpec& n) {
    double s = n.sigma(0) * n.sigma(0) / (2 * M_PI);
    for (int k = 1; k <= n.K; ++k) s += n.sigma(k) * n.sigma(k) / M_PI;
    return s;
}

// Snapshots with times in [a, b], as a sampled scalar function of time.
std::vector<const TorusState*> window_states(const std::vector<TorusState>& path, double a, double b) {
    const double tol = 1e-12 * std::max(1.0, std::abs(b));
    std::vector<const TorusState*> out;
    for (const auto& s : path)
        if (s.t >= a - tol && s.t <= b + tol) out.push_back(&s);
    if (out.size() < 2) throw std::runtime_error("monitors: fewer than two snapshots in the window");
    return out;
}

double time_norm(const std::vector<const TorusState*>& states, const std::vector<double>& values, double p,
                 double kappa, double offset) {
    SampledFunction f;
    for (auto* s : states) f.grid.nodes.push_back(s->t);
    f.values = values;
    return weighted_lp_norm(f, p, PowerWeight{offset, kappa});
}

struct Line {
    double slope;
    double r2;
};

Line fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = x.size();
    double mx = 0, my = 0;
    for (size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    double slope = sxy / sxx;
    double r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
    return {slope, r2};
}

double median(std::vector<double>& v) {
    auto mid = v.begin() + v.size() / 2;
    std::nth_element(v.begin(), mid, v.end());
    return *mid;
}

// Fit of log median increment against log lag; increments that vanish
// identically make the path constant at that scale and count as smooth.
Line dyadic_fit(const std::vector<double>& lags, const std::vector<double>& medians) {
    std::vector<double> lx, ly;
    for (size_t i = 0; i < lags.size(); ++i) {
        if (!(medians[i] > 0)) return {1.0, 1.0};
        lx.push_back(std::log(lags[i]));
        ly.push_back(std::log(medians[i]));
    }
    auto l = fit_line(lx, ly);
    l.slope = std::clamp(l.slope, 0.0, 1.0);
    return l;
}

// Trigonometric interpolation of a state onto M >= N points.
std::vector<double> refine(SpectralWorkspace& coarse, SpectralWorkspace& fine, const std::vector<double>& u) {
    const int N = coarse.size(), M = fine.size();
    std::vector<cplx> c, d(M / 2 + 1, 0.0);
    coarse.forward(u, c);
    for (int k = 0; k < N / 2; ++k) d[k] = c[k];
    d[N / 2] = M == N ? c[N / 2] : c[N / 2] / 2.0;
    std::vector<double> v;
    fine.inverse(d, v);
    for (auto& y : v) y *= double(M) / N;
    return v;
}

}  // namespace

std::vector<double> ito_energy_residual(const Trajectory& tr, const NonlinearitySpec& nl) {
    std::vector<double> r;
    if (tr.monitors.empty()) return r;
    const double e0 = tr.monitors.front().energy;
    const bool drop_drift = nl.f_x_independent || !nl.f;
    for (const auto& m : tr.monitors) {
        double rhs = (drop_drift ? 0.0 : m.drift) + m.hs + m.noise;
        r.push_back(m.energy - e0 + 2 * m.dissipation - rhs);
    }
    return r;
}

MonitorSeries monitor_series(const Trajectory& tr, const NonlinearitySpec& nl) {
    MonitorSeries s;
    auto& v = s.values;
    for (const auto& m : tr.monitors) {
        s.times.push_back(m.t);
        v["energy"].push_back(m.energy);
        v["dissipation"].push_back(m.dissipation);
        v["drift"].push_back(m.drift);
        v["hs"].push_back(m.hs);
        v["noise"].push_back(m.noise);
        v["sup"].push_back(m.sup);
    }
    v["ito_residual"] = ito_energy_residual(tr, nl);
    return s;
}

double hs_norm_G(const TorusState& u, const PointMap& g, const NoiseSpec& noise) {
    if (!g) return 0.0;
    auto x = grid_points(static_cast<int>(u.values.size()));
    std::vector<double> gv(u.values.size());
    for (size_t j = 0; j < gv.size(); ++j) gv[j] = g(u.t, x[j], u.values[j]);
    return std::sqrt(l2_norm_sq(gv) * hs_factor(noise));
}

double hs_bound_constant(const NoiseSpec& noise, double xi) {
    if (!(xi >= 2)) throw std::runtime_error("monitors.hs_bound_constant: xi must be at least 2");
    return std::sqrt(hs_factor(noise)) * std::pow(2 * M_PI, 0.5 - 1.0 / xi);
}

double lebesgue_norm(const std::vector<double>& u, double q) {
    if (!(q >= 1)) throw std::runtime_error("monitors.lebesgue_norm: q must be at least 1");
    double s = 0.0;
    for (double v : u) s += std::pow(std::abs(v), q);
    return std::pow(2 * M_PI * s / u.size(), 1.0 / q);
}

double bessel_norm(SpectralWorkspace& ws, const std::vector<double>& u, double s) {
    const int N = ws.size();
    std::vector<cplx> c;
    ws.forward(u, c);
    double acc = 0.0;
    for (int k = 0; k <= N / 2; ++k) acc += mode_weight(k, N) * std::pow(1.0 + double(k) * k, s) * std::norm(c[k]);
    return std::sqrt(2 * M_PI * acc);
}

double blowup_functional(const std::vector<TorusState>& path, double sigma_hat, const NonlinearitySpec& nl,
                         const NoiseSpec& noise, double p, double kappa, double s, double t) {
    if (t > sigma_hat + 1e-12) throw std::runtime_error("monitors.blowup_functional: window beyond sigma_hat");
    if (!(t > s)) throw std::runtime_error("monitors.blowup_functional: empty window");
    auto states = window_states(path, s, t);
    const int N = static_cast<int>(states.front()->values.size());
    SpectralWorkspace ws(N);
    std::vector<double> drift, hs;
    for (auto* st : states) {
        auto F = nonlinearity_drift_spectrum(ws, *st, nl.f);
        double acc = 0.0;
        for (int k = 0; k <= N / 2; ++k) acc += mode_weight(k, N) * std::norm(F[k]) / (1.0 + double(k) * k);
        drift.push_back(std::sqrt(2 * M_PI * acc));
        hs.push_back(hs_norm_G(*st, nl.g, noise));
    }
    return time_norm(states, drift, p, kappa, s) + time_norm(states, hs, p, kappa, s);
}

std::vector<double> x_space_norm(const std::vector<TorusState>& path, const std::vector<XEntry>& entries,
                                 double kappa, double a, double b) {
    auto states = window_states(path, a, b);
    SpectralWorkspace ws(static_cast<int>(states.front()->values.size()));
    std::vector<double> out;
    for (const auto& e : entries) {
        if (e.space_q != 2) throw std::runtime_error("monitors.x_space_norm: only Hilbert (q = 2) spaces are sampled");
        double s = to_double(e.space_smoothness);
        std::vector<double> vals;
        for (auto* st : states) vals.push_back(bessel_norm(ws, st->values, s));
        out.push_back(time_norm(states, vals, to_double(e.time_exponent), kappa, a));
    }
    return out;
}

HoelderFit hoelder_estimate(const std::vector<TorusState>& snaps, double t0, const HoelderOptions& opt) {
    if (!(t0 > 0)) throw std::runtime_error("monitors.hoelder_estimate: t0 must be positive");
    if (opt.lags < 2) throw std::runtime_error("monitors.hoelder_estimate: need at least two lags");
    std::vector<const TorusState*> w;
    for (const auto& s : snaps)
        if (s.t >= t0 - 1e-12) w.push_back(&s);
    const int max_lag = 1 << (opt.lags - 1);
    if (static_cast<int>(w.size()) < 2 * max_lag + 1)
        throw std::runtime_error("monitors.hoelder_estimate: insufficient samples for the dyadic lags");
    const double dt = w[1]->t - w[0]->t;
    for (size_t i = 1; i < w.size(); ++i)
        if (std::abs(w[i]->t - w[i - 1]->t - dt) > 1e-9 * std::max(1.0, dt) + 1e-6 * dt)
            throw std::runtime_error("monitors.hoelder_estimate: snapshots are not equally spaced");

    HoelderFit fit;
    fit.t0 = t0;
    fit.T = w.back()->t;
    const int N = static_cast<int>(w.front()->values.size());

    std::vector<double> lags, meds;
    for (int j = 0; j < opt.lags; ++j) {
        int L = 1 << j;
        std::vector<double> inc;
        inc.reserve((w.size() - L) * N);
        for (size_t i = 0; i + L < w.size(); ++i)
            for (int x = 0; x < N; ++x) inc.push_back(std::abs(w[i + L]->values[x] - w[i]->values[x]));
        lags.push_back(L * dt);
        meds.push_back(median(inc));
    }
    auto lt = dyadic_fit(lags, meds);
    fit.theta_time = lt.slope;
    fit.r2_time = lt.r2;

    // Spatial lags are taken on a trigonometric refinement whose largest lag is
    // a sixteenth of the period, so the fit sees local rather than global oscillation.
    const int M = std::max(N, 16 * max_lag);
    SpectralWorkspace coarse(N), fine(M);
    const size_t stride = std::max<size_t>(1, w.size() / 64);
    std::vector<std::vector<double>> refined;
    for (size_t i = 0; i < w.size(); i += stride) refined.push_back(refine(coarse, fine, w[i]->values));
    lags.clear();
    meds.clear();
    for (int j = 0; j < opt.lags; ++j) {
        int L = 1 << j;
        std::vector<double> inc;
        for (const auto& v : refined)
            for (int x = 0; x < M; ++x) inc.push_back(std::abs(v[(x + L) % M] - v[x]));
        lags.push_back(2 * M_PI * L / M);
        meds.push_back(median(inc));
    }
    auto ls = dyadic_fit(lags, meds);
    fit.theta_space = ls.slope;
    fit.r2_space = ls.r2;
    return fit;
}

}  // namespace critspde
