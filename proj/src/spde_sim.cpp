#include "critspde/spde_sim.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

namespace critspde {

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

// Weight of mode k in sums over the half spectrum: modes 0 and N/2 appear
// once in the full spectrum, the others twice.
double mode_weight(int k, int N) { return (k == 0 || 2 * k == N) ? 1.0 : 2.0; }

double half_spectrum_inner(const std::vector<cplx>& a, const std::vector<cplx>& b, int N) {
    double s = 0.0;
    for (int k = 0; k <= N / 2; ++k) s += mode_weight(k, N) * (std::conj(a[k]) * b[k]).real();
    return 2 * M_PI * s;
}

std::vector<double> initial_values(const SimConfig& c) {
    if (c.u0) {
        auto x = grid_points(c.N);
        std::vector<double> v(c.N);
        for (int j = 0; j < c.N; ++j) v[j] = c.u0(x[j]);
        return v;
    }
    return c.u0_values;
}

bool within_cap(const std::vector<double>& v, double cap, double* sup) {
    double m = 0.0;
    for (double y : v) {
        if (!std::isfinite(y)) return false;
        m = std::max(m, std::abs(y));
    }
    if (sup) *sup = m;
    return m <= cap;
}

double hs_factor(const NoiseSpec& n) {
    double s = n.sigma(0) * n.sigma(0) / (2 * M_PI);
    for (int k = 1; k <= n.K; ++k) s += n.sigma(k) * n.sigma(k) / M_PI;
    return s;
}

}  // namespace

double NoiseSpec::sigma(int k) const { return scale * std::pow(1.0 + double(k) * k, -lambda / 2); }

void validate_noise(const NoiseSpec& n, int N) {
    if (!(n.lambda > 0.5 && n.lambda < 1.0))
        throw std::runtime_error("spde_sim.validate_noise: lambda must lie in (1/2, 1)");
    if (n.K < 0) throw std::runtime_error("spde_sim.validate_noise: K must be nonnegative");
    if (3 * n.K > N) throw std::runtime_error("spde_sim.validate_noise: K exceeds N/3");
    if (!std::isfinite(n.scale) || n.scale < 0) throw std::runtime_error("spde_sim.validate_noise: bad scale");
}

void validate_config(const SimConfig& c) {
    if (c.N < 8 || (c.N & (c.N - 1)) != 0)
        throw std::runtime_error("spde_sim.validate_config: N must be a power of two >= 8");
    if (!(c.dt > 0) || !std::isfinite(c.dt)) throw std::runtime_error("spde_sim.validate_config: dt must be positive");
    if (!(c.T > 0) || !std::isfinite(c.T)) throw std::runtime_error("spde_sim.validate_config: T must be positive");
    if (!(c.blowup_cap > 0)) throw std::runtime_error("spde_sim.validate_config: blowup_cap must be positive");
    if (c.noise_substeps < 1) throw std::runtime_error("spde_sim.validate_config: noise_substeps must be >= 1");
    if (c.snapshot_stride < 0) throw std::runtime_error("spde_sim.validate_config: negative snapshot stride");
    if (c.nonlinearity.nu <= 0 || c.nonlinearity.nu > 2)
        throw std::runtime_error("spde_sim.validate_config: nu must lie in (0, 2]");
    if (!c.u0 && static_cast<int>(c.u0_values.size()) != c.N)
        throw std::runtime_error("spde_sim.validate_config: initial data missing or of wrong length");
    validate_noise(c.noise, c.N);
}

struct SpectralWorkspace::Impl {
    double* real = nullptr;
    fftw_complex* spec = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;
};

SpectralWorkspace::SpectralWorkspace(int N) : N_(N), impl_(std::make_unique<Impl>()) {
    if (N < 2 || N % 2 != 0) throw std::runtime_error("spde_sim.SpectralWorkspace: N must be even");
    std::lock_guard<std::mutex> lock(planner_mutex());
    impl_->real = fftw_alloc_real(N);
    impl_->spec = fftw_alloc_complex(N / 2 + 1);
    impl_->fwd = fftw_plan_dft_r2c_1d(N, impl_->real, impl_->spec, FFTW_ESTIMATE);
    impl_->inv = fftw_plan_dft_c2r_1d(N, impl_->spec, impl_->real, FFTW_ESTIMATE);
    if (!impl_->fwd || !impl_->inv) throw std::runtime_error("spde_sim.SpectralWorkspace: planning failed");
}

SpectralWorkspace::~SpectralWorkspace() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(impl_->fwd);
    fftw_destroy_plan(impl_->inv);
    fftw_free(impl_->real);
    fftw_free(impl_->spec);
}

void SpectralWorkspace::forward(const std::vector<double>& u, std::vector<cplx>& c) {
    if (static_cast<int>(u.size()) != N_) throw std::runtime_error("spde_sim.forward: size mismatch");
    std::copy(u.begin(), u.end(), impl_->real);
    fftw_execute(impl_->fwd);
    c.resize(N_ / 2 + 1);
    for (int k = 0; k <= N_ / 2; ++k) c[k] = cplx(impl_->spec[k][0], impl_->spec[k][1]) / double(N_);
}

void SpectralWorkspace::inverse(const std::vector<cplx>& c, std::vector<double>& u) {
    if (static_cast<int>(c.size()) != N_ / 2 + 1) throw std::runtime_error("spde_sim.inverse: size mismatch");
    for (int k = 0; k <= N_ / 2; ++k) {
        impl_->spec[k][0] = c[k].real();
        impl_->spec[k][1] = c[k].imag();
    }
    // the c2r transform ignores imaginary parts of modes 0 and N/2
    fftw_execute(impl_->inv);
    u.assign(impl_->real, impl_->real + N_);
}

std::vector<double> grid_points(int N) {
    std::vector<double> x(N);
    for (int j = 0; j < N; ++j) x[j] = 2 * M_PI * j / N;
    return x;
}

double l2_norm_sq_from_spectrum(const std::vector<cplx>& c, int N) {
    double s = 0.0;
    for (int k = 0; k <= N / 2; ++k) s += mode_weight(k, N) * std::norm(c[k]);
    return 2 * M_PI * s;
}

double l2_norm_sq(const std::vector<double>& u) {
    double s = 0.0;
    for (double v : u) s += v * v;
    return 2 * M_PI * s / u.size();
}

void dealias(std::vector<cplx>& c, int N) {
    for (int k = 0; k <= N / 2; ++k)
        if (3 * k > N || 2 * k == N) c[k] = 0.0;
}

void enforce_hermitian(std::vector<cplx>& c, int N) {
    c[0] = c[0].real();
    c[N / 2] = c[N / 2].real();
}

std::vector<cplx> noise_increment_spectrum(const NoiseSpec& spec, int N, double dt, std::mt19937_64& rng,
                                           int substeps) {
    if (!(dt > 0)) throw std::runtime_error("spde_sim.noise_increment: dt must be positive");
    if (substeps < 1) throw std::runtime_error("spde_sim.noise_increment: substeps must be >= 1");
    std::vector<cplx> c(N / 2 + 1, 0.0);
    const double h = std::sqrt(dt / substeps);
    for (int s = 0; s < substeps; ++s) {
        // a fresh distribution per substep keeps the draw sequence identical to
        // separate calls at the finer step
        std::normal_distribution<double> Z;
        c[0] += spec.sigma(0) * h * Z(rng) / std::sqrt(2 * M_PI);
        for (int k = 1; k <= spec.K; ++k) {
            double a = spec.sigma(k) * h * Z(rng) / std::sqrt(M_PI);
            double b = spec.sigma(k) * h * Z(rng) / std::sqrt(M_PI);
            c[k] += cplx(a, -b) / 2.0;
        }
    }
    return c;
}

std::vector<double> noise_increment(SpectralWorkspace& ws, const NoiseSpec& spec, double dt, std::mt19937_64& rng) {
    auto c = noise_increment_spectrum(spec, ws.size(), dt, rng);
    std::vector<double> w;
    ws.inverse(c, w);
    return w;
}

std::vector<cplx> nonlinearity_drift_spectrum(SpectralWorkspace& ws, const TorusState& u, const PointMap& f) {
    const int N = ws.size();
    std::vector<cplx> c(N / 2 + 1, 0.0);
    if (!f) return c;
    auto x = grid_points(N);
    std::vector<double> fv(N);
    for (int j = 0; j < N; ++j) fv[j] = f(u.t, x[j], u.values[j]);
    ws.forward(fv, c);
    for (int k = 0; k <= N / 2; ++k) c[k] *= cplx(0, k);
    dealias(c, N);
    return c;
}

std::vector<double> nonlinearity_drift(SpectralWorkspace& ws, const TorusState& u, const PointMap& f) {
    auto c = nonlinearity_drift_spectrum(ws, u, f);
    std::vector<double> d;
    ws.inverse(c, d);
    return d;
}

double drift_pairing(SpectralWorkspace& ws, const TorusState& u, const PointMap& f) {
    const int N = ws.size();
    std::vector<cplx> c;
    ws.forward(u.values, c);
    for (int k = 0; k <= N / 2; ++k) c[k] *= cplx(0, k);
    c[N / 2] = 0.0;
    std::vector<double> ux;
    ws.inverse(c, ux);
    auto x = grid_points(N);
    double s = 0.0;
    for (int j = 0; j < N; ++j) s += f(u.t, x[j], u.values[j]) * ux[j];
    return 2 * M_PI * s / N;
}

bool step(SpectralWorkspace& ws, TorusState& u, double dt, Scheme scheme, const NonlinearitySpec& nl,
          const NoiseSpec& noise, const std::vector<cplx>& dW, double cap, StepIncrements* inc) {
    const int N = ws.size();
    std::vector<cplx> c;
    ws.forward(u.values, c);

    auto F = nonlinearity_drift_spectrum(ws, u, nl.f);

    std::vector<cplx> G(N / 2 + 1, 0.0);
    double g_sq = 0.0;
    if (nl.g) {
        auto x = grid_points(N);
        std::vector<double> gv(N);
        for (int j = 0; j < N; ++j) gv[j] = nl.g(u.t, x[j], u.values[j]);
        g_sq = l2_norm_sq(gv);
        if (!dW.empty()) {
            std::vector<double> w;
            ws.inverse(dW, w);
            for (int j = 0; j < N; ++j) gv[j] *= w[j];
            ws.forward(gv, G);
            dealias(G, N);
        }
    }

    std::vector<cplx> v(N / 2 + 1);
    for (int k = 0; k <= N / 2; ++k) v[k] = c[k] + dt * F[k] + G[k];

    double dissipated = 0.0;
    for (int k = 0; k <= N / 2; ++k) {
        double kk = double(k) * k * dt;
        double m = scheme == Scheme::exp_euler ? std::exp(-kk) : 1.0 / (1.0 + kk);
        dissipated += mode_weight(k, N) * std::norm(v[k]) * (1 - m * m);
        v[k] *= m;
    }
    enforce_hermitian(v, N);

    if (inc) {
        inc->dissipation = M_PI * dissipated;  // half of 2 pi * sum
        inc->drift_term = 2 * dt * half_spectrum_inner(c, F, N);
        inc->noise_term = 2 * half_spectrum_inner(c, G, N);
        inc->hs_sq = g_sq * hs_factor(noise);
    }

    ws.inverse(v, u.values);
    u.t += dt;
    return within_cap(u.values, cap, nullptr);
}

std::string to_string(PathStatus s) { return s == PathStatus::completed ? "completed" : "blowup"; }

std::uint64_t path_seed(std::uint64_t master, std::uint64_t index) {
    auto splitmix = [](std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    };
    return splitmix(splitmix(master) ^ index);
}

Trajectory simulate_path(const SimConfig& cfg) {
    validate_config(cfg);
    Trajectory tr;
    SpectralWorkspace ws(cfg.N);
    TorusState u{0.0, initial_values(cfg)};

    double sup = 0.0;
    bool ok = within_cap(u.values, cfg.blowup_cap, &sup);
    tr.energy0 = ok ? l2_norm_sq(u.values) : INFINITY;
    tr.snapshots.push_back(u);
    if (!ok) {
        tr.status = PathStatus::blowup;
        tr.sigma_hat = 0.0;
        tr.sup_energy = tr.final_energy = tr.energy0;
        return tr;
    }
    tr.monitors.push_back({0.0, tr.energy0, 0.0, 0.0, 0.0, 0.0, sup});
    tr.sup_energy = tr.energy0;

    const long steps = std::max(1L, static_cast<long>(std::ceil(cfg.T / cfg.dt - 1e-9)));
    std::mt19937_64 rng(cfg.seed);
    MonitorRow acc = tr.monitors.back();
    bool saved_last = true;

    for (long n = 0; n < steps; ++n) {
        double h = (n == steps - 1) ? cfg.T - cfg.dt * n : cfg.dt;
        std::vector<cplx> dW;
        if (cfg.nonlinearity.g) dW = noise_increment_spectrum(cfg.noise, cfg.N, h, rng, cfg.noise_substeps);

        TorusState prev = u;
        StepIncrements inc;
        bool fine = step(ws, u, h, cfg.scheme, cfg.nonlinearity, cfg.noise, dW, cfg.blowup_cap, &inc);
        if (n == steps - 1) u.t = cfg.T;
        if (!fine) {
            tr.status = PathStatus::blowup;
            tr.sigma_hat = u.t;
            if (!saved_last) tr.snapshots.push_back(prev);
            tr.final_energy = l2_norm_sq(prev.values);
            tr.dissipation = acc.dissipation;
            return tr;
        }
        within_cap(u.values, cfg.blowup_cap, &sup);
        acc.t = u.t;
        acc.energy = l2_norm_sq(u.values);
        acc.dissipation += inc.dissipation;
        acc.drift += inc.drift_term;
        acc.hs += inc.hs_sq * h;
        acc.noise += inc.noise_term;
        acc.sup = sup;
        tr.monitors.push_back(acc);
        tr.sup_energy = std::max(tr.sup_energy, acc.energy);

        saved_last = cfg.snapshot_stride > 0 && (n + 1) % cfg.snapshot_stride == 0;
        if (saved_last) tr.snapshots.push_back(u);
    }
    if (!saved_last) tr.snapshots.push_back(u);
    tr.status = PathStatus::completed;
    tr.sigma_hat = cfg.T;
    tr.dissipation = acc.dissipation;
    tr.final_energy = acc.energy;
    return tr;
}

}  // namespace critspde
