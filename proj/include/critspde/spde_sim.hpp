#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace critspde {

using cplx = std::complex<double>;

// Noise amplitudes sigma_k = (1+k^2)^{-lambda/2} on modes 0..K of the real
// trigonometric orthonormal basis of L^2(T).
struct NoiseSpec {
    double lambda = 0.75;
    int K = 8;
    double scale = 1.0;  // multiplies every amplitude

    double sigma(int k) const;
};

void validate_noise(const NoiseSpec& n, int N);

// y -> value maps evaluated pointwise at (t, x, y).
using PointMap = std::function<double(double t, double x, double y)>;

struct NonlinearitySpec {
    PointMap f;  // empty means f = 0
    PointMap g;  // empty means g = 0
    bool f_x_independent = true;
    double nu = 1.0;
    std::string label;
};

enum class Scheme { exp_euler, semi_implicit };

struct SimConfig {
    int N = 64;
    NoiseSpec noise;
    NonlinearitySpec nonlinearity;
    double T = 1.0;
    double dt = 1e-3;
    Scheme scheme = Scheme::exp_euler;
    std::uint64_t seed = 1;
    double blowup_cap = 1e6;
    std::function<double(double x)> u0;
    std::vector<double> u0_values;  // used when u0 is empty
    int snapshot_stride = 0;        // 0 keeps only the initial and final states
    int noise_substeps = 1;         // increments are sums of this many finer draws
};

void validate_config(const SimConfig& c);

struct TorusState {
    double t = 0.0;
    std::vector<double> values;
};

// Owns FFTW buffers and plans for one grid size. Plan creation and
// destruction are serialized internally; execution is thread-confined.
class SpectralWorkspace {
public:
    explicit SpectralWorkspace(int N);
    ~SpectralWorkspace();
    SpectralWorkspace(const SpectralWorkspace&) = delete;
    SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;

    int size() const { return N_; }
    // Coefficients c_k, k = 0..N/2, with u(x) = sum_k c_k e^{ikx} (normalized by 1/N).
    void forward(const std::vector<double>& u, std::vector<cplx>& c);
    void inverse(const std::vector<cplx>& c, std::vector<double>& u);

private:
    int N_;
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

std::vector<double> grid_points(int N);

// Spectral helpers on the half spectrum k = 0..N/2.
double l2_norm_sq_from_spectrum(const std::vector<cplx>& c, int N);
double l2_norm_sq(const std::vector<double>& u);  // (2 pi / N) sum u_j^2
void dealias(std::vector<cplx>& c, int N);         // zero |k| > N/3 and the Nyquist mode
void enforce_hermitian(std::vector<cplx>& c, int N);

// Spectral coefficients of one increment, sum_k sigma_k e_k sqrt(dt) xi_k.
// With substeps > 1 the increment is the sum of that many draws at dt/substeps,
// so a coarse run sees the same Brownian path as a finer one.
std::vector<cplx> noise_increment_spectrum(const NoiseSpec& spec, int N, double dt, std::mt19937_64& rng,
                                           int substeps = 1);
std::vector<double> noise_increment(SpectralWorkspace& ws, const NoiseSpec& spec, double dt, std::mt19937_64& rng);

// d/dx of f(t, x, u) by the dealiased pseudospectral rule.
std::vector<double> nonlinearity_drift(SpectralWorkspace& ws, const TorusState& u, const PointMap& f);
std::vector<cplx> nonlinearity_drift_spectrum(SpectralWorkspace& ws, const TorusState& u, const PointMap& f);

// Trapezoidal quadrature of the integral of f(u) d/dx u over the torus.
double drift_pairing(SpectralWorkspace& ws, const TorusState& u, const PointMap& f);

// Per-step contributions to the Ito energy balance
// ||u_new||^2 - ||u||^2 + 2 dD = dI + dIII + (discretization defect).
struct StepIncrements {
    double dissipation = 0.0;  // dD, the exactly dissipated energy over the step
    double drift_term = 0.0;   // dI = 2 dt (u, F)
    double noise_term = 0.0;   // dIII = 2 (u, G)
    double hs_sq = 0.0;        // ||g(u)||_HS^2 at the start of the step
};

// Advances u by dt with a given noise increment spectrum (may be empty for
// g = 0). Returns false if the new state exceeds the cap or is not finite.
bool step(SpectralWorkspace& ws, TorusState& u, double dt, Scheme scheme, const NonlinearitySpec& nl,
          const NoiseSpec& noise, const std::vector<cplx>& dW, double cap, StepIncrements* inc = nullptr);

enum class PathStatus { completed, blowup };
std::string to_string(PathStatus s);

struct MonitorRow {
    double t;
    double energy;       // ||u||^2
    double dissipation;  // cumulative D
    double drift;        // cumulative I
    double hs;           // cumulative II = sum hs^2 dt
    double noise;        // cumulative III
    double sup;          // sup-norm of u
};

struct Trajectory {
    PathStatus status = PathStatus::completed;
    double sigma_hat = 0.0;
    std::vector<TorusState> snapshots;
    std::vector<MonitorRow> monitors;
    double energy0 = 0.0;
    double sup_energy = 0.0;
    double dissipation = 0.0;
    double final_energy = 0.0;
};

Trajectory simulate_path(const SimConfig& cfg);

// Seed of path i derived from the master seed (splitmix64 of both).
std::uint64_t path_seed(std::uint64_t master, std::uint64_t index);

}  // namespace critspde
