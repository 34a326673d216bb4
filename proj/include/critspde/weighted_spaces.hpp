#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace critspde {

// w(t) = |t - offset|^kappa
struct PowerWeight {
    double offset = 0.0;
    double kappa = 0.0;
};

struct TimeGrid {
    std::vector<double> nodes;

    double a() const { return nodes.front(); }
    double b() const { return nodes.back(); }

    static TimeGrid uniform(double a, double b, int cells);
    // Nodes a + (b-a)(i/cells)^grading, clustering near a.
    static TimeGrid graded(double a, double b, int cells, double grading);
};

void validate_grid(const TimeGrid& g);

struct SampledFunction {
    TimeGrid grid;
    std::vector<double> values;
};

// Samples with values in a Hilbert space, stored as coordinate vectors whose
// Euclidean norm is the space norm.
struct SampledVectorFunction {
    TimeGrid grid;
    std::vector<std::vector<double>> values;
};

SampledFunction sample(const std::function<double(double)>& f, const TimeGrid& grid);

// Integral of w over [lo, hi] (both >= offset).
double weight_integral(const PowerWeight& w, double lo, double hi);

double weighted_lp_norm(const SampledFunction& f, double p, const PowerWeight& w);
double weighted_lp_norm(const SampledVectorFunction& f, double p, const PowerWeight& w);

double slobodeckij_seminorm(const SampledFunction& f, double theta, double p, const PowerWeight& w);
double slobodeckij_seminorm(const SampledVectorFunction& f, double theta, double p, const PowerWeight& w);

struct RefinementStudy {
    std::vector<int> cells;
    std::vector<double> values;
    bool divergent = false;
    double last_ratio = 1.0;  // values[k]/values[k-1] at the final level
};

// Evaluates the seminorm of f on grids with cells0 * 2^k cells, k < levels.
// Divergent when two consecutive doublings each increase the value by more
// than 25 percent.
RefinementStudy refine_seminorm(const std::function<double(double)>& f, double a, double b, double theta,
                                double p, const PowerWeight& w, int cells0, int levels, double grading = 1.0);

class LimitingCaseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct EmbeddingReport {
    bool pass = false;
    double worst_ratio = 0.0;
    double constant = 0.0;       // C_{p,q,kappa,eta}
    double time_exponent = 0.0;  // (1+kappa)/p - (1+eta)/q
};

// Verifies ||f||_{L^p(0,T,w_kappa)} <= C T^{e} ||f||_{L^q(0,T,w_eta)} on random
// test functions plus the extremal power for the Hoelder step.
EmbeddingReport check_embedding_scaling(double p, double q, double kappa, double eta, double T, int trials,
                                        std::uint64_t seed = 1, double tolerance = 1e-3);

enum class TimeNorm { fourier, slobodeckij };

struct MixedOptions {
    TimeNorm time_norm = TimeNorm::slobodeckij;
    int time_cells = 64;
    int time_modes = 3;
    int space_modes = 4;
    double s0 = 0.0;  // X_0 = H^{s0}
    double s1 = 2.0;  // X_1 = H^{s1}
    std::uint64_t seed = 11;
    bool single_mode = false;
    bool zero_field = false;
};

struct MixedReport {
    bool pass = false;
    double max_constant = 0.0;
    std::vector<double> ratios;
};

// ||f||_{H^{theta,2}(X_theta)} <= C ||f||_{L^2(X_0)}^{1-theta} ||f||_{W^{1,2}(X_1)}^theta on
// band-limited space-time fields over (0, 2 pi) x T.
MixedReport check_mixed_derivative(double theta, int trials, const MixedOptions& opt = {});

struct MonomialInterpolationReport {
    double max_ratio = 0.0;
    std::vector<double> ratios;  // one per (a, m) grid point
};

// Interpolation inequality for f(t,x) = t^a cos(m x) with phi = 1 in the
// 1D scale X_theta = H^{-1+2theta}: weighted L^zeta(X_psi) against the
// maximal-regularity norm and L^p(X_{1-kappa/p}).
MonomialInterpolationReport check_monomial_interpolation(double psi, double p, double kappa, double delta,
                                                         double zeta, double theta, int cells);

}  // namespace critspde
