#pragma once

#include "critspde/param_calculus.hpp"
#include "critspde/spde_sim.hpp"

#include <map>
#include <string>
#include <vector>

namespace critspde {

struct MonitorSeries {
    std::vector<double> times;
    std::map<std::string, std::vector<double>> values;
};

// Per-step series of a trajectory: energy, dissipation, drift, hs, noise, sup
// and ito_residual.
MonitorSeries monitor_series(const Trajectory& tr, const NonlinearitySpec& nl);

// ||u(t)||^2 - ||u(0)||^2 + 2 D(t) - (I(t) + II(t) + III(t)). For x-independent
// f the drift term I is taken to be zero.
std::vector<double> ito_energy_residual(const Trajectory& tr, const NonlinearitySpec& nl);

// Hilbert-Schmidt norm of the multiplication operator by g(u) on the
// truncated noise basis.
double hs_norm_G(const TorusState& u, const PointMap& g, const NoiseSpec& noise);

// Constant C with hs_norm_G <= C ||g(u)||_{L^xi} for xi >= 2.
double hs_bound_constant(const NoiseSpec& noise, double xi);

// L^q(T) norm by the trapezoid rule on the collocation grid.
double lebesgue_norm(const std::vector<double>& u, double q);

// H^s(T) norm with the Bessel multiplier (1+k^2)^{s/2}.
double bessel_norm(SpectralWorkspace& ws, const std::vector<double>& u, double s);

// Weighted L^p norm in time over [s, t] of ||d/dx f(u)||_{H^{-1}} plus the same
// norm of hs_norm_G, weight |r - s|^kappa. Snapshots past sigma_hat are refused.
double blowup_functional(const std::vector<TorusState>& path, double sigma_hat, const NonlinearitySpec& nl,
                         const NoiseSpec& noise, double p, double kappa, double s, double t);

// One weighted time norm of a Bessel space norm per exponent-table entry.
std::vector<double> x_space_norm(const std::vector<TorusState>& path, const std::vector<XEntry>& entries,
                                 double kappa, double a, double b);

struct HoelderOptions {
    int lags = 6;  // number of dyadic lags, starting at one sample spacing
};

struct HoelderFit {
    double theta_time = 0.0;
    double theta_space = 0.0;
    double t0 = 0.0;
    double T = 0.0;
    double r2_time = 0.0;
    double r2_space = 0.0;
};

// Log-log slopes of median |u(t+h,x)-u(t,x)| and |u(t,x+h)-u(t,x)| against
// dyadic lags, using snapshots with t >= t0. Snapshots must be equally spaced.
HoelderFit hoelder_estimate(const std::vector<TorusState>& snaps, double t0, const HoelderOptions& opt = {});

}  // namespace critspde
