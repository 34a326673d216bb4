#include "critspde/weighted_spaces.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace critspde {

namespace {

[[noreturn]] void fail(const std::string& fn, const std::string& msg) {
    throw std::runtime_error("weighted_spaces." + fn + ": " + msg);
}

void check_kappa(const std::string& fn, double p, double kappa) {
    if (!(p >= 1)) fail(fn, "p must be >= 1");
    if (!(kappa > -1 && kappa < p - 1))
        fail(fn, "weight exponent " + std::to_string(kappa) + " outside (-1, p-1)");
}

double norm2(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double dist2(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

SampledVectorFunction as_vector(const SampledFunction& f) {
    SampledVectorFunction v;
    v.grid = f.grid;
    v.values.reserve(f.values.size());
    for (double x : f.values) v.values.push_back({x});
    return v;
}

}  // namespace

TimeGrid TimeGrid::uniform(double a, double b, int cells) {
    if (cells < 2 || !(b > a)) fail("TimeGrid::uniform", "need b > a and >= 2 cells");
    TimeGrid g;
    g.nodes.resize(cells + 1);
    for (int i = 0; i <= cells; ++i) g.nodes[i] = a + (b - a) * i / cells;
    g.nodes.back() = b;
    return g;
}

TimeGrid TimeGrid::graded(double a, double b, int cells, double grading) {
    if (cells < 2 || !(b > a) || !(grading >= 1)) fail("TimeGrid::graded", "need b > a, >= 2 cells, grading >= 1");
    TimeGrid g;
    g.nodes.resize(cells + 1);
    for (int i = 0; i <= cells; ++i) g.nodes[i] = a + (b - a) * std::pow(double(i) / cells, grading);
    g.nodes.back() = b;
    return g;
}

void validate_grid(const TimeGrid& g) {
    if (g.nodes.size() < 3) fail("validate_grid", "grid needs at least 3 nodes");
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        if (!std::isfinite(g.nodes[i])) fail("validate_grid", "non-finite node");
        if (i > 0 && !(g.nodes[i] > g.nodes[i - 1])) fail("validate_grid", "nodes must be strictly increasing");
    }
}

SampledFunction sample(const std::function<double(double)>& f, const TimeGrid& grid) {
    SampledFunction s;
    s.grid = grid;
    s.values.reserve(grid.nodes.size());
    for (double t : grid.nodes) s.values.push_back(f(t));
    return s;
}

double weight_integral(const PowerWeight& w, double lo, double hi) {
    const double k1 = w.kappa + 1;
    return (std::pow(hi - w.offset, k1) - std::pow(lo - w.offset, k1)) / k1;
}

double weighted_lp_norm(const SampledFunction& f, double p, const PowerWeight& w) {
    return weighted_lp_norm(as_vector(f), p, w);
}

double weighted_lp_norm(const SampledVectorFunction& f, double p, const PowerWeight& w) {
    check_kappa("weighted_lp_norm", p, w.kappa);
    validate_grid(f.grid);
    const auto& t = f.grid.nodes;
    const std::size_t n = t.size();
    if (f.values.size() != n) fail("weighted_lp_norm", "sample count does not match grid");
    if (w.offset > t[0]) fail("weighted_lp_norm", "weight offset must not exceed the left endpoint");

    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = norm2(f.values[i]);
    for (std::size_t i = 1; i < n; ++i)
        if (!std::isfinite(g[i])) fail("weighted_lp_norm", "non-finite sample at node " + std::to_string(i));

    auto wt = [&](double s) { return w.kappa == 0 ? 1.0 : std::pow(s - w.offset, w.kappa); };
    const bool singular_left = t[0] == w.offset;
    if (!std::isfinite(g[0]) && !singular_left)
        fail("weighted_lp_norm", "non-finite sample at an interior left endpoint");

    double sum = 0;
    std::size_t first = 0;
    if (singular_left) {
        const double h = t[1] - t[0];
        if (!std::isfinite(g[0])) {
            // Local power law C s^gamma through the next two nodes.
            const double s1 = t[1] - w.offset, s2 = t[2] - w.offset;
            if (!(g[1] > 0 && g[2] > 0)) fail("weighted_lp_norm", "cannot fit singular left cell");
            const double gamma = std::log(g[2] / g[1]) / std::log(s2 / s1);
            const double C = g[1] / std::pow(s1, gamma);
            const double e = gamma * p + w.kappa + 1;
            if (!(e > 0)) fail("weighted_lp_norm", "function not integrable at the left endpoint");
            sum += std::pow(C, p) * std::pow(h, e) / e;
        } else {
            const double A = std::pow(g[0], p);
            const double B = (std::pow(g[1], p) - A) / h;
            const double k = w.kappa;
            sum += A * std::pow(h, k + 1) / (k + 1) + B * std::pow(h, k + 2) / (k + 2);
        }
        first = 1;
    }
    for (std::size_t i = first; i + 1 < n; ++i) {
        const double h = t[i + 1] - t[i];
        sum += 0.5 * h * (std::pow(g[i], p) * wt(t[i]) + std::pow(g[i + 1], p) * wt(t[i + 1]));
    }
    return std::pow(sum, 1.0 / p);
}

double slobodeckij_seminorm(const SampledFunction& f, double theta, double p, const PowerWeight& w) {
    return slobodeckij_seminorm(as_vector(f), theta, p, w);
}

double slobodeckij_seminorm(const SampledVectorFunction& f, double theta, double p, const PowerWeight& w) {
    if (!(theta > 0 && theta < 1)) fail("slobodeckij_seminorm", "theta must lie in (0,1)");
    check_kappa("slobodeckij_seminorm", p, w.kappa);
    validate_grid(f.grid);
    const auto& t = f.grid.nodes;
    const std::size_t n = t.size();
    if (f.values.size() != n) fail("slobodeckij_seminorm", "sample count does not match grid");
    if (w.offset > t[0]) fail("slobodeckij_seminorm", "weight offset must not exceed the left endpoint");
    for (const auto& v : f.values)
        if (!std::isfinite(norm2(v))) fail("slobodeckij_seminorm", "non-finite sample");

    const std::size_t cells = n - 1;
    const std::size_t dim = f.values[0].size();
    std::vector<double> mid(cells), h(cells), W(cells);
    std::vector<std::vector<double>> avg(cells, std::vector<double>(dim));
    for (std::size_t i = 0; i < cells; ++i) {
        mid[i] = 0.5 * (t[i] + t[i + 1]);
        h[i] = t[i + 1] - t[i];
        W[i] = weight_integral(w, t[i], t[i + 1]);
        for (std::size_t d = 0; d < dim; ++d) avg[i][d] = 0.5 * (f.values[i][d] + f.values[i + 1][d]);
    }
    const double expo = 1 + theta * p;
    const double gamma = p - 1 - theta * p;
    const double diag = 2.0 / ((gamma + 1) * (gamma + 2));

    double sum = 0;
    for (std::size_t I = 0; I < cells; ++I) {
        double row = 0;
        for (std::size_t J = 0; J < cells; ++J) {
            if (J == I) continue;
            const double d = dist2(avg[I], avg[J]);
            if (d == 0) continue;
            row += std::pow(d, p) / std::pow(std::abs(mid[I] - mid[J]), expo) * h[J];
        }
        const double slope = dist2(f.values[I + 1], f.values[I]) / h[I];
        const double self = std::pow(slope, p) * std::pow(h[I], gamma + 2) * diag;
        sum += row * W[I] + self * W[I] / h[I];
    }
    return std::pow(sum, 1.0 / p);
}

RefinementStudy refine_seminorm(const std::function<double(double)>& f, double a, double b, double theta,
                                double p, const PowerWeight& w, int cells0, int levels, double grading) {
    if (levels < 3) fail("refine_seminorm", "need at least 3 levels");
    RefinementStudy st;
    int run = 0;
    for (int k = 0; k < levels; ++k) {
        const int cells = cells0 << k;
        auto g = grading == 1.0 ? TimeGrid::uniform(a, b, cells) : TimeGrid::graded(a, b, cells, grading);
        st.cells.push_back(cells);
        st.values.push_back(slobodeckij_seminorm(sample(f, g), theta, p, w));
        if (k > 0) {
            const double prev = st.values[k - 1];
            st.last_ratio = prev > 0 ? st.values[k] / prev : 1.0;
            run = st.last_ratio > 1.25 ? run + 1 : 0;
            if (run >= 2) st.divergent = true;
        }
    }
    return st;
}

EmbeddingReport check_embedding_scaling(double p, double q, double kappa, double eta, double T, int trials,
                                        std::uint64_t seed, double tolerance) {
    const std::string fn = "check_embedding_scaling";
    if (!(p > 1 && q > 1)) fail(fn, "need p, q > 1");
    if (!(T > 0)) fail(fn, "need T > 0");
    check_kappa(fn, p, kappa);
    check_kappa(fn, q, eta);
    const double lhs_idx = (1 + kappa) / p, rhs_idx = (1 + eta) / q;
    const double scale = std::max({1.0, std::abs(lhs_idx), std::abs(rhs_idx)});
    const bool equal_idx = std::abs(lhs_idx - rhs_idx) <= 1e-14 * scale;
    if (p > q) {
        if (equal_idx) throw LimitingCaseError("weighted_spaces." + fn + ": limiting case false for p > q");
        fail(fn, "precondition p <= q violated");
    }
    if (p < q) {
        if (equal_idx)
            throw LimitingCaseError("weighted_spaces." + fn +
                                    ": limiting case (1+kappa)/p = (1+eta)/q, Hoelder constant is infinite");
        if (lhs_idx < rhs_idx) fail(fn, "precondition (1+kappa)/p > (1+eta)/q violated");
    } else if (kappa < eta) {
        fail(fn, "precondition kappa >= eta violated for p = q");
    }

    EmbeddingReport rep;
    rep.time_exponent = lhs_idx - rhs_idx;
    double m = 0;
    if (p < q) {
        m = (kappa * q - eta * p) / (q - p);
        rep.constant = std::pow(m + 1, -(q - p) / (p * q));
    } else {
        rep.constant = 1.0;
    }
    const double bound = rep.constant * std::pow(T, rep.time_exponent);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> N(0, 1);
    std::uniform_real_distribution<double> U(0, 1);
    const auto grid = TimeGrid::graded(0, T, 3000, 3.0);
    const double gamma_min = -rhs_idx;  // keeps t^gamma in L^q(w_eta)

    auto ratio_of = [&](const std::function<double(double)>& f) {
        auto s = sample(f, grid);
        double lhs = weighted_lp_norm(s, p, {0, kappa});
        double rhs = weighted_lp_norm(s, q, {0, eta});
        return rhs > 0 ? lhs / (bound * rhs) : 0.0;
    };

    rep.worst_ratio = 0;
    for (int k = 0; k < trials; ++k) {
        double a[4], ph[4];
        for (int j = 0; j < 4; ++j) {
            a[j] = N(rng) / (1 + j);
            ph[j] = 2 * M_PI * U(rng);
        }
        const double b = N(rng);
        const double gam = gamma_min * 0.8 + U(rng) * (2 - gamma_min * 0.8);
        auto f = [=](double t) {
            double v = b * std::pow(t / T, gam);
            for (int j = 0; j < 4; ++j) v += a[j] * std::cos(j * M_PI * t / T + ph[j]);
            return v;
        };
        rep.worst_ratio = std::max(rep.worst_ratio, ratio_of(f));
    }
    // Functions that (nearly) attain the Hoelder constant.
    if (p < q) {
        const double g = (m - eta) / q;
        rep.worst_ratio = std::max(rep.worst_ratio, ratio_of([=](double t) { return std::pow(t, g); }));
    } else {
        rep.worst_ratio = std::max(rep.worst_ratio, ratio_of([=](double t) { return std::pow(t / T, 40.0); }));
    }
    rep.pass = rep.worst_ratio <= 1 + tolerance;
    return rep;
}

namespace {

// Real band-limited field on (0, 2 pi)_t x T_x. Space basis index mu has
// wavenumber wn[mu]; time coefficients are cos/sin amplitudes for j = 0..J.
struct BandField {
    std::vector<int> wn;
    std::vector<std::vector<double>> ca, cb;  // [mu][j]

    double coef(std::size_t mu, double t, bool deriv) const {
        double v = 0;
        for (std::size_t j = 0; j < ca[mu].size(); ++j) {
            const double c = std::cos(j * t), s = std::sin(j * t);
            if (deriv) v += j * (-ca[mu][j] * s + cb[mu][j] * c);
            else v += ca[mu][j] * c + cb[mu][j] * s;
        }
        return v;
    }

    SampledVectorFunction sample_in(const TimeGrid& g, double sigma, bool deriv) const {
        SampledVectorFunction out;
        out.grid = g;
        for (double t : g.nodes) {
            std::vector<double> v(wn.size());
            for (std::size_t mu = 0; mu < wn.size(); ++mu)
                v[mu] = std::pow(1.0 + wn[mu] * wn[mu], sigma / 2) * coef(mu, t, deriv);
            out.values.push_back(std::move(v));
        }
        return out;
    }

    // sum over modes of |c|^2 * (time L^2 mass) * (1+j^2)^tpow * (1+m^2)^spow
    double fourier_sq(double tpow, double spow) const {
        double s = 0;
        for (std::size_t mu = 0; mu < wn.size(); ++mu) {
            for (std::size_t j = 0; j < ca[mu].size(); ++j) {
                const double mass = j == 0 ? 2 * M_PI * ca[mu][j] * ca[mu][j]
                                           : M_PI * (ca[mu][j] * ca[mu][j] + cb[mu][j] * cb[mu][j]);
                s += mass * std::pow(1.0 + double(j * j), tpow) * std::pow(1.0 + wn[mu] * wn[mu], spow);
            }
        }
        return s;
    }
};

}  // namespace

MixedReport check_mixed_derivative(double theta, int trials, const MixedOptions& opt) {
    if (!(theta > 0 && theta < 1)) fail("check_mixed_derivative", "theta must lie in (0,1)");
    if (trials < 1) fail("check_mixed_derivative", "trials must be >= 1");
    if (opt.time_modes < 1 || opt.space_modes < 0) fail("check_mixed_derivative", "bad band limits");
    if (!(opt.s1 > opt.s0)) fail("check_mixed_derivative", "need s1 > s0");

    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> N(0, 1);
    std::uniform_int_distribution<int> pick_j(1, opt.time_modes);
    std::uniform_int_distribution<int> pick_m(0, opt.space_modes);

    const double s_theta = (1 - theta) * opt.s0 + theta * opt.s1;
    const auto grid = TimeGrid::uniform(0, 2 * M_PI, std::max(opt.time_cells, 4));

    MixedReport rep;
    for (int k = 0; k < trials; ++k) {
        BandField F;
        for (int m = 0; m <= opt.space_modes; ++m) {
            F.wn.push_back(m);
            if (m > 0) F.wn.push_back(m);
        }
        const std::size_t J = opt.time_modes + 1;
        F.ca.assign(F.wn.size(), std::vector<double>(J, 0.0));
        F.cb.assign(F.wn.size(), std::vector<double>(J, 0.0));
        if (opt.single_mode) {
            const int m = pick_m(rng);
            const std::size_t mu = m == 0 ? 0 : 2 * m - 1;
            F.ca[mu][pick_j(rng)] = 1.0;
        } else if (!opt.zero_field) {
            for (std::size_t mu = 0; mu < F.wn.size(); ++mu)
                for (std::size_t j = 0; j < J; ++j) {
                    F.ca[mu][j] = N(rng);
                    if (j > 0) F.cb[mu][j] = N(rng);
                }
        }

        double lhs, a0, a1;
        if (opt.time_norm == TimeNorm::fourier) {
            lhs = std::sqrt(F.fourier_sq(theta, s_theta));
            a0 = std::sqrt(F.fourier_sq(0, opt.s0));
            a1 = std::sqrt(F.fourier_sq(1, opt.s1));
        } else {
            const PowerWeight w{0, 0};
            auto ft = F.sample_in(grid, s_theta, false);
            const double l2 = weighted_lp_norm(ft, 2, w);
            const double semi = slobodeckij_seminorm(ft, theta, 2, w);
            lhs = std::sqrt(l2 * l2 + semi * semi);
            a0 = weighted_lp_norm(F.sample_in(grid, opt.s0, false), 2, w);
            const double b0 = weighted_lp_norm(F.sample_in(grid, opt.s1, false), 2, w);
            const double b1 = weighted_lp_norm(F.sample_in(grid, opt.s1, true), 2, w);
            a1 = std::sqrt(b0 * b0 + b1 * b1);
        }
        const double den = std::pow(a0, 1 - theta) * std::pow(a1, theta);
        rep.ratios.push_back(den > 0 ? lhs / den : (lhs == 0 ? 0.0 : INFINITY));
    }
    rep.max_constant = *std::max_element(rep.ratios.begin(), rep.ratios.end());
    rep.pass = std::isfinite(rep.max_constant);
    if (opt.time_norm == TimeNorm::fourier) rep.pass = rep.pass && rep.max_constant <= 1 + 1e-12;
    return rep;
}

MonomialInterpolationReport check_monomial_interpolation(double psi, double p, double kappa, double delta,
                                                         double zeta, double theta, int cells) {
    const std::string fn = "check_monomial_interpolation";
    check_kappa(fn, p, kappa);
    if (!(theta > 0 && theta < 1)) fail(fn, "theta must lie in (0,1)");
    const auto grid = TimeGrid::graded(0, 1, cells, 2.0);
    const PowerWeight w{0, kappa}, flat{0, 0};

    MonomialInterpolationReport rep;
    for (double a : {0.1, 0.3, 0.5, 0.7, 1.0}) {
        auto f = sample([a](double t) { return std::pow(t, a); }, grid);
        const double lzeta = weighted_lp_norm(f, zeta, w);
        const double lp_flat = weighted_lp_norm(f, p, flat);
        const double lp_w = weighted_lp_norm(f, p, w);
        const double semi = slobodeckij_seminorm(f, theta, p, w);
        const double h_theta = std::pow(std::pow(lp_w, p) + std::pow(semi, p), 1.0 / p);
        for (int m : {1, 2}) {
            // ||cos(m .)||_{H^s(T)} in the 1D scale X_theta = H^{-1+2 theta}
            auto S = [m](double th) { return std::sqrt(M_PI) * std::pow(1.0 + m * m, (-1 + 2 * th) / 2); };
            const double lhs = S(psi) * lzeta;
            const double mr = std::pow(std::pow(S(1 - theta) * h_theta, p) + std::pow(S(1) * lp_w, p), 1.0 / p);
            const double lp = S(1 - kappa / p) * lp_flat;
            const double r = lhs / (std::pow(mr, 1 - delta) * std::pow(lp, delta));
            rep.ratios.push_back(r);
            rep.max_ratio = std::max(rep.max_ratio, r);
        }
    }
    return rep;
}

}  // namespace critspde
