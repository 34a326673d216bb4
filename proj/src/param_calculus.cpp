#include "critspde/param_calculus.hpp"

#include <stdexcept>

namespace critspde {

namespace {

void require(bool cond, const std::string& where, const std::string& msg) {
    if (!cond) throw std::runtime_error("param_calculus." + where + ": " + msg);
}

Q c_of(const Setting& s) { return s.c(); }

XEntry make_entry(const SobolevScale& sc, const Q& time_exp, const Q& theta) {
    return XEntry{time_exp, theta, sc.smoothness(theta), sc.q};
}

}  // namespace

bool weight_admissible(const Q& p, const Q& kappa) {
    if (p < 2) return false;
    if (p == 2) return kappa == 0;
    return kappa >= 0 && kappa < p / 2 - 1;
}

void validate_setting(const Setting& s) {
    require(s.scale.high > s.scale.low, "validate_setting", "scale needs high > low");
    require(s.scale.q > 1, "validate_setting", "scale needs q > 1");
    require(s.p >= 2, "validate_setting", "p must be >= 2");
    require(weight_admissible(s.p, s.kappa), "validate_setting",
            "weight " + to_string(s.kappa) + " not admissible for p = " + to_string(s.p));
}

std::vector<GrowthSpec::Labeled> GrowthSpec::all_terms() const {
    std::vector<Labeled> out;
    for (std::size_t i = 0; i < f_terms.size(); ++i)
        out.push_back({"F" + std::to_string(i + 1), f_terms[i]});
    for (std::size_t i = 0; i < g_terms.size(); ++i)
        out.push_back({"G" + std::to_string(i + 1), g_terms[i]});
    return out;
}

BesovDescriptor trace_space(const Setting& s) {
    const auto& sc = s.scale;
    return BesovDescriptor{sc.high - (sc.high - sc.low) * c_of(s), sc.q, s.p};
}

std::string to_string(WindowStatus w) {
    switch (w) {
        case WindowStatus::inside: return "inside";
        case WindowStatus::below_liftable: return "below_liftable";
        case WindowStatus::outside: return "outside";
    }
    return "unknown";
}

SlackReport subcriticality(const GrowthSpec& g, const Setting& s) {
    validate_setting(s);
    auto terms = g.all_terms();
    require(!terms.empty(), "subcriticality", "growth spec has no terms");
    const Q c = c_of(s);
    const Q lo = 1 - c;

    SlackReport rep;
    bool any_zero = false, all_nonneg = true, window_ok = true;
    for (const auto& [label, t] : terms) {
        TermSlack ts;
        ts.label = label;
        ts.term = t;
        ts.slack = 1 - (t.rho * (t.phi - 1 + c) + t.beta);
        if (t.rho > 0) ts.headroom = ts.slack / t.rho;

        if (t.rho < 0) {
            ts.window = WindowStatus::outside;
            ts.diagnostic = "rho must be >= 0";
        } else if (t.phi > lo && t.phi < 1 && t.beta > lo && t.beta <= t.phi) {
            ts.window = WindowStatus::inside;
        } else if (t.phi <= lo && t.beta <= lo && t.beta <= t.phi) {
            // Increasing phi and beta up to the window keeps the estimate valid.
            ts.window = WindowStatus::below_liftable;
            ts.diagnostic = "phi, beta <= 1-(1+kappa)/p = " + to_string(lo) + "; liftable into the window";
        } else {
            ts.window = WindowStatus::outside;
            ts.diagnostic = "need phi in (" + to_string(lo) + ", 1) and beta in (" + to_string(lo) +
                            ", phi]; got phi = " + to_string(t.phi) + ", beta = " + to_string(t.beta);
        }
        if (ts.window == WindowStatus::outside) window_ok = false;
        if (ts.slack < 0) all_nonneg = false;
        if (ts.slack == 0 && ts.window == WindowStatus::inside) any_zero = true;
        rep.terms.push_back(std::move(ts));
    }
    rep.window_ok = window_ok;
    rep.all_subcritical_or_critical = all_nonneg;
    rep.is_critical = window_ok && all_nonneg && any_zero;
    return rep;
}

CriticalWeight critical_weight(const GrowthSpec& g, const Q& p) {
    require(p >= 2, "critical_weight", "p must be >= 2");
    CriticalWeight out;
    std::optional<Q> best;
    std::vector<std::pair<std::string, Q>> per_term;
    for (const auto& [label, t] : g.all_terms()) {
        if (t.rho <= 0) continue;
        // rho (phi - 1 + c) + beta = 1  <=>  c = (1 - beta)/rho + 1 - phi
        Q c = (1 - t.beta) / t.rho + 1 - t.phi;
        Q kappa = p * c - 1;
        per_term.emplace_back(label, kappa);
        if (!best || kappa < *best) best = kappa;
    }
    if (!best) return out;
    for (const auto& [label, k] : per_term)
        if (k == *best) out.binding.push_back(label);
    if (!weight_admissible(p, *best)) {
        out.binding.clear();
        return out;
    }
    out.kappa = best;
    return out;
}

std::vector<RhoStarTerm> rho_star_and_x_exponents(const GrowthSpec& g, const Setting& s) {
    validate_setting(s);
    const Q c = c_of(s);
    std::vector<RhoStarTerm> out;
    for (const auto& [label, t] : g.all_terms()) {
        Q d = t.phi - 1 + c;
        require(d > 0, "rho_star_and_x_exponents",
                label + ": phi - 1 + (1+kappa)/p = " + to_string(d) + " must be > 0");
        require(t.beta > 1 - c, "rho_star_and_x_exponents",
                label + ": beta must exceed 1-(1+kappa)/p");
        require(t.beta <= 1, "rho_star_and_x_exponents", label + ": beta must be <= 1");
        RhoStarTerm r;
        r.label = label;
        r.rho_star = (1 - t.beta) / d;
        r.r_inv = (t.beta - 1 + c) / c;
        r.r_conj_inv = r.rho_star * d / c;
        r.r = 1 / r.r_inv;
        r.x_entries.push_back(make_entry(s.scale, s.p * *r.r, t.beta));
        if (r.r_conj_inv > 0) {
            r.r_conj = 1 / r.r_conj_inv;
            r.x_entries.push_back(make_entry(s.scale, r.rho_star * s.p * *r.r_conj, t.phi));
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<StarTerm> star_params(const GrowthSpec& g, const Setting& s) {
    require(s.p >= 2, "star_params", "p must be >= 2");
    require(s.kappa >= 0 && s.kappa < s.p - 1, "star_params", "kappa must lie in [0, p-1)");
    const Q c = c_of(s);
    std::vector<StarTerm> out;
    for (const auto& [label, t] : g.all_terms()) {
        StarTerm st;
        st.label = label;
        Q d = t.phi - 1 + c;
        if (t.rho > 0) {
            st.rho_eff = t.rho;
            if (t.rho * d + t.phi >= 1) {
                st.case_id = 1;
                st.phi_star = t.phi;
                st.beta_star = 1 - t.rho * d;
            } else {
                st.case_id = 2;
                st.phi_star = st.beta_star = 1 - t.rho / (t.rho + 1) * c;
            }
        } else {
            require(t.phi < 1, "star_params", label + ": phi must be < 1 when rho = 0");
            Q cap = 1 + s.kappa;
            if (d > 0) cap = q_min(cap, (1 - t.phi) / d);
            Q eps = cap / 2;
            st.rho_replaced = true;
            st.rho_eff = eps;
            st.case_id = 2;
            st.phi_star = st.beta_star = 1 - eps / (eps + 1) * c;
        }
        st.xi_conj_inv = st.rho_eff * (st.phi_star - 1 + c) / c;
        st.xi_inv = (st.beta_star - 1 + c) / c;
        if (st.xi_inv > 0)
            st.x_star_entries.push_back(make_entry(s.scale, s.p / st.xi_inv, st.beta_star));
        if (st.xi_conj_inv > 0)
            st.x_star_entries.push_back(make_entry(s.scale, st.rho_eff * s.p / st.xi_conj_inv, st.phi_star));
        out.push_back(std::move(st));
    }
    return out;
}

std::vector<StarTerm> xi_exponents(const GrowthSpec& g, const Setting& s) { return star_params(g, s); }

InterpolationExponents interpolation_exponents(const Q& psi, const Q& p, const Q& kappa) {
    require(p > 1, "interpolation_exponents", "p must be > 1");
    require(kappa >= 0 && kappa < p - 1, "interpolation_exponents", "kappa must lie in [0, p-1)");
    const Q c = (1 + kappa) / p;
    require(psi > 1 - c && psi < 1, "interpolation_exponents",
            "psi = " + to_string(psi) + " outside (" + to_string(1 - c) + ", 1)");
    InterpolationExponents ie;
    const Q gap = psi - 1 + c;
    ie.zeta = (1 + kappa) / gap;
    const Q case1_lo = 1 - c * (1 + kappa) / (2 + kappa);
    const Q case2_hi = 1 - kappa / p;
    if (kappa == 0) {
        ie.case_id = 3;
        ie.delta = 1;
        ie.phi = p * (psi - 1 + 1 / p);
        ie.theta0 = 0;
    } else if (psi > case1_lo) {
        ie.case_id = 1;
        ie.delta = 1 - p / (1 + kappa) * gap;
        ie.phi = 1;
        ie.theta0 = kappa / p - (1 + kappa) * (psi - 1 + kappa / p) / (p * gap);
        ie.case2_also_applies = psi <= case2_hi;
    } else {
        ie.case_id = 2;
        ie.delta = kappa / (kappa + 1);
        ie.phi = p * gap;
        ie.theta0 = kappa / p;
    }
    ie.inequality_holds = (1 - ie.delta) * ie.phi <= p / (1 + kappa) * gap;
    return ie;
}

SerrinResult serrin_applicable(const GrowthSpec& g, const Setting& s, bool revised) {
    require(s.p >= 2, "serrin_applicable", "p must be >= 2");
    require(s.kappa >= 0 && s.kappa < s.p - 1, "serrin_applicable", "kappa must lie in [0, p-1)");
    SerrinResult res;
    res.applicable = true;
    if (!revised) {
        for (const auto& [label, t] : g.all_terms()) {
            SerrinTerm st{label, false, ""};
            if (t.beta != t.phi) {
                st.reason = "beta != phi";
            } else if (s.kappa > 0) {
                st.ok = t.rho < 1 + s.kappa;
                st.reason = "rho = " + to_string(t.rho) + (st.ok ? " < " : " >= ") + "1+kappa = " +
                            to_string(1 + s.kappa);
            } else {
                st.ok = t.rho <= 1;
                st.reason = "kappa = 0, rho = " + to_string(t.rho) + (st.ok ? " <= 1" : " > 1");
            }
            res.applicable = res.applicable && st.ok;
            res.terms.push_back(std::move(st));
        }
        return res;
    }
    const Q c = c_of(s);
    if (s.kappa == 0) {
        for (const auto& [label, t] : g.all_terms()) {
            SerrinTerm st{label, t.rho <= 1, ""};
            st.reason = "kappa = 0, rho = " + to_string(t.rho) + (st.ok ? " <= 1" : " > 1");
            res.applicable = res.applicable && st.ok;
            res.terms.push_back(std::move(st));
        }
        return res;
    }
    const Q thr = 1 - c * (1 + s.kappa) / (2 + s.kappa);
    for (const auto& st0 : star_params(g, s)) {
        SerrinTerm st{st0.label, st0.beta_star > thr && st0.phi_star > thr, ""};
        st.reason = "beta* = " + to_string(st0.beta_star) + ", phi* = " + to_string(st0.phi_star) +
                    (st.ok ? " > " : " not both > ") + to_string(thr);
        res.applicable = res.applicable && st.ok;
        res.terms.push_back(std::move(st));
    }
    return res;
}

PerturbationMargin perturbation_margin(const Q& c_det, const Q& c_sto, const Q& c_a, const Q& c_b) {
    require(c_det >= 0 && c_sto >= 0 && c_a >= 0 && c_b >= 0, "perturbation_margin",
            "constants must be nonnegative");
    PerturbationMargin m;
    m.delta = c_det * c_a + c_sto * c_b;
    m.ok = m.delta < 1;
    return m;
}

Clause criterion_select(bool semilinear, bool is_critical, bool have_sup_bound, bool have_lp_bound) {
    if (!semilinear) {
        if (!is_critical)
            return {2, "blow_up_non_critical", "clause (2): sup-norm of u in the trace space"};
        if (have_lp_bound)
            return {3, "blow_up_lp_critical",
                    "clause (3): control of ‖u‖_{L^p(0,σ;X_{1−κ/p})}"};
        return {1, "blow_up_nonlinearity_functional", "clause (1): blow-up functional N_c^kappa"};
    }
    if (!have_sup_bound) return {0, "semilinear_functional_or_serrin", "clause (1) or Serrin criterion"};
    if (!is_critical) return {2, "semilinear_non_critical", "clause (2): bounded trace-space norm"};
    return {3, "semilinear_lp_critical",
            "clause (3): bounded ‖u‖_{L^p(0,σ;X_{1−κ/p})}"};
}

OneDGrowth one_d_growth_params(const OneDParams& v, const Q& nu) {
    require(nu > 0 && nu <= 2, "one_d_growth_params", "nu must lie in (0, 2]");
    OneDGrowth out;
    Q phi;
    switch (v.variant) {
        case OneDVariant::L2_eps:
            require(v.eps >= 0 && v.eps < Q(1, 2), "one_d_growth_params", "eps must lie in [0, 1/2)");
            out.scale = SobolevScale{-1 - v.eps, 1 - v.eps, 2};
            phi = Q(2, 3) + v.eps / 3;
            break;
        case OneDVariant::Lzeta:
            require(v.zeta > 2, "one_d_growth_params", "zeta must be > 2");
            out.scale = SobolevScale{-1, 1, v.zeta};
            phi = Q(1, 2) + 1 / (3 * v.zeta);
            break;
        case OneDVariant::rough:
            require(v.s > 0 && v.s < Q(1, 3), "one_d_growth_params", "s must lie in (0, 1/3)");
            require(v.q > 2, "one_d_growth_params", "q must be > 2");
            require(v.q < 2 / v.s, "one_d_growth_params", "q must be < 2/s");
            out.scale = SobolevScale{-1 - v.s, 1 - v.s, v.q};
            phi = (1 / v.q + v.s) / 3 + Q(1, 2);
            break;
    }
    out.growth.f_terms.push_back({2, phi, phi});
    out.growth.g_terms.push_back({2 - nu, phi, phi});
    return out;
}

}  // namespace critspde
