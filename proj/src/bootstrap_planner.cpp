#include "critspde/bootstrap_planner.hpp"

#include <stdexcept>

namespace critspde {

namespace {

std::string qstr(const Q& q) { return to_string(q); }

void add(BootstrapStep& st, std::string name, bool pass, std::string witness) {
    st.checks.push_back(Check{std::move(name), pass, std::move(witness)});
}

void add_embed(BootstrapStep& st, const std::string& name, const SpaceDesc& a, const SpaceDesc& b) {
    std::string w;
    bool ok = embeds(a, b, &w);
    add(st, name, ok, w);
}

// Adds a check that the target setting's weight is admissible.
void add_weight_check(BootstrapStep& st, const std::string& name, const Q& r, const Q& alpha) {
    add(st, name, weight_admissible(r, alpha),
        "alpha = " + qstr(alpha) + " in [0, " + qstr(r / 2 - 1) + ") at r = " + qstr(r));
}

bool non_critical(const SlackReport& rep) {
    if (!rep.window_ok) return false;
    for (const auto& t : rep.terms)
        if (t.slack <= 0) return false;
    return true;
}

std::string slack_witness(const SlackReport& rep) {
    std::string w;
    for (const auto& t : rep.terms) {
        if (!w.empty()) w += "; ";
        w += t.label + " slack " + qstr(t.slack) + " (" + to_string(t.window) + ")";
    }
    return w;
}

Q max_phi(const GrowthSpec& g) {
    auto terms = g.all_terms();
    if (terms.empty()) throw std::runtime_error("bootstrap_planner: growth spec has no terms");
    Q m = terms.front().term.phi;
    for (const auto& t : terms) m = q_max(m, t.term.phi);
    return m;
}

SlackReport safe_slack(const GrowthSpec& g, const Setting& s, bool& valid) {
    try {
        valid = true;
        return subcriticality(g, s);
    } catch (const std::exception&) {
        valid = false;
        return {};
    }
}

}  // namespace

std::string render(const SpaceDesc& d) {
    if (d.kind == SpaceDesc::Kind::bessel) return "H^{" + qstr(d.smoothness) + "," + qstr(d.q) + "}";
    return "B^{" + qstr(d.smoothness) + "}_{" + qstr(d.q) + "," + qstr(d.fine) + "}";
}

bool embeds(const SpaceDesc& a, const SpaceDesc& b, std::string* witness) {
    const bool both_bessel = a.kind == SpaceDesc::Kind::bessel && b.kind == SpaceDesc::Kind::bessel;
    const bool both_besov = a.kind == SpaceDesc::Kind::besov && b.kind == SpaceDesc::Kind::besov;
    const bool fine_ok = both_bessel || (both_besov && a.fine <= b.fine);
    bool ok;
    std::string w;
    if (a.q >= b.q) {
        ok = a.smoothness > b.smoothness || (a.smoothness == b.smoothness && fine_ok);
        w = "smoothness " + qstr(a.smoothness) + " vs " + qstr(b.smoothness);
    } else {
        Q da = a.smoothness - 1 / a.q, db = b.smoothness - 1 / b.q;
        ok = da > db || (da == db && fine_ok);
        w = "s - 1/q: " + qstr(da) + " vs " + qstr(db);
    }
    if (witness) *witness = render(a) + " -> " + render(b) + ": " + w;
    return ok;
}

SpaceDesc scale_space(const SobolevScale& sc, const Q& theta) {
    return SpaceDesc::bessel(sc.smoothness(theta), sc.q);
}

SpaceDesc trace_desc(const SobolevScale& sc, const Q& r, const Q& alpha) {
    return SpaceDesc::besov(sc.smoothness(1 - (1 + alpha) / r), sc.q, r);
}

std::string to_string(Rule r) {
    switch (r) {
        case Rule::weight_insertion: return "weight_insertion";
        case Rule::time_bootstrap: return "time_bootstrap";
        case Rule::space_bootstrap: return "space_bootstrap";
        case Rule::extrapolation: return "extrapolation";
    }
    return "unknown";
}

bool BootstrapStep::ok() const {
    if (checks.empty()) return false;
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

std::vector<std::string> BootstrapStep::failures() const {
    std::vector<std::string> out;
    for (const auto& c : checks)
        if (!c.pass) out.push_back(c.name + " [" + c.witness + "]");
    return out;
}

void require_ok(const BootstrapStep& step) {
    if (step.ok()) return;
    std::string msg = "bootstrap_planner." + to_string(step.rule) + ": failed checks:";
    for (const auto& f : step.failures()) msg += " " + f + ";";
    throw std::runtime_error(msg);
}

BootstrapStep plan_weight_insertion(const Setting& from, const Q& r, const Q& delta, const GrowthSpec& g,
                                    const std::optional<GrowthSpec>& target_growth) {
    BootstrapStep st;
    st.rule = Rule::weight_insertion;
    st.from = from;
    const Q p = from.p;
    const Q mphi = max_phi(g);

    add(st, "source_unweighted", from.kappa == 0, "kappa = " + qstr(from.kappa));
    add(st, "delta_window", delta >= 0 && delta < 1 - mphi,
        "delta = " + qstr(delta) + " in [0, " + qstr(1 - mphi) + ")");
    add(st, "p_gt_2_when_delta_zero", delta > 0 || p > 2, "delta = " + qstr(delta) + ", p = " + qstr(p));
    add(st, "r_gt_2", r > 2, "r = " + qstr(r));

    const Q alpha = r * (1 / p - delta) - 1;
    add_weight_check(st, "alpha_window", r, alpha);
    add(st, "integrability_vs_max_phi", 1 / r >= mphi - 1 + 1 / p,
        "1/r = " + qstr(1 / r) + " >= max phi - 1 + 1/p = " + qstr(mphi - 1 + 1 / p));

    const Q shift = delta * (from.scale.high - from.scale.low);
    st.to = Setting{SobolevScale{from.scale.low - shift, from.scale.high - shift, from.scale.q}, r, alpha};

    const GrowthSpec* tg = target_growth ? &*target_growth : (delta == 0 ? &g : nullptr);
    if (tg && weight_admissible(r, alpha)) {
        auto rep = subcriticality(*tg, st.to);
        add(st, "target_growth_admissible", rep.window_ok && rep.all_subcritical_or_critical,
            slack_witness(rep));
    } else if (!tg) {
        add(st, "target_growth_admissible", false, "no growth supplied for the shifted scale");
    }
    return st;
}

BootstrapStep plan_time_bootstrap(const Setting& from, const Q& r_hat, const GrowthSpec& g) {
    BootstrapStep st;
    st.rule = Rule::time_bootstrap;
    st.from = from;
    const Q r = from.p, alpha = from.kappa;
    const Q c = (1 + alpha) / r;

    add(st, "alpha_positive", alpha > 0, "alpha = " + qstr(alpha));
    add(st, "r_hat_ge_r", r_hat >= r, "r_hat = " + qstr(r_hat) + ", r = " + qstr(r));

    bool valid = false;
    auto src = safe_slack(g, from, valid);
    add(st, "source_growth_admissible", valid && src.window_ok && src.all_subcritical_or_critical,
        valid ? slack_witness(src) : "source setting invalid");

    Q two_eps = alpha / r;
    for (const auto& t : g.all_terms()) two_eps = q_min(two_eps, t.term.beta - 1 + c);
    const Q eps = two_eps / 2;
    st.eps = eps;

    Q lo = r_hat * (c - eps) - 1;
    Q hi = r_hat * c - 1;
    lo = q_max(lo, 0);
    hi = q_min(hi, r_hat / 2 - 1);
    const bool nonempty = eps > 0 && lo < hi;
    add(st, "alpha_hat_interval", nonempty,
        "eps = " + qstr(eps) + ", interval (" + qstr(lo) + ", " + qstr(hi) + ")");
    const Q alpha_hat = nonempty ? (lo + hi) / 2 : Q(0);
    st.to = Setting{from.scale, r_hat, alpha_hat};
    add_weight_check(st, "alpha_hat_window", r_hat, alpha_hat);

    if (nonempty && weight_admissible(r_hat, alpha_hat)) {
        auto rep = subcriticality(g, st.to);
        add(st, "target_strictly_subcritical", non_critical(rep), slack_witness(rep));
    }
    st.emb_case = emb_condition(r, alpha, r_hat, alpha_hat);
    add(st, "emb_condition", st.emb_case.has_value(),
        st.emb_case ? "case " + std::to_string(*st.emb_case) : "no case applies");
    return st;
}

std::optional<int> emb_condition(const Q& r, const Q& alpha, const Q& r_hat, const Q& alpha_hat,
                                 const std::optional<Q>& eps) {
    const Q c = (1 + alpha) / r, c_hat = (1 + alpha_hat) / r_hat;
    if (r == r_hat && alpha == alpha_hat) return 1;
    if (c_hat < c) return 2;
    if (eps && *eps > 0 && *eps < Q(1, 2) - c) {
        if (c_hat < c + *eps) return 3;
        if (r == r_hat && c_hat == c + *eps) return 4;
    }
    return std::nullopt;
}

BootstrapStep plan_space_bootstrap(const Setting& from, const Setting& to, const GrowthSpec& target_growth,
                                   const std::optional<Q>& eps_in) {
    BootstrapStep st;
    st.rule = Rule::space_bootstrap;
    st.from = from;
    st.to = to;
    const auto& Y = from.scale;
    const auto& Yh = to.scale;
    const Q r = from.p, alpha = from.kappa, r_hat = to.p, alpha_hat = to.kappa;

    add_embed(st, "Y_hat_0_into_Y_0", scale_space(Yh, 0), scale_space(Y, 0));
    add_embed(st, "Y_hat_1_into_Y_1", scale_space(Yh, 1), scale_space(Y, 1));
    add(st, "r_hat_ge_r", r_hat >= r, "r_hat = " + qstr(r_hat) + ", r = " + qstr(r));
    add_weight_check(st, "alpha_window", r, alpha);
    add_weight_check(st, "alpha_hat_window", r_hat, alpha_hat);
    add_embed(st, "trace_embedding", trace_desc(Y, r, 0), trace_desc(Yh, r_hat, alpha_hat));

    std::optional<Q> eps = eps_in;
    if (!eps && r == r_hat && alpha_hat > alpha) eps = (alpha_hat - alpha) / r;
    st.eps = eps;
    st.emb_case = emb_condition(r, alpha, r_hat, alpha_hat, eps);
    add(st, "emb_condition", st.emb_case.has_value(),
        st.emb_case ? "case " + std::to_string(*st.emb_case) : "no case applies");
    if (st.emb_case && (*st.emb_case == 3 || *st.emb_case == 4)) {
        add_embed(st, "Y_hat_1_minus_eps_into_Y_1", scale_space(Yh, 1 - *eps), scale_space(Y, 1));
        add_embed(st, "Y_hat_0_into_Y_eps", scale_space(Yh, 0), scale_space(Y, *eps));
    }

    if (weight_admissible(r_hat, alpha_hat)) {
        bool valid = false;
        auto rep = safe_slack(target_growth, to, valid);
        add(st, "target_non_critical", valid && non_critical(rep), valid ? slack_witness(rep) : "invalid target");
    }
    return st;
}

BootstrapStep check_extrapolation(const Setting& from_y, const Setting& via_y_hat, const Setting& base_x) {
    BootstrapStep st;
    st.rule = Rule::extrapolation;
    st.from = from_y;
    st.to = via_y_hat;
    const auto& Y = from_y.scale;
    const auto& Yh = via_y_hat.scale;
    const Q r_hat = via_y_hat.p;

    add_embed(st, "Y_hat_0_into_Y_0", scale_space(Yh, 0), scale_space(Y, 0));
    add_embed(st, "Y_hat_1_into_Y_1", scale_space(Yh, 1), scale_space(Y, 1));
    const Q need = q_max(from_y.p, base_x.p);
    add(st, "r_hat_ge_r_and_p", r_hat >= need, "r_hat = " + qstr(r_hat) + " >= " + qstr(need));
    add_embed(st, "trace_into_base_trace", trace_desc(Yh, r_hat, 0),
              trace_desc(base_x.scale, base_x.p, base_x.kappa));
    add_embed(st, "Y_hat_1_into_X_1_minus_kappa_over_p", scale_space(Yh, 1),
              scale_space(base_x.scale, 1 - base_x.kappa / base_x.p));
    return st;
}

bool BootstrapChain::ok() const {
    if (steps.empty()) return false;
    for (const auto& s : steps)
        if (!s.ok()) return false;
    for (const auto& c : composition)
        if (!c.pass) return false;
    return true;
}

namespace {

void compose(BootstrapChain& ch) {
    const BootstrapStep* prev = nullptr;
    for (const auto& s : ch.steps) {
        if (s.rule == Rule::extrapolation) continue;
        if (prev) {
            std::string w;
            bool ok = embeds(trace_desc(prev->to.scale, prev->to.p, 0),
                             trace_desc(s.from.scale, s.from.p, s.from.kappa), &w);
            ch.composition.push_back(Check{"compose_" + prev->tag + "_" + s.tag, ok, w});
        }
        prev = &s;
    }
}

RegularityClaim make_claim(const Q& r_hat, const Q& zeta) {
    RegularityClaim c;
    c.theta_sup = Q(1, 2);
    c.time_exponent = r_hat;
    c.space_offset = 1;
    c.space_q = zeta;
    c.text = "u in H^{theta," + qstr(r_hat) + "}_loc(I_sigma; H^{1-2theta," + qstr(zeta) +
             "}(T)) for all theta in [0, 1/2)";
    return c;
}

GrowthSpec growth_of(OneDParams v, const Q& nu) { return one_d_growth_params(v, nu).growth; }

}  // namespace

BootstrapChain full_chain_l2(const L2ChainOptions& opt) {
    if (!(opt.eps > 0 && opt.eps < Q(1, 3)))
        throw std::runtime_error("bootstrap_planner.full_chain_l2: eps must lie in (0, 1/3)");
    if (opt.r_hat < 6) throw std::runtime_error("bootstrap_planner.full_chain_l2: r_hat must be >= 6");
    if (opt.zeta <= 2) throw std::runtime_error("bootstrap_planner.full_chain_l2: zeta must be > 2");

    BootstrapChain ch;
    ch.variant = "l2_start";
    OneDParams l2_0;
    OneDParams l2_e;
    l2_e.eps = opt.eps;
    OneDParams lz;
    lz.variant = OneDVariant::Lzeta;
    lz.zeta = opt.zeta;
    const auto g0 = growth_of(l2_0, opt.nu);
    const auto ge = growth_of(l2_e, opt.nu);
    const auto gz = growth_of(lz, opt.nu);
    const SobolevScale X{-1, 1, 2};

    auto a = plan_weight_insertion(Setting{X, 2, 0}, 6, opt.eps / 2, g0, ge);
    a.tag = "2a";
    auto b = plan_time_bootstrap(a.to, opt.r_hat, ge);
    b.tag = "2b";
    const Q r = opt.r_hat;
    auto c = plan_space_bootstrap(Setting{a.to.scale, r, 0}, Setting{X, r, r * opt.eps / 2}, g0, opt.eps / 2);
    c.tag = "2c";
    const Q a_hat = r / 4;
    const Q a_mid = (a_hat + r / 2 - 1) / 2;
    auto d = plan_space_bootstrap(Setting{X, r, a_mid}, Setting{SobolevScale{-1, 1, opt.zeta}, r, a_hat}, gz);
    d.tag = "4";
    ch.steps = {a, b, c, d};
    compose(ch);
    ch.claim = make_claim(r, opt.zeta);
    return ch;
}

BootstrapChain full_chain_rough(const RoughChainOptions& opt) {
    const Q s = opt.s, q = opt.q, p = opt.p;
    auto fail = [](const std::string& m) { throw std::runtime_error("bootstrap_planner.full_chain_rough: " + m); };
    if (!(s > 0 && s < Q(1, 3))) fail("s must lie in (0, 1/3)");
    if (!(q > 2 && q < 2 / (1 - 2 * s))) fail("q must lie in (2, 2/(1-2s)) = (2, " + qstr(2 / (1 - 2 * s)) + ")");
    if (!(p > 2)) fail("p must be > 2");
    if (!(1 / p + 1 / (2 * q) <= (3 - 2 * s) / 4)) fail("need 1/p + 1/(2q) <= (3-2s)/4");
    if (opt.zeta < q || opt.zeta <= 2) fail("zeta must be >= q and > 2");

    OneDParams rv;
    rv.variant = OneDVariant::rough;
    rv.s = s;
    rv.q = q;
    const auto gr = growth_of(rv, opt.nu);
    auto cw = critical_weight(gr, p);
    if (!cw.kappa) fail("no admissible critical weight");
    const Q kappa = *cw.kappa;
    const Q r_hat = opt.r_hat ? *opt.r_hat : q_max(Q(24), 2 * p);

    BootstrapChain ch;
    ch.variant = "rough";
    const SobolevScale X{-1 - s, 1 - s, q};
    const Setting base{X, p, kappa};

    Setting start = base;
    if (kappa == 0) {
        const Q beta = gr.f_terms.front().beta;
        const Q r = 1 / (beta - 1 + 1 / p);
        auto w = plan_weight_insertion(base, r, 0, gr);
        w.tag = "2a";
        ch.steps.push_back(w);
        start = w.to;
    }
    auto tb = plan_time_bootstrap(start, r_hat, gr);
    tb.tag = "2b";
    ch.steps.push_back(tb);

    OneDParams lq;
    lq.variant = OneDVariant::Lzeta;
    lq.zeta = q;
    const SobolevScale Xq{-1, 1, q};
    auto s3 = plan_space_bootstrap(Setting{X, r_hat, 0}, Setting{Xq, r_hat, r_hat * s / 2}, growth_of(lq, opt.nu),
                                   s / 2);
    s3.tag = "3";
    ch.steps.push_back(s3);

    OneDParams lz;
    lz.variant = OneDVariant::Lzeta;
    lz.zeta = opt.zeta;
    const Q a_hat = r_hat / 4;
    auto s4 = plan_space_bootstrap(Setting{Xq, r_hat, (a_hat + r_hat / 2 - 1) / 2},
                                   Setting{SobolevScale{-1, 1, opt.zeta}, r_hat, a_hat}, growth_of(lz, opt.nu));
    s4.tag = "4";
    ch.steps.push_back(s4);

    auto ex = check_extrapolation(Setting{SobolevScale{-1, 1, 2}, 2, 0},
                                  Setting{SobolevScale{-1, 1, opt.zeta}, r_hat, a_hat}, base);
    ex.tag = "extrapolate";
    ch.steps.push_back(ex);
    compose(ch);
    ch.claim = make_claim(r_hat, opt.zeta);
    return ch;
}

}  // namespace critspde
