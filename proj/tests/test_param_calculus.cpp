#include "doctest.h"

#include "critspde/param_calculus.hpp"

#include <random>

using namespace critspde;

namespace {

Q qs(const char* s) { return parse_q(s); }

Setting l2_setting() { return Setting{SobolevScale{-1, 1, 2}, 2, 0}; }

GrowthSpec single(const Q& rho, const Q& phi, const Q& beta) {
    GrowthSpec g;
    g.f_terms.push_back({rho, phi, beta});
    return g;
}

}  // namespace

TEST_CASE("rational parsing is exact for fractions and decimals") {
    CHECK(parse_q("2/3") == Q(2, 3));
    CHECK(parse_q("-0.25") == Q(-1, 4));
    CHECK(parse_q("1e-3") == Q(1, 1000));
    CHECK(parse_q(" 7 ") == Q(7));
    CHECK(to_string(Q(6, 4)) == "3/2");
    CHECK(q_from_double(0.5) == Q(1, 2));
    CHECK_THROWS(parse_q("1/0"));
    CHECK_THROWS(parse_q("abc"));
}

TEST_CASE("trace space of the L2 setting is L2") {
    auto tr = trace_space(l2_setting());
    CHECK(tr.smoothness == 0);
    CHECK(tr.q == 2);
    CHECK(tr.p == 2);
}

TEST_CASE("trace space of the rough-data setting at the critical weight") {
    Setting s{SobolevScale{qs("-1.2"), qs("0.8"), qs("5/2")}, 4, qs("0.8")};
    auto tr = trace_space(s);
    CHECK(tr.smoothness == qs("-0.1"));
    CHECK(tr.smoothness == Q(1) / qs("5/2") - Q(1, 2));
}

TEST_CASE("trace smoothness increases toward high as p grows at zero weight") {
    Q prev = -100;
    for (int p = 2; p < 40; p += 3) {
        auto tr = trace_space(Setting{SobolevScale{-1, 1, 2}, p, 0});
        CHECK(tr.smoothness > prev);
        CHECK(tr.smoothness < 1);
        prev = tr.smoothness;
    }
}

TEST_CASE("subcriticality: quadratic-type L2 term is critical") {
    auto rep = subcriticality(single(2, Q(2, 3), Q(2, 3)), l2_setting());
    REQUIRE(rep.terms.size() == 1);
    CHECK(rep.terms[0].slack == 0);
    CHECK(rep.is_critical);
    CHECK(rep.window_ok);
    CHECK(rep.terms[0].window == WindowStatus::inside);
}

TEST_CASE("subcriticality: rho = 0 term has slack 1 - beta") {
    auto rep = subcriticality(single(0, Q(3, 4), Q(3, 4)), l2_setting());
    CHECK(rep.terms[0].slack == Q(1, 4));
    CHECK_FALSE(rep.is_critical);
    CHECK_FALSE(rep.terms[0].headroom.has_value());
}

TEST_CASE("subcriticality: L^zeta growth term at c = 0.4") {
    // phi = 1/2 + 1/(3*4) = 7/12 sits below the window 1 - c = 0.6, where the
    // term can be lifted; raw slack and the headroom in c are both reported.
    Setting s{SobolevScale{-1, 1, 4}, 5, 1};  // c = 2/5
    auto rep = subcriticality(single(2, Q(7, 12), Q(7, 12)), s);
    CHECK(rep.terms[0].slack == qs("0.45"));
    REQUIRE(rep.terms[0].headroom.has_value());
    CHECK(*rep.terms[0].headroom == qs("0.225"));
    CHECK(*rep.terms[0].headroom == (Q(3, 4) - Q(1, 8)) - qs("0.4"));
    CHECK(rep.terms[0].window == WindowStatus::below_liftable);
    CHECK_FALSE(rep.is_critical);
    CHECK(rep.window_ok);
}

TEST_CASE("subcriticality reports window violations") {
    auto rep = subcriticality(single(2, Q(2, 3), Q(3, 4)), l2_setting());  // beta > phi
    CHECK(rep.terms[0].window == WindowStatus::outside);
    CHECK_FALSE(rep.window_ok);
    CHECK_FALSE(rep.terms[0].diagnostic.empty());
}

TEST_CASE("critical weight for the rough-data problem") {
    OneDParams v;
    v.variant = OneDVariant::rough;
    v.s = qs("0.2");
    v.q = qs("5/2");
    auto g = one_d_growth_params(v, 1);
    auto cw = critical_weight(g.growth, 4);
    REQUIRE(cw.kappa.has_value());
    CHECK(*cw.kappa == qs("0.8"));
    REQUIRE(cw.binding.size() == 1);
    CHECK(cw.binding[0] == "F1");
}

TEST_CASE("critical weight of the L2 quadratic term is zero at p = 2") {
    auto cw = critical_weight(single(2, Q(2, 3), Q(2, 3)), 2);
    REQUIRE(cw.kappa.has_value());
    CHECK(*cw.kappa == 0);
}

TEST_CASE("critical weight is none for a supercritical spec") {
    auto cw = critical_weight(single(3, Q(2, 3), Q(2, 3)), 2);
    CHECK_FALSE(cw.kappa.has_value());
    auto cw4 = critical_weight(single(4, Q(9, 10), Q(9, 10)), 4);
    CHECK_FALSE(cw4.kappa.has_value());
}

TEST_CASE("critical weight zeroes a binding slack and is minimal") {
    GrowthSpec g;
    g.f_terms.push_back({2, Q(7, 10), Q(7, 10)});
    g.g_terms.push_back({1, Q(7, 10), Q(7, 10)});
    auto cw = critical_weight(g, 4);
    REQUIRE(cw.kappa.has_value());
    auto rep = subcriticality(g, Setting{SobolevScale{-1, 1, 2}, 4, *cw.kappa});
    CHECK(rep.is_critical);
    CHECK(rep.terms[0].slack == 0);
    CHECK(rep.terms[1].slack > 0);
}

TEST_CASE("rho star, r, r' and the X-space of the L2 problem") {
    auto t = rho_star_and_x_exponents(single(2, Q(2, 3), Q(2, 3)), l2_setting());
    REQUIRE(t.size() == 1);
    CHECK(t[0].rho_star == 2);
    CHECK(t[0].r == Q(3));
    CHECK(t[0].r_conj == Q(3, 2));
    CHECK(t[0].r_inv + t[0].r_conj_inv == 1);
    REQUIRE(t[0].x_entries.size() == 2);
    for (const auto& e : t[0].x_entries) {
        CHECK(e.time_exponent == 6);
        CHECK(e.space_smoothness == Q(1, 3));
        CHECK(e.space_q == 2);
    }
}

TEST_CASE("rho star rejects a degenerate denominator") {
    CHECK_THROWS(rho_star_and_x_exponents(single(1, Q(1, 2), Q(1, 2)), l2_setting()));
}

TEST_CASE("star parameters: case 1 at criticality") {
    auto st = star_params(single(2, Q(2, 3), Q(2, 3)), l2_setting());
    CHECK(st[0].case_id == 1);
    CHECK(st[0].phi_star == Q(2, 3));
    CHECK(st[0].beta_star == Q(2, 3));
    CHECK(st[0].xi_inv == Q(1, 3));
    CHECK(st[0].xi_conj_inv == Q(2, 3));
}

TEST_CASE("star parameters: case 2 value 0.875") {
    Setting s{SobolevScale{-1, 1, 2}, 4, 0};
    auto st = star_params(single(1, qs("0.6"), qs("0.6")), s);
    CHECK(st[0].case_id == 2);
    CHECK(st[0].phi_star == qs("0.875"));
    CHECK(st[0].beta_star == qs("0.875"));
    CHECK(st[0].rho_eff * (st[0].phi_star - 1 + s.c()) + st[0].beta_star == 1);
}

TEST_CASE("star parameters: rho = 0 replacement clears the threshold") {
    Setting s{SobolevScale{-1, 1, 2}, 6, 1};
    auto st = star_params(single(0, Q(4, 5), Q(4, 5)), s);
    CHECK(st[0].rho_replaced);
    CHECK(st[0].rho_eff > 0);
    CHECK(st[0].rho_eff < s.kappa + 1);
    Q thr = 1 - s.c() * (1 + s.kappa) / (2 + s.kappa);
    CHECK(st[0].phi_star > thr);
    CHECK(st[0].phi_star == st[0].beta_star);
}

TEST_CASE("xi exponents coincide with r at criticality and drift with small rho") {
    auto rs = rho_star_and_x_exponents(single(2, Q(2, 3), Q(2, 3)), l2_setting());
    auto xi = xi_exponents(single(2, Q(2, 3), Q(2, 3)), l2_setting());
    CHECK(xi[0].xi_inv == rs[0].r_inv);
    CHECK(xi[0].xi_conj_inv == rs[0].r_conj_inv);

    // Shrinking rho pushes 1/xi' toward 0 and 1/xi toward 1.
    Setting s{SobolevScale{-1, 1, 2}, 4, 0};
    Q prev_conj = 2;
    for (const char* rho : {"1", "1/2", "1/10", "1/100"}) {
        auto x = xi_exponents(single(qs(rho), qs("0.9"), qs("0.9")), s);
        CHECK(x[0].xi_conj_inv < prev_conj);
        CHECK(x[0].xi_inv + x[0].xi_conj_inv == 1);
        prev_conj = x[0].xi_conj_inv;
    }
    CHECK(prev_conj < Q(1, 50));
}

TEST_CASE("interpolation exponents: kappa = 0 uses the third case") {
    auto ie = interpolation_exponents(Q(2, 3), 2, 0);
    CHECK(ie.case_id == 3);
    CHECK(ie.zeta == 6);
    CHECK(ie.delta == 1);
    CHECK(ie.phi == Q(1, 3));
    CHECK(ie.inequality_holds);
}

TEST_CASE("interpolation exponents: boundary psi = 1 - kappa/p") {
    Q p = 4, k = 1;
    auto ie = interpolation_exponents(1 - k / p, p, k);
    CHECK(ie.delta == k / (k + 1));
    CHECK(ie.phi == 1);
    CHECK(ie.case2_also_applies);
    CHECK(ie.inequality_holds);
}

TEST_CASE("interpolation exponents: psi = 0.9, p = 4, kappa = 1") {
    auto ie = interpolation_exponents(qs("0.9"), 4, 1);
    CHECK(ie.case_id == 1);
    CHECK(ie.delta == qs("0.2"));
    CHECK(ie.phi == 1);
    CHECK(ie.zeta == 5);
    CHECK(ie.theta0 == qs("0.0625"));
    CHECK((1 - ie.delta) * ie.phi == Q(4, 2) * (qs("0.9") - 1 + Q(1, 2)));
}

TEST_CASE("interpolation exponents: low psi falls back to the second case") {
    // threshold 1 - (1/2)(2/3) = 2/3 at p = 4, kappa = 1
    auto ie = interpolation_exponents(qs("0.6"), 4, 1);
    CHECK(ie.case_id == 2);
    CHECK(ie.delta == Q(1, 2));
    CHECK(ie.phi == qs("0.4"));
    CHECK(ie.inequality_holds);
    CHECK_THROWS(interpolation_exponents(qs("0.5"), 4, 1));
    CHECK_THROWS(interpolation_exponents(1, 4, 1));
}

TEST_CASE("serrin conditions, plain and revised") {
    auto plain1 = serrin_applicable(single(1, qs("0.7"), qs("0.7")), l2_setting(), false);
    CHECK(plain1.applicable);
    Setting s8{SobolevScale{-1, 1, 2}, 4, qs("0.8")};
    auto plain2 = serrin_applicable(single(2, qs("0.7"), qs("0.7")), s8, false);
    CHECK_FALSE(plain2.applicable);
    Setting s62{SobolevScale{-1, 1, 2}, 6, 2};
    auto rev = serrin_applicable(single(2, Q(2, 3), Q(2, 3)), s62, true);
    CHECK(rev.applicable);
    auto st = star_params(single(2, Q(2, 3), Q(2, 3)), s62);
    CHECK(st[0].phi_star == Q(2, 3));
    CHECK(1 - s62.c() * Q(3, 4) == Q(5, 8));
}

TEST_CASE("perturbation margin is strict") {
    auto a = perturbation_margin(1, 1, Q(1, 4), Q(1, 4));
    CHECK(a.delta == Q(1, 2));
    CHECK(a.ok);
    auto b = perturbation_margin(2, 2, Q(1, 4), Q(1, 4));
    CHECK(b.delta == 1);
    CHECK_FALSE(b.ok);
    auto c = perturbation_margin(0, 0, 5, 7);
    CHECK(c.delta == 0);
    CHECK(c.ok);
    CHECK_THROWS(perturbation_margin(-1, 0, 0, 0));
}

TEST_CASE("decision trees on all sixteen flag combinations") {
    for (int m = 0; m < 16; ++m) {
        bool semi = m & 1, crit = m & 2, sup = m & 4, lp = m & 8;
        auto c = criterion_select(semi, crit, sup, lp);
        if (!semi) {
            if (!crit) CHECK(c.id == "blow_up_non_critical");
            else if (lp) CHECK(c.clause == 3);
            else CHECK(c.clause == 1);
        } else {
            if (!sup) CHECK(c.label == "clause (1) or Serrin criterion");
            else if (!crit) CHECK(c.clause == 2);
            else CHECK(c.clause == 3);
        }
    }
    auto q = criterion_select(false, true, false, true);
    CHECK(q.label.find("L^p(0,") != std::string::npos);
}

TEST_CASE("one-dimensional growth parameters") {
    OneDParams l2;
    auto a = one_d_growth_params(l2, 1);
    CHECK(a.growth.f_terms[0].rho == 2);
    CHECK(a.growth.f_terms[0].phi == Q(2, 3));
    CHECK(a.growth.g_terms[0].rho == 1);
    CHECK(a.scale.low == -1);

    OneDParams lz;
    lz.variant = OneDVariant::Lzeta;
    lz.zeta = 4;
    CHECK(one_d_growth_params(lz, 1).growth.f_terms[0].phi == Q(7, 12));

    OneDParams r;
    r.variant = OneDVariant::rough;
    r.s = qs("0.2");
    r.q = qs("5/2");
    auto rg = one_d_growth_params(r, 1);
    CHECK(rg.growth.f_terms[0].beta == qs("0.7"));
    CHECK(rg.scale.low == qs("-1.2"));

    OneDParams bad = r;
    bad.s = qs("0.4");
    CHECK_THROWS(one_d_growth_params(bad, 1));
    OneDParams bad2 = l2;
    bad2.eps = qs("0.5");
    CHECK_THROWS(one_d_growth_params(bad2, 1));
    CHECK_THROWS(one_d_growth_params(l2, 0));
}

TEST_CASE("random identity sweep over admissible inputs") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> den(2, 40);
    int checked = 0;
    for (int i = 0; i < 2000; ++i) {
        Q p = Q(den(rng) + 2, 1 + den(rng) % 3);
        if (p <= 2) continue;
        Q kappa = Q(den(rng) % 7, 7) * (p / 2 - 1);
        Q c = (1 + kappa) / p;
        Q phi = 1 - c + c * Q(1 + den(rng) % 38, 40);
        Q beta = 1 - c + (phi - 1 + c) * Q(1 + den(rng) % 39, 40);
        Q rho = Q(den(rng) % 9, 1 + den(rng) % 4);
        Setting s{SobolevScale{-1, 1, 2}, p, kappa};
        auto st = star_params(single(rho, phi, beta), s);
        CHECK(st[0].xi_inv + st[0].xi_conj_inv == 1);
        CHECK(st[0].rho_eff * (st[0].phi_star - 1 + c) + st[0].beta_star == 1);
        auto rs = rho_star_and_x_exponents(single(rho, phi, beta), s);
        CHECK(rs[0].r_inv + rs[0].r_conj_inv == 1);
        ++checked;
    }
    CHECK(checked > 1000);
}
