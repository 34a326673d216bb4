#include "critspde/calc_json.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace critspde {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key()))
            throw std::runtime_error("calc_json.parse_calc_input: unknown key '" + it.key() + "' in " + where);
}

Q take(const json& j, const std::string& key, bool& inexact) {
    if (!j.contains(key)) throw std::runtime_error("calc_json.parse_calc_input: missing '" + key + "'");
    auto n = json_to_num(j.at(key));
    if (!n.exact) inexact = true;
    return n.value;
}

std::vector<GrowthTerm> terms_from(const json& j, bool& inexact) {
    if (!j.is_array()) throw std::runtime_error("calc_json.parse_calc_input: term lists must be arrays");
    std::vector<GrowthTerm> out;
    for (const auto& t : j) {
        if (!t.is_object()) throw std::runtime_error("calc_json.parse_calc_input: a term must be an object");
        reject_unknown(t, {"rho", "phi", "beta"}, "term");
        out.push_back(GrowthTerm{take(t, "rho", inexact), take(t, "phi", inexact), take(t, "beta", inexact)});
    }
    return out;
}

json opt_q(const std::optional<Q>& q) { return q ? json(to_string(*q)) : json(nullptr); }

json checks_json(const std::vector<Check>& cs) {
    json a = json::array();
    for (const auto& c : cs) a.push_back({{"name", c.name}, {"pass", c.pass}, {"witness", c.witness}});
    return a;
}

std::string pad(const std::string& s, size_t w) { return s.size() >= w ? s + " " : s + std::string(w - s.size(), ' '); }

}  // namespace

Num json_to_num(const json& j) {
    if (j.is_string()) return Num{parse_q(j.get<std::string>()), true};
    if (j.is_number_integer()) return Num{Q(j.get<long long>()), true};
    if (j.is_number_unsigned()) return Num{Q(j.get<unsigned long long>()), true};
    if (j.is_number_float()) return Num{q_from_double(j.get<double>()), false};
    throw std::runtime_error("calc_json.json_to_num: expected a number or a rational string");
}

CalcInput parse_calc_input(const json& j) {
    if (!j.is_object()) throw std::runtime_error("calc_json.parse_calc_input: spec must be a JSON object");
    if (j.empty()) throw std::runtime_error("calc_json.parse_calc_input: empty spec");
    reject_unknown(j,
                   {"one_d", "scale", "p", "kappa", "f_terms", "g_terms", "has_trace_part_F", "has_trace_part_G",
                    "sublinearity_constant"},
                   "spec");
    CalcInput in;
    bool inexact = false;
    const Q p = take(j, "p", inexact);

    if (j.contains("one_d")) {
        if (j.contains("scale") || j.contains("f_terms") || j.contains("g_terms"))
            throw std::runtime_error("calc_json.parse_calc_input: one_d excludes scale and explicit terms");
        const auto& o = j.at("one_d");
        reject_unknown(o, {"variant", "eps", "zeta", "s", "q", "nu"}, "one_d");
        OneDParams v;
        auto name = o.value("variant", std::string());
        if (name == "L2_eps") v.variant = OneDVariant::L2_eps;
        else if (name == "Lzeta") v.variant = OneDVariant::Lzeta;
        else if (name == "rough") v.variant = OneDVariant::rough;
        else throw std::runtime_error("calc_json.parse_calc_input: unknown one_d variant '" + name + "'");
        if (o.contains("eps")) v.eps = take(o, "eps", inexact);
        if (o.contains("zeta")) v.zeta = take(o, "zeta", inexact);
        if (o.contains("s")) v.s = take(o, "s", inexact);
        if (o.contains("q")) v.q = take(o, "q", inexact);
        Q nu = o.contains("nu") ? take(o, "nu", inexact) : Q(1);
        auto g = one_d_growth_params(v, nu);
        in.setting.scale = g.scale;
        in.growth = g.growth;
    } else {
        if (!j.contains("scale")) throw std::runtime_error("calc_json.parse_calc_input: need one_d or scale");
        const auto& s = j.at("scale");
        reject_unknown(s, {"low", "high", "q"}, "scale");
        in.setting.scale = SobolevScale{take(s, "low", inexact), take(s, "high", inexact), take(s, "q", inexact)};
        if (j.contains("f_terms")) in.growth.f_terms = terms_from(j.at("f_terms"), inexact);
        if (j.contains("g_terms")) in.growth.g_terms = terms_from(j.at("g_terms"), inexact);
        if (in.growth.f_terms.empty() && in.growth.g_terms.empty())
            throw std::runtime_error("calc_json.parse_calc_input: no growth terms");
        in.growth.has_trace_part_F = j.value("has_trace_part_F", false);
        in.growth.has_trace_part_G = j.value("has_trace_part_G", false);
        if (j.contains("sublinearity_constant"))
            in.growth.sublinearity_constant = take(j, "sublinearity_constant", inexact);
    }
    in.setting.p = p;
    if (j.contains("kappa")) {
        in.setting.kappa = take(j, "kappa", inexact);
    } else {
        auto cw = critical_weight(in.growth, p);
        if (!cw.kappa) throw std::runtime_error("calc_json.parse_calc_input: no admissible critical weight; give kappa");
        in.setting.kappa = *cw.kappa;
        in.kappa_from_critical_weight = true;
    }
    in.growth.inexact = in.growth.inexact || inexact;
    validate_setting(in.setting);
    return in;
}

json setting_to_json(const Setting& s) {
    return {{"scale", {{"low", to_string(s.scale.low)}, {"high", to_string(s.scale.high)}, {"q", to_string(s.scale.q)}}},
            {"p", to_string(s.p)},
            {"kappa", to_string(s.kappa)}};
}

json criticality_report(const CalcInput& in) {
    json r;
    r["setting"] = setting_to_json(in.setting);
    r["kappa_from_critical_weight"] = in.kappa_from_critical_weight;
    r["inexact"] = in.growth.inexact;

    auto tr = trace_space(in.setting);
    r["trace_space"] = {{"smoothness", to_string(tr.smoothness)}, {"q", to_string(tr.q)}, {"p", to_string(tr.p)}};

    auto sl = subcriticality(in.growth, in.setting);
    json terms = json::array();
    for (const auto& t : sl.terms)
        terms.push_back({{"label", t.label},
                         {"rho", to_string(t.term.rho)},
                         {"phi", to_string(t.term.phi)},
                         {"beta", to_string(t.term.beta)},
                         {"slack", to_string(t.slack)},
                         {"headroom", opt_q(t.headroom)},
                         {"window", to_string(t.window)},
                         {"diagnostic", t.diagnostic}});
    r["terms"] = terms;
    r["is_critical"] = sl.is_critical;
    r["all_subcritical_or_critical"] = sl.all_subcritical_or_critical;
    r["window_ok"] = sl.window_ok;

    auto cw = critical_weight(in.growth, in.setting.p);
    r["kappa_crit"] = opt_q(cw.kappa);
    r["kappa_crit_binding"] = cw.binding;

    json rs = json::array();
    for (const auto& lt : in.growth.all_terms()) {
        GrowthSpec one;
        one.f_terms.push_back(lt.term);
        json e = {{"label", lt.label}};
        try {
            auto t = rho_star_and_x_exponents(one, in.setting).at(0);
            e["rho_star"] = to_string(t.rho_star);
            e["r"] = opt_q(t.r);
            e["r_conj"] = opt_q(t.r_conj);
            json xs = json::array();
            for (const auto& x : t.x_entries)
                xs.push_back({{"time_exponent", to_string(x.time_exponent)},
                              {"theta", to_string(x.theta)},
                              {"space_smoothness", to_string(x.space_smoothness)},
                              {"space_q", to_string(x.space_q)}});
            e["x_space"] = xs;
        } catch (const std::exception& ex) {
            e["error"] = ex.what();
        }
        rs.push_back(e);
    }
    r["rho_star"] = rs;
    return r;
}

std::string render_report_table(const json& r) {
    std::ostringstream os;
    const auto& s = r.at("setting");
    os << "setting: H^{" << s["scale"]["low"].get<std::string>() << "," << s["scale"]["q"].get<std::string>()
       << "} -> H^{" << s["scale"]["high"].get<std::string>() << "," << s["scale"]["q"].get<std::string>()
       << "}, p = " << s["p"].get<std::string>() << ", kappa = " << s["kappa"].get<std::string>()
       << (r.at("kappa_from_critical_weight").get<bool>() ? " (critical weight)" : "") << "\n";
    const auto& t = r.at("trace_space");
    os << "trace space: B^{" << t["smoothness"].get<std::string>() << "}_{" << t["q"].get<std::string>() << ","
       << t["p"].get<std::string>() << "}\n";
    os << pad("term", 6) << pad("rho", 8) << pad("phi", 10) << pad("beta", 10) << pad("slack", 12) << "window\n";
    for (const auto& term : r.at("terms")) {
        os << pad(term["label"].get<std::string>(), 6) << pad(term["rho"].get<std::string>(), 8)
           << pad(term["phi"].get<std::string>(), 10) << pad(term["beta"].get<std::string>(), 10)
           << pad(term["slack"].get<std::string>(), 12) << term["window"].get<std::string>();
        auto d = term["diagnostic"].get<std::string>();
        if (!d.empty()) os << "  (" << d << ")";
        os << "\n";
    }
    os << "status: " << (r.at("is_critical").get<bool>() ? "critical" : "not critical")
       << (r.at("window_ok").get<bool>() ? "" : ", window violation") << "\n";
    os << "kappa_crit: " << (r.at("kappa_crit").is_null() ? "none" : r.at("kappa_crit").get<std::string>()) << "\n";
    for (const auto& e : r.at("rho_star")) {
        os << e["label"].get<std::string>() << ": ";
        if (e.contains("error")) {
            os << "no exponent table (" << e["error"].get<std::string>() << ")\n";
            continue;
        }
        os << "rho* = " << e["rho_star"].get<std::string>() << ", r = "
           << (e["r"].is_null() ? "inf" : e["r"].get<std::string>()) << ", r' = "
           << (e["r_conj"].is_null() ? "inf" : e["r_conj"].get<std::string>()) << ", X =";
        std::vector<std::string> factors;
        for (const auto& x : e["x_space"]) {
            auto f = "L^" + x["time_exponent"].get<std::string>() + "(H^{" + x["space_smoothness"].get<std::string>() +
                     "," + x["space_q"].get<std::string>() + "})";
            if (std::find(factors.begin(), factors.end(), f) == factors.end()) factors.push_back(f);
        }
        for (size_t i = 0; i < factors.size(); ++i) os << (i == 0 ? " " : " ∩ ") << factors[i];
        os << "\n";
    }
    if (r.at("inexact").get<bool>()) os << "note: floating-point inputs; results are inexact\n";
    return os.str();
}

json chain_to_json(const BootstrapChain& c) {
    json steps = json::array();
    for (const auto& s : c.steps) {
        json j = {{"tag", s.tag},
                  {"rule", to_string(s.rule)},
                  {"from", setting_to_json(s.from)},
                  {"to", setting_to_json(s.to)},
                  {"checks", checks_json(s.checks)},
                  {"ok", s.ok()}};
        j["emb_case"] = s.emb_case ? json(*s.emb_case) : json(nullptr);
        j["eps"] = opt_q(s.eps);
        steps.push_back(j);
    }
    return {{"variant", c.variant},
            {"ok", c.ok()},
            {"steps", steps},
            {"composition", checks_json(c.composition)},
            {"claim",
             {{"theta_sup", to_string(c.claim.theta_sup)},
              {"time_exponent", to_string(c.claim.time_exponent)},
              {"space_offset", to_string(c.claim.space_offset)},
              {"space_q", to_string(c.claim.space_q)},
              {"text", c.claim.text}}}};
}

std::string render_chain(const BootstrapChain& c) {
    std::ostringstream os;
    os << "chain " << c.variant << ": " << (c.ok() ? "all checks pass" : "CHECKS FAILED") << "\n";
    auto setting_str = [](const Setting& s) {
        return "(H^{" + to_string(s.scale.low) + "," + to_string(s.scale.q) + "}, H^{" + to_string(s.scale.high) +
               "," + to_string(s.scale.q) + "}, p=" + to_string(s.p) + ", kappa=" + to_string(s.kappa) + ")";
    };
    for (const auto& s : c.steps) {
        os << "step " << s.tag << " [" << to_string(s.rule) << "] " << setting_str(s.from) << " -> "
           << setting_str(s.to);
        if (s.emb_case) os << ", embedding case " << *s.emb_case;
        if (s.eps) os << ", eps = " << to_string(*s.eps);
        os << "\n";
        for (const auto& ch : s.checks)
            os << "    " << (ch.pass ? "PASS " : "FAIL ") << ch.name << (ch.witness.empty() ? "" : ": " + ch.witness)
               << "\n";
    }
    for (const auto& ch : c.composition)
        os << "  " << (ch.pass ? "PASS " : "FAIL ") << ch.name << (ch.witness.empty() ? "" : ": " + ch.witness) << "\n";
    os << "claim: " << c.claim.text << "\n";
    return os.str();
}

}  // namespace critspde
