#include "critspde/presets.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace critspde {

using nlohmann::json;

NonlinearitySpec build_nonlinearity(const MapChoice& m) {
    NonlinearitySpec nl;
    if (m.f == "cubic") {
        nl.f = [](double, double, double y) { return y * y * y; };
    } else if (m.f == "linear") {
        nl.f = [](double, double, double y) { return y; };
    } else if (m.f != "zero") {
        throw std::runtime_error("presets.build_nonlinearity: unknown f '" + m.f + "'");
    }
    const double C = m.C_g, h = m.h;
    if (m.g == "one") {
        nl.g = [](double, double, double) { return 1.0; };
    } else if (m.g == "linear") {
        nl.g = [](double, double, double y) { return y; };
    } else if (m.g == "sublinear") {
        if (!(C >= 0)) throw std::runtime_error("presets.build_nonlinearity: C_g must be nonnegative");
        nl.g = [C](double, double, double y) { return C * (1 + std::abs(y)); };
    } else if (m.g == "power") {
        if (!(h >= 1 && h < 3)) throw std::runtime_error("presets.build_nonlinearity: h must lie in [1, 3)");
        nl.g = [C, h](double, double, double y) { return C * std::pow(std::abs(y), h); };
    } else if (m.g != "zero") {
        throw std::runtime_error("presets.build_nonlinearity: unknown g '" + m.g + "'");
    }
    nl.label = "f=" + m.f + ",g=" + m.g;
    return nl;
}

std::function<double(double)> initial_datum(const std::string& kind, int N) {
    if (kind == "cos") return [](double x) { return std::cos(x); };
    if (kind == "zero") return [](double) { return 0.0; };
    if (kind == "rough") {
        const int band = N / 3;
        return [band](double x) {
            double v = 0.0;
            for (int k = 1; k <= band; ++k) v += 0.25 * std::pow(k, -0.4) * std::cos(k * x);
            return v;
        };
    }
    throw std::runtime_error("presets.initial_datum: unknown initial datum '" + kind + "'");
}

std::vector<std::string> preset_names() {
    return {"heat", "linear-noise", "cubic-conservative", "sublinear-global", "rough-data-chain"};
}

namespace {

void rebuild(Preset& p) {
    p.sim.nonlinearity = build_nonlinearity(p.maps);
    if (p.u0 == "values") {
        p.sim.u0 = nullptr;
    } else {
        p.sim.u0 = initial_datum(p.u0, p.sim.N);
        p.sim.u0_values.clear();
    }
}

}  // namespace

Preset make_preset(const std::string& name) {
    Preset p;
    p.name = name;
    p.sim.N = 64;
    p.sim.T = 1.0;
    p.sim.dt = 1e-3;
    p.sim.noise.lambda = 0.75;
    p.sim.noise.K = 21;
    if (name == "heat") {
        p.description = "f = g = 0 from cos x; exact decay e^{-t} cos x";
    } else if (name == "linear-noise") {
        p.description = "f = 0, g = 1: stochastic convolution with colored noise from zero data";
        p.maps.g = "one";
        p.u0 = "zero";
    } else if (name == "cubic-conservative") {
        p.description = "f(y) = y^3, g = 0 from cos x; energy can only decay";
        p.maps.f = "cubic";
    } else if (name == "sublinear-global") {
        p.description = "f(y) = y^3, g(y) = C_g (1+|y|) with C_g = 1 from cos x";
        p.maps.f = "cubic";
        p.maps.g = "sublinear";
        // the explicit cubic flux loses stability near |u| = 5 at dt = 5e-4
        p.sim.dt = 2.5e-4;
    } else if (name == "rough-data-chain") {
        p.description = "f(y) = y^3, g(y) = 1+|y| from rough data with coefficients k^{-0.4}/4";
        p.maps.f = "cubic";
        p.maps.g = "sublinear";
        p.u0 = "rough";
        p.sim.dt = 1e-4;
    } else {
        throw std::runtime_error("presets.make_preset: unknown preset '" + name + "'");
    }
    rebuild(p);
    return p;
}

Preset preset_from_json(const json& j) {
    if (!j.is_object()) throw std::runtime_error("presets.preset_from_json: configuration must be a JSON object");
    static const std::set<std::string> known = {"preset", "N",     "T",    "dt", "seed", "scheme",
                                                "blowup_cap", "snapshot_stride", "noise", "f", "g",
                                                "C_g", "h", "u0"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key())) throw std::runtime_error("presets.preset_from_json: unknown key '" + it.key() + "'");

    Preset p = make_preset(j.value("preset", std::string("heat")));
    auto& s = p.sim;
    if (j.contains("N")) s.N = j.at("N").get<int>();
    if (j.contains("T")) s.T = j.at("T").get<double>();
    if (j.contains("dt")) s.dt = j.at("dt").get<double>();
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("blowup_cap")) s.blowup_cap = j.at("blowup_cap").get<double>();
    if (j.contains("snapshot_stride")) s.snapshot_stride = j.at("snapshot_stride").get<int>();
    if (j.contains("scheme")) {
        auto sc = j.at("scheme").get<std::string>();
        if (sc == "exp_euler") s.scheme = Scheme::exp_euler;
        else if (sc == "semi_implicit") s.scheme = Scheme::semi_implicit;
        else throw std::runtime_error("presets.preset_from_json: unknown scheme '" + sc + "'");
    }
    if (j.contains("noise")) {
        const auto& n = j.at("noise");
        for (auto it = n.begin(); it != n.end(); ++it)
            if (it.key() != "lambda" && it.key() != "K" && it.key() != "scale")
                throw std::runtime_error("presets.preset_from_json: unknown noise key '" + it.key() + "'");
        if (n.contains("lambda")) s.noise.lambda = n.at("lambda").get<double>();
        if (n.contains("K")) s.noise.K = n.at("K").get<int>();
        if (n.contains("scale")) s.noise.scale = n.at("scale").get<double>();
    }
    if (j.contains("f")) p.maps.f = j.at("f").get<std::string>();
    if (j.contains("g")) p.maps.g = j.at("g").get<std::string>();
    if (j.contains("C_g")) p.maps.C_g = j.at("C_g").get<double>();
    if (j.contains("h")) p.maps.h = j.at("h").get<double>();
    if (j.contains("u0")) {
        const auto& u = j.at("u0");
        if (u.is_string()) {
            p.u0 = u.get<std::string>();
        } else {
            p.u0 = "values";
            s.u0_values = u.get<std::vector<double>>();
        }
    }
    // a preset's default K is the dealiased band of its own grid
    if (j.contains("N") && !(j.contains("noise") && j.at("noise").contains("K"))) s.noise.K = s.N / 3;
    rebuild(p);
    validate_config(s);
    return p;
}

json preset_to_json(const Preset& p) {
    const auto& s = p.sim;
    json j = {{"preset", p.name},
              {"N", s.N},
              {"T", s.T},
              {"dt", s.dt},
              {"seed", s.seed},
              {"scheme", s.scheme == Scheme::exp_euler ? "exp_euler" : "semi_implicit"},
              {"blowup_cap", s.blowup_cap},
              {"snapshot_stride", s.snapshot_stride},
              {"noise", {{"lambda", s.noise.lambda}, {"K", s.noise.K}, {"scale", s.noise.scale}}},
              {"f", p.maps.f},
              {"g", p.maps.g},
              {"C_g", p.maps.C_g},
              {"h", p.maps.h}};
    if (p.u0 == "values") j["u0"] = s.u0_values;
    else j["u0"] = p.u0;
    return j;
}

}  // namespace critspde
