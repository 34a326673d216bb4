#pragma once

#include "critspde/spde_sim.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace critspde {

// Named pointwise maps accepted in configuration files.
//   f: zero | cubic | linear
//   g: zero | one | linear | sublinear (C_g (1+|y|)) | power (|y|^h)
struct MapChoice {
    std::string f = "zero";
    std::string g = "zero";
    double C_g = 1.0;
    double h = 1.0;
};

NonlinearitySpec build_nonlinearity(const MapChoice& m);

// Initial data: cos (cos x), zero, rough (sum of k^{-0.4} cos(kx) / 4 over the
// dealiased band) or values (explicit collocation values in sim.u0_values).
std::function<double(double)> initial_datum(const std::string& kind, int N);

struct Preset {
    std::string name;
    std::string description;
    MapChoice maps;
    std::string u0 = "cos";
    SimConfig sim;
};

std::vector<std::string> preset_names();
Preset make_preset(const std::string& name);

// Applies JSON fields on top of a configuration. Recognized keys: preset, N,
// T, dt, seed, scheme, blowup_cap, snapshot_stride, noise {lambda, K, scale},
// f, g, C_g, h, u0 (a kind name or an array of N values). Unknown keys are
// errors.
Preset preset_from_json(const nlohmann::json& j);
nlohmann::json preset_to_json(const Preset& p);

}  // namespace critspde
