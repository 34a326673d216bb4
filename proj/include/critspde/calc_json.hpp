#pragma once

#include "critspde/bootstrap_planner.hpp"
#include "critspde/param_calculus.hpp"

#include <json.hpp>

#include <string>

namespace critspde {

// Numbers in calculus files: strings ("2/3", "0.2") and JSON integers are
// exact; JSON floating-point numbers are accepted and marked inexact.
Num json_to_num(const nlohmann::json& j);

struct CalcInput {
    Setting setting;
    GrowthSpec growth;
    bool kappa_from_critical_weight = false;
};

// Schema: {"p", "kappa"?, and either "one_d": {"variant", "eps"|"zeta"|"s","q",
// "nu"} or "scale": {"low","high","q"} with "f_terms"/"g_terms" lists of
// {"rho","phi","beta"} plus optional "has_trace_part_F", "has_trace_part_G",
// "sublinearity_constant"}. A missing kappa is replaced by the critical weight.
CalcInput parse_calc_input(const nlohmann::json& j);

// Slack table, critical weight, trace space and the rho*/X exponent table.
nlohmann::json criticality_report(const CalcInput& in);
std::string render_report_table(const nlohmann::json& report);

nlohmann::json setting_to_json(const Setting& s);
nlohmann::json chain_to_json(const BootstrapChain& c);
std::string render_chain(const BootstrapChain& c);

}  // namespace critspde
