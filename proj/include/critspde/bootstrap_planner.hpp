#pragma once

#include "critspde/param_calculus.hpp"

#include <optional>
#include <string>
#include <vector>

namespace critspde {

// A function space on the 1-torus described by its indices only.
struct SpaceDesc {
    enum class Kind { bessel, besov };
    Kind kind = Kind::bessel;
    Q smoothness;
    Q q;
    Q fine = 0;  // third Besov index; unused for Bessel spaces

    static SpaceDesc bessel(const Q& s, const Q& q) { return {Kind::bessel, s, q, 0}; }
    static SpaceDesc besov(const Q& s, const Q& q, const Q& fine) { return {Kind::besov, s, q, fine}; }
};

std::string render(const SpaceDesc& d);

// Sobolev-type embedding A into B on the torus by index arithmetic. Writes a
// short witness (the compared indices) when `witness` is non-null.
bool embeds(const SpaceDesc& a, const SpaceDesc& b, std::string* witness = nullptr);

// X_theta of a scale as a Bessel space.
SpaceDesc scale_space(const SobolevScale& sc, const Q& theta);

// Weighted trace space (Y_0, Y_1)_{1-(1+alpha)/r, r}; alpha = 0 gives the unweighted one.
SpaceDesc trace_desc(const SobolevScale& sc, const Q& r, const Q& alpha);

struct Check {
    std::string name;
    bool pass = false;
    std::string witness;
};

enum class Rule { weight_insertion, time_bootstrap, space_bootstrap, extrapolation };
std::string to_string(Rule r);

struct BootstrapStep {
    Rule rule = Rule::space_bootstrap;
    std::string tag;  // short human label such as "2a"
    Setting from;
    Setting to;
    std::vector<Check> checks;
    std::optional<int> emb_case;
    std::optional<Q> eps;

    bool ok() const;
    std::vector<std::string> failures() const;
};

// Throws std::runtime_error listing the failed checks when the step is not ok.
void require_ok(const BootstrapStep& step);

BootstrapStep plan_weight_insertion(const Setting& from, const Q& r, const Q& delta, const GrowthSpec& g,
                                    const std::optional<GrowthSpec>& target_growth = std::nullopt);

BootstrapStep plan_time_bootstrap(const Setting& from, const Q& r_hat, const GrowthSpec& g);

std::optional<int> emb_condition(const Q& r, const Q& alpha, const Q& r_hat, const Q& alpha_hat,
                                 const std::optional<Q>& eps = std::nullopt);

BootstrapStep plan_space_bootstrap(const Setting& from, const Setting& to, const GrowthSpec& target_growth,
                                   const std::optional<Q>& eps = std::nullopt);

BootstrapStep check_extrapolation(const Setting& from_y, const Setting& via_y_hat, const Setting& base_x);

struct RegularityClaim {
    Q theta_sup;        // claim holds for all theta in [0, theta_sup)
    Q time_exponent;    // H^{theta, r}
    Q space_offset;     // space smoothness = space_offset - 2 theta
    Q space_q;
    std::string text;
};

struct BootstrapChain {
    std::string variant;
    std::vector<BootstrapStep> steps;
    std::vector<Check> composition;
    RegularityClaim claim;

    bool ok() const;
};

struct L2ChainOptions {
    Q eps = Q(1, 5);
    Q r_hat = 12;
    Q zeta = 4;
    Q nu = 1;
};

struct RoughChainOptions {
    Q s;
    Q q;
    Q p;
    std::optional<Q> r_hat;  // defaults to max(24, 2p)
    Q zeta = 8;
    Q nu = 1;
};

BootstrapChain full_chain_l2(const L2ChainOptions& opt = {});
BootstrapChain full_chain_rough(const RoughChainOptions& opt);

}  // namespace critspde
