#pragma once

#include "critspde/rational.hpp"

#include <optional>
#include <string>
#include <vector>

namespace critspde {

// Bessel-potential scale on the torus: X_0 = H^{low,q}, X_1 = H^{high,q}.
struct SobolevScale {
    Q low;
    Q high;
    Q q;

    // Smoothness of the complex interpolation space X_theta.
    Q smoothness(const Q& theta) const { return (1 - theta) * low + theta * high; }
};

struct Setting {
    SobolevScale scale;
    Q p;
    Q kappa;

    // (1+kappa)/p, the quantity every exponent formula is built from.
    Q c() const { return (1 + kappa) / p; }
};

// Throws std::runtime_error unless high > low, q > 1, p >= 2 and the weight
// lies in [0, p/2-1) (or equals 0 when p = 2).
void validate_setting(const Setting& s);
bool weight_admissible(const Q& p, const Q& kappa);

struct GrowthTerm {
    Q rho;
    Q phi;
    Q beta;
};

struct GrowthSpec {
    std::vector<GrowthTerm> f_terms;
    std::vector<GrowthTerm> g_terms;
    bool has_trace_part_F = false;
    bool has_trace_part_G = false;
    std::optional<Q> sublinearity_constant;
    bool inexact = false;

    struct Labeled {
        std::string label;  // "F1", "G2", ...
        GrowthTerm term;
    };
    std::vector<Labeled> all_terms() const;
};

struct BesovDescriptor {
    Q smoothness;
    Q q;  // integrability
    Q p;  // microscopic (fine) index
};

BesovDescriptor trace_space(const Setting& s);

// ---- criticality ---------------------------------------------------------

enum class WindowStatus { inside, below_liftable, outside };
std::string to_string(WindowStatus w);

struct TermSlack {
    std::string label;
    GrowthTerm term;
    Q slack;                    // 1 - [rho(phi-1+c) + beta]
    std::optional<Q> headroom;  // slack/rho: room left in (1+kappa)/p; none for rho = 0
    WindowStatus window;
    std::string diagnostic;     // empty when inside the window
};

struct SlackReport {
    std::vector<TermSlack> terms;
    bool is_critical = false;
    bool all_subcritical_or_critical = false;
    bool window_ok = false;  // no term outside its admissible window
};

SlackReport subcriticality(const GrowthSpec& g, const Setting& s);

struct CriticalWeight {
    std::optional<Q> kappa;
    std::vector<std::string> binding;  // labels of terms attaining the minimum
};

CriticalWeight critical_weight(const GrowthSpec& g, const Q& p);

struct XEntry {
    Q time_exponent;   // Lebesgue exponent in time
    Q theta;           // interpolation parameter of X_theta
    Q space_smoothness;
    Q space_q;
};

struct RhoStarTerm {
    std::string label;
    Q rho_star;
    Q r_inv;       // 1/r
    Q r_conj_inv;  // 1/r'
    std::optional<Q> r;
    std::optional<Q> r_conj;
    std::vector<XEntry> x_entries;  // finite entries only
};

std::vector<RhoStarTerm> rho_star_and_x_exponents(const GrowthSpec& g, const Setting& s);

struct StarTerm {
    std::string label;
    int case_id = 0;     // 1 or 2
    bool rho_replaced = false;
    Q rho_eff;           // rho, or the replacement epsilon when rho = 0
    Q phi_star;
    Q beta_star;
    Q xi_inv;            // 1/xi
    Q xi_conj_inv;       // 1/xi'
    std::vector<XEntry> x_star_entries;
};

std::vector<StarTerm> star_params(const GrowthSpec& g, const Setting& s);

// Same per-term data as star_params; kept as a separate entry point since the
// xi pair is what downstream consumers ask for.
std::vector<StarTerm> xi_exponents(const GrowthSpec& g, const Setting& s);

struct InterpolationExponents {
    Q zeta;
    Q delta;
    Q phi;
    int case_id = 0;
    bool case2_also_applies = false;
    Q theta0;
    bool inequality_holds = false;  // (1-delta) phi <= p/(1+kappa) (psi-1+c)
};

InterpolationExponents interpolation_exponents(const Q& psi, const Q& p, const Q& kappa);

struct SerrinTerm {
    std::string label;
    bool ok = false;
    std::string reason;
};

struct SerrinResult {
    bool applicable = false;
    std::vector<SerrinTerm> terms;
};

SerrinResult serrin_applicable(const GrowthSpec& g, const Setting& s, bool revised);

struct PerturbationMargin {
    Q delta;
    bool ok = false;
};

PerturbationMargin perturbation_margin(const Q& c_det, const Q& c_sto, const Q& c_a, const Q& c_b);

struct Clause {
    int clause = 0;      // 1, 2, 3; 0 for the combined "(1) or Serrin" leaf
    std::string id;
    std::string label;
};

Clause criterion_select(bool semilinear, bool is_critical, bool have_sup_bound, bool have_lp_bound);

// ---- one-dimensional problem on the torus -------------------------------

enum class OneDVariant { L2_eps, Lzeta, rough };

struct OneDParams {
    OneDVariant variant = OneDVariant::L2_eps;
    Q eps = 0;     // L2_eps
    Q zeta = 4;    // Lzeta
    Q s = 0;       // rough
    Q q = 2;       // rough
};

struct OneDGrowth {
    SobolevScale scale;
    GrowthSpec growth;
};

// f-term (2, phi1, phi1) and g-term (2 - nu, phi1, phi1) for the requested scale.
OneDGrowth one_d_growth_params(const OneDParams& v, const Q& nu);

}  // namespace critspde
