#pragma once

// Static network description and the physical-layer formulas shared by the
// controller, the oracle and the simulation harness.
//
// Units: rates are bits/s, powers are watts, queue contents are bits, the
// energy efficiency is bits/Hz/J.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hcran/array.hpp"

namespace hcran {

enum class UtilityKind { Linear, Logarithmic };

class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

struct NetworkConfig {
    std::size_t num_rrh = 4;
    std::size_t num_hue = 12;
    std::size_t num_rue = 10;
    std::size_t num_rb_rrh = 12;  // RBs reserved for the RRH tier
    std::size_t num_rb_hpn = 8;   // RBs reserved for the HPN tier

    double bandwidth_total = 300e3;  // W, Hz
    double bandwidth_rb = 15e3;      // W0, Hz
    double slot_duration = 0.01;     // tau, s

    double p_max_rrh = 3.0;   // per RRH, W
    double p_max_hpn = 10.0;  // W
    double drain_eff_rrh = 1.0;
    double drain_eff_hpn = 1.0;
    double static_power_rrh = 1.0;  // aggregate over all RRHs, W
    double static_power_hpn = 2.0;  // W

    double ee_required = 0.0;  // bits/Hz/J
    double control_v = 1000.0;
    double price_rue = 1.0;  // alpha
    double price_hue = 1.0;  // beta

    UtilityKind utility_kind = UtilityKind::Linear;
    double utility_scale = 1000.0;  // r0 of the logarithmic utility, bits

    double a_max_hue = 15000.0;  // peak arrivals per slot, bits
    double a_max_rue = 30000.0;

    /// Throws ConfigError on the first violated invariant.
    void validate() const;

    /// Largest right-derivative of g_R and g_H.
    [[nodiscard]] double phi_r() const;
    [[nodiscard]] double phi_h() const;

    /// g_R / g_H (both share the configured shape).
    [[nodiscard]] double utility(double r) const;

    /// Queue bound V*alpha*phi_R + 2*A_max for an RUE (and the HUE analogue).
    [[nodiscard]] double queue_bound_rue() const;
    [[nodiscard]] double queue_bound_hue() const;
};

/// Per-slot channel gains with noise already folded in, so log2(1 + p*g) is the
/// spectral efficiency of one RB at transmit power p.
struct ChannelState {
    Array3<double> g_rrh_rue;  // [rrh][rue][rb_rrh]
    Array3<double> g_rrh_hue;  // [rrh][hue][rb_rrh]
    Array2<double> g_hpn_hue;  // [hue][rb_hpn]

    static ChannelState zeros(const NetworkConfig& cfg);
    void check_shape(const NetworkConfig& cfg) const;
};

struct ControlDecision {
    std::vector<double> admit_hue;  // R_m, bits
    std::vector<double> admit_rue;  // R_j, bits
    std::vector<double> aux_hue;    // gamma_m, bits
    std::vector<double> aux_rue;    // gamma_j, bits

    std::vector<std::uint8_t> assoc;      // s_m, 1 = RRH tier
    Array2<std::uint8_t> rb_rue;          // a_jk
    Array2<std::uint8_t> rb_hue_rrh;      // a_mk (meaningful when s_m = 1)
    Array2<std::uint8_t> rb_hue_hpn;      // b_ml (meaningful when s_m = 0)

    Array3<double> pw_rue;      // p_ijk [rrh][rue][rb_rrh]
    Array3<double> pw_hue_rrh;  // p_imk [rrh][hue][rb_rrh]
    Array2<double> pw_hue_hpn;  // p_ml  [hue][rb_hpn]

    // Solver diagnostics.
    int dual_iterations = 0;
    bool converged = true;
    bool waterfill_converged = true;
    double objective = 0.0;   // resource-allocation objective, as minimised
    double dual_value = 0.0;  // best Lagrange dual bound seen
    std::vector<double> theta;  // [0] HPN, [1..N] RRHs, in objective units

    static ControlDecision zeros(const NetworkConfig& cfg);
    void check_shape(const NetworkConfig& cfg) const;
};

/// Raised when a decision breaks a hard constraint (non-reuse, power, admission).
class FeasibilityError : public std::runtime_error {
public:
    explicit FeasibilityError(const std::string& what) : std::runtime_error(what) {}
};

struct PowerTotals {
    std::vector<double> per_rrh;  // p_i
    double hpn = 0.0;             // p_H
    double sum = 0.0;             // p_sum including drain efficiency and static power
};

double rate_rue(const NetworkConfig& cfg, const ChannelState& ch, const ControlDecision& d,
                std::size_t j);
double rate_hue(const NetworkConfig& cfg, const ChannelState& ch, const ControlDecision& d,
                std::size_t m);
/// mu_sum: sum of every UE rate.
double rate_sum(const NetworkConfig& cfg, const ChannelState& ch, const ControlDecision& d);

PowerTotals power_totals(const NetworkConfig& cfg, const ControlDecision& d);

/// mu_sum / (W * p_sum).
double instantaneous_ee(double mu_sum, double p_sum, const NetworkConfig& cfg);

/// Verifies non-reuse, per-node power limits and binary domains. `tol` is an
/// absolute slack on the power limits (watts). Throws FeasibilityError.
void check_feasibility(const NetworkConfig& cfg, const ControlDecision& d, double tol = 1e-9);

}  // namespace hcran
