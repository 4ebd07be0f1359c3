#pragma once

// Per-slot joint congestion control and resource optimisation.
//
// A slot is solved in three independent parts: auxiliary-variable selection,
// threshold admission control, and the user-association / RB / power problem
//
//   min  - sum_e B_e mu_e + Y_R sum_i p_i + Y_H p_H   s.t. non-reuse, power limits,
//
// which is attacked through its Lagrange dual: for fixed multipliers theta the
// powers follow multi-level water-filling, each RB goes to the entity with the
// most negative score, and theta moves along the power-limit subgradient.

#include <cstdint>
#include <optional>
#include <vector>

#include "hcran/array.hpp"
#include "hcran/model.hpp"
#include "hcran/queues.hpp"
#include "hcran/stochastic.hpp"

namespace hcran {

/// Queue-derived weights of the resource-allocation objective.
struct DriftWeights {
    std::vector<double> b_hue;  // B_m = Q_m tau + Z
    std::vector<double> b_rue;  // B_j = Q_j tau + Z
    double y_r = 0.0;           // W eta_req phi_eff^R Z
    double y_h = 0.0;           // W eta_req phi_eff^H Z
};

DriftWeights drift_weights(const NetworkConfig& cfg, const QueueState& qs);

struct AuxiliaryChoice {
    std::vector<double> hue;
    std::vector<double> rue;
};

/// Maximiser of V*price*g(gamma) - H*gamma over 0 <= gamma <= a_max.
double best_auxiliary(const NetworkConfig& cfg, double price, double h, double a_max);

AuxiliaryChoice select_auxiliary(const NetworkConfig& cfg, const QueueState& qs);

struct Admission {
    std::vector<double> hue;
    std::vector<double> rue;
};

/// R = A when H - Q > 0, else 0.
Admission admit_traffic(const QueueState& qs, const Arrivals& arrivals);

/// Multipliers of the per-node power limits. theta[0] is the HPN, theta[1..N]
/// the RRHs. Steps are xi0 / sqrt(n) times `scale`, so the multipliers can be
/// driven in the units of the objective while keeping xi0 dimensionless.
struct DualState {
    std::vector<double> theta;
    std::vector<double> grad;
    double step0 = 0.1;
    double scale = 1.0;
    int iteration = 0;

    static DualState zeros(std::size_t num_rrh, double step0 = 0.1, double scale = 1.0);
};

/// Per-node transmit power of the current iterate, in the DualState layout.
struct NodePower {
    double hpn = 0.0;
    std::vector<double> rrh;
};

/// theta <- [theta + xi * (power - p_max)]^+ with xi = scale * step0 / sqrt(n + 1).
DualState update_duals(const DualState& ds, const NodePower& power, const NetworkConfig& cfg);

/// Candidate (unassigned) powers for every entity / RB pair at fixed theta.
struct CandidatePowers {
    Array3<double> rue;      // [rrh][rue][rb_rrh]
    Array3<double> hue_rrh;  // [rrh][hue][rb_rrh]
    Array2<double> hue_hpn;  // [hue][rb_hpn]
    bool converged = true;   // every coupled water-fill met its tolerance
};

struct WaterfillOptions {
    double tol = 1e-8;
    int max_sweeps = 200;
};

/// HPN tier candidates u_ml, capped at p_max_hpn.
Array2<double> waterfill_hpn(const NetworkConfig& cfg, const ChannelState& ch,
                             const DriftWeights& w, double theta0);

/// RRH tier candidates w_ijk / v_imk, each capped at p_max_rrh.
CandidatePowers waterfill_rrh(const NetworkConfig& cfg, const ChannelState& ch,
                              const DriftWeights& w, const std::vector<double>& theta,
                              const WaterfillOptions& opts = {});

struct RbScores {
    Array2<double> phi;          // Phi_mk   [hue][rb_rrh]
    Array2<double> lambda;       // Lambda_jk [rue][rb_rrh]
    Array2<double> gamma_score;  // Gamma_ml [hue][rb_hpn]
};

/// Price-weighted power minus weighted rate of every candidate. Rates use the
/// per-RB rate unit W0 so the scores are in objective units.
RbScores score_rbs(const NetworkConfig& cfg, const ChannelState& ch, const DriftWeights& w,
                   const std::vector<double>& theta, const CandidatePowers& powers);

struct RbAssignment {
    std::vector<std::uint8_t> assoc;
    Array2<std::uint8_t> rb_rue;
    Array2<std::uint8_t> rb_hue_rrh;
    Array2<std::uint8_t> rb_hue_hpn;

    bool operator==(const RbAssignment&) const = default;
};

/// Extreme-point recovery of the RB LP. Ties go to the lowest index; an HUE
/// takes an RRH-tier RB only with a negative score that beats every RUE and its
/// own best HPN score; RBs an HUE does not take fall to the best RUE.
RbAssignment assign_rbs(const RbScores& scores);

/// Exact power allocation for a fixed assignment: block-coordinate
/// water-filling over the nodes with each node's budget enforced.
struct PowerAllocation {
    Array3<double> rue;
    Array3<double> hue_rrh;
    Array2<double> hue_hpn;
    int sweeps = 0;
    bool converged = true;
};

PowerAllocation allocate_power(const NetworkConfig& cfg, const ChannelState& ch,
                               const DriftWeights& w, const RbAssignment& a,
                               const PowerAllocation* start = nullptr, double tol = 1e-10,
                               int max_sweeps = 1000);

/// -sum B mu + Y_R sum p_i + Y_H p_H for a decision (rates in bits/s).
double subproblem_objective(const NetworkConfig& cfg, const ChannelState& ch,
                            const DriftWeights& w, const ControlDecision& d);

struct SolverOptions {
    int max_dual_iterations = 500;
    double dual_tolerance = 1e-4;  // on theta / scale
    double step0 = 0.1;
    WaterfillOptions waterfill;
    bool polish = true;  // exact power re-allocation for the recovered assignment
    // Duality-gap certificate: every `primal_every` iterations the current
    // assignment is turned into a feasible decision; the loop stops once the
    // best one is within gap_tolerance (relative) of the best dual bound.
    // Needs polish; gap_tolerance <= 0 disables it.
    double gap_tolerance = 1e-3;
    int primal_every = 5;
    // Stagnation: neither bound moved by more than stall_tolerance (relative)
    // for stall_window iterations. What remains is the integrality gap.
    int stall_window = 100;
    double stall_tolerance = 1e-6;
    // Single-RB ownership changes tried after the dual loop when the gap is
    // still open (needs the certificate). 0 disables the search.
    int local_search_moves = 2000;
};

struct ResourceResult {
    ControlDecision decision;  // admission / auxiliary fields left at zero
    DualState duals;
};

/// Solves the association / RB / power subproblem for given weights.
/// `warm_theta` (objective units) seeds the multipliers when present.
ResourceResult solve_resource_allocation(const NetworkConfig& cfg, const ChannelState& ch,
                                         const DriftWeights& w, const SolverOptions& opts = {},
                                         const std::vector<double>* warm_theta = nullptr);

/// One slot of the controller: auxiliary variables, admission, resources.
ControlDecision solve_slot(const NetworkConfig& cfg, const QueueState& qs, const ChannelState& ch,
                           const Arrivals& arrivals, const SolverOptions& opts = {},
                           const std::vector<double>* warm_theta = nullptr);

}  // namespace hcran
