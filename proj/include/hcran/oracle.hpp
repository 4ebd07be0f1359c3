#pragma once

// Reference solvers: a brute-force enumerator for tiny instances of the
// resource-allocation subproblem and the maximum-sum-rate (MSR) baseline.
//
// The enumerator shares no code with the controller's solver. It walks every
// binary association / RB assignment; for each one the remaining power problem
// is concave, so a coarse per-variable grid scan followed by a generating-set
// pattern search (coordinate moves plus intra-node power transfers) reaches
// its optimum.

#include <cstdint>
#include <stdexcept>
#include <string>

#include "hcran/controller.hpp"
#include "hcran/model.hpp"

namespace hcran {

class BudgetExceeded : public std::runtime_error {
public:
    explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

struct OracleOptions {
    double grid_fraction = 1.0 / 40.0;  // grid step as a fraction of p_max
    double final_step = 1e-10;          // pattern search stops below this fraction of p_max
    long long budget = 10'000'000;      // candidate evaluations allowed
};

struct OracleResult {
    ControlDecision decision;
    double objective = 0.0;
    long long assignments = 0;
    long long evaluations = 0;
};

/// Number of binary assignments the enumerator would visit.
long long count_assignments(const NetworkConfig& cfg);

/// Exhaustive minimiser of -sum B mu + Y_R sum p_i + Y_H p_H. Throws
/// BudgetExceeded before doing any work when the instance is too large.
OracleResult enumerate_subproblem3(const NetworkConfig& cfg, const ChannelState& ch,
                                   const DriftWeights& w, const OracleOptions& opts = {});

/// Independent evaluation of the subproblem objective, straight from the rate
/// and power formulas.
double oracle_objective(const NetworkConfig& cfg, const ChannelState& ch, const DriftWeights& w,
                        const ControlDecision& d);

struct MsrOptions {
    SolverOptions solver;
    double ee_tolerance = 1e-3;  // relative, on the achieved per-slot EE
    int max_bisections = 40;
};

struct MsrResult {
    ControlDecision decision;
    double power_price = 0.0;  // c in Y = c * phi_eff
    double mu_sum = 0.0;
    double p_sum = 0.0;
    double ee = 0.0;
    bool feasible = true;  // false when no tested price met ee_required
    int bisections = 0;
};

/// Full-buffer maximum-sum-rate allocation: unit queue weights, with a power
/// price found by bisection so the slot's EE meets cfg.ee_required.
MsrResult msr_solve(const NetworkConfig& cfg, const ChannelState& ch, const MsrOptions& opts = {});

}  // namespace hcran
