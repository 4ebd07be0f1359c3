#pragma once

// Water-filling kernels.
//
// All kernels maximise  weight * log2(1 + sum_i p_i g_i) - sum_i price_i p_i
// over 0 <= p_i <= cap_i. `weight` is the coefficient of the log2 rate term
// (queue weight times the per-RB rate unit), `price` the marginal power cost.

#include <limits>
#include <span>
#include <vector>

namespace hcran {

inline constexpr double kNoCap = std::numeric_limits<double>::infinity();

/// Single transmitter: [weight/(price ln2) - 1/gain]^+, clipped to `cap`.
/// A zero price with a positive weight saturates at `cap`.
double waterfill_single(double weight, double price, double gain, double cap = kNoCap);

struct CoupledWaterfill {
    std::vector<double> power;
    int sweeps = 0;
    bool converged = true;
};

/// Cooperative transmitters sharing one RB (receiver combines all of them).
/// Cyclic coordinate ascent: each transmitter in turn water-fills against the
/// SNR contributed by the others, until no power moves by more than `tol`.
CoupledWaterfill waterfill_coupled(double weight, std::span<const double> prices,
                                   std::span<const double> gains, std::span<const double> caps,
                                   double tol = 1e-8, int max_sweeps = 200);

/// One transmitter feeding several RBs under a total power budget:
///   maximise sum_k w_k log2(1 + p_k g_k / c_k) - price * sum_k p_k,
///   subject to sum_k p_k <= budget,
/// where c_k >= 1 is the SNR floor already provided by other transmitters.
/// Returns the powers and writes the budget multiplier (>= 0) to `multiplier`.
std::vector<double> waterfill_budget(std::span<const double> weights,
                                     std::span<const double> gains,
                                     std::span<const double> floors, double price, double budget,
                                     double* multiplier = nullptr);

}  // namespace hcran
