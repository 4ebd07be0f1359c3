#pragma once

// Traffic queues Q, auxiliary virtual queues H and the energy-efficiency
// virtual queue Z. Contents are fluid bits; every update keeps them >= 0.

#include <cstdint>
#include <span>
#include <vector>

#include "hcran/model.hpp"

namespace hcran {

struct QueueState {
    std::vector<double> q_hue;  // Q_m
    std::vector<double> q_rue;  // Q_j
    std::vector<double> h_hue;  // H_m
    std::vector<double> h_rue;  // H_j
    double z = 0.0;             // Z
    std::uint64_t slot = 0;

    static QueueState zeros(const NetworkConfig& cfg);
};

/// Q' = max{Q - service, 0} + admit, elementwise. `service_*` are bits served
/// in the slot (mu * tau), not rates.
QueueState update_traffic_queues(const QueueState& qs, std::span<const double> service_hue,
                                 std::span<const double> service_rue,
                                 std::span<const double> admit_hue,
                                 std::span<const double> admit_rue);

/// H' = max{H - R, 0} + gamma, elementwise.
QueueState update_virtual_h(const QueueState& qs, std::span<const double> admit_hue,
                            std::span<const double> admit_rue, std::span<const double> aux_hue,
                            std::span<const double> aux_rue);

/// Z' = max{Z - mu_sum, 0} + W * eta_req * p_sum.
QueueState update_virtual_z(const QueueState& qs, double mu_sum, double p_sum,
                            const NetworkConfig& cfg);

/// 1/2 (sum Q_m^2 + sum H_m^2 + sum Q_j^2 + sum H_j^2 + Z^2).
double lyapunov_value(const QueueState& qs);

}  // namespace hcran
