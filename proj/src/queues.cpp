#include "hcran/queues.hpp"

#include <cmath>
#include <stdexcept>

namespace hcran {

namespace {

void check_inputs(std::span<const double> v, std::size_t n, const char* name) {
    if (v.size() != n) throw ShapeError(std::string(name) + " has the wrong length");
    for (double x : v)
        if (!(std::isfinite(x) && x >= 0.0))
            throw std::invalid_argument(std::string(name) + " must be finite and non-negative");
}

void drain_then_add(std::vector<double>& queue, std::span<const double> out,
                    std::span<const double> in) {
    for (std::size_t n = 0; n < queue.size(); ++n)
        queue[n] = std::max(queue[n] - out[n], 0.0) + in[n];
}

}  // namespace

QueueState QueueState::zeros(const NetworkConfig& cfg) {
    QueueState qs;
    qs.q_hue.assign(cfg.num_hue, 0.0);
    qs.q_rue.assign(cfg.num_rue, 0.0);
    qs.h_hue.assign(cfg.num_hue, 0.0);
    qs.h_rue.assign(cfg.num_rue, 0.0);
    return qs;
}

QueueState update_traffic_queues(const QueueState& qs, std::span<const double> service_hue,
                                 std::span<const double> service_rue,
                                 std::span<const double> admit_hue,
                                 std::span<const double> admit_rue) {
    check_inputs(service_hue, qs.q_hue.size(), "service_hue");
    check_inputs(service_rue, qs.q_rue.size(), "service_rue");
    check_inputs(admit_hue, qs.q_hue.size(), "admit_hue");
    check_inputs(admit_rue, qs.q_rue.size(), "admit_rue");
    QueueState next = qs;
    drain_then_add(next.q_hue, service_hue, admit_hue);
    drain_then_add(next.q_rue, service_rue, admit_rue);
    return next;
}

QueueState update_virtual_h(const QueueState& qs, std::span<const double> admit_hue,
                            std::span<const double> admit_rue, std::span<const double> aux_hue,
                            std::span<const double> aux_rue) {
    check_inputs(admit_hue, qs.h_hue.size(), "admit_hue");
    check_inputs(admit_rue, qs.h_rue.size(), "admit_rue");
    check_inputs(aux_hue, qs.h_hue.size(), "aux_hue");
    check_inputs(aux_rue, qs.h_rue.size(), "aux_rue");
    QueueState next = qs;
    drain_then_add(next.h_hue, admit_hue, aux_hue);
    drain_then_add(next.h_rue, admit_rue, aux_rue);
    return next;
}

QueueState update_virtual_z(const QueueState& qs, double mu_sum, double p_sum,
                            const NetworkConfig& cfg) {
    if (!(std::isfinite(mu_sum) && mu_sum >= 0.0 && std::isfinite(p_sum) && p_sum >= 0.0))
        throw std::invalid_argument("mu_sum and p_sum must be finite and non-negative");
    QueueState next = qs;
    next.z = std::max(qs.z - mu_sum, 0.0) + cfg.bandwidth_total * cfg.ee_required * p_sum;
    return next;
}

double lyapunov_value(const QueueState& qs) {
    double s = qs.z * qs.z;
    for (double v : qs.q_hue) s += v * v;
    for (double v : qs.q_rue) s += v * v;
    for (double v : qs.h_hue) s += v * v;
    for (double v : qs.h_rue) s += v * v;
    return 0.5 * s;
}

}  // namespace hcran
