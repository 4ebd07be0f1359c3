#pragma once

// Shared fixtures: small random instances of the resource-allocation problem.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include "hcran/controller.hpp"
#include "hcran/model.hpp"

namespace hcran::testing {

struct TinyInstance {
    NetworkConfig cfg;
    ChannelState ch;
    DriftWeights w;
};

/// At most 2 RRHs, 3 UEs and 3 RBs in total; gains, weights and prices are
/// spread over a few decades so both the budget-bound and the price-bound
/// regimes show up.
inline TinyInstance random_tiny(std::mt19937_64& rng) {
    auto uni = [&rng](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    auto pick = [&rng](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    auto log_uni = [&](double lo, double hi) { return std::exp(uni(std::log(lo), std::log(hi))); };

    TinyInstance in;
    NetworkConfig& c = in.cfg;
    c.num_rrh = static_cast<std::size_t>(pick(1, 2));
    const int users = pick(2, 3);
    c.num_hue = static_cast<std::size_t>(pick(1, users - 1));
    c.num_rue = static_cast<std::size_t>(users) - c.num_hue;
    const int rbs = pick(1, 3);
    c.num_rb_rrh = static_cast<std::size_t>(pick(1, rbs));
    c.num_rb_hpn = static_cast<std::size_t>(rbs) - c.num_rb_rrh;
    c.bandwidth_rb = 15e3;
    c.bandwidth_total = c.bandwidth_rb * rbs;
    c.p_max_rrh = uni(0.5, 3.0);
    c.p_max_hpn = uni(2.0, 10.0);
    c.drain_eff_rrh = uni(1.0, 2.0);
    c.drain_eff_hpn = uni(1.0, 2.0);
    c.validate();

    in.ch = ChannelState::zeros(c);
    for (auto& g : in.ch.g_rrh_rue.data()) g = log_uni(0.05, 50.0);
    for (auto& g : in.ch.g_rrh_hue.data()) g = log_uni(0.05, 50.0);
    for (auto& g : in.ch.g_hpn_hue.data()) g = log_uni(0.05, 50.0);

    in.w.b_hue.resize(c.num_hue);
    in.w.b_rue.resize(c.num_rue);
    for (auto& b : in.w.b_hue) b = pick(0, 9) == 0 ? 0.0 : uni(0.0, 2.0);
    for (auto& b : in.w.b_rue) b = pick(0, 9) == 0 ? 0.0 : uni(0.0, 2.0);
    const double scale = c.bandwidth_rb;
    in.w.y_r = pick(0, 3) == 0 ? 0.0 : scale * log_uni(0.01, 2.0);
    in.w.y_h = pick(0, 3) == 0 ? 0.0 : scale * log_uni(0.01, 2.0);
    return in;
}

/// A feasible decision with random ownership and random powers that respect
/// every node's budget.
inline ControlDecision random_decision(const NetworkConfig& c, std::mt19937_64& rng) {
    auto uni = [&rng](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    auto pick = [&rng](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n)(rng); };

    ControlDecision d = ControlDecision::zeros(c);
    for (auto& s : d.assoc) s = pick(1) ? 1 : 0;
    for (std::size_t k = 0; k < c.num_rb_rrh; ++k) {
        const std::size_t e = pick(c.num_rue + c.num_hue);  // last value leaves the RB idle
        if (e < c.num_rue) {
            d.rb_rue(e, k) = 1;
            for (std::size_t i = 0; i < c.num_rrh; ++i) d.pw_rue(i, e, k) = uni(0.0, 1.0);
        } else if (e < c.num_rue + c.num_hue && d.assoc[e - c.num_rue]) {
            d.rb_hue_rrh(e - c.num_rue, k) = 1;
            for (std::size_t i = 0; i < c.num_rrh; ++i) d.pw_hue_rrh(i, e - c.num_rue, k) = uni(0.0, 1.0);
        }
    }
    for (std::size_t l = 0; l < c.num_rb_hpn; ++l) {
        const std::size_t m = pick(c.num_hue);
        if (m < c.num_hue && !d.assoc[m]) {
            d.rb_hue_hpn(m, l) = 1;
            d.pw_hue_hpn(m, l) = uni(0.0, 1.0);
        }
    }
    // Rescale each node to a random fraction of its budget.
    for (std::size_t i = 0; i < c.num_rrh; ++i) {
        double sum = 0.0;
        for (std::size_t k = 0; k < c.num_rb_rrh; ++k) {
            for (std::size_t j = 0; j < c.num_rue; ++j) sum += d.pw_rue(i, j, k);
            for (std::size_t m = 0; m < c.num_hue; ++m) sum += d.pw_hue_rrh(i, m, k);
        }
        if (sum <= 0.0) continue;
        const double f = uni(0.0, 1.0) * c.p_max_rrh / sum;
        for (std::size_t k = 0; k < c.num_rb_rrh; ++k) {
            for (std::size_t j = 0; j < c.num_rue; ++j) d.pw_rue(i, j, k) *= f;
            for (std::size_t m = 0; m < c.num_hue; ++m) d.pw_hue_rrh(i, m, k) *= f;
        }
    }
    double hpn = 0.0;
    for (double p : d.pw_hue_hpn.data()) hpn += p;
    if (hpn > 0.0) {
        const double f = uni(0.0, 1.0) * c.p_max_hpn / hpn;
        for (double& p : d.pw_hue_hpn.data()) p *= f;
    }
    return d;
}

/// Random fading-like gains with a spread of several decades.
inline ChannelState random_channel(const NetworkConfig& c, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(std::log(0.05), std::log(50.0));
    ChannelState ch = ChannelState::zeros(c);
    for (auto* v : {&ch.g_rrh_rue.data(), &ch.g_rrh_hue.data(), &ch.g_hpn_hue.data()})
        for (auto& g : *v) g = std::exp(u(rng));
    return ch;
}

inline double weight_scale(const TinyInstance& in) {
    double s = 0.0;
    for (double b : in.w.b_hue) s = std::max(s, b);
    for (double b : in.w.b_rue) s = std::max(s, b);
    return s * in.cfg.bandwidth_rb;
}

}  // namespace hcran::testing
