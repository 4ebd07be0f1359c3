#include "hcran/waterfill.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "hcran/array.hpp"

namespace hcran {

namespace {
constexpr double kLn2 = std::numbers::ln2;
}

double waterfill_single(double weight, double price, double gain, double cap) {
    if (weight <= 0.0 || gain <= 0.0) return 0.0;
    if (price <= 0.0) {
        if (!std::isfinite(cap)) throw std::invalid_argument("unbounded water level without a cap");
        return cap;
    }
    const double p = weight / (price * kLn2) - 1.0 / gain;
    return std::clamp(p, 0.0, cap);
}

CoupledWaterfill waterfill_coupled(double weight, std::span<const double> prices,
                                   std::span<const double> gains, std::span<const double> caps,
                                   double tol, int max_sweeps) {
    const std::size_t n = gains.size();
    if (prices.size() != n || caps.size() != n) throw ShapeError("waterfill_coupled: length mismatch");

    CoupledWaterfill out;
    out.power.assign(n, 0.0);
    if (weight <= 0.0) return out;

    double snr = 0.0;  // sum_i p_i g_i, kept in sync with out.power
    out.converged = false;
    for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
        double moved = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double old = out.power[i];
            double p = 0.0;
            if (gains[i] > 0.0) {
                const double others = snr - old * gains[i];
                if (prices[i] <= 0.0) {
                    if (!std::isfinite(caps[i]))
                        throw std::invalid_argument("unbounded water level without a cap");
                    p = caps[i];
                } else {
                    p = weight / (prices[i] * kLn2) - (1.0 + others) / gains[i];
                    p = std::clamp(p, 0.0, caps[i]);
                }
                snr = others + p * gains[i];
            }
            out.power[i] = p;
            moved = std::max(moved, std::abs(p - old));
        }
        out.sweeps = sweep;
        if (moved < tol) {
            out.converged = true;
            break;
        }
    }
    return out;
}

std::vector<double> waterfill_budget(std::span<const double> weights,
                                     std::span<const double> gains,
                                     std::span<const double> floors, double price, double budget,
                                     double* multiplier) {
    const std::size_t n = weights.size();
    if (gains.size() != n || floors.size() != n) throw ShapeError("waterfill_budget: length mismatch");
    std::vector<double> power(n, 0.0);
    if (multiplier) *multiplier = 0.0;

    // p_k = [w_k * L - f_k]^+ with f_k = c_k / g_k and L = 1 / ((price + theta) ln2).
    struct Item {
        std::size_t k;
        double w;
        double f;
    };
    std::vector<Item> items;
    for (std::size_t k = 0; k < n; ++k)
        if (weights[k] > 0.0 && gains[k] > 0.0) items.push_back({k, weights[k], floors[k] / gains[k]});
    if (items.empty()) return power;

    auto total_at = [&](double level) {
        double s = 0.0;
        for (const auto& it : items) s += std::max(it.w * level - it.f, 0.0);
        return s;
    };

    double level;
    if (price > 0.0 && total_at(1.0 / (price * kLn2)) <= budget) {
        level = 1.0 / (price * kLn2);
    } else {
        // Budget binds: solve the piecewise-linear equation total(L) = budget.
        std::sort(items.begin(), items.end(),
                  [](const Item& a, const Item& b) { return a.f * b.w < b.f * a.w; });
        double sum_w = 0.0;
        double sum_f = 0.0;
        level = 0.0;
        for (std::size_t a = 0; a < items.size(); ++a) {
            sum_w += items[a].w;
            sum_f += items[a].f;
            level = (budget + sum_f) / sum_w;
            const bool last = a + 1 == items.size();
            if (last || level <= items[a + 1].f / items[a + 1].w) break;
        }
        if (multiplier) *multiplier = std::max(1.0 / (level * kLn2) - price, 0.0);
    }
    for (const auto& it : items) power[it.k] = std::max(it.w * level - it.f, 0.0);

    // Rounding can leave the sum a few ulps above the budget.
    const double sum = std::accumulate(power.begin(), power.end(), 0.0);
    if (sum > budget) {
        const double scale = budget / sum;
        for (auto& p : power) p *= scale;
    }
    return power;
}

}  // namespace hcran
