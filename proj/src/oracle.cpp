#include "hcran/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hcran {

namespace {

constexpr int kNone = -1;
constexpr int kScanPasses = 3;

/// One candidate binary assignment. RRH-tier RB owners index RUEs first
/// (0..J-1), then HUEs (J..J+M-1).
struct Assignment {
    std::vector<int> rrh_owner;
    std::vector<int> hpn_owner;
    std::vector<std::uint8_t> assoc;
};

/// A power variable: transmitter `node` (num_rrh = HPN) on one owned RB.
struct Variable {
    std::size_t node;
    std::size_t rb;   // index into rrh_owner or hpn_owner
    bool hpn;
};

class PowerProblem {
public:
    PowerProblem(const NetworkConfig& cfg, const ChannelState& ch, const DriftWeights& w,
                 const Assignment& a)
        : cfg_(cfg), ch_(ch), w_(w), a_(a) {
        for (std::size_t k = 0; k < cfg.num_rb_rrh; ++k)
            if (a.rrh_owner[k] != kNone)
                for (std::size_t i = 0; i < cfg.num_rrh; ++i) vars_.push_back({i, k, false});
        for (std::size_t l = 0; l < cfg.num_rb_hpn; ++l)
            if (a.hpn_owner[l] != kNone) vars_.push_back({cfg.num_rrh, l, true});
    }

    [[nodiscard]] std::size_t size() const { return vars_.size(); }
    [[nodiscard]] const Variable& var(std::size_t v) const { return vars_[v]; }

    double budget(std::size_t node) const {
        return node == cfg_.num_rrh ? cfg_.p_max_hpn : cfg_.p_max_rrh;
    }

    double node_sum(const std::vector<double>& x, std::size_t node) const {
        double s = 0.0;
        for (std::size_t v = 0; v < vars_.size(); ++v)
            if (vars_[v].node == node) s += x[v];
        return s;
    }

    double gain(const Variable& v) const {
        if (v.hpn) return ch_.g_hpn_hue(static_cast<std::size_t>(a_.hpn_owner[v.rb]), v.rb);
        const auto e = static_cast<std::size_t>(a_.rrh_owner[v.rb]);
        return e < cfg_.num_rue ? ch_.g_rrh_rue(v.node, e, v.rb)
                                : ch_.g_rrh_hue(v.node, e - cfg_.num_rue, v.rb);
    }

    double weight_of(const Variable& v) const {
        if (v.hpn) return w_.b_hue[static_cast<std::size_t>(a_.hpn_owner[v.rb])];
        const auto e = static_cast<std::size_t>(a_.rrh_owner[v.rb]);
        return e < cfg_.num_rue ? w_.b_rue[e] : w_.b_hue[e - cfg_.num_rue];
    }

    /// Objective for powers `x`, summed per RB.
    double value(const std::vector<double>& x) const {
        std::vector<double> snr_rrh(cfg_.num_rb_rrh, 0.0), snr_hpn(cfg_.num_rb_hpn, 0.0);
        double cost = 0.0;
        for (std::size_t v = 0; v < vars_.size(); ++v) {
            const Variable& var = vars_[v];
            (var.hpn ? snr_hpn[var.rb] : snr_rrh[var.rb]) += x[v] * gain(var);
            cost += (var.hpn ? w_.y_h : w_.y_r) * x[v];
        }
        double reward = 0.0;
        for (std::size_t k = 0; k < cfg_.num_rb_rrh; ++k)
            if (a_.rrh_owner[k] != kNone) {
                const auto e = static_cast<std::size_t>(a_.rrh_owner[k]);
                const double b = e < cfg_.num_rue ? w_.b_rue[e] : w_.b_hue[e - cfg_.num_rue];
                reward += b * cfg_.bandwidth_rb * std::log2(1.0 + snr_rrh[k]);
            }
        for (std::size_t l = 0; l < cfg_.num_rb_hpn; ++l)
            if (a_.hpn_owner[l] != kNone) {
                const double b = w_.b_hue[static_cast<std::size_t>(a_.hpn_owner[l])];
                reward += b * cfg_.bandwidth_rb * std::log2(1.0 + snr_hpn[l]);
            }
        return cost - reward;
    }

private:
    const NetworkConfig& cfg_;
    const ChannelState& ch_;
    const DriftWeights& w_;
    const Assignment& a_;
    std::vector<Variable> vars_;
};

struct Solved {
    std::vector<double> x;
    double value = 0.0;
    long long evaluations = 0;
};

Solved minimise_powers(const PowerProblem& prob, const OracleOptions& opts) {
    const std::size_t n = prob.size();
    Solved s;
    s.x.assign(n, 0.0);
    s.value = prob.value(s.x);
    s.evaluations = 1;
    if (n == 0) return s;

    auto try_point = [&](std::vector<double>& cand) {
        ++s.evaluations;
        const double v = prob.value(cand);
        if (v < s.value) {
            s.value = v;
            s.x = cand;
            return true;
        }
        return false;
    };

    // Coarse grid, one variable at a time.
    for (int pass = 0; pass < kScanPasses; ++pass) {
        for (std::size_t v = 0; v < n; ++v) {
            const std::size_t node = prob.var(v).node;
            const double step = prob.budget(node) * opts.grid_fraction;
            const double room = prob.budget(node) - (prob.node_sum(s.x, node) - s.x[v]);
            std::vector<double> cand = s.x;
            for (double p = 0.0; p <= room + 1e-12; p += step) {
                cand[v] = std::min(p, room);
                try_point(cand);
            }
        }
    }

    // Pattern search: +-e_v and e_u - e_v within a node, halving on failure.
    double frac = opts.grid_fraction;
    while (frac >= opts.final_step) {
        bool improved = false;
        for (std::size_t v = 0; v < n && !improved; ++v) {
            const std::size_t node = prob.var(v).node;
            const double step = prob.budget(node) * frac;
            const double used = prob.node_sum(s.x, node);
            std::vector<double> cand = s.x;
            if (used + step <= prob.budget(node)) {
                cand[v] = s.x[v] + step;
                if (try_point(cand)) { improved = true; break; }
            }
            if (s.x[v] >= step) {
                cand = s.x;
                cand[v] = s.x[v] - step;
                if (try_point(cand)) { improved = true; break; }
            }
            for (std::size_t u = 0; u < n; ++u) {
                if (u == v || prob.var(u).node != node || s.x[v] < step) continue;
                cand = s.x;
                cand[v] -= step;
                cand[u] += step;
                if (try_point(cand)) { improved = true; break; }
            }
        }
        if (!improved) frac *= 0.5;
    }
    return s;
}

bool next_assignment(Assignment& a, std::size_t num_ue_rrh, std::size_t num_hue) {
    // Mixed-radix increment: RRH digits in [-1, J+M-1], HPN digits in [-1, M-1].
    for (auto& d : a.rrh_owner) {
        if (++d < static_cast<int>(num_ue_rrh)) return true;
        d = kNone;
    }
    for (auto& d : a.hpn_owner) {
        if (++d < static_cast<int>(num_hue)) return true;
        d = kNone;
    }
    return false;
}

/// Derives s_m; false when some HUE would hold RBs on both tiers.
bool derive_assoc(Assignment& a, const NetworkConfig& cfg) {
    std::fill(a.assoc.begin(), a.assoc.end(), 0);
    for (int e : a.rrh_owner)
        if (e >= static_cast<int>(cfg.num_rue)) a.assoc[static_cast<std::size_t>(e) - cfg.num_rue] = 1;
    for (int m : a.hpn_owner)
        if (m != kNone && a.assoc[static_cast<std::size_t>(m)]) return false;
    return true;
}

ControlDecision to_decision(const NetworkConfig& cfg, const Assignment& a, const PowerProblem& prob,
                            const std::vector<double>& x) {
    ControlDecision d = ControlDecision::zeros(cfg);
    d.assoc = a.assoc;
    for (std::size_t k = 0; k < cfg.num_rb_rrh; ++k) {
        const int e = a.rrh_owner[k];
        if (e == kNone) continue;
        if (e < static_cast<int>(cfg.num_rue))
            d.rb_rue(static_cast<std::size_t>(e), k) = 1;
        else
            d.rb_hue_rrh(static_cast<std::size_t>(e) - cfg.num_rue, k) = 1;
    }
    for (std::size_t l = 0; l < cfg.num_rb_hpn; ++l)
        if (a.hpn_owner[l] != kNone) d.rb_hue_hpn(static_cast<std::size_t>(a.hpn_owner[l]), l) = 1;

    for (std::size_t v = 0; v < prob.size(); ++v) {
        const Variable& var = prob.var(v);
        if (var.hpn) {
            d.pw_hue_hpn(static_cast<std::size_t>(a.hpn_owner[var.rb]), var.rb) = x[v];
            continue;
        }
        const auto e = static_cast<std::size_t>(a.rrh_owner[var.rb]);
        if (e < cfg.num_rue)
            d.pw_rue(var.node, e, var.rb) = x[v];
        else
            d.pw_hue_rrh(var.node, e - cfg.num_rue, var.rb) = x[v];
    }
    return d;
}

}  // namespace

long long count_assignments(const NetworkConfig& cfg) {
    const double n = std::pow(static_cast<double>(1 + cfg.num_rue + cfg.num_hue),
                              static_cast<double>(cfg.num_rb_rrh)) *
                     std::pow(static_cast<double>(1 + cfg.num_hue), static_cast<double>(cfg.num_rb_hpn));
    if (n > static_cast<double>(std::numeric_limits<long long>::max()))
        return std::numeric_limits<long long>::max();
    return static_cast<long long>(n);
}

double oracle_objective(const NetworkConfig& cfg, const ChannelState& ch, const DriftWeights& w,
                        const ControlDecision& d) {
    double value = 0.0;
    for (std::size_t j = 0; j < cfg.num_rue; ++j)
        for (std::size_t k = 0; k < cfg.num_rb_rrh; ++k) {
            if (!d.rb_rue(j, k)) continue;
            double snr = 0.0;
            for (std::size_t i = 0; i < cfg.num_rrh; ++i) {
                snr += d.pw_rue(i, j, k) * ch.g_rrh_rue(i, j, k);
                value += w.y_r * d.pw_rue(i, j, k);
            }
            value -= w.b_rue[j] * cfg.bandwidth_rb * std::log2(1.0 + snr);
        }
    for (std::size_t m = 0; m < cfg.num_hue; ++m) {
        if (d.assoc[m]) {
            for (std::size_t k = 0; k < cfg.num_rb_rrh; ++k) {
                if (!d.rb_hue_rrh(m, k)) continue;
                double snr = 0.0;
                for (std::size_t i = 0; i < cfg.num_rrh; ++i) {
                    snr += d.pw_hue_rrh(i, m, k) * ch.g_rrh_hue(i, m, k);
                    value += w.y_r * d.pw_hue_rrh(i, m, k);
                }
                value -= w.b_hue[m] * cfg.bandwidth_rb * std::log2(1.0 + snr);
            }
        } else {
            for (std::size_t l = 0; l < cfg.num_rb_hpn; ++l) {
                if (!d.rb_hue_hpn(m, l)) continue;
                value += w.y_h * d.pw_hue_hpn(m, l);
                value -= w.b_hue[m] * cfg.bandwidth_rb *
                         std::log2(1.0 + d.pw_hue_hpn(m, l) * ch.g_hpn_hue(m, l));
            }
        }
    }
    return value;
}

OracleResult enumerate_subproblem3(const NetworkConfig& cfg, const ChannelState& ch,
                                   const DriftWeights& w, const OracleOptions& opts) {
    ch.check_shape(cfg);
    if (w.b_hue.size() != cfg.num_hue || w.b_rue.size() != cfg.num_rue)
        throw ShapeError("drift weights do not match the network config");

    const long long assignments = count_assignments(cfg);
    const double vars = static_cast<double>(cfg.num_rrh * cfg.num_rb_rrh + cfg.num_rb_hpn);
    const double per_assignment = vars * (1.0 / opts.grid_fraction + 1.0) * kScanPasses;
    const double estimate = static_cast<double>(assignments) * per_assignment;
    if (estimate > static_cast<double>(opts.budget))
        throw BudgetExceeded("instance needs about " + std::to_string(static_cast<long long>(estimate)) +
                             " grid evaluations, budget is " + std::to_string(opts.budget));

    OracleResult best;
    best.decision = ControlDecision::zeros(cfg);
    best.objective = std::numeric_limits<double>::infinity();

    Assignment a;
    a.rrh_owner.assign(cfg.num_rb_rrh, kNone);
    a.hpn_owner.assign(cfg.num_rb_hpn, kNone);
    a.assoc.assign(cfg.num_hue, 0);
    const std::size_t rrh_radix = cfg.num_rue + cfg.num_hue;
    do {
        if (!derive_assoc(a, cfg)) continue;
        ++best.assignments;
        const PowerProblem prob(cfg, ch, w, a);
        const Solved s = minimise_powers(prob, opts);
        best.evaluations += s.evaluations;
        if (s.value < best.objective) {
            best.objective = s.value;
            best.decision = to_decision(cfg, a, prob, s.x);
        }
    } while (next_assignment(a, rrh_radix, cfg.num_hue));
    return best;
}

MsrResult msr_solve(const NetworkConfig& cfg, const ChannelState& ch, const MsrOptions& opts) {
    DriftWeights w;
    w.b_hue.assign(cfg.num_hue, 1.0);
    w.b_rue.assign(cfg.num_rue, 1.0);

    auto run = [&](double price) {
        w.y_r = price * cfg.drain_eff_rrh;
        w.y_h = price * cfg.drain_eff_hpn;
        MsrResult r;
        r.decision = solve_resource_allocation(cfg, ch, w, opts.solver).decision;
        r.power_price = price;
        r.mu_sum = rate_sum(cfg, ch, r.decision);
        r.p_sum = power_totals(cfg, r.decision).sum;
        r.ee = instantaneous_ee(r.mu_sum, r.p_sum, cfg);
        return r;
    };

    const double target = cfg.ee_required;
    MsrResult best = run(0.0);
    if (best.ee >= target) return best;

    // mu - c p_sum >= 0 at c = W * target is exactly EE >= target, so larger
    // prices never help.
    double lo = 0.0;
    double hi = cfg.bandwidth_total * target;
    MsrResult top = run(hi);
    if (top.ee < target) {
        top.feasible = false;
        return top;
    }
    best = top;
    int n = 0;
    while (n < opts.max_bisections && best.ee - target > opts.ee_tolerance * target) {
        ++n;
        const double mid = 0.5 * (lo + hi);
        MsrResult r = run(mid);
        if (r.ee >= target) {
            hi = mid;
            best = std::move(r);
        } else {
            lo = mid;
        }
    }
    best.bisections = n;
    return best;
}

}  // namespace hcran
