#include "hcran/controller.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hcran/waterfill.hpp"

namespace hcran {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Index of the smallest entry of column `col` (lowest row wins ties).
std::pair<std::size_t, double> column_min(const Array2<double>& a, std::size_t col,
                                          const std::vector<std::uint8_t>* eligible = nullptr) {
    std::size_t best = a.rows();
    double value = kInf;
    for (std::size_t r = 0; r < a.rows(); ++r) {
        if (eligible && !(*eligible)[r]) continue;
        if (a(r, col) < value) {
            value = a(r, col);
            best = r;
        }
    }
    return {best, value};
}

double row_min(const Array2<double>& a, std::size_t row) {
    double value = kInf;
    for (std::size_t c = 0; c < a.cols(); ++c) value = std::min(value, a(row, c));
    return value;
}

RbAssignment empty_assignment(const NetworkConfig& cfg) {
    RbAssignment a;
    a.assoc.assign(cfg.num_hue, 0);
    a.rb_rue = Array2<std::uint8_t>(cfg.num_rue, cfg.num_rb_rrh);
    a.rb_hue_rrh = Array2<std::uint8_t>(cfg.num_hue, cfg.num_rb_rrh);
    a.rb_hue_hpn = Array2<std::uint8_t>(cfg.num_hue, cfg.num_rb_hpn);
    return a;
}

/// Owner of each RRH-tier RB: index < num_rue is an RUE, otherwise HUE (idx - num_rue).
std::vector<std::size_t> rrh_owners(const NetworkConfig& cfg, const RbAssignment& a) {
    const std::size_t none = cfg.num_rue + cfg.num_hue;
    std::vector<std::size_t> owner(cfg.num_rb_rrh, none);
    for (std::size_t k = 0; k < cfg.num_rb_rrh; ++k) {
        for (std::size_t j = 0; j < cfg.num_rue; ++j)
            if (a.rb_rue(j, k)) owner[k] = j;
        for (std::size_t m = 0; m < cfg.num_hue; ++m)
            if (a.assoc[m] && a.rb_hue_rrh(m, k)) owner[k] = cfg.num_rue + m;
    }
    return owner;
}

NodePower node_power(const NetworkConfig& cfg, const RbAssignment& a, const Array3<double>& rue,
                     const Array3<double>& hue_rrh, const Array2<double>& hue_hpn) {
    NodePower np;
    np.rrh.assign(cfg.num_rrh, 0.0);
    for (std::size_t k = 0; k < cfg.num_rb_rrh; ++k) {
        for (std::size_t j = 0; j < cfg.num_rue; ++j)
            if (a.rb_rue(j, k))
                for (std::size_t i = 0; i < cfg.num_rrh; ++i) np.rrh[i] += rue(i, j, k);
        for (std::size_t m = 0; m < cfg.num_hue; ++m)
            if (a.assoc[m] && a.rb_hue_rrh(m, k))
                for (std::size_t i = 0; i < cfg.num_rrh; ++i) np.rrh[i] += hue_rrh(i, m, k);
    }
    for (std::size_t m = 0; m < cfg.num_hue; ++m)
        if (!a.assoc[m])
            for (std::size_t l = 0; l < cfg.num_rb_hpn; ++l)
                if (a.rb_hue_hpn(m, l)) np.hpn += hue_hpn(m, l);
    return np;
}

/// Copies the assigned powers into a decision, scaling each node down
/// uniformly if its total exceeds the limit.
void write_powers(const NetworkConfig& cfg, const RbAssignment& a, const Array3<double>& rue,
                  const Array3<double>& hue_rrh, const Array2<double>& hue_hpn,
                  ControlDecision& d) {
    const NodePower np = node_power(cfg, a, rue, hue_rrh, hue_hpn);
    std::vector<double> scale(cfg.num_rrh, 1.0);
    for (std::size_t i = 0; i < cfg.num_rrh; ++i)
        if (np.rrh[i] > cfg.p_max_rrh) scale[i] = cfg.p_max_rrh / np.rrh[i];
    const double scale_h = np.hpn > cfg.p_max_hpn ? cfg.p_max_hpn / np.hpn : 1.0;

    d.assoc = a.assoc;
    d.rb_rue = a.rb_rue;
    d.rb_hue_rrh = a.rb_hue_rrh;
    d.rb_hue_hpn = a.rb_hue_hpn;
    d.pw_rue.fill(0.0);
    d.pw_hue_rrh.fill(0.0);
    d.pw_hue_hpn.fill(0.0);
    for (std::size_t k = 0; k < cfg.num_rb_rrh; ++k) {
        for (std::size_t j = 0; j < cfg.num_rue; ++j)
            if (a.rb_rue(j, k))
                for (std::size_t i = 0; i < cfg.num_rrh; ++i) d.pw_rue(i, j, k) = rue(i, j, k) * scale[i];
        for (std::size_t m = 0; m < cfg.num_hue; ++m)
            if (a.assoc[m] && a.rb_hue_rrh(m, k))
                for (std::size_t i = 0; i < cfg.num_rrh; ++i)
                    d.pw_hue_rrh(i, m, k) = hue_rrh(i, m, k) * scale[i];
    }
    for (std::size_t m = 0; m < cfg.num_hue; ++m)
        if (!a.assoc[m])
            for (std::size_t l = 0; l < cfg.num_rb_hpn; ++l)
                if (a.rb_hue_hpn(m, l)) d.pw_hue_hpn(m, l) = hue_hpn(m, l) * scale_h;
}

/// RB ownership in flat form: RRH-tier owners use the rrh_owners encoding,
/// HPN-tier owners are HUE indices with num_hue meaning unassigned.
struct Owners {
    std::vector<std::size_t> rrh;
    std::vector<std::size_t> hpn;
};

Owners to_owners(const NetworkConfig& cfg, const RbAssignment& a) {
    Owners o{rrh_owners(cfg, a), std::vector<std::size_t>(cfg.num_rb_hpn, cfg.num_hue)};
    for (std::size_t l = 0; l < cfg.num_rb_hpn; ++l)
        for (std::size_t m = 0; m < cfg.num_hue; ++m)
            if (!a.assoc[m] && a.rb_hue_hpn(m, l)) o.hpn[l] = m;
    return o;
}

RbAssignment from_owners(const NetworkConfig& cfg, const Owners& o) {
    RbAssignment a = empty_assignment(cfg);
    for (std::size_t k = 0; k < cfg.num_rb_rrh; ++k) {
        const std::size_t e = o.rrh[k];
        if (e < cfg.num_rue) {
            a.rb_rue(e, k) = 1;
        } else if (e < cfg.num_rue + cfg.num_hue) {
            a.rb_hue_rrh(e - cfg.num_rue, k) = 1;
            a.assoc[e - cfg.num_rue] = 1;
        }
    }
    for (std::size_t l = 0; l < cfg.num_rb_hpn; ++l)
        if (o.hpn[l] < cfg.num_hue) a.rb_hue_hpn(o.hpn[l], l) = 1;
    return a;
}

/// Per-RB best owner under a fixed association: RUEs and RRH-tier HUEs
/// compete for RRH RBs, HPN-tier HUEs for HPN RBs. Every RB gets an owner when
/// one is eligible; the exact power allocation can still leave it silent.
Owners assign_with_assoc(const RbScores& scores, const std::vector<std::uint8_t>& assoc) {
    const std::size_t num_hue = scores.phi.rows();
    const std::size_t num_rue = scores.lambda.rows();
    std::vector<std::uint8_t> on_hpn(num_hue);
    for (std::size_t m = 0; m < num_hue; ++m) on_hpn[m] = assoc[m] ? 0 : 1;

    Owners o{std::vector<std::size_t>(scores.phi.cols(), num_rue + num_hue),
             std::vector<std::size_t>(scores.gamma_score.cols(), num_hue)};
    for (std::size_t k = 0; k < o.rrh.size(); ++k) {
        const auto [m, phi] = column_min(scores.phi, k, &assoc);
        const auto [j, lambda] = column_min(scores.lambda, k);
        if (m < num_hue && phi < lambda) o.rrh[k] = num_rue + m;
        else if (j < num_rue) o.rrh[k] = j;
    }
    for (std::size_t l = 0; l < o.hpn.size(); ++l) {
        const auto [m, gamma] = column_min(scores.gamma_score, l, &on_hpn);
        if (m < num_hue) o.hpn[l] = m;
    }
    return o;
}

}  // namespace

DriftWeights drift_weights(const NetworkConfig& cfg, const QueueState& qs) {
    DriftWeights w;
    w.b_hue.resize(qs.q_hue.size());
    w.b_rue.resize(qs.q_rue.size());
    for (std::size_t m = 0; m < w.b_hue.size(); ++m) w.b_hue[m] = qs.q_hue[m] * cfg.slot_duration + qs.z;
    for (std::size_t j = 0; j < w.b_rue.size(); ++j) w.b_rue[j] = qs.q_rue[j] * cfg.slot_duration + qs.z;
    const double ee_weight = cfg.bandwidth_total * cfg.ee_required * qs.z;
    w.y_r = ee_weight * cfg.drain_eff_rrh;
    w.y_h = ee_weight * cfg.drain_eff_hpn;
    return w;
}

double best_auxiliary(const NetworkConfig& cfg, double price, double h, double a_max) {
    const double reward = cfg.control_v * price;
    if (reward <= 0.0) return 0.0;
    if (cfg.utility_kind == UtilityKind::Linear) return h < reward ? a_max : 0.0;
    // d/dgamma [reward * ln(1 + gamma/r0)] = reward / (r0 + gamma) = h.
    if (h <= 0.0) return a_max;
    return std::clamp(reward / h - cfg.utility_scale, 0.0, a_max);
}

AuxiliaryChoice select_auxiliary(const NetworkConfig& cfg, const QueueState& qs) {
    AuxiliaryChoice c;
    c.hue.resize(qs.h_hue.size());
    c.rue.resize(qs.h_rue.size());
    for (std::size_t m = 0; m < c.hue.size(); ++m)
        c.hue[m] = best_auxiliary(cfg, cfg.price_hue, qs.h_hue[m], cfg.a_max_hue);
    for (std::size_t j = 0; j < c.rue.size(); ++j)
        c.rue[j] = best_auxiliary(cfg, cfg.price_rue, qs.h_rue[j], cfg.a_max_rue);
    return c;
}

Admission admit_traffic(const QueueState& qs, const Arrivals& arrivals) {
    if (arrivals.hue.size() != qs.q_hue.size() || arrivals.rue.size() != qs.q_rue.size())
        throw ShapeError("arrivals do not match the queue state");
    Admission a;
    a.hue.resize(arrivals.hue.size());
    a.rue.resize(arrivals.rue.size());
    for (std::size_t m = 0; m < a.hue.size(); ++m) {
        if (arrivals.hue[m] < 0.0) throw std::invalid_argument("negative arrival");
        a.hue[m] = qs.h_hue[m] - qs.q_hue[m] > 0.0 ? arrivals.hue[m] : 0.0;
    }
    for (std::size_t j = 0; j < a.rue.size(); ++j) {
        if (arrivals.rue[j] < 0.0) throw std::invalid_argument("negative arrival");
        a.rue[j] = qs.h_rue[j] - qs.q_rue[j] > 0.0 ? arrivals.rue[j] : 0.0;
    }
    return a;
}

DualState DualState::zeros(std::size_t num_rrh, double step0, double scale) {
    DualState ds;
    ds.theta.assign(num_rrh + 1, 0.0);
    ds.grad.assign(num_rrh + 1, 0.0);
    ds.step0 = step0;
    ds.scale = scale;
    return ds;
}

DualState update_duals(const DualState& ds, const NodePower& power, const NetworkConfig& cfg) {
    if (ds.theta.size() != cfg.num_rrh + 1 || power.rrh.size() != cfg.num_rrh)
        throw ShapeError("dual state does not match the network config");
    DualState next = ds;
    next.iteration = ds.iteration + 1;
    const double xi = ds.scale * ds.step0 / std::sqrt(static_cast<double>(next.iteration));
    next.grad[0] = power.hpn - cfg.p_max_hpn;
    for (std::size_t i = 0; i < cfg.num_rrh; ++i) next.grad[i + 1] = power.rrh[i] - cfg.p_max_rrh;
    for (std::size_t n = 0; n < next.theta.size(); ++n)
        next.theta[n] = std::max(ds.theta[n] + xi * next.grad[n], 0.0);
    return next;
}

Array2<double> waterfill_hpn(const NetworkConfig& cfg, const ChannelState& ch,
                             const DriftWeights& w, double theta0) {
    Array2<double> u(cfg.num_hue, cfg.num_rb_hpn);
    const double price = w.y_h + theta0;
    for (std::size_t m = 0; m < cfg.num_hue; ++m) {
        const double weight = w.b_hue[m] * cfg.bandwidth_rb;
        for (std::size_t l = 0; l < cfg.num_rb_hpn; ++l)
            u(m, l) = waterfill_single(weight, price, ch.g_hpn_hue(m, l), cfg.p_max_hpn);
    }
    return u;
}

CandidatePowers waterfill_rrh(const NetworkConfig& cfg, const ChannelState& ch,
                              const DriftWeights& w, const std::vector<double>& theta,
                              const WaterfillOptions& opts) {
    const std::size_t n = cfg.num_rrh;
    CandidatePowers c;
    c.rue = Array3<double>(n, cfg.num_rue, cfg.num_rb_rrh);
    c.hue_rrh = Array3<double>(n, cfg.num_hue, cfg.num_rb_rrh);
    std::vector<double> prices(n), gains(n), caps(n, cfg.p_max_rrh);
    for (std::size_t i = 0; i < n; ++i) prices[i] = w.y_r + theta[i + 1];

    auto fill = [&](double weight, auto gain_of, auto store) {
        for (std::size_t i = 0; i < n; ++i) gains[i] = gain_of(i);
        const CoupledWaterfill r =
            waterfill_coupled(weight, prices, gains, caps, opts.tol, opts.max_sweeps);
        c.converged = c.converged && r.converged;
        for (std::size_t i = 0; i < n; ++i) store(i, r.power[i]);
    };
    for (std::size_t k = 0; k < cfg.num_rb_rrh; ++k) {
        for (std::size_t j = 0; j < cfg.num_rue; ++j)
            fill(
                w.b_rue[j] * cfg.bandwidth_rb, [&](std::size_t i) { return ch.g_rrh_rue(i, j, k); },
                [&](std::size_t i, double p) { c.rue(i, j, k) = p; });
        for (std::size_t m = 0; m < cfg.num_hue; ++m)
            fill(
                w.b_hue[m] * cfg.bandwidth_rb, [&](std::size_t i) { return ch.g_rrh_hue(i, m, k); },
                [&](std::size_t i, double p) { c.hue_rrh(i, m, k) = p; });
    }
    return c;
}

RbScores score_rbs(const NetworkConfig& cfg, const ChannelState& ch, const DriftWeights& w,
                   const std::vector<double>& theta, const CandidatePowers& powers) {
    RbScores s;
    s.phi = Array2<double>(cfg.num_hue, cfg.num_rb_rrh);
    s.lambda = Array2<double>(cfg.num_rue, cfg.num_rb_rrh);
    s.gamma_score = Array2<double>(cfg.num_hue, cfg.num_rb_hpn);
    for (std::size_t k = 0; k < cfg.num_rb_rrh; ++k) {
        for (std::size_t j = 0; j < cfg.num_rue; ++j) {
            double cost = 0.0, snr = 0.0;
            for (std::size_t i = 0; i < cfg.num_rrh; ++i) {
                const double p = powers.rue(i, j, k);
                cost += (w.y_r + theta[i + 1]) * p;
                snr += p * ch.g_rrh_rue(i, j, k);
            }
            s.lambda(j, k) = cost - w.b_rue[j] * cfg.bandwidth_rb * std::log2(1.0 + snr);
        }
        for (std::size_t m = 0; m < cfg.num_hue; ++m) {
            double cost = 0.0, snr = 0.0;
            for (std::size_t i = 0; i < cfg.num_rrh; ++i) {
                const double p = powers.hue_rrh(i, m, k);
                cost += (w.y_r + theta[i + 1]) * p;
                snr += p * ch.g_rrh_hue(i, m, k);
            }
            s.phi(m, k) = cost - w.b_hue[m] * cfg.bandwidth_rb * std::log2(1.0 + snr);
        }
    }
    for (std::size_t m = 0; m < cfg.num_hue; ++m)
        for (std::size_t l = 0; l < cfg.num_rb_hpn; ++l) {
            const double p = powers.hue_hpn(m, l);
            s.gamma_score(m, l) = (w.y_h + theta[0]) * p -
                                  w.b_hue[m] * cfg.bandwidth_rb * std::log2(1.0 + ch.g_hpn_hue(m, l) * p);
        }
    return s;
}

RbAssignment assign_rbs(const RbScores& scores) {
    const std::size_t num_hue = scores.phi.rows();
    const std::size_t num_rue = scores.lambda.rows();
    const std::size_t num_k = scores.phi.cols();
    const std::size_t num_l = scores.gamma_score.cols();
    if (scores.lambda.cols() != num_k || scores.gamma_score.rows() != num_hue)
        throw ShapeError("score matrices disagree on dimensions");

    RbAssignment a;
    a.assoc.assign(num_hue, 0);
    a.rb_rue = Array2<std::uint8_t>(num_rue, num_k);
    a.rb_hue_rrh = Array2<std::uint8_t>(num_hue, num_k);
    a.rb_hue_hpn = Array2<std::uint8_t>(num_hue, num_l);

    std::vector<double> best_hpn(num_hue);
    for (std::size_t m = 0; m < num_hue; ++m) best_hpn[m] = row_min(scores.gamma_score, m);

    for (std::size_t k = 0; k < num_k; ++k) {
        const auto [m, phi] = column_min(scores.phi, k);
        const auto [j, lambda] = column_min(scores.lambda, k);
        if (m < num_hue && phi < 0.0 && phi < lambda && phi < best_hpn[m]) {
            a.rb_hue_rrh(m, k) = 1;
            a.assoc[m] = 1;
        } else if (j < num_rue && lambda < 0.0) {
            a.rb_rue(j, k) = 1;
        }
    }

    std::vector<std::uint8_t> on_hpn(num_hue);
    for (std::size_t m = 0; m < num_hue; ++m) on_hpn[m] = a.assoc[m] ? 0 : 1;
    for (std::size_t l = 0; l < num_l; ++l) {
        const auto [m, gamma] = column_min(scores.gamma_score, l, &on_hpn);
        if (m < num_hue && gamma < 0.0) a.rb_hue_hpn(m, l) = 1;
    }
    return a;
}

PowerAllocation allocate_power(const NetworkConfig& cfg, const ChannelState& ch,
                               const DriftWeights& w, const RbAssignment& a,
                               const PowerAllocation* start, double tol, int max_sweeps) {
    PowerAllocation out;
    out.rue = Array3<double>(cfg.num_rrh, cfg.num_rue, cfg.num_rb_rrh);
    out.hue_rrh = Array3<double>(cfg.num_rrh, cfg.num_hue, cfg.num_rb_rrh);
    out.hue_hpn = Array2<double>(cfg.num_hue, cfg.num_rb_hpn);

    // HPN tier: one node, independent of the RRH tier.
    {
        std::vector<double> weights, gains, floors;
        std::vector<std::pair<std::size_t, std::size_t>> slots;
        for (std::size_t m = 0; m < cfg.num_hue; ++m) {
            if (a.assoc[m]) continue;
            for (std::size_t l = 0; l < cfg.num_rb_hpn; ++l)
                if (a.rb_hue_hpn(m, l)) {
                    weights.push_back(w.b_hue[m] * cfg.bandwidth_rb);
                    gains.push_back(ch.g_hpn_hue(m, l));
                    floors.push_back(1.0);
                    slots.emplace_back(m, l);
                }
        }
        const auto p = waterfill_budget(weights, gains, floors, w.y_h, cfg.p_max_hpn);
        for (std::size_t n = 0; n < slots.size(); ++n) out.hue_hpn(slots[n].first, slots[n].second) = p[n];
    }

    // RRH tier: block-coordinate ascent, one node at a time.
    const std::vector<std::size_t> owner = rrh_owners(cfg, a);
    const std::size_t none = cfg.num_rue + cfg.num_hue;
    std::vector<std::size_t> rbs;
    for (std::size_t k = 0; k < cfg.num_rb_rrh; ++k)
        if (owner[k] != none) rbs.push_back(k);
    if (rbs.empty()) return out;

    Array2<double> power(cfg.num_rrh, rbs.size());  // [rrh][assigned rb]
    Array2<double> gain(cfg.num_rrh, rbs.size());
    std::vector<double> weight(rbs.size());
    for (std::size_t n = 0; n < rbs.size(); ++n) {
        const std::size_t k = rbs[n];
        const std::size_t e = owner[k];
        const bool is_rue = e < cfg.num_rue;
        weight[n] = (is_rue ? w.b_rue[e] : w.b_hue[e - cfg.num_rue]) * cfg.bandwidth_rb;
        for (std::size_t i = 0; i < cfg.num_rrh; ++i) {
            gain(i, n) = is_rue ? ch.g_rrh_rue(i, e, k) : ch.g_rrh_hue(i, e - cfg.num_rue, k);
            if (start)
                power(i, n) = is_rue ? start->rue(i, e, k) : start->hue_rrh(i, e - cfg.num_rue, k);
        }
    }
    if (start) {
        // Make the warm start feasible before sweeping.
        for (std::size_t i = 0; i < cfg.num_rrh; ++i) {
            double s = 0.0;
            for (std::size_t n = 0; n < rbs.size(); ++n) s += power(i, n);
            if (s > cfg.p_max_rrh)
                for (std::size_t n = 0; n < rbs.size(); ++n) power(i, n) *= cfg.p_max_rrh / s;
        }
    }

    std::vector<double> snr(rbs.size(), 0.0);
    for (std::size_t n = 0; n < rbs.size(); ++n)
        for (std::size_t i = 0; i < cfg.num_rrh; ++i) snr[n] += power(i, n) * gain(i, n);

    std::vector<double> g(rbs.size()), floors(rbs.size());
    out.converged = false;
    for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
        double moved = 0.0;
        for (std::size_t i = 0; i < cfg.num_rrh; ++i) {
            for (std::size_t n = 0; n < rbs.size(); ++n) {
                g[n] = gain(i, n);
                floors[n] = 1.0 + std::max(snr[n] - power(i, n) * gain(i, n), 0.0);
            }
            const auto p = waterfill_budget(weight, g, floors, w.y_r, cfg.p_max_rrh);
            for (std::size_t n = 0; n < rbs.size(); ++n) {
                moved = std::max(moved, std::abs(p[n] - power(i, n)));
                snr[n] = floors[n] - 1.0 + p[n] * gain(i, n);
                power(i, n) = p[n];
            }
        }
        out.sweeps = sweep;
        if (moved <= tol * cfg.p_max_rrh) {
            out.converged = true;
            break;
        }
    }

    for (std::size_t n = 0; n < rbs.size(); ++n) {
        const std::size_t k = rbs[n];
        const std::size_t e = owner[k];
        for (std::size_t i = 0; i < cfg.num_rrh; ++i) {
            if (e < cfg.num_rue)
                out.rue(i, e, k) = power(i, n);
            else
                out.hue_rrh(i, e - cfg.num_rue, k) = power(i, n);
        }
    }
    return out;
}

double subproblem_objective(const NetworkConfig& cfg, const ChannelState& ch,
                            const DriftWeights& w, const ControlDecision& d) {
    double value = 0.0;
    for (std::size_t m = 0; m < cfg.num_hue; ++m) value -= w.b_hue[m] * rate_hue(cfg, ch, d, m);
    for (std::size_t j = 0; j < cfg.num_rue; ++j) value -= w.b_rue[j] * rate_rue(cfg, ch, d, j);
    const PowerTotals pt = power_totals(cfg, d);
    for (double p : pt.per_rrh) value += w.y_r * p;
    value += w.y_h * pt.hpn;
    return value;
}

ResourceResult solve_resource_allocation(const NetworkConfig& cfg, const ChannelState& ch,
                                         const DriftWeights& w, const SolverOptions& opts,
                                         const std::vector<double>* warm_theta) {
    ch.check_shape(cfg);
    if (w.b_hue.size() != cfg.num_hue || w.b_rue.size() != cfg.num_rue)
        throw ShapeError("drift weights do not match the network config");

    ResourceResult res;
    res.decision = ControlDecision::zeros(cfg);

    double scale = 0.0;
    for (double b : w.b_hue) scale = std::max(scale, b * cfg.bandwidth_rb);
    for (double b : w.b_rue) scale = std::max(scale, b * cfg.bandwidth_rb);
    res.duals = DualState::zeros(cfg.num_rrh, opts.step0, scale > 0.0 ? scale : 1.0);
    if (scale <= 0.0) return res;  // nothing to gain from transmitting
    if (warm_theta && warm_theta->size() == cfg.num_rrh + 1) res.duals.theta = *warm_theta;

    DualState& ds = res.duals;
    RbAssignment assignment = empty_assignment(cfg);
    CandidatePowers candidates;
    RbScores scores;
    double best_dual = -kInf;
    double best_primal = kInf;
    ControlDecision& d = res.decision;
    bool converged = false;
    bool waterfill_ok = true;
    bool last_evaluated = false;
    int iterations = 0;
    int last_progress = 0;
    double ref_dual = -kInf, ref_primal = kInf;

    RbAssignment best_assignment = assignment;
    PowerAllocation best_alloc;

    // Turns an assignment into a feasible decision and keeps it if it beats
    // the incumbent by more than rounding noise.
    auto evaluate = [&](const RbAssignment& a, const PowerAllocation& start) {
        ControlDecision cand = ControlDecision::zeros(cfg);
        bool ok = candidates.converged;
        PowerAllocation pa;
        if (opts.polish) {
            pa = allocate_power(cfg, ch, w, a, &start);
            write_powers(cfg, a, pa.rue, pa.hue_rrh, pa.hue_hpn, cand);
            ok = ok && pa.converged;
        } else {
            write_powers(cfg, a, start.rue, start.hue_rrh, start.hue_hpn, cand);
        }
        const double obj = subproblem_objective(cfg, ch, w, cand);
        const double noise = std::isfinite(best_primal) ? 1e-12 * std::abs(best_primal) : 0.0;
        if (obj < best_primal - noise) {
            best_primal = obj;
            d = std::move(cand);
            waterfill_ok = ok;
            best_assignment = a;
            best_alloc = std::move(pa);
            return true;
        }
        return false;
    };
    auto evaluate_current = [&]() {
        evaluate(assignment, PowerAllocation{candidates.rue, candidates.hue_rrh, candidates.hue_hpn, 0, true});
    };
    const bool certify = opts.polish && opts.gap_tolerance > 0.0 && opts.primal_every > 0;

    for (int n = 1; n <= opts.max_dual_iterations; ++n) {
        iterations = n;
        candidates = waterfill_rrh(cfg, ch, w, ds.theta, opts.waterfill);
        candidates.hue_hpn = waterfill_hpn(cfg, ch, w, ds.theta[0]);
        scores = score_rbs(cfg, ch, w, ds.theta, candidates);
        assignment = assign_rbs(scores);

        // Dual function: the RB LP without association coupling, plus the price of the limits.
        double dual = -ds.theta[0] * cfg.p_max_hpn;
        for (std::size_t i = 0; i < cfg.num_rrh; ++i) dual -= ds.theta[i + 1] * cfg.p_max_rrh;
        for (std::size_t k = 0; k < cfg.num_rb_rrh; ++k) {
            double best = 0.0;
            best = std::min(best, column_min(scores.phi, k).second);
            best = std::min(best, column_min(scores.lambda, k).second);
            dual += best;
        }
        for (std::size_t l = 0; l < cfg.num_rb_hpn; ++l)
            dual += std::min(0.0, column_min(scores.gamma_score, l).second);
        best_dual = std::max(best_dual, dual);

        last_evaluated = false;
        if (certify && (n == 1 || n % opts.primal_every == 0)) {
            evaluate_current();
            last_evaluated = true;
            if (best_primal - best_dual <= opts.gap_tolerance * std::abs(best_primal)) {
                converged = true;
                break;
            }
        }
        if (best_dual > ref_dual + opts.stall_tolerance * std::abs(best_dual) ||
            best_primal < ref_primal - opts.stall_tolerance * std::abs(best_primal)) {
            ref_dual = best_dual;
            ref_primal = best_primal;
            last_progress = n;
        } else if (certify && opts.stall_window > 0 && n - last_progress >= opts.stall_window) {
            converged = true;
            break;
        }

        const NodePower np =
            node_power(cfg, assignment, candidates.rue, candidates.hue_rrh, candidates.hue_hpn);
        const DualState next = update_duals(ds, np, cfg);
        double delta = 0.0;
        for (std::size_t i = 0; i < next.theta.size(); ++i)
            delta = std::max(delta, std::abs(next.theta[i] - ds.theta[i]));
        // Keep the multipliers that produced `assignment`; only the gradient advances.
        if (delta / ds.scale < opts.dual_tolerance) {
            ds.grad = next.grad;
            ds.iteration = next.iteration;
            converged = true;
            break;
        }
        if (n < opts.max_dual_iterations) ds = next;
    }
    if (!last_evaluated) evaluate_current();

    // assign_rbs judges one RB at a time, so it can settle on an association
    // that a better one would beat. While the gap is still open, hill-climb:
    // first over HUE tier flips and swaps (every RB then goes to its best eligible owner
    // at the final multipliers), then over single-RB ownership changes.
    int moves = opts.local_search_moves;
    const auto gap_open = [&] {
        return best_primal - best_dual > opts.gap_tolerance * std::abs(best_primal);
    };
    if (certify && moves > 0 && gap_open()) {
        const std::size_t none_rrh = cfg.num_rue + cfg.num_hue;
        Owners cur = to_owners(cfg, best_assignment);
        // Scores at zero multipliers rank owners by their stand-alone value,
        // which the final multipliers can hide behind zero candidate powers.
        std::vector<double> zero(cfg.num_rrh + 1, 0.0);
        CandidatePowers free = waterfill_rrh(cfg, ch, w, zero, opts.waterfill);
        free.hue_hpn = waterfill_hpn(cfg, ch, w, 0.0);
        const RbScores free_scores = score_rbs(cfg, ch, w, zero, free);
        const auto attempt = [&](const Owners& next) {
            --moves;
            if (!evaluate(from_owners(cfg, next), best_alloc)) return false;
            cur = next;
            return true;
        };
        for (bool improved = true; improved && moves > 0 && gap_open();) {
            improved = false;
            for (std::size_t m = 0; m < cfg.num_hue && moves > 0; ++m)
                for (std::size_t m2 = m; m2 < cfg.num_hue && moves > 0; ++m2) {
                    std::vector<std::uint8_t> assoc = best_assignment.assoc;
                    if (m2 != m && assoc[m] == assoc[m2]) continue;  // swaps only
                    assoc[m] ^= 1;
                    if (m2 != m) assoc[m2] ^= 1;
                    improved = attempt(assign_with_assoc(scores, assoc)) || improved;
                    if (moves > 0) improved = attempt(assign_with_assoc(free_scores, assoc)) || improved;
                }
            for (std::size_t k = 0; k < cfg.num_rb_rrh && moves > 0; ++k)
                for (std::size_t e = 0; e <= none_rrh && moves > 0; ++e) {
                    if (e == cur.rrh[k]) continue;
                    Owners next = cur;
                    next.rrh[k] = e;
                    if (e >= cfg.num_rue && e < none_rrh)
                        for (auto& o : next.hpn)
                            if (o == e - cfg.num_rue) o = cfg.num_hue;
                    improved = attempt(next) || improved;
                }
            for (std::size_t l = 0; l < cfg.num_rb_hpn && moves > 0; ++l)
                for (std::size_t m = 0; m <= cfg.num_hue && moves > 0; ++m) {
                    if (m == cur.hpn[l]) continue;
                    Owners next = cur;
                    next.hpn[l] = m;
                    if (m < cfg.num_hue)
                        for (auto& o : next.rrh)
                            if (o == cfg.num_rue + m) o = none_rrh;
                    improved = attempt(next) || improved;
                }
        }
    }

    d.dual_iterations = iterations;
    d.converged = converged;
    d.waterfill_converged = waterfill_ok;
    d.theta = ds.theta;
    d.dual_value = best_dual;
    d.objective = best_primal;
    check_feasibility(cfg, d, 1e-9 * std::max(cfg.p_max_rrh, cfg.p_max_hpn));
    return res;
}

ControlDecision solve_slot(const NetworkConfig& cfg, const QueueState& qs, const ChannelState& ch,
                           const Arrivals& arrivals, const SolverOptions& opts,
                           const std::vector<double>* warm_theta) {
    const AuxiliaryChoice aux = select_auxiliary(cfg, qs);
    const Admission adm = admit_traffic(qs, arrivals);
    const DriftWeights w = drift_weights(cfg, qs);
    ControlDecision d = solve_resource_allocation(cfg, ch, w, opts, warm_theta).decision;
    d.admit_hue = adm.hue;
    d.admit_rue = adm.rue;
    d.aux_hue = aux.hue;
    d.aux_rue = aux.rue;
    for (std::size_t m = 0; m < cfg.num_hue; ++m)
        if (d.admit_hue[m] > arrivals.hue[m] || d.aux_hue[m] > cfg.a_max_hue)
            throw FeasibilityError("HUE admission or auxiliary bound violated");
    for (std::size_t j = 0; j < cfg.num_rue; ++j)
        if (d.admit_rue[j] > arrivals.rue[j] || d.aux_rue[j] > cfg.a_max_rue)
            throw FeasibilityError("RUE admission or auxiliary bound violated");
    return d;
}

}  // namespace hcran
