#include "hcran/harness.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>
#include <thread>

namespace hcran {

namespace {

constexpr std::uint64_t kTopologyStream = 0;
constexpr std::uint64_t kChannelStream = 1;
constexpr std::uint64_t kArrivalStream = 2;

void validate(const Scenario& sc) {
    sc.network.validate();
    sc.arrivals.validate();
    sc.channel.validate();
    if (sc.run.slots < 1) throw ConfigError("slots must be >= 1");
    if (sc.run.warmup >= sc.run.slots) throw ConfigError("warmup must be shorter than the run");
    if (sc.arrivals.cap_rue > sc.network.a_max_rue || sc.arrivals.cap_hue > sc.network.a_max_hue)
        throw ConfigError("arrival caps exceed the configured peak arrivals");
}

ChannelGenerator make_channel(const Scenario& sc) {
    const std::uint64_t seed = sc.run.seed;
    Topology topo = Topology::uniform(sc.network, sc.channel, stream_seed(seed, kTopologyStream));
    return ChannelGenerator(sc.network, sc.channel, std::move(topo), stream_seed(seed, kChannelStream));
}

struct Accumulator {
    std::uint64_t n = 0;
    std::vector<double> admit_hue, admit_rue;
    double queue = 0, rate = 0, power = 0, slot_ee = 0, offered = 0, admitted = 0, served = 0;
    double iterations = 0;
    std::uint64_t nonconverged = 0;

    void add(const SlotRecord& r, const std::vector<double>& ah, const std::vector<double>& ar,
             double sum_q, double ee) {
        if (admit_hue.empty()) {
            admit_hue.assign(ah.size(), 0.0);
            admit_rue.assign(ar.size(), 0.0);
        }
        for (std::size_t m = 0; m < ah.size(); ++m) admit_hue[m] += ah[m];
        for (std::size_t j = 0; j < ar.size(); ++j) admit_rue[j] += ar[j];
        ++n;
        queue += sum_q;
        rate += r.mu_sum;
        power += r.p_sum;
        slot_ee += ee;
        offered += r.offered;
        admitted += r.admitted;
        served += r.served;
        iterations += r.dual_iterations;
        if (!r.converged) ++nonconverged;
    }
};

double sum(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

double sum_sq(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

/// Per-slot drift constant: the bracketed terms of the Lyapunov drift bound
/// that do not multiply a queue.
double drift_constant(const NetworkConfig& cfg, const ControlDecision& d,
                      const std::vector<double>& mu_hue, const std::vector<double>& mu_rue,
                      double mu_sum, double p_sum) {
    const double tau = cfg.slot_duration;
    double c = 0.0;
    c += sum_sq(d.admit_rue) + 0.5 * (tau * tau * sum_sq(mu_rue) + sum_sq(d.aux_rue));
    c += sum_sq(d.admit_hue) + 0.5 * (tau * tau * sum_sq(mu_hue) + sum_sq(d.aux_hue));
    const double ee_term = cfg.bandwidth_total * cfg.ee_required * p_sum;
    c += 0.5 * (ee_term * ee_term + mu_sum * mu_sum);
    return c;
}

}  // namespace

std::string to_string(Scheme s) { return s == Scheme::Jccro ? "jccro" : "msr"; }

std::string to_string(SweepAxis a) {
    switch (a) {
        case SweepAxis::V: return "V";
        case SweepAxis::Lambda: return "lambda";
        case SweepAxis::EeRequired: return "ee_req";
    }
    return "?";
}

SweepAxis parse_axis(const std::string& s) {
    if (s == "V" || s == "v") return SweepAxis::V;
    if (s == "lambda") return SweepAxis::Lambda;
    if (s == "ee_req" || s == "eta") return SweepAxis::EeRequired;
    throw ConfigError("unknown sweep axis '" + s + "' (expected V, lambda or ee_req)");
}

Scenario with_axis(const Scenario& base, SweepAxis axis, double value) {
    Scenario sc = base;
    switch (axis) {
        case SweepAxis::V: sc.network.control_v = value; break;
        case SweepAxis::Lambda:
            sc.arrivals.mean_rue = value;
            sc.arrivals.mean_hue = 0.5 * value;
            break;
        case SweepAxis::EeRequired: sc.network.ee_required = value; break;
    }
    return sc;
}

MsrSchedule msr_schedule(const Scenario& sc) {
    validate(sc);
    const NetworkConfig& cfg = sc.network;
    ChannelGenerator channels = make_channel(sc);
    MsrOptions opts;
    opts.solver = sc.run.solver;

    MsrSchedule s;
    for (std::uint64_t t = 0; t < sc.run.slots; ++t) {
        const ChannelState ch = channels.draw();
        const MsrResult r = msr_solve(cfg, ch, opts);
        std::vector<double> hue(cfg.num_hue), rue(cfg.num_rue);
        for (std::size_t m = 0; m < cfg.num_hue; ++m)
            hue[m] = rate_hue(cfg, ch, r.decision, m) * cfg.slot_duration;
        for (std::size_t j = 0; j < cfg.num_rue; ++j)
            rue[j] = rate_rue(cfg, ch, r.decision, j) * cfg.slot_duration;
        s.service_hue.push_back(std::move(hue));
        s.service_rue.push_back(std::move(rue));
        s.mu_sum.push_back(r.mu_sum);
        s.p_sum.push_back(r.p_sum);
        s.dual_iterations.push_back(r.decision.dual_iterations);
        s.converged.push_back(r.decision.converged ? 1 : 0);
        if (!r.feasible) ++s.infeasible_slots;
    }
    return s;
}

RunResult run(const Scenario& sc, const MsrSchedule* msr) {
    validate(sc);
    const NetworkConfig& cfg = sc.network;
    const RunOptions& opt = sc.run;
    const bool is_msr = opt.scheme == Scheme::Msr;

    MsrSchedule own;
    if (is_msr && !msr) {
        own = msr_schedule(sc);
        msr = &own;
    }
    if (is_msr && msr->mu_sum.size() < opt.slots) throw ConfigError("MSR schedule is too short");

    ChannelGenerator channels = make_channel(sc);
    ArrivalGenerator arrivals(sc.arrivals, cfg.num_hue, cfg.num_rue,
                              stream_seed(opt.seed, kArrivalStream));

    QueueState qs = QueueState::zeros(cfg);
    RunResult out;
    RunMetrics& mx = out.metrics;
    mx.scheme = opt.scheme;
    mx.bound_slack_q = std::numeric_limits<double>::infinity();
    if (opt.record_trace) out.trace.reserve(opt.slots);

    Accumulator acc;
    const std::uint64_t window_a = opt.slots / 2;
    const std::uint64_t window_b = opt.slots * 3 / 4;
    double win_early = 0.0, win_late = 0.0;
    std::uint64_t n_early = 0, n_late = 0;

    std::vector<double> theta;
    std::vector<double> mu_hue(cfg.num_hue), mu_rue(cfg.num_rue);
    std::vector<double> svc_hue(cfg.num_hue), svc_rue(cfg.num_rue);
    const double bound_hue = cfg.queue_bound_hue();
    const double bound_rue = cfg.queue_bound_rue();

    auto check_bounds = [&](const QueueState& q) {
        if (is_msr) return;
        for (std::size_t m = 0; m < cfg.num_hue; ++m) {
            const double slack = bound_hue - q.q_hue[m];
            mx.bound_slack_q = std::min(mx.bound_slack_q, slack);
            if (slack < 0.0) {
                ++mx.bound_violations;
                if (opt.strict_bounds) {
                    std::ostringstream os;
                    os << "slot " << q.slot << ": HUE " << m << " queue " << q.q_hue[m]
                       << " exceeds bound " << bound_hue;
                    throw BoundViolation(os.str());
                }
            }
        }
        for (std::size_t j = 0; j < cfg.num_rue; ++j) {
            const double slack = bound_rue - q.q_rue[j];
            mx.bound_slack_q = std::min(mx.bound_slack_q, slack);
            if (slack < 0.0) {
                ++mx.bound_violations;
                if (opt.strict_bounds) {
                    std::ostringstream os;
                    os << "slot " << q.slot << ": RUE " << j << " queue " << q.q_rue[j]
                       << " exceeds bound " << bound_rue;
                    throw BoundViolation(os.str());
                }
            }
        }
    };
    check_bounds(qs);

    for (std::uint64_t t = 0; t < opt.slots; ++t) {
        const ChannelState ch = channels.draw();
        const Arrivals arr = arrivals.draw();

        SlotRecord rec;
        rec.t = t;
        rec.q_hue = qs.q_hue;
        rec.q_rue = qs.q_rue;
        rec.z = qs.z;
        rec.offered = sum(arr.hue) + sum(arr.rue);

        ControlDecision d;
        if (is_msr) {
            // Full buffer: every arrival is queued, service is the fixed schedule.
            d = ControlDecision::zeros(cfg);
            d.admit_hue = arr.hue;
            d.admit_rue = arr.rue;
            svc_hue = msr->service_hue[t];
            svc_rue = msr->service_rue[t];
            for (std::size_t m = 0; m < cfg.num_hue; ++m) mu_hue[m] = svc_hue[m] / cfg.slot_duration;
            for (std::size_t j = 0; j < cfg.num_rue; ++j) mu_rue[j] = svc_rue[j] / cfg.slot_duration;
            rec.mu_sum = msr->mu_sum[t];
            rec.p_sum = msr->p_sum[t];
            rec.dual_iterations = msr->dual_iterations[t];
            rec.converged = msr->converged[t] != 0;
        } else {
            d = solve_slot(cfg, qs, ch, arr, opt.solver,
                           opt.warm_start && !theta.empty() ? &theta : nullptr);
            if (opt.warm_start) theta = d.theta;
            for (std::size_t m = 0; m < cfg.num_hue; ++m) {
                mu_hue[m] = rate_hue(cfg, ch, d, m);
                svc_hue[m] = mu_hue[m] * cfg.slot_duration;
            }
            for (std::size_t j = 0; j < cfg.num_rue; ++j) {
                mu_rue[j] = rate_rue(cfg, ch, d, j);
                svc_rue[j] = mu_rue[j] * cfg.slot_duration;
            }
            rec.mu_sum = sum(mu_hue) + sum(mu_rue);
            rec.p_sum = power_totals(cfg, d).sum;
            rec.dual_iterations = d.dual_iterations;
            rec.converged = d.converged;
            rec.objective = d.objective;
        }
        rec.admitted = sum(d.admit_hue) + sum(d.admit_rue);
        for (std::size_t m = 0; m < cfg.num_hue; ++m) rec.served += std::min(qs.q_hue[m], svc_hue[m]);
        for (std::size_t j = 0; j < cfg.num_rue; ++j) rec.served += std::min(qs.q_rue[j], svc_rue[j]);

        const double sum_q = sum(qs.q_hue) + sum(qs.q_rue);
        if (t >= opt.warmup)
            acc.add(rec, d.admit_hue, d.admit_rue, sum_q, instantaneous_ee(rec.mu_sum, rec.p_sum, cfg));
        if (t >= window_a && t < window_b) {
            win_early += sum_q;
            ++n_early;
        } else if (t >= window_b) {
            win_late += sum_q;
            ++n_late;
        }
        if (!is_msr)
            mx.drift_const_c = std::max(
                mx.drift_const_c, drift_constant(cfg, d, mu_hue, mu_rue, rec.mu_sum, rec.p_sum));

        // Queue updates close the slot.
        QueueState next = update_traffic_queues(qs, svc_hue, svc_rue, d.admit_hue, d.admit_rue);
        if (!is_msr) {
            next = update_virtual_h(next, d.admit_hue, d.admit_rue, d.aux_hue, d.aux_rue);
            next = update_virtual_z(next, rec.mu_sum, rec.p_sum, cfg);
        }
        next.slot = qs.slot + 1;
        qs = std::move(next);
        check_bounds(qs);

        if (opt.record_trace) out.trace.push_back(std::move(rec));
    }

    const double n = static_cast<double>(acc.n);
    mx.slots = acc.n;
    mx.throughput_hue.resize(cfg.num_hue);
    mx.throughput_rue.resize(cfg.num_rue);
    mx.utility = 0.0;
    for (std::size_t m = 0; m < cfg.num_hue; ++m) {
        mx.throughput_hue[m] = acc.admit_hue[m] / n;
        mx.utility += cfg.price_hue * cfg.utility(mx.throughput_hue[m]);
    }
    for (std::size_t j = 0; j < cfg.num_rue; ++j) {
        mx.throughput_rue[j] = acc.admit_rue[j] / n;
        mx.utility += cfg.price_rue * cfg.utility(mx.throughput_rue[j]);
    }
    mx.avg_queue = acc.queue / n;
    mx.admitted_rate = acc.admitted / n;
    mx.avg_delay = mx.admitted_rate > 0.0 ? mx.avg_queue / mx.admitted_rate : 0.0;
    mx.avg_rate = acc.rate / n;
    mx.avg_power = acc.power / n;
    mx.achieved_ee = instantaneous_ee(mx.avg_rate, mx.avg_power, cfg);
    mx.avg_slot_ee = acc.slot_ee / n;
    mx.offered_rate = acc.offered / n;
    mx.served_rate = acc.served / n;
    mx.avg_dual_iterations = acc.iterations / n;
    mx.nonconverged_fraction = static_cast<double>(acc.nonconverged) / n;
    mx.queue_window_early = n_early ? win_early / static_cast<double>(n_early) : 0.0;
    mx.queue_window_late = n_late ? win_late / static_cast<double>(n_late) : 0.0;
    if (is_msr) mx.bound_slack_q = 0.0;

    std::vector<std::string> reasons;
    if (mx.nonconverged_fraction > opt.max_nonconverged) reasons.push_back("dual_nonconvergence");
    if (mx.bound_violations > 0) reasons.push_back("queue_bound");
    if (is_msr && msr->infeasible_slots > 0) reasons.push_back("msr_ee_infeasible");
    mx.flagged = !reasons.empty();
    for (std::size_t i = 0; i < reasons.size(); ++i)
        mx.flag_reason += (i ? ";" : "") + reasons[i];
    return out;
}

std::vector<RunResult> sweep(const Scenario& base, SweepAxis axis, const std::vector<double>& values,
                             unsigned threads) {
    if (values.empty()) throw ConfigError("sweep needs at least one value");
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());

    // The MSR schedule ignores traffic and V; only the EE requirement changes it.
    std::optional<MsrSchedule> shared;
    if (base.run.scheme == Scheme::Msr && axis != SweepAxis::EeRequired) shared = msr_schedule(base);
    const MsrSchedule* msr = shared ? &*shared : nullptr;

    std::vector<RunResult> results(values.size());
    std::size_t next = 0;
    while (next < values.size()) {
        std::vector<std::future<RunResult>> batch;
        const std::size_t first = next;
        for (; next < values.size() && batch.size() < threads; ++next) {
            Scenario sc = with_axis(base, axis, values[next]);
            batch.push_back(std::async(threads > 1 ? std::launch::async : std::launch::deferred,
                                       [sc = std::move(sc), msr] { return run(sc, msr); }));
        }
        for (std::size_t i = 0; i < batch.size(); ++i) results[first + i] = batch[i].get();
    }
    return results;
}

}  // namespace hcran
