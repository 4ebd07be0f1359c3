#pragma once

// Slotted simulation loop, long-run metrics and online bound checks.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hcran/controller.hpp"
#include "hcran/model.hpp"
#include "hcran/oracle.hpp"
#include "hcran/queues.hpp"
#include "hcran/stochastic.hpp"

namespace hcran {

enum class Scheme { Jccro, Msr };

std::string to_string(Scheme s);

struct RunOptions {
    std::uint64_t slots = 5000;
    std::uint64_t warmup = 0;  // slots excluded from the averages
    std::uint64_t seed = 1;
    Scheme scheme = Scheme::Jccro;
    SolverOptions solver;
    bool warm_start = true;      // seed each slot's multipliers with the previous slot's
    bool record_trace = true;
    bool strict_bounds = false;  // throw BoundViolation on the first queue-bound breach
    double max_nonconverged = 0.05;
};

struct Scenario {
    NetworkConfig network;
    ArrivalSpec arrivals;
    ChannelSpec channel;
    RunOptions run;
};

class BoundViolation : public std::runtime_error {
public:
    explicit BoundViolation(const std::string& what) : std::runtime_error(what) {}
};

struct SlotRecord {
    std::uint64_t t = 0;
    std::vector<double> q_hue;
    std::vector<double> q_rue;
    double z = 0.0;
    double mu_sum = 0.0;  // bits/s
    double p_sum = 0.0;   // W
    double offered = 0.0;   // bits
    double admitted = 0.0;  // bits
    double served = 0.0;    // bits actually removed from the queues
    int dual_iterations = 0;
    bool converged = true;
    double objective = 0.0;
};

struct RunMetrics {
    Scheme scheme = Scheme::Jccro;
    std::uint64_t slots = 0;  // averaged slots
    std::vector<double> throughput_hue;  // mean admitted bits/slot
    std::vector<double> throughput_rue;
    double utility = 0.0;
    double avg_queue = 0.0;      // mean sum of Q, bits
    double avg_delay = 0.0;      // slots, Little's law on admitted traffic
    double avg_rate = 0.0;       // mean mu_sum, bits/s
    double avg_power = 0.0;      // mean p_sum, W
    double achieved_ee = 0.0;    // avg_rate / (W avg_power)
    double avg_slot_ee = 0.0;    // mean of per-slot EE
    double offered_rate = 0.0;   // bits/slot
    double admitted_rate = 0.0;  // bits/slot
    double served_rate = 0.0;    // bits/slot
    double avg_dual_iterations = 0.0;
    double nonconverged_fraction = 0.0;
    double bound_slack_q = 0.0;  // min over slots and UEs of (bound - Q); JCCRO only
    std::uint64_t bound_violations = 0;
    double drift_const_c = 0.0;  // largest per-slot value of the drift constant
    double queue_window_early = 0.0;  // mean sum Q over [T/2, 3T/4)
    double queue_window_late = 0.0;   // mean sum Q over [3T/4, T)
    bool flagged = false;
    std::string flag_reason;
};

struct RunResult {
    RunMetrics metrics;
    std::vector<SlotRecord> trace;
};

/// Per-slot MSR allocations do not depend on traffic, so one pass over the
/// channel sequence serves every arrival rate.
struct MsrSchedule {
    std::vector<std::vector<double>> service_hue;  // bits per slot
    std::vector<std::vector<double>> service_rue;
    std::vector<double> mu_sum;
    std::vector<double> p_sum;
    std::vector<int> dual_iterations;
    std::vector<std::uint8_t> converged;
    std::uint64_t infeasible_slots = 0;
};

MsrSchedule msr_schedule(const Scenario& sc);

/// Simulates one run. For Scheme::Msr a precomputed schedule may be passed in.
RunResult run(const Scenario& sc, const MsrSchedule* msr = nullptr);

enum class SweepAxis { V, Lambda, EeRequired };

std::string to_string(SweepAxis a);
SweepAxis parse_axis(const std::string& s);

/// Applies one sweep value to a scenario. Lambda changes the means only; caps stay.
Scenario with_axis(const Scenario& base, SweepAxis axis, double value);

/// One run per value with the base seed; results in value order. Runs are
/// spread over `threads` workers (0 = hardware concurrency).
std::vector<RunResult> sweep(const Scenario& base, SweepAxis axis, const std::vector<double>& values,
                             unsigned threads = 0);

}  // namespace hcran
