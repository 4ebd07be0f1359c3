#pragma once

// Random traffic arrivals and channel realisations. Every generator owns its
// engine; (seed, spec) fully determines the produced sequence.

#include <cstdint>
#include <random>
#include <vector>

#include "hcran/model.hpp"

namespace hcran {

enum class ArrivalKind { Poisson, Bernoulli, TimeVaryingErgodic };

struct ArrivalSpec {
    ArrivalKind kind = ArrivalKind::Poisson;
    double mean_rue = 6000.0;  // bits/slot
    double mean_hue = 3000.0;  // bits/slot
    double cap_rue = 30000.0;  // A_j^max, bits
    double cap_hue = 15000.0;  // A_m^max, bits
    double packet_bits = 1.0;  // Poisson/Bernoulli arrivals come in whole packets
    // TimeVaryingErgodic: mean(t) = mean * (1 + depth * sin(2*pi*t/period)).
    double modulation_depth = 0.5;
    double modulation_period = 200.0;  // slots

    void validate() const;
    /// Arrival spec for the paper's lambda convention: RUE mean = lambda, HUE mean = lambda/2.
    static ArrivalSpec from_lambda(double lambda, double cap_factor = 5.0);
};

struct Arrivals {
    std::vector<double> hue;  // A_m, bits
    std::vector<double> rue;  // A_j, bits
};

class ArrivalGenerator {
public:
    ArrivalGenerator(ArrivalSpec spec, std::size_t num_hue, std::size_t num_rue, std::uint64_t seed);

    Arrivals draw();

    [[nodiscard]] const ArrivalSpec& spec() const noexcept { return spec_; }

private:
    double sample(double mean, double cap);

    ArrivalSpec spec_;
    std::size_t num_hue_;
    std::size_t num_rue_;
    std::uint64_t slot_ = 0;
    std::mt19937_64 engine_;
};

struct ChannelSpec {
    double cell_radius = 500.0;   // m, HPN at the centre
    double min_distance = 10.0;   // m
    double noise_power_dbm = -102.0;
    double pl_rrh_intercept = 31.5;
    double pl_rrh_slope = 40.0;  // dB per decade
    double pl_hpn_intercept = 31.5;
    double pl_hpn_slope = 35.0;

    void validate() const;
    [[nodiscard]] double pathloss_rrh_db(double distance) const;
    [[nodiscard]] double pathloss_hpn_db(double distance) const;
    [[nodiscard]] double noise_power_watts() const;
};

struct Position {
    double x = 0.0;
    double y = 0.0;
};

/// Node and UE placement, fixed for a run.
struct Topology {
    Position hpn;
    std::vector<Position> rrh;
    std::vector<Position> hue;
    std::vector<Position> rue;

    static Topology uniform(const NetworkConfig& cfg, const ChannelSpec& spec, std::uint64_t seed);
};

double distance(const Position& a, const Position& b);

/// Draws i.i.d. Rayleigh-faded gains on a fixed topology.
class ChannelGenerator {
public:
    ChannelGenerator(const NetworkConfig& cfg, ChannelSpec spec, Topology topo, std::uint64_t seed);

    ChannelState draw();

    /// Mean gains (pathloss over noise), without fading.
    [[nodiscard]] const ChannelState& mean_gains() const noexcept { return mean_; }
    [[nodiscard]] const Topology& topology() const noexcept { return topo_; }

    /// One |h|^2 sample of a unit-variance Rayleigh coefficient.
    double fading_power();

private:
    ChannelSpec spec_;
    Topology topo_;
    ChannelState mean_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Independent engine seeds for the different random streams of a run.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace hcran
