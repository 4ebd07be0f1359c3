#include "hcran/stochastic.hpp"

#include <cmath>
#include <numbers>

namespace hcran {

void ArrivalSpec::validate() const {
    if (!(mean_rue >= 0.0 && mean_hue >= 0.0)) throw ConfigError("arrival means must be >= 0");
    if (!(cap_rue > 0.0 && cap_hue > 0.0)) throw ConfigError("arrival caps must be > 0");
    if (!(packet_bits > 0.0)) throw ConfigError("packet_bits must be > 0");
    if (kind == ArrivalKind::Bernoulli && (mean_rue > cap_rue || mean_hue > cap_hue))
        throw ConfigError("Bernoulli arrivals need mean <= cap");
    if (kind == ArrivalKind::TimeVaryingErgodic &&
        !(modulation_depth >= 0.0 && modulation_depth <= 1.0 && modulation_period > 0.0))
        throw ConfigError("modulation depth must lie in [0, 1] and the period must be > 0");
}

ArrivalSpec ArrivalSpec::from_lambda(double lambda, double cap_factor) {
    ArrivalSpec s;
    s.mean_rue = lambda;
    s.mean_hue = 0.5 * lambda;
    s.cap_rue = cap_factor * lambda;
    s.cap_hue = cap_factor * 0.5 * lambda;
    return s;
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), 0x9e3779b9u};
    std::uint32_t out[2];
    seq.generate(std::begin(out), std::end(out));
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

ArrivalGenerator::ArrivalGenerator(ArrivalSpec spec, std::size_t num_hue, std::size_t num_rue,
                                   std::uint64_t seed)
    : spec_(spec), num_hue_(num_hue), num_rue_(num_rue), engine_(seed) {
    spec_.validate();
}

double ArrivalGenerator::sample(double mean, double cap) {
    if (mean <= 0.0) return 0.0;
    switch (spec_.kind) {
        case ArrivalKind::Bernoulli: {
            std::bernoulli_distribution burst(mean / cap);
            return burst(engine_) ? cap : 0.0;
        }
        case ArrivalKind::TimeVaryingErgodic: {
            const double phase = 2.0 * std::numbers::pi * static_cast<double>(slot_) /
                                 spec_.modulation_period;
            mean *= 1.0 + spec_.modulation_depth * std::sin(phase);
            if (mean <= 0.0) return 0.0;
            [[fallthrough]];
        }
        case ArrivalKind::Poisson: {
            std::poisson_distribution<long long> packets(mean / spec_.packet_bits);
            const double bits = static_cast<double>(packets(engine_)) * spec_.packet_bits;
            return std::min(bits, cap);
        }
    }
    return 0.0;
}

Arrivals ArrivalGenerator::draw() {
    Arrivals a;
    a.hue.resize(num_hue_);
    a.rue.resize(num_rue_);
    for (auto& v : a.hue) v = sample(spec_.mean_hue, spec_.cap_hue);
    for (auto& v : a.rue) v = sample(spec_.mean_rue, spec_.cap_rue);
    ++slot_;
    return a;
}

void ChannelSpec::validate() const {
    if (!(cell_radius > 0.0)) throw ConfigError("cell_radius must be > 0");
    if (!(min_distance > 0.0 && min_distance < cell_radius))
        throw ConfigError("min_distance must lie in (0, cell_radius)");
    if (!std::isfinite(noise_power_dbm)) throw ConfigError("noise power must be finite");
}

double ChannelSpec::pathloss_rrh_db(double d) const {
    return pl_rrh_intercept + pl_rrh_slope * std::log10(std::max(d, min_distance));
}

double ChannelSpec::pathloss_hpn_db(double d) const {
    return pl_hpn_intercept + pl_hpn_slope * std::log10(std::max(d, min_distance));
}

double ChannelSpec::noise_power_watts() const {
    return std::pow(10.0, (noise_power_dbm - 30.0) / 10.0);
}

double distance(const Position& a, const Position& b) { return std::hypot(a.x - b.x, a.y - b.y); }

Topology Topology::uniform(const NetworkConfig& cfg, const ChannelSpec& spec, std::uint64_t seed) {
    std::mt19937_64 engine(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    // Uniform over the disc: radius ~ R*sqrt(U).
    auto place = [&]() {
        const double r = spec.cell_radius * std::sqrt(unit(engine));
        const double a = 2.0 * std::numbers::pi * unit(engine);
        return Position{r * std::cos(a), r * std::sin(a)};
    };
    Topology t;
    t.rrh.resize(cfg.num_rrh);
    t.hue.resize(cfg.num_hue);
    t.rue.resize(cfg.num_rue);
    for (auto& p : t.rrh) p = place();
    for (auto& p : t.hue) p = place();
    for (auto& p : t.rue) p = place();
    return t;
}

ChannelGenerator::ChannelGenerator(const NetworkConfig& cfg, ChannelSpec spec, Topology topo,
                                   std::uint64_t seed)
    : spec_(spec), topo_(std::move(topo)), mean_(ChannelState::zeros(cfg)), engine_(seed) {
    spec_.validate();
    if (topo_.rrh.size() != cfg.num_rrh || topo_.hue.size() != cfg.num_hue ||
        topo_.rue.size() != cfg.num_rue)
        throw ShapeError("topology does not match the network config");
    const double noise = spec_.noise_power_watts();
    auto linear = [&](double pl_db) { return std::pow(10.0, -pl_db / 10.0) / noise; };
    for (std::size_t i = 0; i < cfg.num_rrh; ++i) {
        for (std::size_t j = 0; j < cfg.num_rue; ++j) {
            const double g = linear(spec_.pathloss_rrh_db(distance(topo_.rrh[i], topo_.rue[j])));
            for (std::size_t k = 0; k < cfg.num_rb_rrh; ++k) mean_.g_rrh_rue(i, j, k) = g;
        }
        for (std::size_t m = 0; m < cfg.num_hue; ++m) {
            const double g = linear(spec_.pathloss_rrh_db(distance(topo_.rrh[i], topo_.hue[m])));
            for (std::size_t k = 0; k < cfg.num_rb_rrh; ++k) mean_.g_rrh_hue(i, m, k) = g;
        }
    }
    for (std::size_t m = 0; m < cfg.num_hue; ++m) {
        const double g = linear(spec_.pathloss_hpn_db(distance(topo_.hpn, topo_.hue[m])));
        for (std::size_t l = 0; l < cfg.num_rb_hpn; ++l) mean_.g_hpn_hue(m, l) = g;
    }
}

double ChannelGenerator::fading_power() {
    // h = (x + iy)/sqrt(2) with x, y ~ N(0, 1), so E|h|^2 = 1.
    const double x = normal_(engine_);
    const double y = normal_(engine_);
    return 0.5 * (x * x + y * y);
}

ChannelState ChannelGenerator::draw() {
    ChannelState ch = mean_;
    for (auto& g : ch.g_rrh_rue.data()) g *= fading_power();
    for (auto& g : ch.g_rrh_hue.data()) g *= fading_power();
    for (auto& g : ch.g_hpn_hue.data()) g *= fading_power();
    return ch;
}

}  // namespace hcran
