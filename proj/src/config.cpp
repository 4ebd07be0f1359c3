#include "hcran/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <functional>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace hcran {

namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& raw) {
    const std::string s = trim(raw);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ConfigError(key + ": '" + raw + "' is not a number");
    return v;
}

std::uint64_t to_count(const std::string& key, const std::string& raw) {
    const std::string s = trim(raw);
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ConfigError(key + ": '" + raw + "' is not a non-negative integer");
    return v;
}

bool to_bool(const std::string& key, const std::string& raw) {
    const std::string s = trim(raw);
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw ConfigError(key + ": '" + raw + "' is not a boolean");
}

/// Binds section keys to setters, then applies a parsed section.
class Section {
public:
    using Setter = std::function<void(const std::string& key, const std::string& value)>;

    Section& num(const std::string& key, double& target) {
        setters_[key] = [&target](const std::string& k, const std::string& v) { target = to_double(k, v); };
        return *this;
    }
    Section& count(const std::string& key, std::size_t& target) {
        setters_[key] = [&target](const std::string& k, const std::string& v) {
            target = static_cast<std::size_t>(to_count(k, v));
        };
        return *this;
    }
    Section& count64(const std::string& key, std::uint64_t& target) {
        setters_[key] = [&target](const std::string& k, const std::string& v) { target = to_count(k, v); };
        return *this;
    }
    Section& flag(const std::string& key, bool& target) {
        setters_[key] = [&target](const std::string& k, const std::string& v) { target = to_bool(k, v); };
        return *this;
    }
    Section& custom(const std::string& key, Setter s) {
        setters_[key] = std::move(s);
        return *this;
    }

    void apply(const std::string& name, const pt::ptree& tree) const {
        for (const auto& [key, node] : tree) {
            const auto it = setters_.find(key);
            if (it == setters_.end()) throw ConfigError("unknown key '" + name + "." + key + "'");
            it->second(name + "." + key, node.get_value<std::string>());
        }
    }

private:
    std::map<std::string, Setter> setters_;
};

}  // namespace

std::vector<double> parse_values(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (trim(item).empty()) continue;
        out.push_back(to_double("sweep value", item));
    }
    return out;
}

void ExperimentConfig::validate() const {
    scenario.network.validate();
    scenario.arrivals.validate();
    scenario.channel.validate();
    if (scenario.run.slots < 1) throw ConfigError("run.slots must be >= 1");
    if (scenario.run.warmup >= scenario.run.slots) throw ConfigError("run.warmup must be < run.slots");
    if (scenario.arrivals.cap_rue > scenario.network.a_max_rue ||
        scenario.arrivals.cap_hue > scenario.network.a_max_hue)
        throw ConfigError("arrival caps exceed network.a_max_rue / network.a_max_hue");
    if (!run_jccro && !run_msr) throw ConfigError("no scheme selected");
    if (axis) {
        if (values.empty()) throw ConfigError("sweep needs at least one value");
        for (std::size_t i = 1; i < values.size(); ++i)
            if (!(values[i] > values[i - 1])) throw ConfigError("sweep values must be strictly increasing");
    }
}

ExperimentConfig parse_config(const std::string& text) {
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("malformed config: ") + e.message() + " at line " +
                          std::to_string(e.line()));
    }

    ExperimentConfig ec;
    NetworkConfig& n = ec.scenario.network;
    ArrivalSpec& a = ec.scenario.arrivals;
    ChannelSpec& c = ec.scenario.channel;
    RunOptions& r = ec.scenario.run;
    bool caps_given = false;

    Section network;
    network.count("num_rrh", n.num_rrh)
        .count("num_hue", n.num_hue)
        .count("num_rue", n.num_rue)
        .count("num_rb_rrh", n.num_rb_rrh)
        .count("num_rb_hpn", n.num_rb_hpn)
        .num("bandwidth_total", n.bandwidth_total)
        .num("bandwidth_rb", n.bandwidth_rb)
        .num("slot_duration", n.slot_duration)
        .num("p_max_rrh", n.p_max_rrh)
        .num("p_max_hpn", n.p_max_hpn)
        .num("drain_eff_rrh", n.drain_eff_rrh)
        .num("drain_eff_hpn", n.drain_eff_hpn)
        .num("static_power_rrh", n.static_power_rrh)
        .num("static_power_hpn", n.static_power_hpn)
        .num("ee_required", n.ee_required)
        .num("control_v", n.control_v)
        .num("price_rue", n.price_rue)
        .num("price_hue", n.price_hue)
        .num("utility_scale", n.utility_scale)
        .num("a_max_hue", n.a_max_hue)
        .num("a_max_rue", n.a_max_rue)
        .custom("utility", [&n](const std::string& k, const std::string& v) {
            const std::string s = trim(v);
            if (s == "linear") n.utility_kind = UtilityKind::Linear;
            else if (s == "log" || s == "logarithmic") n.utility_kind = UtilityKind::Logarithmic;
            else throw ConfigError(k + ": expected linear or log");
        });

    Section arrivals;
    arrivals.num("mean_rue", a.mean_rue)
        .num("mean_hue", a.mean_hue)
        .num("packet_bits", a.packet_bits)
        .num("modulation_depth", a.modulation_depth)
        .num("modulation_period", a.modulation_period)
        .custom("cap_rue", [&](const std::string& k, const std::string& v) {
            a.cap_rue = to_double(k, v);
            caps_given = true;
        })
        .custom("cap_hue", [&](const std::string& k, const std::string& v) {
            a.cap_hue = to_double(k, v);
            caps_given = true;
        })
        .custom("lambda", [&a](const std::string& k, const std::string& v) {
            const double l = to_double(k, v);
            a.mean_rue = l;
            a.mean_hue = 0.5 * l;
        })
        .custom("kind", [&a](const std::string& k, const std::string& v) {
            const std::string s = trim(v);
            if (s == "poisson") a.kind = ArrivalKind::Poisson;
            else if (s == "bernoulli") a.kind = ArrivalKind::Bernoulli;
            else if (s == "time_varying") a.kind = ArrivalKind::TimeVaryingErgodic;
            else throw ConfigError(k + ": expected poisson, bernoulli or time_varying");
        });

    Section channel;
    channel.num("cell_radius", c.cell_radius)
        .num("min_distance", c.min_distance)
        .num("noise_power_dbm", c.noise_power_dbm)
        .num("pl_rrh_intercept", c.pl_rrh_intercept)
        .num("pl_rrh_slope", c.pl_rrh_slope)
        .num("pl_hpn_intercept", c.pl_hpn_intercept)
        .num("pl_hpn_slope", c.pl_hpn_slope);

    Section run;
    run.count64("slots", r.slots)
        .count64("warmup", r.warmup)
        .count64("seed", r.seed)
        .flag("warm_start", r.warm_start)
        .flag("strict_bounds", r.strict_bounds)
        .flag("polish", r.solver.polish)
        .num("dual_tolerance", r.solver.dual_tolerance)
        .num("gap_tolerance", r.solver.gap_tolerance)
        .num("stall_tolerance", r.solver.stall_tolerance)
        .num("step0", r.solver.step0)
        .num("max_nonconverged", r.max_nonconverged)
        .custom("max_dual_iterations", [&r](const std::string& k, const std::string& v) {
            r.solver.max_dual_iterations = static_cast<int>(to_count(k, v));
        })
        .custom("primal_every", [&r](const std::string& k, const std::string& v) {
            r.solver.primal_every = static_cast<int>(to_count(k, v));
        })
        .custom("local_search_moves", [&r](const std::string& k, const std::string& v) {
            r.solver.local_search_moves = static_cast<int>(to_count(k, v));
        })
        .custom("stall_window", [&r](const std::string& k, const std::string& v) {
            r.solver.stall_window = static_cast<int>(to_count(k, v));
        });

    Section experiment;
    experiment
        .custom("sweep_axis", [&ec](const std::string&, const std::string& v) { ec.axis = parse_axis(trim(v)); })
        .custom("sweep_values", [&ec](const std::string&, const std::string& v) { ec.values = parse_values(v); })
        .custom("output_dir", [&ec](const std::string&, const std::string& v) { ec.output_dir = trim(v); })
        .custom("schemes", [&ec](const std::string& k, const std::string& v) {
            ec.run_jccro = ec.run_msr = false;
            std::stringstream ss(v);
            std::string s;
            while (std::getline(ss, s, ',')) {
                s = trim(s);
                if (s == "jccro") ec.run_jccro = true;
                else if (s == "msr") ec.run_msr = true;
                else if (!s.empty()) throw ConfigError(k + ": unknown scheme '" + s + "'");
            }
        });

    const std::map<std::string, const Section*> sections = {{"network", &network},
                                                            {"arrivals", &arrivals},
                                                            {"channel", &channel},
                                                            {"run", &run},
                                                            {"experiment", &experiment}};
    for (const auto& [name, node] : tree) {
        const auto it = sections.find(name);
        if (it == sections.end()) {
            if (node.empty()) throw ConfigError("key '" + name + "' outside any section");
            throw ConfigError("unknown section [" + name + "]");
        }
        it->second->apply(name, node);
    }

    if (!caps_given) {
        a.cap_rue = n.a_max_rue;
        a.cap_hue = n.a_max_hue;
    }
    return ec;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace hcran
