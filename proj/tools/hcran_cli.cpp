// hcran: run JCCRO / MSR simulations from a config file and write CSV results.
//
//   hcran run --config configs/paper_vi.cfg --sweep V 10,100,1000 --out results
//
// Exit codes: 0 ok, 1 unexpected failure, 2 invalid arguments or config,
// 3 output not writable, 4 queue bound breached under --strict-bounds,
// 5 flagged runs under --fail-on-flag.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "hcran/config.hpp"
#include "hcran/csv.hpp"
#include "hcran/harness.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfig = 2, kOutput = 3, kBound = 4, kFlagged = 5 };

int fail(Exit code, const std::string& kind, const std::string& message) {
    json err = {{"error", kind}, {"message", message}, {"exit_code", static_cast<int>(code)}};
    std::cerr << err.dump() << '\n';
    return code;
}

struct Args {
    std::string config;
    std::vector<std::string> sweep;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> slots;
    std::vector<std::string> baselines;
    bool strict_bounds = false;
    bool fail_on_flag = false;
    bool no_trace = false;
    std::string out;
    unsigned threads = 0;
};

std::optional<std::string> env(const char* name) {
    const char* v = std::getenv(name);
    if (!v || !*v) return std::nullopt;
    return std::string(v);
}

/// HCRAN_* variables fill in whatever the command line left unset.
void apply_env(Args& a) {
    if (a.config.empty()) a.config = env("HCRAN_CONFIG").value_or("");
    if (a.out.empty()) a.out = env("HCRAN_OUT").value_or("");
    if (!a.seed)
        if (auto v = env("HCRAN_SEED")) a.seed = std::stoull(*v);
    if (!a.slots)
        if (auto v = env("HCRAN_SLOTS")) a.slots = std::stoull(*v);
    if (a.baselines.empty())
        if (auto v = env("HCRAN_BASELINE")) a.baselines = {*v};
    if (a.sweep.empty())
        if (auto v = env("HCRAN_SWEEP")) {
            const auto sep = v->find_first_of(" :");
            if (sep == std::string::npos)
                throw hcran::ConfigError("HCRAN_SWEEP must look like 'V 10,100,1000'");
            a.sweep = {v->substr(0, sep), v->substr(sep + 1)};
        }
    if (!a.strict_bounds)
        if (auto v = env("HCRAN_STRICT_BOUNDS")) a.strict_bounds = *v == "1" || *v == "true";
}

hcran::ExperimentConfig build(const Args& a) {
    if (a.config.empty()) throw hcran::ConfigError("no config file given (--config or HCRAN_CONFIG)");
    hcran::ExperimentConfig ec = hcran::load_config(a.config);
    if (a.seed) ec.scenario.run.seed = *a.seed;
    if (a.slots) ec.scenario.run.slots = *a.slots;
    if (a.strict_bounds) ec.scenario.run.strict_bounds = true;
    if (!a.out.empty()) ec.output_dir = a.out;
    for (const auto& b : a.baselines) {
        if (b == "msr") ec.run_msr = true;
        else throw hcran::ConfigError("unknown baseline '" + b + "'");
    }
    if (!a.sweep.empty()) {
        ec.axis = hcran::parse_axis(a.sweep.at(0));
        ec.values = hcran::parse_values(a.sweep.at(1));
    }
    if (a.no_trace) ec.scenario.run.record_trace = false;
    ec.validate();
    return ec;
}

struct Output {
    std::string run_id;
    double value = 0.0;
    hcran::RunResult result;
};

int execute(const Args& args) {
    hcran::ExperimentConfig ec;
    try {
        ec = build(args);
    } catch (const hcran::ConfigError& e) {
        return fail(kConfig, "config", e.what());
    } catch (const std::invalid_argument& e) {
        return fail(kConfig, "config", e.what());
    }

    std::error_code ec_dir;
    fs::create_directories(ec.output_dir, ec_dir);
    if (ec_dir || !fs::is_directory(ec.output_dir))
        return fail(kOutput, "output", "cannot create output directory " + ec.output_dir.string());

    std::vector<hcran::Scheme> schemes;
    if (ec.run_jccro) schemes.push_back(hcran::Scheme::Jccro);
    if (ec.run_msr) schemes.push_back(hcran::Scheme::Msr);

    std::vector<Output> outputs;
    try {
        for (const auto scheme : schemes) {
            hcran::Scenario sc = ec.scenario;
            sc.run.scheme = scheme;
            const std::string name = hcran::to_string(scheme);
            if (ec.axis) {
                auto results = hcran::sweep(sc, *ec.axis, ec.values, args.threads);
                for (std::size_t i = 0; i < results.size(); ++i)
                    outputs.push_back({name + "_" + hcran::to_string(*ec.axis) + "_" + std::to_string(i),
                                       ec.values[i], std::move(results[i])});
            } else {
                outputs.push_back({name, 0.0, hcran::run(sc)});
            }
        }
    } catch (const hcran::BoundViolation& e) {
        return fail(kBound, "queue_bound", e.what());
    } catch (const hcran::ConfigError& e) {
        return fail(kConfig, "config", e.what());
    }

    const std::size_t nh = ec.scenario.network.num_hue;
    const std::size_t nr = ec.scenario.network.num_rue;
    json written = json::array();
    try {
        std::vector<hcran::SummaryRow> rows;
        for (const auto& o : outputs)
            rows.push_back({o.run_id, ec.axis ? hcran::to_string(*ec.axis) : "", o.value,
                            ec.scenario.run.seed, &o.result.metrics});
        const fs::path summary = ec.output_dir / "run_summary.csv";
        hcran::write_summary(summary, rows, nh, nr);
        written.push_back(summary.string());
        if (ec.scenario.run.record_trace)
            for (const auto& o : outputs) {
                const fs::path p = ec.output_dir / ("trace_" + o.run_id + ".csv");
                hcran::write_trace(p, o.result.trace, nh, nr);
                written.push_back(p.string());
            }
        if (ec.axis) {
            std::vector<hcran::FigureSeries> series;
            const std::size_t per = ec.values.size();
            for (std::size_t s = 0; s < schemes.size(); ++s) {
                hcran::FigureSeries fsr{hcran::to_string(schemes[s]), {}};
                for (std::size_t i = 0; i < per; ++i) fsr.points.push_back(&outputs[s * per + i].result.metrics);
                series.push_back(std::move(fsr));
            }
            for (const auto& p : hcran::write_figdata(ec.output_dir, *ec.axis, ec.values, series))
                written.push_back(p.string());
        }
    } catch (const std::runtime_error& e) {
        return fail(kOutput, "output", e.what());
    }

    json flagged = json::array();
    for (const auto& o : outputs)
        if (o.result.metrics.flagged)
            flagged.push_back({{"run_id", o.run_id}, {"reason", o.result.metrics.flag_reason}});
    std::cout << json{{"runs", outputs.size()}, {"files", written}, {"flagged", flagged}}.dump() << '\n';
    if (!flagged.empty() && args.fail_on_flag)
        return fail(kFlagged, "flagged_runs", std::to_string(flagged.size()) + " run(s) flagged");
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"JCCRO H-CRAN simulator"};
    app.require_subcommand(1);
    Args args;

    CLI::App* run = app.add_subcommand("run", "simulate one configuration or a sweep");
    run->add_option("--config", args.config, "experiment config file (HCRAN_CONFIG)");
    run->add_option("--sweep", args.sweep, "sweep axis and comma-separated values, e.g. V 10,100 (HCRAN_SWEEP)")
        ->expected(2);
    run->add_option("--seed", args.seed, "base seed (HCRAN_SEED)");
    run->add_option("--slots", args.slots, "slots per run (HCRAN_SLOTS)");
    run->add_option("--baseline", args.baselines, "add a baseline scheme: msr (HCRAN_BASELINE)");
    run->add_flag("--strict-bounds", args.strict_bounds, "abort on a queue-bound breach (HCRAN_STRICT_BOUNDS)");
    run->add_flag("--fail-on-flag", args.fail_on_flag, "exit non-zero when any run is flagged");
    run->add_flag("--no-trace", args.no_trace, "skip the per-slot trace files");
    run->add_option("--out", args.out, "output directory (HCRAN_OUT)");
    run->add_option("--threads", args.threads, "parallel runs in a sweep (0 = all cores)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(kConfig, "arguments", e.what());
    }

    try {
        apply_env(args);
        return execute(args);
    } catch (const std::invalid_argument& e) {
        return fail(kConfig, "config", e.what());
    } catch (const std::exception& e) {
        return fail(kFailure, "internal", e.what());
    }
}
