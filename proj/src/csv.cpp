#include "hcran/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <stdexcept>

namespace hcran {

namespace {

std::string join(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) line += ',';
        line += cells[i];
    }
    line += '\n';
    return line;
}

class CsvFile {
public:
    explicit CsvFile(const std::filesystem::path& path) : path_(path), out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    void row(const std::vector<std::string>& cells) { out_ << join(cells); }
    void close() {
        out_.close();
        if (!out_) throw std::runtime_error("failed writing " + path_.string());
    }

private:
    std::filesystem::path path_;
    std::ofstream out_;
};

std::string fmt(double v) { return format_number(v); }
std::string fmt(std::uint64_t v) { return std::to_string(v); }

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";  // folds -0
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 9);
    return std::string(buf, res.ptr);
}

std::vector<std::string> summary_header(std::size_t num_hue, std::size_t num_rue) {
    std::vector<std::string> h = {
        "run_id",          "scheme",       "axis",           "value",
        "seed",            "slots",        "utility",        "avg_queue",
        "avg_delay",       "avg_rate",     "avg_power",      "achieved_ee",
        "avg_slot_ee",     "offered_rate", "admitted_rate",  "served_rate",
        "avg_dual_iterations", "nonconverged_fraction", "bound_slack_q", "bound_violations",
        "drift_const_c",   "queue_window_early", "queue_window_late", "flagged",
        "flag_reason"};
    for (std::size_t m = 0; m < num_hue; ++m) h.push_back("throughput_hue_" + std::to_string(m));
    for (std::size_t j = 0; j < num_rue; ++j) h.push_back("throughput_rue_" + std::to_string(j));
    return h;
}

std::vector<std::string> trace_header(std::size_t num_hue, std::size_t num_rue) {
    std::vector<std::string> h = {"t"};
    for (std::size_t m = 0; m < num_hue; ++m) h.push_back("q_hue_" + std::to_string(m));
    for (std::size_t j = 0; j < num_rue; ++j) h.push_back("q_rue_" + std::to_string(j));
    for (const char* c : {"z", "mu_sum", "p_sum", "offered", "admitted", "served", "dual_iterations",
                          "converged", "objective"})
        h.emplace_back(c);
    return h;
}

void write_summary(const std::filesystem::path& path, const std::vector<SummaryRow>& rows,
                   std::size_t num_hue, std::size_t num_rue) {
    CsvFile f(path);
    f.row(summary_header(num_hue, num_rue));
    for (const auto& r : rows) {
        const RunMetrics& m = *r.metrics;
        std::vector<std::string> c = {
            r.run_id,
            to_string(m.scheme),
            r.axis,
            r.axis.empty() ? "" : fmt(r.value),
            fmt(r.seed),
            fmt(m.slots),
            fmt(m.utility),
            fmt(m.avg_queue),
            fmt(m.avg_delay),
            fmt(m.avg_rate),
            fmt(m.avg_power),
            fmt(m.achieved_ee),
            fmt(m.avg_slot_ee),
            fmt(m.offered_rate),
            fmt(m.admitted_rate),
            fmt(m.served_rate),
            fmt(m.avg_dual_iterations),
            fmt(m.nonconverged_fraction),
            fmt(m.bound_slack_q),
            fmt(m.bound_violations),
            fmt(m.drift_const_c),
            fmt(m.queue_window_early),
            fmt(m.queue_window_late),
            m.flagged ? "1" : "0",
            m.flag_reason};
        for (double v : m.throughput_hue) c.push_back(fmt(v));
        for (double v : m.throughput_rue) c.push_back(fmt(v));
        f.row(c);
    }
    f.close();
}

void write_trace(const std::filesystem::path& path, const std::vector<SlotRecord>& trace,
                 std::size_t num_hue, std::size_t num_rue) {
    CsvFile f(path);
    f.row(trace_header(num_hue, num_rue));
    std::vector<std::string> c;
    for (const auto& r : trace) {
        c.clear();
        c.push_back(fmt(r.t));
        for (double v : r.q_hue) c.push_back(fmt(v));
        for (double v : r.q_rue) c.push_back(fmt(v));
        c.push_back(fmt(r.z));
        c.push_back(fmt(r.mu_sum));
        c.push_back(fmt(r.p_sum));
        c.push_back(fmt(r.offered));
        c.push_back(fmt(r.admitted));
        c.push_back(fmt(r.served));
        c.push_back(std::to_string(r.dual_iterations));
        c.push_back(r.converged ? "1" : "0");
        c.push_back(fmt(r.objective));
        f.row(c);
    }
    f.close();
}

std::vector<std::filesystem::path> write_figdata(const std::filesystem::path& dir, SweepAxis axis,
                                                 const std::vector<double>& xs,
                                                 const std::vector<FigureSeries>& series) {
    using Getter = std::function<double(const RunMetrics&)>;
    struct Figure {
        const char* metric;
        Getter get;
    };
    std::vector<Figure> figures;
    if (axis == SweepAxis::Lambda) {
        figures = {{"rate", [](const RunMetrics& m) { return m.avg_rate; }},
                   {"served", [](const RunMetrics& m) { return m.served_rate; }},
                   {"delay", [](const RunMetrics& m) { return m.avg_delay; }},
                   {"power", [](const RunMetrics& m) { return m.avg_power; }}};
    } else {
        figures = {{"utility", [](const RunMetrics& m) { return m.utility; }},
                   {"delay", [](const RunMetrics& m) { return m.avg_delay; }},
                   {"ee", [](const RunMetrics& m) { return m.achieved_ee; }}};
    }

    std::vector<std::filesystem::path> written;
    for (const auto& fig : figures) {
        const auto path = dir / ("figdata_" + std::string(fig.metric) + "_vs_" + to_string(axis) + ".csv");
        CsvFile f(path);
        std::vector<std::string> head = {to_string(axis)};
        for (const auto& s : series) head.push_back(s.name);
        f.row(head);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            std::vector<std::string> c = {fmt(xs[i])};
            for (const auto& s : series) c.push_back(fmt(fig.get(*s.points.at(i))));
            f.row(c);
        }
        f.close();
        written.push_back(path);
    }
    return written;
}

}  // namespace hcran
