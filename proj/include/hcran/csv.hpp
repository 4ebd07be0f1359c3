#pragma once

// CSV emission. Numbers are written with std::to_chars at 9 significant
// digits, so the output is locale-independent and byte-stable.

#include <filesystem>
#include <string>
#include <vector>

#include "hcran/harness.hpp"

namespace hcran {

std::string format_number(double v);

/// One row of run_summary.csv.
struct SummaryRow {
    std::string run_id;
    std::string axis;  // empty for a single run
    double value = 0.0;
    std::uint64_t seed = 0;
    const RunMetrics* metrics = nullptr;
};

std::vector<std::string> summary_header(std::size_t num_hue, std::size_t num_rue);
std::vector<std::string> trace_header(std::size_t num_hue, std::size_t num_rue);

/// Writers throw std::runtime_error when the file cannot be written.
void write_summary(const std::filesystem::path& path, const std::vector<SummaryRow>& rows,
                   std::size_t num_hue, std::size_t num_rue);
void write_trace(const std::filesystem::path& path, const std::vector<SlotRecord>& trace,
                 std::size_t num_hue, std::size_t num_rue);

/// One series of a figure: a scheme name and the metrics at each x value.
struct FigureSeries {
    std::string name;
    std::vector<const RunMetrics*> points;
};

/// Writes figdata_<metric>_vs_<axis>.csv files for the axis: columns are the
/// x value followed by one column per series.
std::vector<std::filesystem::path> write_figdata(const std::filesystem::path& dir, SweepAxis axis,
                                                 const std::vector<double>& xs,
                                                 const std::vector<FigureSeries>& series);

}  // namespace hcran
