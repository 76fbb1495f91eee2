#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dcm/assessment.hpp"
#include "dcm/sensitivity.hpp"

namespace dcm {

/// Input files with their content digests, embedded into every export so
/// results are traceable to exact inputs.
struct InputDigests {
    std::map<std::string, std::string> by_file; // path -> hex digest

    void add(const std::string& path, const std::string& content);
    std::string joined() const; // "a.json:0123abcd,b.csv:..."
};

std::string hex64(std::uint64_t v);

/// The two provenance comment lines at the top of every export.
std::string export_header(const std::string& kind, std::uint64_t master_seed,
                          const InputDigests& inputs);

/// One row per summary: system, stance, prior, variant, statistics.
std::string summary_csv(const std::vector<SweepCell>& rows,
                        std::uint64_t master_seed, const InputDigests& inputs);

/// Long format, one row per run value; ready for violin-style plotting.
std::string runs_csv(const std::vector<SweepCell>& rows,
                     std::uint64_t master_seed, const InputDigests& inputs);

/// Machine-readable mirror of summary_csv (ordered JSON, stable bytes).
std::string summary_json(const std::vector<SweepCell>& rows,
                         std::uint64_t master_seed,
                         const InputDigests& inputs);

/// Ordinal stability report as CSV (kind=violation|tie rows).
std::string ordinal_csv(const OrdinalReport& report,
                        std::uint64_t master_seed, const InputDigests& inputs);

/// Aggregated panel as CSV for inspection: indicator, mean credence,
/// respondent count.
std::string panel_csv(const IndicatorPanel& panel, std::uint64_t master_seed,
                      const InputDigests& inputs);

void write_file(const std::string& path, const std::string& content);

} // namespace dcm
