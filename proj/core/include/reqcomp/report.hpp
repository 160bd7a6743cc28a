// Aggregated result tables: groups (job categories, ablation variants) as
// rows, metrics as columns, each cell a mean with an optional 95% CI. Emits
// a plain-text table and a machine-readable JSON form that round-trips.
#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "reqcomp/stats.hpp"

namespace reqcomp::harness {

extern const std::vector<std::string> kMetricColumns;  // top1..top3, ra, ra_norm, pa, ca
extern const std::vector<std::string> kIrrColumns;     // top1, ra, ra_norm, pa, ca

struct ReportRow {
    std::string group;
    std::size_t reqs = 0;
    std::size_t runs = 0;
    // Metric name -> aggregate; metrics undefined for the group are absent.
    std::map<std::string, metrics::RunAggregate> cells;

    bool operator==(const ReportRow&) const = default;
};

struct EvaluationReport {
    std::string title;
    std::vector<std::string> columns;
    std::vector<ReportRow> rows;

    bool operator==(const EvaluationReport&) const = default;
};

std::string report_to_json(const EvaluationReport& report);
EvaluationReport report_from_json(const std::string& text);

// Fixed-width table with "0.77 / [0.70, 0.84]" cells; "-" for absent.
std::string report_to_table(const EvaluationReport& report);

// Writes <basename>.json and <basename>.txt under dir. Deterministic bytes
// for identical reports. An empty report (no rows or no columns) is an
// error.
void write_report(const EvaluationReport& report, const std::filesystem::path& dir,
                  const std::string& basename);

EvaluationReport load_report(const std::filesystem::path& json_path);

}  // namespace reqcomp::harness
