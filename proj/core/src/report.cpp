#include "reqcomp/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "reqcomp/errors.hpp"

namespace reqcomp::harness {

const std::vector<std::string> kMetricColumns = {"top1", "top2", "top3", "ra",
                                                 "ra_norm", "pa", "ca"};
const std::vector<std::string> kIrrColumns = {"top1", "ra", "ra_norm", "pa", "ca"};

namespace {

using ordered_json = nlohmann::ordered_json;

std::string format_value(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.2f", value);
    return buffer;
}

std::string format_cell(const metrics::RunAggregate& cell) {
    std::string out = format_value(cell.mean);
    if (cell.ci_lo && cell.ci_hi) {
        out += " / [" + format_value(*cell.ci_lo) + ", " + format_value(*cell.ci_hi) + "]";
    }
    return out;
}

void check_not_empty(const EvaluationReport& report) {
    if (report.columns.empty()) throw ValidationError("report has no columns");
    if (report.rows.empty()) throw ValidationError("report has no rows");
}

}  // namespace

std::string report_to_json(const EvaluationReport& report) {
    check_not_empty(report);
    ordered_json doc;
    doc["schema_version"] = 1;
    doc["title"] = report.title;
    doc["columns"] = report.columns;
    doc["rows"] = ordered_json::array();
    for (const ReportRow& row : report.rows) {
        ordered_json cells = ordered_json::object();
        for (const auto& [metric, aggregate] : row.cells) {
            ordered_json cell{{"mean", aggregate.mean}, {"runs", aggregate.runs}};
            if (aggregate.ci_lo && aggregate.ci_hi) {
                cell["ci_lo"] = *aggregate.ci_lo;
                cell["ci_hi"] = *aggregate.ci_hi;
            }
            cells[metric] = std::move(cell);
        }
        doc["rows"].push_back(ordered_json{{"group", row.group},
                                           {"reqs", row.reqs},
                                           {"runs", row.runs},
                                           {"cells", std::move(cells)}});
    }
    return doc.dump(2) + "\n";
}

EvaluationReport report_from_json(const std::string& text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("report is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || doc.value("schema_version", 0) != 1) {
        throw ValidationError("report must be an object with schema_version 1");
    }
    EvaluationReport report;
    if (!doc.contains("title") || !doc["title"].is_string()) {
        throw ValidationError("report missing string 'title'");
    }
    report.title = doc["title"].get<std::string>();
    if (!doc.contains("columns") || !doc["columns"].is_array()) {
        throw ValidationError("report missing 'columns' array");
    }
    for (const auto& column : doc["columns"]) {
        if (!column.is_string()) throw ValidationError("report columns must be strings");
        report.columns.push_back(column.get<std::string>());
    }
    if (!doc.contains("rows") || !doc["rows"].is_array()) {
        throw ValidationError("report missing 'rows' array");
    }
    for (const auto& entry : doc["rows"]) {
        if (!entry.is_object()) throw ValidationError("report row must be an object");
        ReportRow row;
        if (!entry.contains("group") || !entry["group"].is_string()) {
            throw ValidationError("report row missing 'group'");
        }
        row.group = entry["group"].get<std::string>();
        row.reqs = entry.value("reqs", 0u);
        row.runs = entry.value("runs", 0u);
        if (!entry.contains("cells") || !entry["cells"].is_object()) {
            throw ValidationError("report row missing 'cells'");
        }
        for (const auto& [metric, cell] : entry["cells"].items()) {
            if (!cell.is_object() || !cell.contains("mean") || !cell["mean"].is_number()) {
                throw ValidationError("report cell for '" + metric + "' missing 'mean'");
            }
            metrics::RunAggregate aggregate;
            aggregate.mean = cell["mean"].get<double>();
            aggregate.runs = cell.value("runs", 0u);
            if (cell.contains("ci_lo") != cell.contains("ci_hi")) {
                throw ValidationError("report cell for '" + metric + "' has half a CI");
            }
            if (cell.contains("ci_lo")) {
                if (!cell["ci_lo"].is_number() || !cell["ci_hi"].is_number()) {
                    throw ValidationError("report cell CI bounds must be numbers");
                }
                aggregate.ci_lo = cell["ci_lo"].get<double>();
                aggregate.ci_hi = cell["ci_hi"].get<double>();
            }
            row.cells[metric] = aggregate;
        }
        report.rows.push_back(std::move(row));
    }
    check_not_empty(report);
    return report;
}

std::string report_to_table(const EvaluationReport& report) {
    check_not_empty(report);

    std::vector<std::string> header = {"group", "reqs", "runs"};
    header.insert(header.end(), report.columns.begin(), report.columns.end());

    std::vector<std::vector<std::string>> body;
    for (const ReportRow& row : report.rows) {
        std::vector<std::string> cells = {row.group, std::to_string(row.reqs),
                                          std::to_string(row.runs)};
        for (const std::string& metric : report.columns) {
            auto it = row.cells.find(metric);
            cells.push_back(it == row.cells.end() ? "-" : format_cell(it->second));
        }
        body.push_back(std::move(cells));
    }

    std::vector<std::size_t> widths(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) widths[c] = header[c].size();
    for (const auto& cells : body) {
        for (std::size_t c = 0; c < cells.size(); ++c) {
            widths[c] = std::max(widths[c], cells[c].size());
        }
    }

    auto emit_row = [&widths](std::ostringstream& out, const std::vector<std::string>& cells) {
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (c > 0) out << " | ";
            out << cells[c];
            out << std::string(widths[c] - cells[c].size(), ' ');
        }
        out << '\n';
    };

    std::ostringstream out;
    out << report.title << '\n';
    emit_row(out, header);
    for (std::size_t c = 0; c < widths.size(); ++c) {
        if (c > 0) out << "-+-";
        out << std::string(widths[c], '-');
    }
    out << '\n';
    for (const auto& cells : body) emit_row(out, cells);
    return out.str();
}

void write_report(const EvaluationReport& report, const std::filesystem::path& dir,
                  const std::string& basename) {
    check_not_empty(report);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);

    std::string json = report_to_json(report);
    std::string table = report_to_table(report);

    std::filesystem::path json_path = dir / (basename + ".json");
    std::ofstream json_out(json_path, std::ios::binary);
    if (!json_out) throw ConfigError("cannot write " + json_path.string());
    json_out << json;

    std::filesystem::path table_path = dir / (basename + ".txt");
    std::ofstream table_out(table_path, std::ios::binary);
    if (!table_out) throw ConfigError("cannot write " + table_path.string());
    table_out << table;
}

EvaluationReport load_report(const std::filesystem::path& json_path) {
    std::ifstream in(json_path, std::ios::binary);
    if (!in) throw ConfigError("cannot open report " + json_path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return report_from_json(buffer.str());
}

}  // namespace reqcomp::harness
