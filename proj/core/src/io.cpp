#include "reqcomp/io.hpp"

#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "json_codec.hpp"
#include "reqcomp/errors.hpp"

namespace reqcomp::io {

namespace {

using detail::ordered_json;

std::string line_context(const std::filesystem::path& path, std::size_t line_no) {
    return path.string() + ":" + std::to_string(line_no);
}

// Streams a JSONL file, handing each parsed object to the callback.
// Blank lines are skipped; JSON syntax errors and thrown ValidationErrors
// are rethrown with file:line context.
void for_each_line(const std::filesystem::path& path,
                   const std::function<void(const ordered_json&, std::size_t)>& handle) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open '" + path.string() + "' for reading");
    }
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        ordered_json parsed;
        try {
            parsed = ordered_json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ValidationError(line_context(path, line_no) + ": malformed JSON: " + e.what());
        }
        if (!parsed.is_object()) {
            throw ValidationError(line_context(path, line_no) + ": expected a JSON object");
        }
        try {
            handle(parsed, line_no);
        } catch (const ValidationError& e) {
            throw ValidationError(line_context(path, line_no) + ": " + e.what());
        }
    }
}

std::ofstream open_for_write(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw ConfigError("cannot open '" + path.string() + "' for writing");
    }
    return out;
}

void finish_write(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) {
        throw ConfigError("write to '" + path.string() + "' failed");
    }
}

ordered_json requisition_to_json(const Requisition& req) {
    ordered_json sections = ordered_json::object();
    for (const auto& [kind, text] : req.sections) {
        sections[section_kind_name(kind)] = text;
    }
    return ordered_json{{"schema_version", 1},
                        {"req_id", req.req_id},
                        {"job_category", req.job_category},
                        {"external_title", req.external_title},
                        {"department", req.department},
                        {"sections", std::move(sections)}};
}

Requisition requisition_from_json(const ordered_json& obj) {
    detail::require_schema_version(obj, 1);
    Requisition req;
    req.req_id = detail::require_string(obj, "req_id");
    req.job_category = detail::require_string(obj, "job_category");
    req.external_title = detail::require_string(obj, "external_title");
    req.department = detail::require_string(obj, "department");
    const auto& sections = detail::require_field(obj, "sections");
    if (!sections.is_object()) detail::bad_field("sections", "expected an object");
    for (const auto& [key, value] : sections.items()) {
        auto kind = parse_section_kind(key);
        if (!kind) detail::bad_field("sections", "unknown section kind '" + key + "'");
        if (!value.is_string()) detail::bad_field("sections." + key, "expected a string");
        req.sections[*kind] = value.get<std::string>();
    }
    validate(req);
    return req;
}

ordered_json rating_sheet_to_json(const SmeRatingSheet& sheet) {
    ordered_json ratings = ordered_json::array();
    for (const auto& rating : sheet.pc_ratings) {
        ratings.push_back(ordered_json{{"label", rating.label},
                                       {"out_of_scope", rating.out_of_scope ? 1 : 0},
                                       {"granularity", granularity_name(rating.granularity)},
                                       {"categorization_correct", rating.categorization_correct ? 1 : 0},
                                       {"justification_ok", rating.justification_ok ? 1 : 0}});
    }
    return ordered_json{{"schema_version", 1},
                        {"req_id", sheet.req_id},
                        {"pc_ratings", std::move(ratings)},
                        {"overlap_free", sheet.overlap_free ? 1 : 0},
                        {"top1_appropriateness", sheet.top1_appropriateness}};
}

SmeRatingSheet rating_sheet_from_json(const ordered_json& obj) {
    detail::require_schema_version(obj, 1);
    SmeRatingSheet sheet;
    sheet.req_id = detail::require_string(obj, "req_id");
    const auto& ratings = detail::require_field(obj, "pc_ratings");
    if (!ratings.is_array()) detail::bad_field("pc_ratings", "expected an array");
    for (const auto& entry : ratings) {
        PcRating rating;
        rating.label = detail::require_string(entry, "label");
        rating.out_of_scope = detail::require_bool(entry, "out_of_scope");
        std::string granularity = detail::require_string(entry, "granularity");
        auto parsed = parse_granularity(granularity);
        if (!parsed) detail::bad_field("granularity", "unknown value '" + granularity + "'");
        rating.granularity = *parsed;
        rating.categorization_correct = detail::require_bool(entry, "categorization_correct");
        rating.justification_ok = detail::require_bool(entry, "justification_ok");
        sheet.pc_ratings.push_back(std::move(rating));
    }
    sheet.overlap_free = detail::require_bool(obj, "overlap_free");
    sheet.top1_appropriateness = detail::require_int(obj, "top1_appropriateness");
    validate(sheet);
    return sheet;
}

}  // namespace

std::vector<Requisition> load_requisitions(const std::filesystem::path& path) {
    std::vector<Requisition> reqs;
    std::set<std::string> seen;
    for_each_line(path, [&](const ordered_json& obj, std::size_t) {
        Requisition req = requisition_from_json(obj);
        if (!seen.insert(req.req_id).second) {
            throw ValidationError("duplicate req_id '" + req.req_id + "'");
        }
        reqs.push_back(std::move(req));
    });
    return reqs;
}

std::vector<LabelSet> load_label_sets(const std::filesystem::path& path) {
    std::vector<LabelSet> sets;
    std::set<std::pair<std::string, Source>> seen;
    for_each_line(path, [&](const ordered_json& obj, std::size_t) {
        LabelSet set = detail::label_set_from_json(obj);
        validate(set);
        if (!seen.insert({set.req_id, set.source}).second) {
            throw ValidationError("duplicate label set (" + set.req_id + ", " +
                                  set.source.display() + ")");
        }
        sets.push_back(std::move(set));
    });
    return sets;
}

ReferenceLibrary load_library(const std::filesystem::path& path) {
    ReferenceLibrary library;
    for_each_line(path, [&](const ordered_json& obj, std::size_t) {
        detail::require_schema_version(obj, 1);
        std::string kind = detail::require_string(obj, "entry_kind");
        const auto& record_obj = detail::require_field(obj, "record");
        CompetencyRecord record = detail::record_from_json(record_obj);
        validate(record);
        if (kind == "library") {
            library.library_pcs.push_back(std::move(record));
        } else if (kind == "excluded") {
            library.excluded_pcs.push_back(std::move(record));
        } else {
            detail::bad_field("entry_kind", "unknown value '" + kind + "'");
        }
    });
    validate(library);
    return library;
}

std::vector<SmeRatingSheet> load_rating_sheets(const std::filesystem::path& path) {
    std::vector<SmeRatingSheet> sheets;
    std::set<std::string> seen;
    for_each_line(path, [&](const ordered_json& obj, std::size_t) {
        SmeRatingSheet sheet = rating_sheet_from_json(obj);
        if (!seen.insert(sheet.req_id).second) {
            throw ValidationError("duplicate rating sheet for req '" + sheet.req_id + "'");
        }
        sheets.push_back(std::move(sheet));
    });
    return sheets;
}

void save_requisitions(std::span<const Requisition> reqs, const std::filesystem::path& path) {
    for (const auto& req : reqs) validate(req);
    auto out = open_for_write(path);
    for (const auto& req : reqs) {
        out << requisition_to_json(req).dump() << '\n';
    }
    finish_write(out, path);
}

std::string label_set_to_line(const LabelSet& set) {
    return detail::to_json(set).dump();
}

void save_label_set(const LabelSet& set, const std::filesystem::path& path) {
    save_label_sets(std::span<const LabelSet>(&set, 1), path);
}

void save_label_sets(std::span<const LabelSet> sets, const std::filesystem::path& path) {
    for (const auto& set : sets) validate(set);
    auto out = open_for_write(path);
    for (const auto& set : sets) {
        out << label_set_to_line(set) << '\n';
    }
    finish_write(out, path);
}

void save_library(const ReferenceLibrary& library, const std::filesystem::path& path) {
    validate(library);
    auto out = open_for_write(path);
    auto emit = [&](const CompetencyRecord& record, const char* kind) {
        ordered_json line{{"schema_version", 1},
                          {"entry_kind", kind},
                          {"record", detail::to_json(record)}};
        out << line.dump() << '\n';
    };
    for (const auto& record : library.library_pcs) emit(record, "library");
    for (const auto& record : library.excluded_pcs) emit(record, "excluded");
    finish_write(out, path);
}

void save_rating_sheets(std::span<const SmeRatingSheet> sheets, const std::filesystem::path& path) {
    for (const auto& sheet : sheets) validate(sheet);
    auto out = open_for_write(path);
    for (const auto& sheet : sheets) {
        out << rating_sheet_to_json(sheet).dump() << '\n';
    }
    finish_write(out, path);
}

DatasetBundle load_bundle(const DatasetPaths& paths) {
    DatasetBundle bundle;
    bundle.requisitions = load_requisitions(paths.requisitions);
    if (!paths.labels.empty()) bundle.label_sets = load_label_sets(paths.labels);
    if (!paths.library.empty()) bundle.library = load_library(paths.library);
    if (!paths.ratings.empty()) bundle.ratings = load_rating_sheets(paths.ratings);
    validate(bundle);
    return bundle;
}

}  // namespace reqcomp::io
