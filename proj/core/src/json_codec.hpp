// Internal JSON encode/decode helpers for the model types. Kept out of the
// public headers so installed consumers never see the JSON dependency.
#pragma once

#include <nlohmann/json.hpp>

#include "reqcomp/errors.hpp"
#include "reqcomp/model.hpp"

namespace reqcomp::detail {

using ordered_json = nlohmann::ordered_json;

inline ordered_json to_json(const MentionEvidence& mentions) {
    return ordered_json{{"in_bq", mentions.in_bq},
                        {"in_pq", mentions.in_pq},
                        {"jd_count", mentions.jd_count}};
}

inline ordered_json to_json(const CompetencyRecord& record) {
    return ordered_json{{"label", record.label},
                        {"definition", record.definition},
                        {"category", category_name(record.category)},
                        {"priority", record.priority},
                        {"justification", record.justification},
                        {"mentions", to_json(record.mentions)}};
}

inline ordered_json to_json(const Source& source) {
    switch (source.kind) {
        case Source::Kind::ModelRun:
            return ordered_json{{"kind", "model_run"}, {"run_id", source.id}};
        case Source::Kind::Sme:
            return ordered_json{{"kind", "sme"}, {"rater_id", source.id}};
        case Source::Kind::Consensus:
            return ordered_json{{"kind", "consensus"}};
    }
    return ordered_json{};
}

inline ordered_json to_json(const LabelSet& set) {
    ordered_json records = ordered_json::array();
    for (const auto& record : set.records) records.push_back(to_json(record));
    return ordered_json{{"schema_version", 1},
                        {"req_id", set.req_id},
                        {"source", to_json(set.source)},
                        {"records", std::move(records)}};
}

// Decoding. Field lookups throw ValidationError with the field name so the
// loaders can prepend file/line context.

[[noreturn]] inline void bad_field(const std::string& field, const std::string& why) {
    throw ValidationError("field '" + field + "': " + why);
}

inline const ordered_json& require_field(const ordered_json& obj, const std::string& field) {
    auto it = obj.find(field);
    if (it == obj.end()) bad_field(field, "missing");
    return *it;
}

inline std::string require_string(const ordered_json& obj, const std::string& field) {
    const auto& value = require_field(obj, field);
    if (!value.is_string()) bad_field(field, "expected a string");
    return value.get<std::string>();
}

inline int require_int(const ordered_json& obj, const std::string& field) {
    const auto& value = require_field(obj, field);
    if (!value.is_number_integer()) bad_field(field, "expected an integer");
    return value.get<int>();
}

inline bool require_bool(const ordered_json& obj, const std::string& field) {
    const auto& value = require_field(obj, field);
    if (value.is_boolean()) return value.get<bool>();
    // 0/1 integers are accepted for the binary rating anchors.
    if (value.is_number_integer()) {
        int v = value.get<int>();
        if (v == 0 || v == 1) return v == 1;
    }
    bad_field(field, "expected a boolean or 0/1");
}

inline void require_schema_version(const ordered_json& obj, int expected) {
    int version = require_int(obj, "schema_version");
    if (version != expected) {
        bad_field("schema_version", "unsupported version " + std::to_string(version) +
                                        " (expected " + std::to_string(expected) + ")");
    }
}

inline MentionEvidence mentions_from_json(const ordered_json& obj) {
    MentionEvidence mentions;
    mentions.in_bq = require_bool(obj, "in_bq");
    mentions.in_pq = require_bool(obj, "in_pq");
    mentions.jd_count = require_int(obj, "jd_count");
    return mentions;
}

inline CompetencyRecord record_from_json(const ordered_json& obj) {
    CompetencyRecord record;
    record.label = require_string(obj, "label");
    record.definition = require_string(obj, "definition");
    std::string category = require_string(obj, "category");
    auto parsed = parse_category(category);
    if (!parsed) bad_field("category", "unknown value '" + category + "'");
    record.category = *parsed;
    record.priority = require_int(obj, "priority");
    record.justification = require_string(obj, "justification");
    const auto& mentions = require_field(obj, "mentions");
    if (!mentions.is_object()) bad_field("mentions", "expected an object");
    record.mentions = mentions_from_json(mentions);
    return record;
}

inline Source source_from_json(const ordered_json& obj) {
    std::string kind = require_string(obj, "kind");
    if (kind == "model_run") return Source::model_run(require_string(obj, "run_id"));
    if (kind == "sme") return Source::sme(require_string(obj, "rater_id"));
    if (kind == "consensus") return Source::consensus();
    bad_field("source.kind", "unknown value '" + kind + "'");
}

inline LabelSet label_set_from_json(const ordered_json& obj) {
    require_schema_version(obj, 1);
    LabelSet set;
    set.req_id = require_string(obj, "req_id");
    const auto& source = require_field(obj, "source");
    if (!source.is_object()) bad_field("source", "expected an object");
    set.source = source_from_json(source);
    const auto& records = require_field(obj, "records");
    if (!records.is_array()) bad_field("records", "expected an array");
    for (const auto& entry : records) set.records.push_back(record_from_json(entry));
    return set;
}

}  // namespace reqcomp::detail
