#include "reqcomp/wire.hpp"

#include <charconv>
#include <map>
#include <set>
#include <sstream>

#include "reqcomp/errors.hpp"
#include "reqcomp/util.hpp"

namespace reqcomp::wire {

namespace {

struct Field {
    std::string key;
    std::string value;  // raw, still escaped
};

using Block = std::vector<Field>;

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string current;
    for (char c : text) {
        if (c == '\n') {
            if (!current.empty() && current.back() == '\r') current.pop_back();
            lines.push_back(std::move(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    if (!current.empty()) lines.push_back(std::move(current));
    return lines;
}

std::vector<Block> scan_blocks(const std::string& text, std::string_view tag) {
    std::string open = std::string("```") + std::string(tag);
    std::vector<Block> blocks;
    Block current;
    bool inside = false;
    for (const std::string& raw : split_lines(text)) {
        std::string line = trim(raw);
        if (!inside) {
            if (line == open) {
                inside = true;
                current.clear();
            }
            continue;
        }
        if (line == "```") {
            inside = false;
            blocks.push_back(std::move(current));
            current.clear();
            continue;
        }
        if (line.empty()) continue;
        std::size_t colon = raw.find(':');
        if (colon == std::string::npos) {
            throw OutputParseError("malformed line in " + std::string(tag) + " block: '" +
                                   line + "'");
        }
        Field field;
        field.key = trim(raw.substr(0, colon));
        std::size_t start = colon + 1;
        if (start < raw.size() && raw[start] == ' ') ++start;
        field.value = raw.substr(start);
        if (field.key.empty()) {
            throw OutputParseError("empty field key in " + std::string(tag) + " block");
        }
        current.push_back(std::move(field));
    }
    if (inside) {
        throw OutputParseError("unterminated " + std::string(tag) + " block");
    }
    return blocks;
}

// Collapses a block to key -> value, rejecting duplicates and unknown keys,
// requiring every expected key.
std::map<std::string, std::string> block_fields(const Block& block,
                                                const std::vector<std::string>& expected,
                                                std::string_view tag, std::size_t index) {
    std::string where = std::string(tag) + " block " + std::to_string(index + 1);
    std::set<std::string> allowed(expected.begin(), expected.end());
    std::map<std::string, std::string> out;
    for (const Field& field : block) {
        if (!allowed.count(field.key)) {
            throw OutputParseError(where + ": unknown field '" + field.key + "'");
        }
        if (!out.emplace(field.key, field.value).second) {
            throw OutputParseError(where + ": duplicate field '" + field.key + "'");
        }
    }
    for (const std::string& key : expected) {
        if (!out.count(key)) {
            throw OutputParseError(where + ": missing field '" + key + "'");
        }
    }
    return out;
}

int parse_int_field(const std::string& value, const std::string& key, std::string_view where) {
    std::string t = trim(value);
    int out = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
        throw OutputParseError(std::string(where) + ": field '" + key +
                               "' is not an integer: '" + t + "'");
    }
    return out;
}

bool parse_bool01(const std::string& value, const std::string& key, std::string_view where) {
    std::string t = trim(value);
    if (t == "0") return false;
    if (t == "1") return true;
    throw OutputParseError(std::string(where) + ": field '" + key + "' must be 0 or 1, got '" +
                           t + "'");
}

void append_field(std::string& out, std::string_view key, std::string_view value) {
    out += key;
    out += ':';
    if (!value.empty()) {
        out += ' ';
        out += value;
    }
    out += '\n';
}

const std::vector<std::string> kPcFields = {"label", "definition", "category",   "priority",
                                            "justification", "in_bq", "in_pq", "jd_count"};

}  // namespace

std::string serialize_competency_output(const std::vector<CompetencyRecord>& records) {
    if (records.empty()) return std::string(kNoPcsMarker) + "\n";
    std::string out;
    for (const CompetencyRecord& r : records) {
        out += "```pc\n";
        append_field(out, "label", escape_field(r.label));
        append_field(out, "definition", escape_field(r.definition));
        append_field(out, "category", category_name(r.category));
        append_field(out, "priority", std::to_string(r.priority));
        append_field(out, "justification", escape_field(r.justification));
        append_field(out, "in_bq", r.mentions.in_bq ? "1" : "0");
        append_field(out, "in_pq", r.mentions.in_pq ? "1" : "0");
        append_field(out, "jd_count", std::to_string(r.mentions.jd_count));
        out += "```\n";
    }
    return out;
}

std::vector<CompetencyRecord> parse_competency_output(const std::string& text) {
    std::vector<Block> blocks = scan_blocks(text, "pc");
    if (blocks.empty()) {
        if (text.find(kNoPcsMarker) != std::string::npos) return {};
        throw OutputParseError(std::string("no pc blocks found and no ") + kNoPcsMarker +
                               " marker");
    }
    std::vector<CompetencyRecord> records;
    records.reserve(blocks.size());
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        std::string where = "pc block " + std::to_string(i + 1);
        auto fields = block_fields(blocks[i], kPcFields, "pc", i);
        CompetencyRecord r;
        r.label = unescape_field(fields["label"]);
        r.definition = unescape_field(fields["definition"]);
        auto category = parse_category(trim(fields["category"]));
        if (!category) {
            throw OutputParseError(where + ": unknown category '" + trim(fields["category"]) +
                                   "'");
        }
        r.category = *category;
        r.priority = parse_int_field(fields["priority"], "priority", where);
        r.justification = unescape_field(fields["justification"]);
        r.mentions.in_bq = parse_bool01(fields["in_bq"], "in_bq", where);
        r.mentions.in_pq = parse_bool01(fields["in_pq"], "in_pq", where);
        r.mentions.jd_count = parse_int_field(fields["jd_count"], "jd_count", where);
        try {
            validate(r);
        } catch (const ValidationError& e) {
            throw OutputParseError(where + " ('" + r.label + "'): " + e.what());
        }
        records.push_back(std::move(r));
    }
    return records;
}

std::string serialize_verdicts(const std::vector<llm::PcVerdicts>& verdicts) {
    std::string out;
    for (const llm::PcVerdicts& v : verdicts) {
        out += "```eval\n";
        append_field(out, "label", escape_field(v.label));
        for (llm::EvalDimension d : llm::kAllEvalDimensions) {
            append_field(out, llm::dimension_name(d), v.pass(d) ? "pass" : "fail");
        }
        out += "```\n";
    }
    return out;
}

std::vector<llm::PcVerdicts> parse_verdicts(const std::string& text) {
    std::vector<std::string> expected = {"label"};
    for (llm::EvalDimension d : llm::kAllEvalDimensions) {
        expected.push_back(llm::dimension_name(d));
    }
    std::vector<Block> blocks = scan_blocks(text, "eval");
    if (blocks.empty()) throw OutputParseError("no eval blocks found");
    std::vector<llm::PcVerdicts> out;
    out.reserve(blocks.size());
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        std::string where = "eval block " + std::to_string(i + 1);
        auto fields = block_fields(blocks[i], expected, "eval", i);
        llm::PcVerdicts v;
        v.label = unescape_field(fields["label"]);
        if (v.label.empty()) throw OutputParseError(where + ": empty label");
        for (llm::EvalDimension d : llm::kAllEvalDimensions) {
            std::string value = trim(fields[llm::dimension_name(d)]);
            if (value == "pass") {
                v.set(d, true);
            } else if (value == "fail") {
                v.set(d, false);
            } else {
                throw OutputParseError(where + ": field '" + llm::dimension_name(d) +
                                       "' must be pass or fail, got '" + value + "'");
            }
        }
        out.push_back(std::move(v));
    }
    return out;
}

std::string serialize_suggestions(const std::vector<llm::ImprovementSuggestion>& suggestions) {
    std::string out;
    for (const llm::ImprovementSuggestion& s : suggestions) {
        out += "```suggestion\n";
        append_field(out, "label", escape_field(s.label));
        append_field(out, "dimension", llm::dimension_name(s.dimension));
        append_field(out, "suggestion", escape_field(s.text));
        out += "```\n";
    }
    return out;
}

std::vector<llm::ImprovementSuggestion> parse_suggestions(const std::string& text) {
    static const std::vector<std::string> expected = {"label", "dimension", "suggestion"};
    std::vector<Block> blocks = scan_blocks(text, "suggestion");
    if (blocks.empty()) throw OutputParseError("no suggestion blocks found");
    std::vector<llm::ImprovementSuggestion> out;
    out.reserve(blocks.size());
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        std::string where = "suggestion block " + std::to_string(i + 1);
        auto fields = block_fields(blocks[i], expected, "suggestion", i);
        llm::ImprovementSuggestion s;
        s.label = unescape_field(fields["label"]);
        if (s.label.empty()) throw OutputParseError(where + ": empty label");
        auto dim = llm::parse_dimension(trim(fields["dimension"]));
        if (!dim) {
            throw OutputParseError(where + ": unknown dimension '" + trim(fields["dimension"]) +
                                   "'");
        }
        s.dimension = *dim;
        s.text = unescape_field(fields["suggestion"]);
        if (s.text.empty()) throw OutputParseError(where + ": empty suggestion");
        out.push_back(std::move(s));
    }
    return out;
}

std::string serialize_refined_label(const std::string& label) {
    std::string out = "```label\n";
    append_field(out, "label", escape_field(label));
    out += "```\n";
    return out;
}

std::string parse_refined_label(const std::string& text) {
    static const std::vector<std::string> expected = {"label"};
    std::vector<Block> blocks = scan_blocks(text, "label");
    if (blocks.size() != 1) {
        throw OutputParseError("expected exactly one label block, found " +
                               std::to_string(blocks.size()));
    }
    auto fields = block_fields(blocks[0], expected, "label", 0);
    std::string label = unescape_field(fields["label"]);
    if (trim(label).empty()) throw OutputParseError("label block carries an empty label");
    return label;
}

}  // namespace reqcomp::wire
