#include "reqcomp/model.hpp"

#include <set>

#include "reqcomp/errors.hpp"
#include "reqcomp/rules.hpp"

namespace reqcomp {

namespace {

[[noreturn]] void fail(const std::string& context, const std::string& invariant) {
    throw ValidationError(context + ": " + invariant);
}

void check_unique_labels(std::span<const CompetencyRecord> records, const std::string& context) {
    std::set<std::string> seen;
    for (const auto& record : records) {
        if (!seen.insert(record.label).second) {
            fail(context, "duplicate label '" + record.label + "'");
        }
    }
}

}  // namespace

const char* section_kind_name(SectionKind kind) {
    switch (kind) {
        case SectionKind::BQ: return "BQ";
        case SectionKind::PQ: return "PQ";
        case SectionKind::JD: return "JD";
    }
    return "?";
}

std::optional<SectionKind> parse_section_kind(std::string_view name) {
    if (name == "BQ") return SectionKind::BQ;
    if (name == "PQ") return SectionKind::PQ;
    if (name == "JD") return SectionKind::JD;
    return std::nullopt;
}

const std::string& Requisition::section(SectionKind kind) const {
    static const std::string empty;
    auto it = sections.find(kind);
    return it == sections.end() ? empty : it->second;
}

const char* category_name(Category category) {
    switch (category) {
        case Category::DomainTeamSpecific: return "domain_team_specific";
        case Category::OtherFunctional: return "other_functional";
    }
    return "?";
}

std::optional<Category> parse_category(std::string_view name) {
    if (name == "domain_team_specific") return Category::DomainTeamSpecific;
    if (name == "other_functional") return Category::OtherFunctional;
    return std::nullopt;
}

Source Source::model_run(std::string run_id) {
    return Source{Kind::ModelRun, std::move(run_id)};
}

Source Source::sme(std::string rater_id) {
    return Source{Kind::Sme, std::move(rater_id)};
}

Source Source::consensus() {
    return Source{Kind::Consensus, {}};
}

std::string Source::display() const {
    switch (kind) {
        case Kind::ModelRun: return "model_run(" + id + ")";
        case Kind::Sme: return "sme(" + id + ")";
        case Kind::Consensus: return "consensus";
    }
    return "?";
}

const char* granularity_name(Granularity granularity) {
    switch (granularity) {
        case Granularity::JustRight: return "just_right";
        case Granularity::TooBroad: return "too_broad";
        case Granularity::TooGranular: return "too_granular";
    }
    return "?";
}

std::optional<Granularity> parse_granularity(std::string_view name) {
    if (name == "just_right") return Granularity::JustRight;
    if (name == "too_broad") return Granularity::TooBroad;
    if (name == "too_granular") return Granularity::TooGranular;
    return std::nullopt;
}

const char* split_name(Split split) {
    switch (split) {
        case Split::Train: return "train";
        case Split::Dev: return "dev";
        case Split::Test: return "test";
    }
    return "?";
}

std::optional<Split> parse_split(std::string_view name) {
    if (name == "train") return Split::Train;
    if (name == "dev") return Split::Dev;
    if (name == "test") return Split::Test;
    return std::nullopt;
}

const Requisition* DatasetBundle::find_requisition(std::string_view req_id) const {
    for (const auto& req : requisitions) {
        if (req.req_id == req_id) return &req;
    }
    return nullptr;
}

const LabelSet* DatasetBundle::find_label_set(std::string_view req_id, const Source& source) const {
    for (const auto& set : label_sets) {
        if (set.req_id == req_id && set.source == source) return &set;
    }
    return nullptr;
}

const LabelSet* DatasetBundle::consensus(std::string_view req_id) const {
    return find_label_set(req_id, Source::consensus());
}

std::vector<const LabelSet*> DatasetBundle::sme_sets(std::string_view req_id) const {
    std::vector<const LabelSet*> out;
    for (const auto& set : label_sets) {
        if (set.req_id == req_id && set.source.kind == Source::Kind::Sme) out.push_back(&set);
    }
    return out;
}

std::vector<const Requisition*> DatasetBundle::requisitions_in(Split wanted) const {
    std::vector<const Requisition*> out;
    for (const auto& req : requisitions) {
        auto it = split.find(req.req_id);
        if (it != split.end() && it->second == wanted) out.push_back(&req);
    }
    return out;
}

void validate(const Requisition& req) {
    const std::string context = "requisition '" + req.req_id + "'";
    if (req.req_id.empty()) fail("requisition", "req_id must be non-empty");
    if (req.sections.find(SectionKind::JD) == req.sections.end()) {
        fail(context, "sections must contain the JD section");
    }
}

void validate(const CompetencyRecord& record) {
    const std::string context = "competency '" + record.label + "'";
    if (record.label.empty()) fail("competency", "label must be non-empty");
    if (record.definition.empty()) fail(context, "definition must be non-empty");
    if (record.label == record.definition) fail(context, "label must differ from definition");
    if (record.priority < kPriorityMin || record.priority > kPriorityMax) {
        fail(context, "priority " + std::to_string(record.priority) + " outside 1..10");
    }
    if (record.mentions.jd_count < 0) fail(context, "jd_count must be >= 0");
}

void validate(const LabelSet& set) {
    const std::string context = "label set (" + set.req_id + ", " + set.source.display() + ")";
    if (set.req_id.empty()) fail("label set", "req_id must be non-empty");
    for (const auto& record : set.records) validate(record);
    if (set.source.kind == Source::Kind::Sme && set.records.size() > kSmeMaxRecords) {
        fail(context, "SME label sets carry at most 5 records, got " +
                          std::to_string(set.records.size()));
    }
    if (!rules::is_ranked(set.records)) {
        fail(context, "records violate the ranking rules "
                      "(Domain/Team-Specific first, descending priority)");
    }
}

void validate(const ReferenceLibrary& library) {
    for (const auto& record : library.library_pcs) validate(record);
    for (const auto& record : library.excluded_pcs) validate(record);
    check_unique_labels(library.library_pcs, "library PCs");
    check_unique_labels(library.excluded_pcs, "excluded PCs");
}

void validate(const SmeRatingSheet& sheet) {
    const std::string context = "rating sheet '" + sheet.req_id + "'";
    if (sheet.req_id.empty()) fail("rating sheet", "req_id must be non-empty");
    if (sheet.top1_appropriateness < 1 || sheet.top1_appropriateness > 3) {
        fail(context, "top1_appropriateness must be 1, 2, or 3");
    }
    std::set<std::string> seen;
    for (const auto& rating : sheet.pc_ratings) {
        if (rating.label.empty()) fail(context, "pc rating label must be non-empty");
        if (!seen.insert(rating.label).second) {
            fail(context, "duplicate pc rating for label '" + rating.label + "'");
        }
    }
}

void validate(const DatasetBundle& bundle) {
    std::set<std::string_view> req_ids;
    for (const auto& req : bundle.requisitions) {
        validate(req);
        if (!req_ids.insert(req.req_id).second) {
            fail("dataset", "duplicate req_id '" + req.req_id + "'");
        }
    }
    std::set<std::pair<std::string_view, Source>> set_keys;
    for (const auto& set : bundle.label_sets) {
        validate(set);
        if (req_ids.find(set.req_id) == req_ids.end()) {
            fail("dataset", "label set references unknown req '" + set.req_id + "'");
        }
        if (!set_keys.insert({set.req_id, set.source}).second) {
            fail("dataset", "duplicate label set (" + set.req_id + ", " +
                                set.source.display() + ")");
        }
    }
    validate(bundle.library);
    std::set<std::string_view> rated;
    for (const auto& sheet : bundle.ratings) {
        validate(sheet);
        if (req_ids.find(sheet.req_id) == req_ids.end()) {
            fail("dataset", "rating sheet references unknown req '" + sheet.req_id + "'");
        }
        if (!rated.insert(sheet.req_id).second) {
            fail("dataset", "duplicate rating sheet for req '" + sheet.req_id + "'");
        }
    }
    for (const auto& [req_id, _] : bundle.split) {
        if (req_ids.find(req_id) == req_ids.end()) {
            fail("dataset", "split assignment references unknown req '" + req_id + "'");
        }
    }
}

}  // namespace reqcomp
