// Domain types: requisitions, competency records, label sets, libraries,
// SME rating sheets, and the dataset bundle that ties them together.
// All types are immutable-by-convention after construction and cheap to copy.
#pragma once

#include <compare>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace reqcomp {

enum class SectionKind { BQ, PQ, JD };

const char* section_kind_name(SectionKind kind);
std::optional<SectionKind> parse_section_kind(std::string_view name);

// A job posting with pre-segmented BQ/PQ/JD sections. Section detection is
// out of scope; inputs arrive already split.
struct Requisition {
    std::string req_id;
    std::string job_category;  // open set: "PM", "PMT", anything else
    std::string external_title;
    std::string department;
    std::map<SectionKind, std::string> sections;

    const std::string& section(SectionKind kind) const;

    bool operator==(const Requisition&) const = default;
};

enum class Category { DomainTeamSpecific, OtherFunctional };

const char* category_name(Category category);
std::optional<Category> parse_category(std::string_view name);

// Where a competency was spotted inside the requisition text.
struct MentionEvidence {
    bool in_bq = false;
    bool in_pq = false;
    int jd_count = 0;

    bool operator==(const MentionEvidence&) const = default;
};

// One personal competency: label + definition + category + 1-10 priority,
// with the evidence and justification that back it.
struct CompetencyRecord {
    std::string label;
    std::string definition;
    Category category = Category::OtherFunctional;
    int priority = 1;
    std::string justification;
    MentionEvidence mentions;

    bool operator==(const CompetencyRecord&) const = default;
};

constexpr int kPriorityMin = 1;
constexpr int kPriorityMax = 10;
constexpr std::size_t kSmeMaxRecords = 5;

// Who produced a label set: a model run, an individual SME, or the SME
// consensus meeting.
struct Source {
    enum class Kind { ModelRun, Sme, Consensus };

    Kind kind = Kind::Consensus;
    std::string id;  // run id or rater id; empty for consensus

    static Source model_run(std::string run_id);
    static Source sme(std::string rater_id);
    static Source consensus();

    std::string display() const;

    bool operator==(const Source&) const = default;
    auto operator<=>(const Source&) const = default;
};

// Ordered competency list for one requisition. Ordering must already satisfy
// the ranking rules; validation checks it and never silently reorders.
struct LabelSet {
    std::string req_id;
    Source source;
    std::vector<CompetencyRecord> records;

    bool operator==(const LabelSet&) const = default;
};

// Standardized library PCs plus the explicit out-of-scope exclusion list.
struct ReferenceLibrary {
    std::vector<CompetencyRecord> library_pcs;   // priority field ignored
    std::vector<CompetencyRecord> excluded_pcs;  // explicitly out of scope

    bool operator==(const ReferenceLibrary&) const = default;
};

enum class Granularity { JustRight, TooBroad, TooGranular };

const char* granularity_name(Granularity granularity);
std::optional<Granularity> parse_granularity(std::string_view name);

// Per-PC slice of an SME rating sheet, joined to model output by label.
struct PcRating {
    std::string label;
    bool out_of_scope = false;  // true == SME flagged the PC as out of scope
    Granularity granularity = Granularity::JustRight;
    bool categorization_correct = true;
    bool justification_ok = true;

    bool operator==(const PcRating&) const = default;
};

// One SME-assessed rating sheet for one requisition's model output.
struct SmeRatingSheet {
    std::string req_id;
    std::vector<PcRating> pc_ratings;
    bool overlap_free = true;
    int top1_appropriateness = 1;  // 1..3 scale

    bool operator==(const SmeRatingSheet&) const = default;
};

enum class Split { Train, Dev, Test };

const char* split_name(Split split);
std::optional<Split> parse_split(std::string_view name);

// Everything one experiment needs, with an optional split assignment.
struct DatasetBundle {
    std::vector<Requisition> requisitions;
    std::vector<LabelSet> label_sets;
    ReferenceLibrary library;
    std::vector<SmeRatingSheet> ratings;
    std::map<std::string, Split> split;  // req_id -> split; empty until assigned

    const Requisition* find_requisition(std::string_view req_id) const;
    const LabelSet* find_label_set(std::string_view req_id, const Source& source) const;
    const LabelSet* consensus(std::string_view req_id) const;
    std::vector<const LabelSet*> sme_sets(std::string_view req_id) const;
    std::vector<const Requisition*> requisitions_in(Split split) const;
};

// Validation. Each function throws ValidationError naming the violated
// invariant; a passed check returns normally.
void validate(const Requisition& req);
void validate(const CompetencyRecord& record);
void validate(const LabelSet& set);
void validate(const ReferenceLibrary& library);
void validate(const SmeRatingSheet& sheet);
void validate(const DatasetBundle& bundle);

}  // namespace reqcomp
