#include "reqcomp/rules.hpp"

#include <algorithm>

namespace reqcomp::rules {

namespace {

// Sort key: Domain/Team-Specific block first, then descending priority.
std::pair<int, int> rank_key(const CompetencyRecord& record) {
    return {record.category == Category::DomainTeamSpecific ? 0 : 1, -record.priority};
}

}  // namespace

PriorityBounds priority_bounds(const MentionEvidence& mentions, Category category) {
    PriorityBounds bounds;

    const bool bq = mentions.in_bq;
    const bool pq = mentions.in_pq;
    const bool jd = mentions.jd_count >= 1;
    const bool jd_multi = mentions.jd_count >= 2;

    // "Only appears in X" is read strictly: no other section carries it.
    if (pq && !bq && !jd) bounds.max = std::min(bounds.max, 4);
    if (bq && !pq && !jd) bounds.max = std::min(bounds.max, 6);
    if (bq && jd) bounds.min = std::max(bounds.min, 6);
    if (bq && pq && jd) bounds.min = std::max(bounds.min, 7);
    if (bq && pq && jd_multi) bounds.min = std::max(bounds.min, 8);

    if (category == Category::DomainTeamSpecific) {
        bounds.min = std::max(bounds.min, 7);
        if (bounds.min > bounds.max) {
            // Category minimum wins; surface the disagreement instead of hiding it.
            bounds.max = kPriorityMax;
            bounds.conflict = true;
        }
    }
    return bounds;
}

EnforceResult enforce_priority(const CompetencyRecord& record) {
    const PriorityBounds bounds = priority_bounds(record.mentions, record.category);
    EnforceResult result{record, false, bounds.conflict};
    result.record.priority = std::clamp(record.priority, bounds.min, bounds.max);
    result.corrected = result.record.priority != record.priority;
    return result;
}

std::vector<CompetencyRecord> rank_competencies(std::vector<CompetencyRecord> records) {
    std::stable_sort(records.begin(), records.end(),
                     [](const CompetencyRecord& a, const CompetencyRecord& b) {
                         return rank_key(a) < rank_key(b);
                     });
    return records;
}

bool is_ranked(std::span<const CompetencyRecord> records) {
    for (std::size_t i = 1; i < records.size(); ++i) {
        if (rank_key(records[i]) < rank_key(records[i - 1])) return false;
    }
    return true;
}

}  // namespace reqcomp::rules
