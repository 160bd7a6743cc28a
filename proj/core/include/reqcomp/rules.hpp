// Deterministic priority-bound and ranking rules.
//
// Bounds are the intersection of every applicable evidence rule:
//   PQ only                        -> max 4
//   BQ only                        -> max 6
//   BQ and JD                      -> min 6
//   BQ, PQ and JD                  -> min 7
//   BQ, PQ and JD more than once   -> min 8
//   Domain/Team-Specific category  -> min 7, even when JD-only
//
// When the intersection is empty (e.g. PQ-only Domain/Team-Specific), the
// category minimum wins and the result carries a conflict flag.
#pragma once

#include <span>
#include <vector>

#include "reqcomp/model.hpp"

namespace reqcomp::rules {

struct PriorityBounds {
    int min = kPriorityMin;
    int max = kPriorityMax;
    bool conflict = false;  // evidence rules and category rule disagreed

    bool contains(int priority) const { return priority >= min && priority <= max; }

    bool operator==(const PriorityBounds&) const = default;
};

// Total function; never throws.
PriorityBounds priority_bounds(const MentionEvidence& mentions, Category category);

struct EnforceResult {
    CompetencyRecord record;
    bool corrected = false;  // true iff the priority changed
    bool conflict = false;   // bounds carried the conflict flag
};

// Clamps the record's priority into its bounds. Everything else is untouched.
EnforceResult enforce_priority(const CompetencyRecord& record);

// Stable sort: Domain/Team-Specific block first, then Other Functional;
// descending priority within each block; ties keep input order.
std::vector<CompetencyRecord> rank_competencies(std::vector<CompetencyRecord> records);

// True when the sequence already satisfies the ranking rules.
bool is_ranked(std::span<const CompetencyRecord> records);

}  // namespace reqcomp::rules
