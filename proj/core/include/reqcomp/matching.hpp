// One-to-one PC matching between a model label set and a reference set:
// pairwise similarities, threshold gate, then an exact max-total-similarity
// assignment.
#pragma once

#include <cstddef>
#include <vector>

#include "reqcomp/model.hpp"
#include "reqcomp/similarity.hpp"

namespace reqcomp::metrics {

struct MatchedPair {
    std::size_t model_index = 0;
    std::size_t truth_index = 0;
    double similarity = 0.0;

    bool operator==(const MatchedPair&) const = default;
};

struct MatchedPairSet {
    std::vector<MatchedPair> pairs;  // sorted by model_index
    std::vector<std::size_t> unmatched_model;
    std::vector<std::size_t> unmatched_truth;

    double total_similarity() const;
};

// Exact solver for the rectangular assignment problem, maximizing total
// weight over one-to-one row/column pairs. Weights may be any finite reals;
// pairs assigned only through zero-padding are reported as unassigned (-1).
double hungarian_max(const std::vector<std::vector<double>>& weight,
                     std::vector<int>& row_to_col);

// Keeps pairs with similarity strictly above tau, then maximizes total
// similarity subject to the one-to-one constraint.
MatchedPairSet match_from_similarity(const std::vector<std::vector<double>>& sim, double tau);

// Pairwise pc_similarity over the two record lists, then match. Both sets
// must belong to the same requisition.
MatchedPairSet match_pcs(const LabelSet& model, const LabelSet& truth,
                         const sim::SimilarityEngine& engine, double tau);

}  // namespace reqcomp::metrics
