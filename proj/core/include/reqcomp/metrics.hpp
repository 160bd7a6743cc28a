// Evaluation metrics over matched label sets: top-k precision, ranking
// alignment (rank-biased overlap), priority and category alignment,
// inter-rater reliability, out-of-scope rates, and SME rating summaries.
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "reqcomp/matching.hpp"
#include "reqcomp/model.hpp"
#include "reqcomp/similarity.hpp"

namespace reqcomp::metrics {

// What to do with a req whose model top-1 fails the top-1 condition
// (DomainTeamSpecific with priority >= top1_min_priority).
enum class DenominatorMode { CountAsMiss, Exclude };

// The written RBO-style sum tops out at 1 - p^K on finite lists; Normalized
// divides that out so identical lists score 1. Both are reported.
enum class RaMode { AsWritten, Normalized };

struct MetricConfig {
    double persistence = 0.9;     // p in the ranking-alignment sum
    double scale_range = 10.0;    // d, the priority scale width
    double match_threshold = 0.5; // tau for match_pcs
    int top1_min_priority = 6;
    DenominatorMode denominator_mode = DenominatorMode::CountAsMiss;
    int sme_acceptance_level = 2; // top-1 anchor >= this counts as appropriate

    void validate() const;

    bool operator==(const MetricConfig&) const = default;
};

// Post-matching identifier sequences in original rank order: a matched pair
// shares one synthetic id on both sides, an unmatched PC keeps a side-local
// id. Intersection semantics then follow the matching, not label text.
struct AlignedIds {
    std::vector<std::string> model;
    std::vector<std::string> truth;
};

AlignedIds aligned_ids(const MatchedPairSet& matching, std::size_t model_count,
                       std::size_t truth_count);

// (1 - p) * sum_k p^(k-1) * |M_k ∩ S_k| / k up to K = max(|M|,|S|), where
// M_k is the length-k prefix (whole list when shorter). Both lists empty is
// defined as 1.0. Ids must be unique within each list.
double ranking_alignment(const std::vector<std::string>& model_ids,
                         const std::vector<std::string>& truth_ids, double p, RaMode mode);

// 1 - mean(|priority_m - priority_t|) / d over matched pairs. No pairs ->
// absent (never zero).
std::optional<double> priority_alignment(const MatchedPairSet& matching, const LabelSet& model,
                                         const LabelSet& truth, const MetricConfig& cfg);

// 1 - mean(|c_m - c_t|) with c = 1 for DomainTeamSpecific else 0.
std::optional<double> category_alignment(const MatchedPairSet& matching, const LabelSet& model,
                                         const LabelSet& truth, const MetricConfig& cfg);

// One req's model output, reference, and their matching.
struct ReqEval {
    LabelSet model;
    LabelSet truth;
    MatchedPairSet matching;
};

ReqEval evaluate_req(const LabelSet& model, const LabelSet& truth,
                     const sim::SimilarityEngine& engine, const MetricConfig& cfg);

// Fraction of reqs whose model top-1 PC is matched to a truth PC ranked in
// the top k. The top-1 condition and denominator handling follow cfg.
std::optional<double> topk_precision(const std::vector<ReqEval>& reqs, int k,
                                     const MetricConfig& cfg);

// Per-run metric values over one evaluated corpus; alignment metrics are
// uniform means over reqs where defined.
struct MetricValues {
    std::optional<double> top1;
    std::optional<double> top2;
    std::optional<double> top3;
    std::optional<double> ra;       // as-written
    std::optional<double> ra_norm;  // normalized
    std::optional<double> pa;
    std::optional<double> ca;

    bool operator==(const MetricValues&) const = default;
};

MetricValues compute_metrics(const std::vector<ReqEval>& reqs, const MetricConfig& cfg);

// Pairwise inter-rater reliability: every ordered rater pair on every req
// with >= 2 raters contributes one sample per metric; samples average
// uniformly. Reqs with < 2 raters are excluded with a warning.
struct IrrResult {
    std::size_t reqs_used = 0;
    std::size_t samples = 0;
    std::optional<double> top1;
    std::optional<double> ra;
    std::optional<double> ra_norm;
    std::optional<double> pa;
    std::optional<double> ca;

    bool operator==(const IrrResult&) const = default;
};

IrrResult compute_irr(const std::vector<std::vector<LabelSet>>& rater_sets_per_req,
                      const sim::SimilarityEngine& engine, const MetricConfig& cfg);

// Defect accounting against SME ratings: a defect is the joint event
// priority >= top1_min_priority and the SME out-of-scope flag. Unrated PCs
// are excluded with a warning.
struct OosRates {
    std::size_t rated_pcs = 0;
    std::size_t defect_pcs = 0;
    std::size_t top1_reqs = 0;
    std::size_t top1_defects = 0;
    std::optional<double> overall;
    std::optional<double> top1;

    bool operator==(const OosRates&) const = default;
};

OosRates out_of_scope_rates(const std::vector<LabelSet>& model_sets,
                            const std::vector<SmeRatingSheet>& sheets, const MetricConfig& cfg);

// Fractions of positive anchors across rated PCs and sheets.
struct SmeRatingSummary {
    std::size_t sheets = 0;
    std::size_t rated_pcs = 0;
    std::optional<double> in_scope;
    std::optional<double> granularity;
    std::optional<double> categorization;
    std::optional<double> justification;
    std::optional<double> overlap_free;
    std::optional<double> top1;

    bool operator==(const SmeRatingSummary&) const = default;
};

SmeRatingSummary sme_rating_summary(const std::vector<SmeRatingSheet>& sheets,
                                    int acceptance_level);

}  // namespace reqcomp::metrics
