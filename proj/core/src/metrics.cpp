#include "reqcomp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "reqcomp/errors.hpp"
#include "reqcomp/log.hpp"

namespace reqcomp::metrics {

namespace {

double category_value(Category category) {
    return category == Category::DomainTeamSpecific ? 1.0 : 0.0;
}

void check_matching_fits(const MatchedPairSet& matching, const LabelSet& model,
                         const LabelSet& truth) {
    for (const MatchedPair& pair : matching.pairs) {
        if (pair.model_index >= model.records.size() ||
            pair.truth_index >= truth.records.size()) {
            throw ValidationError("matching indices do not fit the label sets");
        }
    }
}

std::optional<double> mean_of_defined(const std::vector<double>& values) {
    if (values.empty()) return std::nullopt;
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

struct PerReqAlignment {
    double ra = 0.0;
    double ra_norm = 0.0;
    std::optional<double> pa;
    std::optional<double> ca;
};

PerReqAlignment per_req_alignment(const ReqEval& req, const MetricConfig& cfg) {
    AlignedIds ids = aligned_ids(req.matching, req.model.records.size(), req.truth.records.size());
    PerReqAlignment out;
    out.ra = ranking_alignment(ids.model, ids.truth, cfg.persistence, RaMode::AsWritten);
    out.ra_norm = ranking_alignment(ids.model, ids.truth, cfg.persistence, RaMode::Normalized);
    out.pa = priority_alignment(req.matching, req.model, req.truth, cfg);
    out.ca = category_alignment(req.matching, req.model, req.truth, cfg);
    return out;
}

}  // namespace

void MetricConfig::validate() const {
    if (persistence <= 0.0 || persistence >= 1.0) {
        throw ValidationError("persistence must be in (0, 1)");
    }
    if (scale_range <= 0.0) throw ValidationError("scale_range must be positive");
    if (match_threshold < 0.0 || match_threshold > 1.0) {
        throw ValidationError("match_threshold must be in [0, 1]");
    }
    if (top1_min_priority < kPriorityMin || top1_min_priority > kPriorityMax) {
        throw ValidationError("top1_min_priority must be in [1, 10]");
    }
    if (sme_acceptance_level < 1 || sme_acceptance_level > 3) {
        throw ValidationError("sme_acceptance_level must be in [1, 3]");
    }
}

AlignedIds aligned_ids(const MatchedPairSet& matching, std::size_t model_count,
                       std::size_t truth_count) {
    AlignedIds ids;
    ids.model.assign(model_count, "");
    ids.truth.assign(truth_count, "");
    for (std::size_t k = 0; k < matching.pairs.size(); ++k) {
        const MatchedPair& pair = matching.pairs[k];
        if (pair.model_index >= model_count || pair.truth_index >= truth_count) {
            throw ValidationError("matching indices do not fit the given counts");
        }
        std::string id = "m" + std::to_string(k);
        ids.model[pair.model_index] = id;
        ids.truth[pair.truth_index] = id;
    }
    for (std::size_t i = 0; i < model_count; ++i) {
        if (ids.model[i].empty()) ids.model[i] = "um" + std::to_string(i);
    }
    for (std::size_t i = 0; i < truth_count; ++i) {
        if (ids.truth[i].empty()) ids.truth[i] = "ut" + std::to_string(i);
    }
    return ids;
}

double ranking_alignment(const std::vector<std::string>& model_ids,
                         const std::vector<std::string>& truth_ids, double p, RaMode mode) {
    if (p <= 0.0 || p >= 1.0) throw ValidationError("persistence must be in (0, 1)");
    std::unordered_set<std::string> m_seen(model_ids.begin(), model_ids.end());
    std::unordered_set<std::string> t_seen(truth_ids.begin(), truth_ids.end());
    if (m_seen.size() != model_ids.size() || t_seen.size() != truth_ids.size()) {
        throw ValidationError("ranking_alignment ids must be unique within each list");
    }
    if (model_ids.empty() && truth_ids.empty()) return 1.0;

    std::size_t depth = std::max(model_ids.size(), truth_ids.size());
    std::unordered_set<std::string> m_prefix;
    std::unordered_set<std::string> t_prefix;
    std::size_t common = 0;
    double weight = 1.0;  // p^(k-1)
    double sum = 0.0;
    for (std::size_t k = 1; k <= depth; ++k) {
        if (k <= model_ids.size()) {
            const std::string& id = model_ids[k - 1];
            if (t_prefix.count(id)) ++common;
            m_prefix.insert(id);
        }
        if (k <= truth_ids.size()) {
            const std::string& id = truth_ids[k - 1];
            if (m_prefix.count(id)) ++common;
            t_prefix.insert(id);
        }
        sum += weight * static_cast<double>(common) / static_cast<double>(k);
        weight *= p;
    }
    double ra = (1.0 - p) * sum;
    if (mode == RaMode::Normalized) {
        ra /= 1.0 - std::pow(p, static_cast<double>(depth));
    }
    return ra;
}

std::optional<double> priority_alignment(const MatchedPairSet& matching, const LabelSet& model,
                                         const LabelSet& truth, const MetricConfig& cfg) {
    if (matching.pairs.empty()) return std::nullopt;
    check_matching_fits(matching, model, truth);
    double err = 0.0;
    for (const MatchedPair& pair : matching.pairs) {
        err += std::abs(static_cast<double>(model.records[pair.model_index].priority) -
                        static_cast<double>(truth.records[pair.truth_index].priority));
    }
    return 1.0 - err / static_cast<double>(matching.pairs.size()) / cfg.scale_range;
}

std::optional<double> category_alignment(const MatchedPairSet& matching, const LabelSet& model,
                                         const LabelSet& truth, const MetricConfig&) {
    if (matching.pairs.empty()) return std::nullopt;
    check_matching_fits(matching, model, truth);
    double err = 0.0;
    for (const MatchedPair& pair : matching.pairs) {
        err += std::abs(category_value(model.records[pair.model_index].category) -
                        category_value(truth.records[pair.truth_index].category));
    }
    return 1.0 - err / static_cast<double>(matching.pairs.size());
}

ReqEval evaluate_req(const LabelSet& model, const LabelSet& truth,
                     const sim::SimilarityEngine& engine, const MetricConfig& cfg) {
    ReqEval out;
    out.model = model;
    out.truth = truth;
    out.matching = match_pcs(model, truth, engine, cfg.match_threshold);
    return out;
}

std::optional<double> topk_precision(const std::vector<ReqEval>& reqs, int k,
                                     const MetricConfig& cfg) {
    if (k < 1) throw ValidationError("topk_precision needs k >= 1");
    std::size_t denom = 0;
    std::size_t hits = 0;
    for (const ReqEval& req : reqs) {
        bool condition = false;
        if (!req.model.records.empty()) {
            const CompetencyRecord& top = req.model.records.front();
            condition = top.category == Category::DomainTeamSpecific &&
                        top.priority >= cfg.top1_min_priority;
        }
        if (!condition) {
            if (cfg.denominator_mode == DenominatorMode::CountAsMiss) ++denom;
            continue;
        }
        ++denom;
        for (const MatchedPair& pair : req.matching.pairs) {
            if (pair.model_index == 0) {
                if (pair.truth_index < static_cast<std::size_t>(k)) ++hits;
                break;
            }
        }
    }
    if (denom == 0) return std::nullopt;
    return static_cast<double>(hits) / static_cast<double>(denom);
}

MetricValues compute_metrics(const std::vector<ReqEval>& reqs, const MetricConfig& cfg) {
    cfg.validate();
    MetricValues out;
    out.top1 = topk_precision(reqs, 1, cfg);
    out.top2 = topk_precision(reqs, 2, cfg);
    out.top3 = topk_precision(reqs, 3, cfg);

    std::vector<double> ra, ra_norm, pa, ca;
    for (const ReqEval& req : reqs) {
        PerReqAlignment a = per_req_alignment(req, cfg);
        ra.push_back(a.ra);
        ra_norm.push_back(a.ra_norm);
        if (a.pa) pa.push_back(*a.pa);
        if (a.ca) ca.push_back(*a.ca);
    }
    out.ra = mean_of_defined(ra);
    out.ra_norm = mean_of_defined(ra_norm);
    out.pa = mean_of_defined(pa);
    out.ca = mean_of_defined(ca);
    return out;
}

IrrResult compute_irr(const std::vector<std::vector<LabelSet>>& rater_sets_per_req,
                      const sim::SimilarityEngine& engine, const MetricConfig& cfg) {
    cfg.validate();
    IrrResult out;
    std::vector<double> top1, ra, ra_norm, pa, ca;
    for (const std::vector<LabelSet>& raters : rater_sets_per_req) {
        if (raters.size() < 2) {
            std::string req_id = raters.empty() ? std::string("?") : raters.front().req_id;
            log(LogLevel::Warn, "req " + req_id + " has fewer than 2 raters; excluded from IRR");
            continue;
        }
        ++out.reqs_used;
        for (std::size_t a = 0; a < raters.size(); ++a) {
            for (std::size_t b = 0; b < raters.size(); ++b) {
                if (a == b) continue;
                ReqEval req = evaluate_req(raters[a], raters[b], engine, cfg);
                ++out.samples;
                std::vector<ReqEval> one;
                one.push_back(req);
                if (auto t1 = topk_precision(one, 1, cfg)) top1.push_back(*t1);
                PerReqAlignment align = per_req_alignment(req, cfg);
                ra.push_back(align.ra);
                ra_norm.push_back(align.ra_norm);
                if (align.pa) pa.push_back(*align.pa);
                if (align.ca) ca.push_back(*align.ca);
            }
        }
    }
    out.top1 = mean_of_defined(top1);
    out.ra = mean_of_defined(ra);
    out.ra_norm = mean_of_defined(ra_norm);
    out.pa = mean_of_defined(pa);
    out.ca = mean_of_defined(ca);
    return out;
}

OosRates out_of_scope_rates(const std::vector<LabelSet>& model_sets,
                            const std::vector<SmeRatingSheet>& sheets, const MetricConfig& cfg) {
    std::unordered_map<std::string, const SmeRatingSheet*> by_req;
    for (const SmeRatingSheet& sheet : sheets) by_req[sheet.req_id] = &sheet;

    OosRates out;
    for (const LabelSet& set : model_sets) {
        auto sheet_it = by_req.find(set.req_id);
        const SmeRatingSheet* sheet = sheet_it == by_req.end() ? nullptr : sheet_it->second;
        if (sheet == nullptr && !set.records.empty()) {
            log(LogLevel::Warn, "req " + set.req_id + " has no rating sheet; its PCs are unrated");
        }
        for (std::size_t i = 0; i < set.records.size(); ++i) {
            const CompetencyRecord& pc = set.records[i];
            const PcRating* rating = nullptr;
            if (sheet != nullptr) {
                for (const PcRating& r : sheet->pc_ratings) {
                    if (r.label == pc.label) {
                        rating = &r;
                        break;
                    }
                }
            }
            if (rating == nullptr) {
                if (sheet != nullptr) {
                    log(LogLevel::Warn, "req " + set.req_id + ": PC '" + pc.label +
                                            "' is unrated; excluded from out-of-scope rates");
                }
                continue;
            }
            ++out.rated_pcs;
            bool defect = pc.priority >= cfg.top1_min_priority && rating->out_of_scope;
            if (defect) ++out.defect_pcs;
            if (i == 0) {
                ++out.top1_reqs;
                if (defect) ++out.top1_defects;
            }
        }
    }
    if (out.rated_pcs > 0) {
        out.overall = static_cast<double>(out.defect_pcs) / static_cast<double>(out.rated_pcs);
    }
    if (out.top1_reqs > 0) {
        out.top1 = static_cast<double>(out.top1_defects) / static_cast<double>(out.top1_reqs);
    }
    return out;
}

SmeRatingSummary sme_rating_summary(const std::vector<SmeRatingSheet>& sheets,
                                    int acceptance_level) {
    if (acceptance_level < 1 || acceptance_level > 3) {
        throw ValidationError("acceptance_level must be in [1, 3]");
    }
    SmeRatingSummary out;
    std::size_t in_scope = 0, granularity = 0, categorization = 0, justification = 0;
    std::size_t overlap_free = 0, top1_ok = 0;
    for (const SmeRatingSheet& sheet : sheets) {
        ++out.sheets;
        if (sheet.overlap_free) ++overlap_free;
        if (sheet.top1_appropriateness >= acceptance_level) ++top1_ok;
        for (const PcRating& r : sheet.pc_ratings) {
            ++out.rated_pcs;
            if (!r.out_of_scope) ++in_scope;
            if (r.granularity == Granularity::JustRight) ++granularity;
            if (r.categorization_correct) ++categorization;
            if (r.justification_ok) ++justification;
        }
    }
    if (out.rated_pcs > 0) {
        double n = static_cast<double>(out.rated_pcs);
        out.in_scope = static_cast<double>(in_scope) / n;
        out.granularity = static_cast<double>(granularity) / n;
        out.categorization = static_cast<double>(categorization) / n;
        out.justification = static_cast<double>(justification) / n;
    }
    if (out.sheets > 0) {
        double n = static_cast<double>(out.sheets);
        out.overlap_free = static_cast<double>(overlap_free) / n;
        out.top1 = static_cast<double>(top1_ok) / n;
    }
    return out;
}

}  // namespace reqcomp::metrics
