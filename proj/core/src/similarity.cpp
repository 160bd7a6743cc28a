#include "reqcomp/similarity.hpp"

#include <cmath>

#include "reqcomp/errors.hpp"

namespace reqcomp::sim {

void SimilarityConfig::validate() const {
    if (w_label < 0.0 || w_def < 0.0) {
        throw ValidationError("similarity weights must be non-negative");
    }
    if (std::abs(w_label + w_def - 1.0) > 1e-9) {
        throw ValidationError("similarity weights must sum to 1");
    }
    if (threshold < 0.0 || threshold > 1.0) {
        throw ValidationError("similarity threshold must be in [0, 1]");
    }
}

SimilarityEngine::SimilarityEngine(std::shared_ptr<EmbeddingService> embeddings,
                                   SimilarityConfig config)
    : embeddings_(std::move(embeddings)), config_(config) {
    if (!embeddings_) throw ConfigError("similarity engine requires an embedding service");
    config_.validate();
}

double SimilarityEngine::pc_similarity(const CompetencyRecord& a,
                                       const CompetencyRecord& b) const {
    return pc_similarity_parts(a, b).combined;
}

SimilarityParts SimilarityEngine::pc_similarity_parts(const CompetencyRecord& a,
                                                      const CompetencyRecord& b) const {
    SimilarityParts parts;
    parts.label_cos = cosine(embeddings_->embed(a.label), embeddings_->embed(b.label));
    parts.def_cos = cosine(embeddings_->embed(a.definition), embeddings_->embed(b.definition));
    parts.combined = config_.w_label * parts.label_cos + config_.w_def * parts.def_cos;
    return parts;
}

double SimilarityEngine::text_similarity(const std::string& a, const std::string& b) const {
    return cosine(embeddings_->embed(a), embeddings_->embed(b));
}

std::optional<ExampleSelection> SimilarityEngine::select_example(
    const Requisition& req, const std::vector<FewShotExample>& library, double tau) const {
    if (library.empty()) return std::nullopt;

    EmbeddingVector query = embeddings_->embed(req.section(SectionKind::JD));
    std::optional<ExampleSelection> best;
    for (std::size_t i = 0; i < library.size(); ++i) {
        double score = cosine(query, embeddings_->embed(library[i].req.section(SectionKind::JD)));
        if (!best || score > best->score ||
            (score == best->score && library[i].req.req_id < library[best->index].req.req_id)) {
            best = ExampleSelection{i, score};
        }
    }
    if (best && best->score > tau) return best;
    return std::nullopt;
}

std::optional<ExampleSelection> SimilarityEngine::select_example(
    const Requisition& req, const std::vector<FewShotExample>& library) const {
    return select_example(req, library, config_.threshold);
}

}  // namespace reqcomp::sim
