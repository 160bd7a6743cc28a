// Weighted PC-to-PC similarity and dynamic few-shot example selection.
#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "reqcomp/embedding.hpp"
#include "reqcomp/model.hpp"

namespace reqcomp::sim {

struct SimilarityConfig {
    double w_label = 0.3;
    double w_def = 0.7;
    double threshold = 0.5;

    void validate() const;

    bool operator==(const SimilarityConfig&) const = default;
};

// A train-split requisition together with its consensus competencies, used
// as the candidate pool for dynamic few-shot prompting.
struct FewShotExample {
    Requisition req;
    std::vector<CompetencyRecord> records;

    bool operator==(const FewShotExample&) const = default;
};

struct ExampleSelection {
    std::size_t index = 0;  // into the library passed to select_example
    double score = 0.0;
};

// The label/definition cosines behind a combined score, needed where the
// two parts gate different actions (definition validation).
struct SimilarityParts {
    double label_cos = 0.0;
    double def_cos = 0.0;
    double combined = 0.0;
};

class SimilarityEngine {
public:
    SimilarityEngine(std::shared_ptr<EmbeddingService> embeddings, SimilarityConfig config);

    // w_label * cos(label embeddings) + w_def * cos(definition embeddings).
    double pc_similarity(const CompetencyRecord& a, const CompetencyRecord& b) const;
    SimilarityParts pc_similarity_parts(const CompetencyRecord& a,
                                        const CompetencyRecord& b) const;

    double text_similarity(const std::string& a, const std::string& b) const;

    // Argmax over embed(req.JD) vs embed(example JD); an example is returned
    // only when its score strictly exceeds tau, otherwise the caller runs
    // zero-shot. Ties resolve to the smallest example req_id.
    std::optional<ExampleSelection> select_example(const Requisition& req,
                                                   const std::vector<FewShotExample>& library,
                                                   double tau) const;
    std::optional<ExampleSelection> select_example(const Requisition& req,
                                                   const std::vector<FewShotExample>& library) const;

    const SimilarityConfig& config() const { return config_; }
    EmbeddingService& embeddings() const { return *embeddings_; }

private:
    std::shared_ptr<EmbeddingService> embeddings_;
    SimilarityConfig config_;
};

}  // namespace reqcomp::sim
