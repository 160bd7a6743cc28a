// Versioned prompt templates and deterministic prompt assembly.
//
// A template file holds the system text, a line containing only ---, then
// the user text. Placeholders look like {{name}} and are resolved in a
// single pass; referencing a name with no value is a configuration error.
#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "reqcomp/llm.hpp"
#include "reqcomp/model.hpp"
#include "reqcomp/similarity.hpp"

namespace reqcomp::llm {

class TemplateSet {
public:
    // Compiled-in defaults, version "builtin-1".
    static TemplateSet builtin();

    // Directory layout: manifest.json {schema_version, version} plus one
    // <stage>.txt per stage.
    static TemplateSet load(const std::filesystem::path& dir);
    void save(const std::filesystem::path& dir) const;

    const std::string& text(Stage stage) const;
    const std::string& version() const { return version_; }

    bool operator==(const TemplateSet&) const = default;

private:
    std::string version_;
    std::map<Stage, std::string> templates_;
};

// Everything a stage template may draw on beyond the requisition itself.
// Pointers are non-owning; pass only what the stage needs.
struct PromptContext {
    const sim::FewShotExample* example = nullptr;
    const std::vector<CompetencyRecord>* candidates = nullptr;
    const std::vector<PcVerdicts>* verdicts = nullptr;
    const std::vector<ImprovementSuggestion>* suggestions = nullptr;
    const ReferenceLibrary* library = nullptr;
    const CompetencyRecord* refine_target = nullptr;
    const CompetencyRecord* library_conflict = nullptr;
};

struct PromptOptions {
    std::string model_id = "chat-large";
    bool extended_reasoning = false;
    int max_output = 2000;
    double temperature = 0.0;
    int max_pcs = 5;
};

// Pure text assembly: same stage, req, context, templates, and options
// always produce a byte-identical PromptSpec.
PromptSpec assemble_prompt(Stage stage, const Requisition& req, const PromptContext& context,
                           const TemplateSet& templates, const PromptOptions& options);

}  // namespace reqcomp::llm
