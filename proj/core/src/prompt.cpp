#include "reqcomp/prompt.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "reqcomp/errors.hpp"
#include "reqcomp/wire.hpp"

namespace reqcomp::llm {

namespace {

constexpr const char* kPrimaryTemplate =
    R"(You identify requisition-specific personal competencies (PCs) from job postings.

A personal competency is a knowledge, skill, or ability that drives success in the role. Output only competencies specific to this requisition, beyond the standardized set already covered for its job category.

Label guidelines: two to five words, title case, concrete; use acronyms only when the posting uses them.
Definition guidelines: one or two sentences describing observable behavior; never a circular restatement of the label.
Category definitions: domain_team_specific means the competency reflects the hiring team's focal domain, product area, or technology stack; other_functional covers cross-team functional strengths.
Granularity guidelines: each competency must be narrow enough to assess in a single interview and broad enough to matter across the role; never merge unrelated skills.
Justification guidelines: quote or closely paraphrase the requisition language that evidences the competency.

Priority (1-10) must respect the evidence rules:
- appears only in the preferred qualifications: at most 4
- appears only in the basic qualifications: at most 6
- in the basic qualifications and the job description: at least 6
- in the basic and preferred qualifications and the job description: at least 7
- in the basic and preferred qualifications and mentioned multiple times in the job description: at least 8
- domain_team_specific competencies: at least 7, even on job-description evidence alone

Out-of-scope: never output a competency that matches the excluded list in the request; those are covered elsewhere.

Report evidence honestly: in_bq and in_pq are 0 or 1; jd_count counts distinct mentions in the job description.

Output at most {{max_pcs}} competencies, domain_team_specific first, then descending priority. Emit each as a fenced block:
```pc
label: ...
definition: ...
category: domain_team_specific or other_functional
priority: 1-10
justification: ...
in_bq: 0 or 1
in_pq: 0 or 1
jd_count: 0 or more
```
Escape newlines inside values as \n and backslashes as \\. If the requisition needs no specific competencies, output exactly NO_REQ_SPECIFIC_PCS.
---
Requisition {{req_id}} ({{job_category}}): {{title}}
Department: {{department}}

BASIC QUALIFICATIONS:
{{bq}}

PREFERRED QUALIFICATIONS:
{{pq}}

JOB DESCRIPTION:
{{jd}}

EXCLUDED COMPETENCIES (out of scope):
{{exclusions}}
{{example}})";

constexpr const char* kEvaluateTemplate =
    R"(You audit candidate personal competencies generated for a requisition. Judge every candidate on six dimensions, answering pass or fail for each:
- out_of_scope: fail when the competency duplicates the excluded list or the standardized set for the job category
- granularity: fail when the competency is too broad or too granular to assess
- categorization: fail when the category is wrong
- justification: fail when the justification does not cite requisition evidence
- overlap: fail when the competency overlaps another candidate in this list
- definition: fail when the definition breaks the definition guidelines (observable behavior, no circular restatement)

Emit one block per candidate, in input order:
```eval
label: ...
out_of_scope: pass or fail
granularity: pass or fail
categorization: pass or fail
justification: pass or fail
overlap: pass or fail
definition: pass or fail
```
---
Requisition {{req_id}} ({{job_category}}): {{title}}

JOB DESCRIPTION:
{{jd}}

EXCLUDED COMPETENCIES:
{{exclusions}}

CANDIDATES:
{{candidates}})";

constexpr const char* kSuggestTemplate =
    R"(You write improvement suggestions for flagged competency issues. For every failed dimension in the verdicts, emit exactly one block with a specific, actionable suggestion:
```suggestion
label: ...
dimension: ...
suggestion: ...
```
Do not emit blocks for passing dimensions.
---
Requisition {{req_id}} ({{job_category}}): {{title}}

CANDIDATES:
{{candidates}}

VERDICTS:
{{verdicts}})";

constexpr const char* kRegenerateTemplate =
    R"(You revise candidate personal competencies using improvement suggestions. Rewrite only the competencies named in the suggestions and only along the flagged dimensions; reproduce every other competency unchanged. Keep evidence fields truthful. Emit the full revised list in the same order using the pc block format:
```pc
label: ...
definition: ...
category: domain_team_specific or other_functional
priority: 1-10
justification: ...
in_bq: 0 or 1
in_pq: 0 or 1
jd_count: 0 or more
```
Escape newlines inside values as \n and backslashes as \\.
---
Requisition {{req_id}} ({{job_category}}): {{title}}

JOB DESCRIPTION:
{{jd}}

CANDIDATES:
{{candidates}}

SUGGESTIONS:
{{suggestions}})";

constexpr const char* kRefineLabelTemplate =
    R"(A generated competency's label is too close to a standardized library competency that means something different. Propose a new label that keeps the generated competency's essence and cannot be confused with the library label. Follow the label guidelines: two to five words, title case, concrete. Emit exactly:
```label
label: ...
```
---
GENERATED COMPETENCY:
label: {{target_label}}
definition: {{target_definition}}

CONFLICTING LIBRARY COMPETENCY:
label: {{conflict_label}}
definition: {{conflict_definition}})";

const char* template_filename(Stage stage) {
    switch (stage) {
        case Stage::Primary: return "primary.txt";
        case Stage::Evaluate: return "evaluate.txt";
        case Stage::Suggest: return "suggest.txt";
        case Stage::Regenerate: return "regenerate.txt";
        case Stage::RefineLabel: return "refine_label.txt";
    }
    return "?";
}

constexpr std::array<Stage, 5> kAllStages = {Stage::Primary, Stage::Evaluate, Stage::Suggest,
                                             Stage::Regenerate, Stage::RefineLabel};

std::string substitute(const std::string& tmpl, const std::map<std::string, std::string>& values) {
    std::string out;
    out.reserve(tmpl.size());
    std::size_t pos = 0;
    while (pos < tmpl.size()) {
        std::size_t open = tmpl.find("{{", pos);
        if (open == std::string::npos) {
            out.append(tmpl, pos, std::string::npos);
            break;
        }
        out.append(tmpl, pos, open - pos);
        std::size_t close = tmpl.find("}}", open + 2);
        if (close == std::string::npos) {
            throw ConfigError("template has an unclosed placeholder at offset " +
                              std::to_string(open));
        }
        std::string key = tmpl.substr(open + 2, close - open - 2);
        auto it = values.find(key);
        if (it == values.end()) {
            throw ConfigError("template placeholder '" + key + "' has no value");
        }
        out += it->second;
        pos = close + 2;
    }
    return out;
}

std::pair<std::string, std::string> split_template(const std::string& text, Stage stage) {
    std::istringstream in(text);
    std::string line;
    std::string system_part;
    std::string user_part;
    bool seen_break = false;
    while (std::getline(in, line)) {
        if (!seen_break && line == "---") {
            seen_break = true;
            continue;
        }
        (seen_break ? user_part : system_part) += line;
        (seen_break ? user_part : system_part) += '\n';
    }
    if (!seen_break) {
        throw ConfigError(std::string("template for stage ") + stage_name(stage) +
                          " has no --- separator");
    }
    if (!system_part.empty() && system_part.back() == '\n') system_part.pop_back();
    if (!user_part.empty() && user_part.back() == '\n') user_part.pop_back();
    return {system_part, user_part};
}

std::string render_exclusions(const ReferenceLibrary& library) {
    if (library.excluded_pcs.empty()) return "(none)";
    std::string out;
    for (const CompetencyRecord& pc : library.excluded_pcs) {
        out += "- " + pc.label + ": " + pc.definition + "\n";
    }
    out.pop_back();
    return out;
}

std::string render_example(const sim::FewShotExample& example) {
    std::string out = "\nEXAMPLE REQUISITION " + example.req.req_id + ": " +
                      example.req.external_title + "\n\nEXAMPLE JOB DESCRIPTION:\n" +
                      example.req.section(SectionKind::JD) +
                      "\n\nDESIRED OUTPUT FOR THE EXAMPLE:\n" +
                      wire::serialize_competency_output(example.records);
    return out;
}

void require_context(bool ok, Stage stage, const char* what) {
    if (!ok) {
        throw ConfigError(std::string(stage_name(stage)) + " prompt requires " + what);
    }
}

}  // namespace

TemplateSet TemplateSet::builtin() {
    TemplateSet set;
    set.version_ = "builtin-1";
    set.templates_[Stage::Primary] = kPrimaryTemplate;
    set.templates_[Stage::Evaluate] = kEvaluateTemplate;
    set.templates_[Stage::Suggest] = kSuggestTemplate;
    set.templates_[Stage::Regenerate] = kRegenerateTemplate;
    set.templates_[Stage::RefineLabel] = kRefineLabelTemplate;
    return set;
}

TemplateSet TemplateSet::load(const std::filesystem::path& dir) {
    std::ifstream manifest_in(dir / "manifest.json");
    if (!manifest_in) {
        throw ConfigError("cannot open template manifest " + (dir / "manifest.json").string());
    }
    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(manifest_in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("template manifest in " + dir.string() + " is not valid JSON: " +
                          e.what());
    }
    if (!manifest.is_object() || manifest.value("schema_version", 0) != 1) {
        throw ConfigError("template manifest in " + dir.string() + " must have schema_version 1");
    }
    if (!manifest.contains("version") || !manifest["version"].is_string() ||
        manifest["version"].get<std::string>().empty()) {
        throw ConfigError("template manifest in " + dir.string() + " missing 'version'");
    }

    TemplateSet set;
    set.version_ = manifest["version"].get<std::string>();
    for (Stage stage : kAllStages) {
        std::filesystem::path path = dir / template_filename(stage);
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open template file " + path.string());
        std::ostringstream buffer;
        buffer << in.rdbuf();
        set.templates_[stage] = buffer.str();
    }
    return set;
}

void TemplateSet::save(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    nlohmann::ordered_json manifest{{"schema_version", 1}, {"version", version_}};
    std::ofstream manifest_out(dir / "manifest.json");
    if (!manifest_out) {
        throw ConfigError("cannot write template manifest under " + dir.string());
    }
    manifest_out << manifest.dump(2) << '\n';
    for (const auto& [stage, text] : templates_) {
        std::ofstream out(dir / template_filename(stage));
        if (!out) {
            throw ConfigError("cannot write template file under " + dir.string());
        }
        out << text;
    }
}

const std::string& TemplateSet::text(Stage stage) const {
    auto it = templates_.find(stage);
    if (it == templates_.end()) {
        throw ConfigError(std::string("no template for stage ") + stage_name(stage));
    }
    return it->second;
}

PromptSpec assemble_prompt(Stage stage, const Requisition& req, const PromptContext& context,
                           const TemplateSet& templates, const PromptOptions& options) {
    switch (stage) {
        case Stage::Primary:
            require_context(context.library != nullptr, stage, "the reference library");
            break;
        case Stage::Evaluate:
            require_context(context.library != nullptr, stage, "the reference library");
            require_context(context.candidates != nullptr && !context.candidates->empty(), stage,
                            "candidate competencies");
            break;
        case Stage::Suggest:
            require_context(context.candidates != nullptr && !context.candidates->empty(), stage,
                            "candidate competencies");
            require_context(context.verdicts != nullptr && !context.verdicts->empty(), stage,
                            "judge verdicts");
            break;
        case Stage::Regenerate:
            require_context(context.candidates != nullptr && !context.candidates->empty(), stage,
                            "candidate competencies");
            require_context(context.suggestions != nullptr && !context.suggestions->empty(),
                            stage, "improvement suggestions");
            break;
        case Stage::RefineLabel:
            require_context(context.refine_target != nullptr, stage, "the competency to relabel");
            require_context(context.library_conflict != nullptr, stage,
                            "the conflicting library competency");
            break;
    }

    std::map<std::string, std::string> values;
    values["req_id"] = req.req_id;
    values["job_category"] = req.job_category;
    values["title"] = req.external_title;
    values["department"] = req.department;
    values["bq"] = req.section(SectionKind::BQ);
    values["pq"] = req.section(SectionKind::PQ);
    values["jd"] = req.section(SectionKind::JD);
    values["max_pcs"] = std::to_string(options.max_pcs);
    if (context.library != nullptr) values["exclusions"] = render_exclusions(*context.library);
    values["example"] = context.example != nullptr ? render_example(*context.example) : "";
    if (context.candidates != nullptr) {
        values["candidates"] = wire::serialize_competency_output(*context.candidates);
    }
    if (context.verdicts != nullptr) {
        values["verdicts"] = wire::serialize_verdicts(*context.verdicts);
    }
    if (context.suggestions != nullptr) {
        values["suggestions"] = wire::serialize_suggestions(*context.suggestions);
    }
    if (context.refine_target != nullptr) {
        values["target_label"] = context.refine_target->label;
        values["target_definition"] = context.refine_target->definition;
    }
    if (context.library_conflict != nullptr) {
        values["conflict_label"] = context.library_conflict->label;
        values["conflict_definition"] = context.library_conflict->definition;
    }

    auto [system_tmpl, user_tmpl] = split_template(templates.text(stage), stage);

    PromptSpec spec;
    spec.stage = stage;
    spec.req_id = req.req_id;
    spec.system_text = substitute(system_tmpl, values);
    spec.user_text = substitute(user_tmpl, values);
    spec.model_id = options.model_id;
    spec.extended_reasoning = options.extended_reasoning;
    spec.max_output = options.max_output;
    spec.temperature = options.temperature;
    return spec;
}

}  // namespace reqcomp::llm
