// The structured wire format models are instructed to emit: fenced,
// field-tagged blocks that parse losslessly into domain records. Parsing is
// strict; a malformed response raises rather than yielding partial results.
//
// Competency output:
//     ```pc
//     label: Vendor Management
//     definition: ...
//     category: other_functional
//     priority: 6
//     justification: ...
//     in_bq: 0
//     in_pq: 1
//     jd_count: 2
//     ```
// An empty result must state the literal marker NO_REQ_SPECIFIC_PCS.
// Newlines and backslashes inside values are escaped as \n and \\.
#pragma once

#include <string>
#include <vector>

#include "reqcomp/llm.hpp"
#include "reqcomp/model.hpp"

namespace reqcomp::wire {

inline constexpr const char* kNoPcsMarker = "NO_REQ_SPECIFIC_PCS";

std::string serialize_competency_output(const std::vector<CompetencyRecord>& records);
std::vector<CompetencyRecord> parse_competency_output(const std::string& text);

// ```eval blocks: one per PC, a label line plus pass/fail per dimension.
std::string serialize_verdicts(const std::vector<llm::PcVerdicts>& verdicts);
std::vector<llm::PcVerdicts> parse_verdicts(const std::string& text);

// ```suggestion blocks: label, dimension, suggestion.
std::string serialize_suggestions(const std::vector<llm::ImprovementSuggestion>& suggestions);
std::vector<llm::ImprovementSuggestion> parse_suggestions(const std::string& text);

// ```label block carrying exactly one refined label.
std::string serialize_refined_label(const std::string& label);
std::string parse_refined_label(const std::string& text);

}  // namespace reqcomp::wire
