// File persistence: line-delimited JSON, one object per line, each line
// carrying a schema_version field. Loading validates every invariant and is
// deterministic and order-preserving; a bad record reports its line number.
#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "reqcomp/model.hpp"

namespace reqcomp::io {

std::vector<Requisition> load_requisitions(const std::filesystem::path& path);
std::vector<LabelSet> load_label_sets(const std::filesystem::path& path);
ReferenceLibrary load_library(const std::filesystem::path& path);
std::vector<SmeRatingSheet> load_rating_sheets(const std::filesystem::path& path);

void save_requisitions(std::span<const Requisition> reqs, const std::filesystem::path& path);
void save_label_set(const LabelSet& set, const std::filesystem::path& path);
void save_label_sets(std::span<const LabelSet> sets, const std::filesystem::path& path);
void save_library(const ReferenceLibrary& library, const std::filesystem::path& path);
void save_rating_sheets(std::span<const SmeRatingSheet> sheets, const std::filesystem::path& path);

struct DatasetPaths {
    std::filesystem::path requisitions;
    std::filesystem::path labels;
    std::filesystem::path library;  // optional: empty path skips
    std::filesystem::path ratings;  // optional: empty path skips
};

// Loads and cross-validates a full bundle (no split assigned yet).
DatasetBundle load_bundle(const DatasetPaths& paths);

// Serialize one label set to its single-line form (no trailing newline).
std::string label_set_to_line(const LabelSet& set);

}  // namespace reqcomp::io
