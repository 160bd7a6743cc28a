// Shared helpers for the test binaries: fixture paths, record builders, a
// scratch directory, and a log capture hook.
#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <string>
#include <vector>

#include "reqcomp/log.hpp"
#include "reqcomp/model.hpp"

namespace testsupport {

inline std::filesystem::path data_path(const std::string& name) {
    return std::filesystem::path(REQCOMP_TEST_DATA_DIR) / name;
}

inline reqcomp::CompetencyRecord make_record(std::string label, std::string definition,
                                             reqcomp::Category category, int priority,
                                             bool in_bq = false, bool in_pq = false,
                                             int jd_count = 0) {
    reqcomp::CompetencyRecord record;
    record.label = std::move(label);
    record.definition = std::move(definition);
    record.category = category;
    record.priority = priority;
    record.justification = "stated in the requisition";
    record.mentions = {in_bq, in_pq, jd_count};
    return record;
}

inline reqcomp::Requisition make_req(std::string req_id, std::string job_category,
                                     std::string bq = "basic qualifications text",
                                     std::string pq = "preferred qualifications text",
                                     std::string jd = "job description text") {
    reqcomp::Requisition req;
    req.req_id = std::move(req_id);
    req.job_category = std::move(job_category);
    req.external_title = req.job_category + " role";
    req.department = "operations";
    req.sections[reqcomp::SectionKind::BQ] = std::move(bq);
    req.sections[reqcomp::SectionKind::PQ] = std::move(pq);
    req.sections[reqcomp::SectionKind::JD] = std::move(jd);
    return req;
}

// Unique writable directory, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<unsigned> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("reqcomp-test-" + std::to_string(::getpid()) + "-" +
                 std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

// Collects log lines while alive; restores the previous sink after.
class CaptureLog {
public:
    CaptureLog() {
        previous_ = reqcomp::set_log_sink(
            [this](reqcomp::LogLevel level, const std::string& message) {
                lines_.push_back({level, message});
            });
    }
    ~CaptureLog() { reqcomp::set_log_sink(previous_); }
    CaptureLog(const CaptureLog&) = delete;
    CaptureLog& operator=(const CaptureLog&) = delete;

    struct Line {
        reqcomp::LogLevel level;
        std::string message;
    };

    const std::vector<Line>& lines() const { return lines_; }

    bool contains(const std::string& needle) const {
        for (const Line& line : lines_) {
            if (line.message.find(needle) != std::string::npos) return true;
        }
        return false;
    }

    std::size_t count_warnings() const {
        std::size_t n = 0;
        for (const Line& line : lines_) {
            if (line.level == reqcomp::LogLevel::Warn) ++n;
        }
        return n;
    }

private:
    reqcomp::LogSink previous_;
    std::vector<Line> lines_;
};

}  // namespace testsupport
