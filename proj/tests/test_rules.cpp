#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "reqcomp/rules.hpp"
#include "reqcomp/util.hpp"
#include "support.hpp"
#include "truth_table.hpp"

using namespace reqcomp;
using testsupport::make_record;

TEST_CASE("priority bounds match the hand-written table") {
    const auto table =
        testsupport::load_truth_table(testsupport::data_path("rules/priority_bounds.jsonl").string());
    REQUIRE(table.size() == 24);
    for (const auto& row : table) {
        CAPTURE(row.in_bq);
        CAPTURE(row.in_pq);
        CAPTURE(row.jd_count);
        CAPTURE(category_name(row.category));
        MentionEvidence mentions{row.in_bq, row.in_pq, row.jd_count};
        rules::PriorityBounds bounds = rules::priority_bounds(mentions, row.category);
        CHECK(bounds.min == row.expected_min);
        CHECK(bounds.max == row.expected_max);
        CHECK(bounds.conflict == row.expected_conflict);
    }
}

TEST_CASE("jd_count beyond 2 behaves like 2") {
    for (int jd : {2, 3, 17}) {
        MentionEvidence mentions{true, true, jd};
        CHECK(rules::priority_bounds(mentions, Category::OtherFunctional).min == 8);
        CHECK(rules::priority_bounds(mentions, Category::DomainTeamSpecific).min == 8);
    }
}

TEST_CASE("enforce_priority clamps into bounds and reports") {
    // BQ-only Other Functional: cap 6.
    auto record = make_record("Reporting", "Status reporting", Category::OtherFunctional, 9, true);
    auto result = rules::enforce_priority(record);
    CHECK(result.record.priority == 6);
    CHECK(result.corrected);
    CHECK(!result.conflict);

    // In-bounds value passes through untouched.
    record.priority = 4;
    result = rules::enforce_priority(record);
    CHECK(result.record.priority == 4);
    CHECK(!result.corrected);

    // Domain/Team-Specific floor lifts a low priority.
    auto dts = make_record("Warehouse Automation", "Automated storage",
                           Category::DomainTeamSpecific, 3, false, false, 1);
    result = rules::enforce_priority(dts);
    CHECK(result.record.priority == 7);
    CHECK(result.corrected);
    CHECK(!result.conflict);

    // The PQ-only conflict keeps the category floor and flags it.
    auto conflicted = make_record("Mentoring", "Coaching juniors", Category::DomainTeamSpecific, 2,
                                  false, true, 0);
    result = rules::enforce_priority(conflicted);
    CHECK(result.record.priority == 7);
    CHECK(result.conflict);
}

TEST_CASE("enforced priority always satisfies its own bounds") {
    Rng rng(2024);
    for (int i = 0; i < 2000; ++i) {
        MentionEvidence mentions{rng.below(2) == 1, rng.below(2) == 1,
                                 static_cast<int>(rng.below(4))};
        Category category =
            rng.below(2) == 1 ? Category::DomainTeamSpecific : Category::OtherFunctional;
        auto record = make_record("Skill", "Some definition", category,
                                  static_cast<int>(rng.below(10)) + 1, mentions.in_bq,
                                  mentions.in_pq, mentions.jd_count);
        auto result = rules::enforce_priority(record);
        auto bounds = rules::priority_bounds(mentions, category);
        CHECK(bounds.contains(result.record.priority));
        CHECK(result.record.priority >= kPriorityMin);
        CHECK(result.record.priority <= kPriorityMax);
        // Enforcement is idempotent.
        auto again = rules::enforce_priority(result.record);
        CHECK(again.record.priority == result.record.priority);
        CHECK(!again.corrected);
        // Everything but the priority is preserved.
        CHECK(result.record.label == record.label);
        CHECK(result.record.mentions == record.mentions);
    }
}

TEST_CASE("ranking puts the domain block first, then descending priority") {
    std::vector<CompetencyRecord> records = {
        make_record("C", "Def c", Category::OtherFunctional, 9),
        make_record("A", "Def a", Category::DomainTeamSpecific, 7),
        make_record("D", "Def d", Category::OtherFunctional, 3),
        make_record("B", "Def b", Category::DomainTeamSpecific, 8),
    };
    auto ranked = rules::rank_competencies(records);
    REQUIRE(ranked.size() == 4);
    CHECK(ranked[0].label == "B");
    CHECK(ranked[1].label == "A");
    CHECK(ranked[2].label == "C");
    CHECK(ranked[3].label == "D");
    CHECK(rules::is_ranked(ranked));
    CHECK(!rules::is_ranked(records));
}

TEST_CASE("ranking is stable for ties") {
    std::vector<CompetencyRecord> records = {
        make_record("First", "Def 1", Category::OtherFunctional, 5),
        make_record("Second", "Def 2", Category::OtherFunctional, 5),
        make_record("Third", "Def 3", Category::OtherFunctional, 5),
    };
    auto ranked = rules::rank_competencies(records);
    CHECK(ranked[0].label == "First");
    CHECK(ranked[1].label == "Second");
    CHECK(ranked[2].label == "Third");
}

TEST_CASE("ranking properties on random inputs") {
    Rng rng(77);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<CompetencyRecord> records;
        std::size_t n = rng.below(8);
        for (std::size_t i = 0; i < n; ++i) {
            records.push_back(make_record(
                "Skill " + std::to_string(i), "Definition " + std::to_string(i),
                rng.below(2) == 1 ? Category::DomainTeamSpecific : Category::OtherFunctional,
                static_cast<int>(rng.below(10)) + 1));
        }
        auto ranked = rules::rank_competencies(records);
        CHECK(ranked.size() == records.size());
        CHECK(rules::is_ranked(ranked));
        // Same multiset of labels.
        std::vector<std::string> before, after;
        for (const auto& r : records) before.push_back(r.label);
        for (const auto& r : ranked) after.push_back(r.label);
        std::sort(before.begin(), before.end());
        std::sort(after.begin(), after.end());
        CHECK(before == after);
        // Idempotent.
        CHECK(rules::rank_competencies(ranked) == ranked);
    }
}
