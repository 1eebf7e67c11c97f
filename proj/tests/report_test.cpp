#include <seqdiag/report.hpp>

#include "support/instances.hpp"

#include <gtest/gtest.h>

#include <sstream>

namespace seqdiag {
namespace {

// Published (expert rule, C/P) expected costs, in the printed row order.
std::vector<ComparisonRow> published_rows() {
    const std::vector<std::string> symptoms{"poor-idling", "starts-but-runs-irregularly", "charging-system-fails",
                                            "no-start-no-spark", "no-start-with-spark"};
    const double e1[][2] = {{8, 8}, {24, 17}, {13.5, 13.5}, {17.5, 16.6}, {18.5, 9}};
    const double e2[][2] = {{50, 32}, {43, 36}, {7, 7}, {55, 53}, {26.5, 25.2}};
    std::vector<ComparisonRow> rows;
    for (std::size_t i = 0; i < symptoms.size(); ++i) {
        rows.push_back({symptoms[i], "expert-1", e1[i][0], e1[i][1], reduction_pct(e1[i][0], e1[i][1]), Source::Paper});
        rows.push_back({symptoms[i], "expert-2", e2[i][0], e2[i][1], reduction_pct(e2[i][0], e2[i][1]), Source::Paper});
    }
    return rows;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, sep)) out.push_back(field);
    return out;
}

TEST(ReductionPct, Definition) {
    EXPECT_DOUBLE_EQ(reduction_pct(50, 32), 36.0);
    EXPECT_DOUBLE_EQ(reduction_pct(7, 7), 0.0);
    EXPECT_DOUBLE_EQ(reduction_pct(24, 17), 100.0 * 7.0 / 24.0);
}

TEST(MeanOf, Basics) {
    EXPECT_DOUBLE_EQ(mean_of({16.5, 12.0}), 14.25);
    EXPECT_DOUBLE_EQ(mean_of({3.0}), 3.0);
    EXPECT_EQ(mean_of({}), 0.0);
}

TEST(SummarizeRows, PublishedTableArithmetic) {
    const auto report = summarize_rows(published_rows());
    ASSERT_EQ(report.rows.size(), 10u);
    // Hand-computed from the printed pairs.
    const double e1 = (0.0 + 700.0 / 24 + 0.0 + 90.0 / 17.5 + 950.0 / 18.5) / 5;
    const double e2 = (36.0 + 700.0 / 43 + 0.0 + 200.0 / 55 + 130.0 / 26.5) / 5;
    EXPECT_NEAR(report.expert_average.at("expert-1"), e1, 1e-12);
    EXPECT_NEAR(report.expert_average.at("expert-2"), e2, 1e-12);
    EXPECT_NEAR(report.expert_average.at("expert-1"), 17.1, 0.05);
    EXPECT_NEAR(report.expert_average.at("expert-2"), 12.2, 0.05);
    EXPECT_NEAR(report.overall_average, (e1 + e2) / 2, 1e-12);
}

TEST(SummarizeRows, SortedByExpertThenSymptom) {
    const auto report = summarize_rows(published_rows());
    for (std::size_t i = 1; i < report.rows.size(); ++i) {
        const auto& a = report.rows[i - 1];
        const auto& b = report.rows[i];
        EXPECT_TRUE(std::tie(a.expert, a.symptom_id) < std::tie(b.expert, b.symptom_id));
    }
}

TEST(SummarizeRows, AveragesRecomputableFromRows) {
    const auto report = compare(bundled_dataset());
    std::map<std::string, std::vector<double>> by_expert;
    for (const auto& r : report.rows) by_expert[r.expert].push_back(r.reduction_pct);
    std::vector<double> averages;
    for (const auto& [expert, values] : by_expert) {
        EXPECT_DOUBLE_EQ(report.expert_average.at(expert), mean_of(values));
        averages.push_back(mean_of(values));
    }
    EXPECT_DOUBLE_EQ(report.overall_average, mean_of(averages));
}

TEST(SummarizeRows, Empty) {
    const auto report = summarize_rows({});
    EXPECT_TRUE(report.rows.empty());
    EXPECT_TRUE(report.expert_average.empty());
    EXPECT_EQ(report.overall_average, 0.0);
}

TEST(Compare, BundledPoorIdlingExpertTwo) {
    const auto report = compare(bundled_dataset());
    const ComparisonRow* row = nullptr;
    for (const auto& r : report.rows) {
        if (r.expert == "expert-2" && r.symptom_id == "poor-idling") row = &r;
    }
    ASSERT_NE(row, nullptr);
    EXPECT_NEAR(row->ec_expert, testing::kExpertEc, 1e-12);
    EXPECT_NEAR(row->ec_cp, testing::kCpEc, 1e-12);
    EXPECT_NEAR(row->reduction_pct, 36.5, 0.05);
    EXPECT_EQ(row->source, Source::Paper);
}

TEST(Compare, RuleEqualToCpGivesZeroReduction) {
    const auto report = compare(bundled_dataset());
    for (const auto& r : report.rows) {
        if (r.symptom_id == "charging-system-fails") {
            EXPECT_EQ(r.ec_expert, r.ec_cp);
            EXPECT_EQ(r.reduction_pct, 0.0);
            EXPECT_EQ(r.source, Source::Synthetic);
        }
    }
}

TEST(Compare, CpNeverWorse) {
    for (const auto& r : compare(bundled_dataset()).rows) {
        EXPECT_LE(r.ec_cp, r.ec_expert + 1e-9) << r.expert << " " << r.symptom_id;
        EXPECT_GE(r.reduction_pct, -1e-7);
    }
}

TEST(Render, MarkdownLayout) {
    const std::string md = render(compare(bundled_dataset()), ReportFormat::Markdown);
    EXPECT_NE(md.find("| Symptom | expert-1 rule | expert-1 C/P | expert-2 rule | expert-2 C/P |"), std::string::npos);
    EXPECT_NE(md.find("| poor-idling | 31.6 | 31.6 | 49.7 | 31.6 |"), std::string::npos);
    EXPECT_NE(md.find("| charging-system-fails * |"), std::string::npos);
    EXPECT_NE(md.find("Average reduction (%)"), std::string::npos);
    EXPECT_EQ(md, render(compare(bundled_dataset()), ReportFormat::Markdown));
}

TEST(Render, EmptyReport) {
    const auto empty = summarize_rows({});
    EXPECT_NO_THROW(render(empty, ReportFormat::Markdown));
    EXPECT_EQ(render(empty, ReportFormat::Csv), "expert,symptom,ec_expert,ec_cp,reduction_pct\n");
}

TEST(Render, CsvRoundTrip) {
    const auto report = compare(bundled_dataset());
    std::istringstream in(render(report, ReportFormat::Csv));
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "expert,symptom,ec_expert,ec_cp,reduction_pct");
    std::size_t i = 0;
    while (std::getline(in, line)) {
        const auto f = split(line, ',');
        ASSERT_EQ(f.size(), 5u) << line;
        ASSERT_LT(i, report.rows.size());
        const auto& r = report.rows[i++];
        EXPECT_EQ(f[0], r.expert);
        EXPECT_EQ(f[1], r.symptom_id);
        EXPECT_EQ(std::stod(f[2]), r.ec_expert);
        EXPECT_EQ(std::stod(f[3]), r.ec_cp);
        EXPECT_EQ(std::stod(f[4]), r.reduction_pct);
    }
    EXPECT_EQ(i, report.rows.size());
}

}  // namespace
}  // namespace seqdiag
