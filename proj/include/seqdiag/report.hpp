#pragma once

#include <seqdiag/model.hpp>

#include <map>
#include <string>
#include <vector>

namespace seqdiag {

struct ComparisonRow {
    std::string symptom_id;
    std::string expert;
    double ec_expert = 0.0;  // minutes
    double ec_cp = 0.0;      // minutes
    double reduction_pct = 0.0;
    Source source = Source::Synthetic;
};

// 100 * (ec_expert - ec_cp) / ec_expert
double reduction_pct(double ec_expert, double ec_cp);

struct ComparisonReport {
    std::vector<ComparisonRow> rows;  // sorted by (expert, symptom id)
    // Arithmetic mean of reduction_pct over each expert's rows.
    std::map<std::string, double> expert_average;
    // Mean of the per-expert averages.
    double overall_average = 0.0;
};

// Builds a report from precomputed rows (e.g. published EC pairs).
ComparisonReport summarize_rows(std::vector<ComparisonRow> rows);

double mean_of(const std::vector<double>& values);

// Evaluates every expert rule and the C/P sequence of its symptom.
ComparisonReport compare(const FaultModel& model);

enum class ReportFormat { Markdown, Csv };

// Markdown lays the rows out like the published comparison table: one line
// per symptom, a (rule, C/P) column pair per expert, then average reductions.
// CSV has one line per row: expert,symptom,ec_expert,ec_cp,reduction_pct.
std::string render(const ComparisonReport& report, ReportFormat format);

}  // namespace seqdiag
