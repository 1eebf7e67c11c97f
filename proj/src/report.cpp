#include <seqdiag/engine.hpp>
#include <seqdiag/report.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <set>
#include <tuple>

namespace seqdiag {

double reduction_pct(double ec_expert, double ec_cp) {
    if (!(ec_expert > 0.0)) throw Error(ErrorKind::Domain, "expert expected cost must be positive");
    return 100.0 * (ec_expert - ec_cp) / ec_expert;
}

double mean_of(const std::vector<double>& values) {
    if (values.empty()) return 0.0;
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

ComparisonReport summarize_rows(std::vector<ComparisonRow> rows) {
    std::sort(rows.begin(), rows.end(), [](const ComparisonRow& a, const ComparisonRow& b) {
        return std::tie(a.expert, a.symptom_id) < std::tie(b.expert, b.symptom_id);
    });
    ComparisonReport report;
    std::map<std::string, std::vector<double>> per_expert;
    for (const auto& r : rows) per_expert[r.expert].push_back(r.reduction_pct);
    std::vector<double> averages;
    for (const auto& [expert, values] : per_expert) {
        report.expert_average[expert] = mean_of(values);
        averages.push_back(report.expert_average[expert]);
    }
    report.overall_average = mean_of(averages);
    report.rows = std::move(rows);
    return report;
}

ComparisonReport compare(const FaultModel& model) {
    std::vector<ComparisonRow> rows;
    for (const auto& rule : model.expert_rules()) {
        const Symptom symptom = normalize(model.symptom(rule.strategy.symptom_id));
        ComparisonRow row;
        row.symptom_id = symptom.id;
        row.expert = rule.expert;
        row.source = symptom.source;
        row.ec_expert = expected_cost(rule.strategy, symptom).expected_cost;
        row.ec_cp = expected_cost(cp_strategy(symptom), symptom).expected_cost;
        row.reduction_pct = reduction_pct(row.ec_expert, row.ec_cp);
        rows.push_back(std::move(row));
    }
    return summarize_rows(std::move(rows));
}

namespace {

std::string render_markdown(const ComparisonReport& report) {
    std::vector<std::string> experts;
    std::vector<std::string> symptoms;
    for (const auto& r : report.rows) {
        if (std::find(experts.begin(), experts.end(), r.expert) == experts.end()) experts.push_back(r.expert);
        if (std::find(symptoms.begin(), symptoms.end(), r.symptom_id) == symptoms.end()) {
            symptoms.push_back(r.symptom_id);
        }
    }
    std::sort(symptoms.begin(), symptoms.end());

    std::string out = "| Symptom |";
    std::string rule = "|---|";
    for (const auto& e : experts) {
        out += fmt::format(" {} rule | {} C/P |", e, e);
        rule += "---:|---:|";
    }
    out += "\n" + rule + "\n";

    std::set<std::string> synthetic;
    for (const auto& s : symptoms) {
        std::string line = "| " + s;
        for (const auto& r : report.rows) {
            if (r.symptom_id == s && r.source == Source::Synthetic) {
                line += " *";
                synthetic.insert(s);
                break;
            }
        }
        line += " |";
        for (const auto& e : experts) {
            auto it = std::find_if(report.rows.begin(), report.rows.end(),
                                   [&](const ComparisonRow& r) { return r.expert == e && r.symptom_id == s; });
            if (it == report.rows.end()) {
                line += "  |  |";
            } else {
                line += fmt::format(" {:.1f} | {:.1f} |", it->ec_expert, it->ec_cp);
            }
        }
        out += line + "\n";
    }
    if (!experts.empty()) {
        std::string line = "| Average reduction (%) |";
        for (const auto& e : experts) line += fmt::format(" {:.1f} |  |", report.expert_average.at(e));
        out += line + "\n";
        out += fmt::format("\nAverage reduction across experts: {:.1f}%\n", report.overall_average);
    }
    if (!synthetic.empty()) out += "\n\\* placeholder inputs (source=synthetic)\n";
    return out;
}

std::string render_csv(const ComparisonReport& report) {
    std::string out = "expert,symptom,ec_expert,ec_cp,reduction_pct\n";
    for (const auto& r : report.rows) {
        out += fmt::format("{},{},{:.17g},{:.17g},{:.17g}\n", r.expert, r.symptom_id, r.ec_expert, r.ec_cp,
                           r.reduction_pct);
    }
    return out;
}

}  // namespace

std::string render(const ComparisonReport& report, ReportFormat format) {
    return format == ReportFormat::Csv ? render_csv(report) : render_markdown(report);
}

}  // namespace seqdiag
