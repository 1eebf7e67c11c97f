#pragma once

// Fault-model schema for single-fault sequential diagnosis.
//
// A symptom conditions a distribution over the components that could cause
// it; exactly one of them is faulty. Each component has a perfect test with a
// fixed cost in minutes. Probabilities are stored as assessed (raw) and only
// normalized on request, so downstream analysis can perturb raw values.

#include <seqdiag/error.hpp>

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace seqdiag {

struct Component {
    std::string id;
    std::string name;
    double cost = 0.0;  // minutes of technician time
    double prob = 0.0;  // P(this component is the fault | symptom)

    friend bool operator==(const Component&, const Component&) = default;
};

enum class Source { Paper, Synthetic };

const char* to_string(Source source) noexcept;
std::optional<Source> parse_source(std::string_view text) noexcept;

struct Symptom {
    std::string id;
    std::string name;
    Source source = Source::Synthetic;
    // Input order is canonical: it is the tie-break order everywhere.
    std::vector<Component> components;

    std::size_t size() const noexcept { return components.size(); }

    // Index of the component with `component_id`, or nullopt.
    std::optional<std::size_t> index_of(std::string_view component_id) const noexcept;
    const Component& component(std::string_view component_id) const;

    double probability_mass() const noexcept;

    friend bool operator==(const Symptom&, const Symptom&) = default;
};

// An ordering of a symptom's components; order[0] is tested first.
struct TestStrategy {
    std::string symptom_id;
    std::vector<std::string> order;

    friend bool operator==(const TestStrategy&, const TestStrategy&) = default;
};

struct ExpertRule {
    std::string expert;
    TestStrategy strategy;

    friend bool operator==(const ExpertRule&, const ExpertRule&) = default;
};

class FaultModel {
public:
    FaultModel() = default;
    // Validates every invariant; throws Error on the first violation.
    FaultModel(std::string name, std::vector<Symptom> symptoms, std::vector<ExpertRule> rules);

    const std::string& name() const noexcept { return name_; }
    const std::vector<Symptom>& symptoms() const noexcept { return symptoms_; }
    const std::vector<ExpertRule>& expert_rules() const noexcept { return rules_; }

    const Symptom* find_symptom(std::string_view id) const noexcept;
    // Throws Error{NotFound} listing the valid ids.
    const Symptom& symptom(std::string_view id) const;
    const ExpertRule* find_rule(std::string_view expert, std::string_view symptom_id) const noexcept;
    const ExpertRule& rule(std::string_view expert, std::string_view symptom_id) const;

    std::vector<std::string> symptom_ids() const;
    std::vector<std::string> experts() const;

    friend bool operator==(const FaultModel&, const FaultModel&) = default;

private:
    std::string name_;
    std::vector<Symptom> symptoms_;
    std::vector<ExpertRule> rules_;
};

// Divides each probability by the symptom's probability mass. Throws
// Error{Domain} when the mass is zero (no fault distribution exists).
Symptom normalize(const Symptom& symptom);

bool is_normalized(const Symptom& symptom, double tolerance = 1e-9) noexcept;

// Validates a single symptom in isolation (ids, costs, probabilities).
// `path` prefixes error locations.
void validate_symptom(const Symptom& symptom, const std::string& path = "symptom");

// Throws Error{Permutation} naming the missing, duplicate or unknown id.
void check_permutation(const TestStrategy& strategy, const Symptom& symptom,
                       const std::string& path = "order");

// Strategy that tests components in their input order.
TestStrategy input_order(const Symptom& symptom);

// JSON model documents. Unknown fields are rejected; errors carry the path to
// the offending element.
FaultModel parse_model(std::string_view json_text);
FaultModel load_model(const std::string& file_path);
std::string serialize_model(const FaultModel& model, int indent = 2);

// The motorcycle troubleshooting model. Only the poor-idling symptom carries
// published inputs (source=paper); the other symptoms are placeholders.
FaultModel bundled_dataset();

}  // namespace seqdiag
