#pragma once

// Live troubleshooting sessions and the pure decision-support queries served
// over HTTP.

#include <seqdiag/engine.hpp>
#include <seqdiag/model.hpp>
#include <seqdiag/sensitivity.hpp>

#include <chrono>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

namespace seqdiag {

enum class Outcome { Pass, Fail };
enum class SessionStatus { Active, Diagnosed, Exhausted };

const char* to_string(Outcome outcome) noexcept;
const char* to_string(SessionStatus status) noexcept;
std::optional<Outcome> parse_outcome(std::string_view text) noexcept;

struct HistoryEntry {
    std::string component_id;
    Outcome outcome = Outcome::Pass;
    double cost = 0.0;
    std::string timestamp;  // ISO 8601, UTC
};

struct RemainingComponent {
    std::string component_id;
    double cost = 0.0;
    double prob = 0.0;  // renormalized over the survivors
    double cp_ratio = 0.0;
};

struct DiagnosisSession {
    std::string id;
    std::string symptom_id;
    SessionStatus status = SessionStatus::Active;
    std::vector<RemainingComponent> remaining;  // original C/P order
    std::vector<HistoryEntry> history;
    std::optional<std::string> recommendation;
    double remaining_expected_cost = 0.0;
    double spent_minutes = 0.0;
    std::optional<std::string> diagnosis;

    std::size_t step() const noexcept { return history.size(); }
};

struct OutcomeReport {
    std::string component_id;
    Outcome outcome = Outcome::Pass;
    // Allows testing a remaining component other than the recommendation.
    bool override_order = false;
    // When set, the report is rejected unless the session is at this step.
    std::optional<std::size_t> expected_step;
};

// In-memory session registry. Sessions expire `ttl` after their last update.
// Updates to one session are serialized; a report that finds the session busy
// or at a different step fails with Error{Conflict} instead of overwriting.
class SessionStore {
public:
    using Clock = std::chrono::system_clock;
    static constexpr std::chrono::hours kDefaultTtl{24};

    explicit SessionStore(std::shared_ptr<const FaultModel> model, std::chrono::seconds ttl = kDefaultTtl,
                          std::function<Clock::time_point()> now = &Clock::now);

    DiagnosisSession create(const std::string& symptom_id);
    DiagnosisSession get(const std::string& session_id) const;
    DiagnosisSession report(const std::string& session_id, const OutcomeReport& report);

    std::size_t purge_expired();
    std::size_t size() const;

    const FaultModel& model() const noexcept { return *model_; }

private:
    struct Entry {
        mutable std::mutex mutex;
        DiagnosisSession view;
        Symptom belief;                      // survivors, normalized
        std::vector<std::string> cp_order;   // original C/P order
        Clock::time_point touched;
    };

    std::shared_ptr<Entry> find(const std::string& session_id) const;
    void refresh(Entry& entry) const;
    std::string new_id();

    std::shared_ptr<const FaultModel> model_;
    std::chrono::seconds ttl_;
    std::function<Clock::time_point()> now_;
    mutable std::shared_mutex mutex_;
    std::unordered_map<std::string, std::shared_ptr<Entry>> sessions_;
    Clock::time_point last_purge_{};
};

struct ComponentOverride {
    std::optional<double> cost;
    std::optional<double> prob;  // raw (assessed) value, renormalized afterwards
};

struct SequenceView {
    std::vector<SequencedTest> sequence;
    double expected_cost = 0.0;
};

struct WhatIfResult {
    std::string symptom_id;
    SequenceView nominal;
    SequenceView modified;
    double delta = 0.0;  // modified EC - nominal EC
};

// Recomputes normalization, C/P order and EC with overrides applied to a copy
// of the symptom. Throws Error{Validation} for overrides that break a model
// invariant (including unknown component ids) and Error{NotFound} for an
// unknown symptom.
WhatIfResult whatif(const FaultModel& model, const std::string& symptom_id,
                    const std::map<std::string, ComponentOverride>& overrides);

struct SensitivityRequest {
    std::string symptom_id;
    std::string expert;
    SensitivityConfig config;
};

SensitivitySummary run_sensitivity(const FaultModel& model, const SensitivityRequest& request);

}  // namespace seqdiag
