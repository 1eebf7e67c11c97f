#include <seqdiag/session.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <ctime>
#include <limits>
#include <random>

namespace seqdiag {

const char* to_string(Outcome outcome) noexcept {
    return outcome == Outcome::Pass ? "pass" : "fail";
}

const char* to_string(SessionStatus status) noexcept {
    switch (status) {
        case SessionStatus::Active: return "active";
        case SessionStatus::Diagnosed: return "diagnosed";
        case SessionStatus::Exhausted: return "exhausted";
    }
    return "unknown";
}

std::optional<Outcome> parse_outcome(std::string_view text) noexcept {
    if (text == "pass") return Outcome::Pass;
    if (text == "fail") return Outcome::Fail;
    return std::nullopt;
}

namespace {

std::string iso8601(SessionStore::Clock::time_point tp) {
    const auto secs = std::chrono::time_point_cast<std::chrono::seconds>(tp);
    const auto millis = std::chrono::duration_cast<std::chrono::milliseconds>(tp - secs).count();
    const std::time_t t = SessionStore::Clock::to_time_t(secs);
    std::tm tm{};
    gmtime_r(&t, &tm);
    return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}.{:03}Z", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                       tm.tm_hour, tm.tm_min, tm.tm_sec, millis);
}

double ratio(double cost, double prob) {
    return prob > 0.0 ? cost / prob : std::numeric_limits<double>::infinity();
}

}  // namespace

SessionStore::SessionStore(std::shared_ptr<const FaultModel> model, std::chrono::seconds ttl,
                           std::function<Clock::time_point()> now)
    : model_(std::move(model)), ttl_(ttl), now_(std::move(now)) {}

std::string SessionStore::new_id() {
    std::random_device rd;
    const std::uint64_t hi = (std::uint64_t{rd()} << 32) | rd();
    const std::uint64_t lo = (std::uint64_t{rd()} << 32) | rd();
    return fmt::format("{:016x}{:016x}", hi, lo);
}

// Rebuilds the externally visible state from the belief over survivors.
void SessionStore::refresh(Entry& e) const {
    auto& v = e.view;
    v.remaining.clear();
    TestStrategy restricted{e.belief.id, {}};
    for (const auto& id : e.cp_order) {
        if (auto idx = e.belief.index_of(id)) {
            const Component& c = e.belief.components[*idx];
            v.remaining.push_back({c.id, c.cost, c.prob, ratio(c.cost, c.prob)});
            restricted.order.push_back(c.id);
        }
    }
    if (v.status == SessionStatus::Active && !restricted.order.empty()) {
        v.recommendation = restricted.order.front();
        v.remaining_expected_cost = expected_cost(restricted, e.belief).expected_cost;
    } else {
        v.recommendation.reset();
        v.remaining_expected_cost = 0.0;
    }
}

DiagnosisSession SessionStore::create(const std::string& symptom_id) {
    const Symptom& symptom = model_->symptom(symptom_id);
    auto entry = std::make_shared<Entry>();
    entry->belief = normalize(symptom);
    entry->cp_order = cp_strategy(entry->belief).order;
    entry->touched = now_();
    entry->view.symptom_id = symptom.id;
    refresh(*entry);

    std::unique_lock lock(mutex_);
    const auto now = now_();
    if (now - last_purge_ >= std::chrono::minutes(1)) {
        std::erase_if(sessions_, [&](const auto& kv) { return now - kv.second->touched > ttl_; });
        last_purge_ = now;
    }
    do {
        entry->view.id = new_id();
    } while (sessions_.contains(entry->view.id));
    sessions_.emplace(entry->view.id, entry);
    return entry->view;
}

std::shared_ptr<SessionStore::Entry> SessionStore::find(const std::string& session_id) const {
    std::shared_lock lock(mutex_);
    auto it = sessions_.find(session_id);
    if (it == sessions_.end() || now_() - it->second->touched > ttl_) {
        throw Error(ErrorKind::NotFound, "unknown or expired session '" + session_id + "'");
    }
    return it->second;
}

DiagnosisSession SessionStore::get(const std::string& session_id) const {
    auto entry = find(session_id);
    std::lock_guard lock(entry->mutex);
    return entry->view;
}

DiagnosisSession SessionStore::report(const std::string& session_id, const OutcomeReport& report) {
    auto entry = find(session_id);
    std::unique_lock lock(entry->mutex, std::try_to_lock);
    if (!lock.owns_lock()) {
        throw Error(ErrorKind::Conflict, "session '" + session_id + "' is being updated by another request");
    }
    auto& v = entry->view;
    if (v.status != SessionStatus::Active) {
        throw Error(ErrorKind::Conflict, "session is " + std::string(to_string(v.status)) + "; no further tests");
    }
    if (report.expected_step && *report.expected_step != v.step()) {
        throw Error(ErrorKind::Conflict, fmt::format("session is at step {}, report was for step {}", v.step(),
                                                     *report.expected_step));
    }
    const Symptom& original = model_->symptom(v.symptom_id);
    if (!original.index_of(report.component_id)) {
        throw Error(ErrorKind::NotFound,
                    "unknown component '" + report.component_id + "' in symptom '" + v.symptom_id + "'");
    }
    const auto idx = entry->belief.index_of(report.component_id);
    if (!idx) throw Error(ErrorKind::Conflict, "component '" + report.component_id + "' was already tested");
    if (!report.override_order && report.component_id != *v.recommendation) {
        throw Error(ErrorKind::Conflict, "recommended test is '" + *v.recommendation +
                                             "'; set override to test another component");
    }

    const double cost = entry->belief.components[*idx].cost;
    v.history.push_back({report.component_id, report.outcome, cost, iso8601(now_())});
    v.spent_minutes += cost;

    if (report.outcome == Outcome::Fail) {
        v.status = SessionStatus::Diagnosed;
        v.diagnosis = report.component_id;
    } else if (entry->belief.size() == 1 || entry->belief.components[*idx].prob >= 1.0) {
        // Every candidate with positive probability has been cleared.
        v.status = SessionStatus::Exhausted;
        entry->belief.components.erase(entry->belief.components.begin() + static_cast<std::ptrdiff_t>(*idx));
    } else {
        entry->belief = condition_on_pass(entry->belief, report.component_id);
    }
    entry->touched = now_();
    refresh(*entry);
    return v;
}

std::size_t SessionStore::purge_expired() {
    std::unique_lock lock(mutex_);
    const auto now = now_();
    last_purge_ = now;
    return std::erase_if(sessions_, [&](const auto& kv) { return now - kv.second->touched > ttl_; });
}

std::size_t SessionStore::size() const {
    std::shared_lock lock(mutex_);
    return sessions_.size();
}

// ---------------------------------------------------------------------------

namespace {

SequenceView sequence_view(const Symptom& normalized) {
    SequenceView view;
    view.sequence = cp_sequence(normalized);
    TestStrategy s{normalized.id, {}};
    for (const auto& t : view.sequence) s.order.push_back(t.component_id);
    view.expected_cost = expected_cost(s, normalized).expected_cost;
    return view;
}

}  // namespace

WhatIfResult whatif(const FaultModel& model, const std::string& symptom_id,
                    const std::map<std::string, ComponentOverride>& overrides) {
    const Symptom& nominal = model.symptom(symptom_id);
    Symptom modified = nominal;
    for (const auto& [id, o] : overrides) {
        auto idx = modified.index_of(id);
        if (!idx) throw Error(ErrorKind::Validation, "unknown component '" + id + "'", "overrides." + id);
        if (o.cost) modified.components[*idx].cost = *o.cost;
        if (o.prob) modified.components[*idx].prob = *o.prob;
    }
    validate_symptom(modified, "overrides");
    if (!(modified.probability_mass() > 0.0)) {
        throw Error(ErrorKind::Validation, "overrides leave no probability mass", "overrides");
    }

    WhatIfResult out;
    out.symptom_id = nominal.id;
    out.nominal = sequence_view(normalize(nominal));
    out.modified = sequence_view(normalize(modified));
    out.delta = out.modified.expected_cost - out.nominal.expected_cost;
    return out;
}

SensitivitySummary run_sensitivity(const FaultModel& model, const SensitivityRequest& request) {
    const Symptom& symptom = model.symptom(request.symptom_id);
    const ExpertRule& rule = model.rule(request.expert, request.symptom_id);
    return diff_distribution(symptom, rule.strategy, cp_strategy(symptom), request.config);
}

}  // namespace seqdiag
