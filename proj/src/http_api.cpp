#include <seqdiag/http_api.hpp>

#include <httplib.h>
#include <json.hpp>

#include <cmath>
#include <initializer_list>
#include <regex>

namespace seqdiag {

using nlohmann::json;

namespace {

// Non-finite ratios (prob == 0) have no JSON number; they are sent as null.
json number(double v) {
    return std::isfinite(v) ? json(v) : json(nullptr);
}

json to_json(const SequencedTest& t) {
    return {{"component", t.component_id}, {"cost", t.cost}, {"prob", t.prob}, {"cp_ratio", number(t.cp_ratio)},
            {"rank", t.rank}};
}

json to_json(const DiagnosisSession& s) {
    json remaining = json::array();
    for (const auto& r : s.remaining) {
        remaining.push_back(
            {{"component", r.component_id}, {"cost", r.cost}, {"prob", r.prob}, {"cp_ratio", number(r.cp_ratio)}});
    }
    json history = json::array();
    for (const auto& h : s.history) {
        history.push_back({{"component", h.component_id},
                           {"outcome", to_string(h.outcome)},
                           {"cost", h.cost},
                           {"timestamp", h.timestamp}});
    }
    return {{"id", s.id},
            {"symptom", s.symptom_id},
            {"status", to_string(s.status)},
            {"step", s.step()},
            {"remaining", remaining},
            {"history", history},
            {"recommendation", s.recommendation ? json(*s.recommendation) : json(nullptr)},
            {"remaining_expected_cost", s.remaining_expected_cost},
            {"spent_minutes", s.spent_minutes},
            {"diagnosis", s.diagnosis ? json(*s.diagnosis) : json(nullptr)}};
}

json to_json(const SequenceView& v) {
    json seq = json::array();
    for (const auto& t : v.sequence) seq.push_back(to_json(t));
    return {{"sequence", seq}, {"expected_cost", v.expected_cost}};
}

json to_json(const SensitivitySummary& s) {
    json quantiles = json::array();
    for (const auto& [level, value] : s.quantiles) quantiles.push_back({{"level", level}, {"value", value}});
    json cdf = json::array();
    for (const auto& p : s.cdf_points) cdf.push_back({{"diff", p.diff}, {"cumulative_fraction", p.cumulative_fraction}});
    return {{"s", s.error_factor},
            {"n_samples", s.n_samples},
            {"nominal_diff", s.nominal_diff},
            {"mean_diff", s.mean_diff},
            {"min_diff", s.min_diff},
            {"max_diff", s.max_diff},
            {"band_lower", s.band_lower},
            {"band_upper", s.band_upper},
            {"quantiles", quantiles},
            {"prob_positive", s.prob_positive},
            {"cdf_points", cdf}};
}

ApiResponse reply(int status, const json& body) {
    return {status, body.dump()};
}

ApiResponse error_reply(int status, const std::string& error, const std::string& detail) {
    return reply(status, {{"error", error}, {"detail", detail}});
}

int status_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::NotFound: return 404;
        case ErrorKind::Conflict: return 409;
        default: return 422;
    }
}

// Request-body helpers. Violations are reported as 422 through Error.
json parse_body(const std::string& body) {
    try {
        json j = json::parse(body);
        if (!j.is_object()) throw Error(ErrorKind::Schema, "request body must be a JSON object");
        return j;
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::Schema, std::string("invalid JSON: ") + e.what());
    }
}

void allow_fields(const json& j, std::initializer_list<const char*> fields, const std::string& path = "$") {
    for (const auto& [key, _] : j.items()) {
        bool known = false;
        for (const char* f : fields) known = known || key == f;
        if (!known) throw Error(ErrorKind::Schema, "unknown field '" + key + "'", path);
    }
}

std::string required_string(const json& j, const char* field) {
    if (!j.contains(field)) throw Error(ErrorKind::Schema, std::string("missing field '") + field + "'");
    if (!j[field].is_string()) throw Error(ErrorKind::Schema, "expected a string", field);
    return j[field].get<std::string>();
}

double required_number(const json& j, const char* field) {
    if (!j.contains(field)) throw Error(ErrorKind::Schema, std::string("missing field '") + field + "'");
    if (!j[field].is_number()) throw Error(ErrorKind::Schema, "expected a number", field);
    return j[field].get<double>();
}

std::uint64_t required_unsigned(const json& j, const char* field) {
    if (!j.contains(field)) throw Error(ErrorKind::Schema, std::string("missing field '") + field + "'");
    if (!j[field].is_number_unsigned()) throw Error(ErrorKind::Schema, "expected a non-negative integer", field);
    return j[field].get<std::uint64_t>();
}

}  // namespace

ApiHandler::ApiHandler(std::shared_ptr<const FaultModel> model, std::chrono::seconds session_ttl)
    : model_(model), sessions_(std::move(model), session_ttl) {}

ApiResponse ApiHandler::handle(const std::string& method, const std::string& path, const std::string& body) {
    static const std::regex session_path(R"(^/api/v1/sessions/([0-9A-Za-z]+)$)");
    static const std::regex outcome_path(R"(^/api/v1/sessions/([0-9A-Za-z]+)/outcome$)");
    std::smatch m;

    try {
        if (path == "/api/v1/model") {
            if (method != "GET") return error_reply(405, "method-not-allowed", "use GET");
            return {200, serialize_model(*model_, -1)};
        }

        if (path == "/api/v1/sessions") {
            if (method != "POST") return error_reply(405, "method-not-allowed", "use POST");
            const json req = parse_body(body);
            allow_fields(req, {"symptom"});
            return reply(201, to_json(sessions_.create(required_string(req, "symptom"))));
        }

        if (std::regex_match(path, m, session_path)) {
            if (method != "GET") return error_reply(405, "method-not-allowed", "use GET");
            return reply(200, to_json(sessions_.get(m[1].str())));
        }

        if (std::regex_match(path, m, outcome_path)) {
            if (method != "POST") return error_reply(405, "method-not-allowed", "use POST");
            const json req = parse_body(body);
            allow_fields(req, {"component", "outcome", "override", "step"});
            OutcomeReport report;
            report.component_id = required_string(req, "component");
            const auto outcome = parse_outcome(required_string(req, "outcome"));
            if (!outcome) throw Error(ErrorKind::Schema, "outcome must be 'pass' or 'fail'", "outcome");
            report.outcome = *outcome;
            if (req.contains("override")) {
                if (!req["override"].is_boolean()) throw Error(ErrorKind::Schema, "expected a boolean", "override");
                report.override_order = req["override"].get<bool>();
            }
            if (req.contains("step")) report.expected_step = required_unsigned(req, "step");
            return reply(200, to_json(sessions_.report(m[1].str(), report)));
        }

        if (path == "/api/v1/whatif") {
            if (method != "POST") return error_reply(405, "method-not-allowed", "use POST");
            const json req = parse_body(body);
            allow_fields(req, {"symptom", "overrides"});
            const std::string symptom = required_string(req, "symptom");
            std::map<std::string, ComponentOverride> overrides;
            if (req.contains("overrides")) {
                if (!req["overrides"].is_object()) throw Error(ErrorKind::Schema, "expected an object", "overrides");
                for (const auto& [id, o] : req["overrides"].items()) {
                    const std::string where = "overrides." + id;
                    if (!o.is_object()) throw Error(ErrorKind::Schema, "expected an object", where);
                    allow_fields(o, {"cost", "prob"}, where);
                    ComponentOverride co;
                    if (o.contains("cost")) co.cost = required_number(o, "cost");
                    if (o.contains("prob")) co.prob = required_number(o, "prob");
                    overrides.emplace(id, co);
                }
            }
            const WhatIfResult r = whatif(*model_, symptom, overrides);
            return reply(200, {{"symptom", r.symptom_id},
                               {"nominal", to_json(r.nominal)},
                               {"modified", to_json(r.modified)},
                               {"delta", r.delta}});
        }

        if (path == "/api/v1/sensitivity") {
            if (method != "POST") return error_reply(405, "method-not-allowed", "use POST");
            const json req = parse_body(body);
            allow_fields(req, {"symptom", "expert", "s", "n_samples", "seed", "band_mass", "renormalize"});
            SensitivityRequest sr;
            sr.symptom_id = required_string(req, "symptom");
            sr.expert = required_string(req, "expert");
            sr.config.error_factor = required_number(req, "s");
            sr.config.n_samples = required_unsigned(req, "n_samples");
            sr.config.seed = required_unsigned(req, "seed");
            if (req.contains("band_mass")) sr.config.band_mass = required_number(req, "band_mass");
            if (req.contains("renormalize")) {
                if (!req["renormalize"].is_boolean()) throw Error(ErrorKind::Schema, "expected a boolean", "renormalize");
                sr.config.renormalize_samples = req["renormalize"].get<bool>();
            }
            if (sr.config.n_samples > 1'000'000) {
                throw Error(ErrorKind::Validation, "n_samples is limited to 1000000", "n_samples");
            }
            return reply(200, to_json(run_sensitivity(*model_, sr)));
        }

        return error_reply(404, "not-found", "no route for " + path);
    } catch (const Error& e) {
        return error_reply(status_for(e.kind()), to_string(e.kind()), e.what());
    }
}

// ---------------------------------------------------------------------------

struct ApiServer::Impl {
    httplib::Server server;
};

ApiServer::ApiServer(std::shared_ptr<const FaultModel> model, ServerOptions options)
    : handler_(std::move(model)), options_(std::move(options)), impl_(std::make_unique<Impl>()) {
    auto forward = [this](const httplib::Request& req, httplib::Response& res) {
        const ApiResponse r = handler_.handle(req.method, req.path, req.body);
        res.status = r.status;
        res.set_content(r.body, "application/json");
    };
    auto& srv = impl_->server;
    srv.Get(R"(/api/v1/.*)", forward);
    srv.Post(R"(/api/v1/.*)", forward);
    if (!options_.static_dir.empty() && !srv.set_mount_point("/", options_.static_dir)) {
        throw IoError("static directory '" + options_.static_dir + "' does not exist");
    }
}

ApiServer::~ApiServer() {
    stop();
}

int ApiServer::bind() {
    auto& srv = impl_->server;
    int port = options_.port;
    if (port == 0) {
        port = srv.bind_to_any_port(options_.host);
    } else if (!srv.bind_to_port(options_.host, port)) {
        port = -1;
    }
    if (port <= 0) {
        throw IoError("cannot bind " + options_.host + ":" + std::to_string(options_.port));
    }
    return port;
}

void ApiServer::serve() {
    if (!impl_->server.listen_after_bind()) throw IoError("server stopped with an error");
}

void ApiServer::stop() {
    if (impl_) impl_->server.stop();
}

}  // namespace seqdiag
