#include <seqdiag/model.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

namespace seqdiag {

using nlohmann::json;

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::Schema: return "schema";
        case ErrorKind::Validation: return "validation";
        case ErrorKind::Permutation: return "permutation";
        case ErrorKind::NotFound: return "not-found";
        case ErrorKind::Conflict: return "conflict";
        case ErrorKind::Domain: return "domain";
    }
    return "unknown";
}

const char* to_string(Source source) noexcept {
    return source == Source::Paper ? "paper" : "synthetic";
}

std::optional<Source> parse_source(std::string_view text) noexcept {
    if (text == "paper") return Source::Paper;
    if (text == "synthetic") return Source::Synthetic;
    return std::nullopt;
}

std::optional<std::size_t> Symptom::index_of(std::string_view component_id) const noexcept {
    for (std::size_t i = 0; i < components.size(); ++i) {
        if (components[i].id == component_id) return i;
    }
    return std::nullopt;
}

const Component& Symptom::component(std::string_view component_id) const {
    auto idx = index_of(component_id);
    if (!idx) {
        throw Error(ErrorKind::NotFound,
                    "unknown component '" + std::string(component_id) + "' in symptom '" + id + "'");
    }
    return components[*idx];
}

double Symptom::probability_mass() const noexcept {
    double sum = 0.0;
    for (const auto& c : components) sum += c.prob;
    return sum;
}

namespace {

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& item : items) {
        if (!out.empty()) out += ", ";
        out += item;
    }
    return out;
}

}  // namespace

void validate_symptom(const Symptom& symptom, const std::string& path) {
    if (symptom.id.empty()) throw Error(ErrorKind::Validation, "empty symptom id", path + ".id");
    if (symptom.components.empty()) {
        throw Error(ErrorKind::Validation, "symptom has no components", path + ".components");
    }
    std::set<std::string_view> seen;
    for (std::size_t i = 0; i < symptom.components.size(); ++i) {
        const auto& c = symptom.components[i];
        const std::string where = path + ".components[" + std::to_string(i) + "]";
        if (c.id.empty()) throw Error(ErrorKind::Validation, "empty component id", where + ".id");
        if (!seen.insert(c.id).second) {
            throw Error(ErrorKind::Validation, "duplicate component id '" + c.id + "'", where + ".id");
        }
        if (!std::isfinite(c.cost) || c.cost <= 0.0) {
            throw Error(ErrorKind::Validation, "cost must be positive", where + ".cost");
        }
        if (!std::isfinite(c.prob) || c.prob < 0.0 || c.prob > 1.0) {
            throw Error(ErrorKind::Validation, "probability must lie in [0, 1]", where + ".prob");
        }
    }
}

void check_permutation(const TestStrategy& strategy, const Symptom& symptom, const std::string& path) {
    std::vector<int> hits(symptom.size(), 0);
    for (std::size_t i = 0; i < strategy.order.size(); ++i) {
        const auto& id = strategy.order[i];
        auto idx = symptom.index_of(id);
        const std::string where = path + "[" + std::to_string(i) + "]";
        if (!idx) {
            throw Error(ErrorKind::Permutation,
                        "'" + id + "' is not a component of symptom '" + symptom.id + "'", where);
        }
        if (++hits[*idx] > 1) throw Error(ErrorKind::Permutation, "duplicate component '" + id + "'", where);
    }
    std::vector<std::string> missing;
    for (std::size_t i = 0; i < hits.size(); ++i) {
        if (hits[i] == 0) missing.push_back(symptom.components[i].id);
    }
    if (!missing.empty()) {
        throw Error(ErrorKind::Permutation, "order omits component(s) " + join(missing), path);
    }
}

TestStrategy input_order(const Symptom& symptom) {
    TestStrategy s{symptom.id, {}};
    for (const auto& c : symptom.components) s.order.push_back(c.id);
    return s;
}

Symptom normalize(const Symptom& symptom) {
    const double mass = symptom.probability_mass();
    if (!(mass > 0.0)) {
        throw Error(ErrorKind::Domain,
                    "symptom '" + symptom.id + "' has zero probability mass; no fault distribution exists");
    }
    Symptom out = symptom;
    for (auto& c : out.components) c.prob /= mass;
    return out;
}

bool is_normalized(const Symptom& symptom, double tolerance) noexcept {
    return std::abs(symptom.probability_mass() - 1.0) <= tolerance;
}

FaultModel::FaultModel(std::string name, std::vector<Symptom> symptoms, std::vector<ExpertRule> rules)
    : name_(std::move(name)), symptoms_(std::move(symptoms)), rules_(std::move(rules)) {
    std::set<std::string_view> ids;
    for (std::size_t i = 0; i < symptoms_.size(); ++i) {
        const std::string where = "symptoms[" + std::to_string(i) + "]";
        validate_symptom(symptoms_[i], where);
        if (!ids.insert(symptoms_[i].id).second) {
            throw Error(ErrorKind::Validation, "duplicate symptom id '" + symptoms_[i].id + "'", where + ".id");
        }
    }
    std::set<std::pair<std::string_view, std::string_view>> keys;
    for (std::size_t i = 0; i < rules_.size(); ++i) {
        const auto& r = rules_[i];
        const std::string where = "expert_rules[" + std::to_string(i) + "]";
        if (r.expert.empty()) throw Error(ErrorKind::Validation, "empty expert id", where + ".expert");
        const Symptom* s = find_symptom(r.strategy.symptom_id);
        if (s == nullptr) {
            throw Error(ErrorKind::NotFound, "unknown symptom '" + r.strategy.symptom_id + "'", where + ".symptom");
        }
        if (!keys.emplace(r.expert, r.strategy.symptom_id).second) {
            throw Error(ErrorKind::Validation, "duplicate rule for this (expert, symptom)", where);
        }
        check_permutation(r.strategy, *s, where + ".order");
    }
}

const Symptom* FaultModel::find_symptom(std::string_view id) const noexcept {
    for (const auto& s : symptoms_) {
        if (s.id == id) return &s;
    }
    return nullptr;
}

const Symptom& FaultModel::symptom(std::string_view id) const {
    if (const Symptom* s = find_symptom(id)) return *s;
    throw Error(ErrorKind::NotFound,
                "unknown symptom '" + std::string(id) + "'; valid ids: " + join(symptom_ids()));
}

const ExpertRule* FaultModel::find_rule(std::string_view expert, std::string_view symptom_id) const noexcept {
    for (const auto& r : rules_) {
        if (r.expert == expert && r.strategy.symptom_id == symptom_id) return &r;
    }
    return nullptr;
}

const ExpertRule& FaultModel::rule(std::string_view expert, std::string_view symptom_id) const {
    if (const ExpertRule* r = find_rule(expert, symptom_id)) return *r;
    throw Error(ErrorKind::NotFound, "no rule for expert '" + std::string(expert) + "' on symptom '" +
                                         std::string(symptom_id) + "'; experts: " + join(experts()));
}

std::vector<std::string> FaultModel::symptom_ids() const {
    std::vector<std::string> ids;
    for (const auto& s : symptoms_) ids.push_back(s.id);
    return ids;
}

std::vector<std::string> FaultModel::experts() const {
    std::vector<std::string> out;
    for (const auto& r : rules_) {
        if (std::find(out.begin(), out.end(), r.expert) == out.end()) out.push_back(r.expert);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

void require_object(const json& j, const std::string& path, std::initializer_list<const char*> fields) {
    if (!j.is_object()) throw Error(ErrorKind::Schema, "expected an object", path);
    for (const auto& [key, _] : j.items()) {
        bool known = std::any_of(fields.begin(), fields.end(), [&](const char* f) { return key == f; });
        if (!known) throw Error(ErrorKind::Schema, "unknown field '" + key + "'", path);
    }
    for (const char* f : fields) {
        if (!j.contains(f)) throw Error(ErrorKind::Schema, std::string("missing field '") + f + "'", path);
    }
}

std::string get_string(const json& j, const char* field, const std::string& path) {
    const auto& v = j.at(field);
    if (!v.is_string()) throw Error(ErrorKind::Schema, "expected a string", path + "." + field);
    return v.get<std::string>();
}

double get_number(const json& j, const char* field, const std::string& path) {
    const auto& v = j.at(field);
    if (!v.is_number()) throw Error(ErrorKind::Schema, "expected a number", path + "." + field);
    return v.get<double>();
}

const json& get_array(const json& j, const char* field, const std::string& path) {
    const auto& v = j.at(field);
    if (!v.is_array()) throw Error(ErrorKind::Schema, "expected an array", path + "." + field);
    return v;
}

Component parse_component(const json& j, const std::string& path) {
    require_object(j, path, {"id", "name", "cost", "prob"});
    return Component{get_string(j, "id", path), get_string(j, "name", path), get_number(j, "cost", path),
                     get_number(j, "prob", path)};
}

Symptom parse_symptom(const json& j, const std::string& path) {
    require_object(j, path, {"id", "name", "source", "components"});
    Symptom s;
    s.id = get_string(j, "id", path);
    s.name = get_string(j, "name", path);
    auto src = parse_source(get_string(j, "source", path));
    if (!src) throw Error(ErrorKind::Schema, "source must be 'paper' or 'synthetic'", path + ".source");
    s.source = *src;
    const auto& comps = get_array(j, "components", path);
    for (std::size_t i = 0; i < comps.size(); ++i) {
        s.components.push_back(parse_component(comps[i], path + ".components[" + std::to_string(i) + "]"));
    }
    return s;
}

ExpertRule parse_rule(const json& j, const std::string& path) {
    require_object(j, path, {"expert", "symptom", "order"});
    ExpertRule r;
    r.expert = get_string(j, "expert", path);
    r.strategy.symptom_id = get_string(j, "symptom", path);
    const auto& order = get_array(j, "order", path);
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (!order[i].is_string()) {
            throw Error(ErrorKind::Schema, "expected a string", path + ".order[" + std::to_string(i) + "]");
        }
        r.strategy.order.push_back(order[i].get<std::string>());
    }
    return r;
}

}  // namespace

FaultModel parse_model(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::Schema, std::string("invalid JSON: ") + e.what(), "$");
    }
    require_object(doc, "$", {"name", "symptoms", "expert_rules"});
    std::string name = get_string(doc, "name", "$");
    std::vector<Symptom> symptoms;
    const auto& js = get_array(doc, "symptoms", "$");
    for (std::size_t i = 0; i < js.size(); ++i) {
        symptoms.push_back(parse_symptom(js[i], "symptoms[" + std::to_string(i) + "]"));
    }
    std::vector<ExpertRule> rules;
    const auto& jr = get_array(doc, "expert_rules", "$");
    for (std::size_t i = 0; i < jr.size(); ++i) {
        rules.push_back(parse_rule(jr[i], "expert_rules[" + std::to_string(i) + "]"));
    }
    return FaultModel(std::move(name), std::move(symptoms), std::move(rules));
}

FaultModel load_model(const std::string& file_path) {
    std::ifstream in(file_path, std::ios::binary);
    if (!in) throw IoError("cannot open model file '" + file_path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model(buf.str());
}

std::string serialize_model(const FaultModel& model, int indent) {
    nlohmann::ordered_json doc;
    doc["name"] = model.name();
    doc["symptoms"] = nlohmann::ordered_json::array();
    for (const auto& s : model.symptoms()) {
        nlohmann::ordered_json js{{"id", s.id}, {"name", s.name}, {"source", to_string(s.source)}, {"components", nlohmann::ordered_json::array()}};
        for (const auto& c : s.components) {
            js["components"].push_back({{"id", c.id}, {"name", c.name}, {"cost", c.cost}, {"prob", c.prob}});
        }
        doc["symptoms"].push_back(std::move(js));
    }
    doc["expert_rules"] = nlohmann::ordered_json::array();
    for (const auto& r : model.expert_rules()) {
        doc["expert_rules"].push_back(
            {{"expert", r.expert}, {"symptom", r.strategy.symptom_id}, {"order", r.strategy.order}});
    }
    return doc.dump(indent);
}

}  // namespace seqdiag
