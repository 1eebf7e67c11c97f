#include <seqdiag/model.hpp>

#include "support/instances.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <fstream>
#include <random>
#include <sstream>

namespace seqdiag {
namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json minimal_doc() {
    return json::parse(R"({
        "name": "tiny",
        "symptoms": [{"id": "s", "name": "s", "source": "synthetic",
                      "components": [{"id": "a", "name": "A", "cost": 5, "prob": 1.0}]}],
        "expert_rules": [{"expert": "e", "symptom": "s", "order": ["a"]}]
    })");
}

Error parse_error(const json& doc) {
    try {
        parse_model(doc.dump());
    } catch (const Error& e) {
        return e;
    }
    ADD_FAILURE() << "expected parse to fail";
    return Error(ErrorKind::Schema, "none");
}

TEST(ModelParse, BundledFileMatchesTable) {
    const FaultModel m = load_model(std::string(SEQDIAG_DATA_DIR) + "/motorcycle.json");
    ASSERT_EQ(m.symptoms().size(), 5u);
    EXPECT_EQ(m.symptom_ids(), (std::vector<std::string>{"poor-idling", "starts-but-runs-irregularly",
                                                          "charging-system-fails", "no-start-no-spark",
                                                          "no-start-with-spark"}));
    EXPECT_EQ(m.symptom("starts-but-runs-irregularly").size(), 6u);
    EXPECT_EQ(m.symptom("no-start-no-spark").size(), 4u);
    EXPECT_EQ(m.symptom("no-start-with-spark").size(), 4u);
    EXPECT_EQ(m, bundled_dataset());
}

TEST(ModelParse, SingletonModel) {
    const FaultModel m = parse_model(minimal_doc().dump());
    ASSERT_EQ(m.symptoms().size(), 1u);
    EXPECT_EQ(m.symptom("s").components[0].prob, 1.0);
    EXPECT_EQ(m.rule("e", "s").strategy.order, std::vector<std::string>{"a"});
}

TEST(ModelParse, RuleOmittingComponentNamesMissingId) {
    json doc = minimal_doc();
    doc["symptoms"][0]["components"].push_back({{"id", "b"}, {"name", "B"}, {"cost", 3}, {"prob", 0.0}});
    const Error e = parse_error(doc);
    EXPECT_EQ(e.kind(), ErrorKind::Permutation);
    EXPECT_EQ(e.path(), "expert_rules[0].order");
    EXPECT_NE(std::string(e.what()).find("b"), std::string::npos);
}

TEST(ModelParse, ErrorsCarryPath) {
    {
        json doc = minimal_doc();
        doc["symptoms"][0]["components"][0]["cost"] = 0;
        const Error e = parse_error(doc);
        EXPECT_EQ(e.kind(), ErrorKind::Validation);
        EXPECT_EQ(e.path(), "symptoms[0].components[0].cost");
    }
    {
        json doc = minimal_doc();
        doc["symptoms"][0]["components"][0]["prob"] = 1.5;
        EXPECT_EQ(parse_error(doc).path(), "symptoms[0].components[0].prob");
    }
    {
        json doc = minimal_doc();
        doc["symptoms"][0]["components"].push_back(doc["symptoms"][0]["components"][0]);
        const Error e = parse_error(doc);
        EXPECT_EQ(e.kind(), ErrorKind::Validation);
        EXPECT_EQ(e.path(), "symptoms[0].components[1].id");
    }
    {
        json doc = minimal_doc();
        doc["symptoms"][0]["components"][0].erase("cost");
        const Error e = parse_error(doc);
        EXPECT_EQ(e.kind(), ErrorKind::Schema);
        EXPECT_EQ(e.path(), "symptoms[0].components[0]");
    }
    {
        json doc = minimal_doc();
        doc["symptoms"][0]["components"][0]["cost"] = "5";
        EXPECT_EQ(parse_error(doc).path(), "symptoms[0].components[0].cost");
    }
    {
        json doc = minimal_doc();
        doc["symptoms"][0]["colour"] = "red";
        const Error e = parse_error(doc);
        EXPECT_EQ(e.kind(), ErrorKind::Schema);
        EXPECT_NE(std::string(e.what()).find("colour"), std::string::npos);
    }
    {
        json doc = minimal_doc();
        doc["symptoms"][0]["source"] = "folklore";
        EXPECT_EQ(parse_error(doc).path(), "symptoms[0].source");
    }
    {
        json doc = minimal_doc();
        doc["expert_rules"][0]["order"] = {"a", "a"};
        EXPECT_EQ(parse_error(doc).kind(), ErrorKind::Permutation);
    }
    EXPECT_THROW(parse_model("{not json"), Error);
}

TEST(ModelParse, ZeroProbabilityIsLegal) {
    json doc = minimal_doc();
    doc["symptoms"][0]["components"].push_back({{"id", "b"}, {"name", "B"}, {"cost", 3}, {"prob", 0.0}});
    doc["expert_rules"][0]["order"] = {"b", "a"};
    EXPECT_NO_THROW(parse_model(doc.dump()));
}

TEST(ModelParse, RawProbabilitiesPreserved) {
    const FaultModel m = parse_model(serialize_model(bundled_dataset()));
    const Symptom& s = m.symptom("poor-idling");
    EXPECT_EQ(s.component("air-leak").prob, 0.526);
    EXPECT_NEAR(s.probability_mass(), 0.999, 1e-12);
}

TEST(ModelParse, MissingFileIsIoError) {
    EXPECT_THROW(load_model("/nonexistent/model.json"), IoError);
}

TEST(ModelRoundTrip, SerializeParseIsIdentityOnRandomModels) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Symptom> symptoms;
        std::vector<ExpertRule> rules;
        const int n_symptoms = 1 + static_cast<int>(rng() % 4);
        for (int k = 0; k < n_symptoms; ++k) {
            Symptom s = testing::random_symptom(rng, 1 + rng() % 7, "s" + std::to_string(k));
            s.source = (rng() % 2) ? Source::Paper : Source::Synthetic;
            rules.push_back({"e" + std::to_string(rng() % 3), testing::random_order(rng, s)});
            symptoms.push_back(std::move(s));
        }
        // One rule per (expert, symptom).
        std::sort(rules.begin(), rules.end(), [](const auto& a, const auto& b) {
            return std::tie(a.expert, a.strategy.symptom_id) < std::tie(b.expert, b.strategy.symptom_id);
        });
        const FaultModel m("random", std::move(symptoms), std::move(rules));
        const FaultModel back = parse_model(serialize_model(m));
        ASSERT_EQ(back, m) << "trial " << trial;
        EXPECT_EQ(serialize_model(back), serialize_model(m));
    }
}

TEST(Normalize, TableValues) {
    const Symptom n = normalize(testing::poor_idling_raw());
    EXPECT_NEAR(n.component("idle-speed").prob, 0.263 / 0.999, 1e-15);
    EXPECT_NEAR(n.component("idle-speed").prob, 0.263263263263263, 1e-12);
    EXPECT_NEAR(n.component("clogged-jet").prob, 0.105105105105105, 1e-12);
    EXPECT_NEAR(n.component("air-leak").prob, 0.526526526526527, 1e-12);
    EXPECT_NEAR(n.component("excess-fuel").prob, 0.105105105105105, 1e-12);
    EXPECT_NEAR(n.probability_mass(), 1.0, 1e-9);
}

TEST(Normalize, AlreadyNormalizedIsUnchanged) {
    Symptom s{"s", "s", Source::Synthetic, {{"a", "a", 1, 0.5}, {"b", "b", 1, 0.5}}};
    EXPECT_EQ(normalize(s), s);
}

TEST(Normalize, ProportionalScaling) {
    // Raw weights above 1 are not valid model probabilities, but normalize
    // itself only needs positive mass.
    Symptom s{"s", "s", Source::Synthetic, {{"a", "a", 1, 2}, {"b", "b", 1, 1}, {"c", "c", 1, 1}}};
    const Symptom n = normalize(s);
    EXPECT_DOUBLE_EQ(n.components[0].prob, 0.5);
    EXPECT_DOUBLE_EQ(n.components[1].prob, 0.25);
    EXPECT_DOUBLE_EQ(n.components[2].prob, 0.25);
}

TEST(Normalize, ZeroMassRejected) {
    Symptom s{"s", "s", Source::Synthetic, {{"a", "a", 1, 0}, {"b", "b", 1, 0}}};
    try {
        normalize(s);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Domain);
    }
}

TEST(NormalizeProperty, IdempotentAndRatioPreserving) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 2000; ++trial) {
        const std::size_t n = 1 + rng() % 8;
        Symptom s{"s", "s", Source::Synthetic, {}};
        for (std::size_t i = 0; i < n; ++i) {
            // Some exact zeros to exercise the "p_j > 0" guard.
            const double p = (rng() % 5 == 0) ? 0.0 : u(rng);
            s.components.push_back({"c" + std::to_string(i), "", 1.0 + u(rng), p});
        }
        if (!(s.probability_mass() > 0.0)) s.components[0].prob = 0.3;

        const Symptom once = normalize(s);
        const Symptom twice = normalize(once);
        EXPECT_NEAR(once.probability_mass(), 1.0, 1e-9);
        for (std::size_t i = 0; i < n; ++i) {
            EXPECT_NEAR(twice.components[i].prob, once.components[i].prob, 1e-12);
            for (std::size_t j = 0; j < n; ++j) {
                if (s.components[j].prob > 0.0) {
                    EXPECT_NEAR(once.components[i].prob / once.components[j].prob,
                                s.components[i].prob / s.components[j].prob,
                                1e-9 * std::max(1.0, s.components[i].prob / s.components[j].prob));
                }
            }
        }
    }
}

TEST(BundledDataset, PublishedRowsAndFlags) {
    const FaultModel m = bundled_dataset();
    const Symptom& s = m.symptom("poor-idling");
    EXPECT_EQ(s.source, Source::Paper);
    EXPECT_EQ(s.component("air-leak").name, "air leak into system");
    EXPECT_EQ(s.component("air-leak").cost, 15.0);
    EXPECT_EQ(s.component("air-leak").prob, 0.526);
    std::vector<double> costs, probs;
    for (const auto& c : s.components) {
        costs.push_back(c.cost);
        probs.push_back(c.prob);
    }
    EXPECT_EQ(costs, (std::vector<double>{15, 30, 15, 30}));
    EXPECT_EQ(probs, (std::vector<double>{0.263, 0.105, 0.526, 0.105}));

    const ExpertRule& rule = m.rule("expert-2", "poor-idling");
    EXPECT_EQ(rule.strategy.order.front(), "idle-speed");
    EXPECT_EQ(rule.strategy, testing::expert_order());

    for (const auto& sym : m.symptoms()) {
        if (sym.id != "poor-idling") EXPECT_EQ(sym.source, Source::Synthetic) << sym.id;
    }
}

TEST(BundledDataset, ChargingSystemCauses) {
    const Symptom s = bundled_dataset().symptom("charging-system-fails");
    ASSERT_EQ(s.size(), 4u);
    EXPECT_EQ(s.components[0].name, "stator-grounded");
    EXPECT_EQ(s.components[1].name, "stator-defective");
    EXPECT_EQ(s.components[2].name, "rotor-defective");
    EXPECT_EQ(s.components[3].name, "def-regulator/rectifier");
}

TEST(BundledDataset, EveryRuleIsAPermutation) {
    const FaultModel m = bundled_dataset();
    EXPECT_EQ(m.experts(), (std::vector<std::string>{"expert-1", "expert-2"}));
    for (const auto& r : m.expert_rules()) {
        EXPECT_NO_THROW(check_permutation(r.strategy, m.symptom(r.strategy.symptom_id)));
    }
}

TEST(ModelLookup, UnknownSymptomListsValidIds) {
    try {
        bundled_dataset().symptom("poor-idlin");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotFound);
        EXPECT_NE(std::string(e.what()).find("poor-idling"), std::string::npos);
    }
}

}  // namespace
}  // namespace seqdiag
