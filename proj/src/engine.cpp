#include <seqdiag/engine.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace seqdiag {

std::vector<std::size_t> resolve_order(const TestStrategy& strategy, const Symptom& symptom) {
    check_permutation(strategy, symptom);
    std::vector<std::size_t> idx;
    idx.reserve(strategy.order.size());
    for (const auto& id : strategy.order) idx.push_back(*symptom.index_of(id));
    return idx;
}

double expected_cost(std::span<const double> costs, std::span<const double> probs,
                     std::span<const std::size_t> order) noexcept {
    // Walk backwards so each reach probability is a suffix sum.
    double tail = 0.0;
    double ec = 0.0;
    for (std::size_t j = order.size(); j-- > 0;) {
        tail += probs[order[j]];
        ec += costs[order[j]] * tail;
    }
    return ec;
}

EvaluatedStrategy expected_cost(const TestStrategy& strategy, const Symptom& symptom) {
    if (!strategy.symptom_id.empty() && strategy.symptom_id != symptom.id) {
        throw Error(ErrorKind::Permutation,
                    "strategy is for symptom '" + strategy.symptom_id + "', not '" + symptom.id + "'");
    }
    const auto order = resolve_order(strategy, symptom);
    const std::size_t n = order.size();

    EvaluatedStrategy out;
    out.strategy = strategy;
    out.strategy.symptom_id = symptom.id;
    out.reach_probability.assign(n, 0.0);
    out.terms.assign(n, 0.0);

    double tail = 0.0;
    for (std::size_t j = n; j-- > 0;) {
        const Component& c = symptom.components[order[j]];
        tail += c.prob;
        out.reach_probability[j] = tail;
        out.terms[j] = c.cost * tail;
    }
    // Summed in the same order as the index-level overload so both agree bit for bit.
    for (std::size_t j = n; j-- > 0;) out.expected_cost += out.terms[j];
    return out;
}

namespace {

double ratio(const Component& c) noexcept {
    return c.prob > 0.0 ? c.cost / c.prob : std::numeric_limits<double>::infinity();
}

}  // namespace

std::vector<SequencedTest> cp_sequence(const Symptom& symptom) {
    std::vector<std::size_t> idx(symptom.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return ratio(symptom.components[a]) < ratio(symptom.components[b]);
    });

    std::vector<SequencedTest> out;
    out.reserve(idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r) {
        const Component& c = symptom.components[idx[r]];
        out.push_back(SequencedTest{c.id, c.cost, c.prob, ratio(c), r + 1});
    }
    return out;
}

TestStrategy cp_strategy(const Symptom& symptom) {
    TestStrategy s{symptom.id, {}};
    for (const auto& t : cp_sequence(symptom)) s.order.push_back(t.component_id);
    return s;
}

double swap_delta(const Symptom& symptom, const TestStrategy& strategy, std::size_t position) {
    const auto order = resolve_order(strategy, symptom);
    if (position < 1 || position >= order.size()) {
        throw Error(ErrorKind::Domain, "swap position " + std::to_string(position) + " outside [1, " +
                                           std::to_string(order.size() == 0 ? 0 : order.size() - 1) + "]");
    }
    const Component& first = symptom.components[order[position - 1]];
    const Component& second = symptom.components[order[position]];
    return first.cost * second.prob - second.cost * first.prob;
}

OptimumResult brute_force_optimum(const Symptom& symptom) {
    const std::size_t n = symptom.size();
    if (n > kMaxBruteForceComponents) {
        throw Error(ErrorKind::Domain, "brute force is limited to " + std::to_string(kMaxBruteForceComponents) +
                                           " components (symptom has " + std::to_string(n) +
                                           "); use cp_sequence instead");
    }
    std::vector<double> costs, probs;
    for (const auto& c : symptom.components) {
        costs.push_back(c.cost);
        probs.push_back(c.prob);
    }

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::vector<std::size_t> best = perm;
    double best_ec = std::numeric_limits<double>::infinity();
    std::size_t count = 0;
    do {
        ++count;
        const double ec = expected_cost(costs, probs, perm);
        // Lexicographic enumeration: only a clear improvement displaces the
        // earliest optimum, so rounding noise cannot reorder ties.
        if (count == 1 || ec < best_ec - 1e-12 * std::max(1.0, std::abs(best_ec))) {
            best_ec = ec;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    OptimumResult out;
    out.strategy.symptom_id = symptom.id;
    for (auto i : best) out.strategy.order.push_back(symptom.components[i].id);
    out.expected_cost = best_ec;
    out.permutations = count;
    return out;
}

Symptom condition_on_pass(const Symptom& symptom, const std::string& passed) {
    const auto idx = symptom.index_of(passed);
    if (!idx) throw Error(ErrorKind::NotFound, "unknown component '" + passed + "' in symptom '" + symptom.id + "'");
    const double p = symptom.components[*idx].prob;
    const double rest = 1.0 - p;
    if (!(rest > 0.0)) {
        throw Error(ErrorKind::Domain, "component '" + passed + "' has probability 1; a pass contradicts the model");
    }
    Symptom out = symptom;
    out.components.erase(out.components.begin() + static_cast<std::ptrdiff_t>(*idx));
    for (auto& c : out.components) c.prob /= rest;
    return out;
}

}  // namespace seqdiag
