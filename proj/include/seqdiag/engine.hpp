#pragma once

// Expected-cost evaluation and optimal sequencing for single-fault diagnosis.
//
// A strategy tests components one at a time until the faulty one is found.
// The j-th test is reached iff none of its predecessors is faulty, so its
// cost is weighted by the probability mass of itself and its successors. The
// last test is always performed when reached (positive identification).
// Sorting by cost/probability ratio minimizes that expected cost.

#include <seqdiag/model.hpp>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace seqdiag {

struct SequencedTest {
    std::string component_id;
    double cost = 0.0;
    double prob = 0.0;
    double cp_ratio = 0.0;  // cost / prob, +inf when prob == 0
    std::size_t rank = 0;   // 1-based position
};

struct EvaluatedStrategy {
    TestStrategy strategy;
    double expected_cost = 0.0;
    std::vector<double> reach_probability;  // per position
    std::vector<double> terms;              // cost * reach_probability, per position
};

// Throws Error{Permutation} when `strategy` does not cover `symptom` exactly.
// The symptom is expected to be normalized.
EvaluatedStrategy expected_cost(const TestStrategy& strategy, const Symptom& symptom);

// Index-level evaluation: order[j] indexes into costs/probs. No validation;
// used on hot paths after the strategy has been resolved once.
double expected_cost(std::span<const double> costs, std::span<const double> probs,
                     std::span<const std::size_t> order) noexcept;

// Component indices of `strategy` within `symptom`, after check_permutation.
std::vector<std::size_t> resolve_order(const TestStrategy& strategy, const Symptom& symptom);

// Components in non-decreasing cost/prob order. Equal ratios keep input order;
// zero-probability components go last, in input order. Ratios use the
// probabilities as given, and since ordering is scale free the symptom need
// not be normalized.
std::vector<SequencedTest> cp_sequence(const Symptom& symptom);
TestStrategy cp_strategy(const Symptom& symptom);

// EC(strategy) - EC(strategy with positions j and j+1 exchanged), computed
// from the exchange identity C_j p_k - C_k p_j. `position` is 1-based and
// must satisfy 1 <= position < n.
double swap_delta(const Symptom& symptom, const TestStrategy& strategy, std::size_t position);

struct OptimumResult {
    TestStrategy strategy;
    double expected_cost = 0.0;
    std::size_t permutations = 0;
};

inline constexpr std::size_t kMaxBruteForceComponents = 10;

// Exhaustive search over all n! orders. Among orders whose EC is within a
// 1e-12 relative band of the minimum, returns the lexicographically first in
// input-index order. Throws Error{Domain} when n > kMaxBruteForceComponents.
OptimumResult brute_force_optimum(const Symptom& symptom);

// Posterior after the test of `passed` comes back negative: the component is
// removed and the rest rescaled by 1 / (1 - p_passed).
Symptom condition_on_pass(const Symptom& symptom, const std::string& passed);

}  // namespace seqdiag
