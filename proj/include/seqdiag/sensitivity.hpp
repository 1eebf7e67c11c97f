#pragma once

// Monte Carlo robustness of the expert-vs-C/P comparison.
//
// Every raw cost and raw probability is perturbed independently with a
// multiplicative error factor s: costs are lognormal with median at the
// nominal value, probabilities are lognormal in odds space. In both cases
// [m/s, m*s] holds the central 70% of the mass. The two strategies stay fixed
// at their nominal orders; only the inputs move.

#include <seqdiag/model.hpp>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace seqdiag {

// Standard normal quantile at 0.85: sigma = ln(s) / kZ70 puts 70% of the
// mass inside [m/s, m*s].
inline constexpr double kZ70 = 1.036433;
inline constexpr std::uint64_t kDefaultSeed = 19880801;

double error_sigma(double error_factor) noexcept;

// c * exp(sigma * z). Exactly c when s == 1.
double sample_cost(double nominal_cost, double error_factor, double z) noexcept;

struct PerturbedProb {
    double value = 0.0;
    bool perturbed = false;  // false for p in {0, 1}, which pass through unchanged
};

// Logit-normal perturbation: odds * exp(sigma * z), mapped back to (0, 1).
PerturbedProb sample_prob(double nominal_prob, double error_factor, double z) noexcept;

struct SensitivityConfig {
    double error_factor = 2.0;
    std::size_t n_samples = 10000;
    std::uint64_t seed = kDefaultSeed;
    double band_mass = 0.70;
    bool renormalize_samples = true;
    // Reported in addition to the two band edges.
    std::vector<double> quantile_levels{0.5};
    std::size_t max_cdf_points = 201;

    // Throws Error{Validation}.
    void validate() const;
    double lower_level() const noexcept { return (1.0 - band_mass) / 2.0; }
    double upper_level() const noexcept { return 1.0 - (1.0 - band_mass) / 2.0; }
};

struct CdfPoint {
    double diff = 0.0;
    double cumulative_fraction = 0.0;

    friend bool operator==(const CdfPoint&, const CdfPoint&) = default;
};

struct SensitivitySummary {
    double error_factor = 1.0;
    std::size_t n_samples = 0;
    double nominal_diff = 0.0;  // EC_expert - EC_cp at unperturbed values
    double mean_diff = 0.0;
    double min_diff = 0.0;
    double max_diff = 0.0;
    double band_lower = 0.0;  // quantile at lower_level()
    double band_upper = 0.0;  // quantile at upper_level()
    std::map<double, double> quantiles;
    double prob_positive = 0.0;
    std::vector<CdfPoint> cdf_points;

    friend bool operator==(const SensitivitySummary&, const SensitivitySummary&) = default;
};

// Standard normal draws, two per component per sample (cost, then prob).
// Samples are produced in fixed-size blocks, each from its own stream seeded
// by (seed, block index), so the values do not depend on how many workers
// generate them.
class NormalDraws {
public:
    static constexpr std::size_t kBlockSize = 2048;

    NormalDraws(std::uint64_t seed, std::size_t n_samples, std::size_t n_components);

    std::size_t samples() const noexcept { return n_samples_; }
    std::size_t components() const noexcept { return n_components_; }
    double cost_z(std::size_t sample, std::size_t component) const noexcept {
        return z_[(sample * n_components_ + component) * 2];
    }
    double prob_z(std::size_t sample, std::size_t component) const noexcept {
        return z_[(sample * n_components_ + component) * 2 + 1];
    }

private:
    std::size_t n_samples_;
    std::size_t n_components_;
    std::vector<double> z_;
};

// Per-sample EC_expert - EC_cp on perturbed inputs. `symptom` carries raw
// assessed values.
std::vector<double> diff_samples(const Symptom& symptom, const TestStrategy& expert, const TestStrategy& cp,
                                 double error_factor, const NormalDraws& draws, bool renormalize);

double nominal_diff(const Symptom& symptom, const TestStrategy& expert, const TestStrategy& cp, bool renormalize);

// Linear interpolation between order statistics; `sorted` ascending.
double empirical_quantile(std::span<const double> sorted, double level);

SensitivitySummary summarize(std::vector<double> samples, double nominal, const SensitivityConfig& cfg);

SensitivitySummary diff_distribution(const Symptom& symptom, const TestStrategy& expert, const TestStrategy& cp,
                                     const SensitivityConfig& cfg);

struct CriticalErrorFactor {
    // Smallest s at which the lower band quantile reaches zero; unset when the
    // C/P sequence still dominates at s_max.
    std::optional<double> s_star;
    double s_max = 0.0;
    double lower_at_s_max = 0.0;
    std::size_t evaluations = 0;
};

// Bisection to width 0.01 over [1, s_max], reusing one set of draws for every
// s so the band quantile moves continuously with s.
CriticalErrorFactor critical_error_factor(const Symptom& symptom, const TestStrategy& expert,
                                          const TestStrategy& cp, const SensitivityConfig& cfg, double s_max);

struct SweepPoint {
    double error_factor = 1.0;
    double band_lower = 0.0;
    double median = 0.0;
    double band_upper = 0.0;
    double prob_positive = 0.0;
};

// Band edges over s in [lo, hi] with common draws.
std::vector<SweepPoint> sweep(const Symptom& symptom, const TestStrategy& expert, const TestStrategy& cp,
                              const SensitivityConfig& cfg, double lo, double hi, double step);

// Columns: diff,cumulative_fraction. Full precision.
void write_cdf_csv(std::ostream& out, const SensitivitySummary& summary);

}  // namespace seqdiag
