#include <seqdiag/engine.hpp>
#include <seqdiag/sensitivity.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <ostream>
#include <random>
#include <thread>

namespace seqdiag {

double error_sigma(double error_factor) noexcept {
    return std::log(error_factor) / kZ70;
}

double sample_cost(double nominal_cost, double error_factor, double z) noexcept {
    const double shift = error_sigma(error_factor) * z;
    if (shift == 0.0) return nominal_cost;
    return nominal_cost * std::exp(shift);
}

PerturbedProb sample_prob(double nominal_prob, double error_factor, double z) noexcept {
    if (nominal_prob <= 0.0 || nominal_prob >= 1.0) return {nominal_prob, false};
    const double shift = error_sigma(error_factor) * z;
    if (shift == 0.0) return {nominal_prob, true};
    const double odds = nominal_prob / (1.0 - nominal_prob) * std::exp(shift);
    return {odds / (1.0 + odds), true};
}

void SensitivityConfig::validate() const {
    if (!std::isfinite(error_factor) || error_factor < 1.0) {
        throw Error(ErrorKind::Validation, "error factor must be >= 1", "error_factor");
    }
    if (n_samples == 0) throw Error(ErrorKind::Validation, "n_samples must be positive", "n_samples");
    if (!(band_mass > 0.0 && band_mass < 1.0)) {
        throw Error(ErrorKind::Validation, "band mass must lie in (0, 1)", "band_mass");
    }
    for (double q : quantile_levels) {
        if (!(q >= 0.0 && q <= 1.0)) throw Error(ErrorKind::Validation, "quantile levels must lie in [0, 1]", "quantiles");
    }
    if (max_cdf_points < 2) throw Error(ErrorKind::Validation, "need at least 2 CDF points", "max_cdf_points");
}

namespace {

// Runs fn(block) for every block, spread over the available hardware threads.
template <typename Fn>
void for_each_block(std::size_t n_blocks, Fn&& fn) {
    const std::size_t workers =
        std::min<std::size_t>(n_blocks, std::max(1u, std::thread::hardware_concurrency()));
    if (workers <= 1) {
        for (std::size_t b = 0; b < n_blocks; ++b) fn(b);
        return;
    }
    std::vector<std::future<void>> jobs;
    jobs.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        jobs.push_back(std::async(std::launch::async, [&, w] {
            for (std::size_t b = w; b < n_blocks; b += workers) fn(b);
        }));
    }
    for (auto& j : jobs) j.get();
}

std::size_t block_count(std::size_t n_samples) {
    return (n_samples + NormalDraws::kBlockSize - 1) / NormalDraws::kBlockSize;
}

}  // namespace

NormalDraws::NormalDraws(std::uint64_t seed, std::size_t n_samples, std::size_t n_components)
    : n_samples_(n_samples), n_components_(n_components), z_(n_samples * n_components * 2) {
    const std::size_t per_sample = n_components * 2;
    for_each_block(block_count(n_samples), [&](std::size_t block) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32)};
        std::mt19937_64 rng(seq);
        std::normal_distribution<double> normal(0.0, 1.0);
        const std::size_t first = block * kBlockSize;
        const std::size_t last = std::min(n_samples_, first + kBlockSize);
        for (std::size_t i = first * per_sample; i < last * per_sample; ++i) z_[i] = normal(rng);
    });
}

namespace {

struct ResolvedPair {
    std::vector<std::size_t> expert;
    std::vector<std::size_t> cp;
};

ResolvedPair resolve_pair(const Symptom& symptom, const TestStrategy& expert, const TestStrategy& cp) {
    return {resolve_order(expert, symptom), resolve_order(cp, symptom)};
}

void rescale(std::vector<double>& probs) {
    double mass = 0.0;
    for (double p : probs) mass += p;
    for (double& p : probs) p /= mass;
}

}  // namespace

double nominal_diff(const Symptom& symptom, const TestStrategy& expert, const TestStrategy& cp, bool renormalize) {
    const auto orders = resolve_pair(symptom, expert, cp);
    std::vector<double> costs, probs;
    for (const auto& c : symptom.components) {
        costs.push_back(c.cost);
        probs.push_back(c.prob);
    }
    if (renormalize) {
        if (!(symptom.probability_mass() > 0.0)) {
            throw Error(ErrorKind::Domain, "symptom '" + symptom.id + "' has zero probability mass");
        }
        rescale(probs);
    }
    return expected_cost(costs, probs, orders.expert) - expected_cost(costs, probs, orders.cp);
}

std::vector<double> diff_samples(const Symptom& symptom, const TestStrategy& expert, const TestStrategy& cp,
                                 double error_factor, const NormalDraws& draws, bool renormalize) {
    const auto orders = resolve_pair(symptom, expert, cp);
    const std::size_t n = symptom.size();
    if (draws.components() != n) {
        throw Error(ErrorKind::Domain, "draw matrix has " + std::to_string(draws.components()) +
                                           " components, symptom has " + std::to_string(n));
    }
    if (renormalize && !(symptom.probability_mass() > 0.0)) {
        throw Error(ErrorKind::Domain, "symptom '" + symptom.id + "' has zero probability mass");
    }

    std::vector<double> out(draws.samples());
    for_each_block(block_count(draws.samples()), [&](std::size_t block) {
        std::vector<double> costs(n), probs(n);
        const std::size_t first = block * NormalDraws::kBlockSize;
        const std::size_t last = std::min(draws.samples(), first + NormalDraws::kBlockSize);
        for (std::size_t i = first; i < last; ++i) {
            for (std::size_t k = 0; k < n; ++k) {
                const Component& c = symptom.components[k];
                costs[k] = sample_cost(c.cost, error_factor, draws.cost_z(i, k));
                probs[k] = sample_prob(c.prob, error_factor, draws.prob_z(i, k)).value;
            }
            if (renormalize) rescale(probs);
            out[i] = expected_cost(costs, probs, orders.expert) - expected_cost(costs, probs, orders.cp);
        }
    });
    return out;
}

double empirical_quantile(std::span<const double> sorted, double level) {
    if (sorted.empty()) throw Error(ErrorKind::Domain, "quantile of an empty sample");
    const double h = static_cast<double>(sorted.size() - 1) * std::clamp(level, 0.0, 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

SensitivitySummary summarize(std::vector<double> samples, double nominal, const SensitivityConfig& cfg) {
    if (samples.empty()) throw Error(ErrorKind::Validation, "n_samples must be positive", "n_samples");
    SensitivitySummary s;
    s.error_factor = cfg.error_factor;
    s.n_samples = samples.size();
    s.nominal_diff = nominal;

    std::size_t positive = 0;
    double sum = 0.0;
    for (double d : samples) {
        sum += d;
        if (d > 0.0) ++positive;
    }
    std::sort(samples.begin(), samples.end());
    const auto n = static_cast<double>(samples.size());
    s.min_diff = samples.front();
    s.max_diff = samples.back();
    s.mean_diff = std::clamp(sum / n, s.min_diff, s.max_diff);
    s.prob_positive = static_cast<double>(positive) / n;

    s.band_lower = empirical_quantile(samples, cfg.lower_level());
    s.band_upper = empirical_quantile(samples, cfg.upper_level());
    s.quantiles[cfg.lower_level()] = s.band_lower;
    s.quantiles[cfg.upper_level()] = s.band_upper;
    for (double q : cfg.quantile_levels) s.quantiles[q] = empirical_quantile(samples, q);

    const std::size_t m = std::min(samples.size(), cfg.max_cdf_points);
    s.cdf_points.reserve(m);
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t rank = m == 1 ? samples.size() - 1 : k * (samples.size() - 1) / (m - 1);
        s.cdf_points.push_back({samples[rank], static_cast<double>(rank + 1) / n});
    }
    return s;
}

SensitivitySummary diff_distribution(const Symptom& symptom, const TestStrategy& expert, const TestStrategy& cp,
                                     const SensitivityConfig& cfg) {
    cfg.validate();
    const NormalDraws draws(cfg.seed, cfg.n_samples, symptom.size());
    auto samples = diff_samples(symptom, expert, cp, cfg.error_factor, draws, cfg.renormalize_samples);
    return summarize(std::move(samples), nominal_diff(symptom, expert, cp, cfg.renormalize_samples), cfg);
}

namespace {

double lower_band(const Symptom& symptom, const TestStrategy& expert, const TestStrategy& cp,
                  const SensitivityConfig& cfg, const NormalDraws& draws, double s) {
    auto samples = diff_samples(symptom, expert, cp, s, draws, cfg.renormalize_samples);
    std::sort(samples.begin(), samples.end());
    return empirical_quantile(samples, cfg.lower_level());
}

}  // namespace

CriticalErrorFactor critical_error_factor(const Symptom& symptom, const TestStrategy& expert,
                                          const TestStrategy& cp, const SensitivityConfig& cfg, double s_max) {
    cfg.validate();
    if (!(s_max > 1.0)) throw Error(ErrorKind::Validation, "s_max must exceed 1", "s_max");
    const NormalDraws draws(cfg.seed, cfg.n_samples, symptom.size());

    CriticalErrorFactor out;
    out.s_max = s_max;

    // At s = 1 every sample equals the nominal difference.
    ++out.evaluations;
    if (lower_band(symptom, expert, cp, cfg, draws, 1.0) <= 0.0) {
        out.s_star = 1.0;
        out.lower_at_s_max = lower_band(symptom, expert, cp, cfg, draws, s_max);
        return out;
    }
    ++out.evaluations;
    out.lower_at_s_max = lower_band(symptom, expert, cp, cfg, draws, s_max);
    if (out.lower_at_s_max > 0.0) return out;

    double lo = 1.0;   // band strictly above zero
    double hi = s_max; // band at or below zero
    while (hi - lo > 0.01) {
        const double mid = 0.5 * (lo + hi);
        ++out.evaluations;
        if (lower_band(symptom, expert, cp, cfg, draws, mid) <= 0.0) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    out.s_star = hi;
    return out;
}

std::vector<SweepPoint> sweep(const Symptom& symptom, const TestStrategy& expert, const TestStrategy& cp,
                              const SensitivityConfig& cfg, double lo, double hi, double step) {
    cfg.validate();
    if (!(lo >= 1.0 && hi >= lo && step > 0.0)) {
        throw Error(ErrorKind::Validation, "sweep needs 1 <= lo <= hi and step > 0", "sweep");
    }
    const NormalDraws draws(cfg.seed, cfg.n_samples, symptom.size());
    std::vector<SweepPoint> out;
    const auto steps = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
    for (std::size_t k = 0; k <= steps; ++k) {
        const double s = lo + static_cast<double>(k) * step;
        auto samples = diff_samples(symptom, expert, cp, s, draws, cfg.renormalize_samples);
        const auto positive = std::count_if(samples.begin(), samples.end(), [](double d) { return d > 0.0; });
        std::sort(samples.begin(), samples.end());
        out.push_back({s, empirical_quantile(samples, cfg.lower_level()), empirical_quantile(samples, 0.5),
                       empirical_quantile(samples, cfg.upper_level()),
                       static_cast<double>(positive) / static_cast<double>(samples.size())});
    }
    return out;
}

void write_cdf_csv(std::ostream& out, const SensitivitySummary& summary) {
    out << "diff,cumulative_fraction\n";
    for (const auto& p : summary.cdf_points) out << fmt::format("{:.17g},{:.17g}\n", p.diff, p.cumulative_fraction);
}

}  // namespace seqdiag
