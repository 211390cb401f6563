// SPDX-License-Identifier: MIT
#pragma once

// Monte-Carlo harness: one trial generates fingerprints, channels and samples
// for every device, then scores them with the silhouette and an LDA
// classifier. A sweep repeats trials over scenarios, methods and SNRs.

#include "rfflab/channel_model.hpp"
#include "rfflab/classifier.hpp"
#include "rfflab/signal_model.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace rfflab {

struct ExperimentConfig {
    ModelParams params;
    std::vector<ChannelScenario> scenarios{kAllScenarios.begin(), kAllScenarios.end()};
    std::vector<Method> methods{kAllMethods.begin(), kAllMethods.end()};
    std::vector<double> snr_db_grid{0, 5, 10, 15, 20, 25, 30, 35, 40};
    std::size_t n_devices = 10;
    std::size_t n_train = 100;
    std::size_t n_test = 100;
    std::size_t n_trials = 200;
    std::uint64_t master_seed = 42;
    CsiRedraw redraw = CsiRedraw::PerPhase;
    bool normalize_for_lda = true;
    double lda_ridge = kDefaultRidge;

    // Throws std::invalid_argument naming the first violated invariant.
    void validate() const;
};

// Fraction of non-finite samples above which a trial is flagged as degraded.
inline constexpr double kDegradedNonfiniteRate = 0.05;

struct TrialFeatures {
    std::vector<FeatureMatrix> train;  // one per device, raw features
    std::vector<FeatureMatrix> test;
    std::size_t generated = 0;
    std::size_t dropped = 0;  // non-finite samples removed

    double nonfinite_rate() const
    {
        return generated == 0 ? 0.0 : static_cast<double>(dropped) / static_cast<double>(generated);
    }
};

// Generates the feature sets of one trial. Every random draw comes from a
// stream keyed by (master seed, scenario, method, SNR index, trial, device,
// phase, sample, role), so the result does not depend on the call order.
// snr_db must be an entry of cfg.snr_db_grid. Samples containing a non-finite
// value are dropped.
TrialFeatures generate_trial(const ExperimentConfig& cfg, ChannelScenario scenario, Method method, double snr_db,
                             std::size_t trial_index);

struct TrialResult {
    double silhouette = 0.0;
    double accuracy = 0.0;
    double nonfinite_rate = 0.0;
    bool degraded = false;
};

// Throws std::runtime_error if dropping non-finite samples leaves a device
// without enough data to score, and propagates classifier errors.
TrialResult run_trial(const ExperimentConfig& cfg, ChannelScenario scenario, Method method, double snr_db,
                      std::size_t trial_index);

struct SweepRecord {
    ChannelScenario scenario = ChannelScenario::Deterministic;
    Method method = Method::Raw;
    double snr_db = 0.0;
    double silhouette_empirical = 0.0;
    double silhouette_empirical_stderr = 0.0;
    double silhouette_analytic = 0.0;  // NaN when the closed form is undefined
    double accuracy = 0.0;
    double accuracy_stderr = 0.0;
    double nonfinite_rate = 0.0;
    std::size_t degraded_trials = 0;
};

// Runs every (scenario, method, snr, trial) with up to `threads` workers
// (0 means one). Records are sorted by (scenario, method, snr) and are
// identical for any thread count.
std::vector<SweepRecord> run_sweep(const ExperimentConfig& cfg, std::size_t threads = 1);

struct MeanAndError {
    double mean = 0.0;
    double standard_error = 0.0;
};

// Sample mean and standard error of the mean (0 for a single value).
MeanAndError mean_and_stderr(std::span<const double> values);

inline constexpr std::size_t kMinPermutations = 1000;

struct CorrelationReport {
    double pearson_r = 0.0;
    double p_value = 1.0;
    double ls_slope = 0.0;
    double ls_intercept = 0.0;
    std::size_t n_points = 0;
};

// Pearson correlation of (silhouette, accuracy) pairs, two-sided permutation
// p-value over shuffled accuracies, and the least-squares line accuracy =
// slope * silhouette + intercept. Throws std::invalid_argument for fewer than
// three points or too few permutations and std::domain_error when either
// column has zero variance.
CorrelationReport correlate(std::span<const std::pair<double, double>> points, std::size_t n_permutations,
                            std::uint64_t seed);
CorrelationReport correlate(std::span<const SweepRecord> records, std::size_t n_permutations, std::uint64_t seed);

}  // namespace rfflab
