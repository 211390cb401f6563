// SPDX-License-Identifier: MIT
#pragma once

// Train-versus-test silhouette: every training sample is scored against the
// test samples of its own device (intra) and the closest other device (inter).

#include "rfflab/signal_model.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace rfflab {

struct NormalizedSample {
    std::vector<double> values;
    bool degenerate = false;  // input was constant; values are all zero
};

// Per-sample z-score across subcarriers, population (divisor K) deviation.
// Throws std::invalid_argument for K < 2.
NormalizedSample normalize(std::span<const double> raw);

// Normalizes every row of a feature matrix. Returns the number of constant rows.
std::size_t normalize_rows(FeatureMatrix& features);

// Mean squared Euclidean distance from train to each test sample.
// Throws std::invalid_argument on an empty set or a length mismatch.
double intra_distance(const NormalizedSample& train, std::span<const NormalizedSample> test_set);

struct DeviceSamples {
    std::size_t device = 0;
    std::vector<NormalizedSample> samples;
};

// Smallest per-device mean squared distance over the other devices' test sets.
double inter_distance(const NormalizedSample& train, std::span<const DeviceSamples> other_test_sets);

struct SilhouetteBreakdown {
    double intra = 0.0;
    double inter = 0.0;
    double coefficient = 0.0;
};

// (inter - intra) / max(inter, intra), or 0 when both are 0.
SilhouetteBreakdown silhouette_coefficient(double intra, double inter);

// Average coefficient over every training sample of every device. Rows are
// normalized first. train_sets[i] and test_sets[i] belong to the same device.
double silhouette_score(std::span<const FeatureMatrix> train_sets, std::span<const FeatureMatrix> test_sets);

// Same score for sets whose rows are already normalized.
double silhouette_score_normalized(std::span<const FeatureMatrix> train_sets,
                                   std::span<const FeatureMatrix> test_sets);

}  // namespace rfflab
