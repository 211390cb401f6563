// SPDX-License-Identifier: MIT
#pragma once

// Multi-class linear discriminant analysis with a shared (pooled) covariance.

#include "rfflab/signal_model.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace rfflab {

inline constexpr double kDefaultRidge = 1e-6;

struct LdaModel {
    std::size_t dimension = 0;
    std::vector<std::vector<double>> class_means;
    std::vector<double> pooled_covariance_inverse;  // dimension x dimension, row-major
    std::vector<double> priors;

    // Linear discriminant of each class: weights[c] . x + offsets[c].
    std::vector<std::vector<double>> weights;
    std::vector<double> offsets;

    std::size_t classes() const { return class_means.size(); }
};

// train[c] holds the samples of class c. The pooled covariance is the
// within-class scatter over (N_total - C), plus ridge * (trace / K) * I.
// Throws std::invalid_argument on fewer than two classes, a class with fewer
// than two samples or inconsistent dimensions, and std::runtime_error naming
// the smallest eigenvalue when the regularized covariance is singular.
LdaModel fit(std::span<const FeatureMatrix> train, double ridge = kDefaultRidge);

std::vector<double> discriminants(const LdaModel& model, std::span<const double> sample);

// Class with the largest discriminant; exact ties go to the lowest index.
// Throws std::invalid_argument on a dimension mismatch.
std::size_t predict(const LdaModel& model, std::span<const double> sample);

// Fraction of rows of test[c] predicted as c. Throws std::invalid_argument
// when there are no test rows or the class count differs from the model.
double accuracy(const LdaModel& model, std::span<const FeatureMatrix> test);

}  // namespace rfflab
