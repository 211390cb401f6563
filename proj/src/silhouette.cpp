// SPDX-License-Identifier: MIT
#include "rfflab/silhouette.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace rfflab {

namespace {

void normalize_into(std::span<const double> raw, std::span<double> out, bool& degenerate)
{
    const double n = static_cast<double>(raw.size());
    const double mean = std::accumulate(raw.begin(), raw.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : raw) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / n);
    degenerate = !(sd > 0.0);
    for (std::size_t k = 0; k < raw.size(); ++k) {
        out[k] = degenerate ? 0.0 : (raw[k] - mean) / sd;
    }
}

double squared_distance(std::span<const double> a, std::span<const double> b)
{
    double d = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double t = a[k] - b[k];
        d += t * t;
    }
    return d;
}

// Mean vector and mean squared norm of one test set; the average squared
// distance from a to the set is |a|^2 - 2 a.mean + mean_sq_norm.
struct SetSummary {
    std::vector<double> mean;
    double mean_sq_norm = 0.0;
};

SetSummary summarize(const FeatureMatrix& set)
{
    SetSummary s;
    s.mean.assign(set.cols, 0.0);
    const std::size_t n = set.rows();
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = set.row(i);
        double sq = 0.0;
        for (std::size_t k = 0; k < set.cols; ++k) {
            s.mean[k] += r[k];
            sq += r[k] * r[k];
        }
        s.mean_sq_norm += sq;
    }
    for (auto& v : s.mean) v /= static_cast<double>(n);
    s.mean_sq_norm /= static_cast<double>(n);
    return s;
}

double mean_distance(std::span<const double> a, double a_sq_norm, const SetSummary& s)
{
    double dot = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) dot += a[k] * s.mean[k];
    return std::max(0.0, a_sq_norm - 2.0 * dot + s.mean_sq_norm);
}

void check_sets(std::span<const FeatureMatrix> train_sets, std::span<const FeatureMatrix> test_sets)
{
    if (train_sets.size() < 2 || train_sets.size() != test_sets.size()) {
        throw std::invalid_argument("silhouette_score: need matching train/test sets for at least two devices");
    }
    const std::size_t K = train_sets.front().cols;
    for (std::size_t i = 0; i < train_sets.size(); ++i) {
        if (train_sets[i].rows() == 0 || test_sets[i].rows() == 0) {
            throw std::invalid_argument("silhouette_score: every device needs train and test samples");
        }
        if (train_sets[i].cols != K || test_sets[i].cols != K) {
            throw std::invalid_argument("silhouette_score: inconsistent subcarrier count");
        }
    }
}

}  // namespace

NormalizedSample normalize(std::span<const double> raw)
{
    if (raw.size() < 2) {
        throw std::invalid_argument("normalize: need at least two subcarriers");
    }
    NormalizedSample s;
    s.values.resize(raw.size());
    normalize_into(raw, s.values, s.degenerate);
    return s;
}

std::size_t normalize_rows(FeatureMatrix& features)
{
    if (features.cols < 2) {
        throw std::invalid_argument("normalize_rows: need at least two subcarriers");
    }
    std::size_t degenerate_rows = 0;
    for (std::size_t i = 0; i < features.rows(); ++i) {
        auto r = features.row(i);
        bool degenerate = false;
        normalize_into(r, r, degenerate);
        degenerate_rows += degenerate ? 1 : 0;
    }
    return degenerate_rows;
}

double intra_distance(const NormalizedSample& train, std::span<const NormalizedSample> test_set)
{
    if (test_set.empty()) {
        throw std::invalid_argument("intra_distance: empty test set");
    }
    double total = 0.0;
    for (const auto& t : test_set) {
        if (t.values.size() != train.values.size()) {
            throw std::invalid_argument("intra_distance: length mismatch");
        }
        total += squared_distance(train.values, t.values);
    }
    return total / static_cast<double>(test_set.size());
}

double inter_distance(const NormalizedSample& train, std::span<const DeviceSamples> other_test_sets)
{
    if (other_test_sets.empty()) {
        throw std::invalid_argument("inter_distance: no other devices");
    }
    double best = std::numeric_limits<double>::infinity();
    for (const auto& dev : other_test_sets) {
        best = std::min(best, intra_distance(train, dev.samples));
    }
    return best;
}

SilhouetteBreakdown silhouette_coefficient(double intra, double inter)
{
    const double m = std::max(intra, inter);
    return {intra, inter, m > 0.0 ? (inter - intra) / m : 0.0};
}

double silhouette_score_normalized(std::span<const FeatureMatrix> train_sets, std::span<const FeatureMatrix> test_sets)
{
    check_sets(train_sets, test_sets);
    const std::size_t C = train_sets.size();
    std::vector<SetSummary> summaries;
    summaries.reserve(C);
    for (const auto& t : test_sets) summaries.push_back(summarize(t));

    double total = 0.0;
    std::size_t count = 0;
    std::vector<double> dist(C);
    for (std::size_t i = 0; i < C; ++i) {
        const auto& train = train_sets[i];
        for (std::size_t n = 0; n < train.rows(); ++n) {
            const auto a = train.row(n);
            double a_sq = 0.0;
            for (double v : a) a_sq += v * v;
            double inter = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < C; ++j) {
                dist[j] = mean_distance(a, a_sq, summaries[j]);
                if (j != i) inter = std::min(inter, dist[j]);
            }
            total += silhouette_coefficient(dist[i], inter).coefficient;
            ++count;
        }
    }
    return std::clamp(total / static_cast<double>(count), -1.0, 1.0);
}

double silhouette_score(std::span<const FeatureMatrix> train_sets, std::span<const FeatureMatrix> test_sets)
{
    check_sets(train_sets, test_sets);
    std::vector<FeatureMatrix> train(train_sets.begin(), train_sets.end());
    std::vector<FeatureMatrix> test(test_sets.begin(), test_sets.end());
    for (auto& m : train) normalize_rows(m);
    for (auto& m : test) normalize_rows(m);
    return silhouette_score_normalized(train, test);
}

}  // namespace rfflab
