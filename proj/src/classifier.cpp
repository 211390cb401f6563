// SPDX-License-Identifier: MIT
#include "rfflab/classifier.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <sstream>
#include <string>
#include <stdexcept>

namespace rfflab {

namespace {

using RowMap = Eigen::Map<const Eigen::VectorXd>;

// Relative size below which an eigenvalue of the regularized covariance
// is treated as zero.
constexpr double kSingularTolerance = 1e-14;

}  // namespace

LdaModel fit(std::span<const FeatureMatrix> train, double ridge)
{
    if (train.size() < 2) {
        throw std::invalid_argument("lda fit: need at least two classes");
    }
    if (!(ridge >= 0.0)) {
        throw std::invalid_argument("lda fit: ridge must be non-negative");
    }
    const std::size_t K = train.front().cols;
    if (K == 0) {
        throw std::invalid_argument("lda fit: zero-dimensional features");
    }
    const std::size_t C = train.size();
    const Eigen::Index k = static_cast<Eigen::Index>(K);

    std::size_t total = 0;
    std::vector<Eigen::VectorXd> means;
    means.reserve(C);
    Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(k, k);
    for (std::size_t c = 0; c < C; ++c) {
        const FeatureMatrix& set = train[c];
        if (set.cols != K) {
            throw std::invalid_argument("lda fit: class " + std::to_string(c) + " has inconsistent dimension");
        }
        const std::size_t n = set.rows();
        if (n < 2) {
            throw std::invalid_argument("lda fit: class " + std::to_string(c) + " needs at least two samples");
        }
        Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> rows(
            set.values.data(), static_cast<Eigen::Index>(n), k);
        Eigen::VectorXd mean = rows.colwise().mean().transpose();
        const Eigen::MatrixXd centered = rows.rowwise() - mean.transpose();
        scatter.noalias() += centered.transpose() * centered;
        means.push_back(std::move(mean));
        total += n;
    }

    Eigen::MatrixXd cov = scatter / static_cast<double>(total - C);
    const double trace = cov.trace();
    const double scale = trace > 0.0 ? trace / static_cast<double>(K) : 1.0;
    cov.diagonal().array() += ridge * scale;

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success) {
        throw std::runtime_error("lda fit: eigen-decomposition of the pooled covariance failed");
    }
    const Eigen::VectorXd& lambda = eig.eigenvalues();
    const double smallest = lambda.minCoeff();
    const double largest = lambda.maxCoeff();
    if (!std::isfinite(smallest) || !std::isfinite(largest) || smallest <= kSingularTolerance * largest ||
        !(largest > 0.0)) {
        std::ostringstream msg;
        msg << "lda fit: pooled covariance is singular (smallest eigenvalue " << smallest << ", largest "
            << largest << ")";
        throw std::runtime_error(msg.str());
    }
    const Eigen::MatrixXd inverse =
        eig.eigenvectors() * lambda.cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();

    LdaModel model;
    model.dimension = K;
    model.priors.assign(C, 1.0 / static_cast<double>(C));
    model.pooled_covariance_inverse.resize(K * K);
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        model.pooled_covariance_inverse.data(), k, k) = inverse;
    for (std::size_t c = 0; c < C; ++c) {
        const Eigen::VectorXd w = inverse * means[c];
        model.class_means.emplace_back(means[c].data(), means[c].data() + K);
        model.weights.emplace_back(w.data(), w.data() + K);
        model.offsets.push_back(-0.5 * means[c].dot(w) + std::log(model.priors[c]));
    }
    return model;
}

std::vector<double> discriminants(const LdaModel& model, std::span<const double> sample)
{
    if (sample.size() != model.dimension) {
        throw std::invalid_argument("lda: sample has dimension " + std::to_string(sample.size()) + ", model " +
                                    std::to_string(model.dimension));
    }
    const RowMap x(sample.data(), static_cast<Eigen::Index>(sample.size()));
    std::vector<double> out(model.classes());
    for (std::size_t c = 0; c < model.classes(); ++c) {
        const RowMap w(model.weights[c].data(), static_cast<Eigen::Index>(model.dimension));
        out[c] = x.dot(w) + model.offsets[c];
    }
    return out;
}

std::size_t predict(const LdaModel& model, std::span<const double> sample)
{
    const std::vector<double> d = discriminants(model, sample);
    std::size_t best = 0;
    for (std::size_t c = 1; c < d.size(); ++c) {
        if (d[c] > d[best]) best = c;
    }
    return best;
}

double accuracy(const LdaModel& model, std::span<const FeatureMatrix> test)
{
    if (test.size() != model.classes()) {
        throw std::invalid_argument("lda accuracy: test class count differs from the model");
    }
    std::size_t correct = 0, total = 0;
    for (std::size_t c = 0; c < test.size(); ++c) {
        for (std::size_t i = 0; i < test[c].rows(); ++i) {
            correct += predict(model, test[c].row(i)) == c ? 1 : 0;
            ++total;
        }
    }
    if (total == 0) {
        throw std::invalid_argument("lda accuracy: no test samples");
    }
    return static_cast<double>(correct) / static_cast<double>(total);
}

}  // namespace rfflab
