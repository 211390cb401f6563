// SPDX-License-Identifier: MIT
#pragma once

// Second-order Taylor approximations for the first two moments of ratios of
// Gaussian variables, and a Monte-Carlo oracle for the same ratios.
//
// Notation: G ~ N(mean, variance); W, W1, W2 ~ N(0, noise_variance).
//   Form1: G / (rho G + W)
//   Form2: G^2 / ((rho G + W1)(rho G + W2))
//   Form3: (G1 W2 - G2 W1) / ((rho G1 + W1)(rho G2 + W2)), G1, G2 i.i.d.
//   Form4: 1 / (rho G + W)
//
// The closed forms are kept exactly as derived. In particular the Form1 mean
// carries no variance(G) term while the Form4 mean does; the expansion for
// Form1 drops the (G - mean) W cross term.

#include <cstddef>
#include <cstdint>

namespace rfflab {

struct GaussianSpec {
    double mean = 0.0;
    double variance = 0.0;
};

struct RatioParams {
    double rho = 1.0;
    double noise_variance = 0.0;
};

struct GaussianMoments {
    double mean = 0.0;
    double second_moment = 0.0;

    double variance() const { return second_moment - mean * mean; }
};

enum class RatioForm { Claim1, Claim2, Claim3, Claim4 };

const char* to_string(RatioForm form);

GaussianMoments claim1_moments(const GaussianSpec& g, const RatioParams& p);
double claim2_mean(const GaussianSpec& g, const RatioParams& p);
GaussianMoments claim3_moments(const GaussianSpec& g, const RatioParams& p);
GaussianMoments claim4_moments(const GaussianSpec& g, const RatioParams& p);

struct OracleResult {
    GaussianMoments moments;
    double mean_stderr = 0.0;
    double second_moment_stderr = 0.0;
    std::size_t draws = 0;
    std::size_t nonfinite = 0;

    double nonfinite_rate() const
    {
        return draws == 0 ? 0.0 : static_cast<double>(nonfinite) / static_cast<double>(draws);
    }
};

inline constexpr std::size_t kMinOracleDraws = 10'000;
inline constexpr double kMaxOracleNonfiniteRate = 1e-3;

// Sample moments over n_draws realizations; non-finite realizations are
// excluded and counted. Throws std::invalid_argument if n_draws is below
// kMinOracleDraws and std::domain_error if more than
// kMaxOracleNonfiniteRate of the draws are non-finite.
OracleResult mc_ratio_oracle(RatioForm form, const GaussianSpec& g, const RatioParams& p,
                             std::size_t n_draws, std::uint64_t seed);

}  // namespace rfflab
