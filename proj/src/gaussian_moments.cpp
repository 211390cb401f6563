// SPDX-License-Identifier: MIT
#include "rfflab/gaussian_moments.hpp"

#include "rfflab/rng.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rfflab {

namespace {

void require_regular(const GaussianSpec& g, const RatioParams& p, const char* what)
{
    if (g.mean == 0.0) {
        throw std::domain_error(std::string(what) + ": Gaussian mean is zero");
    }
    if (p.rho == 0.0) {
        throw std::domain_error(std::string(what) + ": rho is zero");
    }
    if (g.variance < 0.0 || p.noise_variance < 0.0) {
        throw std::invalid_argument(std::string(what) + ": negative variance");
    }
}

}  // namespace

const char* to_string(RatioForm form)
{
    switch (form) {
    case RatioForm::Claim1: return "claim1";
    case RatioForm::Claim2: return "claim2";
    case RatioForm::Claim3: return "claim3";
    case RatioForm::Claim4: return "claim4";
    }
    return "unknown";
}

GaussianMoments claim1_moments(const GaussianSpec& g, const RatioParams& p)
{
    require_regular(g, p, "claim1_moments");
    const double r2m2 = p.rho * p.rho * g.mean * g.mean;
    const double sw2 = p.noise_variance;
    return {
        (r2m2 + sw2) / (std::pow(p.rho, 3) * g.mean * g.mean),
        (r2m2 + 3.0 * sw2) / (std::pow(p.rho, 4) * g.mean * g.mean),
    };
}

double claim2_mean(const GaussianSpec& g, const RatioParams& p)
{
    require_regular(g, p, "claim2_mean");
    const double r2m2 = p.rho * p.rho * g.mean * g.mean;
    return (r2m2 + 2.0 * p.noise_variance) / (std::pow(p.rho, 4) * g.mean * g.mean);
}

GaussianMoments claim3_moments(const GaussianSpec& g, const RatioParams& p)
{
    require_regular(g, p, "claim3_moments");
    return {0.0, 2.0 * p.noise_variance / (std::pow(p.rho, 4) * g.mean * g.mean)};
}

GaussianMoments claim4_moments(const GaussianSpec& g, const RatioParams& p)
{
    require_regular(g, p, "claim4_moments");
    const double r2 = p.rho * p.rho;
    const double m2 = g.mean * g.mean;
    return {
        (r2 * m2 + r2 * g.variance + p.noise_variance) / (std::pow(p.rho, 3) * std::pow(g.mean, 3)),
        (r2 * m2 + 3.0 * r2 * g.variance + 3.0 * p.noise_variance) / (std::pow(p.rho, 4) * std::pow(g.mean, 4)),
    };
}

OracleResult mc_ratio_oracle(RatioForm form, const GaussianSpec& g, const RatioParams& p,
                             std::size_t n_draws, std::uint64_t seed)
{
    if (n_draws < kMinOracleDraws) {
        throw std::invalid_argument("mc_ratio_oracle: n_draws must be at least 10000");
    }
    if (g.variance < 0.0 || p.noise_variance < 0.0) {
        throw std::invalid_argument("mc_ratio_oracle: negative variance");
    }
    RngStream rng(derive_seed({seed, static_cast<std::uint64_t>(form)}));
    const double sg = std::sqrt(g.variance);
    const double sw = std::sqrt(p.noise_variance);

    // Welford accumulation of z and z^2.
    std::size_t kept = 0;
    double mean = 0.0, m2 = 0.0, mean_sq = 0.0, m2_sq = 0.0;
    OracleResult out;
    out.draws = n_draws;
    for (std::size_t i = 0; i < n_draws; ++i) {
        double z = 0.0;
        switch (form) {
        case RatioForm::Claim1: {
            const double gv = rng.normal(g.mean, sg);
            z = gv / (p.rho * gv + rng.normal(0.0, sw));
            break;
        }
        case RatioForm::Claim2: {
            const double gv = rng.normal(g.mean, sg);
            const double w1 = rng.normal(0.0, sw);
            const double w2 = rng.normal(0.0, sw);
            z = gv * gv / ((p.rho * gv + w1) * (p.rho * gv + w2));
            break;
        }
        case RatioForm::Claim3: {
            const double g1 = rng.normal(g.mean, sg);
            const double g2 = rng.normal(g.mean, sg);
            const double w1 = rng.normal(0.0, sw);
            const double w2 = rng.normal(0.0, sw);
            z = (g1 * w2 - g2 * w1) / ((p.rho * g1 + w1) * (p.rho * g2 + w2));
            break;
        }
        case RatioForm::Claim4: {
            const double gv = rng.normal(g.mean, sg);
            z = 1.0 / (p.rho * gv + rng.normal(0.0, sw));
            break;
        }
        }
        const double zz = z * z;
        if (!std::isfinite(zz)) {
            ++out.nonfinite;
            continue;
        }
        ++kept;
        const double d = z - mean;
        mean += d / static_cast<double>(kept);
        m2 += d * (z - mean);
        const double dq = zz - mean_sq;
        mean_sq += dq / static_cast<double>(kept);
        m2_sq += dq * (zz - mean_sq);
    }
    if (out.nonfinite_rate() > kMaxOracleNonfiniteRate) {
        throw std::domain_error("mc_ratio_oracle: " + std::to_string(out.nonfinite) +
                                " non-finite draws exceed 0.1%; parameters are outside the approximation regime");
    }
    const double n = static_cast<double>(kept);
    out.moments = {mean, mean_sq};
    out.mean_stderr = kept > 1 ? std::sqrt(m2 / (n - 1.0) / n) : 0.0;
    out.second_moment_stderr = kept > 1 ? std::sqrt(m2_sq / (n - 1.0) / n) : 0.0;
    return out;
}

}  // namespace rfflab
