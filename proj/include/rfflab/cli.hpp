// SPDX-License-Identifier: MIT
#pragma once

// Command-line front end: sweep, validate-claims, correlate, emit-config.

#include "rfflab/experiments.hpp"
#include "rfflab/gaussian_moments.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rfflab {

inline constexpr const char* kToolVersion = "1.0.0";

enum ExitCode : int { kExitOk = 0, kExitValidationFailure = 1, kExitInputError = 2, kExitRuntimeError = 3 };

inline constexpr const char* kSweepCsvHeader =
    "scenario,method,snr_db,silhouette_emp,silhouette_emp_se,silhouette_ana,accuracy,accuracy_se,nonfinite_rate";

// One row of the claim validation table.
struct ClaimCheck {
    RatioForm claim = RatioForm::Claim1;
    std::string quantity;  // "mean" or "second_moment"
    double mu_g = 1.0;
    double sigma_g = 0.0;
    double rho = 1.0;
    double sigma_w = 0.0;
    double analytic = 0.0;
    double oracle = 0.0;
    double oracle_stderr = 0.0;
    double error = 0.0;      // relative error, or |oracle| / stderr for a zero analytic value
    double tolerance = 0.0;  // bound applied to error
    bool in_regime = true;   // sigma_w / (rho mu_g) <= 0.1
    bool pass = true;
};

struct ClaimGridPoint {
    double mu_g = 1.0;
    double sigma_g = 0.0;
    double rho = 1.0;
    double sigma_w = 0.0;
};

inline constexpr double kClaimMeanTolerance = 0.02;
inline constexpr double kClaimSecondMomentTolerance = 0.05;
inline constexpr double kClaimZeroMeanStderrs = 3.0;
inline constexpr double kClaimRegimeLimit = 0.1;

// mu_g = 1, sigma_g in {0, 0.1, 0.15}, rho in {0.5, 1, 2}, sigma_w in {0.001, 0.01, 0.05}.
std::vector<ClaimGridPoint> default_claim_grid();

// Compares every closed-form moment against the Monte-Carlo oracle. A row
// passes when it is out of regime or within tolerance.
std::vector<ClaimCheck> run_claim_checks(std::span<const ClaimGridPoint> grid, std::size_t n_draws,
                                         std::uint64_t seed);

std::string claims_csv(std::span<const ClaimCheck> rows);
std::string sweep_csv(std::span<const SweepRecord> records);
std::string sweep_json(std::span<const SweepRecord> records, const ExperimentConfig& cfg, double wall_time_s);
std::string correlation_json(const CorrelationReport& report);

// (silhouette_emp, accuracy) pairs from a sweep CSV or JSON file. Throws
// std::invalid_argument with a description when the file is malformed.
std::vector<std::pair<double, double>> read_sweep_points(const std::filesystem::path& path);

// Formats a real with 17 significant digits.
std::string format_real(double v);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rfflab
