// SPDX-License-Identifier: MIT
#pragma once

#include "rfflab/rng.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

namespace rfflab {

enum class ChannelScenario { Deterministic, IidStochastic, NonIidStochastic };
enum class Phase { Train, Test };

inline constexpr std::array<ChannelScenario, 3> kAllScenarios{
    ChannelScenario::Deterministic, ChannelScenario::IidStochastic, ChannelScenario::NonIidStochastic};

// How often the harness draws a fresh CSI vector in the stochastic scenarios:
// once per phase of a trial (shared by all samples and devices of that phase)
// or once per extracted sample.
enum class CsiRedraw { PerPhase, PerSample };

std::string_view to_string(ChannelScenario s);
std::string_view to_string(Phase p);
std::string_view to_string(CsiRedraw r);
ChannelScenario parse_scenario(std::string_view text);
CsiRedraw parse_redraw(std::string_view text);

struct ChannelParams {
    double mu_h = 1.0;
    double sigma_h = 0.15;
    double mu_h_non = 1.0;
    double sigma_h_non = 0.2;
};

struct ChannelMoments {
    double mean = 0.0;
    double stddev = 0.0;
};

// Distribution the given phase draws its CSI from.
ChannelMoments phase_moments(ChannelScenario scenario, const ChannelParams& params, Phase phase);

// False when a non-i.i.d. setup has identical train and test distributions.
// Such a setup is allowed; callers may warn.
bool non_iid_is_distinct(const ChannelParams& params);

struct TrialChannel {
    ChannelScenario scenario = ChannelScenario::Deterministic;
    ChannelParams params;
    std::size_t subcarriers = 0;
    std::optional<std::vector<double>> fixed_csi;  // Deterministic only
};

// Deterministic: draws the one CSI vector shared by every sample of the trial.
// Stochastic: records the parameters only. Throws std::invalid_argument on K == 0
// or negative standard deviations.
TrialChannel init_trial_channel(ChannelScenario scenario, const ChannelParams& params, std::size_t K,
                                RngStream& rng);

// Deterministic: the fixed vector, for either phase. Stochastic: a fresh
// i.i.d. per-subcarrier draw from the phase's distribution on every call.
std::vector<double> sample_csi(const TrialChannel& trial, Phase phase, RngStream& rng);

}  // namespace rfflab
