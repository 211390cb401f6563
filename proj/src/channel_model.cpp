// SPDX-License-Identifier: MIT
#include "rfflab/channel_model.hpp"

#include <stdexcept>
#include <string>

namespace rfflab {

std::string_view to_string(ChannelScenario s)
{
    switch (s) {
    case ChannelScenario::Deterministic: return "det";
    case ChannelScenario::IidStochastic: return "iid";
    case ChannelScenario::NonIidStochastic: return "non";
    }
    return "unknown";
}

std::string_view to_string(Phase p)
{
    return p == Phase::Train ? "train" : "test";
}

std::string_view to_string(CsiRedraw r)
{
    return r == CsiRedraw::PerPhase ? "phase" : "sample";
}

ChannelScenario parse_scenario(std::string_view text)
{
    if (text == "det") return ChannelScenario::Deterministic;
    if (text == "iid") return ChannelScenario::IidStochastic;
    if (text == "non") return ChannelScenario::NonIidStochastic;
    throw std::invalid_argument("unknown scenario '" + std::string(text) + "' (expected det, iid or non)");
}

CsiRedraw parse_redraw(std::string_view text)
{
    if (text == "phase") return CsiRedraw::PerPhase;
    if (text == "sample") return CsiRedraw::PerSample;
    throw std::invalid_argument("unknown redraw mode '" + std::string(text) + "' (expected phase or sample)");
}

ChannelMoments phase_moments(ChannelScenario scenario, const ChannelParams& params, Phase phase)
{
    if (scenario == ChannelScenario::NonIidStochastic && phase == Phase::Test) {
        return {params.mu_h_non, params.sigma_h_non};
    }
    return {params.mu_h, params.sigma_h};
}

bool non_iid_is_distinct(const ChannelParams& params)
{
    return params.mu_h != params.mu_h_non || params.sigma_h != params.sigma_h_non;
}

TrialChannel init_trial_channel(ChannelScenario scenario, const ChannelParams& params, std::size_t K,
                                RngStream& rng)
{
    if (K == 0) {
        throw std::invalid_argument("init_trial_channel: K must be at least 1");
    }
    if (params.sigma_h < 0.0 || params.sigma_h_non < 0.0) {
        throw std::invalid_argument("init_trial_channel: negative channel standard deviation");
    }
    TrialChannel trial{scenario, params, K, std::nullopt};
    if (scenario == ChannelScenario::Deterministic) {
        std::vector<double> csi(K);
        for (auto& h : csi) {
            h = rng.normal(params.mu_h, params.sigma_h);
        }
        trial.fixed_csi = std::move(csi);
    }
    return trial;
}

std::vector<double> sample_csi(const TrialChannel& trial, Phase phase, RngStream& rng)
{
    if (trial.fixed_csi) {
        return *trial.fixed_csi;
    }
    if (trial.subcarriers == 0) {
        throw std::invalid_argument("sample_csi: trial channel is not initialized");
    }
    const ChannelMoments m = phase_moments(trial.scenario, trial.params, phase);
    std::vector<double> csi(trial.subcarriers);
    for (auto& h : csi) {
        h = rng.normal(m.mean, m.stddev);
    }
    return csi;
}

}  // namespace rfflab
