// SPDX-License-Identifier: MIT
#pragma once

// Closed-form expected intra-class distance, inter-class distance and
// silhouette score for every (method, scenario) pair.

#include "rfflab/channel_model.hpp"
#include "rfflab/signal_model.hpp"

namespace rfflab {

// Channel moments seen by each phase. Deterministic and i.i.d. share one pair.
struct ScenarioMoments {
    double mu_h_train = 1.0;
    double sigma_h_train = 0.0;
    double mu_h_test = 1.0;
    double sigma_h_test = 0.0;
};

ScenarioMoments scenario_moments(ChannelScenario scenario, const ChannelParams& params);

struct ExpectedScores {
    double intra = 0.0;
    double inter = 0.0;
    double silhouette = 0.0;  // printed closed form, not recomposed
};

// All three expressions for one pair. Throws std::domain_error naming the
// offending quantity when a denominator (gamma, beta, a channel mean or a
// feature variance) is zero.
ExpectedScores expected_scores(Method method, ChannelScenario scenario, const ModelParams& params);

double expected_intra(Method method, ChannelScenario scenario, const ModelParams& params);
double expected_inter(Method method, ChannelScenario scenario, const ModelParams& params);
double expected_silhouette(Method method, ChannelScenario scenario, const ModelParams& params);

// (inter - intra) / max(inter, intra) from the distance expressions.
double composed_silhouette(Method method, ChannelScenario scenario, const ModelParams& params);

}  // namespace rfflab
