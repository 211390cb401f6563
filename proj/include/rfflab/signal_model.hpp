// SPDX-License-Identifier: MIT
#pragma once

#include "rfflab/channel_model.hpp"
#include "rfflab/rng.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace rfflab {

enum class Method { Raw, Sl, Cr, Pc, Rc };

inline constexpr std::array<Method, 5> kAllMethods{Method::Raw, Method::Sl, Method::Cr, Method::Pc,
                                                   Method::Rc};

std::string_view to_string(Method m);
Method parse_method(std::string_view text);

struct ModelParams {
    double x = 1.0;       // preamble amplitude
    double f_ra = 1.0;    // receiver RFF at the access point
    double f_ta = 1.0;    // transmitter RFF at the access point
    double f_ru = 1.0;    // receiver RFF at the user device
    double f_tu_l = 1.0;  // device transmitter RFF on the long training field
    double eta = 2.0;     // target baseband power after amplification
    std::size_t r_l = 52;
    std::size_t r_s = 12;
    double mu_u = 1.0;
    double sigma_u = 0.1;
    double mu_s = 1.0;
    double sigma_s = 0.08;
    double sigma_n = 0.0;
    ChannelParams channel;

    double gamma() const { return f_ra * f_tu_l * x; }
    double beta() const { return f_ru * f_ta * x; }
    double noise_variance() const { return sigma_n * sigma_n; }

    // Throws std::invalid_argument on a violated invariant.
    void validate() const;
};

// sigma_N^2 = s^2 10^(-snr/10), with s = f_RA mu_U mu_H x the nominal RAW
// received amplitude.
double noise_variance_for_snr(const ModelParams& params, double snr_db);
ModelParams with_snr_db(ModelParams params, double snr_db);

std::size_t subcarriers(Method m, const ModelParams& params);

struct DeviceFingerprint {
    std::vector<double> tu;    // long-field transmitter RFF, length r_l
    std::vector<double> tu_s;  // short-field transmitter RFF, length r_s
};

DeviceFingerprint draw_fingerprint(const ModelParams& params, RngStream& rng);

// Samples x subcarriers, row-major.
struct FeatureMatrix {
    std::size_t cols = 0;
    std::vector<double> values;
    std::size_t device = 0;
    Phase phase = Phase::Train;
    Method method = Method::Raw;

    std::size_t rows() const { return cols == 0 ? 0 : values.size() / cols; }
    std::span<const double> row(std::size_t i) const { return {values.data() + i * cols, cols}; }
    std::span<double> row(std::size_t i) { return {values.data() + i * cols, cols}; }
    void append_row(std::span<const double> r);
};

// Amplification applied by the RC method for a channel distribution with the
// given moments. Throws std::domain_error when beta or the channel mean is 0,
// std::invalid_argument when eta <= 0.
double amplification_power(const ModelParams& params, const ChannelMoments& channel);
double amplification_factor(const ModelParams& params, const ChannelMoments& channel);

// Amplification used by a phase: training-channel moments for both phases in
// the deterministic and i.i.d. scenarios, per-phase moments in non-i.i.d.
double rc_amplification(const ModelParams& params, ChannelScenario scenario, Phase phase);

// One extracted feature vector given the CSI seen by this sample. noise1
// supplies the noise added to the signal path (N, N_S, N_A) and noise2 the
// noise on the reference path (N_L, N_U). amplification is used by RC only.
// Non-finite outputs are returned as computed.
std::vector<double> extract_sample(Method method, const ModelParams& params, const DeviceFingerprint& fp,
                                   std::span<const double> csi, double amplification, RngStream& noise1,
                                   RngStream& noise2);

// Convenience form that draws the CSI through the channel model (one draw per
// call in the stochastic scenarios) and all noise from one stream.
std::vector<double> extract_sample(Method method, const ModelParams& params, const DeviceFingerprint& fp,
                                   const TrialChannel& trial, Phase phase, RngStream& rng);

struct FeatureMoments {
    double mean = 0.0;
    double variance = 0.0;
};

// Closed-form per-subcarrier mean and variance of the extracted feature for a
// channel distribution with the given moments. For RC the amplification is
// derived from the same moments.
FeatureMoments analytic_feature_moments(Method method, const ModelParams& params, const ChannelMoments& channel);

}  // namespace rfflab
