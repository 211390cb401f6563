// SPDX-License-Identifier: MIT
#include "rfflab/signal_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rfflab {

std::string_view to_string(Method m)
{
    switch (m) {
    case Method::Raw: return "RAW";
    case Method::Sl: return "SL";
    case Method::Cr: return "CR";
    case Method::Pc: return "PC";
    case Method::Rc: return "RC";
    }
    return "unknown";
}

Method parse_method(std::string_view text)
{
    for (Method m : kAllMethods) {
        if (text == to_string(m)) return m;
    }
    throw std::invalid_argument("unknown method '" + std::string(text) + "' (expected RAW, SL, CR, PC or RC)");
}

void ModelParams::validate() const
{
    if (r_l == 0 || r_s == 0) throw std::invalid_argument("model: subcarrier counts must be positive");
    if (r_s > r_l) throw std::invalid_argument("model: r_s must not exceed r_l");
    if (sigma_u < 0.0 || sigma_s < 0.0 || sigma_n < 0.0 || channel.sigma_h < 0.0 || channel.sigma_h_non < 0.0) {
        throw std::invalid_argument("model: standard deviations must be non-negative");
    }
    if (!(eta > 0.0)) throw std::invalid_argument("model: eta must be positive");
    if (!std::isfinite(gamma()) || gamma() == 0.0) throw std::invalid_argument("model: gamma must be finite and nonzero");
    if (!std::isfinite(beta()) || beta() == 0.0) throw std::invalid_argument("model: beta must be finite and nonzero");
}

double noise_variance_for_snr(const ModelParams& params, double snr_db)
{
    const double s = params.f_ra * params.mu_u * params.channel.mu_h * params.x;
    return s * s * std::pow(10.0, -snr_db / 10.0);
}

ModelParams with_snr_db(ModelParams params, double snr_db)
{
    params.sigma_n = std::sqrt(noise_variance_for_snr(params, snr_db));
    return params;
}

std::size_t subcarriers(Method m, const ModelParams& params)
{
    return m == Method::Sl ? params.r_s : params.r_l;
}

DeviceFingerprint draw_fingerprint(const ModelParams& params, RngStream& rng)
{
    DeviceFingerprint fp;
    fp.tu.resize(params.r_l);
    fp.tu_s.resize(params.r_s);
    for (auto& v : fp.tu) v = rng.normal(params.mu_u, params.sigma_u);
    for (auto& v : fp.tu_s) v = rng.normal(params.mu_s, params.sigma_s);
    return fp;
}

void FeatureMatrix::append_row(std::span<const double> r)
{
    if (r.size() != cols) {
        throw std::invalid_argument("FeatureMatrix: row length " + std::to_string(r.size()) + " != " +
                                    std::to_string(cols));
    }
    values.insert(values.end(), r.begin(), r.end());
}

double amplification_power(const ModelParams& params, const ChannelMoments& channel)
{
    const double b = params.beta();
    const double mu = channel.mean;
    if (b == 0.0 || mu == 0.0) {
        throw std::domain_error("amplification: beta and channel mean must be nonzero");
    }
    const double b2 = b * b;
    const double sn2 = params.noise_variance();
    return (b2 * mu * mu + 3.0 * b2 * channel.stddev * channel.stddev + 3.0 * sn2) / (b2 * b2 * std::pow(mu, 4));
}

double amplification_factor(const ModelParams& params, const ChannelMoments& channel)
{
    if (!(params.eta > 0.0)) {
        throw std::invalid_argument("amplification: eta must be positive");
    }
    const double power = amplification_power(params, channel);
    if (!(power > 0.0) || !std::isfinite(power)) {
        throw std::domain_error("amplification: reciprocal-term power is not positive");
    }
    return std::sqrt(params.eta / power);
}

double rc_amplification(const ModelParams& params, ChannelScenario scenario, Phase phase)
{
    return amplification_factor(params, phase_moments(scenario, params.channel, phase));
}

std::vector<double> extract_sample(Method method, const ModelParams& params, const DeviceFingerprint& fp,
                                   std::span<const double> csi, double amplification, RngStream& noise1,
                                   RngStream& noise2)
{
    const std::size_t K = subcarriers(method, params);
    if (csi.size() < K) {
        throw std::invalid_argument("extract_sample: CSI shorter than the method's subcarrier count");
    }
    if (fp.tu.size() != params.r_l || fp.tu_s.size() != params.r_s) {
        throw std::invalid_argument("extract_sample: fingerprint lengths do not match the model");
    }
    const double sn = params.sigma_n;
    const double x = params.x;
    std::vector<double> out(K);
    for (std::size_t k = 0; k < K; ++k) {
        const double h = csi[k];
        const double n1 = noise1.normal(0.0, sn);
        switch (method) {
        case Method::Raw:
            out[k] = params.f_ra * h * fp.tu[k] * x + n1;
            break;
        case Method::Sl:
            out[k] = (params.f_ra * h * fp.tu_s[k] * x + n1) / (params.f_ra * h * params.f_tu_l * x + noise2.normal(0.0, sn));
            break;
        case Method::Cr:
            out[k] = (params.f_ra * h * fp.tu[k] * x + n1) / (params.f_ru * h * params.f_ta * x + noise2.normal(0.0, sn));
            break;
        case Method::Pc:
            out[k] = params.f_ra * h * fp.tu[k] * x * x / (params.f_ru * h * params.f_ta * x + noise2.normal(0.0, sn)) + n1;
            break;
        case Method::Rc:
            out[k] = amplification * params.f_ra * h * fp.tu[k] / (params.f_ru * h * params.f_ta * x + noise2.normal(0.0, sn)) + n1;
            break;
        }
    }
    return out;
}

std::vector<double> extract_sample(Method method, const ModelParams& params, const DeviceFingerprint& fp,
                                   const TrialChannel& trial, Phase phase, RngStream& rng)
{
    const std::vector<double> csi = sample_csi(trial, phase, rng);
    const double amplification = method == Method::Rc ? rc_amplification(params, trial.scenario, phase) : 1.0;
    return extract_sample(method, params, fp, csi, amplification, rng, rng);
}

FeatureMoments analytic_feature_moments(Method method, const ModelParams& params, const ChannelMoments& channel)
{
    const double f = params.f_ra;
    const double x = params.x;
    const double mh = channel.mean;
    const double sh = channel.stddev;
    const double sn2 = params.noise_variance();
    const double mu = params.mu_u, su = params.sigma_u;
    if (mh == 0.0) {
        throw std::domain_error("analytic_feature_moments: channel mean is zero");
    }
    switch (method) {
    case Method::Raw:
        return {f * x * mu * mh,
                f * f * x * x * (mu * mu * sh * sh + su * su * mh * mh + su * su * sh * sh) + sn2};
    case Method::Sl:
    case Method::Cr: {
        // Same algebra; SL uses the short-field RFF and gamma, CR the long-field RFF and beta.
        const bool sl = method == Method::Sl;
        const double r = sl ? params.gamma() : params.beta();
        const double mt = sl ? params.mu_s : mu;
        const double st = sl ? params.sigma_s : su;
        if (r == 0.0) throw std::domain_error("analytic_feature_moments: gamma/beta is zero");
        const double r2m2 = r * r * mh * mh;
        const double mean = f * x * mt * (r2m2 + sn2) / (std::pow(r, 3) * mh * mh);
        const double var = (f * f * x * x * (mt * mt * sn2 * (r2m2 - sn2) + r2m2 * st * st * (r2m2 + 3.0 * sn2)) +
                            r * r * sn2 * (r2m2 + 3.0 * r * r * sh * sh + 3.0 * sn2)) /
                           (std::pow(r, 6) * std::pow(mh, 4));
        return {mean, var};
    }
    case Method::Pc: {
        const double b = params.beta();
        const double b2m2 = b * b * mh * mh;
        const double mean = f * x * x * mu * (b2m2 + sn2) / (std::pow(b, 3) * mh * mh);
        const double var = f * f * std::pow(x, 4) * (mu * mu * sn2 * (b2m2 - sn2) + b2m2 * su * su * (b2m2 + 3.0 * sn2)) /
                               (std::pow(b, 6) * std::pow(mh, 4)) +
                           sn2;
        return {mean, var};
    }
    case Method::Rc: {
        const double a = amplification_factor(params, channel);
        const double b = params.beta();
        const double b2m2 = b * b * mh * mh;
        const double mean = a * f * mu * (b2m2 + sn2) / (std::pow(b, 3) * mh * mh);
        const double var = a * a * f * f * (mu * mu * sn2 * (b2m2 - sn2) + su * su * (b2m2 * b2m2 + 3.0 * b2m2 * sn2)) /
                               (std::pow(b, 6) * std::pow(mh, 4)) +
                           sn2;
        return {mean, var};
    }
    }
    throw std::invalid_argument("analytic_feature_moments: unknown method");
}

}  // namespace rfflab
