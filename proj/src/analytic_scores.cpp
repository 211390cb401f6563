// SPDX-License-Identifier: MIT
#include "rfflab/analytic_scores.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rfflab {

namespace {

double sq(double v) { return v * v; }

void require_nonzero(double v, const char* what)
{
    if (v == 0.0 || !std::isfinite(v)) {
        throw std::domain_error(std::string("analytic_scores: ") + what + " is zero or not finite");
    }
}

// Values shared by every expression, resolved once per call.
struct Terms {
    double f, x, g, b, s2;
    double mu_u, sigma_u, mu_s, sigma_s;
    double r_l, r_s;
};

Terms make_terms(const ModelParams& p)
{
    const Terms t{p.f_ra, p.x, p.gamma(), p.beta(), p.noise_variance(),
                  p.mu_u, p.sigma_u, p.mu_s, p.sigma_s,
                  static_cast<double>(p.r_l), static_cast<double>(p.r_s)};
    require_nonzero(t.g, "gamma");
    require_nonzero(t.b, "beta");
    return t;
}

FeatureMoments feature_moments(Method m, const ModelParams& p, double mh, double sh)
{
    const FeatureMoments fm = analytic_feature_moments(m, p, {mh, sh});
    if (!(fm.variance > 0.0) || !std::isfinite(fm.variance)) {
        throw std::domain_error("analytic_scores: feature variance of " + std::string(to_string(m)) +
                                " is not positive");
    }
    return fm;
}

// ---- deterministic channel ----

ExpectedScores deterministic(Method m, const ModelParams& p, double mh, double sh)
{
    const Terms t = make_terms(p);
    const double f = t.f, x = t.x, g = t.g, b = t.b, s2 = t.s2;
    const double mu = t.mu_u, su = t.sigma_u;
    const double v = feature_moments(m, p, mh, sh).variance;
    ExpectedScores e;
    switch (m) {
    case Method::Raw: {
        const double sig = sq(f * x) * sq(su) * (sq(mh) + sq(sh));
        e.intra = 2.0 * t.r_l * s2 / v;
        e.inter = 2.0 * t.r_l * (sig + s2) / v;
        e.silhouette = sig / (sig + s2);
        break;
    }
    case Method::Sl:
    case Method::Cr: {
        const bool sl = m == Method::Sl;
        const double r = sl ? g : b;
        const double R = sl ? t.r_s : t.r_l;
        const double mt = sl ? t.mu_s : mu;
        const double st = sl ? t.sigma_s : su;
        const double noise = s2 * (r * r * (sq(mh) + 3.0 * sq(sh)) + 3.0 * s2);
        const double den = v * std::pow(r, 4) * std::pow(mh, 4);
        e.intra = 2.0 * R * (sq(f * x) * sq(mh) * s2 * (sq(mt) + sq(st)) + noise) / den;
        const double inter_brace = sq(f * x) * sq(mh) * (sq(mt) * s2 + sq(st) * (r * r * sq(mh) + 3.0 * s2)) + noise;
        e.inter = 2.0 * R * inter_brace / den;
        e.silhouette = sq(f * x) * sq(st) * sq(mh) * (r * r * sq(mh) + 2.0 * s2) / inter_brace;
        break;
    }
    case Method::Pc: {
        const double fx4 = f * f * std::pow(x, 4);
        const double b4m2 = std::pow(b, 4) * sq(mh);
        e.intra = 2.0 * t.r_l / v * (fx4 * s2 * (sq(mu) + sq(su)) / b4m2 + s2);
        const double inter_brace = fx4 * (sq(mu) * s2 + sq(su) * (b * b * sq(mh) + 3.0 * s2)) + b4m2 * s2;
        e.inter = 2.0 * t.r_l * inter_brace / (v * b4m2);
        e.silhouette = fx4 * sq(su) * (b * b * sq(mh) + 2.0 * s2) / inter_brace;
        break;
    }
    case Method::Rc: {
        const double a = amplification_factor(p, {mh, sh});
        const double af2 = sq(a * f);
        const double b4m2 = std::pow(b, 4) * sq(mh);
        e.intra = 2.0 * t.r_l / v * (af2 * s2 * (sq(mu) + sq(su)) / b4m2 + s2);
        e.inter = 2.0 * t.r_l / v * (af2 * (sq(mu) * s2 + sq(su) * (b * b * sq(mh) + 3.0 * s2)) / b4m2 + s2);
        e.silhouette = af2 * sq(su) * (b * b * sq(mh) + 2.0 * s2) /
                       (af2 * (sq(mu) * s2 + sq(su) * (b * b * sq(mh) + 3.0 * s2)) + b4m2 * s2);
        break;
    }
    }
    return e;
}

// ---- i.i.d. stochastic channel ----

ExpectedScores iid(Method m, const ModelParams& p, double mh, double sh)
{
    const Terms t = make_terms(p);
    const double f = t.f, x = t.x, g = t.g, b = t.b, s2 = t.s2;
    const double mu = t.mu_u, su = t.sigma_u;
    const double v = feature_moments(m, p, mh, sh).variance;
    ExpectedScores e;
    switch (m) {
    case Method::Raw: {
        const double inter_brace = sq(f * x) * (sq(mu) * sq(sh) + sq(su) * sq(mh) + sq(su) * sq(sh)) + s2;
        e.intra = 2.0 * t.r_l * (sq(f * x) * sq(sh) * (sq(mu) + sq(su)) + s2) / v;
        e.inter = 2.0 * t.r_l * inter_brace / v;
        e.silhouette = sq(f * x) * sq(su) * sq(mh) / inter_brace;
        break;
    }
    case Method::Sl:
    case Method::Cr: {
        const bool sl = m == Method::Sl;
        const double r = sl ? g : b;
        const double R = sl ? t.r_s : t.r_l;
        const double mt = sl ? t.mu_s : mu;
        const double st = sl ? t.sigma_s : su;
        const double r2m2 = r * r * sq(mh);
        const double noise = r * r * s2 * (r2m2 + 3.0 * r * r * sq(sh) + 3.0 * s2);
        const double den = v * std::pow(r, 6) * std::pow(mh, 4);
        e.intra = 2.0 * R * (sq(f * x) * s2 * (sq(mt) + sq(st)) * (r2m2 - s2) + noise) / den;
        const double inter_brace = sq(f * x) * (sq(mt) * s2 * (r2m2 - s2) + r * r * sq(st) * sq(mh) * (r2m2 + 3.0 * s2)) + noise;
        e.inter = 2.0 * R * inter_brace / den;
        e.silhouette = sq(f * x) * sq(st) * (sq(r2m2) + 2.0 * r2m2 * s2 + sq(s2)) / inter_brace;
        break;
    }
    case Method::Pc: {
        const double fx4 = f * f * std::pow(x, 4);
        const double b2m2 = b * b * sq(mh);
        const double b6m4 = std::pow(b, 6) * std::pow(mh, 4);
        e.intra = 2.0 * t.r_l / v * (fx4 * s2 * (sq(mu) + sq(su)) * (b2m2 - s2) / b6m4 + s2);
        const double inter_core = fx4 * (sq(mu) * s2 * (b2m2 - s2) + sq(su) * b2m2 * (b2m2 + 3.0 * s2));
        e.inter = 2.0 * t.r_l / v * (inter_core / b6m4 + s2);
        e.silhouette = fx4 * sq(su) * sq(b2m2 + s2) / (inter_core + b6m4 * s2);
        break;
    }
    case Method::Rc: {
        const double a = amplification_factor(p, {mh, sh});
        const double af2 = sq(a * f);
        const double b2m2 = b * b * sq(mh);
        const double b6m4 = std::pow(b, 6) * std::pow(mh, 4);
        e.intra = 2.0 * t.r_l / v * (af2 * s2 * (sq(mu) + sq(su)) * (b2m2 - s2) / b6m4 + s2);
        const double inter_brace = af2 * (sq(mu) * s2 * (b2m2 - s2) + sq(su) * (sq(b2m2) + 3.0 * b2m2 * s2)) + b6m4 * s2;
        e.inter = 2.0 * t.r_l * inter_brace / (b6m4 * v);
        e.silhouette = af2 * sq(su) * sq(b2m2 + s2) / inter_brace;
        break;
    }
    }
    return e;
}

// ---- non-i.i.d. stochastic channel ----
// Training channel (mh, sh), test channel (mn, sn). Suffix _n marks the
// test-phase feature moments. The brace is shared by intra and inter except
// for one coefficient: mean^2 + variance of the RFF for intra, mean^2 for inter.

struct CrossMoments {
    double mu, v, sd;
    double mu_n, v_n, sd_n;
};

CrossMoments cross_moments(Method m, const ModelParams& p, double mh, double sh, double mn, double sn)
{
    const FeatureMoments tr = feature_moments(m, p, mh, sh);
    const FeatureMoments te = feature_moments(m, p, mn, sn);
    return {tr.mean, tr.variance, std::sqrt(tr.variance), te.mean, te.variance, std::sqrt(te.variance)};
}

ExpectedScores non_iid(Method m, const ModelParams& p, double mh, double sh, double mn, double sn)
{
    const Terms t = make_terms(p);
    const double f = t.f, x = t.x, g = t.g, b = t.b, s2 = t.s2;
    const double mu_u = t.mu_u, su = t.sigma_u;
    const CrossMoments c = cross_moments(m, p, mh, sh, mn, sn);
    const double mu = c.mu, v = c.v, mun = c.mu_n, vn = c.v_n;
    const double sdsd = c.sd * c.sd_n;
    const double mh2 = sq(mh), mn2 = sq(mn);
    ExpectedScores e;

    switch (m) {
    case Method::Raw: {
        auto brace = [&](double coeff) {
            return sq(f * x) * (sq(mu_u) + sq(su)) * (v * (mn2 + sq(sn)) + vn * (mh2 + sq(sh)))
                 - 2.0 * f * x * mu_u * (mh * mu * vn + mn * mun * v)
                 + s2 * (v + vn)
                 + sq(mu) * vn + sq(mun) * v
                 - 2.0 * sdsd * (mh * mn * sq(f * x) * coeff - f * x * mu_u * (mu * mn + mun * mh) + mu * mun);
        };
        const double brace_inter = brace(sq(mu_u));
        e.intra = t.r_l * brace(sq(mu_u) + sq(su)) / (v * vn);
        e.inter = t.r_l * brace_inter / (v * vn);
        e.silhouette = 2.0 * sdsd * mh * mn * sq(f * x) * sq(su) / brace_inter;
        break;
    }
    case Method::Sl:
    case Method::Cr: {
        const bool sl = m == Method::Sl;
        const double r = sl ? g : b;
        const double R = sl ? t.r_s : t.r_l;
        const double mt = sl ? t.mu_s : mu_u;
        const double st = sl ? t.sigma_s : su;
        const double r2 = r * r, r3 = r2 * r, r6 = r3 * r3;
        const double mh4 = sq(mh2), mn4 = sq(mn2);
        const double fx = f * x;
        const double term_a = sq(fx) * r2 * mh2 * mn2 * (sq(mt) + sq(st))
                            * (v * mh2 * (r2 * mn2 + 3.0 * s2) + vn * mn2 * (r2 * mh2 + 3.0 * s2));
        const double term_b = s2 * r2 * (v * mh4 * (r2 * mn2 + 3.0 * r2 * sq(sn) + 3.0 * s2)
                                       + vn * mn4 * (r2 * mh2 + 3.0 * r2 * sq(sh) + 3.0 * s2));
        const double term_c = -2.0 * fx * mt * r3 * mh2 * mn2
                            * (mu * vn * mn2 * (r2 * mh2 + s2) + mun * v * mh2 * (r2 * mn2 + s2));
        const double term_e = 2.0 * sdsd * fx * mt * r3 * mh2 * mn2
                            * (mu * mh2 * (r2 * mn2 + s2) + mun * mn2 * (r2 * mh2 + s2));
        const double term_f = r6 * mh4 * mn4 * (v * sq(mun) + vn * sq(mu) - 2.0 * sdsd * mu * mun);
        auto term_d = [&](double coeff) {
            return -2.0 * sdsd * sq(fx) * mh2 * mn2 * coeff * (r2 * mh2 + s2) * (r2 * mn2 + s2);
        };
        const double den = r6 * mh4 * mn4 * v * vn;
        const double brace_intra = term_a + term_b + term_c + term_d(sq(mt) + sq(st)) + term_e + term_f;
        const double brace_inter = term_a + term_b + term_c + term_d(sq(mt)) + term_e + term_f;
        e.intra = R * brace_intra / den;
        e.inter = R * brace_inter / den;
        e.silhouette = 2.0 * sdsd * sq(fx) * mh2 * mn2 * sq(st) * (r2 * mh2 + s2) * (r2 * mn2 + s2) / brace_inter;
        break;
    }
    case Method::Pc:
    case Method::Rc: {
        // PC scales the RFF term by x^2, RC by the per-phase amplification.
        const bool pc = m == Method::Pc;
        const double k1 = pc ? 1.0 : amplification_factor(p, {mh, sh});
        const double k1n = pc ? 1.0 : amplification_factor(p, {mn, sn});
        const double kx2 = pc ? std::pow(x, 4) : 1.0;
        const double kx = pc ? x * x : 1.0;
        const double b2 = b * b, b3 = b2 * b, b6 = b3 * b3;
        const double term_a = f * f * kx2 * (sq(mu_u) + sq(su)) * b2
                            * (sq(k1n) * v * mh2 * (b2 * mn2 + 3.0 * s2) + sq(k1) * vn * mn2 * (b2 * mh2 + 3.0 * s2));
        const double term_c = -2.0 * f * kx * mu_u * b3
                            * (k1 * mu * vn * mn2 * (b2 * mh2 + s2) + k1n * mun * v * mh2 * (b2 * mn2 + s2));
        const double term_e = 2.0 * sdsd * f * kx * mu_u * b3
                            * (k1n * mu * mh2 * (b2 * mn2 + s2) + k1 * mun * mn2 * (b2 * mh2 + s2));
        const double term_f = b6 * mh2 * mn2 * (v * sq(mun) + vn * sq(mu) + s2 * (v + vn) - 2.0 * sdsd * mu * mun);
        auto term_d = [&](double coeff) {
            return -2.0 * sdsd * k1 * k1n * f * f * kx2 * coeff * (b2 * mh2 + s2) * (b2 * mn2 + s2);
        };
        const double den = b6 * mh2 * mn2 * v * vn;
        const double brace_intra = term_a + term_c + term_d(sq(mu_u) + sq(su)) + term_e + term_f;
        const double brace_inter = term_a + term_c + term_d(sq(mu_u)) + term_e + term_f;
        e.intra = t.r_l * brace_intra / den;
        e.inter = t.r_l * brace_inter / den;
        e.silhouette = 2.0 * k1 * k1n * sdsd * f * f * kx2 * sq(su) * (b2 * mh2 + s2) * (b2 * mn2 + s2) / brace_inter;
        break;
    }
    }
    return e;
}

}  // namespace

ScenarioMoments scenario_moments(ChannelScenario scenario, const ChannelParams& params)
{
    const ChannelMoments tr = phase_moments(scenario, params, Phase::Train);
    const ChannelMoments te = phase_moments(scenario, params, Phase::Test);
    return {tr.mean, tr.stddev, te.mean, te.stddev};
}

ExpectedScores expected_scores(Method method, ChannelScenario scenario, const ModelParams& params)
{
    const ScenarioMoments sm = scenario_moments(scenario, params.channel);
    require_nonzero(sm.mu_h_train, "training channel mean");
    require_nonzero(sm.mu_h_test, "test channel mean");
    switch (scenario) {
    case ChannelScenario::Deterministic:
        return deterministic(method, params, sm.mu_h_train, sm.sigma_h_train);
    case ChannelScenario::IidStochastic:
        return iid(method, params, sm.mu_h_train, sm.sigma_h_train);
    case ChannelScenario::NonIidStochastic:
        return non_iid(method, params, sm.mu_h_train, sm.sigma_h_train, sm.mu_h_test, sm.sigma_h_test);
    }
    throw std::invalid_argument("expected_scores: unknown scenario");
}

double expected_intra(Method method, ChannelScenario scenario, const ModelParams& params)
{
    return expected_scores(method, scenario, params).intra;
}

double expected_inter(Method method, ChannelScenario scenario, const ModelParams& params)
{
    return expected_scores(method, scenario, params).inter;
}

double expected_silhouette(Method method, ChannelScenario scenario, const ModelParams& params)
{
    return expected_scores(method, scenario, params).silhouette;
}

double composed_silhouette(Method method, ChannelScenario scenario, const ModelParams& params)
{
    const ExpectedScores e = expected_scores(method, scenario, params);
    const double m = std::max(e.intra, e.inter);
    return m > 0.0 ? (e.inter - e.intra) / m : 0.0;
}

}  // namespace rfflab
