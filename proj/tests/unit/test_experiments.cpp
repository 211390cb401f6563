// SPDX-License-Identifier: MIT
#include "rfflab/analytic_scores.hpp"
#include "rfflab/experiments.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <stdexcept>

using namespace rfflab;

namespace {

ExperimentConfig small_config()
{
    ExperimentConfig cfg;
    cfg.n_devices = 3;
    cfg.n_train = 20;
    cfg.n_test = 20;
    cfg.n_trials = 6;
    cfg.snr_db_grid = {10, 30};
    cfg.methods = {Method::Raw, Method::Rc};
    cfg.scenarios = {ChannelScenario::Deterministic, ChannelScenario::NonIidStochastic};
    return cfg;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

bool identical(const std::vector<SweepRecord>& a, const std::vector<SweepRecord>& b)
{
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const SweepRecord& x = a[i];
        const SweepRecord& y = b[i];
        if (x.scenario != y.scenario || x.method != y.method || !same_bits(x.snr_db, y.snr_db) ||
            !same_bits(x.silhouette_empirical, y.silhouette_empirical) ||
            !same_bits(x.silhouette_empirical_stderr, y.silhouette_empirical_stderr) ||
            !same_bits(x.silhouette_analytic, y.silhouette_analytic) || !same_bits(x.accuracy, y.accuracy) ||
            !same_bits(x.accuracy_stderr, y.accuracy_stderr) || !same_bits(x.nonfinite_rate, y.nonfinite_rate) ||
            x.degraded_trials != y.degraded_trials) {
            return false;
        }
    }
    return true;
}

}  // namespace

TEST_SUITE("experiments")
{
    TEST_CASE("config validation")
    {
        CHECK_NOTHROW(ExperimentConfig{}.validate());
        auto bad = [](auto edit) {
            ExperimentConfig cfg;
            edit(cfg);
            return cfg;
        };
        CHECK_THROWS_AS(bad([](auto& c) { c.n_devices = 1; }).validate(), std::invalid_argument);
        CHECK_THROWS_AS(bad([](auto& c) { c.n_train = 1; }).validate(), std::invalid_argument);
        CHECK_THROWS_AS(bad([](auto& c) { c.n_test = 0; }).validate(), std::invalid_argument);
        CHECK_THROWS_AS(bad([](auto& c) { c.n_trials = 0; }).validate(), std::invalid_argument);
        CHECK_THROWS_AS(bad([](auto& c) { c.snr_db_grid = {}; }).validate(), std::invalid_argument);
        CHECK_THROWS_AS(bad([](auto& c) { c.snr_db_grid = {10, 10}; }).validate(), std::invalid_argument);
        CHECK_THROWS_AS(bad([](auto& c) { c.snr_db_grid = {NAN}; }).validate(), std::invalid_argument);
        CHECK_THROWS_AS(bad([](auto& c) { c.methods = {}; }).validate(), std::invalid_argument);
        CHECK_THROWS_AS(bad([](auto& c) { c.lda_ridge = -1.0; }).validate(), std::invalid_argument);
        CHECK_THROWS_AS(bad([](auto& c) { c.params.r_s = 0; }).validate(), std::invalid_argument);
    }

    TEST_CASE("trial shapes")
    {
        const ExperimentConfig cfg = small_config();
        const TrialFeatures f = generate_trial(cfg, ChannelScenario::Deterministic, Method::Raw, 30, 0);
        REQUIRE(f.train.size() == 3);
        for (std::size_t d = 0; d < 3; ++d) {
            CHECK(f.train[d].rows() == 20);
            CHECK(f.test[d].rows() == 20);
            CHECK(f.train[d].cols == 52);
            CHECK(f.train[d].device == d);
            CHECK(f.test[d].phase == Phase::Test);
        }
        CHECK(f.generated == 120);
        CHECK(f.nonfinite_rate() == 0.0);
        CHECK(generate_trial(cfg, ChannelScenario::Deterministic, Method::Sl, 30, 0).train[0].cols == 12);
        CHECK_THROWS_AS(generate_trial(cfg, ChannelScenario::Deterministic, Method::Raw, 20, 0), std::invalid_argument);
    }

    TEST_CASE("trials are reproducible and distinct")
    {
        const ExperimentConfig cfg = small_config();
        const TrialFeatures a = generate_trial(cfg, ChannelScenario::NonIidStochastic, Method::Rc, 10, 3);
        const TrialFeatures b = generate_trial(cfg, ChannelScenario::NonIidStochastic, Method::Rc, 10, 3);
        const TrialFeatures c = generate_trial(cfg, ChannelScenario::NonIidStochastic, Method::Rc, 10, 4);
        for (std::size_t d = 0; d < 3; ++d) {
            CHECK(a.train[d].values == b.train[d].values);
            CHECK(a.test[d].values == b.test[d].values);
            CHECK(a.train[d].values != c.train[d].values);
        }
        ExperimentConfig other = cfg;
        other.master_seed = 43;
        CHECK(generate_trial(other, ChannelScenario::NonIidStochastic, Method::Rc, 10, 3).train[0].values !=
              a.train[0].values);
    }

    TEST_CASE("a device keeps its fingerprint across phases")
    {
        ExperimentConfig cfg = small_config();
        cfg.snr_db_grid = {100};
        const TrialFeatures f = generate_trial(cfg, ChannelScenario::IidStochastic, Method::Cr, 100, 0);
        for (std::size_t d = 0; d < 3; ++d) {
            for (std::size_t k = 0; k < 52; ++k) {
                CHECK(f.test[d].row(5)[k] == doctest::Approx(f.train[d].row(0)[k]).epsilon(1e-3));
            }
        }
        CHECK(f.train[0].row(0)[0] != doctest::Approx(f.train[1].row(0)[0]).epsilon(1e-3));
    }

    TEST_CASE("per-sample redraw option")
    {
        ExperimentConfig cfg = small_config();
        cfg.redraw = CsiRedraw::PerSample;
        const TrialResult r = run_trial(cfg, ChannelScenario::IidStochastic, Method::Raw, 30, 0);
        CHECK(r.silhouette >= -1.0);
        CHECK(r.silhouette <= 1.0);
        CHECK(r.accuracy >= 0.0);
        CHECK(r.accuracy <= 1.0);
    }

    TEST_CASE("sweep is deterministic and independent of the thread count")
    {
        const ExperimentConfig cfg = small_config();
        const std::vector<SweepRecord> one = run_sweep(cfg, 1);
        CHECK(one.size() == 8);
        CHECK(identical(one, run_sweep(cfg, 1)));
        CHECK(identical(one, run_sweep(cfg, 3)));
        CHECK(identical(one, run_sweep(cfg, 16)));
    }

    TEST_CASE("sweep records are sorted and carry the closed form")
    {
        ExperimentConfig cfg = small_config();
        cfg.snr_db_grid = {30, 10};
        cfg.methods = {Method::Rc, Method::Raw};
        const std::vector<SweepRecord> r = run_sweep(cfg, 2);
        REQUIRE(r.size() == 8);
        CHECK(r[0].scenario == ChannelScenario::Deterministic);
        CHECK(r[0].method == Method::Raw);
        CHECK(r[0].snr_db == 10);
        CHECK(r[1].snr_db == 30);
        CHECK(r[2].method == Method::Rc);
        CHECK(r[7].scenario == ChannelScenario::NonIidStochastic);
        for (const SweepRecord& s : r) {
            CHECK(s.silhouette_analytic ==
                  expected_silhouette(s.method, s.scenario, with_snr_db(cfg.params, s.snr_db)));
            CHECK(s.accuracy >= 0.0);
            CHECK(s.accuracy <= 1.0);
            CHECK(s.nonfinite_rate >= 0.0);
        }
    }

    TEST_CASE("single point sweep aggregates its trials")
    {
        ExperimentConfig cfg = small_config();
        cfg.scenarios = {ChannelScenario::IidStochastic};
        cfg.methods = {Method::Pc};
        cfg.snr_db_grid = {30};
        const std::vector<SweepRecord> r = run_sweep(cfg, 1);
        REQUIRE(r.size() == 1);
        std::vector<double> sil, acc;
        for (std::size_t t = 0; t < cfg.n_trials; ++t) {
            const TrialResult tr = run_trial(cfg, ChannelScenario::IidStochastic, Method::Pc, 30, t);
            sil.push_back(tr.silhouette);
            acc.push_back(tr.accuracy);
        }
        CHECK(r[0].silhouette_empirical == doctest::Approx(mean_and_stderr(sil).mean).epsilon(1e-14));
        CHECK(r[0].silhouette_empirical_stderr == doctest::Approx(mean_and_stderr(sil).standard_error).epsilon(1e-12));
        CHECK(r[0].accuracy == doctest::Approx(mean_and_stderr(acc).mean).epsilon(1e-14));
    }

    TEST_CASE("identical devices")
    {
        ExperimentConfig cfg;
        cfg.n_devices = 5;
        cfg.n_train = 200;
        cfg.n_test = 200;
        cfg.params.sigma_u = 0.0;
        cfg.params.sigma_s = 0.0;
        cfg.snr_db_grid = {30};
        for (Method m : {Method::Sl, Method::Pc}) {
            const TrialResult r = run_trial(cfg, ChannelScenario::Deterministic, m, 30, 0);
            const double eps = std::sqrt(0.2 * 0.8 / 1000.0);
            CAPTURE(to_string(m));
            CHECK(std::abs(r.accuracy - 0.2) <= 3.0 * eps);
            CHECK(std::abs(r.silhouette) <= 0.05);
        }
    }

    TEST_CASE("standard error halves with four times the trials")
    {
        ExperimentConfig cfg;
        cfg.n_devices = 2;
        cfg.n_train = 20;
        cfg.n_test = 20;
        cfg.scenarios = {ChannelScenario::IidStochastic};
        cfg.methods = {Method::Cr};
        cfg.snr_db_grid = {20};
        cfg.n_trials = 100;
        const double small = run_sweep(cfg, 1)[0].silhouette_empirical_stderr;
        cfg.n_trials = 400;
        const double large = run_sweep(cfg, 1)[0].silhouette_empirical_stderr;
        CHECK(std::abs(large / small - 0.5) <= 0.125);
    }

    TEST_CASE("fixed-channel silhouette does not fall with SNR")
    {
        ExperimentConfig cfg;
        cfg.n_devices = 2;
        cfg.n_train = 30;
        cfg.n_test = 30;
        cfg.n_trials = 30;
        cfg.scenarios = {ChannelScenario::Deterministic};
        const std::vector<SweepRecord> r = run_sweep(cfg, 1);
        for (std::size_t i = 1; i < r.size(); ++i) {
            if (r[i].method != r[i - 1].method) continue;
            const double se = std::hypot(r[i].silhouette_empirical_stderr, r[i - 1].silhouette_empirical_stderr);
            CAPTURE(to_string(r[i].method));
            CAPTURE(r[i].snr_db);
            CHECK(r[i].silhouette_empirical >= r[i - 1].silhouette_empirical - 2.0 * se);
        }
    }

    TEST_CASE("mean and standard error")
    {
        const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
        const MeanAndError m = mean_and_stderr(v);
        CHECK(m.mean == 2.5);
        CHECK(m.standard_error == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
        CHECK(mean_and_stderr(std::vector<double>{7.0}).standard_error == 0.0);
        CHECK_THROWS_AS(mean_and_stderr(std::vector<double>{}), std::invalid_argument);
    }

    TEST_CASE("correlation")
    {
        std::vector<std::pair<double, double>> line, anti;
        for (int i = 0; i < 12; ++i) {
            line.emplace_back(0.1 * i, 0.3 + 0.05 * i);
            anti.emplace_back(0.1 * i, 1.0 - 0.2 * i);
        }
        const CorrelationReport up = correlate(line, 1000, 1);
        CHECK(up.pearson_r == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(up.p_value <= 1.0 / 1001.0 + 1e-15);
        CHECK(up.ls_slope == doctest::Approx(0.5));
        CHECK(up.ls_intercept == doctest::Approx(0.3));
        CHECK(up.n_points == 12);
        CHECK(correlate(anti, 1000, 1).pearson_r == doctest::Approx(-1.0).epsilon(1e-12));

        RngStream rng(9);
        std::vector<std::pair<double, double>> noise;
        for (int i = 0; i < 40; ++i) noise.emplace_back(rng.normal(0.0, 1.0), rng.normal(0.0, 1.0));
        const CorrelationReport n = correlate(noise, 2000, 3);
        CHECK(n.p_value > 0.01);
        CHECK(n.p_value <= 1.0);
        CHECK(correlate(noise, 2000, 3).p_value == n.p_value);

        const std::vector<std::pair<double, double>> flat{{0.5, 0.1}, {0.5, 0.2}, {0.5, 0.3}};
        CHECK_THROWS_AS(correlate(flat, 1000, 1), std::domain_error);
        CHECK_THROWS_AS(correlate(std::span(line).first(2), 1000, 1), std::invalid_argument);
        CHECK_THROWS_AS(correlate(line, 999, 1), std::invalid_argument);
    }
}
