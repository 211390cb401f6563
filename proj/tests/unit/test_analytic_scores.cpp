// SPDX-License-Identifier: MIT
#include "rfflab/analytic_scores.hpp"
#include "rfflab/experiments.hpp"
#include "rfflab/silhouette.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <string>

using namespace rfflab;

namespace {

struct FrozenScore {
    const char* scenario;
    const char* method;
    double snr_db;
    double intra, inter, silhouette;
};

// Reference values from an independent evaluation of the closed forms with the
// default parameter set.
const FrozenScore kFrozen[] = {
    {"det", "RAW", 0, 100.70444697281464, 101.73414994311165, 0.010121507584943951},
    {"det", "RAW", 10, 78.35750612168016, 86.36956112262196, 0.092764799274211843},
    {"det", "RAW", 20, 24.341720304271501, 49.231129315389111, 0.50556242274412866},
    {"det", "RAW", 30, 3.0837657524091919, 34.615270570793179, 0.91091314031180393},
    {"det", "RAW", 40, 0.31683168316831678, 32.712871287128706, 0.99031476997578693},
    {"det", "SL", 0, 29.750946715203639, 29.863526422515942, 0.0037698062083996002},
    {"det", "SL", 10, 24.236865614497809, 25.020972476283657, 0.031337985065491493},
    {"det", "SL", 20, 18.383369133869735, 24.087377580369171, 0.23680487539449344},
    {"det", "SL", 30, 5.8719945339097848, 24.002827288041747, 0.75536238029612368},
    {"det", "SL", 40, 0.75326274950103556, 24.00003631582053, 0.9686140995959871},
    {"det", "CR", 0, 128.55995130858184, 129.31953743152769, 0.0058737151248164478},
    {"det", "CR", 10, 103.13242961418145, 108.33785192909281, 0.048048048048048048},
    {"det", "CR", 20, 70.306335204490765, 104.33360064153968, 0.32613908872901687},
    {"det", "CR", 30, 17.88272242654655, 104.00859539650399, 0.8280649559935539},
    {"det", "CR", 40, 2.1165138881679013, 104.00010186321533, 0.97964892485440436},
    {"det", "PC", 0, 200.99999999999997, 204, 0.01470588235294118},
    {"det", "PC", 10, 102.97536945812809, 109.1231527093596, 0.056338028169014086},
    {"det", "PC", 20, 69.21854304635761, 104.34437086092714, 0.33663366336633671},
    {"det", "PC", 30, 17.378003159032335, 104.00864577271594, 0.83291770573566082},
    {"det", "PC", 40, 2.048811181820231, 104.00010193090458, 0.98029991179065001},
    {"det", "RC", 0, 152.64617239300784, 154.15069318866787, 0.0097600650671004485},
    {"det", "RC", 10, 102.78628738147336, 110.06856309263308, 0.066161268090971753},
    {"det", "RC", 20, 63.108515815085141, 104.40486618004866, 0.39554047503635487},
    {"det", "RC", 30, 13.896793998746137, 104.00899323345656, 0.8663885346187935},
    {"det", "RC", 40, 1.5809333640529404, 104.00010239868929, 0.9847987326205474},
    {"iid", "RAW", 0, 102.99295553027186, 104, 0.0096831199012321779},
    {"iid", "RAW", 10, 96.164249387831987, 104, 0.075343755886230934},
    {"iid", "RAW", 20, 79.658279695728467, 104, 0.23405500292568754},
    {"iid", "RAW", 30, 73.162342475908076, 104, 0.29651593773165308},
    {"iid", "RAW", 40, 72.316831683168289, 104, 0.30464584920030463},
    {"iid", "SL", 0, 23.849893723583595, 24, 0.006254428184017005},
    {"iid", "SL", 10, 23.209358914365932, 24, 0.032943378568086101},
    {"iid", "SL", 20, 18.295432336986202, 24.000000000000004, 0.23769031929224163},
    {"iid", "SL", 30, 5.869149151224569, 24, 0.75545211869897633},
    {"iid", "SL", 40, 0.75322620125925099, 24, 0.96861557494753103},
    {"iid", "CR", 0, 102.98721850273888, 104, 0.0097382836275106532},
    {"iid", "CR", 10, 98.751199165797715, 104, 0.050469238790406677},
    {"iid", "CR", 20, 69.96939855653568, 104, 0.3272173215717723},
    {"iid", "CR", 30, 17.874041076077521, 104, 0.82813422042233154},
    {"iid", "CR", 40, 2.116411006320416, 104.00000000000001, 0.97964989416999604},
    {"iid", "PC", 0, 100, 104, 0.038461538461538471},
    {"iid", "PC", 10, 97.800985221674878, 104.00000000000001, 0.059605911330049284},
    {"iid", "PC", 20, 68.870728476821185, 104, 0.33778145695364237},
    {"iid", "PC", 30, 17.369270928589241, 104, 0.83298777953279557},
    {"iid", "PC", 40, 2.0487082316066174, 104, 0.98030088238839808},
    {"iid", "RC", 0, 101.99397227245329, 104, 0.019288728149487646},
    {"iid", "RC", 10, 96.657038657913915, 104, 0.070605397520058372},
    {"iid", "RC", 20, 62.699600973235995, 104.00000000000001, 0.39711922141119227},
    {"iid", "RC", 30, 13.887710832955014, 104, 0.86646431891389408},
    {"iid", "RC", 40, 1.5808299413767506, 104, 0.98479971210214667},
    {"non", "RAW", 0, 103.00146420574718, 104, 0.0096013057139694019},
    {"non", "RAW", 10, 96.639063789662984, 104.00000000000004, 0.070778232791702395},
    {"non", "RAW", 20, 83.527360725067368, 103.99999999999959, 0.19685230072050267},
    {"non", "RAW", 30, 79.020956711669996, 104.00000000000081, 0.24018310854164035},
    {"non", "RAW", 40, 78.45621307469807, 104.00000000000043, 0.24561333582021377},
    {"non", "SL", 0, 23.850847227145145, 23.999999999999993, 0.0062146988689519827},
    {"non", "SL", 10, 23.21804272464901, 24.000000000000021, 0.032581553139625741},
    {"non", "SL", 20, 18.349181155771905, 23.999999999999805, 0.23545078517616602},
    {"non", "SL", 30, 5.9249572865693381, 23.999999999999758, 0.75312677972626085},
    {"non", "SL", 40, 0.7624544216033704, 24.00000000000033, 0.96823106576649631},
    {"non", "CR", 0, 102.99362954273235, 104, 0.0096766390121889867},
    {"non", "CR", 10, 98.807740859836073, 103.99999999999989, 0.049925568655419729},
    {"non", "CR", 20, 70.252374218909694, 103.9999999999997, 0.32449640174124883},
    {"non", "CR", 30, 18.060286429759184, 103.9999999999993, 0.82634339971386261},
    {"non", "CR", 40, 2.1425958589351239, 104.00000000000031, 0.97939811674101684},
    {"non", "PC", 0, 99.999999999999986, 103.99999999999989, 0.038461538461538505},
    {"non", "PC", 10, 97.800985221674736, 104.00000000000006, 0.059605911330049242},
    {"non", "PC", 20, 68.87072847682073, 103.9999999999999, 0.33778145695364276},
    {"non", "PC", 30, 17.369270928585511, 103.99999999999642, 0.83298777953282421},
    {"non", "PC", 40, 2.0487082316052914, 104.00000000000269, 0.98030088238837276},
    {"non", "RC", 0, 102.00654937278593, 103.99999999999997, 0.019167794492442963},
    {"non", "RC", 10, 96.712637867126205, 103.99999999999953, 0.070070789739168568},
    {"non", "RC", 20, 62.909021224036771, 103.99999999999775, 0.3951055651534795},
    {"non", "RC", 30, 13.989811191758616, 103.99999999999778, 0.86548258469463879},
    {"non", "RC", 40, 1.5940629150190719, 103.99999999999535, 0.98467247197100982},
};

// Same closed forms with every parameter moved off its default.
const FrozenScore kPerturbed[] = {
    {"det", "RAW", 25, 13.885322120190084, 66.586206342790973, 0.79146849050526524},
    {"iid", "RAW", 25, 51.74437084241054, 104, 0.5024579726691295},
    {"non", "RAW", 25, 80.693813274688722, 104.00000000000053, 0.22409794928184149},
    {"det", "SL", 25, 13.913159770727678, 24.019985413151517, 0.42076735137774524},
    {"iid", "SL", 25, 13.893053458163266, 24, 0.42112277257653064},
    {"non", "SL", 25, 17.14133677270134, 24.000000000000419, 0.28577763447078547},
    {"det", "CR", 25, 42.823023477929986, 104.12983792899368, 0.588753576019862},
    {"iid", "CR", 25, 42.691640370277199, 104, 0.58950345797810377},
    {"non", "CR", 25, 57.893998313321468, 104.00000000000192, 0.44332693929499634},
    {"det", "PC", 25, 49.611124018409015, 104.11543131778012, 0.52349883787172302},
    {"iid", "PC", 25, 49.49431897254955, 104, 0.52409308680240818},
    {"non", "PC", 25, 57.000252375772057, 103.99999999999943, 0.45192065023295908},
    {"det", "RC", 25, 36.32455681388992, 104.14362984061245, 0.65120711780947937},
    {"iid", "RC", 25, 36.17921765947186, 104, 0.65212290712046295},
    {"non", "RC", 25, 50.42605668247279, 103.99999999999973, 0.51513407036084014},
};

ModelParams perturbed_params()
{
    ModelParams p;
    p.channel = {1.3, 0.12, 0.8, 0.25};
    p.f_ra = 1.2;
    p.x = 0.9;
    p.f_ta = 1.1;
    p.f_ru = 0.95;
    p.f_tu_l = 1.05;
    p.mu_u = 1.1;
    p.sigma_u = 0.12;
    p.mu_s = 0.9;
    p.sigma_s = 0.07;
    return p;
}

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

void check_table(const ModelParams& base, std::span<const FrozenScore> table)
{
    for (const FrozenScore& f : table) {
        const Method m = parse_method(f.method);
        const ChannelScenario s = parse_scenario(f.scenario);
        const ModelParams p = with_snr_db(base, f.snr_db);
        CAPTURE(std::string(f.scenario));
        CAPTURE(std::string(f.method));
        CAPTURE(f.snr_db);
        const ExpectedScores e = expected_scores(m, s, p);
        CHECK(close(e.intra, f.intra, 1e-9));
        CHECK(close(e.inter, f.inter, 1e-9));
        CHECK(close(e.silhouette, f.silhouette, 1e-9));
    }
}

}  // namespace

TEST_SUITE("analytic_scores")
{
    TEST_CASE("scenario moments")
    {
        const ChannelParams c;
        const ScenarioMoments det = scenario_moments(ChannelScenario::Deterministic, c);
        CHECK(det.mu_h_test == det.mu_h_train);
        CHECK(det.sigma_h_test == det.sigma_h_train);
        const ScenarioMoments non = scenario_moments(ChannelScenario::NonIidStochastic, c);
        CHECK(non.mu_h_train == 1.0);
        CHECK(non.sigma_h_train == 0.15);
        CHECK(non.sigma_h_test == 0.2);
    }

    TEST_CASE("reference table at default parameters")
    {
        check_table(ModelParams{}, kFrozen);
    }

    TEST_CASE("reference table with perturbed parameters")
    {
        check_table(perturbed_params(), kPerturbed);
    }

    TEST_CASE("printed silhouette equals the composed one")
    {
        // The perturbed set starts at 10 dB: at 0 dB its shifted test channel
        // drives the second-order PC variance negative (checked below).
        const struct {
            ModelParams base;
            double lowest_snr;
        } sets[] = {{ModelParams{}, 0.0}, {perturbed_params(), 10.0}};
        for (const auto& set : sets) {
            for (ChannelScenario s : kAllScenarios) {
                for (Method m : kAllMethods) {
                    for (double snr = set.lowest_snr; snr <= 40.0; snr += 10.0) {
                        const ModelParams p = with_snr_db(set.base, snr);
                        CAPTURE(to_string(s));
                        CAPTURE(to_string(m));
                        CAPTURE(snr);
                        const double printed = expected_silhouette(m, s, p);
                        const double composed = composed_silhouette(m, s, p);
                        CHECK(std::abs(printed - composed) <= 1e-6 * std::max(1e-12, std::abs(composed)));
                    }
                }
            }
        }
    }

    TEST_CASE("RAW with a fixed channel")
    {
        ModelParams p;
        p.sigma_n = 0.1;
        CHECK(expected_intra(Method::Raw, ChannelScenario::Deterministic, p) ==
              doctest::Approx(2.0 * 52 * 0.01 / 0.042725).epsilon(1e-12));
        CHECK(expected_intra(Method::Raw, ChannelScenario::Deterministic, p) == doctest::Approx(24.34).epsilon(1e-3));
        const double inter = 2.0 * 52 * (0.01 * (1.0 + 0.0225) + 0.01) / 0.042725;
        CHECK(expected_inter(Method::Raw, ChannelScenario::Deterministic, p) == doctest::Approx(inter).epsilon(1e-12));
    }

    TEST_CASE("fixed channel without noise has zero intra distance")
    {
        ModelParams p;
        p.sigma_n = 0.0;
        for (Method m : kAllMethods) CHECK(expected_intra(m, ChannelScenario::Deterministic, p) == 0.0);
    }

    TEST_CASE("identical devices have equal intra and inter distances")
    {
        ModelParams p = with_snr_db(ModelParams{}, 20.0);
        p.sigma_u = 0.0;
        CHECK(expected_inter(Method::Raw, ChannelScenario::Deterministic, p) ==
              expected_intra(Method::Raw, ChannelScenario::Deterministic, p));
    }

    TEST_CASE("noiseless limits")
    {
        ModelParams p;
        p.sigma_n = 1e-9;
        CHECK(expected_silhouette(Method::Raw, ChannelScenario::Deterministic, p) == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(expected_silhouette(Method::Raw, ChannelScenario::IidStochastic, p) ==
              doctest::Approx(0.01 / (0.0225 + 0.01 + 0.000225)).epsilon(1e-6));
        CHECK(expected_silhouette(Method::Raw, ChannelScenario::IidStochastic, p) == doctest::Approx(0.3056).epsilon(1e-3));
    }

    TEST_CASE("amplification helps at moderate noise")
    {
        ModelParams p;
        p.sigma_n = 0.1;
        CHECK(expected_silhouette(Method::Rc, ChannelScenario::Deterministic, p) >
              expected_silhouette(Method::Pc, ChannelScenario::Deterministic, p));
    }

    TEST_CASE("method ordering with i.i.d. channels")
    {
        for (double snr = 15.0; snr <= 35.0; snr += 1.0) {
            const ModelParams p = with_snr_db(ModelParams{}, snr);
            const auto s = [&](Method m) { return expected_silhouette(m, ChannelScenario::IidStochastic, p); };
            CAPTURE(snr);
            CHECK(s(Method::Rc) >= s(Method::Pc));
            CHECK(s(Method::Pc) >= s(Method::Cr));
            CHECK(s(Method::Cr) >= s(Method::Sl));
        }
    }

    TEST_CASE("high-SNR limits")
    {
        const ModelParams p = with_snr_db(ModelParams{}, 100.0);
        for (Method m : kAllMethods) {
            CAPTURE(to_string(m));
            CHECK(expected_silhouette(m, ChannelScenario::Deterministic, p) > 0.999);
            for (ChannelScenario s : {ChannelScenario::IidStochastic, ChannelScenario::NonIidStochastic}) {
                if (m == Method::Raw) {
                    CHECK(expected_silhouette(m, s, p) < 0.5);
                } else {
                    CHECK(expected_silhouette(m, s, p) > 0.999);
                }
            }
        }
    }

    TEST_CASE("matched non-i.i.d. moments reduce to the i.i.d. case")
    {
        for (const ModelParams& seed_params : {ModelParams{}, perturbed_params()}) {
            ModelParams base = seed_params;
            base.channel.mu_h_non = base.channel.mu_h;
            base.channel.sigma_h_non = base.channel.sigma_h;
            for (Method m : kAllMethods) {
                for (double snr : {0.0, 10.0, 20.0, 30.0, 40.0}) {
                    const ModelParams p = with_snr_db(base, snr);
                    const ExpectedScores a = expected_scores(m, ChannelScenario::NonIidStochastic, p);
                    const ExpectedScores b = expected_scores(m, ChannelScenario::IidStochastic, p);
                    CAPTURE(to_string(m));
                    CAPTURE(snr);
                    CHECK(close(a.intra, b.intra, 1e-6));
                    CHECK(close(a.inter, b.inter, 1e-6));
                    CHECK(close(a.silhouette, b.silhouette, 1e-6));
                }
            }
        }
    }

    TEST_CASE("amplification keeps its lead under a channel shift")
    {
        for (double snr = 25.0; snr <= 40.0; snr += 2.5) {
            const ModelParams p = with_snr_db(ModelParams{}, snr);
            CAPTURE(snr);
            CHECK(expected_silhouette(Method::Rc, ChannelScenario::NonIidStochastic, p) >=
                  expected_silhouette(Method::Pc, ChannelScenario::NonIidStochastic, p));
        }
    }

    TEST_CASE("zero denominators are domain errors")
    {
        ModelParams p = with_snr_db(ModelParams{}, 20.0);
        p.f_ru = 0.0;
        CHECK_THROWS_AS(expected_intra(Method::Cr, ChannelScenario::IidStochastic, p), std::domain_error);
        p = with_snr_db(ModelParams{}, 20.0);
        p.channel.mu_h_non = 0.0;
        CHECK_THROWS_AS(expected_silhouette(Method::Rc, ChannelScenario::NonIidStochastic, p), std::domain_error);
        p = with_snr_db(ModelParams{}, 20.0);
        p.f_ra = 0.0;
        CHECK_THROWS_AS(expected_inter(Method::Raw, ChannelScenario::Deterministic, p), std::domain_error);
        CHECK_THROWS_AS(expected_scores(Method::Pc, ChannelScenario::NonIidStochastic, with_snr_db(perturbed_params(), 0.0)),
                        std::domain_error);
    }

    TEST_CASE("SL inter distance agrees with simulation")
    {
        ExperimentConfig cfg;
        cfg.n_devices = 2;
        cfg.snr_db_grid = {30};
        double total = 0.0;
        std::size_t count = 0;
        for (std::size_t trial = 0; trial < 50; ++trial) {
            TrialFeatures f = generate_trial(cfg, ChannelScenario::IidStochastic, Method::Sl, 30, trial);
            std::vector<NormalizedSample> test[2];
            for (std::size_t d = 0; d < 2; ++d) {
                for (std::size_t i = 0; i < f.test[d].rows(); ++i) test[d].push_back(normalize(f.test[d].row(i)));
            }
            for (std::size_t d = 0; d < 2; ++d) {
                const std::vector<DeviceSamples> other{{1 - d, test[1 - d]}};
                for (std::size_t i = 0; i < f.train[d].rows(); ++i) {
                    total += inter_distance(normalize(f.train[d].row(i)), other);
                    ++count;
                }
            }
        }
        CHECK(count == 10'000);
        const double expected = expected_inter(Method::Sl, ChannelScenario::IidStochastic, with_snr_db(ModelParams{}, 30));
        CHECK(std::abs(total / static_cast<double>(count) / expected - 1.0) < 0.05);
    }
}
