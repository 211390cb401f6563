// SPDX-License-Identifier: MIT
#include "rfflab/experiments.hpp"

#include "rfflab/analytic_scores.hpp"
#include "rfflab/rng.hpp"
#include "rfflab/silhouette.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>

namespace rfflab {

namespace {

std::uint64_t phase_id(Phase p) { return p == Phase::Train ? 0 : 1; }

std::size_t snr_index_of(const ExperimentConfig& cfg, double snr_db)
{
    const auto it = std::find(cfg.snr_db_grid.begin(), cfg.snr_db_grid.end(), snr_db);
    if (it == cfg.snr_db_grid.end()) {
        throw std::invalid_argument("snr " + std::to_string(snr_db) + " dB is not on the configured grid");
    }
    return static_cast<std::size_t>(it - cfg.snr_db_grid.begin());
}

bool all_finite(std::span<const double> v)
{
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

void ExperimentConfig::validate() const
{
    params.validate();
    if (scenarios.empty()) throw std::invalid_argument("experiment: no scenarios");
    if (methods.empty()) throw std::invalid_argument("experiment: no methods");
    if (snr_db_grid.empty()) throw std::invalid_argument("experiment: empty SNR grid");
    for (double s : snr_db_grid) {
        if (!std::isfinite(s)) throw std::invalid_argument("experiment: SNR values must be finite");
    }
    std::vector<double> sorted = snr_db_grid;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw std::invalid_argument("experiment: duplicate SNR value in grid");
    }
    if (n_devices < 2) throw std::invalid_argument("experiment: n_devices must be at least 2");
    if (n_train < 2) throw std::invalid_argument("experiment: n_train must be at least 2");
    if (n_test < 1) throw std::invalid_argument("experiment: n_test must be at least 1");
    if (n_trials < 1) throw std::invalid_argument("experiment: n_trials must be at least 1");
    if (!(lda_ridge >= 0.0)) throw std::invalid_argument("experiment: lda_ridge must be non-negative");
}

TrialFeatures generate_trial(const ExperimentConfig& cfg, ChannelScenario scenario, Method method, double snr_db,
                             std::size_t trial_index)
{
    const std::size_t snr_index = snr_index_of(cfg, snr_db);
    const ModelParams params = with_snr_db(cfg.params, snr_db);
    const std::size_t K = subcarriers(method, params);

    StreamKey base;
    base.master_seed = cfg.master_seed;
    base.scenario = static_cast<std::uint64_t>(scenario);
    base.method = static_cast<std::uint64_t>(method);
    base.snr_index = snr_index;
    base.trial = trial_index;

    auto key = [&](StreamRole role, std::uint64_t device, std::uint64_t phase, std::uint64_t sample) {
        StreamKey k = base;
        k.role = role;
        k.device = device;
        k.phase = phase;
        k.sample = sample;
        return k;
    };

    RngStream channel_rng(key(StreamRole::Channel, kAnyIndex, kAnyIndex, kAnyIndex));
    const TrialChannel channel = init_trial_channel(scenario, params.channel, K, channel_rng);

    // One CSI vector per phase, shared by every device, unless redrawn per sample.
    std::vector<double> phase_csi[2];
    for (Phase ph : {Phase::Train, Phase::Test}) {
        RngStream r(key(StreamRole::Channel, kAnyIndex, phase_id(ph), kAnyIndex));
        phase_csi[phase_id(ph)] = sample_csi(channel, ph, r);
    }
    const double amplification[2] = {
        method == Method::Rc ? rc_amplification(params, scenario, Phase::Train) : 1.0,
        method == Method::Rc ? rc_amplification(params, scenario, Phase::Test) : 1.0,
    };

    TrialFeatures out;
    out.train.resize(cfg.n_devices);
    out.test.resize(cfg.n_devices);
    for (std::size_t d = 0; d < cfg.n_devices; ++d) {
        RngStream fp_rng(key(StreamRole::Fingerprint, d, kAnyIndex, kAnyIndex));
        const DeviceFingerprint fp = draw_fingerprint(params, fp_rng);
        for (Phase ph : {Phase::Train, Phase::Test}) {
            const std::uint64_t p = phase_id(ph);
            FeatureMatrix& set = ph == Phase::Train ? out.train[d] : out.test[d];
            set = FeatureMatrix{K, {}, d, ph, method};
            const std::size_t n = ph == Phase::Train ? cfg.n_train : cfg.n_test;
            set.values.reserve(n * K);
            for (std::size_t i = 0; i < n; ++i) {
                std::vector<double> csi;
                if (cfg.redraw == CsiRedraw::PerSample && scenario != ChannelScenario::Deterministic) {
                    RngStream r(key(StreamRole::Channel, d, p, i));
                    csi = sample_csi(channel, ph, r);
                }
                RngStream n1(key(StreamRole::Noise1, d, p, i));
                RngStream n2(key(StreamRole::Noise2, d, p, i));
                const std::vector<double> sample =
                    extract_sample(method, params, fp, csi.empty() ? phase_csi[p] : csi, amplification[p], n1, n2);
                ++out.generated;
                if (all_finite(sample)) {
                    set.append_row(sample);
                } else {
                    ++out.dropped;
                }
            }
        }
    }
    return out;
}

TrialResult run_trial(const ExperimentConfig& cfg, ChannelScenario scenario, Method method, double snr_db,
                      std::size_t trial_index)
{
    TrialFeatures f = generate_trial(cfg, scenario, method, snr_db, trial_index);
    for (std::size_t d = 0; d < f.train.size(); ++d) {
        if (f.train[d].rows() < 2 || f.test[d].rows() < 1) {
            throw std::runtime_error("trial " + std::to_string(trial_index) + ": device " + std::to_string(d) +
                                     " has too few finite samples after dropping non-finite ones");
        }
    }

    // Normalized copies feed the silhouette; LDA uses them too unless disabled.
    std::vector<FeatureMatrix> train_n = f.train;
    std::vector<FeatureMatrix> test_n = f.test;
    for (auto& m : train_n) normalize_rows(m);
    for (auto& m : test_n) normalize_rows(m);

    TrialResult r;
    r.silhouette = silhouette_score_normalized(train_n, test_n);
    const auto& lda_train = cfg.normalize_for_lda ? train_n : f.train;
    const auto& lda_test = cfg.normalize_for_lda ? test_n : f.test;
    const LdaModel model = fit(lda_train, cfg.lda_ridge);
    r.accuracy = accuracy(model, lda_test);
    r.nonfinite_rate = f.nonfinite_rate();
    r.degraded = r.nonfinite_rate > kDegradedNonfiniteRate;
    return r;
}

MeanAndError mean_and_stderr(std::span<const double> values)
{
    if (values.empty()) {
        throw std::invalid_argument("mean_and_stderr: no values");
    }
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    if (values.size() == 1) return {mean, 0.0};
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

std::vector<SweepRecord> run_sweep(const ExperimentConfig& cfg, std::size_t threads)
{
    cfg.validate();

    struct Cell {
        ChannelScenario scenario;
        Method method;
        double snr_db;
    };
    std::vector<Cell> cells;
    for (ChannelScenario s : cfg.scenarios) {
        for (Method m : cfg.methods) {
            for (double snr : cfg.snr_db_grid) cells.push_back({s, m, snr});
        }
    }
    std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
        return std::tie(a.scenario, a.method, a.snr_db) < std::tie(b.scenario, b.method, b.snr_db);
    });
    cells.erase(std::unique(cells.begin(), cells.end(),
                            [](const Cell& a, const Cell& b) {
                                return a.scenario == b.scenario && a.method == b.method && a.snr_db == b.snr_db;
                            }),
                cells.end());

    const std::size_t n_tasks = cells.size() * cfg.n_trials;
    std::vector<TrialResult> results(n_tasks);
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::size_t error_task = std::numeric_limits<std::size_t>::max();
    std::exception_ptr error;

    auto worker = [&] {
        for (;;) {
            const std::size_t t = next.fetch_add(1);
            if (t >= n_tasks) return;
            const Cell& c = cells[t / cfg.n_trials];
            try {
                results[t] = run_trial(cfg, c.scenario, c.method, c.snr_db, t % cfg.n_trials);
            } catch (...) {
                // Keep the error of the lowest task so failures are reproducible.
                const std::lock_guard lock(error_mutex);
                if (t < error_task) {
                    error_task = t;
                    error = std::current_exception();
                }
            }
        }
    };
    const std::size_t n_workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, n_tasks));
    {
        std::vector<std::jthread> pool;
        for (std::size_t i = 1; i < n_workers; ++i) pool.emplace_back(worker);
        worker();
    }
    if (error) std::rethrow_exception(error);

    std::vector<SweepRecord> records;
    records.reserve(cells.size());
    std::vector<double> sil(cfg.n_trials), acc(cfg.n_trials);
    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
        const Cell& c = cells[ci];
        SweepRecord rec;
        rec.scenario = c.scenario;
        rec.method = c.method;
        rec.snr_db = c.snr_db;
        double nonfinite = 0.0;
        for (std::size_t t = 0; t < cfg.n_trials; ++t) {
            const TrialResult& r = results[ci * cfg.n_trials + t];
            sil[t] = r.silhouette;
            acc[t] = r.accuracy;
            nonfinite += r.nonfinite_rate;
            rec.degraded_trials += r.degraded ? 1 : 0;
        }
        const MeanAndError s = mean_and_stderr(sil);
        const MeanAndError a = mean_and_stderr(acc);
        rec.silhouette_empirical = s.mean;
        rec.silhouette_empirical_stderr = s.standard_error;
        rec.accuracy = a.mean;
        rec.accuracy_stderr = a.standard_error;
        rec.nonfinite_rate = nonfinite / static_cast<double>(cfg.n_trials);
        try {
            rec.silhouette_analytic = expected_silhouette(c.method, c.scenario, with_snr_db(cfg.params, c.snr_db));
        } catch (const std::domain_error&) {
            rec.silhouette_analytic = std::numeric_limits<double>::quiet_NaN();
        }
        records.push_back(rec);
    }
    return records;
}

namespace {

double pearson(std::span<const double> x, std::span<const double> y)
{
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace

CorrelationReport correlate(std::span<const std::pair<double, double>> points, std::size_t n_permutations,
                            std::uint64_t seed)
{
    if (points.size() < 3) {
        throw std::invalid_argument("correlate: need at least three points");
    }
    if (n_permutations < kMinPermutations) {
        throw std::invalid_argument("correlate: need at least " + std::to_string(kMinPermutations) +
                                    " permutations");
    }
    std::vector<double> x, y;
    x.reserve(points.size());
    y.reserve(points.size());
    for (const auto& [s, a] : points) {
        if (!std::isfinite(s) || !std::isfinite(a)) {
            throw std::invalid_argument("correlate: non-finite input value");
        }
        x.push_back(s);
        y.push_back(a);
    }
    auto variance = [](const std::vector<double>& v) {
        const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        double ss = 0.0;
        for (double e : v) ss += (e - m) * (e - m);
        return ss;
    };
    if (!(variance(x) > 0.0)) throw std::domain_error("correlate: silhouette column has zero variance");
    if (!(variance(y) > 0.0)) throw std::domain_error("correlate: accuracy column has zero variance");

    CorrelationReport rep;
    rep.n_points = points.size();
    rep.pearson_r = pearson(x, y);

    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) sxy += (x[i] - mx) * (y[i] - my);
    rep.ls_slope = sxy / variance(x);
    rep.ls_intercept = my - rep.ls_slope * mx;

    // Small slack so permutations that reproduce the observed order count.
    const double threshold = std::abs(rep.pearson_r) * (1.0 - 1e-12);
    Xoshiro256 engine(derive_seed({seed, 0x636f7272ULL}));
    std::vector<double> shuffled = y;
    std::size_t extreme = 0;
    for (std::size_t p = 0; p < n_permutations; ++p) {
        std::shuffle(shuffled.begin(), shuffled.end(), engine);
        if (std::abs(pearson(x, shuffled)) >= threshold) ++extreme;
    }
    rep.p_value = static_cast<double>(extreme + 1) / static_cast<double>(n_permutations + 1);
    return rep;
}

CorrelationReport correlate(std::span<const SweepRecord> records, std::size_t n_permutations, std::uint64_t seed)
{
    std::vector<std::pair<double, double>> points;
    points.reserve(records.size());
    for (const auto& r : records) points.emplace_back(r.silhouette_empirical, r.accuracy);
    return correlate(points, n_permutations, seed);
}

}  // namespace rfflab
