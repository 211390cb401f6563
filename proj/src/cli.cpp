// SPDX-License-Identifier: MIT
#include "rfflab/cli.hpp"

#include "rfflab/config.hpp"
#include "rfflab/rng.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace rfflab {

namespace {

using nlohmann::json;

// Output file that could not be written; reported as a runtime failure.
struct WriteError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_output(const std::string& path, const std::string& content, std::ostream& out)
{
    if (path == "-") {
        out << content;
        out.flush();
        return;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw WriteError("cannot open '" + path + "' for writing");
    f << content;
    f.flush();
    if (!f) throw WriteError("failed writing '" + path + "'");
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open '" + path.string() + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

json record_json(const SweepRecord& r)
{
    // Non-finite values serialize as null.
    return json{{"scenario", std::string(to_string(r.scenario))},
                {"method", std::string(to_string(r.method))},
                {"snr_db", r.snr_db},
                {"silhouette_emp", r.silhouette_empirical},
                {"silhouette_emp_se", r.silhouette_empirical_stderr},
                {"silhouette_ana", r.silhouette_analytic},
                {"accuracy", r.accuracy},
                {"accuracy_se", r.accuracy_stderr},
                {"nonfinite_rate", r.nonfinite_rate},
                {"degraded_trials", r.degraded_trials}};
}

std::size_t resolve_threads(const CLI::Option* opt, std::size_t flag_value)
{
    if (opt->count() > 0) return std::max<std::size_t>(1, flag_value);
    if (const char* env = std::getenv("RFF_LAB_THREADS"); env != nullptr && *env != '\0') {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end == env || *end != '\0' || v == 0) {
            throw std::invalid_argument(std::string("RFF_LAB_THREADS must be a positive integer, got '") + env + "'");
        }
        return static_cast<std::size_t>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace

std::string format_real(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::array<char, 40> buf{};
    std::snprintf(buf.data(), buf.size(), "%.17g", v);
    return buf.data();
}

std::vector<ClaimGridPoint> default_claim_grid()
{
    std::vector<ClaimGridPoint> grid;
    for (double sg : {0.0, 0.1, 0.15}) {
        for (double rho : {0.5, 1.0, 2.0}) {
            for (double sw : {0.001, 0.01, 0.05}) grid.push_back({1.0, sg, rho, sw});
        }
    }
    return grid;
}

std::vector<ClaimCheck> run_claim_checks(std::span<const ClaimGridPoint> grid, std::size_t n_draws,
                                         std::uint64_t seed)
{
    std::vector<ClaimCheck> rows;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const ClaimGridPoint& pt = grid[i];
        const GaussianSpec g{pt.mu_g, pt.sigma_g * pt.sigma_g};
        const RatioParams p{pt.rho, pt.sigma_w * pt.sigma_w};
        const bool in_regime = pt.sigma_w / std::abs(pt.rho * pt.mu_g) <= kClaimRegimeLimit * (1.0 + 1e-12);
        const std::uint64_t point_seed = derive_seed({seed, i});

        auto add = [&](RatioForm form, const char* quantity, double analytic, double oracle, double se,
                       double tolerance) {
            ClaimCheck row;
            row.claim = form;
            row.quantity = quantity;
            row.mu_g = pt.mu_g;
            row.sigma_g = pt.sigma_g;
            row.rho = pt.rho;
            row.sigma_w = pt.sigma_w;
            row.analytic = analytic;
            row.oracle = oracle;
            row.oracle_stderr = se;
            row.tolerance = tolerance;
            row.in_regime = in_regime;
            if (analytic == 0.0) {
                row.error = se > 0.0 ? std::abs(oracle) / se : (oracle == 0.0 ? 0.0 : INFINITY);
            } else {
                row.error = std::abs(oracle - analytic) / std::abs(analytic);
            }
            row.pass = !in_regime || row.error <= tolerance;
            rows.push_back(row);
        };

        for (RatioForm form : {RatioForm::Claim1, RatioForm::Claim2, RatioForm::Claim3, RatioForm::Claim4}) {
            const OracleResult mc = mc_ratio_oracle(form, g, p, n_draws, point_seed);
            const double m = mc.moments.mean, m2 = mc.moments.second_moment;
            switch (form) {
            case RatioForm::Claim1: {
                const GaussianMoments a = claim1_moments(g, p);
                add(form, "mean", a.mean, m, mc.mean_stderr, kClaimMeanTolerance);
                add(form, "second_moment", a.second_moment, m2, mc.second_moment_stderr, kClaimSecondMomentTolerance);
                break;
            }
            case RatioForm::Claim2:
                add(form, "mean", claim2_mean(g, p), m, mc.mean_stderr, kClaimMeanTolerance);
                break;
            case RatioForm::Claim3: {
                const GaussianMoments a = claim3_moments(g, p);
                add(form, "mean", a.mean, m, mc.mean_stderr, a.mean == 0.0 ? kClaimZeroMeanStderrs : kClaimMeanTolerance);
                add(form, "second_moment", a.second_moment, m2, mc.second_moment_stderr, kClaimSecondMomentTolerance);
                break;
            }
            case RatioForm::Claim4: {
                const GaussianMoments a = claim4_moments(g, p);
                add(form, "mean", a.mean, m, mc.mean_stderr, kClaimMeanTolerance);
                add(form, "second_moment", a.second_moment, m2, mc.second_moment_stderr, kClaimSecondMomentTolerance);
                break;
            }
            }
        }
    }
    return rows;
}

std::string claims_csv(std::span<const ClaimCheck> rows)
{
    std::ostringstream out;
    out << "claim,quantity,mu_g,sigma_g,rho,sigma_w,analytic,oracle,oracle_se,error,tolerance,in_regime,pass\n";
    for (const auto& r : rows) {
        out << to_string(r.claim) << ',' << r.quantity << ',' << format_real(r.mu_g) << ',' << format_real(r.sigma_g)
            << ',' << format_real(r.rho) << ',' << format_real(r.sigma_w) << ',' << format_real(r.analytic) << ','
            << format_real(r.oracle) << ',' << format_real(r.oracle_stderr) << ',' << format_real(r.error) << ','
            << format_real(r.tolerance) << ',' << (r.in_regime ? "true" : "false") << ','
            << (r.pass ? "true" : "false") << '\n';
    }
    return out.str();
}

std::string sweep_csv(std::span<const SweepRecord> records)
{
    std::ostringstream out;
    out << kSweepCsvHeader << '\n';
    for (const auto& r : records) {
        out << to_string(r.scenario) << ',' << to_string(r.method) << ',' << format_real(r.snr_db) << ','
            << format_real(r.silhouette_empirical) << ',' << format_real(r.silhouette_empirical_stderr) << ','
            << format_real(r.silhouette_analytic) << ',' << format_real(r.accuracy) << ','
            << format_real(r.accuracy_stderr) << ',' << format_real(r.nonfinite_rate) << '\n';
    }
    return out.str();
}

std::string sweep_json(std::span<const SweepRecord> records, const ExperimentConfig& cfg, double wall_time_s)
{
    json recs = json::array();
    for (const auto& r : records) recs.push_back(record_json(r));
    const json bundle{{"tool_version", kToolVersion},
                      {"wall_time_s", wall_time_s},
                      {"config", emit_config(cfg)},
                      {"records", std::move(recs)}};
    return bundle.dump(2) + "\n";
}

std::string correlation_json(const CorrelationReport& report)
{
    const json j{{"pearson_r", report.pearson_r},
                 {"p_value", report.p_value},
                 {"ls_slope", report.ls_slope},
                 {"ls_intercept", report.ls_intercept},
                 {"n_points", report.n_points}};
    return j.dump(2) + "\n";
}

std::vector<std::pair<double, double>> read_sweep_points(const std::filesystem::path& path)
{
    const std::string text = read_file(path);
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) throw std::invalid_argument(path.string() + ": empty records file");

    std::vector<std::pair<double, double>> points;
    if (text[first] == '{' || text[first] == '[') {
        json doc;
        try {
            doc = json::parse(text);
        } catch (const json::parse_error& e) {
            throw std::invalid_argument(path.string() + ": invalid JSON: " + e.what());
        }
        const json& recs = doc.is_object() ? doc.value("records", json()) : doc;
        if (!recs.is_array()) throw std::invalid_argument(path.string() + ": no records array");
        for (std::size_t i = 0; i < recs.size(); ++i) {
            const json& r = recs[i];
            if (!r.is_object() || !r.contains("silhouette_emp") || !r.contains("accuracy") ||
                !r["silhouette_emp"].is_number() || !r["accuracy"].is_number()) {
                throw std::invalid_argument(path.string() + ": record " + std::to_string(i) +
                                            " lacks numeric silhouette_emp/accuracy");
            }
            points.emplace_back(r["silhouette_emp"].get<double>(), r["accuracy"].get<double>());
        }
        return points;
    }

    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        std::stringstream ss(s);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            if (!cell.empty() && cell.back() == '\r') cell.pop_back();
            cells.push_back(cell);
        }
        return cells;
    };
    const std::vector<std::string> header = split(line);
    std::size_t sil_col = header.size(), acc_col = header.size();
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == "silhouette_emp") sil_col = c;
        if (header[c] == "accuracy") acc_col = c;
    }
    if (sil_col == header.size() || acc_col == header.size()) {
        throw std::invalid_argument(path.string() + ":1: header lacks silhouette_emp/accuracy columns");
    }
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> cells = split(line);
        if (cells.size() != header.size()) {
            throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) + ": expected " +
                                        std::to_string(header.size()) + " fields, got " +
                                        std::to_string(cells.size()));
        }
        auto number = [&](std::size_t col) {
            char* end = nullptr;
            const double v = std::strtod(cells[col].c_str(), &end);
            if (cells[col].empty() || *end != '\0') {
                throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) + ": field '" +
                                            header[col] + "' is not a number");
            }
            return v;
        };
        points.emplace_back(number(sil_col), number(acc_col));
    }
    return points;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Monte-Carlo study of RF fingerprint separability under channel variation", "rff_lab"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    std::string config_path, out_path = "-", format = "csv", records_path;
    std::uint64_t seed = 42;
    std::size_t threads = 1, trials = 0, draws = 1'000'000, permutations = 10'000;

    CLI::App* sweep = app.add_subcommand("sweep", "Run the SNR sweep and write one row per record");
    sweep->add_option("--config", config_path, "Configuration file (built-in defaults when omitted)");
    sweep->add_option("--out", out_path, "Output path, '-' for stdout");
    sweep->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    CLI::Option* sweep_seed = sweep->add_option("--seed", seed, "Master seed (overrides the config)");
    CLI::Option* sweep_threads = sweep->add_option("--threads", threads, "Worker threads (env RFF_LAB_THREADS)");
    CLI::Option* sweep_trials = sweep->add_option("--trials", trials, "Trials per grid point (overrides the config)");

    CLI::App* claims = app.add_subcommand("validate-claims", "Compare the ratio moment formulas with Monte Carlo");
    claims->add_option("--out", out_path, "Output path, '-' for stdout");
    claims->add_option("--draws", draws, "Monte-Carlo draws per grid point")->check(CLI::Range(std::size_t{10'000}, std::size_t{1'000'000'000}));
    claims->add_option("--seed", seed, "Seed");

    CLI::App* corr = app.add_subcommand("correlate", "Correlate empirical silhouette with accuracy");
    corr->add_option("--records", records_path, "Sweep output (CSV or JSON)")->required();
    corr->add_option("--out", out_path, "Output path, '-' for stdout");
    corr->add_option("--permutations", permutations, "Permutations for the p-value")->check(CLI::Range(std::size_t{kMinPermutations}, std::size_t{100'000'000}));
    corr->add_option("--seed", seed, "Seed");

    CLI::App* emit = app.add_subcommand("emit-config", "Write the default configuration");
    emit->add_option("--out", out_path, "Output path, '-' for stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }

    try {
        if (*sweep) {
            ExperimentConfig cfg;
            std::size_t n_threads = 1;
            try {
                if (!config_path.empty()) cfg = load_config(config_path);
                if (sweep_seed->count() > 0) cfg.master_seed = seed;
                if (sweep_trials->count() > 0) {
                    if (trials == 0) throw std::invalid_argument("--trials must be at least 1");
                    cfg.n_trials = trials;
                }
                n_threads = resolve_threads(sweep_threads, threads);
            } catch (const std::invalid_argument& e) {
                throw InputError(e.what());
            } catch (const ConfigError& e) {
                throw InputError(e.what());
            }
            const auto start = std::chrono::steady_clock::now();
            const std::vector<SweepRecord> records = run_sweep(cfg, n_threads);
            const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            write_output(out_path, format == "json" ? sweep_json(records, cfg, wall) : sweep_csv(records), out);
            return kExitOk;
        }
        if (*claims) {
            const std::vector<ClaimGridPoint> grid = default_claim_grid();
            const std::vector<ClaimCheck> rows = run_claim_checks(grid, draws, seed);
            write_output(out_path, claims_csv(rows), out);
            bool ok = true;
            for (const auto& r : rows) {
                if (!r.pass) {
                    ok = false;
                    err << "FAIL " << to_string(r.claim) << ' ' << r.quantity << " sigma_g=" << r.sigma_g
                        << " rho=" << r.rho << " sigma_w=" << r.sigma_w << " analytic=" << format_real(r.analytic)
                        << " oracle=" << format_real(r.oracle) << " error=" << r.error << " > " << r.tolerance
                        << "\n";
                }
            }
            return ok ? kExitOk : kExitValidationFailure;
        }
        if (*corr) {
            CorrelationReport report;
            try {
                const auto points = read_sweep_points(records_path);
                report = correlate(points, permutations, seed);
            } catch (const std::invalid_argument& e) {
                throw InputError(e.what());
            } catch (const std::domain_error& e) {
                throw InputError(e.what());
            }
            write_output(out_path, correlation_json(report), out);
            return kExitOk;
        }
        if (*emit) {
            write_output(out_path, emit_config(ExperimentConfig{}), out);
            return kExitOk;
        }
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntimeError;
    }
    return kExitInputError;
}

}  // namespace rfflab
