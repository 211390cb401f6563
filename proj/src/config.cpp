// SPDX-License-Identifier: MIT
#include "rfflab/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <vector>

namespace rfflab {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view s)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = s.find(',', start);
        out.push_back(trim(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

double parse_real(std::string_view text)
{
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw std::invalid_argument("expected a real number, got '" + std::string(text) + "'");
    }
    return v;
}

template <typename T>
T parse_unsigned(std::string_view text)
{
    T v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw std::invalid_argument("expected a non-negative integer, got '" + std::string(text) + "'");
    }
    return v;
}

bool parse_bool(std::string_view text)
{
    if (text == "true") return true;
    if (text == "false") return false;
    throw std::invalid_argument("expected true or false, got '" + std::string(text) + "'");
}

using Setter = std::function<void(ExperimentConfig&, std::string_view)>;

Setter real_field(double ModelParams::*field)
{
    return [field](ExperimentConfig& c, std::string_view v) { c.params.*field = parse_real(v); };
}

Setter channel_field(double ChannelParams::*field)
{
    return [field](ExperimentConfig& c, std::string_view v) { c.params.channel.*field = parse_real(v); };
}

const std::map<std::string, Setter, std::less<>>& setters()
{
    static const std::map<std::string, Setter, std::less<>> table{
        {"model.x", real_field(&ModelParams::x)},
        {"model.f_ra", real_field(&ModelParams::f_ra)},
        {"model.f_ta", real_field(&ModelParams::f_ta)},
        {"model.f_ru", real_field(&ModelParams::f_ru)},
        {"model.f_tu_l", real_field(&ModelParams::f_tu_l)},
        {"model.eta", real_field(&ModelParams::eta)},
        {"model.r_l", [](ExperimentConfig& c, std::string_view v) { c.params.r_l = parse_unsigned<std::size_t>(v); }},
        {"model.r_s", [](ExperimentConfig& c, std::string_view v) { c.params.r_s = parse_unsigned<std::size_t>(v); }},
        {"model.mu_u", real_field(&ModelParams::mu_u)},
        {"model.sigma_u", real_field(&ModelParams::sigma_u)},
        {"model.mu_s", real_field(&ModelParams::mu_s)},
        {"model.sigma_s", real_field(&ModelParams::sigma_s)},
        {"channel.mu_h", channel_field(&ChannelParams::mu_h)},
        {"channel.sigma_h", channel_field(&ChannelParams::sigma_h)},
        {"channel.mu_h_non", channel_field(&ChannelParams::mu_h_non)},
        {"channel.sigma_h_non", channel_field(&ChannelParams::sigma_h_non)},
        {"channel.redraw", [](ExperimentConfig& c, std::string_view v) { c.redraw = parse_redraw(v); }},
        {"experiment.scenarios",
         [](ExperimentConfig& c, std::string_view v) {
             c.scenarios.clear();
             for (auto item : split_list(v)) c.scenarios.push_back(parse_scenario(item));
         }},
        {"experiment.methods",
         [](ExperimentConfig& c, std::string_view v) {
             c.methods.clear();
             for (auto item : split_list(v)) c.methods.push_back(parse_method(item));
         }},
        {"experiment.snr_db",
         [](ExperimentConfig& c, std::string_view v) {
             c.snr_db_grid.clear();
             for (auto item : split_list(v)) c.snr_db_grid.push_back(parse_real(item));
         }},
        {"experiment.n_devices", [](ExperimentConfig& c, std::string_view v) { c.n_devices = parse_unsigned<std::size_t>(v); }},
        {"experiment.n_train", [](ExperimentConfig& c, std::string_view v) { c.n_train = parse_unsigned<std::size_t>(v); }},
        {"experiment.n_test", [](ExperimentConfig& c, std::string_view v) { c.n_test = parse_unsigned<std::size_t>(v); }},
        {"experiment.n_trials", [](ExperimentConfig& c, std::string_view v) { c.n_trials = parse_unsigned<std::size_t>(v); }},
        {"experiment.seed", [](ExperimentConfig& c, std::string_view v) { c.master_seed = parse_unsigned<std::uint64_t>(v); }},
        {"experiment.normalize_for_lda", [](ExperimentConfig& c, std::string_view v) { c.normalize_for_lda = parse_bool(v); }},
        {"experiment.lda_ridge", [](ExperimentConfig& c, std::string_view v) { c.lda_ridge = parse_real(v); }},
    };
    return table;
}

std::string build_message(const std::string& source, std::size_t line, const std::string& key,
                          const std::string& message)
{
    std::string out = source;
    if (line > 0) out += ":" + std::to_string(line);
    if (!key.empty()) out += ": field '" + key + "'";
    return out + ": " + message;
}

template <typename Range, typename Fn>
std::string join(const Range& items, Fn fn)
{
    std::string out;
    for (const auto& item : items) {
        if (!out.empty()) out += ",";
        out += fn(item);
    }
    return out;
}

}  // namespace

ConfigError::ConfigError(std::string source, std::size_t line, std::string key, const std::string& message)
    : std::runtime_error(build_message(source, line, key, message)),
      source_(std::move(source)),
      line_(line),
      key_(std::move(key))
{
}

std::string format_shortest(double value)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) throw std::runtime_error("format_shortest: conversion failed");
    return std::string(buf, ptr);
}

ExperimentConfig parse_config(std::istream& in, std::string_view source_name)
{
    const std::string source(source_name);
    ExperimentConfig cfg;
    std::set<std::string, std::less<>> seen;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(source, line_no, "", "expected 'key = value'");
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        const auto& table = setters();
        const auto it = table.find(key);
        if (it == table.end()) {
            throw ConfigError(source, line_no, key, "unknown key");
        }
        if (!seen.insert(key).second) {
            throw ConfigError(source, line_no, key, "key given more than once");
        }
        if (value.empty()) {
            throw ConfigError(source, line_no, key, "missing value");
        }
        try {
            it->second(cfg, value);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(source, line_no, key, e.what());
        }
    }
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(source, 0, "", e.what());
    }
    return cfg;
}

ExperimentConfig parse_config_text(std::string_view text, std::string_view source_name)
{
    std::istringstream in{std::string(text)};
    return parse_config(in, source_name);
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(path.string(), 0, "", "cannot open file");
    }
    return parse_config(in, path.string());
}

std::string emit_config(const ExperimentConfig& cfg)
{
    const ModelParams& p = cfg.params;
    const ChannelParams& h = p.channel;
    auto r = [](double v) { return format_shortest(v); };
    std::ostringstream out;
    out << "# RF fingerprint Monte-Carlo configuration\n"
        << "\n"
        << "# Simulation parameters in the frequency domain\n"
        << "model.x = " << r(p.x) << "  # preamble amplitude (constant)\n"
        << "model.f_ra = " << r(p.f_ra) << "  # receiver RFF at the access point (constant)\n"
        << "model.f_ta = " << r(p.f_ta) << "  # transmitter RFF at the access point (constant)\n"
        << "model.f_ru = " << r(p.f_ru) << "  # receiver RFF at the device (constant)\n"
        << "model.f_tu_l = " << r(p.f_tu_l) << "  # device transmitter RFF on the long field (constant)\n"
        << "model.eta = " << r(p.eta) << "  # amplifier target power (constant)\n"
        << "model.r_l = " << p.r_l << "  # long training field subcarriers\n"
        << "model.r_s = " << p.r_s << "  # short training field subcarriers\n"
        << "model.mu_u = " << r(p.mu_u) << "  # device RFF on the long field: mean\n"
        << "model.sigma_u = " << r(p.sigma_u) << "  # device RFF on the long field: std\n"
        << "model.mu_s = " << r(p.mu_s) << "  # device RFF on the short field: mean\n"
        << "model.sigma_s = " << r(p.sigma_s) << "  # device RFF on the short field: std\n"
        << "\n"
        << "# Channel amplitude per subcarrier (Gaussian)\n"
        << "channel.mu_h = " << r(h.mu_h) << "  # training and i.i.d. channel: mean\n"
        << "channel.sigma_h = " << r(h.sigma_h) << "  # training and i.i.d. channel: std\n"
        << "channel.mu_h_non = " << r(h.mu_h_non) << "  # non-i.i.d. test channel: mean\n"
        << "channel.sigma_h_non = " << r(h.sigma_h_non) << "  # non-i.i.d. test channel: std\n"
        << "channel.redraw = " << to_string(cfg.redraw) << "  # stochastic CSI drawn once per phase or per sample\n"
        << "\n"
        << "# Monte-Carlo harness\n"
        << "experiment.scenarios = " << join(cfg.scenarios, [](ChannelScenario s) { return std::string(to_string(s)); }) << "\n"
        << "experiment.methods = " << join(cfg.methods, [](Method m) { return std::string(to_string(m)); }) << "\n"
        << "experiment.snr_db = " << join(cfg.snr_db_grid, r) << "\n"
        << "experiment.n_devices = " << cfg.n_devices << "\n"
        << "experiment.n_train = " << cfg.n_train << "  # training samples per device\n"
        << "experiment.n_test = " << cfg.n_test << "  # test samples per device\n"
        << "experiment.n_trials = " << cfg.n_trials << "\n"
        << "experiment.seed = " << cfg.master_seed << "\n"
        << "experiment.normalize_for_lda = " << (cfg.normalize_for_lda ? "true" : "false") << "\n"
        << "experiment.lda_ridge = " << r(cfg.lda_ridge) << "\n";
    return out.str();
}

}  // namespace rfflab
