// SPDX-License-Identifier: Apache-2.0
//
// relaydiv: diversity analysis toolkit for half-duplex linear relay networks
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

/**
 * @file experiment.hpp
 * @brief Batch experiments: configuration, runners, CSV artifacts, manifests.
 *
 * Configuration files are flat "key = value" lines; list values are written in
 * brackets ("snr_db = [20, 25, 30]"); '#' starts a comment. See README.md for
 * the list of keys. Every CSV artifact is accompanied by "<out>.manifest", which
 * echoes the effective configuration in the same grammar, so a manifest can be
 * fed back through --config to reproduce the CSV byte for byte.
 */

#pragma once

#include "bessel.hpp"
#include "channel_model.hpp"
#include "codebook.hpp"
#include "core.hpp"
#include "formats.hpp"
#include "information.hpp"
#include "outage_analysis.hpp"
#include "relay_schemes.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#ifndef RELAYDIV_VERSION
#define RELAYDIV_VERSION "0.0.0"
#endif

namespace relaydiv
{

inline constexpr const char *kToolkitVersion = RELAYDIV_VERSION;

enum class ExperimentKind
{
    outage_sweep,
    dm_slope,
    certify_code,
    analytic_curve,
    self_check
};

inline std::string to_string(ExperimentKind kind)
{
    switch (kind)
    {
    case ExperimentKind::outage_sweep:
        return "outage-sweep";
    case ExperimentKind::dm_slope:
        return "dm-slope";
    case ExperimentKind::certify_code:
        return "certify-code";
    case ExperimentKind::analytic_curve:
        return "analytic-curve";
    case ExperimentKind::self_check:
        return "self-check";
    }
    return "unknown";
}

inline std::optional<ExperimentKind> parse_experiment_kind(std::string_view s)
{
    for (auto k : {ExperimentKind::outage_sweep, ExperimentKind::dm_slope, ExperimentKind::certify_code,
                   ExperimentKind::analytic_curve, ExperimentKind::self_check})
        if (to_string(k) == s)
            return k;
    return std::nullopt;
}

enum class OutageMetric
{
    jensen,
    exact
};

struct ExperimentConfig
{
    ExperimentKind kind = ExperimentKind::outage_sweep;
    std::string scheme = "cdd"; // cdd | phase-rolling | path to a scheme file
    std::size_t relays = 2;     // K (built-in schemes)
    std::size_t block_length = 4; // N (built-in schemes)
    double r = 0.0;
    std::vector<double> snr_db;
    bool adaptive_trials = true;
    std::uint64_t trials = 100000; // fixed count when adaptive_trials is false
    std::uint64_t min_trials = 100000;
    std::uint64_t max_trials = 100000000;
    std::uint64_t target_events = 200;
    std::uint64_t min_events = 20;
    std::uint64_t seed = 1;
    std::string out;
    std::string codebook;
    OutageMetric metric = OutageMetric::jensen;
    std::optional<double> rate_floor_bits; // default depends on the experiment
    PowerSplit power = PowerSplit::per_relay;
    unsigned threads = 0; // speed only, never echoed into manifests

    double effective_rate_floor() const
    {
        if (rate_floor_bits)
            return *rate_floor_bits;
        return kind == ExperimentKind::dm_slope ? 0.5 : 0.0;
    }
};

// ----- Config parsing ---------------------------------------------------------

namespace detail
{

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

struct ValueText
{
    std::string_view text;
    std::size_t column;
};

class SettingError : public std::runtime_error
{
public:
    SettingError(std::size_t offset, const std::string &msg) : std::runtime_error(msg), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

inline double to_double(std::string_view s, std::size_t offset = 0)
{
    double v = 0.0;
    const char *first = s.data();
    const char *last = first + s.size();
    if (first != last && *first == '+')
        ++first;
    const auto res = std::from_chars(first, last, v);
    if (s.empty() || res.ec != std::errc() || res.ptr != last || !std::isfinite(v))
        throw SettingError(offset, "expected a number, got '" + std::string(s) + "'");
    return v;
}

inline std::uint64_t to_uint(std::string_view s, std::size_t offset = 0)
{
    // Accept integral values written in exponent form (1e7) as well.
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (!s.empty() && res.ec == std::errc() && res.ptr == s.data() + s.size())
        return v;
    const double d = to_double(s, offset);
    if (d < 0.0 || d != std::floor(d) || d > 1.8e19)
        throw SettingError(offset, "expected a non-negative integer, got '" + std::string(s) + "'");
    return static_cast<std::uint64_t>(d);
}

inline std::vector<double> to_list(std::string_view s, std::size_t offset = 0)
{
    s = trim(s);
    if (s.size() < 2 || s.front() != '[' || s.back() != ']')
        throw SettingError(offset, "expected a bracketed list like [20, 25, 30]");
    std::vector<double> out;
    std::string_view body = s.substr(1, s.size() - 2);
    std::size_t pos = 0;
    if (trim(body).empty())
        return out;
    while (true)
    {
        const std::size_t comma = body.find(',', pos);
        const std::string_view raw = body.substr(pos, comma == std::string_view::npos ? body.npos : comma - pos);
        const std::size_t lead = std::min(raw.find_first_not_of(" \t"), raw.size());
        out.push_back(to_double(trim(raw), offset + 1 + pos + lead));
        if (comma == std::string_view::npos)
            break;
        pos = comma + 1;
    }
    return out;
}

} // namespace detail

// Applies one "key = value" setting. Throws InvalidParameter on unknown keys or
// malformed values (callers translate it into a ParseError with a position).
inline void apply_setting(ExperimentConfig &cfg, std::string_view key, std::string_view value)
{
    using namespace detail;
    value = trim(value);
    if (key == "experiment")
    {
        const auto k = parse_experiment_kind(value);
        if (!k)
            throw SettingError(0, "unknown experiment '" + std::string(value) + "'");
        cfg.kind = *k;
    }
    else if (key == "scheme")
        cfg.scheme = std::string(value);
    else if (key == "K")
        cfg.relays = to_uint(value);
    else if (key == "N")
        cfg.block_length = to_uint(value);
    else if (key == "r")
        cfg.r = to_double(value);
    else if (key == "snr_db")
        cfg.snr_db = to_list(value);
    else if (key == "trials")
    {
        if (value == "adaptive")
            cfg.adaptive_trials = true;
        else
        {
            cfg.adaptive_trials = false;
            cfg.trials = to_uint(value);
        }
    }
    else if (key == "min_trials")
        cfg.min_trials = to_uint(value);
    else if (key == "max_trials")
        cfg.max_trials = to_uint(value);
    else if (key == "target_events")
        cfg.target_events = to_uint(value);
    else if (key == "min_events")
        cfg.min_events = to_uint(value);
    else if (key == "seed")
        cfg.seed = to_uint(value);
    else if (key == "out")
        cfg.out = std::string(value);
    else if (key == "codebook")
        cfg.codebook = std::string(value);
    else if (key == "metric")
    {
        if (value == "jensen")
            cfg.metric = OutageMetric::jensen;
        else if (value == "exact")
            cfg.metric = OutageMetric::exact;
        else
            throw SettingError(0, "metric must be 'jensen' or 'exact'");
    }
    else if (key == "rate_floor_bits")
        cfg.rate_floor_bits = to_double(value);
    else if (key == "power")
    {
        if (value == "per-relay")
            cfg.power = PowerSplit::per_relay;
        else if (value == "total")
            cfg.power = PowerSplit::total;
        else
            throw SettingError(0, "power must be 'per-relay' or 'total'");
    }
    else if (key == "threads")
        cfg.threads = static_cast<unsigned>(to_uint(value));
    else
        throw SettingError(0, "unknown key '" + std::string(key) + "'");
}

inline void apply_config_text(ExperimentConfig &cfg, std::string_view text, const std::string &source = "<config>")
{
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size())
    {
        const std::size_t eol = text.find('\n', pos);
        std::string_view raw = text.substr(pos, eol == std::string_view::npos ? text.npos : eol - pos);
        ++line_no;
        if (const auto hash = raw.find('#'); hash != std::string_view::npos)
            raw = raw.substr(0, hash);
        if (!detail::trim(raw).empty())
        {
            const auto eq = raw.find('=');
            if (eq == std::string_view::npos)
            {
                const auto first = raw.find_first_not_of(" \t");
                throw ParseError(source, line_no, first + 1, "expected 'key = value'");
            }
            const auto key = detail::trim(raw.substr(0, eq));
            const auto value_start = raw.find_first_not_of(" \t", eq + 1);
            if (key.empty())
                throw ParseError(source, line_no, 1, "missing key before '='");
            try
            {
                apply_setting(cfg, key, raw.substr(eq + 1));
            }
            catch (const detail::SettingError &e)
            {
                const std::size_t col = (value_start == std::string_view::npos ? eq + 1 : value_start) + 1;
                throw ParseError(source, line_no, col + e.offset(), e.what());
            }
        }
        if (eol == std::string_view::npos)
            break;
        pos = eol + 1;
    }
}

inline ExperimentConfig parse_config(std::string_view text, const std::string &source = "<config>")
{
    ExperimentConfig cfg;
    apply_config_text(cfg, text, source);
    return cfg;
}

// "key=value" command-line override.
inline void apply_override(ExperimentConfig &cfg, std::string_view assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos)
        throw InvalidParameter("override must look like key=value, got '" + std::string(assignment) + "'");
    try
    {
        apply_setting(cfg, detail::trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
    }
    catch (const detail::SettingError &e)
    {
        throw InvalidParameter("override '" + std::string(assignment) + "': " + e.what());
    }
}

inline bool is_builtin_scheme(const std::string &name)
{
    return name == "cdd" || name == "phase-rolling";
}

inline std::string format_list(const std::vector<double> &values)
{
    std::string out = "[";
    for (std::size_t i = 0; i < values.size(); ++i)
    {
        if (i > 0)
            out += ", ";
        out += format_double(values[i]);
    }
    return out + "]";
}

// Effective configuration in config-file grammar (threads excluded).
inline std::string config_to_text(const ExperimentConfig &cfg)
{
    std::ostringstream ss;
    ss << "experiment = " << to_string(cfg.kind) << "\n";
    ss << "scheme = " << cfg.scheme << "\n";
    ss << "K = " << cfg.relays << "\n";
    ss << "N = " << cfg.block_length << "\n";
    ss << "r = " << format_double(cfg.r) << "\n";
    ss << "snr_db = " << format_list(cfg.snr_db) << "\n";
    if (cfg.adaptive_trials)
        ss << "trials = adaptive\n";
    else
        ss << "trials = " << cfg.trials << "\n";
    ss << "min_trials = " << cfg.min_trials << "\n";
    ss << "max_trials = " << cfg.max_trials << "\n";
    ss << "target_events = " << cfg.target_events << "\n";
    ss << "min_events = " << cfg.min_events << "\n";
    ss << "seed = " << cfg.seed << "\n";
    ss << "metric = " << (cfg.metric == OutageMetric::jensen ? "jensen" : "exact") << "\n";
    ss << "rate_floor_bits = " << format_double(cfg.effective_rate_floor()) << "\n";
    ss << "power = " << (cfg.power == PowerSplit::per_relay ? "per-relay" : "total") << "\n";
    if (!cfg.codebook.empty())
        ss << "codebook = " << cfg.codebook << "\n";
    if (!cfg.out.empty())
        ss << "out = " << cfg.out << "\n";
    return ss.str();
}

inline void validate_config(const ExperimentConfig &cfg)
{
    require(cfg.r >= 0.0 && cfg.r <= 0.5, "r must lie in [0, 1/2]");
    if (is_builtin_scheme(cfg.scheme))
    {
        require(cfg.relays >= 1 && cfg.block_length >= 1, "K and N must be positive");
        require(cfg.relays <= cfg.block_length, "K must not exceed N");
    }
    const bool needs_grid = cfg.kind != ExperimentKind::self_check;
    if (needs_grid)
    {
        require(!cfg.snr_db.empty(), "snr_db grid must not be empty");
        for (std::size_t i = 1; i < cfg.snr_db.size(); ++i)
            require(cfg.snr_db[i] > cfg.snr_db[i - 1], "snr_db grid must be strictly increasing");
    }
    if (cfg.kind == ExperimentKind::dm_slope)
        require(cfg.snr_db.size() >= 3, "dm-slope needs at least 3 grid points");
    if (cfg.kind == ExperimentKind::outage_sweep || cfg.kind == ExperimentKind::dm_slope)
    {
        require(cfg.adaptive_trials ? (cfg.min_trials >= 1 && cfg.max_trials >= 1) : cfg.trials >= 1,
                "trial counts must be positive");
        for (double db : cfg.snr_db)
            require(db > 0.0, "outage experiments need rho > 1 (snr_db > 0)");
    }
    if (cfg.kind == ExperimentKind::certify_code)
        require(!cfg.codebook.empty(), "certify-code needs 'codebook = <path>'");
    require(cfg.effective_rate_floor() >= 0.0, "rate_floor_bits must be non-negative");
}

inline RelayScheme build_scheme(const ExperimentConfig &cfg)
{
    if (cfg.scheme == "cdd")
        return cyclic_delay_scheme(cfg.relays, cfg.block_length, cfg.power);
    if (cfg.scheme == "phase-rolling")
        return phase_rolling_scheme(cfg.relays, cfg.block_length, cfg.power);
    return load_scheme_file(cfg.scheme, cfg.power);
}

inline TrialPolicy trial_policy(const ExperimentConfig &cfg)
{
    if (!cfg.adaptive_trials)
        return TrialPolicy::fixed(cfg.trials);
    return TrialPolicy::adaptive_up_to(cfg.max_trials, cfg.min_trials, cfg.target_events);
}

// ----- Artifacts ----------------------------------------------------------------

struct RunManifest
{
    ExperimentConfig config;
    double wall_time_s = 0.0;
    std::vector<std::uint64_t> events;
    std::vector<std::string> notes;

    std::string to_text() const
    {
        std::ostringstream ss;
        ss << "# relaydiv run manifest\n";
        ss << "# version = " << kToolkitVersion << "\n";
        ss << "# wall_time_s = " << wall_time_s << "\n";
        if (!events.empty())
        {
            ss << "# events = [";
            for (std::size_t i = 0; i < events.size(); ++i)
                ss << (i ? ", " : "") << events[i];
            ss << "]\n";
        }
        for (const auto &n : notes)
            ss << "# " << n << "\n";
        ss << config_to_text(config);
        return ss.str();
    }
};

inline std::string manifest_path(const std::string &out)
{
    return out + ".manifest";
}

inline void write_artifacts(const ExperimentConfig &cfg, const std::string &content, const RunManifest &manifest)
{
    if (cfg.out.empty())
        return;
    write_text_file(cfg.out, content);
    write_text_file(manifest_path(cfg.out), manifest.to_text());
}

inline std::string curve_csv(const OutageCurve &curve)
{
    std::string out = "snr_db,probability,ci_low,ci_high,trials,events\n";
    for (const auto &p : curve.points)
    {
        out += format_double(p.snr_db) + "," + format_double(p.probability) + "," + format_double(p.ci_low) + "," +
               format_double(p.ci_high) + "," + std::to_string(p.trials) + "," + std::to_string(p.events) + "\n";
    }
    return out;
}

namespace detail
{

inline double elapsed_s(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

inline std::vector<std::uint64_t> curve_events(const OutageCurve &curve)
{
    std::vector<std::uint64_t> ev;
    for (const auto &p : curve.points)
        ev.push_back(p.events);
    return ev;
}

} // namespace detail

// Per-point trial budget; larger requests are refused rather than run for days.
inline constexpr double kMaxTrialsPerPoint = 1e10;

inline OutageCurve compute_outage_curve(const ExperimentConfig &cfg, const RelayScheme &scheme)
{
    const double budget = static_cast<double>(cfg.adaptive_trials ? cfg.max_trials : cfg.trials);
    if (budget > kMaxTrialsPerPoint)
        throw ResourceLimit("trial budget per grid point", budget, kMaxTrialsPerPoint);
    OutageCurve curve;
    curve.fingerprint = {scheme.name(), scheme.relays(), scheme.block_length(), cfg.r, cfg.seed,
                         cfg.metric == OutageMetric::jensen ? "jensen" : "exact"};
    const TrialPolicy policy = trial_policy(cfg);
    const McOptions options{cfg.threads, cfg.effective_rate_floor()};
    for (double db : cfg.snr_db)
    {
        const Snr snr = Snr::from_db(db);
        curve.points.push_back(cfg.metric == OutageMetric::jensen
                                   ? mc_jensen_outage(scheme, cfg.r, snr, policy, cfg.seed, options)
                                   : mc_exact_outage(scheme, cfg.r, snr, policy, cfg.seed, options));
    }
    curve.validate();
    return curve;
}

inline OutageCurve run_outage_sweep(ExperimentConfig cfg)
{
    cfg.kind = ExperimentKind::outage_sweep;
    validate_config(cfg);
    const auto start = std::chrono::steady_clock::now();
    const RelayScheme scheme = build_scheme(cfg);
    OutageCurve curve = compute_outage_curve(cfg, scheme);
    write_artifacts(cfg, curve_csv(curve), {cfg, detail::elapsed_s(start), detail::curve_events(curve), {}});
    return curve;
}

struct DmSlopeResult
{
    OutageCurve curve;
    std::optional<SlopeEstimate> slope;
    double theory_exponent = 0.0;
    std::string warning; // set when the fit could not be made
};

inline std::string dm_slope_csv(const DmSlopeResult &res, std::uint64_t min_events)
{
    std::string out = "snr_db,probability,ci_low,ci_high,trials,events,used,d_hat,stderr,theory_exponent\n";
    const std::string d_hat = res.slope ? format_double(res.slope->d_hat) : "nan";
    const std::string se = res.slope ? format_double(res.slope->std_error) : "nan";
    const std::string theory = format_double(res.theory_exponent);
    for (const auto &p : res.curve.points)
    {
        const bool used = res.slope && p.events >= min_events && p.events > 0 && p.events < p.trials;
        out += format_double(p.snr_db) + "," + format_double(p.probability) + "," + format_double(p.ci_low) + "," +
               format_double(p.ci_high) + "," + std::to_string(p.trials) + "," + std::to_string(p.events) + "," +
               (used ? "1" : "0") + "," + d_hat + "," + se + "," + theory + "\n";
    }
    return out;
}

inline DmSlopeResult run_dm_slope(ExperimentConfig cfg)
{
    cfg.kind = ExperimentKind::dm_slope;
    validate_config(cfg);
    const auto start = std::chrono::steady_clock::now();
    const RelayScheme scheme = build_scheme(cfg);
    DmSlopeResult res;
    res.curve = compute_outage_curve(cfg, scheme);
    res.theory_exponent = static_cast<double>(scheme.relays()) * (1.0 - 2.0 * cfg.r);
    try
    {
        res.slope = fit_diversity_slope(res.curve, cfg.min_events);
    }
    catch (const InsufficientData &e)
    {
        res.warning = e.what();
    }
    RunManifest manifest{cfg, detail::elapsed_s(start), detail::curve_events(res.curve), {}};
    if (!res.warning.empty())
        manifest.notes.push_back("warning: " + res.warning);
    write_artifacts(cfg, dm_slope_csv(res, cfg.min_events), manifest);
    return res;
}

struct AnalyticPoint
{
    double snr_db = 0.0;
    double lower = 0.0;
    double upper = 0.0;
};

struct AnalyticCurve
{
    std::vector<AnalyticPoint> points;
    double theory_exponent = 0.0;
};

inline std::string analytic_csv(const AnalyticCurve &curve)
{
    std::string out = "snr_db,lower,upper,theory_exponent\n";
    for (const auto &p : curve.points)
        out += format_double(p.snr_db) + "," + format_double(p.lower) + "," + format_double(p.upper) + "," +
               format_double(curve.theory_exponent) + "\n";
    return out;
}

inline AnalyticCurve run_analytic_curve(ExperimentConfig cfg)
{
    cfg.kind = ExperimentKind::analytic_curve;
    validate_config(cfg);
    const auto start = std::chrono::steady_clock::now();
    const RelayScheme scheme = build_scheme(cfg);
    const GramianSummary gram = gramian(scheme);
    AnalyticCurve curve;
    curve.theory_exponent = static_cast<double>(scheme.relays()) * (1.0 - 2.0 * cfg.r);
    for (double db : cfg.snr_db)
    {
        const auto b = analytic_jensen_bracket(scheme.relays(), gram, cfg.r, Snr::from_db(db));
        curve.points.push_back({db, b.lower, b.upper});
    }
    write_artifacts(cfg, analytic_csv(curve), {cfg, detail::elapsed_s(start), {}, {}});
    return curve;
}

// ----- Code certification -----------------------------------------------------------

struct UniversalityVerdict
{
    double snr_db = 0.0;
    double threshold = 0.0; // rho^(-2r)
    bool passed = false;
};

struct CertificationReport
{
    std::string scheme;
    std::size_t relays = 0;
    std::size_t block_length = 0;
    std::size_t codewords = 0;
    std::size_t pairs_checked = 0;
    std::size_t violations = 0;
    std::optional<std::pair<std::size_t, std::size_t>> first_violation;
    double first_violation_dx_norm = 0.0;
    double first_violation_sigma_min = 0.0;
    double mu_min = 0.0;
    std::optional<std::pair<std::size_t, std::size_t>> mu_argmin;
    std::vector<UniversalityVerdict> universality;
    std::optional<std::string> simplified_condition; // name of the per-scheme condition
    std::size_t simplified_agreements = 0;
    std::size_t simplified_true = 0;

    bool certified() const noexcept { return violations == 0; }

    std::string to_text() const
    {
        std::ostringstream ss;
        ss << "scheme = " << scheme << "\n";
        ss << "K = " << relays << "\n";
        ss << "N = " << block_length << "\n";
        ss << "codewords = " << codewords << "\n";
        ss << "pairs_checked = " << pairs_checked << "\n";
        ss << "rank_violations = " << violations << "\n";
        if (first_violation)
        {
            ss << "first_violation = codewords " << first_violation->first + 1 << " and "
               << first_violation->second + 1 << " (||dx|| = " << format_double(first_violation_dx_norm)
               << ", sigma_min(Phi) = " << format_double(first_violation_sigma_min) << ")\n";
        }
        ss << "mu_min = " << format_double(mu_min) << "\n";
        if (mu_argmin)
            ss << "mu_min_pair = " << mu_argmin->first + 1 << " " << mu_argmin->second + 1 << "\n";
        for (const auto &v : universality)
            ss << "approximately_universal snr_db=" << format_double(v.snr_db)
               << " threshold=" << format_double(v.threshold) << " verdict=" << (v.passed ? "pass" : "fail") << "\n";
        if (simplified_condition)
            ss << "simplified_condition = " << *simplified_condition << " (holds for " << simplified_true << " of "
               << pairs_checked << " pairs, agrees with SVD rank on " << simplified_agreements << ")\n";
        ss << "certified = " << (certified() ? "yes" : "no") << "\n";
        return ss.str();
    }
};

// Per-pair rank verdicts, mu_min and universality along the grid. For built-in
// schemes the per-coefficient condition is cross-checked against the SVD rank:
// equivalent when K = N, sufficient when K < N. A contradiction is an internal error.
inline CertificationReport certify_code(const RelayScheme &scheme, const Codebook &book, double r,
                                        const std::vector<double> &snr_db)
{
    require(book.block_length == scheme.block_length(), "codebook and scheme block lengths differ");
    CertificationReport rep;
    rep.scheme = scheme.name();
    rep.relays = scheme.relays();
    rep.block_length = scheme.block_length();
    rep.codewords = book.size();

    std::function<bool(const CVector &)> simplified;
    if (scheme.name() == "cdd")
    {
        simplified = cdd_condition;
        rep.simplified_condition = "cdd: all DFT coefficients of dx nonzero";
    }
    else if (scheme.name() == "phase-rolling")
    {
        simplified = phase_rolling_condition;
        rep.simplified_condition = "phase-rolling: all entries of dx nonzero";
    }
    const bool equivalent = scheme.relays() == scheme.block_length();

    rep.mu_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < book.size(); ++i)
        for (std::size_t j = i + 1; j < book.size(); ++j)
        {
            const CVector dx = book.codewords[i] - book.codewords[j];
            const auto d = difference_matrix(scheme, dx);
            const bool full = rank_full(d);
            const double mu = difference_min_eigenvalue(d);
            ++rep.pairs_checked;
            if (mu < rep.mu_min)
            {
                rep.mu_min = mu;
                rep.mu_argmin = {i, j};
            }
            if (!full)
            {
                if (!rep.first_violation)
                {
                    rep.first_violation = {i, j};
                    rep.first_violation_dx_norm = dx.norm();
                    rep.first_violation_sigma_min = singular_values(d.phi).minCoeff();
                }
                ++rep.violations;
            }
            if (simplified)
            {
                const bool cond = simplified(dx);
                rep.simplified_true += cond ? 1 : 0;
                const bool consistent = equivalent ? cond == full : (!cond || full);
                if (!consistent)
                    throw InternalConsistency("simplified rank condition disagrees with SVD rank for codewords " +
                                              std::to_string(i + 1) + " and " + std::to_string(j + 1));
                rep.simplified_agreements += cond == full ? 1 : 0;
            }
        }
    for (double db : snr_db)
    {
        const Snr snr = Snr::from_db(db);
        const double threshold = std::pow(snr.linear(), -2.0 * r);
        rep.universality.push_back({db, threshold, snr.linear() > 1.0 && rep.mu_min > threshold});
    }
    return rep;
}

inline CertificationReport run_certify(ExperimentConfig cfg)
{
    cfg.kind = ExperimentKind::certify_code;
    validate_config(cfg);
    const auto start = std::chrono::steady_clock::now();
    const RelayScheme scheme = build_scheme(cfg);
    const Codebook book = load_codebook_file(cfg.codebook);
    auto rep = certify_code(scheme, book, cfg.r, cfg.snr_db);
    write_artifacts(cfg, rep.to_text(), {cfg, detail::elapsed_s(start), {}, {}});
    return rep;
}

// ----- Self check -------------------------------------------------------------------------

struct CheckResult
{
    std::string name;
    double tolerance = 0.0;
    double measured = 0.0;
    bool passed = false;
    std::string detail;
};

struct SelfCheckReport
{
    std::vector<CheckResult> checks;

    bool passed() const
    {
        return std::all_of(checks.begin(), checks.end(), [](const CheckResult &c) { return c.passed; });
    }

    const CheckResult *find(std::string_view name) const
    {
        for (const auto &c : checks)
            if (c.name == name)
                return &c;
        return nullptr;
    }

    std::string to_text() const
    {
        std::ostringstream ss;
        for (const auto &c : checks)
        {
            ss << (c.passed ? "PASS " : "FAIL ") << c.name << " measured=" << format_double(c.measured)
               << " tolerance=" << format_double(c.tolerance);
            if (!c.detail.empty())
                ss << " (" << c.detail << ")";
            ss << "\n";
        }
        ss << (passed() ? "all checks passed" : "self-check FAILED") << "\n";
        return ss.str();
    }
};

struct SelfCheckOptions
{
    std::uint64_t seed = 20240601;
    std::size_t max_block_length = 64;
    std::size_t identity_draws = 10000;
    std::size_t cdf_samples = 1000000;
    // Extra raw matrix sets run through the unitary-scaling check.
    std::vector<std::pair<std::string, std::vector<CMatrix>>> fixtures;
};

namespace detail
{

// K_1(x) = int_0^inf exp(-x cosh t) cosh t dt, trapezoid rule; the integrand
// decays double exponentially so the rule converges geometrically.
inline double k1_by_quadrature(double x)
{
    const double step = 1.0 / 128.0;
    const double t_max = std::acosh(std::max(1.0, 800.0 / x)) + 1.0;
    long double acc = 0.5L * std::exp(-x);
    for (double t = step; t <= t_max; t += step)
        acc += std::exp(-x * std::cosh(t)) * std::cosh(t);
    return static_cast<double>(acc * step);
}

inline double sup_distance_product_rayleigh(std::size_t samples, RandomSource &rng)
{
    std::vector<double> v(samples);
    for (auto &s : v)
        s = std::abs(rng.complex_gaussian()) * std::abs(rng.complex_gaussian());
    std::sort(v.begin(), v.end());
    double sup = 0.0;
    const double n = static_cast<double>(samples);
    for (std::size_t i = 0; i < samples; ++i)
    {
        const double f = product_rayleigh_cdf(v[i]);
        sup = std::max({sup, std::abs(f - static_cast<double>(i) / n), std::abs(f - static_cast<double>(i + 1) / n)});
    }
    return sup;
}

} // namespace detail

inline SelfCheckReport run_self_check(const SelfCheckOptions &opt = {})
{
    SelfCheckReport rep;
    auto add = [&rep](std::string name, double tol, double measured, std::string detail = {}) {
        rep.checks.push_back({std::move(name), tol, measured, measured <= tol, std::move(detail)});
    };

    // Built-in families: unitary scaling, DFT identities, permutation orthogonality.
    double scaling = 0.0, duality = 0.0, conjugation = 0.0, orthogonality = 0.0;
    for (std::size_t n = 1; n <= opt.max_block_length; ++n)
    {
        const CMatrix f = dft_matrix(n);
        const auto cdd = cyclic_delay_scheme(n, n);
        const auto pr = phase_rolling_scheme(n, n);
        const double root_n = std::sqrt(static_cast<double>(n));
        for (std::size_t i = 0; i < n; ++i)
        {
            scaling = std::max({scaling, unitary_scaling_deviation(cdd.matrix(i)),
                                unitary_scaling_deviation(pr.matrix(i))});
            const CMatrix p = cyclic_shift_matrix(n, i);
            const CMatrix lam = phase_ramp_matrix(n, i);
            duality = std::max(duality, (pr.matrix(i) - f * p * f.adjoint() / root_n).cwiseAbs().maxCoeff());
            conjugation = std::max(conjugation, (p - f.adjoint() * lam * f).cwiseAbs().maxCoeff());
            for (std::size_t j = 0; j < n; ++j)
            {
                const cplx ip = (p * cyclic_shift_matrix(n, j).adjoint()).trace();
                const double expected = i == j ? static_cast<double>(n) : 0.0;
                orthogonality = std::max(orthogonality, std::abs(ip - expected));
            }
        }
    }
    const std::string range = "1 <= K <= N <= " + std::to_string(opt.max_block_length);
    add("unitary_scaling_builtin", kSchemeTolerance, scaling, range);
    for (const auto &[name, mats] : opt.fixtures)
    {
        double dev = 0.0;
        for (const auto &g : mats)
            dev = std::max(dev, unitary_scaling_deviation(g));
        add("unitary_scaling:" + name, kSchemeTolerance, dev);
    }
    add("duality_phase_rolling_vs_dft_shift", 1e-12, duality, range);
    add("shift_equals_dft_conjugated_ramp", 1e-12, conjugation, range);
    add("shift_orthogonality", 1e-12, orthogonality, range);

    // Random draws: Gramian identity, Jensen dominance, determinant identity.
    RandomSource rng(opt.seed);
    double gram_rel = 0.0, jensen_violation = 0.0, det_gap = 0.0;
    for (std::size_t t = 0; t < opt.identity_draws; ++t)
    {
        const std::size_t n = 1 + rng.uniform_index(8);
        const std::size_t k = 1 + rng.uniform_index(std::min<std::size_t>(n, 4));
        const std::size_t family = rng.uniform_index(3);
        const RelayScheme scheme = family == 0   ? cyclic_delay_scheme(k, n)
                                   : family == 1 ? phase_rolling_scheme(k, n)
                                                 : random_unitary_scheme(k, n, rng);
        const Snr snr = Snr::from_db(-10.0 + 60.0 * std::uniform_real_distribution<double>(0.0, 1.0)(rng.engine()));
        const auto ch = sample_channel(k, rng);
        const auto heff = effective_channel(scheme, ch);
        const double j_direct = jensen_mi(heff, snr);
        const double j_gram = jensen_mi_via_gramian(gramian(scheme), ch, snr);
        gram_rel = std::max(gram_rel, std::abs(j_gram - j_direct) / std::max(j_direct, 1e-12));
        const double exact = mutual_information(heff, snr);
        jensen_violation = std::max(jensen_violation, exact - j_direct);
        const CMatrix m = CMatrix::Identity(heff.matrix.rows(), heff.matrix.rows()) +
                          snr.linear() * heff.matrix * heff.matrix.adjoint();
        const double logdet = std::log2(m.llt().matrixL().toDenseMatrix().diagonal().cwiseAbs2().prod()) /
                              (2.0 * static_cast<double>(n));
        det_gap = std::max(det_gap, std::abs(logdet - exact));
    }
    add("gramian_quadratic_form_identity", 1e-10, gram_rel, "relative, " + std::to_string(opt.identity_draws) + " draws");
    add("jensen_dominance", 1e-9, std::max(0.0, jensen_violation), "max(exact - jensen)");
    add("eigen_vs_logdet_mi", 1e-10, det_gap, "bits");

    // Special functions.
    double k1_err = 0.0;
    for (double x : {1e-3, 0.1, 0.5, 1.0, 1.9, 2.0, 2.1, 5.0, 20.0, 100.0})
        k1_err = std::max(k1_err, std::abs(bessel_k1(x) - detail::k1_by_quadrature(x)) / std::max(1.0, bessel_k1(x)));
    add("bessel_k1_vs_quadrature", 1e-9, k1_err, "relative for K1>1, absolute otherwise");
    RandomSource cdf_rng(opt.seed + 1);
    add("product_rayleigh_cdf_sup_distance", 5e-3, detail::sup_distance_product_rayleigh(opt.cdf_samples, cdf_rng),
        std::to_string(opt.cdf_samples) + " samples");
    return rep;
}

} // namespace relaydiv
