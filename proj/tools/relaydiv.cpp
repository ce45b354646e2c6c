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

// relaydiv command-line front end.
//
//   relaydiv outage-sweep   --config sweep.cfg --out sweep.csv
//   relaydiv dm-slope       --config slope.cfg --set K=3 --threads 4
//   relaydiv certify-code   --config certify.cfg
//   relaydiv analytic-curve --config bracket.cfg --out bracket.csv
//   relaydiv self-check
//
// Exit status: 0 ok, 1 self-check failure, 2 config error, 3 resource limit,
// 4 internal consistency failure, 5 completed with a warning.

#include <relaydiv/relaydiv.hpp>

#include <CLI11.hpp>

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

namespace
{

enum ExitCode : int
{
    kOk = 0,
    kSelfCheckFailed = 1,
    kConfigError = 2,
    kResourceLimit = 3,
    kInternalError = 4,
    kWarning = 5
};

struct CommonFlags
{
    std::string config_path;
    std::vector<std::string> overrides;
    std::int64_t seed = -1;
    std::string out;
    int threads = -1;
};

void add_common_flags(CLI::App *cmd, CommonFlags &flags)
{
    cmd->add_option("--config", flags.config_path, "Config file (key = value lines)");
    cmd->add_option("--seed", flags.seed, "Master seed (overrides config)")->check(CLI::NonNegativeNumber);
    cmd->add_option("--out", flags.out, "Output path (overrides config)");
    cmd->add_option("--threads", flags.threads, "Worker threads; affects speed only")->check(CLI::NonNegativeNumber);
    cmd->add_option("--set", flags.overrides, "Override a config key: --set key=value (repeatable)");
}

relaydiv::ExperimentConfig load_config(relaydiv::ExperimentKind kind, const CommonFlags &flags)
{
    relaydiv::ExperimentConfig cfg;
    if (!flags.config_path.empty())
        relaydiv::apply_config_text(cfg, relaydiv::read_text_file(flags.config_path), flags.config_path);
    for (const auto &o : flags.overrides)
        relaydiv::apply_override(cfg, o);
    if (flags.seed >= 0)
        cfg.seed = static_cast<std::uint64_t>(flags.seed);
    if (!flags.out.empty())
        cfg.out = flags.out;
    if (flags.threads >= 0)
        cfg.threads = static_cast<unsigned>(flags.threads);
    cfg.kind = kind;
    return cfg;
}

void print_points(const relaydiv::OutageCurve &curve)
{
    for (const auto &p : curve.points)
        std::cout << relaydiv::format_double(p.snr_db) << " dB  P = " << p.probability << "  ["
                  << p.ci_low << ", " << p.ci_high << "]  " << p.events << "/" << p.trials << "\n";
}

int run(relaydiv::ExperimentKind kind, const CommonFlags &flags)
{
    using relaydiv::ExperimentKind;
    if (kind == ExperimentKind::self_check)
    {
        const auto report = relaydiv::run_self_check();
        std::cout << report.to_text();
        return report.passed() ? kOk : kSelfCheckFailed;
    }

    const auto cfg = load_config(kind, flags);
    switch (kind)
    {
    case ExperimentKind::outage_sweep: {
        print_points(relaydiv::run_outage_sweep(cfg));
        break;
    }
    case ExperimentKind::dm_slope: {
        const auto res = relaydiv::run_dm_slope(cfg);
        print_points(res.curve);
        if (res.slope)
            std::cout << "d_hat = " << res.slope->d_hat << " +/- " << res.slope->std_error << " ("
                      << res.slope->points_used << " points), theory " << res.theory_exponent << "\n";
        if (!res.warning.empty())
        {
            std::cerr << "warning: " << res.warning << "\n";
            return kWarning;
        }
        break;
    }
    case ExperimentKind::certify_code: {
        std::cout << relaydiv::run_certify(cfg).to_text();
        break;
    }
    case ExperimentKind::analytic_curve: {
        const auto curve = relaydiv::run_analytic_curve(cfg);
        if (cfg.out.empty())
            std::cout << relaydiv::analytic_csv(curve);
        break;
    }
    case ExperimentKind::self_check:
        break;
    }
    if (!cfg.out.empty())
        std::cerr << "wrote " << cfg.out << " and " << relaydiv::manifest_path(cfg.out) << "\n";
    return kOk;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"relaydiv: diversity analysis for half-duplex linear relay networks"};
    app.set_version_flag("--version", std::string(relaydiv::kToolkitVersion));
    app.require_subcommand(1);

    CommonFlags flags;
    if (const char *env = std::getenv("RELAYDIV_THREADS"))
        flags.threads = std::atoi(env);

    struct Entry
    {
        relaydiv::ExperimentKind kind;
        const char *help;
        CLI::App *cmd = nullptr;
    };
    std::vector<Entry> entries{
        {relaydiv::ExperimentKind::outage_sweep, "Monte Carlo outage probability over an SNR grid"},
        {relaydiv::ExperimentKind::dm_slope, "Outage sweep plus fitted diversity order"},
        {relaydiv::ExperimentKind::certify_code, "Rank and approximate-universality report for a codebook"},
        {relaydiv::ExperimentKind::analytic_curve, "Closed-form bracket on the Jensen outage probability"},
        {relaydiv::ExperimentKind::self_check, "Run the built-in identity checks"},
    };
    for (auto &e : entries)
    {
        e.cmd = app.add_subcommand(relaydiv::to_string(e.kind), e.help);
        if (e.kind != relaydiv::ExperimentKind::self_check)
            add_common_flags(e.cmd, flags);
    }

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfigError;
    }

    try
    {
        for (const auto &e : entries)
            if (e.cmd->parsed())
                return run(e.kind, flags);
    }
    catch (const relaydiv::ResourceLimit &e)
    {
        std::cerr << "resource limit: " << e.what() << "\n";
        return kResourceLimit;
    }
    catch (const relaydiv::InternalConsistency &e)
    {
        std::cerr << "internal consistency failure: " << e.what() << "\n";
        return kInternalError;
    }
    catch (const relaydiv::ParseError &e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    }
    catch (const std::invalid_argument &e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return kInternalError;
    }
    return kConfigError;
}
