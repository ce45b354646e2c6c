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

#include <relaydiv/experiment.hpp>

#include <catch_amalgamated.hpp>

#include <string>

using namespace relaydiv;

namespace
{

const std::string kData = RELAYDIV_TEST_DATA_DIR;

ExperimentConfig small_sweep()
{
    return parse_config("experiment = outage-sweep\n"
                        "scheme = cdd\n"
                        "K = 2\n"
                        "N = 4\n"
                        "r = 0.25\n"
                        "snr_db = [10, 15, 20]\n"
                        "trials = 20000\n"
                        "seed = 5\n");
}

} // namespace

TEST_CASE("config parser reads every key", "[experiment]")
{
    const auto cfg = parse_config("# comment line\n"
                                  "experiment = dm-slope   # trailing comment\n"
                                  "scheme = phase-rolling\n"
                                  "K = 3\n"
                                  "N = 8\n"
                                  "r = 0.125\n"
                                  "snr_db = [20, 25.5, 3e1]\n"
                                  "trials = adaptive\n"
                                  "min_trials = 1e4\n"
                                  "max_trials = 10000000\n"
                                  "target_events = 150\n"
                                  "min_events = 25\n"
                                  "seed = 18446744073709551615\n"
                                  "out = result.csv\n"
                                  "codebook = book.txt\n"
                                  "metric = exact\n"
                                  "rate_floor_bits = 1\n"
                                  "power = total\n"
                                  "threads = 3\n");
    CHECK(cfg.kind == ExperimentKind::dm_slope);
    CHECK(cfg.scheme == "phase-rolling");
    CHECK(cfg.relays == 3);
    CHECK(cfg.block_length == 8);
    CHECK(cfg.r == 0.125);
    CHECK(cfg.snr_db == std::vector<double>{20.0, 25.5, 30.0});
    CHECK(cfg.adaptive_trials);
    CHECK(cfg.min_trials == 10000);
    CHECK(cfg.max_trials == 10000000);
    CHECK(cfg.target_events == 150);
    CHECK(cfg.min_events == 25);
    CHECK(cfg.seed == 18446744073709551615ull);
    CHECK(cfg.out == "result.csv");
    CHECK(cfg.codebook == "book.txt");
    CHECK(cfg.metric == OutageMetric::exact);
    CHECK(cfg.effective_rate_floor() == 1.0);
    CHECK(cfg.power == PowerSplit::total);
    CHECK(cfg.threads == 3);
}

TEST_CASE("rate floor default depends on the experiment", "[experiment]")
{
    ExperimentConfig cfg;
    CHECK(cfg.effective_rate_floor() == 0.0);
    cfg.kind = ExperimentKind::dm_slope;
    CHECK(cfg.effective_rate_floor() == 0.5);
}

TEST_CASE("config errors report line and column", "[experiment]")
{
    try
    {
        parse_config("K = 2\nN = four\n", "x.cfg");
        FAIL("expected ParseError");
    }
    catch (const ParseError &e)
    {
        CHECK(e.line() == 2);
        CHECK(e.column() == 5);
        CHECK(std::string(e.what()).find("x.cfg:2:5") == 0);
    }
    try
    {
        parse_config("\n\nbogus = 1\n");
        FAIL("expected ParseError");
    }
    catch (const ParseError &e)
    {
        CHECK(e.line() == 3);
    }
    try
    {
        parse_config("snr_db = [10, 2x]\n");
        FAIL("expected ParseError");
    }
    catch (const ParseError &e)
    {
        CHECK(e.column() == 15);
    }
    CHECK_THROWS_AS(parse_config("just words\n"), ParseError);
    CHECK_THROWS_AS(parse_config("metric = median\n"), ParseError);
    CHECK_THROWS_AS(parse_config("trials = -5\n"), ParseError);
    CHECK_THROWS_AS(parse_config("snr_db = 10, 20\n"), ParseError);
}

TEST_CASE("overrides win over the file", "[experiment]")
{
    auto cfg = small_sweep();
    apply_override(cfg, "K=3");
    apply_override(cfg, "snr_db=[5]");
    CHECK(cfg.relays == 3);
    CHECK(cfg.snr_db == std::vector<double>{5.0});
    CHECK_THROWS_AS(apply_override(cfg, "K"), InvalidParameter);
    CHECK_THROWS_AS(apply_override(cfg, "color=blue"), InvalidParameter);
}

TEST_CASE("config validation", "[experiment]")
{
    auto cfg = small_sweep();
    CHECK_NOTHROW(validate_config(cfg));
    cfg.relays = 5;
    CHECK_THROWS_AS(validate_config(cfg), InvalidParameter);
    cfg = small_sweep();
    cfg.r = 0.6;
    CHECK_THROWS_AS(validate_config(cfg), InvalidParameter);
    cfg = small_sweep();
    cfg.snr_db = {10.0, 10.0};
    CHECK_THROWS_AS(validate_config(cfg), InvalidParameter);
    cfg.snr_db = {};
    CHECK_THROWS_AS(validate_config(cfg), InvalidParameter);
    cfg = small_sweep();
    cfg.kind = ExperimentKind::dm_slope;
    cfg.snr_db = {10.0, 20.0};
    CHECK_THROWS_AS(validate_config(cfg), InvalidParameter);
    cfg = small_sweep();
    cfg.kind = ExperimentKind::certify_code;
    CHECK_THROWS_AS(validate_config(cfg), InvalidParameter);
}

TEST_CASE("outage sweep at r = 0 gives an all-zero probability column", "[experiment]")
{
    auto cfg = small_sweep();
    cfg.r = 0.0;
    const auto curve = run_outage_sweep(cfg);
    for (const auto &p : curve.points)
        CHECK(p.probability == 0.0);
}

TEST_CASE("outage sweep writes CSV and a manifest that reproduces it", "[experiment]")
{
    auto cfg = small_sweep();
    cfg.out = "sweep_roundtrip.csv";
    run_outage_sweep(cfg);
    const std::string csv = read_text_file(cfg.out);
    CHECK(csv.rfind("snr_db,probability,ci_low,ci_high,trials,events\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);

    const std::string manifest = read_text_file(manifest_path(cfg.out));
    CHECK(manifest.find("# version = ") != std::string::npos);
    CHECK(manifest.find("# wall_time_s = ") != std::string::npos);
    CHECK(manifest.find("# events = [") != std::string::npos);
    CHECK(manifest.find("threads") == std::string::npos);

    auto replay = parse_config(manifest);
    replay.out = "sweep_replay.csv";
    replay.threads = 3;
    run_outage_sweep(replay);
    CHECK(read_text_file(replay.out) == csv);
}

TEST_CASE("K = 2 CDD sweep is nonincreasing in SNR", "[experiment]")
{
    auto cfg = small_sweep();
    cfg.snr_db = {20, 25, 30, 35, 40, 45};
    cfg.adaptive_trials = true;
    cfg.min_trials = 20000;
    cfg.max_trials = 2000000;
    cfg.target_events = 200;
    const auto curve = run_outage_sweep(cfg);
    for (std::size_t i = 1; i < curve.points.size(); ++i)
        CHECK(curve.points[i].ci_low <= curve.points[i - 1].ci_high);
}

TEST_CASE("dm-slope reports a warning when no fit is possible", "[experiment]")
{
    auto cfg = small_sweep();
    cfg.kind = ExperimentKind::dm_slope;
    cfg.r = 0.0;
    cfg.rate_floor_bits = 0.0;
    cfg.out = "slope_warning.csv";
    const auto res = run_dm_slope(cfg);
    CHECK_FALSE(res.slope);
    CHECK_FALSE(res.warning.empty());
    const std::string csv = read_text_file(cfg.out);
    CHECK(csv.find("nan") != std::string::npos);
    CHECK(read_text_file(manifest_path(cfg.out)).find("# warning: ") != std::string::npos);
}

TEST_CASE("dm-slope K = 1, r = 0 is near one", "[experiment]")
{
    auto cfg = small_sweep();
    cfg.kind = ExperimentKind::dm_slope;
    cfg.relays = 1;
    cfg.r = 0.0;
    cfg.snr_db = {20, 25, 30, 35};
    cfg.adaptive_trials = true;
    cfg.min_trials = 20000;
    cfg.max_trials = 2000000;
    cfg.out = "slope_k1.csv";
    const auto res = run_dm_slope(cfg);
    REQUIRE(res.slope);
    CHECK(res.theory_exponent == 1.0);
    CHECK(res.slope->d_hat > 0.75);
    CHECK(res.slope->d_hat < 1.1);
    const std::string csv = read_text_file(cfg.out);
    CHECK(csv.rfind("snr_db,probability,ci_low,ci_high,trials,events,used,d_hat,stderr,theory_exponent\n", 0) == 0);
}

TEST_CASE("analytic curve CSV", "[experiment]")
{
    auto cfg = small_sweep();
    cfg.kind = ExperimentKind::analytic_curve;
    cfg.out = "analytic.csv";
    const auto curve = run_analytic_curve(cfg);
    REQUIRE(curve.points.size() == 3);
    CHECK(curve.theory_exponent == 1.0);
    const std::string csv = read_text_file(cfg.out);
    CHECK(csv.rfind("snr_db,lower,upper,theory_exponent\n", 0) == 0);
    CHECK(read_text_file(manifest_path(cfg.out)).find("experiment = analytic-curve") != std::string::npos);
}

TEST_CASE("certify-code on a basis-difference book", "[experiment]")
{
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::certify_code;
    cfg.relays = 4;
    cfg.block_length = 4;
    cfg.codebook = kData + "/basis_book.txt";
    cfg.r = 0.25;
    cfg.snr_db = {3.0, 20.0};
    const auto rep = run_certify(cfg);
    CHECK(rep.certified());
    CHECK(rep.mu_min == Catch::Approx(0.25).epsilon(1e-13));
    REQUIRE(rep.universality.size() == 2);
    CHECK_FALSE(rep.universality[0].passed); // threshold 10^(-0.15) = 0.71
    CHECK(rep.universality[1].passed);        // threshold 100^(-0.5) = 0.1
    CHECK(rep.simplified_condition);
    CHECK(rep.simplified_agreements == 1);
    CHECK(rep.to_text().find("certified = yes") != std::string::npos);
}

TEST_CASE("certify-code reports a repeated codeword", "[experiment]")
{
    const auto s = cyclic_delay_scheme(2, 2);
    CVector a(2), b(2);
    a << 1.0, 0.0;
    b << 0.0, 2.0;
    const auto rep = certify_code(s, make_codebook({a, b, b}), 0.1, {20.0});
    REQUIRE(rep.first_violation);
    CHECK(rep.first_violation->first == 1);
    CHECK(rep.first_violation->second == 2);
    CHECK(rep.first_violation_dx_norm == 0.0);
    CHECK_FALSE(rep.certified());
    CHECK(rep.to_text().find("first_violation = codewords 2 and 3") != std::string::npos);
}

TEST_CASE("self-check passes on a fresh build", "[experiment]")
{
    SelfCheckOptions opt;
    opt.max_block_length = 16;
    opt.identity_draws = 2000;
    opt.cdf_samples = 200000;
    const auto rep = run_self_check(opt);
    INFO(rep.to_text());
    CHECK(rep.passed());
    const auto *cdf = rep.find("product_rayleigh_cdf_sup_distance");
    REQUIRE(cdf);
    CHECK(cdf->measured < 5e-3);
}

TEST_CASE("self-check flags a perturbed scheme fixture", "[experiment]")
{
    SelfCheckOptions opt;
    opt.max_block_length = 4;
    opt.identity_draws = 100;
    opt.cdf_samples = 10000;
    opt.fixtures.emplace_back("perturbed", parse_scheme_matrices(read_text_file(kData + "/perturbed_scheme.txt")));
    const auto rep = run_self_check(opt);
    CHECK_FALSE(rep.passed());
    const auto *c = rep.find("unitary_scaling:perturbed");
    REQUIRE(c);
    CHECK_FALSE(c->passed);
    CHECK(c->measured == Catch::Approx(std::sqrt(2.0) * 1e-6).epsilon(1e-3));
}
