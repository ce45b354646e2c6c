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
 * @file outage_analysis.hpp
 * @brief Outage and error probability estimation, analytic bounds, slope fits.
 *
 * Monte Carlo estimators draw channel realisations from counter-addressed
 * substreams (see parallel.hpp): results depend on (configuration, seed) only,
 * never on the number of worker threads. The Jensen and exact outage estimators
 * share one stream, so on equal trial counts they see the same realisations and
 * every Jensen outage is also an exact outage.
 *
 * Analytic side: the Jensen outage probability is bracketed by
 *
 *   lower = (1 - F_1(sqrt(rho^(1-2r+e2))))^K - (1 - F_1(sqrt(rho)))^K,  e2 = log(K lambda_max) / log(rho)
 *   upper = (1 - F_1(sqrt(rho^(1-2r-e1))))^K,                          e1 = log((1+K) / lambda_min) / log(rho)
 *
 * with F_1(x) = (2/x) K_1(2/x). Both decay as rho^(-K(1-2r)) up to logarithmic
 * factors; the lower bound is clamped at 0 where the finite-SNR difference is negative.
 */

#pragma once

#include "bessel.hpp"
#include "channel_model.hpp"
#include "codebook.hpp"
#include "core.hpp"
#include "information.hpp"
#include "parallel.hpp"
#include "relay_schemes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace relaydiv
{

inline constexpr double kWilsonZ95 = 1.959963984540054;

struct ProbEstimate
{
    double snr_db = 0.0;
    double probability = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t events = 0;

    double half_width() const noexcept { return 0.5 * (ci_high - ci_low); }
};

inline std::pair<double, double> wilson_interval(std::uint64_t events, std::uint64_t trials, double z = kWilsonZ95)
{
    require(trials >= 1, "Wilson interval needs at least one trial");
    require(events <= trials, "more events than trials");
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(events) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double centre = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    // The exact endpoints at 0 and n events are 0 and 1; keep them exact.
    const double lo = events == 0 ? 0.0 : std::clamp(centre - half, 0.0, p);
    const double hi = events == trials ? 1.0 : std::clamp(centre + half, p, 1.0);
    return {lo, hi};
}

inline ProbEstimate make_estimate(double snr_db, std::uint64_t events, std::uint64_t trials)
{
    ProbEstimate e;
    e.snr_db = snr_db;
    e.trials = trials;
    e.events = events;
    e.probability = static_cast<double>(events) / static_cast<double>(trials);
    std::tie(e.ci_low, e.ci_high) = wilson_interval(events, trials);
    return e;
}

struct CurveFingerprint
{
    std::string scheme;
    std::size_t relays = 0;
    std::size_t block_length = 0;
    double r = 0.0;
    std::uint64_t seed = 0;
    std::string metric;
};

struct OutageCurve
{
    std::vector<ProbEstimate> points; // strictly increasing snr_db
    CurveFingerprint fingerprint;

    void validate() const
    {
        for (std::size_t i = 1; i < points.size(); ++i)
            require(points[i].snr_db > points[i - 1].snr_db, "outage curve SNR values must be strictly increasing");
    }
};

struct SlopeEstimate
{
    double d_hat = 0.0;
    double std_error = 0.0;
    double intercept = 0.0; // log2 P at log2 rho = 0
    std::size_t points_used = 0;
};

// Fixed trial count, or adaptive: start at min_trials and grow (in whole blocks)
// toward target_events / p_hat until the target is met or max_trials is hit.
struct TrialPolicy
{
    bool adaptive = false;
    std::uint64_t fixed_trials = 100000;
    std::uint64_t min_trials = 100000;
    std::uint64_t max_trials = 100000000;
    std::uint64_t target_events = 200;

    static TrialPolicy fixed(std::uint64_t n)
    {
        TrialPolicy p;
        p.fixed_trials = n;
        return p;
    }

    static TrialPolicy adaptive_up_to(std::uint64_t max_trials, std::uint64_t min_trials = 100000,
                                      std::uint64_t target_events = 200)
    {
        TrialPolicy p;
        p.adaptive = true;
        p.min_trials = min_trials;
        p.max_trials = max_trials;
        p.target_events = target_events;
        return p;
    }
};

struct McOptions
{
    unsigned threads = 0;         // 0: RELAYDIV_THREADS or hardware concurrency
    double rate_floor_bits = 0.0; // see outage_rate_bits
};

inline constexpr std::uint64_t kChannelStream = 1;
inline constexpr std::uint64_t kErrorStream = 2;

namespace detail
{

template <class Trial>
ProbEstimate run_trials(Snr snr, const TrialPolicy &policy, std::uint64_t seed, std::uint64_t stream,
                        unsigned threads, const Trial &trial)
{
    threads = resolve_threads(threads);
    if (!policy.adaptive)
    {
        require(policy.fixed_trials >= 1, "trial count must be positive");
        const auto events = count_events(0, policy.fixed_trials, seed, stream, threads, trial);
        return make_estimate(snr.db(), events, policy.fixed_trials);
    }

    require(policy.max_trials >= 1 && policy.min_trials >= 1, "trial bounds must be positive");
    const std::uint64_t cap = std::max(kTrialBlock, policy.max_trials / kTrialBlock * kTrialBlock);
    std::uint64_t n = std::min(cap, round_up_to_block(std::min(policy.min_trials, policy.max_trials)));
    std::uint64_t events = count_events(0, n, seed, stream, threads, trial);
    while (events < policy.target_events && n < cap)
    {
        const double guess = static_cast<double>(std::max<std::uint64_t>(events, 1)) / static_cast<double>(n);
        const double wanted = static_cast<double>(policy.target_events) / guess;
        std::uint64_t next = wanted >= static_cast<double>(cap) ? cap
                                                                : round_up_to_block(static_cast<std::uint64_t>(wanted));
        next = std::clamp<std::uint64_t>(next, std::min(cap, 2 * n), cap);
        events += count_events(n, next, seed, stream, threads, trial);
        n = next;
    }
    return make_estimate(snr.db(), events, n);
}

inline void check_outage_args(double r, Snr snr)
{
    require(r >= 0.0 && r <= 0.5, "multiplexing gain must lie in [0, 1/2]");
    require(snr.linear() > 1.0, "outage estimation needs rho > 1");
}

} // namespace detail

// Fraction of channel draws whose Jensen MI falls below the target rate.
inline ProbEstimate mc_jensen_outage(const RelayScheme &scheme, double r, Snr snr, const TrialPolicy &policy,
                                     std::uint64_t seed, const McOptions &options = {})
{
    detail::check_outage_args(r, snr);
    const GramianSummary gram = gramian(scheme);
    const double rate = outage_rate_bits(r, snr, options.rate_floor_bits);
    const double alpha = scheme.relay_power_fraction();
    const std::size_t k = scheme.relays();
    auto trial = [&gram, rate, alpha, k, snr](RandomSource &rng) {
        const ChannelRealization ch = sample_channel(k, rng);
        return is_outage_at_rate(jensen_mi_via_gramian(gram, ch, snr, alpha), rate);
    };
    return detail::run_trials(snr, policy, seed, kChannelStream, options.threads, trial);
}

// Same stream as mc_jensen_outage, but with the eigenvalue MI of H_eff.
inline ProbEstimate mc_exact_outage(const RelayScheme &scheme, double r, Snr snr, const TrialPolicy &policy,
                                    std::uint64_t seed, const McOptions &options = {})
{
    detail::check_outage_args(r, snr);
    const double rate = outage_rate_bits(r, snr, options.rate_floor_bits);
    const std::size_t k = scheme.relays();
    auto trial = [&scheme, rate, k, snr](RandomSource &rng) {
        const ChannelRealization ch = sample_channel(k, rng);
        return is_outage_at_rate(mutual_information(effective_channel(scheme, ch), snr), rate);
    };
    return detail::run_trials(snr, policy, seed, kChannelStream, options.threads, trial);
}

struct JensenBracket
{
    double lower = 0.0;
    double upper = 0.0;
    double eps1 = 0.0;
    double eps2 = 0.0;
};

inline JensenBracket analytic_jensen_bracket(std::size_t k, const GramianSummary &gram, double r, Snr snr)
{
    require(k >= 1 && static_cast<Eigen::Index>(k) == gram.gram.rows(), "Gramian size does not match K");
    require(r >= 0.0 && r <= 0.5, "multiplexing gain must lie in [0, 1/2]");
    require(snr.linear() > 1.0, "analytic bracket needs rho > 1");
    if (!(gram.lambda_min > 0.0))
        throw InvalidParameter("analytic bracket needs a full-rank Gramian (lambda_min > 0)");

    const double kd = static_cast<double>(k);
    const double rho = snr.linear();
    const double log_rho = std::log2(rho);
    JensenBracket b;
    b.eps1 = std::log2((1.0 + kd) / gram.lambda_min) / log_rho;
    b.eps2 = std::log2(kd * gram.lambda_max) / log_rho;

    // 1 - F_1(sqrt(rho^e)) = P(|f||h| < rho^(-e/2))
    auto tail = [rho](double exponent) { return product_rayleigh_cdf(std::pow(rho, -0.5 * exponent)); };

    b.upper = std::pow(tail(1.0 - 2.0 * r - b.eps1), kd);
    const double lower = std::pow(tail(1.0 - 2.0 * r + b.eps2), kd) - std::pow(tail(1.0), kd);
    b.lower = std::max(0.0, lower);
    return b;
}

// Weighted least squares of log2 P against log2 rho; d_hat = -slope. Weights
// are inverse delta-method variances of log2 P_hat. Points with fewer than
// min_events events, or with every trial an event, are skipped.
inline SlopeEstimate fit_diversity_slope(const OutageCurve &curve, std::uint64_t min_events = 20)
{
    std::vector<double> xs, ys, ws;
    for (const auto &p : curve.points)
    {
        if (p.events < min_events || p.events == 0 || p.events >= p.trials)
            continue;
        const double prob = p.probability;
        const double var = (1.0 - prob) / (static_cast<double>(p.events) * std::numbers::ln2 * std::numbers::ln2);
        xs.push_back(std::log2(std::pow(10.0, p.snr_db / 10.0)));
        ys.push_back(std::log2(prob));
        ws.push_back(1.0 / var);
    }
    if (xs.size() < 2)
        throw InsufficientData("slope fit needs at least 2 points with >= " + std::to_string(min_events) +
                               " events, got " + std::to_string(xs.size()));

    double sw = 0.0, sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i)
    {
        sw += ws[i];
        sx += ws[i] * xs[i];
        sy += ws[i] * ys[i];
    }
    const double xbar = sx / sw;
    const double ybar = sy / sw;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i)
    {
        sxx += ws[i] * (xs[i] - xbar) * (xs[i] - xbar);
        sxy += ws[i] * (xs[i] - xbar) * (ys[i] - ybar);
    }
    if (!(sxx > 0.0))
        throw InsufficientData("slope fit needs at least 2 distinct SNR values");
    const double slope = sxy / sxx;

    SlopeEstimate out;
    out.d_hat = -slope;
    out.std_error = std::sqrt(1.0 / sxx);
    out.intercept = ybar - slope * xbar;
    out.points_used = xs.size();
    return out;
}

inline double q_function(double x)
{
    return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

// Q(sqrt(rho/2) ||H dx||): ML pairwise error for a known effective channel.
inline double pairwise_error_probability(const EffectiveChannel &heff, const CVector &dx, Snr snr)
{
    return q_function(std::sqrt(snr.linear() / 2.0) * (heff.matrix * dx).norm());
}

struct PepBounds
{
    double chernoff = 1.0;      // min(1, exp(-(rho/4) ||H dx||^2))
    double rayleigh_ritz = 1.0; // min(1, exp(-rho mu ||h~||^2 / (4 (1+K))))
};

inline PepBounds pep_upper_bound(const RelayScheme &scheme, const CVector &dx, const ChannelRealization &ch, Snr snr)
{
    const EffectiveChannel heff = effective_channel(scheme, ch);
    require(dx.size() == heff.matrix.cols(), "difference vector length does not match block length");
    const double rho = snr.linear();
    const double k = static_cast<double>(scheme.relays());
    const double mu = difference_min_eigenvalue(difference_matrix(scheme, dx));
    PepBounds b;
    b.chernoff = std::min(1.0, std::exp(-rho / 4.0 * (heff.matrix * dx).squaredNorm()));
    b.rayleigh_ritz = std::min(1.0, std::exp(-rho * mu * ch.product().squaredNorm() / (4.0 * (1.0 + k))));
    return b;
}

// Exhaustive ML decoding over the book on the normalised channel.
inline ProbEstimate mc_ml_error(const RelayScheme &scheme, const Codebook &book, Snr snr, const TrialPolicy &policy,
                                std::uint64_t seed, const McOptions &options = {},
                                double size_cap = kDefaultSizeCap)
{
    require(book.size() >= 2, "ML error simulation needs at least two codewords");
    require(book.block_length == scheme.block_length(), "codebook and scheme block lengths differ");
    if (!(static_cast<double>(book.size()) <= size_cap))
        throw ResourceLimit("codebook too large for exhaustive ML decoding", static_cast<double>(book.size()),
                            size_cap);

    const std::size_t k = scheme.relays();
    const double amp = std::sqrt(snr.linear());
    auto trial = [&scheme, &book, k, amp, snr](RandomSource &rng) {
        const ChannelRealization ch = sample_channel(k, rng);
        const EffectiveChannel heff = effective_channel(scheme, ch);
        const std::size_t sent = rng.uniform_index(book.size());
        const CVector y = simulate_normalized(heff, book.codewords[sent], snr, rng);
        const CMatrix s = amp * heff.matrix;
        std::size_t best = 0;
        double best_metric = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < book.size(); ++c)
        {
            const double metric = (y - s * book.codewords[c]).squaredNorm();
            if (metric < best_metric)
            {
                best_metric = metric;
                best = c;
            }
        }
        return best != sent;
    };
    return detail::run_trials(snr, policy, seed, kErrorStream, options.threads, trial);
}

struct UnionBound
{
    double log_value = 0.0; // natural log of rho^(2Nr) exp(-mu rho^(2r) / (4(1+K)))
    double mu_min = 0.0;

    double value() const { return std::exp(log_value); }
};

inline UnionBound union_bound_from_mu(double mu_min, std::size_t n, std::size_t k, double r, Snr snr)
{
    const double rho = snr.linear();
    UnionBound b;
    b.mu_min = mu_min;
    const double growth = 2.0 * static_cast<double>(n) * r * std::log(rho);
    if (std::isinf(mu_min))
        b.log_value = -std::numeric_limits<double>::infinity();
    else
        b.log_value = growth - mu_min * std::pow(rho, 2.0 * r) / (4.0 * (1.0 + static_cast<double>(k)));
    return b;
}

inline UnionBound union_bound(const RelayScheme &scheme, const Codebook &book, Snr snr, double r)
{
    require(r >= 0.0 && r <= 0.5, "multiplexing gain must lie in [0, 1/2]");
    return union_bound_from_mu(min_gram_eigenvalue(scheme, book), book.block_length, scheme.relays(), r, snr);
}

} // namespace relaydiv
