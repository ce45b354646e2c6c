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
 * @file channel_model.hpp
 * @brief Two-hop fading model: S -> relays (f), relays -> D (h).
 *
 * Two receive models are available:
 *
 * - simulate_two_hop: the literal chain. Relay i hears r_i = sqrt(rho) f_i x + w_i,
 *   forwards sqrt(alpha rho / (1 + rho)) G_i r_i, the destination adds unit noise and
 *   the sum is normalised by sqrt(N0'), N0' = 1 + alpha rho / (rho + 1) ||h||^2.
 * - simulate_normalized: the high-SNR model y = sqrt(rho) H_eff x + z.
 *
 * alpha is the relay power fraction of the scheme (1 per-relay, 1/K total).
 */

#pragma once

#include "core.hpp"
#include "random.hpp"
#include "relay_schemes.hpp"

namespace relaydiv
{

struct ChannelRealization
{
    CVector f; // source -> relay
    CVector h; // relay -> destination

    std::size_t relays() const noexcept { return static_cast<std::size_t>(f.size()); }

    // h o f
    CVector product() const { return h.cwiseProduct(f); }
};

struct EffectiveChannel
{
    CMatrix matrix;
};

// Test hook: switches every noise source off so outputs become deterministic.
enum class NoiseMode
{
    enabled,
    disabled
};

inline ChannelRealization sample_channel(std::size_t k, RandomSource &rng)
{
    require(k >= 1, "relay count K must be positive");
    ChannelRealization ch;
    ch.f = rng.complex_gaussian_vector(static_cast<Eigen::Index>(k));
    ch.h = rng.complex_gaussian_vector(static_cast<Eigen::Index>(k));
    return ch;
}

namespace detail
{

inline void check_dimensions(const RelayScheme &scheme, const ChannelRealization &ch)
{
    require(ch.f.size() == ch.h.size(), "channel vectors f and h differ in length");
    require(static_cast<std::size_t>(ch.f.size()) == scheme.relays(),
            "channel has " + std::to_string(ch.f.size()) + " relays, scheme has " +
                std::to_string(scheme.relays()));
}

inline void check_block(const RelayScheme &scheme, const CVector &x)
{
    require(static_cast<std::size_t>(x.size()) == scheme.block_length(),
            "codeword length " + std::to_string(x.size()) + " does not match block length " +
                std::to_string(scheme.block_length()));
}

} // namespace detail

// sqrt(alpha / (1 + alpha ||h||^2)) sum_i h_i f_i G_i
inline EffectiveChannel effective_channel(const RelayScheme &scheme, const ChannelRealization &ch)
{
    detail::check_dimensions(scheme, ch);
    const auto n = static_cast<Eigen::Index>(scheme.block_length());
    const double alpha = scheme.relay_power_fraction();
    const double scale = std::sqrt(alpha / (1.0 + alpha * ch.h.squaredNorm()));
    EffectiveChannel out{CMatrix::Zero(n, n)};
    for (std::size_t i = 0; i < scheme.relays(); ++i)
    {
        const auto idx = static_cast<Eigen::Index>(i);
        out.matrix += (ch.h[idx] * ch.f[idx]) * scheme.matrix(i);
    }
    out.matrix *= scale;
    return out;
}

// Signal coefficient of the literal chain after normalisation by sqrt(N0').
inline double two_hop_gain(Snr snr, double h_norm2, double alpha = 1.0)
{
    const double rho = snr.linear();
    return std::sqrt(alpha) * rho / std::sqrt(1.0 + rho + alpha * rho * h_norm2);
}

// High-SNR limit of two_hop_gain.
inline double normalized_gain(Snr snr, double h_norm2, double alpha = 1.0)
{
    return std::sqrt(alpha * snr.linear() / (1.0 + alpha * h_norm2));
}

inline CVector simulate_two_hop(const RelayScheme &scheme, const ChannelRealization &ch, const CVector &x, Snr snr,
                                RandomSource &rng, NoiseMode noise = NoiseMode::enabled)
{
    detail::check_dimensions(scheme, ch);
    detail::check_block(scheme, x);
    const auto n = x.size();
    const double rho = snr.linear();
    const double alpha = scheme.relay_power_fraction();
    const double relay_gain = std::sqrt(alpha * rho / (1.0 + rho));
    const bool noisy = noise == NoiseMode::enabled;

    CVector y = CVector::Zero(n);
    for (std::size_t i = 0; i < scheme.relays(); ++i)
    {
        const auto idx = static_cast<Eigen::Index>(i);
        CVector received = std::sqrt(rho) * ch.f[idx] * x;
        if (noisy)
            received += rng.complex_gaussian_vector(n);
        y += ch.h[idx] * relay_gain * (scheme.matrix(i) * received);
    }
    if (noisy)
        y += rng.complex_gaussian_vector(n);

    const double n0 = 1.0 + alpha * rho / (rho + 1.0) * ch.h.squaredNorm();
    return y / std::sqrt(n0);
}

inline CVector simulate_normalized(const EffectiveChannel &heff, const CVector &x, Snr snr, RandomSource &rng,
                                   NoiseMode noise = NoiseMode::enabled)
{
    require(x.size() == heff.matrix.cols(), "codeword length does not match effective channel");
    CVector y = std::sqrt(snr.linear()) * (heff.matrix * x);
    if (noise == NoiseMode::enabled)
        y += rng.complex_gaussian_vector(x.size());
    return y;
}

inline CVector simulate_normalized(const RelayScheme &scheme, const ChannelRealization &ch, const CVector &x,
                                   Snr snr, RandomSource &rng, NoiseMode noise = NoiseMode::enabled)
{
    detail::check_block(scheme, x);
    return simulate_normalized(effective_channel(scheme, ch), x, snr, rng, noise);
}

} // namespace relaydiv
