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
 * @file relay_schemes.hpp
 * @brief Linear relay transformation families and their Gramian.
 *
 * Every relay i applies an N x N matrix G_i with G_i G_i^H = I/N to the block it
 * received. Built-in families:
 *
 * - cyclic delay diversity: G_i = P_i / sqrt(N), P_i shifts a vector up by i-1
 * - phase rolling:          G_i = Lambda_i / sqrt(N), Lambda_i = diag(exp(j 2 pi n (i-1) / N))
 *
 * The two are related through the unitary DFT matrix F by P_i = F^H Lambda_i F.
 */

#pragma once

#include "core.hpp"
#include "random.hpp"

#include <algorithm>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace relaydiv
{

inline constexpr double kSchemeTolerance = 1e-12;

// Per-relay power rho (default), or rho/K so that the total relay power is rho.
enum class PowerSplit
{
    per_relay,
    total
};

// Largest elementwise deviation of G G^H from I/N.
inline double unitary_scaling_deviation(const CMatrix &g)
{
    const auto n = g.rows();
    const CMatrix target = CMatrix::Identity(n, n) / static_cast<double>(n);
    return (g * g.adjoint() - target).cwiseAbs().maxCoeff();
}

class RelayScheme
{
public:
    // Validates shape and the unitary-scaling constraint. Throws SchemeInvalid
    // naming the first offending matrix.
    static RelayScheme from_matrices(std::vector<CMatrix> matrices, std::string name = "custom",
                                     PowerSplit split = PowerSplit::per_relay)
    {
        require(!matrices.empty(), "relay scheme needs at least one matrix");
        const auto n = matrices.front().rows();
        require(n >= 1, "relay matrices must be non-empty");
        for (std::size_t i = 0; i < matrices.size(); ++i)
        {
            require(matrices[i].rows() == n && matrices[i].cols() == n,
                    "relay matrix " + std::to_string(i + 1) + " is not " + std::to_string(n) + "x" +
                        std::to_string(n));
        }
        require(static_cast<Eigen::Index>(matrices.size()) <= n,
                "relay count K=" + std::to_string(matrices.size()) + " exceeds block length N=" + std::to_string(n));
        for (std::size_t i = 0; i < matrices.size(); ++i)
        {
            const double dev = unitary_scaling_deviation(matrices[i]);
            if (!(dev <= kSchemeTolerance))
                throw SchemeInvalid(i, dev);
        }
        return RelayScheme(std::move(matrices), std::move(name), split);
    }

    std::size_t relays() const noexcept { return matrices_.size(); }
    std::size_t block_length() const noexcept { return static_cast<std::size_t>(matrices_.front().rows()); }
    const CMatrix &matrix(std::size_t i) const { return matrices_.at(i); }
    std::span<const CMatrix> matrices() const noexcept { return matrices_; }
    const std::string &name() const noexcept { return name_; }
    PowerSplit power_split() const noexcept { return split_; }

    // Fraction of rho each relay transmits with: 1 or 1/K.
    double relay_power_fraction() const noexcept
    {
        return split_ == PowerSplit::per_relay ? 1.0 : 1.0 / static_cast<double>(relays());
    }

    RelayScheme with_power_split(PowerSplit split) const
    {
        RelayScheme copy = *this;
        copy.split_ = split;
        return copy;
    }

private:
    RelayScheme(std::vector<CMatrix> matrices, std::string name, PowerSplit split)
        : matrices_(std::move(matrices)), name_(std::move(name)), split_(split)
    {
    }

    std::vector<CMatrix> matrices_;
    std::string name_;
    PowerSplit split_;
};

// Unitary DFT, [F]_{ln} = exp(-j 2 pi l n / N) / sqrt(N) with 0-based l, n.
inline CMatrix dft_matrix(std::size_t n)
{
    require(n >= 1, "DFT size must be positive");
    const auto N = static_cast<Eigen::Index>(n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    CMatrix f(N, N);
    for (Eigen::Index l = 0; l < N; ++l)
        for (Eigen::Index k = 0; k < N; ++k)
        {
            const auto phase_index = static_cast<double>((l * k) % N);
            f(l, k) = std::polar(scale, -2.0 * std::numbers::pi * phase_index / static_cast<double>(n));
        }
    return f;
}

// Permutation that moves entry (n + shift) mod N of x to position n.
inline CMatrix cyclic_shift_matrix(std::size_t n, std::size_t shift)
{
    const auto N = static_cast<Eigen::Index>(n);
    CMatrix p = CMatrix::Zero(N, N);
    for (Eigen::Index row = 0; row < N; ++row)
        p(row, static_cast<Eigen::Index>((static_cast<std::size_t>(row) + shift) % n)) = 1.0;
    return p;
}

// diag(exp(j 2 pi m k / N)), k = 0..N-1, with m the 0-based relay index.
inline CMatrix phase_ramp_matrix(std::size_t n, std::size_t m)
{
    const auto N = static_cast<Eigen::Index>(n);
    CMatrix lam = CMatrix::Zero(N, N);
    for (Eigen::Index k = 0; k < N; ++k)
    {
        const auto phase_index = static_cast<double>((static_cast<std::size_t>(k) * m) % n);
        lam(k, k) = std::polar(1.0, 2.0 * std::numbers::pi * phase_index / static_cast<double>(n));
    }
    return lam;
}

inline RelayScheme cyclic_delay_scheme(std::size_t k, std::size_t n, PowerSplit split = PowerSplit::per_relay)
{
    require(k >= 1 && n >= 1, "K and N must be positive");
    require(k <= n, "cyclic delay diversity needs K <= N");
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    std::vector<CMatrix> g;
    g.reserve(k);
    for (std::size_t i = 0; i < k; ++i)
        g.push_back(cyclic_shift_matrix(n, i) * scale);
    return RelayScheme::from_matrices(std::move(g), "cdd", split);
}

inline RelayScheme phase_rolling_scheme(std::size_t k, std::size_t n, PowerSplit split = PowerSplit::per_relay)
{
    require(k >= 1 && n >= 1, "K and N must be positive");
    require(k <= n, "phase rolling needs K <= N");
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    std::vector<CMatrix> g;
    g.reserve(k);
    for (std::size_t i = 0; i < k; ++i)
        g.push_back(phase_ramp_matrix(n, i) * scale);
    return RelayScheme::from_matrices(std::move(g), "phase-rolling", split);
}

inline RelayScheme custom_scheme(std::vector<CMatrix> matrices, PowerSplit split = PowerSplit::per_relay)
{
    return RelayScheme::from_matrices(std::move(matrices), "custom", split);
}

// Haar-distributed unitary (QR of a complex Gaussian matrix with the phases
// of R's diagonal folded back into Q).
inline CMatrix random_unitary(std::size_t n, RandomSource &rng)
{
    const auto N = static_cast<Eigen::Index>(n);
    CMatrix a(N, N);
    for (Eigen::Index c = 0; c < N; ++c)
        for (Eigen::Index r = 0; r < N; ++r)
            a(r, c) = rng.complex_gaussian();
    Eigen::HouseholderQR<CMatrix> qr(a);
    CMatrix q = qr.householderQ() * CMatrix::Identity(N, N);
    const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index c = 0; c < N; ++c)
    {
        const double mag = std::abs(r(c, c));
        if (mag > 0.0)
            q.col(c) *= r(c, c) / mag;
    }
    return q;
}

// K independent Haar unitaries scaled by 1/sqrt(N).
inline RelayScheme random_unitary_scheme(std::size_t k, std::size_t n, RandomSource &rng)
{
    require(k >= 1 && k <= n, "random unitary scheme needs 1 <= K <= N");
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    std::vector<CMatrix> g;
    g.reserve(k);
    for (std::size_t i = 0; i < k; ++i)
        g.push_back(random_unitary(n, rng) * scale);
    return RelayScheme::from_matrices(std::move(g), "random-unitary");
}

struct GramianSummary
{
    CMatrix gram;        // K x K, gram(r, c) = tr(G_c G_r^H) / N
    RVector eigenvalues; // ascending, clamped at 0
    double lambda_min = 0.0;
    double lambda_max = 0.0;
};

inline GramianSummary gramian(const RelayScheme &scheme)
{
    const auto k = static_cast<Eigen::Index>(scheme.relays());
    const double n = static_cast<double>(scheme.block_length());
    GramianSummary out;
    out.gram.resize(k, k);
    for (Eigen::Index r = 0; r < k; ++r)
    {
        const CMatrix &gr = scheme.matrix(static_cast<std::size_t>(r));
        for (Eigen::Index c = 0; c < k; ++c)
        {
            const CMatrix &gc = scheme.matrix(static_cast<std::size_t>(c));
            // tr(G_c G_r^H) = sum_ab G_c(a,b) conj(G_r(a,b))
            out.gram(r, c) = (gc.array() * gr.array().conjugate()).sum() / n;
        }
    }
    out.eigenvalues = psd_eigenvalues(out.gram);
    out.lambda_min = out.eigenvalues.minCoeff();
    out.lambda_max = out.eigenvalues.maxCoeff();
    return out;
}

} // namespace relaydiv
