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
 * @file codebook.hpp
 * @brief Codebooks, code difference matrices and the full-rank criteria.
 *
 * For a codeword difference dx the N x K matrix Phi(dx) = [G_1 dx ... G_K dx]
 * must have rank K for every pair in the book. For the built-in families the
 * criterion reduces to a per-coefficient test:
 *
 * - cyclic delay diversity: every DFT coefficient (F dx)_k is nonzero
 * - phase rolling:          every entry dx_k is nonzero
 *
 * Both are exact characterisations for K = N and sufficient conditions for K < N.
 */

#pragma once

#include "core.hpp"
#include "random.hpp"
#include "relay_schemes.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace relaydiv
{

inline constexpr double kDefaultSizeCap = 65536.0;
// "Nonzero" threshold for the simplified conditions, relative to ||dx||.
inline constexpr double kZeroThreshold = 1e-9;

struct Codebook
{
    std::vector<CVector> codewords;
    double r = 0.0;   // multiplexing gain the book was built for
    double snr = 1.0; // linear SNR the book was built for
    std::size_t block_length = 0;

    std::size_t size() const noexcept { return codewords.size(); }

    double mean_energy() const
    {
        double acc = 0.0;
        for (const auto &c : codewords)
            acc += c.squaredNorm();
        return codewords.empty() ? 0.0 : acc / static_cast<double>(codewords.size());
    }
};

// ceil(rho^(2 N r)); the relative nudge keeps exact powers such as 16^1 from
// rounding up to 17.
inline double nominal_codebook_size(std::size_t n, double r, Snr snr)
{
    const double size = std::pow(snr.linear(), 2.0 * static_cast<double>(n) * r);
    return std::ceil(size * (1.0 - 1e-12));
}

inline Codebook make_codebook(std::vector<CVector> codewords, double r = 0.0, double snr = 1.0)
{
    require(!codewords.empty(), "codebook must contain at least one codeword");
    const auto n = codewords.front().size();
    for (std::size_t i = 0; i < codewords.size(); ++i)
        require(codewords[i].size() == n, "codeword " + std::to_string(i + 1) + " has inconsistent length");
    Codebook book;
    book.block_length = static_cast<std::size_t>(n);
    book.codewords = std::move(codewords);
    book.r = r;
    book.snr = snr;
    return book;
}

// rho^(2Nr) codewords with i.i.d. CN(0,1) entries.
inline Codebook gaussian_codebook(std::size_t n, double r, Snr snr, RandomSource &rng,
                                  double size_cap = kDefaultSizeCap)
{
    require(n >= 1, "block length must be positive");
    require(r >= 0.0 && r <= 0.5, "multiplexing gain must lie in [0, 1/2]");
    const double size = nominal_codebook_size(n, r, snr);
    if (!(size <= size_cap))
        throw ResourceLimit("Gaussian codebook too large", size, size_cap);
    std::vector<CVector> words;
    words.reserve(static_cast<std::size_t>(size));
    for (std::size_t i = 0; i < static_cast<std::size_t>(size); ++i)
        words.push_back(rng.complex_gaussian_vector(static_cast<Eigen::Index>(n)));
    return make_codebook(std::move(words), r, snr.linear());
}

struct DifferenceMatrix
{
    CMatrix phi; // N x K, column i = G_i dx
};

inline DifferenceMatrix difference_matrix(const RelayScheme &scheme, const CVector &dx)
{
    require(static_cast<std::size_t>(dx.size()) == scheme.block_length(),
            "difference vector length does not match block length");
    const auto n = static_cast<Eigen::Index>(scheme.block_length());
    const auto k = static_cast<Eigen::Index>(scheme.relays());
    DifferenceMatrix out{CMatrix(n, k)};
    for (Eigen::Index i = 0; i < k; ++i)
        out.phi.col(i) = scheme.matrix(static_cast<std::size_t>(i)) * dx;
    return out;
}

struct RankTolerance
{
    // sigma_min must exceed K * sigma_max * relative.
    double relative = 1e-12;
};

inline RVector singular_values(const CMatrix &m)
{
    if (m.size() == 0)
        return RVector();
    Eigen::JacobiSVD<CMatrix> svd(m);
    return svd.singularValues();
}

inline bool rank_full(const DifferenceMatrix &d, RankTolerance tol = {})
{
    const auto k = d.phi.cols();
    if (k == 0 || d.phi.rows() < k)
        return false;
    const RVector sv = singular_values(d.phi);
    const double smax = sv.maxCoeff();
    if (!(smax > 0.0))
        return false;
    return sv.minCoeff() > static_cast<double>(k) * smax * tol.relative;
}

inline bool cdd_condition(const CVector &dx)
{
    const double norm = dx.norm();
    const CVector spectrum = dft_matrix(static_cast<std::size_t>(dx.size())) * dx;
    for (Eigen::Index i = 0; i < spectrum.size(); ++i)
        if (!(std::abs(spectrum[i]) > kZeroThreshold * norm))
            return false;
    return true;
}

inline bool phase_rolling_condition(const CVector &dx)
{
    const double norm = dx.norm();
    for (Eigen::Index i = 0; i < dx.size(); ++i)
        if (!(std::abs(dx[i]) > kZeroThreshold * norm))
            return false;
    return true;
}

// lambda_min(Phi^H Phi).
inline double difference_min_eigenvalue(const DifferenceMatrix &d)
{
    const RVector ev = psd_eigenvalues(d.phi.adjoint() * d.phi);
    return ev.size() == 0 ? 0.0 : ev.minCoeff();
}

struct PairScan
{
    double mu_min = std::numeric_limits<double>::infinity();
    std::optional<std::pair<std::size_t, std::size_t>> argmin;        // pair attaining mu_min
    std::optional<std::pair<std::size_t, std::size_t>> first_violation; // first rank-deficient pair
    std::size_t pairs_checked = 0;
    std::size_t violations = 0;
};

// Scans all unordered pairs i < j in index order.
inline PairScan scan_pairs(const RelayScheme &scheme, const Codebook &book, RankTolerance tol = {})
{
    require(book.size() >= 1, "codebook must not be empty");
    require(book.block_length == scheme.block_length(), "codebook and scheme block lengths differ");
    PairScan scan;
    for (std::size_t i = 0; i < book.size(); ++i)
        for (std::size_t j = i + 1; j < book.size(); ++j)
        {
            const auto d = difference_matrix(scheme, book.codewords[i] - book.codewords[j]);
            const double mu = difference_min_eigenvalue(d);
            ++scan.pairs_checked;
            if (mu < scan.mu_min)
            {
                scan.mu_min = mu;
                scan.argmin = {i, j};
            }
            if (!rank_full(d, tol))
            {
                ++scan.violations;
                if (!scan.first_violation)
                    scan.first_violation = {i, j};
            }
        }
    return scan;
}

// mu_min over all codeword pairs; +infinity for a single-codeword book.
inline double min_gram_eigenvalue(const RelayScheme &scheme, const Codebook &book)
{
    return scan_pairs(scheme, book).mu_min;
}

// Finite-SNR check of mu_min > rho^(-2r).
inline bool approximately_universal(const RelayScheme &scheme, const Codebook &book, double r, Snr snr)
{
    require(r >= 0.0 && r <= 0.5, "multiplexing gain must lie in [0, 1/2]");
    require(snr.linear() > 1.0, "approximate universality is evaluated for rho > 1");
    return min_gram_eigenvalue(scheme, book) > std::pow(snr.linear(), -2.0 * r);
}

} // namespace relaydiv
