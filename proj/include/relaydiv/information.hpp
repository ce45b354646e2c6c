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

#pragma once

#include "channel_model.hpp"
#include "core.hpp"
#include "relay_schemes.hpp"

#include <algorithm>
#include <cmath>

namespace relaydiv
{

// All rates are in bits per channel use; the 1/2 accounts for the two slots.

struct MiResult
{
    double exact_mi = 0.0;
    double jensen_mi = 0.0;
};

// (1/2N) sum_n log2(1 + rho lambda_n(H H^H))
inline double mutual_information(const EffectiveChannel &heff, Snr snr)
{
    const auto n = heff.matrix.rows();
    if (n == 0)
        return 0.0;
    const CMatrix gram = heff.matrix * heff.matrix.adjoint();
    const RVector ev = psd_eigenvalues(gram);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        acc += std::log2(1.0 + snr.linear() * ev[i]);
    return acc / (2.0 * static_cast<double>(n));
}

// (1/2) log2(1 + (rho/N) ||H||_F^2)
inline double jensen_mi(const EffectiveChannel &heff, Snr snr)
{
    const auto n = static_cast<double>(heff.matrix.rows());
    return 0.5 * std::log2(1.0 + snr.linear() / n * heff.matrix.squaredNorm());
}

inline MiResult evaluate_mi(const EffectiveChannel &heff, Snr snr)
{
    return {mutual_information(heff, snr), jensen_mi(heff, snr)};
}

// h~^H K h~ with h~ = h o f. Real because K is Hermitian.
inline double gramian_quadratic_form(const GramianSummary &gram, const ChannelRealization &ch)
{
    require(gram.gram.rows() == ch.f.size() && ch.f.size() == ch.h.size(),
            "Gramian size does not match channel relay count");
    const CVector ht = ch.product();
    return (ht.adjoint() * gram.gram * ht)(0, 0).real();
}

// Same value as jensen_mi(effective_channel(...)) without forming H_eff.
inline double jensen_mi_via_gramian(const GramianSummary &gram, const ChannelRealization &ch, Snr snr,
                                    double relay_power_fraction = 1.0)
{
    const double alpha = relay_power_fraction;
    const double q = gramian_quadratic_form(gram, ch);
    return 0.5 * std::log2(1.0 + snr.linear() * alpha * q / (1.0 + alpha * ch.h.squaredNorm()));
}

// Target rate for outage decisions: r log2(rho), optionally floored at a
// fixed rate so that the fixed-rate (r = 0) regime has a nonzero target.
inline double outage_rate_bits(double r, Snr snr, double rate_floor_bits = 0.0)
{
    return std::max(r * snr.log2(), rate_floor_bits);
}

inline bool is_outage_at_rate(double mi, double rate_bits)
{
    return mi < rate_bits;
}

inline bool is_outage(double mi, double r, Snr snr)
{
    if (!(snr.linear() > 1.0))
        throw InvalidParameter("outage needs rho > 1 so that r*log(rho) is a positive rate");
    return is_outage_at_rate(mi, r * snr.log2());
}

} // namespace relaydiv
