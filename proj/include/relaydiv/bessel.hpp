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
 * @file bessel.hpp
 * @brief Modified Bessel function K_1 and the product-Rayleigh CDF.
 *
 * K_1 uses two regimes:
 *
 * - x <= 2: the ascending series
 *       K_1(x) = 1/x + ln(x/2) I_1(x) - (x/4) sum_k [psi(k+1) + psi(k+2)] (x^2/4)^k / (k! (k+1)!)
 * - x > 2: Steed's continued fraction (CF2) for K_0, K_1, which converges
 *   quickly for large arguments and underflows gracefully to 0.
 *
 * The product |f||h| of two independent Rayleigh amplitudes with E|f|^2 = E|h|^2 = 1
 * has CDF 1 - 2x K_1(2x). For small x that difference is evaluated straight
 * from the series so it carries no cancellation.
 */

#pragma once

#include "core.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace relaydiv
{

namespace detail
{

struct SmallArgSeries
{
    double i1_sum; // sum_k y^k / (k! (k+1)!)
    double psi_sum; // sum_k [psi(k+1) + psi(k+2)] y^k / (k! (k+1)!)
};

// Series in y = x^2 / 4; converges for all y, used for y <= 1.
inline SmallArgSeries k1_series(double y)
{
    double term = 1.0;
    double psi_a = -std::numbers::egamma;       // psi(1)
    double psi_b = 1.0 - std::numbers::egamma;  // psi(2)
    SmallArgSeries s{0.0, 0.0};
    for (int k = 0; k < 60; ++k)
    {
        s.i1_sum += term;
        s.psi_sum += (psi_a + psi_b) * term;
        const double kk = static_cast<double>(k);
        term *= y / ((kk + 1.0) * (kk + 2.0));
        psi_a += 1.0 / (kk + 1.0);
        psi_b += 1.0 / (kk + 2.0);
        if (term < 1e-18 * s.i1_sum)
            break;
    }
    return s;
}

// K_1(x) for x > 2 via Steed's method with mu = 0.
inline double k1_continued_fraction(double x)
{
    constexpr int max_iter = 10000;
    constexpr double eps = 1e-16;
    double b = 2.0 * (1.0 + x);
    double d = 1.0 / b;
    double h = d;
    double delh = d;
    double q1 = 0.0;
    double q2 = 1.0;
    const double a1 = 0.25; // 1/4 - mu^2
    double q = a1;
    double c = a1;
    double a = -a1;
    double s = 1.0 + q * delh;
    for (int i = 2; i <= max_iter; ++i)
    {
        a -= 2.0 * (i - 1);
        c = -a * c / i;
        const double qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const double dels = q * delh;
        s += dels;
        if (std::abs(dels / s) < eps)
            break;
    }
    h = a1 * h;
    const double k0 = std::sqrt(std::numbers::pi / (2.0 * x)) * std::exp(-x) / s;
    return k0 * (x + 0.5 - h) / x;
}

} // namespace detail

inline double bessel_k1(double x)
{
    if (!(x > 0.0))
        throw std::domain_error("bessel_k1 requires x > 0");
    if (std::isinf(x))
        return 0.0;
    if (x <= 2.0)
    {
        const double y = 0.25 * x * x;
        const auto s = detail::k1_series(y);
        const double i1 = 0.5 * x * s.i1_sum;
        return 1.0 / x + std::log(0.5 * x) * i1 - 0.25 * x * s.psi_sum;
    }
    return detail::k1_continued_fraction(x);
}

// P(|f||h| <= x) = 1 - 2x K_1(2x), f, h ~ CN(0,1) independent.
inline double product_rayleigh_cdf(double x)
{
    if (std::isnan(x))
        throw std::domain_error("product_rayleigh_cdf: NaN argument");
    if (x <= 0.0)
        return 0.0;
    if (std::isinf(x))
        return 1.0;
    if (x <= 1.0)
    {
        // 1 - z K_1(z) at z = 2x, expanded so the leading 1 cancels analytically.
        const double y = x * x;
        const auto s = detail::k1_series(y);
        return y * (s.psi_sum - 2.0 * std::log(x) * s.i1_sum);
    }
    return 1.0 - 2.0 * x * bessel_k1(2.0 * x);
}

// F_1(x) = (2/x) K_1(2/x), so that 1 - F_1(x) = product_rayleigh_cdf(1/x).
inline double f1_function(double x)
{
    if (!(x > 0.0))
        throw std::domain_error("f1_function requires x > 0");
    if (std::isinf(x))
        return 1.0;
    const double z = 2.0 / x;
    if (z <= 2.0)
        return 1.0 - product_rayleigh_cdf(1.0 / x);
    return z * bessel_k1(z); // direct form keeps relative accuracy in the tail
}

} // namespace relaydiv
