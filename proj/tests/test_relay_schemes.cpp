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
#include <relaydiv/relay_schemes.hpp>

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

using namespace relaydiv;

namespace
{

double max_abs(const CMatrix &m)
{
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

// Shift of x "up" by s: y_n = x_{(n+s) mod N}.
CVector shift_up(const CVector &x, std::size_t s)
{
    const auto n = x.size();
    CVector y(n);
    for (Eigen::Index i = 0; i < n; ++i)
        y[i] = x[(i + static_cast<Eigen::Index>(s)) % n];
    return y;
}

} // namespace

TEST_CASE("DFT matrix is unitary with the documented sign", "[schemes]")
{
    for (std::size_t n : {1u, 2u, 3u, 8u, 17u})
    {
        const CMatrix f = dft_matrix(n);
        CHECK(max_abs(f * f.adjoint() - CMatrix::Identity(n, n)) < 1e-13);
    }
    const CMatrix f4 = dft_matrix(4);
    CHECK(std::abs(f4(1, 1) - cplx(0.0, -0.5)) < 1e-15);
    CHECK(std::abs(f4(2, 3) - cplx(-0.5, 0.0)) < 1e-15);
}

TEST_CASE("cyclic delay matrices shift the block up by i-1 samples", "[schemes]")
{
    const auto s = cyclic_delay_scheme(3, 5);
    CHECK(s.name() == "cdd");
    CHECK(s.relays() == 3);
    CHECK(s.block_length() == 5);
    CHECK(max_abs(s.matrix(0) - CMatrix::Identity(5, 5) / std::sqrt(5.0)) < 1e-15);
    CVector x(5);
    x << 1.0, 2.0, 3.0, 4.0, 5.0;
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(max_abs(s.matrix(i) * x * std::sqrt(5.0) - shift_up(x, i)) < 1e-14);
}

TEST_CASE("phase rolling matrices apply a progressive phase ramp", "[schemes]")
{
    const std::size_t n = 6;
    const auto s = phase_rolling_scheme(4, n);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t k = 0; k < n; ++k)
        {
            const cplx expected = std::exp(cplx(0.0, 2.0 * std::numbers::pi * double(i * k) / double(n))) /
                                  std::sqrt(double(n));
            CHECK(std::abs(s.matrix(i)(k, k) - expected) < 1e-14);
        }
    CHECK(max_abs(s.matrix(2) - CMatrix(s.matrix(2).diagonal().asDiagonal())) == 0.0);
}

TEST_CASE("scheme validation", "[schemes]")
{
    CHECK_THROWS_AS(cyclic_delay_scheme(5, 4), InvalidParameter);
    CHECK_THROWS_AS(phase_rolling_scheme(0, 4), InvalidParameter);
    CHECK_THROWS_AS(custom_scheme({}), InvalidParameter);

    std::vector<CMatrix> mats{CMatrix::Identity(3, 3) / std::sqrt(3.0), CMatrix::Identity(3, 3)};
    try
    {
        custom_scheme(mats);
        FAIL("expected SchemeInvalid");
    }
    catch (const SchemeInvalid &e)
    {
        CHECK(e.index() == 1);
        CHECK(e.deviation() == Catch::Approx(2.0 / 3.0));
    }

    std::vector<CMatrix> ragged{CMatrix::Identity(2, 2) / std::sqrt(2.0), CMatrix::Identity(3, 3) / std::sqrt(3.0)};
    CHECK_THROWS_AS(custom_scheme(ragged), InvalidParameter);
    std::vector<CMatrix> too_many(3, CMatrix::Identity(2, 2) / std::sqrt(2.0));
    CHECK_THROWS_AS(custom_scheme(too_many), InvalidParameter);

    // Perturbation just above the tolerance is rejected, just below accepted.
    CMatrix g = CMatrix::Identity(2, 2) / std::sqrt(2.0);
    g(0, 1) = 1e-11;
    CHECK_THROWS_AS(custom_scheme({g}), SchemeInvalid);
    g(0, 1) = 1e-13;
    CHECK_NOTHROW(custom_scheme({g}));
}

TEST_CASE("custom scheme built from CDD matrices matches the builtin", "[schemes]")
{
    const auto cdd = cyclic_delay_scheme(3, 4);
    const auto copy = custom_scheme({cdd.matrices().begin(), cdd.matrices().end()});
    CHECK(copy.name() == "custom");
    CHECK(max_abs(gramian(copy).gram - gramian(cdd).gram) == 0.0);
}

TEST_CASE("random unitary schemes satisfy the scaling constraint", "[schemes]")
{
    RandomSource rng(5);
    for (std::size_t n = 1; n <= 16; ++n)
    {
        const auto s = random_unitary_scheme(std::min<std::size_t>(n, 4), n, rng);
        for (std::size_t i = 0; i < s.relays(); ++i)
            CHECK(unitary_scaling_deviation(s.matrix(i)) < 1e-13);
    }
}

TEST_CASE("DFT duality between cyclic delay and phase rolling", "[schemes]")
{
    for (std::size_t n = 1; n <= 12; ++n)
    {
        const CMatrix f = dft_matrix(n);
        for (std::size_t i = 0; i < n; ++i)
        {
            const CMatrix p = cyclic_shift_matrix(n, i);
            const CMatrix lam = phase_ramp_matrix(n, i);
            CHECK(max_abs(p - f.adjoint() * lam * f) < 1e-12);
            CHECK(max_abs(lam / std::sqrt(double(n)) - f * p * f.adjoint() / std::sqrt(double(n))) < 1e-12);
        }
    }
}

TEST_CASE("cyclic shifts are trace orthogonal", "[schemes]")
{
    const std::size_t n = 7;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
        {
            const cplx ip = (cyclic_shift_matrix(n, i) * cyclic_shift_matrix(n, j).adjoint()).trace();
            CHECK(std::abs(ip - cplx(i == j ? double(n) : 0.0)) < 1e-14);
        }
}

TEST_CASE("Gramian of orthogonal families is I/N", "[schemes]")
{
    for (std::size_t n : {1u, 2u, 5u, 8u})
        for (std::size_t k = 1; k <= n; ++k)
        {
            const CMatrix expected = CMatrix::Identity(k, k) / double(n);
            const auto g1 = gramian(cyclic_delay_scheme(k, n));
            const auto g2 = gramian(phase_rolling_scheme(k, n));
            CHECK(max_abs(g1.gram - expected) < 1e-15);
            CHECK(max_abs(g2.gram - expected) < 1e-15);
            CHECK(g1.lambda_min == Catch::Approx(1.0 / double(n)));
            CHECK(g1.lambda_max == Catch::Approx(1.0 / double(n)));
            CHECK(g1.gram.trace().real() == Catch::Approx(double(k) / double(n)));
        }
}

TEST_CASE("Gramian of a repeated matrix is rank one", "[schemes]")
{
    const CMatrix g = CMatrix::Identity(4, 4) / 2.0;
    const auto s = custom_scheme({g, g});
    const auto gr = gramian(s);
    CHECK(max_abs(gr.gram - CMatrix::Constant(2, 2, 0.25)) < 1e-15);
    CHECK(gr.lambda_min == Catch::Approx(0.0).margin(1e-15));
    CHECK(gr.lambda_max == Catch::Approx(0.5));
}

TEST_CASE("Gramian is Hermitian, PSD and invariant under a common unitary", "[schemes]")
{
    RandomSource rng(77);
    for (int t = 0; t < 20; ++t)
    {
        const auto s = random_unitary_scheme(3, 5, rng);
        const auto g = gramian(s);
        CHECK(max_abs(g.gram - g.gram.adjoint()) < 1e-15);
        CHECK(g.lambda_min >= 0.0);
        CHECK(g.gram.trace().real() == Catch::Approx(3.0 / 5.0));
        const CMatrix u = random_unitary(5, rng);
        std::vector<CMatrix> rotated;
        for (const auto &m : s.matrices())
            rotated.push_back(u * m);
        CHECK(max_abs(gramian(custom_scheme(rotated)).gram - g.gram) < 1e-13);
    }
}

TEST_CASE("power split sets the per-relay power fraction", "[schemes]")
{
    const auto s = cyclic_delay_scheme(4, 4, PowerSplit::total);
    CHECK(s.relay_power_fraction() == 0.25);
    CHECK(s.with_power_split(PowerSplit::per_relay).relay_power_fraction() == 1.0);
}
