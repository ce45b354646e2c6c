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
#include <relaydiv/channel_model.hpp>

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace relaydiv;

namespace
{

double max_abs(const CMatrix &m)
{
    return m.cwiseAbs().maxCoeff();
}

// Sample covariance of the destination noise of the two-hop chain, obtained by
// subtracting the noise-free output for the same channel.
CMatrix two_hop_noise_covariance(const RelayScheme &s, const ChannelRealization &ch, Snr snr, int draws,
                                 std::uint64_t seed)
{
    const auto n = static_cast<Eigen::Index>(s.block_length());
    RandomSource rng(seed);
    const CVector x = CVector::Ones(n);
    const CVector clean = simulate_two_hop(s, ch, x, snr, rng, NoiseMode::disabled);
    CMatrix cov = CMatrix::Zero(n, n);
    for (int t = 0; t < draws; ++t)
    {
        const CVector w = simulate_two_hop(s, ch, x, snr, rng) - clean;
        cov += w * w.adjoint();
    }
    return cov / double(draws);
}

} // namespace

TEST_CASE("channel draws are unit-variance circular Gaussians", "[channel]")
{
    RandomSource rng(3);
    double f2 = 0.0, h2 = 0.0;
    cplx fh = 0.0;
    const int n = 100000;
    for (int t = 0; t < n; ++t)
    {
        const auto ch = sample_channel(2, rng);
        f2 += ch.f.squaredNorm();
        h2 += ch.h.squaredNorm();
        fh += ch.f[0] * std::conj(ch.h[0]);
    }
    CHECK(f2 / n == Catch::Approx(2.0).margin(0.02));
    CHECK(h2 / n == Catch::Approx(2.0).margin(0.02));
    CHECK(std::abs(fh / double(n)) < 0.01);
    CHECK_THROWS_AS(sample_channel(0, rng), InvalidParameter);
}

TEST_CASE("effective channel is the normalized sum of relay paths", "[channel]")
{
    RandomSource rng(4);
    const auto s = phase_rolling_scheme(3, 4);
    const auto ch = sample_channel(3, rng);
    CMatrix expected = CMatrix::Zero(4, 4);
    for (int i = 0; i < 3; ++i)
        expected += ch.h[i] * ch.f[i] * s.matrix(i);
    expected /= std::sqrt(1.0 + ch.h.squaredNorm());
    CHECK(max_abs(effective_channel(s, ch).matrix - expected) < 1e-15);

    const auto total = s.with_power_split(PowerSplit::total);
    const double a = 1.0 / 3.0;
    const CMatrix scaled = expected * std::sqrt(1.0 + ch.h.squaredNorm()) * std::sqrt(a / (1.0 + a * ch.h.squaredNorm()));
    CHECK(max_abs(effective_channel(total, ch).matrix - scaled) < 1e-15);

    ChannelRealization bad{ch.f, ch.h.head(2)};
    CHECK_THROWS_AS(effective_channel(s, bad), InvalidParameter);
}

TEST_CASE("noise-free two-hop output matches the chain coefficients", "[channel]")
{
    RandomSource rng(8);
    const auto s = cyclic_delay_scheme(2, 3);
    const auto ch = sample_channel(2, rng);
    CVector x(3);
    x << cplx(1, 0), cplx(0, -1), cplx(0.5, 0.5);
    const Snr snr = Snr::from_db(17.0);
    const double rho = snr.linear();
    const double h2 = ch.h.squaredNorm();
    // Relay gain sqrt(rho/(rho+1)) on received power rho + 1, destination
    // normalized by 1 + rho/(rho+1) ||h||^2.
    CVector expected = CVector::Zero(3);
    for (int i = 0; i < 2; ++i)
        expected += ch.h[i] * std::sqrt(rho / (rho + 1.0)) * s.matrix(i) * (std::sqrt(rho) * ch.f[i] * x);
    expected /= std::sqrt(1.0 + rho / (rho + 1.0) * h2);
    const CVector y = simulate_two_hop(s, ch, x, snr, rng, NoiseMode::disabled);
    CHECK(max_abs(y - expected) < 1e-12);

    // Same thing written with the combined two-hop gain.
    const CMatrix sum = (ch.h[0] * ch.f[0]) * s.matrix(0) + (ch.h[1] * ch.f[1]) * s.matrix(1);
    CHECK(max_abs(y - two_hop_gain(snr, h2) * sum * x) < 1e-12);
}

TEST_CASE("two-hop prefactor converges to the normalized model", "[channel]")
{
    const double h2 = 1.7;
    double previous = 1.0;
    for (double db : {10.0, 20.0, 30.0, 40.0, 50.0})
    {
        const Snr snr = Snr::from_db(db);
        const double ratio = two_hop_gain(snr, h2) / normalized_gain(snr, h2);
        const double gap = std::abs(ratio - 1.0);
        CHECK(gap < previous);
        // ratio^2 = (1 + h2) rho / (1 + rho + rho h2) = 1 - 1/(1 + rho + rho h2)
        CHECK(ratio * ratio == Catch::Approx(1.0 - 1.0 / (1.0 + snr.linear() * (1.0 + h2))).epsilon(1e-12));
        previous = gap;
    }
    CHECK(previous < 1e-5);
}

TEST_CASE("normalized model without noise is sqrt(rho) H_eff x", "[channel]")
{
    RandomSource rng(12);
    const auto s = cyclic_delay_scheme(2, 4);
    const auto ch = sample_channel(2, rng);
    const CVector x = rng.complex_gaussian_vector(4);
    const Snr snr = Snr::from_db(25.0);
    const CVector y = simulate_normalized(s, ch, x, snr, rng, NoiseMode::disabled);
    CHECK(max_abs(y - std::sqrt(snr.linear()) * effective_channel(s, ch).matrix * x) < 1e-12);
    CHECK_THROWS_AS(simulate_normalized(s, ch, CVector::Ones(3), snr, rng), InvalidParameter);
}

TEST_CASE("normalized model adds unit-variance white noise", "[channel]")
{
    RandomSource rng(21);
    const auto s = phase_rolling_scheme(2, 3);
    const auto ch = sample_channel(2, rng);
    const auto heff = effective_channel(s, ch);
    const CVector x = CVector::Ones(3);
    const Snr snr = Snr::from_db(10.0);
    const CVector clean = simulate_normalized(heff, x, snr, rng, NoiseMode::disabled);
    CMatrix cov = CMatrix::Zero(3, 3);
    const int draws = 50000;
    for (int t = 0; t < draws; ++t)
    {
        const CVector w = simulate_normalized(heff, x, snr, rng) - clean;
        cov += w * w.adjoint();
    }
    cov /= double(draws);
    CHECK(max_abs(cov - CMatrix::Identity(3, 3)) < 0.03);
}

TEST_CASE("two-hop destination noise is white", "[channel]")
{
    RandomSource rng(31);
    const Snr snr = Snr::from_db(15.0);
    const double g2 = snr.linear() / (1.0 + snr.linear());

    SECTION("single-sample blocks give unit noise power exactly in expectation")
    {
        const auto s = cyclic_delay_scheme(1, 1);
        const auto ch = sample_channel(1, rng);
        const CMatrix cov = two_hop_noise_covariance(s, ch, snr, 100000, 41);
        CHECK(std::abs(cov(0, 0) - 1.0) < 0.02);
    }
    SECTION("longer blocks: white with power (1 + g^2 |h|^2 / N) / (1 + g^2 |h|^2)")
    {
        const auto s = cyclic_delay_scheme(2, 4);
        const auto ch = sample_channel(2, rng);
        const double h2 = ch.h.squaredNorm();
        const double c = (1.0 + g2 * h2 / 4.0) / (1.0 + g2 * h2);
        const CMatrix cov = two_hop_noise_covariance(s, ch, snr, 100000, 42);
        for (int i = 0; i < 4; ++i)
            CHECK(std::abs(cov(i, i).real() - c) < 0.03 * c);
        const CMatrix off = cov - CMatrix(cov.diagonal().asDiagonal());
        CHECK(max_abs(off) < 0.02);
    }
}
