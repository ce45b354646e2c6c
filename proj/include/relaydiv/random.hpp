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

#include "core.hpp"

#include <cstdint>
#include <random>

namespace relaydiv
{

// Seeded random source. Substreams are addressed by (seed, stream, index) so
// Monte Carlo work can be split across threads without changing results.
class RandomSource
{
public:
    explicit RandomSource(std::uint64_t seed) : RandomSource(seed, 0, 0) {}

    RandomSource(std::uint64_t seed, std::uint64_t stream, std::uint64_t index)
    {
        std::seed_seq seq{lo(seed), hi(seed), lo(stream), hi(stream), lo(index), hi(index)};
        engine_.seed(seq);
    }

    double normal() { return normal_(engine_); }

    // CN(0,1): (a + jb)/sqrt(2) with a, b ~ N(0,1).
    cplx complex_gaussian()
    {
        const double re = normal_(engine_);
        const double im = normal_(engine_);
        return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
    }

    CVector complex_gaussian_vector(Eigen::Index n)
    {
        CVector v(n);
        for (Eigen::Index i = 0; i < n; ++i)
            v[i] = complex_gaussian();
        return v;
    }

    std::size_t uniform_index(std::size_t n)
    {
        std::uniform_int_distribution<std::size_t> dist(0, n - 1);
        return dist(engine_);
    }

    std::mt19937_64 &engine() noexcept { return engine_; }

private:
    static std::uint32_t lo(std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); }
    static std::uint32_t hi(std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); }

    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_;
};

} // namespace relaydiv
