// SPDX-License-Identifier: Apache-2.0
//
// mimoeff - MIMO efficiency evaluation and antenna optimization toolkit
// Copyright (C) 2026 The mimoeff authors
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

#ifndef MIMOEFF_RNG_HPP
#define MIMOEFF_RNG_HPP

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace mimoeff
{
    // Philox4x32-10 counter-based block cipher (Salmon et al., Random123).
    // Output is a pure function of (counter, key).
    struct Philox4x32
    {
        using Counter = std::array<std::uint32_t, 4>;
        using Key = std::array<std::uint32_t, 2>;

        static constexpr Counter generate(Counter ctr, Key key) noexcept
        {
            for (int round = 0; round < 10; ++round)
            {
                ctr = single_round(ctr, key);
                key[0] += 0x9E3779B9u;
                key[1] += 0xBB67AE85u;
            }
            return ctr;
        }

    private:
        static constexpr Counter single_round(const Counter &c, const Key &k) noexcept
        {
            const std::uint64_t p0 = std::uint64_t(0xD2511F53u) * c[0];
            const std::uint64_t p1 = std::uint64_t(0xCD9E8D57u) * c[2];
            const auto hi0 = std::uint32_t(p0 >> 32), lo0 = std::uint32_t(p0);
            const auto hi1 = std::uint32_t(p1 >> 32), lo1 = std::uint32_t(p1);
            return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
        }
    };

    constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
    {
        x += 0x9E3779B97F4A7C15ull;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
        return x ^ (x >> 31);
    }

    // Identifies the independent random substream of one Monte-Carlo realization.
    struct SeedSpec
    {
        std::uint64_t master_seed = 0;
        std::uint64_t realization_index = 0;
    };

    // What a substream is used for. Distinct purposes never share random numbers.
    enum class Purpose : std::uint32_t
    {
        rimp_waves = 1,
        los_direction = 2,
        los_polarization = 3,
        polarization = 4,
        map_polarization = 5,
        ga_init = 16,
        ga_roulette = 17,
        ga_crossover = 18,
        ga_mutation = 19,
        ga_refill = 20,
        test = 255
    };

    // Deterministic random stream keyed by (master seed, purpose, stream, realization, element).
    // Draws are generated from an incrementing block counter, so the n-th draw of a substream
    // never depends on how many other substreams were consumed, or in which order.
    class SubstreamRng
    {
    public:
        SubstreamRng(SeedSpec seed, Purpose purpose, std::uint32_t stream = 0, std::uint32_t element = 0) noexcept
        {
            const std::uint64_t k = splitmix64(seed.master_seed ^ splitmix64((std::uint64_t(purpose) << 32) | stream));
            key_ = {std::uint32_t(k), std::uint32_t(k >> 32)};
            counter_ = {std::uint32_t(seed.realization_index), std::uint32_t(seed.realization_index >> 32), element, 0};
        }

        std::uint64_t next_u64() noexcept
        {
            if (used_ == 2)
            {
                block_ = Philox4x32::generate(counter_, key_);
                ++counter_[3];
                used_ = 0;
            }
            const std::uint64_t out = (std::uint64_t(block_[2 * used_]) << 32) | block_[2 * used_ + 1];
            ++used_;
            return out;
        }

        // Uniform in [0, 1) with 53 random bits
        double uniform() noexcept { return double(next_u64() >> 11) * 0x1.0p-53; }

        double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

        // Standard normal via Box-Muller; both variates of a pair are used.
        double normal() noexcept
        {
            if (has_spare_)
            {
                has_spare_ = false;
                return spare_;
            }
            const double u1 = 1.0 - uniform(); // (0, 1]
            const double u2 = uniform();
            const double r = std::sqrt(-2.0 * std::log(u1));
            const double a = 2.0 * std::numbers::pi * u2;
            spare_ = r * std::sin(a);
            has_spare_ = true;
            return r * std::cos(a);
        }

        // Circularly-symmetric complex Gaussian with E|z|^2 = variance
        std::complex<double> complex_normal(double variance = 1.0) noexcept
        {
            const double s = std::sqrt(0.5 * variance);
            const double re = normal();
            const double im = normal();
            return {s * re, s * im};
        }

    private:
        Philox4x32::Key key_{};
        Philox4x32::Counter counter_{};
        Philox4x32::Counter block_{};
        int used_ = 2;
        bool has_spare_ = false;
        double spare_ = 0.0;
    };
}

#endif
