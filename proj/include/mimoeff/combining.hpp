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

#ifndef MIMOEFF_COMBINING_HPP
#define MIMOEFF_COMBINING_HPP

#include "environment.hpp"

#include <array>
#include <optional>
#include <span>
#include <stdexcept>

namespace mimoeff
{
    class SingularChannelError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Upper bound on cond(H^H H) before a 2-stream channel is treated as singular
    inline constexpr double zf_condition_limit = 1e12;

    enum class StreamMode
    {
        one_bitstream,
        two_bitstream
    };

    inline std::size_t stream_count(StreamMode m) noexcept { return m == StreamMode::one_bitstream ? 1 : 2; }

    // Maximal-ratio combining output power: sum of |h_p|^2
    inline double mrc_power(std::span<const cplx> h)
    {
        if (h.empty())
            throw std::invalid_argument("mrc_power: empty channel vector");
        double sum = 0.0;
        for (const cplx &x : h)
            sum += std::norm(x);
        return sum;
    }

    inline double mrc_power(const ChannelMatrix &h, std::size_t column = 0)
    {
        if (h.rows() == 0 || column >= h.cols())
            throw std::invalid_argument("mrc_power: empty channel vector");
        double sum = 0.0;
        for (std::size_t r = 0; r < h.rows(); ++r)
            sum += std::norm(h(r, column));
        return sum;
    }

    // Zero-forcing post-processing powers gamma_i = 1 / [(H^H H)^-1]_ii for a two-column H,
    // via the closed-form 2x2 Gram inverse. Empty when the Gram matrix is singular or too ill-conditioned.
    inline std::optional<std::array<double, 2>> try_zf_stream_powers(const ChannelMatrix &h)
    {
        if (h.cols() != 2)
            throw std::invalid_argument("zf_stream_powers: H must have exactly 2 columns");
        if (h.rows() < 2)
            throw std::invalid_argument("zf_stream_powers: at least 2 receive ports are required");
        double a = 0.0, b = 0.0;
        cplx c{};
        for (std::size_t r = 0; r < h.rows(); ++r)
        {
            a += std::norm(h(r, 0));
            b += std::norm(h(r, 1));
            c += std::conj(h(r, 0)) * h(r, 1);
        }
        // eigenvalues of [[a, c], [c*, b]]
        const double mean = 0.5 * (a + b);
        const double half_diff = 0.5 * (a - b);
        const double radius = std::sqrt(half_diff * half_diff + std::norm(c));
        const double lambda_max = mean + radius;
        const double det = a * b - std::norm(c);
        if (!(lambda_max > 0.0) || !(det > 0.0))
            return std::nullopt;
        const double lambda_min = det / lambda_max; // avoids cancellation in mean - radius
        if (!(lambda_min > 0.0) || lambda_max / lambda_min > zf_condition_limit)
            return std::nullopt;
        return std::array<double, 2>{det / b, det / a};
    }

    inline std::array<double, 2> zf_stream_powers(const ChannelMatrix &h)
    {
        auto g = try_zf_stream_powers(h);
        if (!g)
            throw SingularChannelError("zf_stream_powers: rank-deficient or ill-conditioned channel");
        return *g;
    }

    // Scalar entering the detection CDF. Two streams are detected only if both clear the threshold,
    // so the weaker stream decides. A singular channel is recorded as undetectable (0).
    inline double detection_metric(std::span<const double> stream_powers, StreamMode mode)
    {
        const std::size_t n = stream_count(mode);
        if (stream_powers.size() != n)
            throw std::invalid_argument("detection_metric: expected " + std::to_string(n) + " stream powers");
        return n == 1 ? stream_powers[0] : std::min(stream_powers[0], stream_powers[1]);
    }

    // Per-stream powers of one realization: MRC for one stream, ZF for two (zeros when singular)
    inline std::array<double, 2> stream_powers(const ChannelMatrix &h, StreamMode mode)
    {
        if (mode == StreamMode::one_bitstream)
            return {mrc_power(h, 0), 0.0};
        const auto g = try_zf_stream_powers(h);
        return g ? *g : std::array<double, 2>{0.0, 0.0};
    }

    inline double detection_sample(const ChannelMatrix &h, StreamMode mode)
    {
        const auto g = stream_powers(h, mode);
        return detection_metric(std::span<const double>(g.data(), stream_count(mode)), mode);
    }
}

#endif
