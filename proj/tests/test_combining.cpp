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

#include "test_support.hpp"

#include <mimoeff/combining.hpp>
#include <mimoeff/rng.hpp>

#include <Eigen/Dense>
#include <gtest/gtest.h>

using namespace mimoeff;

namespace
{
    ChannelMatrix random_channel(SubstreamRng &rng, std::size_t rows, std::size_t cols = 2)
    {
        ChannelMatrix h(rows, cols);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c)
                h(r, c) = rng.complex_normal(1.0);
        return h;
    }

    // gamma_i = 1 / [(H^H H)^-1]_ii through the Moore-Penrose pseudo-inverse W = H^+,
    // whose rows are the ZF weight vectors: [(H^H H)^-1]_ii = ||w_i||^2
    std::array<double, 2> pinv_oracle(const ChannelMatrix &h)
    {
        Eigen::MatrixXcd m(h.rows(), h.cols());
        for (std::size_t r = 0; r < h.rows(); ++r)
            for (std::size_t c = 0; c < h.cols(); ++c)
                m(Eigen::Index(r), Eigen::Index(c)) = h(r, c);
        const Eigen::MatrixXcd w = m.completeOrthogonalDecomposition().pseudoInverse();
        return {1.0 / w.row(0).squaredNorm(), 1.0 / w.row(1).squaredNorm()};
    }

    ChannelMatrix from_rows(std::initializer_list<std::initializer_list<cplx>> rows)
    {
        ChannelMatrix h(rows.size(), rows.begin()->size());
        std::size_t r = 0;
        for (const auto &row : rows)
        {
            std::size_t c = 0;
            for (const auto &v : row)
                h(r, c++) = v;
            ++r;
        }
        return h;
    }
}

TEST(Mrc, SumOfBranchPowers)
{
    const std::vector<cplx> a{cplx(1, 0), cplx(0, 0)};
    EXPECT_EQ(mrc_power(a), 1.0);
    const std::vector<cplx> b{cplx(3, 0), cplx(0, 4)};
    EXPECT_DOUBLE_EQ(mrc_power(b), 25.0);
    EXPECT_THROW(mrc_power(std::span<const cplx>{}), std::invalid_argument);
}

TEST(Mrc, FourBranchGammaMean)
{
    SubstreamRng rng({3, 0}, Purpose::test);
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i)
        sum += mrc_power(random_channel(rng, 4, 1), 0);
    EXPECT_GE(sum / 1e5, 3.96);
    EXPECT_LE(sum / 1e5, 4.04);
}

TEST(Mrc, BranchCountsMatchGammaCdf)
{
    for (int k : {2, 4})
    {
        SubstreamRng rng({5, std::uint64_t(k)}, Purpose::test);
        std::vector<double> p;
        for (int i = 0; i < 100000; ++i)
            p.push_back(mrc_power(random_channel(rng, std::size_t(k), 1), 0));
        EXPECT_LT(mimoeff::testing::ks_statistic(p, [k](double x)
                                                 { return mimoeff::testing::gamma_int_cdf(x, k); }),
                  0.01)
            << k << " branches";
    }
}

TEST(ZeroForcing, Examples)
{
    const auto id = zf_stream_powers(from_rows({{1, 0}, {0, 1}}));
    EXPECT_DOUBLE_EQ(id[0], 1.0);
    EXPECT_DOUBLE_EQ(id[1], 1.0);
    const auto tri = zf_stream_powers(from_rows({{1, 1}, {0, 1}}));
    EXPECT_NEAR(tri[0], 0.5, 1e-15);
    EXPECT_NEAR(tri[1], 1.0, 1e-15);
}

TEST(ZeroForcing, MatchesPseudoInverseOracle)
{
    SubstreamRng rng({7, 0}, Purpose::test);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i)
    {
        const std::size_t rows = 2 + std::size_t(rng.next_u64() % 7);
        const auto h = random_channel(rng, rows);
        const auto g = zf_stream_powers(h);
        const auto o = pinv_oracle(h);
        for (int s = 0; s < 2; ++s)
        {
            worst = std::max(worst, std::abs(g[s] - o[s]) / o[s]);
            // ZF never beats the matched filter on its own column
            ASSERT_LE(g[s], mrc_power(h, std::size_t(s)) * (1.0 + 1e-12));
        }
    }
    EXPECT_LT(worst, 1e-8);
}

TEST(ZeroForcing, OrthogonalColumnsKeepFullPower)
{
    SubstreamRng rng({11, 0}, Purpose::test);
    for (int i = 0; i < 10000; ++i)
    {
        const std::size_t rows = 2 + std::size_t(rng.next_u64() % 7);
        auto h = random_channel(rng, rows);
        // Gram-Schmidt the second column against the first
        cplx proj{};
        const double n0 = mrc_power(h, 0);
        for (std::size_t r = 0; r < rows; ++r)
            proj += std::conj(h(r, 0)) * h(r, 1);
        for (std::size_t r = 0; r < rows; ++r)
            h(r, 1) -= proj / n0 * h(r, 0);
        const auto g = zf_stream_powers(h);
        const auto o = pinv_oracle(h);
        for (std::size_t s = 0; s < 2; ++s)
        {
            const double n = mrc_power(h, s);
            EXPECT_NEAR(g[s], n, 1e-10 * n);
            EXPECT_NEAR(o[s], n, 1e-8 * n);
        }
    }
}

TEST(ZeroForcing, ScaleEquivarianceAndRowPermutation)
{
    SubstreamRng rng({13, 0}, Purpose::test);
    for (int i = 0; i < 1000; ++i)
    {
        const std::size_t rows = 2 + std::size_t(rng.next_u64() % 7);
        const auto h = random_channel(rng, rows);
        const cplx c = rng.complex_normal(4.0);
        ChannelMatrix scaled(rows, 2), perm(rows, 2);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t k = 0; k < 2; ++k)
            {
                scaled(r, k) = c * h(r, k);
                perm(r, k) = h(rows - 1 - r, k);
            }
        const auto g = zf_stream_powers(h);
        const auto gs = zf_stream_powers(scaled);
        const auto gp = zf_stream_powers(perm);
        const double c2 = std::norm(c);
        for (std::size_t s = 0; s < 2; ++s)
        {
            EXPECT_NEAR(gs[s], c2 * g[s], 1e-10 * c2 * g[s]);
            EXPECT_NEAR(gp[s], g[s], 1e-12 * g[s]);
        }
        EXPECT_NEAR(mrc_power(scaled, 0), c2 * mrc_power(h, 0), 1e-10 * c2 * mrc_power(h, 0));
        EXPECT_NEAR(detection_sample(scaled, StreamMode::two_bitstream), c2 * detection_sample(h, StreamMode::two_bitstream),
                    1e-10 * c2 * detection_sample(h, StreamMode::two_bitstream));
        EXPECT_NEAR(mrc_power(perm, 0), mrc_power(h, 0), 1e-12 * mrc_power(h, 0));
    }
}

TEST(ZeroForcing, SingularAndIllConditioned)
{
    const auto rank1 = from_rows({{1, 2}, {cplx(0, 1), cplx(0, 2)}});
    EXPECT_THROW(zf_stream_powers(rank1), SingularChannelError);
    EXPECT_FALSE(try_zf_stream_powers(rank1).has_value());
    const auto nearly = from_rows({{1, 1}, {0, 1e-7}});
    EXPECT_THROW(zf_stream_powers(nearly), SingularChannelError);
    const auto fine = from_rows({{1, 1}, {0, 1e-5}});
    EXPECT_NO_THROW(zf_stream_powers(fine));
    EXPECT_EQ(detection_sample(rank1, StreamMode::two_bitstream), 0.0);
    EXPECT_THROW(zf_stream_powers(ChannelMatrix(1, 2)), std::invalid_argument);
    EXPECT_THROW(zf_stream_powers(ChannelMatrix(3, 1)), std::invalid_argument);
}

TEST(DetectionMetric, MinimumOfStreams)
{
    const double g[2] = {0.5, 1.0};
    EXPECT_EQ(detection_metric(g, StreamMode::two_bitstream), 0.5);
    const double e[2] = {0.7, 0.7};
    EXPECT_EQ(detection_metric(e, StreamMode::two_bitstream), 0.7);
    EXPECT_EQ(detection_metric(std::span<const double>(g, 1), StreamMode::one_bitstream), 0.5);
    EXPECT_THROW(detection_metric(std::span<const double>(g, 1), StreamMode::two_bitstream), std::invalid_argument);
    EXPECT_EQ(detection_sample(from_rows({{1, 1}, {0, 1}}), StreamMode::two_bitstream), 0.5);
    EXPECT_EQ(detection_sample(from_rows({{3}, {cplx(0, 4)}}), StreamMode::one_bitstream), 25.0);
}
