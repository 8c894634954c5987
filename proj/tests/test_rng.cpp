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

#include <mimoeff/rng.hpp>

#include <gtest/gtest.h>

#include <vector>

using namespace mimoeff;

TEST(Philox, KnownAnswerVectors)
{
    using C = Philox4x32::Counter;
    EXPECT_EQ(Philox4x32::generate(C{0, 0, 0, 0}, {0, 0}), (C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
    EXPECT_EQ(Philox4x32::generate(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
              (C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
    EXPECT_EQ(Philox4x32::generate(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
              (C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(SubstreamRng, PureFunctionOfIdentity)
{
    SubstreamRng a(SeedSpec{42, 7}, Purpose::test, 1, 3);
    SubstreamRng b(SeedSpec{42, 7}, Purpose::test, 1, 3);
    for (int i = 0; i < 100; ++i)
        EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(SubstreamRng, DistinctIdentitiesDiffer)
{
    const auto first = [](SeedSpec s, Purpose p, std::uint32_t stream, std::uint32_t elem)
    { return SubstreamRng(s, p, stream, elem).next_u64(); };
    const auto base = first({42, 7}, Purpose::test, 1, 3);
    EXPECT_NE(base, first({43, 7}, Purpose::test, 1, 3));
    EXPECT_NE(base, first({42, 8}, Purpose::test, 1, 3));
    EXPECT_NE(base, first({42, 7}, Purpose::rimp_waves, 1, 3));
    EXPECT_NE(base, first({42, 7}, Purpose::test, 2, 3));
    EXPECT_NE(base, first({42, 7}, Purpose::test, 1, 4));
}

TEST(SubstreamRng, UniformAndNormalMoments)
{
    SubstreamRng rng(SeedSpec{1, 0}, Purpose::test);
    const int n = 200000;
    double su = 0.0, sn = 0.0, sn2 = 0.0;
    for (int i = 0; i < n; ++i)
    {
        const double u = rng.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        su += u;
        const double z = rng.normal();
        sn += z;
        sn2 += z * z;
    }
    EXPECT_NEAR(su / n, 0.5, 0.003);
    EXPECT_NEAR(sn / n, 0.0, 0.01);
    EXPECT_NEAR(sn2 / n, 1.0, 0.01);
}

TEST(SubstreamRng, ComplexNormalVariance)
{
    SubstreamRng rng(SeedSpec{9, 0}, Purpose::test);
    double s = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i)
        s += std::norm(rng.complex_normal(0.25));
    EXPECT_NEAR(s / n, 0.25, 0.004);
}
