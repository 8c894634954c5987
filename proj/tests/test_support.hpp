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

// Shared helpers for the test suites: independent statistical oracles.

#ifndef MIMOEFF_TEST_SUPPORT_HPP
#define MIMOEFF_TEST_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace mimoeff::testing
{
    // Kolmogorov-Smirnov distance between the sample and an analytic CDF
    inline double ks_statistic(std::vector<double> x, const std::function<double(double)> &cdf)
    {
        std::sort(x.begin(), x.end());
        const double n = double(x.size());
        double d = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
        {
            const double f = cdf(x[i]);
            d = std::max({d, double(i + 1) / n - f, f - double(i) / n});
        }
        return d;
    }

    // CDF of Gamma(k, scale) for integer shape k
    inline double gamma_int_cdf(double x, int k, double scale = 1.0)
    {
        if (x <= 0.0)
            return 0.0;
        const double y = x / scale;
        double term = 1.0, sum = 1.0;
        for (int j = 1; j < k; ++j)
        {
            term *= y / double(j);
            sum += term;
        }
        return 1.0 - std::exp(-y) * sum;
    }

    inline double exponential_cdf(double x, double mean) { return x <= 0.0 ? 0.0 : 1.0 - std::exp(-x / mean); }

    inline double mean_of(const std::vector<double> &v)
    {
        double s = 0.0;
        for (double x : v)
            s += x;
        return s / double(v.size());
    }
}

#endif
