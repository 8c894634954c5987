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

#ifndef MIMOEFF_METRICS_HPP
#define MIMOEFF_METRICS_HPP

#include "farfield.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace mimoeff
{
    // Quantile and CDF queries need enough samples in the tail
    inline constexpr std::size_t min_quantile_samples = 1000;

    inline double to_db(double linear) noexcept { return 10.0 * std::log10(linear); }
    inline double from_db(double db) noexcept { return std::pow(10.0, db / 10.0); }

    // Sorted detection-power samples. The empirical CDF is the piecewise-linear curve through
    // (x_(i), i/M) for the ascending order statistics x_(1..M); it is 0 below x_(1) and 1 from x_(M).
    class PowerSampleSet
    {
    public:
        PowerSampleSet() = default;
        explicit PowerSampleSet(std::vector<double> samples) : v_(std::move(samples))
        {
            for (double x : v_)
                if (!(x >= 0.0) || !std::isfinite(x))
                    throw std::invalid_argument("PowerSampleSet: samples must be finite and non-negative");
            std::sort(v_.begin(), v_.end());
        }

        std::size_t size() const noexcept { return v_.size(); }
        const std::vector<double> &values() const noexcept { return v_; }

        double mean() const noexcept
        {
            double s = 0.0;
            for (double x : v_)
                s += x;
            return v_.empty() ? 0.0 : s / double(v_.size());
        }

        void require_queryable() const
        {
            if (v_.size() < min_quantile_samples)
                throw std::invalid_argument("PowerSampleSet: " + std::to_string(v_.size()) + " samples, at least " +
                                            std::to_string(min_quantile_samples) + " required");
        }

        PowerSampleSet scaled(double factor) const
        {
            std::vector<double> out(v_);
            for (double &x : out)
                x *= factor;
            return PowerSampleSet(std::move(out));
        }

    private:
        std::vector<double> v_;
    };

    inline double empirical_cdf(const PowerSampleSet &set, double x)
    {
        set.require_queryable();
        const auto &v = set.values();
        const std::size_t m = v.size();
        if (x < v.front())
            return 0.0;
        if (x >= v.back())
            return 1.0;
        const std::size_t i = std::size_t(std::upper_bound(v.begin(), v.end(), x) - v.begin()); // samples <= x, 1 <= i < m
        const double lo = v[i - 1], hi = v[i];
        const double t = (x - lo) / (hi - lo);
        return (double(i) + t) / double(m);
    }

    // Inverse of empirical_cdf: linear interpolation between adjacent order statistics
    inline double empirical_quantile(const PowerSampleSet &set, double p)
    {
        set.require_queryable();
        if (!(p >= 0.0 && p <= 1.0))
            throw std::invalid_argument("empirical_quantile: probability outside [0, 1]");
        const auto &v = set.values();
        const std::size_t m = v.size();
        const double r = p * double(m);
        if (r <= 1.0)
            return v.front();
        if (r >= double(m))
            return v.back();
        const auto i = std::size_t(std::floor(r));
        const double t = r - double(i);
        return v[i - 1] + t * (v[i] - v[i - 1]);
    }

    // Probability of detection under the ideal threshold receiver, PoD(P/P_th) = 1 - CDF(P_th / P),
    // with samples expressed relative to the reference power P.
    inline double pod(const PowerSampleSet &set, double p_over_pth, double reference_power = 1.0)
    {
        if (!(p_over_pth > 0.0))
            throw std::invalid_argument("pod: P/P_th must be positive");
        return 1.0 - empirical_cdf(set, reference_power / p_over_pth);
    }

    // P/P_th at which PoD reaches 'level'; +inf when the (1 - level) quantile is zero
    inline double pod_inverse(const PowerSampleSet &set, double level = 0.95, double reference_power = 1.0)
    {
        if (!(level > 0.0 && level < 1.0))
            throw std::invalid_argument("pod_inverse: level must lie in (0, 1)");
        const double q = empirical_quantile(set, 1.0 - level);
        if (q <= 0.0)
            return std::numeric_limits<double>::infinity();
        return reference_power / q;
    }

    // P/P_th at which the mean of two per-stream PoD curves reaches 'level'
    inline double pod_inverse_average(const PowerSampleSet &a, const PowerSampleSet &b, double level = 0.95, double reference_power = 1.0)
    {
        if (!(level > 0.0 && level < 1.0))
            throw std::invalid_argument("pod_inverse_average: level must lie in (0, 1)");
        a.require_queryable();
        b.require_queryable();
        const double target = 1.0 - level;
        auto mean_cdf = [&](double y)
        { return 0.5 * (empirical_cdf(a, y) + empirical_cdf(b, y)); };
        double lo = 0.0, hi = std::max(a.values().back(), b.values().back());
        if (mean_cdf(0.0) >= target)
            return std::numeric_limits<double>::infinity();
        for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it)
        {
            const double mid = 0.5 * (lo + hi);
            (mean_cdf(mid) < target ? lo : hi) = mid;
        }
        const double y = 0.5 * (lo + hi);
        return y > 0.0 ? reference_power / y : std::numeric_limits<double>::infinity();
    }

    struct EfficiencyResult
    {
        double linear = 0.0;
        double aut_requirement = 0.0; // P/P_th needed by the antenna under test
        double ref_requirement = 0.0; // P/P_th needed by the reference
        std::string diagnostic;

        double db() const noexcept { return to_db(linear); }
    };

    // Ratio of required powers at a PoD level, reference over antenna under test
    inline EfficiencyResult efficiency_from_requirements(double ref_requirement, double aut_requirement)
    {
        if (!std::isfinite(ref_requirement) || !(ref_requirement > 0.0))
            throw std::invalid_argument("mimo_efficiency: reference never reaches the PoD level");
        EfficiencyResult r;
        r.ref_requirement = ref_requirement;
        r.aut_requirement = aut_requirement;
        if (!std::isfinite(aut_requirement))
        {
            r.linear = 0.0;
            r.diagnostic = "antenna under test never reaches the PoD level (zero tail quantile)";
        }
        else
            r.linear = ref_requirement / aut_requirement;
        return r;
    }

    // Both sets must be expressed against the same transmit reference power
    inline EfficiencyResult mimo_efficiency(const PowerSampleSet &aut, const PowerSampleSet &ref, double level = 0.95)
    {
        return efficiency_from_requirements(pod_inverse(ref, level), pod_inverse(aut, level));
    }

    // max(|E1|, |E2|) / min(|E1|, |E2|); +inf if either port is zero
    inline double amplitude_imbalance(const FieldPair &e1, const FieldPair &e2) noexcept
    {
        const double a = e1.norm(), b = e2.norm();
        const double lo = std::min(a, b);
        if (!(lo > 0.0))
            return std::numeric_limits<double>::infinity();
        return std::max(a, b) / lo;
    }

    // |E1 . E2*| / (|E1| |E2|), in [0, 1]
    inline double polarization_nonorthogonality(const FieldPair &e1, const FieldPair &e2)
    {
        const double a = e1.norm(), b = e2.norm();
        if (!(a > 0.0 && b > 0.0))
            throw std::domain_error("polarization_nonorthogonality: zero-magnitude port");
        const cplx inner = e1.theta * std::conj(e2.theta) + e1.phi * std::conj(e2.phi);
        return std::min(1.0, std::abs(inner) / (a * b));
    }
}

#endif
