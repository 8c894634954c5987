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

#ifndef MIMOEFF_EVALUATION_HPP
#define MIMOEFF_EVALUATION_HPP

#include "combining.hpp"
#include "environment.hpp"
#include "farfield.hpp"
#include "metrics.hpp"
#include "parallel.hpp"

#include <ostream>
#include <type_traits>
#include <vector>

namespace mimoeff
{
    // How two per-stream results merge into one 2-bitstream figure
    enum class TwoStreamRule
    {
        min_stream, // detection needs both streams: CDF of min(gamma1, gamma2)
        average_pod // mean of the two per-stream PoD curves
    };

    // Reference used for RIMP efficiencies
    enum class RimpReference
    {
        rayleigh, // matched reference in the same multipath: Rayleigh-faded power of mean g_ref
        constant  // non-fading reference of constant power g_ref
    };

    struct SimulationOptions
    {
        std::size_t realizations = 10000;
        std::size_t n_waves = 200;
        std::uint64_t seed = 1;
        WaveOptions waves{};
        Interpolation interpolation = Interpolation::linear_theta_cubic_phi;
        unsigned threads = 1;
    };

    struct EvaluationPolicy
    {
        double level = 0.95;
        TwoStreamRule two_stream_rule = TwoStreamRule::min_stream;
        RimpReference rimp_reference = RimpReference::rayleigh;
    };

    inline std::string to_string(EnvironmentKind e) { return e == EnvironmentKind::rimp ? "rimp" : "rlos"; }
    inline std::string to_string(StreamMode m) { return m == StreamMode::one_bitstream ? "1bs" : "2bs"; }

    // Detection samples of one antenna in one environment. For 2 streams the per-stream ZF powers are kept as well.
    struct DetectionSamples
    {
        PowerSampleSet detection;
        PowerSampleSet stream1, stream2;
    };

    namespace detail
    {
        template <class AntennaT>
        std::size_t antenna_ports(const AntennaT &a, StreamMode mode)
        {
            if constexpr (std::is_same_v<AntennaT, ReferenceAntenna>)
                return stream_count(mode);
            else
                return a.n_ports();
        }

        template <class AntennaT>
        ChannelMatrix realization(const AntennaT &antenna, EnvironmentKind env, StreamMode mode, const CoverageRegion &coverage,
                                  double frequency_hz, const SimulationOptions &opt, std::size_t r)
        {
            const SeedSpec seed{opt.seed, r};
            const std::size_t ns = stream_count(mode);
            if (env == EnvironmentKind::rimp)
            {
                const auto sets = sample_rimp_waveset(seed, coverage, opt.n_waves, ns, opt.waves);
                if constexpr (std::is_same_v<AntennaT, ReferenceAntenna>)
                    return channel_matrix_rimp(antenna, sets, frequency_hz);
                else
                    return channel_matrix_rimp(antenna, sets, frequency_hz, opt.interpolation);
            }
            const LosDraw d = sample_random_los(seed, coverage, opt.waves.polarization);
            if constexpr (std::is_same_v<AntennaT, ReferenceAntenna>)
                return channel_matrix_rlos(antenna, d.direction, d.e1, d.e2, frequency_hz, ns);
            else
                return channel_matrix_rlos(antenna, d.direction, d.e1, d.e2, frequency_hz, ns, opt.interpolation);
        }
    }

    // Channel realizations r = 0..M-1 for the given seed, e.g. for debug dumps
    template <class AntennaT>
    std::vector<ChannelMatrix> simulate_channels(const AntennaT &antenna, EnvironmentKind env, StreamMode mode, const CoverageRegion &coverage,
                                                 double frequency_hz, const SimulationOptions &opt, std::size_t count)
    {
        std::vector<ChannelMatrix> out(count);
        parallel_for(count, opt.threads, [&](std::size_t r)
                     { out[r] = detail::realization(antenna, env, mode, coverage, frequency_hz, opt, r); });
        return out;
    }

    // Monte-Carlo detection samples. Realization r depends only on (seed, r), so results are identical for
    // any thread count, and two antennas simulated with the same options see the same environment draws.
    template <class AntennaT>
    DetectionSamples simulate_detection(const AntennaT &antenna, EnvironmentKind env, StreamMode mode, const CoverageRegion &coverage,
                                        double frequency_hz, const SimulationOptions &opt)
    {
        coverage.validate();
        if (mode == StreamMode::two_bitstream && detail::antenna_ports(antenna, mode) < 2)
            throw std::invalid_argument("2-bitstream evaluation needs an antenna with at least 2 ports");
        if constexpr (!std::is_same_v<AntennaT, ReferenceAntenna>)
            antenna.frequency_index(frequency_hz);

        const std::size_t m = opt.realizations;
        std::vector<double> det(m), s1, s2;
        if (mode == StreamMode::two_bitstream)
        {
            s1.resize(m);
            s2.resize(m);
        }
        parallel_for(m, opt.threads, [&](std::size_t r)
                     {
            const ChannelMatrix h = detail::realization(antenna, env, mode, coverage, frequency_hz, opt, r);
            const auto g = stream_powers(h, mode);
            if (mode == StreamMode::one_bitstream)
                det[r] = g[0];
            else
            {
                s1[r] = g[0];
                s2[r] = g[1];
                det[r] = std::min(g[0], g[1]);
            } });

        DetectionSamples out;
        out.detection = PowerSampleSet(std::move(det));
        if (mode == StreamMode::two_bitstream)
        {
            out.stream1 = PowerSampleSet(std::move(s1));
            out.stream2 = PowerSampleSet(std::move(s2));
        }
        return out;
    }

    inline DetectionSamples constant_samples(double value, std::size_t m, StreamMode mode)
    {
        DetectionSamples out;
        out.detection = PowerSampleSet(std::vector<double>(m, value));
        if (mode == StreamMode::two_bitstream)
        {
            out.stream1 = out.detection;
            out.stream2 = out.detection;
        }
        return out;
    }

    // Samples of the ideal reference for the region. Random-LOS (and the constant RIMP variant) is a
    // non-fading reference of power g_ref; the Rayleigh RIMP reference uses the same wave draws as the AUT.
    inline DetectionSamples reference_samples(const CoverageRegion &coverage, EnvironmentKind env, StreamMode mode,
                                              const SimulationOptions &opt, const EvaluationPolicy &policy = {})
    {
        const ReferenceAntenna ref = reference_farfield(coverage);
        if (env == EnvironmentKind::random_los || policy.rimp_reference == RimpReference::constant)
            return constant_samples(ref.gain, opt.realizations, mode);
        return simulate_detection(ref, env, mode, coverage, 0.0, opt);
    }

    inline EfficiencyResult efficiency_from_samples(const DetectionSamples &aut, const DetectionSamples &ref, StreamMode mode,
                                                    const EvaluationPolicy &policy = {})
    {
        if (mode == StreamMode::two_bitstream && policy.two_stream_rule == TwoStreamRule::average_pod)
            return efficiency_from_requirements(pod_inverse_average(ref.stream1, ref.stream2, policy.level),
                                                pod_inverse_average(aut.stream1, aut.stream2, policy.level));
        return mimo_efficiency(aut.detection, ref.detection, policy.level);
    }

    template <class AntennaT>
    EfficiencyResult evaluate_efficiency(const AntennaT &antenna, EnvironmentKind env, StreamMode mode, const CoverageRegion &coverage,
                                         double frequency_hz, const SimulationOptions &opt, const EvaluationPolicy &policy = {})
    {
        const DetectionSamples aut = simulate_detection(antenna, env, mode, coverage, frequency_hz, opt);
        return efficiency_from_samples(aut, reference_samples(coverage, env, mode, opt, policy), mode, policy);
    }

    struct EfficiencyEntry
    {
        double frequency_hz;
        StreamMode mode;
        EnvironmentKind environment;
        EfficiencyResult result;
    };

    using EfficiencyReport = std::vector<EfficiencyEntry>;

    // Efficiencies for every frequency x mode x environment; the reference is simulated once per (env, mode).
    template <class AntennaT>
    EfficiencyReport evaluate_report(const AntennaT &antenna, const std::vector<double> &frequencies, const std::vector<StreamMode> &modes,
                                     const std::vector<EnvironmentKind> &environments, const CoverageRegion &coverage,
                                     const SimulationOptions &opt, const EvaluationPolicy &policy = {})
    {
        EfficiencyReport report;
        for (EnvironmentKind env : environments)
            for (StreamMode mode : modes)
            {
                const DetectionSamples ref = reference_samples(coverage, env, mode, opt, policy);
                for (double f : frequencies)
                {
                    const DetectionSamples aut = simulate_detection(antenna, env, mode, coverage, f, opt);
                    report.push_back({f, mode, env, efficiency_from_samples(aut, ref, mode, policy)});
                }
            }
        return report;
    }

    inline void write_efficiency_csv(std::ostream &out, const EfficiencyReport &report)
    {
        out << "freq_hz,mode,env,eff_linear,eff_db\n";
        out.precision(10);
        for (const auto &e : report)
            out << e.frequency_hz << ',' << to_string(e.mode) << ',' << to_string(e.environment) << ',' << e.result.linear << ','
                << e.result.db() << '\n';
    }

    // Scalar field over display directions inside a coverage region
    struct DirectionMap
    {
        struct Cell
        {
            double theta_deg, phi_deg, value;
        };
        std::vector<Cell> cells;
        std::size_t flagged = 0; // cells whose value is not finite
    };

    // Display directions on a step x step degree lattice (multiples of step) inside the region, theta-major
    inline std::vector<Direction> display_directions(const CoverageRegion &coverage, double step_deg, std::vector<std::pair<double, double>> *degrees = nullptr)
    {
        coverage.validate();
        if (!(step_deg > 0.0))
            throw std::invalid_argument("display step must be positive");
        const double eps = 1e-9;
        const auto t0 = long(std::ceil(rad_to_deg(coverage.theta_min) / step_deg - eps));
        const auto t1 = long(std::floor(rad_to_deg(coverage.theta_max) / step_deg + eps));
        const auto p0 = long(std::ceil(rad_to_deg(coverage.phi_min) / step_deg - eps));
        auto p1 = long(std::floor(rad_to_deg(coverage.phi_max) / step_deg + eps));
        if (coverage.phi_max - coverage.phi_min >= 2.0 * pi - 1e-12 && double(p1 - p0) * step_deg >= 360.0 - eps)
            --p1; // full turn: do not repeat the seam
        std::vector<Direction> dirs;
        for (long i = t0; i <= t1; ++i)
            for (long j = p0; j <= p1; ++j)
            {
                const double td = double(i) * step_deg, pd = double(j) * step_deg;
                dirs.push_back(Direction::from_degrees(std::min(td, 180.0), pd));
                if (degrees)
                    degrees->push_back({td, pd});
            }
        return dirs;
    }

    // Random-LOS efficiency per arrival direction: at each fixed AoA only the polarization is random.
    // Values are relative to the region-wide (constant) reference and may exceed 1.
    template <class AntennaT>
    DirectionMap coverage_map(const AntennaT &antenna, double frequency_hz, StreamMode mode, const CoverageRegion &coverage,
                              double display_step_deg, std::size_t n_pol_realizations, const EvaluationPolicy &policy = {},
                              const SimulationOptions &opt = {})
    {
        if (n_pol_realizations < min_quantile_samples)
            throw std::invalid_argument("coverage_map: at least 1000 polarization realizations are required");
        if (mode == StreamMode::two_bitstream && detail::antenna_ports(antenna, mode) < 2)
            throw std::invalid_argument("2-bitstream coverage map needs an antenna with at least 2 ports");
        if constexpr (!std::is_same_v<AntennaT, ReferenceAntenna>)
            antenna.frequency_index(frequency_hz);

        std::vector<std::pair<double, double>> deg;
        const auto dirs = display_directions(coverage, display_step_deg, &deg);
        const ReferenceAntenna ref = reference_farfield(coverage);
        const std::size_t ns = stream_count(mode);

        // the same polarization draws at every direction
        std::vector<std::pair<Jones, Jones>> pols(n_pol_realizations);
        for (std::size_t r = 0; r < n_pol_realizations; ++r)
        {
            SubstreamRng rng(SeedSpec{opt.seed, r}, Purpose::map_polarization);
            const Jones e1 = detail::draw_polarization(rng, opt.waves.polarization);
            pols[r] = {e1, orthogonal_complement(e1)};
        }
        const DetectionSamples ref_samples = constant_samples(ref.gain, n_pol_realizations, mode);

        DirectionMap map;
        map.cells.resize(dirs.size());
        parallel_for(dirs.size(), opt.threads, [&](std::size_t c)
                     {
            std::vector<double> det(n_pol_realizations), s1, s2;
            if (mode == StreamMode::two_bitstream)
            {
                s1.resize(n_pol_realizations);
                s2.resize(n_pol_realizations);
            }
            for (std::size_t r = 0; r < n_pol_realizations; ++r)
            {
                ChannelMatrix h;
                if constexpr (std::is_same_v<AntennaT, ReferenceAntenna>)
                    h = channel_matrix_rlos(antenna, dirs[c], pols[r].first, pols[r].second, frequency_hz, ns);
                else
                    h = channel_matrix_rlos(antenna, dirs[c], pols[r].first, pols[r].second, frequency_hz, ns, opt.interpolation);
                const auto g = stream_powers(h, mode);
                det[r] = mode == StreamMode::one_bitstream ? g[0] : std::min(g[0], g[1]);
                if (mode == StreamMode::two_bitstream)
                {
                    s1[r] = g[0];
                    s2[r] = g[1];
                }
            }
            DetectionSamples aut;
            aut.detection = PowerSampleSet(std::move(det));
            if (mode == StreamMode::two_bitstream)
            {
                aut.stream1 = PowerSampleSet(std::move(s1));
                aut.stream2 = PowerSampleSet(std::move(s2));
            }
            map.cells[c] = {deg[c].first, deg[c].second, efficiency_from_samples(aut, ref_samples, mode, policy).linear}; });
        return map;
    }

    // Amplitude-imbalance (linear) and polarization non-orthogonality maps of a port pair
    inline std::pair<DirectionMap, DirectionMap> deficiency_maps(const FarFieldGrid &antenna, double frequency_hz, const CoverageRegion &coverage,
                                                                 double display_step_deg, std::size_t port_a = 0, std::size_t port_b = 1,
                                                                 Interpolation method = Interpolation::linear_theta_cubic_phi)
    {
        if (antenna.n_ports() < 2)
            throw std::invalid_argument("deficiency maps need an antenna with at least 2 ports");
        if (port_a == port_b)
            throw std::invalid_argument("deficiency maps need two distinct ports");
        antenna.check_port(port_a);
        antenna.check_port(port_b);
        const std::size_t f = antenna.frequency_index(frequency_hz);
        std::vector<std::pair<double, double>> deg;
        const auto dirs = display_directions(coverage, display_step_deg, &deg);
        DirectionMap ia, ip;
        ia.cells.reserve(dirs.size());
        ip.cells.reserve(dirs.size());
        for (std::size_t c = 0; c < dirs.size(); ++c)
        {
            const FieldPair e1 = evaluate_farfield_at(antenna, port_a, f, dirs[c], method);
            const FieldPair e2 = evaluate_farfield_at(antenna, port_b, f, dirs[c], method);
            const double a = amplitude_imbalance(e1, e2);
            double p = std::numeric_limits<double>::quiet_NaN();
            if (std::isfinite(a))
                p = polarization_nonorthogonality(e1, e2);
            else
            {
                ++ia.flagged;
                ++ip.flagged;
            }
            ia.cells.push_back({deg[c].first, deg[c].second, a});
            ip.cells.push_back({deg[c].first, deg[c].second, p});
        }
        return {std::move(ia), std::move(ip)};
    }

    // Solid-angle weighted mean of the finite map values
    inline double map_solid_angle_mean(const DirectionMap &map)
    {
        double sw = 0.0, s = 0.0;
        for (const auto &c : map.cells)
            if (std::isfinite(c.value))
            {
                const double w = std::sin(deg_to_rad(c.theta_deg));
                sw += w;
                s += w * c.value;
            }
        return sw > 0.0 ? s / sw : 0.0;
    }

    // theta_deg,phi_deg,<column>; in_db converts linear values with 10 log10
    inline void write_map_csv(std::ostream &out, const DirectionMap &map, bool in_db = true)
    {
        out << "theta_deg,phi_deg," << (in_db ? "value_db" : "value") << '\n';
        out.precision(10);
        for (const auto &c : map.cells)
            out << c.theta_deg << ',' << c.phi_deg << ',' << (in_db ? to_db(c.value) : c.value) << '\n';
    }
}

#endif
