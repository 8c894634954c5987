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

#ifndef MIMOEFF_ENVIRONMENT_HPP
#define MIMOEFF_ENVIRONMENT_HPP

#include "farfield.hpp"
#include "rng.hpp"

#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

namespace mimoeff
{
    // Unit Jones vector in the (theta_hat, phi_hat) basis of the arrival direction
    struct Jones
    {
        cplx theta{1.0, 0.0};
        cplx phi{0.0, 0.0};

        double norm2() const noexcept { return std::norm(theta) + std::norm(phi); }
    };

    struct PlaneWave
    {
        Direction direction;
        Jones polarization;
        cplx amplitude{1.0, 0.0};
    };

    enum class EnvironmentKind
    {
        rimp,
        random_los
    };

    struct WaveSet
    {
        std::vector<PlaneWave> waves;
        EnvironmentKind environment = EnvironmentKind::rimp;
    };

    enum class PolarizationLaw
    {
        poincare, // uniform on the Poincare sphere (elliptical included)
        linear    // real Jones vector with uniform tilt angle
    };

    // Complex channel matrix H, rows = receive ports, columns = streams (1 or 2)
    class ChannelMatrix
    {
    public:
        ChannelMatrix() = default;
        ChannelMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

        std::size_t rows() const noexcept { return rows_; }
        std::size_t cols() const noexcept { return cols_; }
        cplx &operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
        const cplx &operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

        std::vector<cplx> column(std::size_t c) const
        {
            std::vector<cplx> out(rows_);
            for (std::size_t r = 0; r < rows_; ++r)
                out[r] = (*this)(r, c);
            return out;
        }

        bool operator==(const ChannelMatrix &) const = default;

    private:
        std::size_t rows_ = 0, cols_ = 0;
        std::vector<cplx> data_;
    };

    struct WaveOptions
    {
        PolarizationLaw polarization = PolarizationLaw::poincare;
        bool allow_sparse = false; // accept fewer than 100 waves
    };

    inline constexpr std::size_t min_rich_waves = 100;

    namespace detail
    {
        // Global phase fixed so the theta component is real and non-negative
        inline Jones fix_phase(cplx a, cplx b) noexcept
        {
            const double mag = std::abs(a);
            if (mag > 0.0)
            {
                const cplx rot = std::conj(a) / mag;
                return {cplx(mag, 0.0), b * rot};
            }
            const double mb = std::abs(b);
            return {cplx(0.0, 0.0), mb > 0.0 ? cplx(mb, 0.0) : cplx(1.0, 0.0)};
        }

        inline Jones draw_polarization(SubstreamRng &rng, PolarizationLaw law)
        {
            if (law == PolarizationLaw::linear)
            {
                const double tilt = rng.uniform(-0.5 * pi, 0.5 * pi);
                return {cplx(std::cos(tilt), 0.0), cplx(std::sin(tilt), 0.0)};
            }
            const cplx a = rng.complex_normal();
            const cplx b = rng.complex_normal();
            const double n = std::sqrt(std::norm(a) + std::norm(b));
            return fix_phase(a / n, b / n);
        }

        // phi uniform, cos(theta) uniform: uniform over the region's solid angle
        inline Direction draw_direction(SubstreamRng &rng, const CoverageRegion &c)
        {
            const double u = rng.uniform();
            const double v = rng.uniform();
            const double cos_hi = std::cos(c.theta_min), cos_lo = std::cos(c.theta_max);
            const double cos_t = std::clamp(cos_lo + u * (cos_hi - cos_lo), -1.0, 1.0);
            const double theta = std::clamp(std::acos(cos_t), c.theta_min, c.theta_max);
            return {theta, c.phi_min + v * (c.phi_max - c.phi_min)};
        }
    }

    // Orthogonal complement of a unit Jones vector, same phase convention
    inline Jones orthogonal_complement(const Jones &e) noexcept
    {
        return detail::fix_phase(-std::conj(e.phi), std::conj(e.theta));
    }

    inline Jones sample_polarization(SeedSpec seed, PolarizationLaw law = PolarizationLaw::poincare)
    {
        SubstreamRng rng(seed, Purpose::polarization);
        return detail::draw_polarization(rng, law);
    }

    // Independent rich-multipath wave sets, one per stream. Wave k of stream s uses its own substream
    // (seed, stream s, element k), so any wave can be regenerated in isolation.
    inline std::vector<WaveSet> sample_rimp_waveset(SeedSpec seed, const CoverageRegion &coverage, std::size_t n_waves,
                                                   std::size_t n_streams, const WaveOptions &options = {})
    {
        coverage.validate();
        if (n_streams != 1 && n_streams != 2)
            throw std::invalid_argument("sample_rimp_waveset: n_streams must be 1 or 2");
        if (n_waves == 0 || (n_waves < min_rich_waves && !options.allow_sparse))
            throw std::invalid_argument("sample_rimp_waveset: rich multipath needs at least 100 waves, got " +
                                        std::to_string(n_waves) + " (set the override to allow fewer)");
        const double variance = 1.0 / double(n_waves);
        std::vector<WaveSet> sets(n_streams);
        for (std::size_t s = 0; s < n_streams; ++s)
        {
            sets[s].environment = EnvironmentKind::rimp;
            sets[s].waves.reserve(n_waves);
            for (std::size_t k = 0; k < n_waves; ++k)
            {
                SubstreamRng rng(seed, Purpose::rimp_waves, std::uint32_t(s), std::uint32_t(k));
                PlaneWave w;
                w.direction = detail::draw_direction(rng, coverage);
                w.polarization = detail::draw_polarization(rng, options.polarization);
                w.amplitude = rng.complex_normal(variance);
                sets[s].waves.push_back(w);
            }
        }
        return sets;
    }

    struct LosDraw
    {
        Direction direction;
        Jones e1, e2; // orthonormal transmit polarizations
    };

    inline LosDraw sample_random_los(SeedSpec seed, const CoverageRegion &coverage, PolarizationLaw law = PolarizationLaw::poincare)
    {
        coverage.validate();
        SubstreamRng dir_rng(seed, Purpose::los_direction);
        SubstreamRng pol_rng(seed, Purpose::los_polarization);
        LosDraw d;
        d.direction = detail::draw_direction(dir_rng, coverage);
        d.e1 = detail::draw_polarization(pol_rng, law);
        d.e2 = orthogonal_complement(d.e1);
        return d;
    }

    // amplitude * (E_theta e_theta* + E_phi e_phi*)
    inline cplx received_voltage(const FieldPair &e, const PlaneWave &wave) noexcept
    {
        return wave.amplitude * (e.theta * std::conj(wave.polarization.theta) + e.phi * std::conj(wave.polarization.phi));
    }

    inline cplx received_voltage(const FieldPair &e, const Jones &pol) noexcept
    {
        return e.theta * std::conj(pol.theta) + e.phi * std::conj(pol.phi);
    }

    // H[p][s] = sum over the waves of stream s of the voltage induced at port p
    inline ChannelMatrix channel_matrix_rimp(const FarFieldGrid &antenna, const std::vector<WaveSet> &wavesets, double frequency_hz,
                                             Interpolation method = Interpolation::linear_theta_cubic_phi)
    {
        const std::size_t f = antenna.frequency_index(frequency_hz);
        ChannelMatrix h(antenna.n_ports(), wavesets.size());
        for (std::size_t s = 0; s < wavesets.size(); ++s)
            for (const PlaneWave &w : wavesets[s].waves)
                for (std::size_t p = 0; p < antenna.n_ports(); ++p)
                    h(p, s) += received_voltage(evaluate_farfield_at(antenna, p, f, w.direction, method), w);
        return h;
    }

    // The ideal reference has one matched branch per stream: H is diagonal with
    // H[s][s] = sqrt(g_ref) * sum of the amplitudes of stream s that arrive inside its coverage.
    inline ChannelMatrix channel_matrix_rimp(const ReferenceAntenna &ref, const std::vector<WaveSet> &wavesets, double /*frequency_hz*/ = 0.0)
    {
        const std::size_t n = wavesets.size();
        ChannelMatrix h(n, n);
        const double amp = std::sqrt(ref.gain);
        for (std::size_t s = 0; s < n; ++s)
        {
            cplx sum{};
            for (const PlaneWave &w : wavesets[s].waves)
                if (ref.covers(w.direction))
                    sum += w.amplitude;
            h(s, s) = amp * sum;
        }
        return h;
    }

    // Single wave from a fixed direction; stream s is transmitted on polarization e1 (s = 0) or e2 (s = 1)
    inline ChannelMatrix channel_matrix_rlos(const FarFieldGrid &antenna, const Direction &direction, const Jones &e1, const Jones &e2,
                                             double frequency_hz, std::size_t n_streams,
                                             Interpolation method = Interpolation::linear_theta_cubic_phi)
    {
        if (n_streams != 1 && n_streams != 2)
            throw std::invalid_argument("channel_matrix_rlos: n_streams must be 1 or 2");
        const std::size_t f = antenna.frequency_index(frequency_hz);
        ChannelMatrix h(antenna.n_ports(), n_streams);
        for (std::size_t p = 0; p < antenna.n_ports(); ++p)
        {
            const FieldPair e = evaluate_farfield_at(antenna, p, f, direction, method);
            h(p, 0) = received_voltage(e, e1);
            if (n_streams == 2)
                h(p, 1) = received_voltage(e, e2);
        }
        return h;
    }

    inline ChannelMatrix channel_matrix_rlos(const ReferenceAntenna &ref, const Direction &direction, const Jones &, const Jones &,
                                             double /*frequency_hz*/, std::size_t n_streams)
    {
        if (n_streams != 1 && n_streams != 2)
            throw std::invalid_argument("channel_matrix_rlos: n_streams must be 1 or 2");
        ChannelMatrix h(n_streams, n_streams);
        const double amp = std::sqrt(ref.power_gain(direction));
        for (std::size_t s = 0; s < n_streams; ++s)
            h(s, s) = amp;
        return h;
    }

    // Debug dump: realization,stream,port,re,im
    inline void write_realizations_csv(std::ostream &out, const std::vector<ChannelMatrix> &realizations)
    {
        out << "realization,stream,port,re,im\n";
        out.precision(17);
        for (std::size_t r = 0; r < realizations.size(); ++r)
            for (std::size_t s = 0; s < realizations[r].cols(); ++s)
                for (std::size_t p = 0; p < realizations[r].rows(); ++p)
                    out << r << ',' << s << ',' << p << ',' << realizations[r](p, s).real() << ',' << realizations[r](p, s).imag() << '\n';
    }
}

#endif
