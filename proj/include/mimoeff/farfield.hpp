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

#ifndef MIMOEFF_FARFIELD_HPP
#define MIMOEFF_FARFIELD_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace mimoeff
{
    using cplx = std::complex<double>;

    inline constexpr double pi = std::numbers::pi;
    inline constexpr double deg_to_rad(double deg) noexcept { return deg * (pi / 180.0); }
    inline constexpr double rad_to_deg(double rad) noexcept { return rad * (180.0 / pi); }

    // Wraps an angle into [-pi, pi)
    inline double wrap_phi(double phi) noexcept
    {
        double w = std::fmod(phi + pi, 2.0 * pi);
        if (w < 0.0)
            w += 2.0 * pi;
        w -= pi;
        return w >= pi ? -pi : w;
    }

    // Spherical direction in radians: theta in [0, pi], phi in [-pi, pi)
    struct Direction
    {
        double theta = 0.0;
        double phi = 0.0;

        Direction() = default;
        Direction(double theta_rad, double phi_rad) : theta(theta_rad), phi(wrap_phi(phi_rad))
        {
            if (!(theta >= -1e-12 && theta <= pi + 1e-12))
                throw std::invalid_argument("Direction: theta must lie in [0, pi], got " + std::to_string(theta_rad));
            theta = std::clamp(theta, 0.0, pi);
        }

        static Direction from_degrees(double theta_deg, double phi_deg) { return {deg_to_rad(theta_deg), deg_to_rad(phi_deg)}; }
    };

    // Angular sector (radians). Solid angle = (phi_max - phi_min) * (cos theta_min - cos theta_max).
    struct CoverageRegion
    {
        double theta_min = 0.0;
        double theta_max = pi;
        double phi_min = -pi;
        double phi_max = pi;

        static CoverageRegion full_sphere() noexcept { return {0.0, pi, -pi, pi}; }

        // 120 x 120 degree sector around theta = 90 deg, phi = 0 (the +x axis)
        static CoverageRegion sector_120() noexcept { return {pi / 6.0, 5.0 * pi / 6.0, -pi / 3.0, pi / 3.0}; }

        static CoverageRegion from_degrees(double t0, double t1, double p0, double p1)
        {
            return CoverageRegion{deg_to_rad(t0), deg_to_rad(t1), deg_to_rad(p0), deg_to_rad(p1)}.validated();
        }

        double solid_angle() const noexcept { return (phi_max - phi_min) * (std::cos(theta_min) - std::cos(theta_max)); }

        void validate() const
        {
            if (!(theta_min >= 0.0 && theta_min < theta_max && theta_max <= pi))
                throw std::invalid_argument("CoverageRegion: need 0 <= theta_min < theta_max <= pi");
            if (!(phi_min < phi_max && phi_max - phi_min <= 2.0 * pi + 1e-12))
                throw std::invalid_argument("CoverageRegion: need phi_min < phi_max and a span of at most 2 pi");
            if (!(solid_angle() > 0.0))
                throw std::invalid_argument("CoverageRegion: degenerate region (zero solid angle)");
        }

        CoverageRegion validated() const
        {
            validate();
            return *this;
        }

        bool contains(const Direction &d, double tol = 1e-12) const noexcept
        {
            if (d.theta < theta_min - tol || d.theta > theta_max + tol)
                return false;
            const double span = phi_max - phi_min;
            if (span >= 2.0 * pi - tol)
                return true;
            double offset = std::fmod(d.phi - phi_min, 2.0 * pi);
            if (offset < 0.0)
                offset += 2.0 * pi;
            return offset <= span + tol || offset >= 2.0 * pi - tol;
        }
    };

    // Far-field components (E_theta, E_phi) in gain-normalized units: |E|^2 is the gain relative to isotropic.
    struct FieldPair
    {
        cplx theta{};
        cplx phi{};

        double norm2() const noexcept { return std::norm(theta) + std::norm(phi); }
        double norm() const noexcept { return std::sqrt(norm2()); }
        FieldPair operator*(double s) const noexcept { return {theta * s, phi * s}; }
        FieldPair operator*(cplx s) const noexcept { return {theta * s, phi * s}; }
        bool operator==(const FieldPair &) const = default;
    };

    enum class Interpolation
    {
        bilinear,                // linear in theta and phi
        linear_theta_cubic_phi   // linear in theta, periodic 4-point Lagrange in phi
    };

    // Sampled far field of all antenna ports on a regular (theta, phi) grid at one or more frequencies.
    // theta covers [0, 180] deg inclusive, phi covers [0, 360) deg with periodic wrap. Storage is
    // (port, frequency, theta, phi) with phi fastest. Each (port, frequency) carries the declared
    // total embedded efficiency e_tot.
    class FarFieldGrid
    {
    public:
        FarFieldGrid() = default;

        FarFieldGrid(std::size_t ports, std::vector<double> frequencies_hz, double theta_step_deg, double phi_step_deg)
            : ports_(ports), frequencies_(std::move(frequencies_hz)), theta_step_(theta_step_deg), phi_step_(phi_step_deg)
        {
            if (ports_ == 0)
                throw std::invalid_argument("FarFieldGrid: at least one port is required");
            if (frequencies_.empty())
                throw std::invalid_argument("FarFieldGrid: at least one frequency is required");
            for (double f : frequencies_)
                if (!(f > 0.0) || !std::isfinite(f))
                    throw std::invalid_argument("FarFieldGrid: frequencies must be positive and finite");
            n_theta_ = steps_in(180.0, theta_step_, "theta_step") + 1;
            n_phi_ = steps_in(360.0, phi_step_, "phi_step");
            samples_.assign(ports_ * frequencies_.size() * n_theta_ * n_phi_, FieldPair{});
            e_tot_.assign(ports_ * frequencies_.size(), 1.0);
        }

        std::size_t n_ports() const noexcept { return ports_; }
        std::size_t n_frequencies() const noexcept { return frequencies_.size(); }
        std::size_t n_theta() const noexcept { return n_theta_; }
        std::size_t n_phi() const noexcept { return n_phi_; }
        double theta_step_deg() const noexcept { return theta_step_; }
        double phi_step_deg() const noexcept { return phi_step_; }
        const std::vector<double> &frequencies() const noexcept { return frequencies_; }
        double theta_deg(std::size_t i) const noexcept { return double(i) * theta_step_; }
        double phi_deg(std::size_t j) const noexcept { return double(j) * phi_step_; }

        // Index of a frequency in the grid's list (relative tolerance 1e-9)
        std::size_t frequency_index(double frequency_hz) const
        {
            for (std::size_t k = 0; k < frequencies_.size(); ++k)
                if (std::abs(frequencies_[k] - frequency_hz) <= 1e-9 * frequencies_[k])
                    return k;
            throw std::out_of_range("FarFieldGrid: frequency " + std::to_string(frequency_hz) + " Hz is not in the grid");
        }

        void check_port(std::size_t port) const
        {
            if (port >= ports_)
                throw std::out_of_range("FarFieldGrid: port " + std::to_string(port) + " out of range (grid has " +
                                        std::to_string(ports_) + ")");
        }

        FieldPair &at(std::size_t port, std::size_t freq_index, std::size_t i, std::size_t j) noexcept
        {
            return samples_[index(port, freq_index, i, j)];
        }
        const FieldPair &at(std::size_t port, std::size_t freq_index, std::size_t i, std::size_t j) const noexcept
        {
            return samples_[index(port, freq_index, i, j)];
        }

        double e_tot(std::size_t port, std::size_t freq_index) const noexcept { return e_tot_[port * frequencies_.size() + freq_index]; }
        void set_e_tot(std::size_t port, std::size_t freq_index, double value)
        {
            if (!(value > 0.0 && value <= 1.0))
                throw std::invalid_argument("FarFieldGrid: efficiency out of (0,1]: " + std::to_string(value));
            e_tot_[port * frequencies_.size() + freq_index] = value;
        }

        const std::vector<FieldPair> &samples() const noexcept { return samples_; }

        bool operator==(const FarFieldGrid &) const = default;

    private:
        static std::size_t steps_in(double range, double step, const char *name)
        {
            if (!(step > 0.0) || !std::isfinite(step))
                throw std::invalid_argument(std::string("FarFieldGrid: ") + name + " must be positive");
            const double n = range / step;
            const double rounded = std::round(n);
            if (rounded < 1.0 || std::abs(n - rounded) > 1e-9 * rounded)
                throw std::invalid_argument(std::string("FarFieldGrid: ") + name + " " + std::to_string(step) +
                                            " does not divide " + std::to_string(range) + " deg exactly");
            return std::size_t(rounded);
        }

        std::size_t index(std::size_t port, std::size_t f, std::size_t i, std::size_t j) const noexcept
        {
            return ((port * frequencies_.size() + f) * n_theta_ + i) * n_phi_ + j;
        }

        std::size_t ports_ = 0;
        std::vector<double> frequencies_;
        double theta_step_ = 0.0;
        double phi_step_ = 0.0;
        std::size_t n_theta_ = 0;
        std::size_t n_phi_ = 0;
        std::vector<FieldPair> samples_;
        std::vector<double> e_tot_;
    };

    namespace detail
    {
        // Splits a fractional grid coordinate into a cell index and offset. Coordinates within 1e-9 of a node
        // snap onto it, so queries at nodes (after a degree/radian round trip) return stored samples exactly.
        inline void split_coordinate(double t, std::size_t &cell, double &frac) noexcept
        {
            const double r = std::round(t);
            if (std::abs(t - r) < 1e-9)
                t = r;
            const double fl = std::floor(t);
            cell = std::size_t(fl);
            frac = t - fl;
        }

        inline void lagrange4(double t, double w[4]) noexcept
        {
            // nodes at -1, 0, 1, 2
            w[0] = -t * (t - 1.0) * (t - 2.0) / 6.0;
            w[1] = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
            w[2] = -(t + 1.0) * t * (t - 2.0) / 2.0;
            w[3] = (t + 1.0) * t * (t - 1.0) / 6.0;
        }
    }

    // Interpolated far field of one port at a direction; exact at grid nodes, periodic in phi.
    inline FieldPair evaluate_farfield_at(const FarFieldGrid &grid, std::size_t port, std::size_t freq_index, const Direction &d,
                                          Interpolation method = Interpolation::linear_theta_cubic_phi)
    {
        const std::size_t nt = grid.n_theta(), np = grid.n_phi();

        std::size_t i0;
        double ft;
        detail::split_coordinate(rad_to_deg(d.theta) / grid.theta_step_deg(), i0, ft);
        if (i0 >= nt - 1)
        {
            i0 = nt - 2;
            ft = 1.0;
        }

        double phi_deg = rad_to_deg(d.phi);
        if (phi_deg < 0.0)
            phi_deg += 360.0;
        std::size_t j0;
        double fp;
        detail::split_coordinate(phi_deg / grid.phi_step_deg(), j0, fp);
        j0 %= np;

        auto along_phi = [&](std::size_t i) -> FieldPair
        {
            if (fp == 0.0)
                return grid.at(port, freq_index, i, j0);
            if (method == Interpolation::bilinear || np < 4)
            {
                const FieldPair &a = grid.at(port, freq_index, i, j0);
                const FieldPair &b = grid.at(port, freq_index, i, (j0 + 1) % np);
                return {a.theta * (1.0 - fp) + b.theta * fp, a.phi * (1.0 - fp) + b.phi * fp};
            }
            double w[4];
            detail::lagrange4(fp, w);
            FieldPair out{};
            for (int k = 0; k < 4; ++k)
            {
                const std::size_t j = (j0 + np + std::size_t(k) - 1) % np;
                const FieldPair &s = grid.at(port, freq_index, i, j);
                out.theta += s.theta * w[k];
                out.phi += s.phi * w[k];
            }
            return out;
        };

        const FieldPair a = along_phi(i0);
        if (ft == 0.0)
            return a;
        const FieldPair b = along_phi(i0 + 1);
        if (ft == 1.0)
            return b;
        return {a.theta * (1.0 - ft) + b.theta * ft, a.phi * (1.0 - ft) + b.phi * ft};
    }

    inline FieldPair evaluate_farfield(const FarFieldGrid &grid, std::size_t port, double frequency_hz, const Direction &d,
                                       Interpolation method = Interpolation::linear_theta_cubic_phi)
    {
        grid.check_port(port);
        return evaluate_farfield_at(grid, port, grid.frequency_index(frequency_hz), d, method);
    }

    // (1/4 pi) * surface integral of |E|^2: trapezoid in theta with sin(theta) weight, rectangle rule in phi
    inline double total_radiated_efficiency_at(const FarFieldGrid &grid, std::size_t port, std::size_t freq_index)
    {
        const double dt = deg_to_rad(grid.theta_step_deg());
        const double dp = deg_to_rad(grid.phi_step_deg());
        double sum = 0.0;
        for (std::size_t i = 0; i < grid.n_theta(); ++i)
        {
            double w = std::sin(deg_to_rad(grid.theta_deg(i)));
            if (i == 0 || i + 1 == grid.n_theta())
                w *= 0.5;
            double ring = 0.0;
            for (std::size_t j = 0; j < grid.n_phi(); ++j)
                ring += grid.at(port, freq_index, i, j).norm2();
            sum += w * ring;
        }
        return sum * dt * dp / (4.0 * pi);
    }

    inline double total_radiated_efficiency(const FarFieldGrid &grid, std::size_t port, double frequency_hz)
    {
        grid.check_port(port);
        return total_radiated_efficiency_at(grid, port, grid.frequency_index(frequency_hz));
    }

    // Scales one (port, frequency) slice by a positive real factor so its radiated integral equals target_e_tot.
    inline FarFieldGrid normalize_farfield(FarFieldGrid grid, std::size_t port, double frequency_hz, double target_e_tot)
    {
        grid.check_port(port);
        if (!(target_e_tot > 0.0 && target_e_tot <= 1.0))
            throw std::invalid_argument("normalize_farfield: target efficiency out of (0,1]");
        const std::size_t f = grid.frequency_index(frequency_hz);
        const double current = total_radiated_efficiency_at(grid, port, f);
        if (!(current > 0.0) || !std::isfinite(current))
            throw std::invalid_argument("normalize_farfield: zero-power pattern cannot be normalized");
        const double scale = std::sqrt(target_e_tot / current);
        if (scale != 1.0)
            for (std::size_t i = 0; i < grid.n_theta(); ++i)
                for (std::size_t j = 0; j < grid.n_phi(); ++j)
                    grid.at(port, f, i, j) = grid.at(port, f, i, j) * scale;
        grid.set_e_tot(port, f, target_e_tot);
        return grid;
    }

    // Normalizes every (port, frequency) slice to its declared e_tot.
    inline FarFieldGrid normalize_to_declared(FarFieldGrid grid)
    {
        for (std::size_t p = 0; p < grid.n_ports(); ++p)
            for (std::size_t f = 0; f < grid.n_frequencies(); ++f)
                grid = normalize_farfield(std::move(grid), p, grid.frequencies()[f], grid.e_tot(p, f));
        return grid;
    }

    // Ideal reference: polarization-matched to every incident wave, constant gain 4 pi / Omega inside the
    // coverage region and zero outside. It has no Jones-vector representation, so it is kept analytic.
    struct ReferenceAntenna
    {
        CoverageRegion coverage;
        double gain = 1.0;

        bool covers(const Direction &d) const noexcept { return coverage.contains(d); }
        double power_gain(const Direction &d) const noexcept { return covers(d) ? gain : 0.0; }
    };

    inline ReferenceAntenna reference_farfield(const CoverageRegion &coverage)
    {
        coverage.validate();
        return {coverage, 4.0 * pi / coverage.solid_angle()};
    }

    enum class ModelKind
    {
        hertzian_dipole_z,          // no parameters
        crossed_dipoles_over_ground, // [height] or [height, separation], in wavelengths
        isotropic_copol,            // no parameters, one port, E = (1, 0)
        isotropic_dualpol           // no parameters, two ports, E1 = (1, 0), E2 = (0, 1)
    };

    inline std::string to_string(ModelKind k)
    {
        switch (k)
        {
        case ModelKind::hertzian_dipole_z:
            return "hertzian-dipole-z";
        case ModelKind::crossed_dipoles_over_ground:
            return "crossed-dipoles-over-ground";
        case ModelKind::isotropic_copol:
            return "isotropic-copol";
        case ModelKind::isotropic_dualpol:
            return "isotropic-dualpol";
        }
        return "unknown";
    }

    inline ModelKind parse_model_kind(const std::string &s)
    {
        for (ModelKind k : {ModelKind::hertzian_dipole_z, ModelKind::crossed_dipoles_over_ground, ModelKind::isotropic_copol,
                            ModelKind::isotropic_dualpol})
            if (to_string(k) == s)
                return k;
        throw std::invalid_argument("unknown antenna model '" + s + "'");
    }

    // Closed-form surrogate antenna. For crossed dipoles the ground plane is x = 0 and the elements
    // (port 0 along z, port 1 along y) sit at height h in front of it, so broadside is +x.
    // Lengths are in wavelengths at reference_frequency_hz (or at every frequency when it is 0).
    struct AnalyticModel
    {
        ModelKind kind = ModelKind::isotropic_copol;
        std::vector<double> parameters;
        double e_tot = 1.0;
        double reference_frequency_hz = 0.0;

        std::size_t n_ports() const noexcept
        {
            return (kind == ModelKind::crossed_dipoles_over_ground || kind == ModelKind::isotropic_dualpol) ? 2 : 1;
        }

        void validate() const
        {
            const std::size_t n = parameters.size();
            const bool count_ok = kind == ModelKind::crossed_dipoles_over_ground ? (n == 1 || n == 2) : n == 0;
            if (!count_ok)
                throw std::invalid_argument("AnalyticModel: wrong parameter count for " + to_string(kind));
            for (double p : parameters)
                if (!(p > 0.0) || !std::isfinite(p))
                    throw std::invalid_argument("AnalyticModel: heights and separations must be positive");
            if (!(e_tot > 0.0 && e_tot <= 1.0))
                throw std::invalid_argument("AnalyticModel: efficiency out of (0,1]");
            if (reference_frequency_hz < 0.0)
                throw std::invalid_argument("AnalyticModel: negative reference frequency");
        }
    };

    namespace detail
    {
        struct Vec3
        {
            double x, y, z;
        };
        inline double dot(const Vec3 &a, const Vec3 &b) noexcept { return a.x * b.x + a.y * b.y + a.z * b.z; }

        // Transverse field of a short dipole along unit vector u, sign chosen so a z-dipole gives E_theta = +sin(theta)
        inline FieldPair short_dipole(const Vec3 &u, const Vec3 &theta_hat, const Vec3 &phi_hat) noexcept
        {
            return {cplx(-dot(u, theta_hat), 0.0), cplx(-dot(u, phi_hat), 0.0)};
        }

        // Unnormalized closed-form pattern of one port
        inline FieldPair analytic_pattern(const AnalyticModel &m, std::size_t port, double frequency_hz, double theta, double phi)
        {
            const double st = std::sin(theta), ct = std::cos(theta), sp = std::sin(phi), cp = std::cos(phi);
            switch (m.kind)
            {
            case ModelKind::hertzian_dipole_z:
                return {cplx(st, 0.0), cplx(0.0, 0.0)};
            case ModelKind::isotropic_copol:
                return {cplx(1.0, 0.0), cplx(0.0, 0.0)};
            case ModelKind::isotropic_dualpol:
                return port == 0 ? FieldPair{cplx(1.0, 0.0), cplx(0.0, 0.0)} : FieldPair{cplx(0.0, 0.0), cplx(1.0, 0.0)};
            case ModelKind::crossed_dipoles_over_ground:
            {
                const double scale = m.reference_frequency_hz > 0.0 ? frequency_hz / m.reference_frequency_hz : 1.0;
                const double h = m.parameters[0] * scale;
                const double s = m.parameters.size() > 1 ? m.parameters[1] * scale : 0.0;
                const Vec3 r_hat{st * cp, st * sp, ct};
                const double cos_normal = r_hat.x;
                if (cos_normal <= 0.0)
                    return {};
                const Vec3 theta_hat{ct * cp, ct * sp, -st};
                const Vec3 phi_hat{-sp, cp, 0.0};
                // image theory: element at height h over a perfect conductor, horizontal to the plane
                const double array_factor = 2.0 * std::sin(2.0 * pi * h * cos_normal);
                const Vec3 axis = port == 0 ? Vec3{0.0, 0.0, 1.0} : Vec3{0.0, 1.0, 0.0};
                const double offset_z = port == 0 ? 0.5 * s : -0.5 * s;
                const cplx phase = std::polar(1.0, 2.0 * pi * offset_z * ct);
                const FieldPair e = short_dipole(axis, theta_hat, phi_hat);
                return {e.theta * array_factor * phase, e.phi * array_factor * phase};
            }
            }
            return {};
        }
    }

    namespace detail
    {
        // (1/4pi) * integral of |analytic_pattern|^2 over the sphere, in closed form
        inline double analytic_radiated_fraction(const AnalyticModel &m, double frequency_hz)
        {
            switch (m.kind)
            {
            case ModelKind::hertzian_dipole_z:
                return 2.0 / 3.0;
            case ModelKind::isotropic_copol:
            case ModelKind::isotropic_dualpol:
                return 1.0;
            case ModelKind::crossed_dipoles_over_ground:
                break;
            }
            // Polar axis along the ground normal with mu = cos(angle to normal): the element factor
            // averages to pi (1 + mu^2) over azimuth, so the half-space integral of 4 sin^2(k h mu)
            // times it reduces to pi (8/3 - g(x)) with x = 2 k h and
            // g(x) = 4 (sin x / x + cos x / x^2 - sin x / x^3).
            const double scale = m.reference_frequency_hz > 0.0 ? frequency_hz / m.reference_frequency_hz : 1.0;
            const double x = 4.0 * pi * m.parameters[0] * scale;
            double bracket;
            if (x < 0.05)
            {
                const double x2 = x * x;
                bracket = x2 * (8.0 / 15.0 - x2 * (1.0 / 35.0 - x2 * (2.0 / 2835.0)));
            }
            else
                bracket = 8.0 / 3.0 - 4.0 * (std::sin(x) / x + std::cos(x) / (x * x) - std::sin(x) / (x * x * x));
            return bracket / 4.0;
        }
    }

    // Samples an analytic model scaled so every (port, frequency) radiates exactly the model's e_tot.
    // The closed-form radiated power is used rather than grid quadrature, so ports that are rotated
    // copies of each other stay exactly balanced.
    inline FarFieldGrid make_analytic_farfield(const AnalyticModel &model, double theta_step_deg, double phi_step_deg,
                                               const std::vector<double> &frequencies_hz)
    {
        model.validate();
        FarFieldGrid grid(model.n_ports(), frequencies_hz, theta_step_deg, phi_step_deg);
        for (std::size_t f = 0; f < grid.n_frequencies(); ++f)
        {
            const double k = std::sqrt(model.e_tot / detail::analytic_radiated_fraction(model, frequencies_hz[f]));
            for (std::size_t p = 0; p < grid.n_ports(); ++p)
            {
                for (std::size_t i = 0; i < grid.n_theta(); ++i)
                    for (std::size_t j = 0; j < grid.n_phi(); ++j)
                        grid.at(p, f, i, j) = detail::analytic_pattern(model, p, frequencies_hz[f], deg_to_rad(grid.theta_deg(i)),
                                                                       deg_to_rad(grid.phi_deg(j))) *
                                              k;
                grid.set_e_tot(p, f, model.e_tot);
            }
        }
        return grid;
    }
}

#endif
