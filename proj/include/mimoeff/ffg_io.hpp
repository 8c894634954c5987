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

#ifndef MIMOEFF_FFG_IO_HPP
#define MIMOEFF_FFG_IO_HPP

#include "farfield.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

// FFG far-field grid files, line-oriented text:
//   #ffg v1
//   #ports N
//   #frequencies f1,f2,...        (Hz)
//   #theta_step D                 (deg)
//   #phi_step D                   (deg)
//   #e_tot port,freq_index,value  (optional, one per pair, default 1.0)
//   port freq_index theta_deg phi_deg re_Etheta im_Etheta re_Ephi im_Ephi
// Data rows are in (port, freq, theta, phi) lexicographic order, floats with 17 significant digits.

namespace mimoeff
{
    // Parse or validation failure; line is 0 when the problem is not tied to one line
    class FfgError : public std::runtime_error
    {
    public:
        FfgError(const std::string &path, std::size_t line, const std::string &what)
            : std::runtime_error(path + (line ? ":" + std::to_string(line) : std::string()) + ": " + what), line_(line) {}
        std::size_t line() const noexcept { return line_; }

    private:
        std::size_t line_;
    };

    namespace detail
    {
        inline std::string fmt17(double v)
        {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            return buf;
        }

        inline std::vector<std::string> split(const std::string &s, char sep)
        {
            std::vector<std::string> out;
            std::string item;
            std::istringstream in(s);
            while (std::getline(in, item, sep))
                out.push_back(item);
            return out;
        }

        inline bool parse_double(const std::string &s, double &out)
        {
            const char *begin = s.c_str();
            while (*begin == ' ' || *begin == '\t')
                ++begin;
            char *end = nullptr;
            out = std::strtod(begin, &end);
            if (end == begin)
                return false;
            while (*end == ' ' || *end == '\t' || *end == '\r')
                ++end;
            return *end == '\0';
        }

        inline bool parse_index(const std::string &s, std::size_t &out)
        {
            double v;
            if (!parse_double(s, v) || v < 0.0 || v != std::floor(v) || v > 1e15)
                return false;
            out = std::size_t(v);
            return true;
        }
    }

    inline void write_grid(std::ostream &out, const FarFieldGrid &grid)
    {
        using detail::fmt17;
        out << "#ffg v1\n#ports " << grid.n_ports() << "\n#frequencies ";
        for (std::size_t f = 0; f < grid.n_frequencies(); ++f)
            out << (f ? "," : "") << fmt17(grid.frequencies()[f]);
        out << "\n#theta_step " << fmt17(grid.theta_step_deg()) << "\n#phi_step " << fmt17(grid.phi_step_deg()) << "\n";
        for (std::size_t p = 0; p < grid.n_ports(); ++p)
            for (std::size_t f = 0; f < grid.n_frequencies(); ++f)
                out << "#e_tot " << p << "," << f << "," << fmt17(grid.e_tot(p, f)) << "\n";
        for (std::size_t p = 0; p < grid.n_ports(); ++p)
            for (std::size_t f = 0; f < grid.n_frequencies(); ++f)
                for (std::size_t i = 0; i < grid.n_theta(); ++i)
                    for (std::size_t j = 0; j < grid.n_phi(); ++j)
                    {
                        const FieldPair &e = grid.at(p, f, i, j);
                        out << p << ' ' << f << ' ' << fmt17(grid.theta_deg(i)) << ' ' << fmt17(grid.phi_deg(j)) << ' '
                            << fmt17(e.theta.real()) << ' ' << fmt17(e.theta.imag()) << ' '
                            << fmt17(e.phi.real()) << ' ' << fmt17(e.phi.imag()) << '\n';
                    }
    }

    inline void save_grid(const FarFieldGrid &grid, const std::string &path)
    {
        std::ofstream out(path);
        if (!out)
            throw std::runtime_error("cannot open '" + path + "' for writing");
        write_grid(out, grid);
        if (!out)
            throw std::runtime_error("write to '" + path + "' failed");
    }

    // Reads an FFG stream; throws FfgError naming the offending line. 'name' labels messages.
    inline FarFieldGrid read_grid(std::istream &in, const std::string &name = "<stream>")
    {
        std::optional<std::size_t> ports;
        std::vector<double> freqs;
        std::optional<double> theta_step, phi_step;
        struct Eff
        {
            std::size_t port, freq;
            double value;
            std::size_t line;
        };
        std::vector<Eff> effs;
        bool magic = false;

        FarFieldGrid grid;
        bool built = false;
        std::size_t expected = 0, total = 0;
        std::string line;
        std::size_t lineno = 0;

        auto build = [&]
        {
            if (!magic)
                throw FfgError(name, lineno, "missing '#ffg v1' header");
            if (!ports || freqs.empty() || !theta_step || !phi_step)
                throw FfgError(name, lineno, "incomplete header (need #ports, #frequencies, #theta_step, #phi_step)");
            try
            {
                grid = FarFieldGrid(*ports, freqs, *theta_step, *phi_step);
            }
            catch (const std::invalid_argument &e)
            {
                throw FfgError(name, lineno, e.what());
            }
            for (const Eff &e : effs)
            {
                if (e.port >= grid.n_ports() || e.freq >= grid.n_frequencies())
                    throw FfgError(name, e.line, "#e_tot refers to a port or frequency index outside the grid");
                if (!(e.value > 0.0 && e.value <= 1.0))
                    throw FfgError(name, e.line, "efficiency out of (0,1]: " + detail::fmt17(e.value));
                grid.set_e_tot(e.port, e.freq, e.value);
            }
            total = grid.n_ports() * grid.n_frequencies() * grid.n_theta() * grid.n_phi();
            built = true;
        };

        while (std::getline(in, line))
        {
            ++lineno;
            if (!line.empty() && line.back() == '\r')
                line.pop_back();
            if (line.find_first_not_of(" \t") == std::string::npos)
                continue;
            if (line[0] == '#')
            {
                if (built)
                    throw FfgError(name, lineno, "header line after data rows");
                std::istringstream hs(line);
                std::string key, value;
                hs >> key;
                std::getline(hs >> std::ws, value);
                if (key == "#ffg")
                {
                    if (value != "v1")
                        throw FfgError(name, lineno, "unsupported FFG version '" + value + "'");
                    magic = true;
                }
                else if (key == "#ports")
                {
                    std::size_t n;
                    if (!detail::parse_index(value, n) || n == 0)
                        throw FfgError(name, lineno, "invalid port count '" + value + "'");
                    ports = n;
                }
                else if (key == "#frequencies")
                {
                    for (const auto &item : detail::split(value, ','))
                    {
                        double f;
                        if (!detail::parse_double(item, f) || !(f > 0.0))
                            throw FfgError(name, lineno, "invalid frequency '" + item + "'");
                        freqs.push_back(f);
                    }
                }
                else if (key == "#theta_step" || key == "#phi_step")
                {
                    double d;
                    if (!detail::parse_double(value, d))
                        throw FfgError(name, lineno, "invalid step '" + value + "'");
                    (key == "#theta_step" ? theta_step : phi_step) = d;
                }
                else if (key == "#e_tot")
                {
                    const auto parts = detail::split(value, ',');
                    Eff e{};
                    e.line = lineno;
                    if (parts.size() != 3 || !detail::parse_index(parts[0], e.port) || !detail::parse_index(parts[1], e.freq) ||
                        !detail::parse_double(parts[2], e.value))
                        throw FfgError(name, lineno, "malformed #e_tot line (expected port,freq_index,value)");
                    effs.push_back(e);
                }
                else
                    throw FfgError(name, lineno, "unknown header '" + key + "'");
                continue;
            }

            if (!built)
                build();
            if (expected >= total)
                throw FfgError(name, lineno, "more data rows than the header declares");

            std::istringstream rs(line);
            std::vector<std::string> tok;
            for (std::string t; rs >> t;)
                tok.push_back(t);
            if (tok.size() != 8)
                throw FfgError(name, lineno, "expected 8 columns, found " + std::to_string(tok.size()));
            std::size_t port, freq;
            double v[6];
            if (!detail::parse_index(tok[0], port) || !detail::parse_index(tok[1], freq))
                throw FfgError(name, lineno, "invalid port or frequency index");
            for (int k = 0; k < 6; ++k)
                if (!detail::parse_double(tok[2 + k], v[k]) || !std::isfinite(v[k]))
                    throw FfgError(name, lineno, "non-numeric or non-finite value '" + tok[2 + k] + "'");

            const double theta = v[0], phi = v[1];
            if (theta < 0.0 || theta > 180.0)
                throw FfgError(name, lineno, "theta " + tok[2] + " deg outside [0, 180]");
            if (phi < 0.0 || phi >= 360.0)
                throw FfgError(name, lineno, "phi " + tok[3] + " deg outside [0, 360)");

            const std::size_t j = expected % grid.n_phi();
            const std::size_t i = (expected / grid.n_phi()) % grid.n_theta();
            const std::size_t f = (expected / (grid.n_phi() * grid.n_theta())) % grid.n_frequencies();
            const std::size_t p = expected / (grid.n_phi() * grid.n_theta() * grid.n_frequencies());
            const double tol = 1e-9 * std::max(1.0, std::max(grid.theta_step_deg(), grid.phi_step_deg()));
            if (port != p || freq != f || std::abs(theta - grid.theta_deg(i)) > tol || std::abs(phi - grid.phi_deg(j)) > tol)
            {
                std::ostringstream msg;
                msg << "row out of order or off-grid: expected (" << p << ' ' << f << ' ' << grid.theta_deg(i) << ' '
                    << grid.phi_deg(j) << "), found (" << tok[0] << ' ' << tok[1] << ' ' << tok[2] << ' ' << tok[3] << ")";
                throw FfgError(name, lineno, msg.str());
            }
            grid.at(p, f, i, j) = {cplx(v[2], v[3]), cplx(v[4], v[5])};
            ++expected;
        }

        if (!built)
            build();
        if (expected != total)
            throw FfgError(name, 0, "truncated data: " + std::to_string(expected) + " of " + std::to_string(total) + " rows");
        return grid;
    }

    inline FarFieldGrid load_grid(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw FfgError(path, 0, "cannot open file");
        return read_grid(in, path);
    }

    // Non-fatal findings about a grid that loaded successfully
    struct GridDiagnostics
    {
        struct PortSummary
        {
            std::size_t port, freq_index;
            double declared_e_tot, integrated_e_tot, peak_gain;
        };
        std::vector<PortSummary> ports;
        std::vector<std::string> warnings;
    };

    // Checks pole consistency (the Cartesian field at theta = 0 and 180 deg must not depend on phi, within 1e-9)
    // and compares the integrated radiated efficiency with the declared e_tot.
    inline GridDiagnostics diagnose_grid(const FarFieldGrid &grid, double efficiency_tolerance = 1e-3)
    {
        GridDiagnostics d;
        for (std::size_t p = 0; p < grid.n_ports(); ++p)
            for (std::size_t f = 0; f < grid.n_frequencies(); ++f)
            {
                double peak = 0.0;
                for (std::size_t i = 0; i < grid.n_theta(); ++i)
                    for (std::size_t j = 0; j < grid.n_phi(); ++j)
                        peak = std::max(peak, grid.at(p, f, i, j).norm2());
                const double integrated = total_radiated_efficiency_at(grid, p, f);
                d.ports.push_back({p, f, grid.e_tot(p, f), integrated, peak});
                if (std::abs(integrated - grid.e_tot(p, f)) > efficiency_tolerance * grid.e_tot(p, f))
                    d.warnings.push_back("port " + std::to_string(p) + " freq " + std::to_string(f) + ": integrated efficiency " +
                                         detail::fmt17(integrated) + " differs from declared e_tot " + detail::fmt17(grid.e_tot(p, f)));

                for (std::size_t pole : {std::size_t(0), grid.n_theta() - 1})
                {
                    const double sign = pole == 0 ? 1.0 : -1.0; // theta_hat at the south pole points inward
                    auto cartesian = [&](std::size_t j)
                    {
                        const double ph = deg_to_rad(grid.phi_deg(j));
                        const FieldPair &e = grid.at(p, f, pole, j);
                        return std::pair<cplx, cplx>{sign * e.theta * std::cos(ph) - e.phi * std::sin(ph),
                                                     sign * e.theta * std::sin(ph) + e.phi * std::cos(ph)};
                    };
                    const auto first = cartesian(0);
                    for (std::size_t j = 1; j < grid.n_phi(); ++j)
                    {
                        const auto v = cartesian(j);
                        const double dev = std::max(std::abs(v.first - first.first), std::abs(v.second - first.second));
                        if (dev > 1e-9)
                        {
                            std::ostringstream w;
                            w.precision(17);
                            w << "port " << p << " freq " << f << ": pole theta=" << grid.theta_deg(pole)
                              << " inconsistent: (Ex,Ey) at phi=0 is (" << first.first << "," << first.second << ") but at phi="
                              << grid.phi_deg(j) << " is (" << v.first << "," << v.second << ")";
                            d.warnings.push_back(w.str());
                            break;
                        }
                    }
                }
            }
        return d;
    }
}

#endif
