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

#ifndef mimoeff_tools_run_config_H_
#define mimoeff_tools_run_config_H_

#include <mimoeff/mimoeff.hpp>

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mimoeff::cli
{
    // Bad command line or configuration: reported before any computation starts (exit code 2)
    class UsageError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    inline std::string trim(const std::string &s)
    {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos)
            return {};
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    }

    inline std::vector<std::string> split_list(const std::string &s, char sep = ',')
    {
        std::vector<std::string> out;
        std::size_t start = 0;
        while (true)
        {
            const auto pos = s.find(sep, start);
            out.push_back(trim(s.substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
            if (pos == std::string::npos)
                break;
            start = pos + 1;
        }
        return out;
    }

    // Flat "key = value" file. '#' starts a comment, blank lines are ignored, only 'gene' may repeat.
    class KeyValueFile
    {
    public:
        struct Entry
        {
            std::string value;
            std::size_t line;
        };

        static const std::vector<std::string> &known_keys()
        {
            static const std::vector<std::string> keys{
                "antenna_file", "antenna_model", "model_params", "model_e_tot", "model_reference_frequency",
                "model_theta_step", "model_phi_step", "normalize", "coverage", "env", "mode", "frequencies",
                "realizations", "n_waves", "seed", "threads", "polarization", "interpolation", "rimp_reference",
                "two_stream_rule", "level", "override_rich", "out", "dump_channels", "map", "display_step",
                "pol_realizations", "map_frequency", "port_a", "port_b", "fitness", "gene", "sphere_center",
                "population", "elites", "roulette", "generations", "mutation_rate", "mutation_sigma",
                "convergence_tolerance", "convergence_patience", "min_efficiency_db", "fitness_grid_step"};
            return keys;
        }

        static KeyValueFile parse(std::istream &in, const std::string &name)
        {
            KeyValueFile kv;
            kv.name_ = name;
            std::string line;
            std::size_t n = 0;
            while (std::getline(in, line))
            {
                ++n;
                if (const auto hash = line.find('#'); hash != std::string::npos)
                    line.resize(hash);
                line = trim(line);
                if (line.empty())
                    continue;
                const auto eq = line.find('=');
                if (eq == std::string::npos)
                    throw UsageError(name + ":" + std::to_string(n) + ": expected 'key = value'");
                const std::string key = trim(line.substr(0, eq));
                const std::string value = trim(line.substr(eq + 1));
                const auto &known = known_keys();
                if (std::find(known.begin(), known.end(), key) == known.end())
                    throw UsageError(name + ":" + std::to_string(n) + ": unknown key '" + key + "'");
                auto &slot = kv.entries_[key];
                if (!slot.empty() && key != "gene")
                    throw UsageError(name + ":" + std::to_string(n) + ": duplicate key '" + key + "'");
                slot.push_back({value, n});
            }
            return kv;
        }

        static KeyValueFile load(const std::string &path)
        {
            std::ifstream in(path);
            if (!in)
                throw UsageError("cannot open config file '" + path + "'");
            KeyValueFile kv = parse(in, path);
            kv.base_dir_ = std::filesystem::path(path).parent_path();
            return kv;
        }

        bool has(const std::string &key) const { return entries_.count(key) != 0; }

        std::optional<std::string> get(const std::string &key) const
        {
            const auto it = entries_.find(key);
            if (it == entries_.end())
                return std::nullopt;
            return it->second.front().value;
        }

        std::vector<Entry> get_all(const std::string &key) const
        {
            const auto it = entries_.find(key);
            return it == entries_.end() ? std::vector<Entry>{} : it->second;
        }

        // Location prefix for error messages about a key
        std::string where(const std::string &key) const
        {
            const auto it = entries_.find(key);
            if (it == entries_.end())
                return name_ + ": ";
            return name_ + ":" + std::to_string(it->second.front().line) + ": ";
        }

        // Paths in the file are relative to the file's directory
        std::string resolve(const std::string &p) const
        {
            const std::filesystem::path fp(p);
            return (fp.is_absolute() || base_dir_.empty()) ? p : (base_dir_ / fp).string();
        }

        double get_double(const std::string &key, double fallback) const
        {
            const auto v = get(key);
            return v ? to_double(*v, key) : fallback;
        }

        std::size_t get_size(const std::string &key, std::size_t fallback) const
        {
            const auto v = get(key);
            if (!v)
                return fallback;
            return std::size_t(to_u64(*v, key));
        }

        std::uint64_t get_u64(const std::string &key, std::uint64_t fallback) const
        {
            const auto v = get(key);
            return v ? to_u64(*v, key) : fallback;
        }

        bool get_bool(const std::string &key, bool fallback) const
        {
            const auto v = get(key);
            if (!v)
                return fallback;
            if (*v == "true" || *v == "yes" || *v == "1")
                return true;
            if (*v == "false" || *v == "no" || *v == "0")
                return false;
            throw UsageError(where(key) + key + ": expected true or false, got '" + *v + "'");
        }

        std::vector<double> get_doubles(const std::string &key) const
        {
            std::vector<double> out;
            if (const auto v = get(key); v && !v->empty())
                for (const auto &item : split_list(*v))
                    out.push_back(to_double(item, key));
            return out;
        }

        double to_double(const std::string &s, const std::string &key) const
        {
            char *end = nullptr;
            const double d = std::strtod(s.c_str(), &end);
            if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(d))
                throw UsageError(where(key) + key + ": '" + s + "' is not a finite number");
            return d;
        }

        std::uint64_t to_u64(const std::string &s, const std::string &key) const
        {
            char *end = nullptr;
            if (s.empty() || s[0] == '-')
                throw UsageError(where(key) + key + ": '" + s + "' is not a non-negative integer");
            const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
            if (end != s.c_str() + s.size())
                throw UsageError(where(key) + key + ": '" + s + "' is not a non-negative integer");
            return v;
        }

    private:
        std::string name_;
        std::filesystem::path base_dir_;
        std::map<std::string, std::vector<Entry>> entries_;
    };

    inline EnvironmentKind parse_env(const std::string &s)
    {
        if (s == "rimp")
            return EnvironmentKind::rimp;
        if (s == "rlos")
            return EnvironmentKind::random_los;
        throw UsageError("environment must be rimp or rlos, got '" + s + "'");
    }

    inline StreamMode parse_mode(const std::string &s)
    {
        if (s == "1bs")
            return StreamMode::one_bitstream;
        if (s == "2bs")
            return StreamMode::two_bitstream;
        throw UsageError("mode must be 1bs or 2bs, got '" + s + "'");
    }

    struct AntennaSource
    {
        enum class Kind
        {
            reference,
            file,
            model
        } kind = Kind::reference;
        std::string path;
        AnalyticModel model;
        double theta_step = 1.0, phi_step = 1.0;
        bool normalize = true;
    };

    struct RunConfig
    {
        AntennaSource antenna;
        CoverageRegion coverage = CoverageRegion::sector_120();
        std::vector<EnvironmentKind> environments{EnvironmentKind::rimp, EnvironmentKind::random_los};
        std::vector<StreamMode> modes{StreamMode::one_bitstream, StreamMode::two_bitstream};
        std::vector<double> frequencies;
        SimulationOptions simulation;
        EvaluationPolicy policy;
        std::string out_dir = ".";
        std::size_t dump_channels = 0;

        std::vector<std::string> map_types{"coverage"};
        double display_step = 1.0;
        std::size_t pol_realizations = 1000;
        std::optional<double> map_frequency;
        std::size_t port_a = 0, port_b = 1;

        std::string fitness = "sphere";
        ga::GeneSpec genes;
        ga::GAConfig ga;
        double sphere_center = 0.3;
        std::optional<double> min_efficiency_db;
        double fitness_grid_step = 2.0;
    };

    // Overrides from the command line take precedence over the file
    struct CommandLineOverrides
    {
        std::optional<std::uint64_t> seed;
        std::optional<std::string> out;
        std::optional<std::string> env;
        std::optional<std::string> mode;
        bool override_rich = false;
    };

    inline RunConfig build_config(const KeyValueFile &kv, const CommandLineOverrides &cl)
    {
        RunConfig rc;
        try
        {
            // antenna
            if (kv.has("antenna_file") && kv.has("antenna_model"))
                throw UsageError(kv.where("antenna_model") + "give either antenna_file or antenna_model, not both");
            if (const auto f = kv.get("antenna_file"))
            {
                rc.antenna.kind = AntennaSource::Kind::file;
                rc.antenna.path = kv.resolve(*f);
            }
            else if (const auto m = kv.get("antenna_model"); m && *m != "reference")
            {
                rc.antenna.kind = AntennaSource::Kind::model;
                rc.antenna.model.kind = parse_model_kind(*m);
            }
            rc.antenna.model.parameters = kv.get_doubles("model_params");
            rc.antenna.model.e_tot = kv.get_double("model_e_tot", 1.0);
            rc.antenna.model.reference_frequency_hz = kv.get_double("model_reference_frequency", 0.0);
            rc.antenna.theta_step = kv.get_double("model_theta_step", 1.0);
            rc.antenna.phi_step = kv.get_double("model_phi_step", 1.0);
            rc.antenna.normalize = kv.get_bool("normalize", true);
            if (rc.antenna.kind == AntennaSource::Kind::model)
                rc.antenna.model.validate();

            // region and environment
            if (const auto c = kv.get("coverage"))
            {
                if (*c == "full")
                    rc.coverage = CoverageRegion::full_sphere();
                else
                {
                    const auto v = kv.get_doubles("coverage");
                    if (v.size() != 4)
                        throw UsageError(kv.where("coverage") + "coverage: expected 'full' or theta_min,theta_max,phi_min,phi_max in degrees");
                    rc.coverage = CoverageRegion::from_degrees(v[0], v[1], v[2], v[3]);
                }
            }
            auto envs = kv.get("env");
            if (cl.env)
                envs = *cl.env;
            if (envs && *envs != "both")
            {
                rc.environments.clear();
                for (const auto &e : split_list(*envs))
                    rc.environments.push_back(parse_env(e));
            }
            auto modes = kv.get("mode");
            if (cl.mode)
                modes = *cl.mode;
            if (modes && *modes != "both")
            {
                rc.modes.clear();
                for (const auto &m : split_list(*modes))
                    rc.modes.push_back(parse_mode(m));
            }
            rc.frequencies = kv.get_doubles("frequencies");
            for (double f : rc.frequencies)
                if (!(f > 0.0))
                    throw UsageError(kv.where("frequencies") + "frequencies must be positive");

            // Monte Carlo
            auto &sim = rc.simulation;
            sim.realizations = kv.get_size("realizations", sim.realizations);
            if (sim.realizations < min_quantile_samples)
                throw UsageError(kv.where("realizations") + "realizations must be at least 1000");
            sim.n_waves = kv.get_size("n_waves", sim.n_waves);
            sim.waves.allow_sparse = cl.override_rich || kv.get_bool("override_rich", false);
            const bool uses_rimp = std::find(rc.environments.begin(), rc.environments.end(), EnvironmentKind::rimp) != rc.environments.end();
            if (uses_rimp && sim.n_waves < min_rich_waves && !sim.waves.allow_sparse)
                throw UsageError(kv.where("n_waves") + "n_waves = " + std::to_string(sim.n_waves) +
                                 " is below the 100 waves of rich multipath (use --override-rich to allow it)");
            if (sim.n_waves == 0)
                throw UsageError(kv.where("n_waves") + "n_waves must be positive");
            sim.seed = cl.seed ? *cl.seed : kv.get_u64("seed", sim.seed);
            sim.threads = unsigned(kv.get_size("threads", 1));
            if (const auto p = kv.get("polarization"))
            {
                if (*p == "poincare")
                    sim.waves.polarization = PolarizationLaw::poincare;
                else if (*p == "linear")
                    sim.waves.polarization = PolarizationLaw::linear;
                else
                    throw UsageError(kv.where("polarization") + "polarization must be poincare or linear");
            }
            if (const auto i = kv.get("interpolation"))
            {
                if (*i == "cubic")
                    sim.interpolation = Interpolation::linear_theta_cubic_phi;
                else if (*i == "bilinear")
                    sim.interpolation = Interpolation::bilinear;
                else
                    throw UsageError(kv.where("interpolation") + "interpolation must be cubic or bilinear");
            }
            if (const auto r = kv.get("rimp_reference"))
            {
                if (*r == "rayleigh")
                    rc.policy.rimp_reference = RimpReference::rayleigh;
                else if (*r == "constant")
                    rc.policy.rimp_reference = RimpReference::constant;
                else
                    throw UsageError(kv.where("rimp_reference") + "rimp_reference must be rayleigh or constant");
            }
            if (const auto t = kv.get("two_stream_rule"))
            {
                if (*t == "min")
                    rc.policy.two_stream_rule = TwoStreamRule::min_stream;
                else if (*t == "average")
                    rc.policy.two_stream_rule = TwoStreamRule::average_pod;
                else
                    throw UsageError(kv.where("two_stream_rule") + "two_stream_rule must be min or average");
            }
            rc.policy.level = kv.get_double("level", 0.95);
            if (!(rc.policy.level > 0.0 && rc.policy.level < 1.0))
                throw UsageError(kv.where("level") + "level must lie in (0, 1)");
            rc.out_dir = cl.out ? *cl.out : kv.get("out").value_or(".");
            rc.dump_channels = kv.get_size("dump_channels", 0);

            // maps
            if (const auto m = kv.get("map"))
            {
                rc.map_types = *m == "both" ? std::vector<std::string>{"coverage", "deficiency"} : split_list(*m);
                for (const auto &t : rc.map_types)
                    if (t != "coverage" && t != "deficiency")
                        throw UsageError(kv.where("map") + "map must be coverage, deficiency or both");
            }
            rc.display_step = kv.get_double("display_step", 1.0);
            if (!(rc.display_step > 0.0))
                throw UsageError(kv.where("display_step") + "display_step must be positive");
            rc.pol_realizations = kv.get_size("pol_realizations", 1000);
            if (rc.pol_realizations < min_quantile_samples)
                throw UsageError(kv.where("pol_realizations") + "pol_realizations must be at least 1000");
            if (kv.has("map_frequency"))
                rc.map_frequency = kv.get_double("map_frequency", 0.0);
            rc.port_a = kv.get_size("port_a", 0);
            rc.port_b = kv.get_size("port_b", 1);

            // optimizer
            rc.fitness = kv.get("fitness").value_or("sphere");
            if (rc.fitness != "sphere" && rc.fitness != "efficiency")
                throw UsageError(kv.where("fitness") + "fitness must be sphere or efficiency");
            for (const auto &e : kv.get_all("gene"))
            {
                const auto parts = split_list(e.value);
                if (parts.size() != 3)
                    throw UsageError("gene at line " + std::to_string(e.line) + ": expected 'name,low,high'");
                const double lo = kv.to_double(parts[1], "gene"), hi = kv.to_double(parts[2], "gene");
                if (!(lo < hi))
                    throw UsageError("gene '" + parts[0] + "' at line " + std::to_string(e.line) + ": lower bound must be below upper bound");
                rc.genes.genes.push_back({parts[0], lo, hi});
            }
            rc.sphere_center = kv.get_double("sphere_center", 0.3);
            rc.ga.population_size = kv.get_size("population", rc.ga.population_size);
            rc.ga.n_elites = kv.get_size("elites", rc.ga.n_elites);
            rc.ga.n_roulette = kv.get_size("roulette", rc.ga.n_roulette);
            rc.ga.max_generations = kv.get_size("generations", rc.ga.max_generations);
            rc.ga.mutation_rate = kv.get_double("mutation_rate", rc.ga.mutation_rate);
            rc.ga.mutation_sigma_fraction = kv.get_double("mutation_sigma", rc.ga.mutation_sigma_fraction);
            rc.ga.convergence_tolerance = kv.get_double("convergence_tolerance", rc.ga.convergence_tolerance);
            rc.ga.convergence_patience = kv.get_size("convergence_patience", rc.ga.convergence_patience);
            rc.ga.seed = sim.seed;
            rc.ga.threads = sim.threads;
            if (kv.has("min_efficiency_db"))
                rc.min_efficiency_db = kv.get_double("min_efficiency_db", 0.0);
            rc.fitness_grid_step = kv.get_double("fitness_grid_step", 2.0);
        }
        catch (const UsageError &)
        {
            throw;
        }
        catch (const std::invalid_argument &e)
        {
            throw UsageError(e.what());
        }
        return rc;
    }
}

#endif
