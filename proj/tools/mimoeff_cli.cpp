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

// Command-line front end: evaluate, maps, optimize, validate-ffg

#include "run_config.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <variant>

namespace fs = std::filesystem;
using namespace mimoeff;
using namespace mimoeff::cli;

namespace
{
    constexpr int exit_ok = 0;
    constexpr int exit_usage = 2;
    constexpr int exit_runtime = 3;

    // Raised for failures after validation, e.g. unwritable output or a failing fitness plug-in
    class RuntimeFailure : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    using Antenna = std::variant<ReferenceAntenna, FarFieldGrid>;

    std::size_t port_count(const Antenna &a, StreamMode mode)
    {
        if (const auto *g = std::get_if<FarFieldGrid>(&a))
            return g->n_ports();
        return stream_count(mode);
    }

    // Loads or samples the antenna and settles the frequency list
    Antenna load_antenna(RunConfig &rc)
    {
        switch (rc.antenna.kind)
        {
        case AntennaSource::Kind::reference:
            if (rc.frequencies.empty())
                rc.frequencies = {0.0}; // the reference does not depend on frequency
            return reference_farfield(rc.coverage);
        case AntennaSource::Kind::file:
        {
            if (!fs::exists(rc.antenna.path))
                throw UsageError("far-field file not found: '" + rc.antenna.path + "'");
            FarFieldGrid grid;
            try
            {
                grid = load_grid(rc.antenna.path);
                if (rc.antenna.normalize)
                    grid = normalize_to_declared(std::move(grid));
            }
            catch (const std::exception &e)
            {
                throw UsageError(e.what());
            }
            if (rc.frequencies.empty())
                rc.frequencies = grid.frequencies();
            for (double f : rc.frequencies)
            {
                try
                {
                    grid.frequency_index(f);
                }
                catch (const std::out_of_range &)
                {
                    throw UsageError("frequency " + std::to_string(f) + " Hz is not in '" + rc.antenna.path + "'");
                }
            }
            return grid;
        }
        case AntennaSource::Kind::model:
            if (rc.frequencies.empty())
                throw UsageError("an analytic antenna needs 'frequencies'");
            try
            {
                return make_analytic_farfield(rc.antenna.model, rc.antenna.theta_step, rc.antenna.phi_step, rc.frequencies);
            }
            catch (const std::invalid_argument &e)
            {
                throw UsageError(e.what());
            }
        }
        throw UsageError("no antenna configured");
    }

    void require_ports(const Antenna &a, const std::vector<StreamMode> &modes)
    {
        for (StreamMode m : modes)
            if (m == StreamMode::two_bitstream && port_count(a, m) < 2)
                throw UsageError("2-bitstream mode needs an antenna with at least 2 ports");
    }

    std::ofstream open_output(const RunConfig &rc, const std::string &file)
    {
        std::error_code ec;
        fs::create_directories(rc.out_dir, ec);
        const fs::path p = fs::path(rc.out_dir) / file;
        std::ofstream out(p);
        if (!out)
            throw RuntimeFailure("cannot write '" + p.string() + "'");
        return out;
    }

    std::string db_string(double linear)
    {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.2f dB", to_db(linear));
        return buf;
    }

    int cmd_evaluate(RunConfig rc)
    {
        const Antenna antenna = load_antenna(rc);
        require_ports(antenna, rc.modes);

        const EfficiencyReport report = std::visit([&](const auto &a)
                                                   { return evaluate_report(a, rc.frequencies, rc.modes, rc.environments, rc.coverage,
                                                                            rc.simulation, rc.policy); },
                                                   antenna);
        auto out = open_output(rc, "efficiency.csv");
        write_efficiency_csv(out, report);
        for (const auto &e : report)
        {
            std::printf("%-12g %-4s %-5s %s\n", e.frequency_hz, to_string(e.mode).c_str(), to_string(e.environment).c_str(),
                        db_string(e.result.linear).c_str());
            if (!e.result.diagnostic.empty())
                std::fprintf(stderr, "warning: %g Hz %s %s: %s\n", e.frequency_hz, to_string(e.mode).c_str(),
                             to_string(e.environment).c_str(), e.result.diagnostic.c_str());
        }

        if (rc.dump_channels > 0)
            for (EnvironmentKind env : rc.environments)
                for (StreamMode mode : rc.modes)
                    for (std::size_t k = 0; k < rc.frequencies.size(); ++k)
                    {
                        const auto h = std::visit([&](const auto &a)
                                                  { return simulate_channels(a, env, mode, rc.coverage, rc.frequencies[k], rc.simulation,
                                                                             rc.dump_channels); },
                                                  antenna);
                        auto dump = open_output(rc, "channels_" + to_string(env) + "_" + to_string(mode) + "_f" + std::to_string(k) + ".csv");
                        write_realizations_csv(dump, h);
                    }
        return exit_ok;
    }

    int cmd_maps(RunConfig rc)
    {
        const Antenna antenna = load_antenna(rc);
        const double f = rc.map_frequency ? *rc.map_frequency : rc.frequencies.front();
        if (const auto *g = std::get_if<FarFieldGrid>(&antenna))
        {
            try
            {
                g->frequency_index(f);
            }
            catch (const std::out_of_range &)
            {
                throw UsageError("map frequency " + std::to_string(f) + " Hz is not available for the antenna");
            }
        }
        const bool want_coverage = std::find(rc.map_types.begin(), rc.map_types.end(), "coverage") != rc.map_types.end();
        const bool want_deficiency = std::find(rc.map_types.begin(), rc.map_types.end(), "deficiency") != rc.map_types.end();
        if (want_coverage)
            require_ports(antenna, rc.modes);
        if (want_deficiency)
        {
            const auto *g = std::get_if<FarFieldGrid>(&antenna);
            if (!g || g->n_ports() < 2)
                throw UsageError("deficiency maps need a far-field antenna with at least 2 ports");
            if (rc.port_a == rc.port_b || rc.port_a >= g->n_ports() || rc.port_b >= g->n_ports())
                throw UsageError("port_a and port_b must be two distinct ports of the antenna");
        }

        if (want_coverage)
            for (StreamMode mode : rc.modes)
            {
                const DirectionMap map = std::visit([&](const auto &a)
                                                    { return coverage_map(a, f, mode, rc.coverage, rc.display_step, rc.pol_realizations,
                                                                          rc.policy, rc.simulation); },
                                                    antenna);
                auto out = open_output(rc, "coverage_" + to_string(mode) + ".csv");
                write_map_csv(out, map, true);
                std::printf("coverage %s: %zu cells, solid-angle mean %s\n", to_string(mode).c_str(), map.cells.size(),
                            db_string(map_solid_angle_mean(map)).c_str());
            }
        if (want_deficiency)
        {
            const auto &g = std::get<FarFieldGrid>(antenna);
            const auto [ia, ip] = deficiency_maps(g, f, rc.coverage, rc.display_step, rc.port_a, rc.port_b, rc.simulation.interpolation);
            auto out_a = open_output(rc, "deficiency_ia.csv");
            write_map_csv(out_a, ia, true);
            auto out_p = open_output(rc, "deficiency_ip.csv");
            write_map_csv(out_p, ip, false);
            std::printf("deficiency: %zu cells, %zu flagged (zero-magnitude port)\n", ia.cells.size(), ia.flagged);
        }
        return exit_ok;
    }

    // Gene names understood by the efficiency fitness
    AnalyticModel apply_genes(AnalyticModel m, const ga::GeneSpec &spec, std::span<const double> genes)
    {
        for (std::size_t k = 0; k < spec.size(); ++k)
        {
            const std::string &name = spec.genes[k].name;
            if (name == "height")
            {
                if (m.parameters.empty())
                    m.parameters.resize(1);
                m.parameters[0] = genes[k];
            }
            else if (name == "separation")
            {
                if (m.parameters.size() < 2)
                    m.parameters.resize(2);
                m.parameters[1] = genes[k];
            }
            else if (name == "e_tot")
                m.e_tot = genes[k];
        }
        return m;
    }

    int cmd_optimize(RunConfig rc)
    {
        if (rc.genes.genes.empty())
            throw UsageError("optimize needs at least one 'gene = name,low,high' line");
        try
        {
            rc.genes.validate();
            rc.ga.validate();
        }
        catch (const std::invalid_argument &e)
        {
            throw UsageError(e.what());
        }

        ga::FitnessFunction fitness;
        AnalyticModel base{ModelKind::crossed_dipoles_over_ground, {0.25}};
        ga::EfficiencyFitnessOptions eff;
        if (rc.fitness == "sphere")
            fitness = ga::sphere_fitness(rc.sphere_center);
        else
        {
            if (rc.antenna.kind == AntennaSource::Kind::file)
                throw UsageError("the efficiency fitness optimizes an analytic antenna_model, not a far-field file");
            if (rc.antenna.kind == AntennaSource::Kind::model)
                base = rc.antenna.model;
            for (const auto &g : rc.genes.genes)
                if (g.name != "height" && g.name != "separation" && g.name != "e_tot")
                    throw UsageError("gene '" + g.name + "' is not a model parameter (use height, separation or e_tot)");
            if (rc.frequencies.empty())
                throw UsageError("the efficiency fitness needs 'frequencies' (the band)");
            std::vector<double> mid;
            for (const auto &g : rc.genes.genes)
                mid.push_back(0.5 * (g.lower + g.upper));
            try
            {
                apply_genes(base, rc.genes, mid).validate();
            }
            catch (const std::invalid_argument &e)
            {
                throw UsageError(std::string("gene mapping gives an invalid antenna: ") + e.what());
            }
            eff.band = rc.frequencies;
            eff.environment = rc.environments.size() == 1 ? rc.environments.front() : EnvironmentKind::random_los;
            eff.mode = rc.modes.size() == 1 ? rc.modes.front() : StreamMode::two_bitstream;
            eff.coverage = rc.coverage;
            eff.simulation = rc.simulation;
            eff.simulation.threads = 1; // individuals are already evaluated in parallel
            eff.policy = rc.policy;
            eff.grid_step_deg = rc.fitness_grid_step;
            eff.min_efficiency_db = rc.min_efficiency_db;
            fitness = ga::efficiency_fitness([base, spec = rc.genes](std::span<const double> g)
                                             { return apply_genes(base, spec, g); },
                                             eff);
        }

        ga::GAResult result;
        try
        {
            result = ga::run_ga(rc.genes, rc.ga, fitness);
        }
        catch (const ga::FitnessError &e)
        {
            throw RuntimeFailure(e.what());
        }

        {
            auto trace = open_output(rc, "trace.csv");
            ga::write_trace_csv(trace, result.trace);
        }
        {
            auto best = open_output(rc, "best_genes.csv");
            best << "name,value\n";
            char buf[256];
            for (std::size_t k = 0; k < rc.genes.size(); ++k)
            {
                std::snprintf(buf, sizeof buf, "%s,%.17g\n", rc.genes.genes[k].name.c_str(), result.best.genes[k]);
                best << buf;
            }
            std::snprintf(buf, sizeof buf, "fitness,%.17g\n", result.best.fitness.value_or(0.0));
            best << buf;
        }
        std::printf("generations %zu, evaluations %zu, best fitness %.6g%s\n", result.trace.size(), result.trace.back().evaluations,
                    result.best.fitness.value_or(0.0), result.converged ? " (converged)" : "");
        for (std::size_t k = 0; k < rc.genes.size(); ++k)
            std::printf("  %s = %.6g\n", rc.genes.genes[k].name.c_str(), result.best.genes[k]);
        if (result.non_finite_fitness > 0)
            std::fprintf(stderr, "warning: %zu evaluations returned a non-finite fitness and were ranked worst\n", result.non_finite_fitness);

        if (rc.fitness == "efficiency")
        {
            const AnalyticModel best = apply_genes(base, rc.genes, result.best.genes);
            const FarFieldGrid grid = make_analytic_farfield(best, rc.antenna.theta_step, rc.antenna.phi_step, rc.frequencies);
            const auto report = evaluate_report(grid, rc.frequencies, rc.modes, rc.environments, rc.coverage, rc.simulation, rc.policy);
            auto out = open_output(rc, "best_efficiency.csv");
            write_efficiency_csv(out, report);
        }
        return exit_ok;
    }

    int cmd_validate_ffg(const std::string &path)
    {
        if (!fs::exists(path))
        {
            std::fprintf(stderr, "error: far-field file not found: '%s'\n", path.c_str());
            return exit_usage;
        }
        FarFieldGrid grid;
        try
        {
            grid = load_grid(path);
        }
        catch (const FfgError &e)
        {
            std::fprintf(stderr, "error: %s\n", e.what());
            return exit_usage;
        }
        const GridDiagnostics d = diagnose_grid(grid);
        std::printf("%s: %zu port(s), %zu frequency(ies), %g x %g deg grid\n", path.c_str(), grid.n_ports(), grid.n_frequencies(),
                    grid.theta_step_deg(), grid.phi_step_deg());
        for (const auto &p : d.ports)
            std::printf("port %zu  %g Hz  e_tot = %.3f (integrated %.3f)  peak gain %.2f dBi\n", p.port, grid.frequencies()[p.freq_index],
                        p.declared_e_tot, p.integrated_e_tot, to_db(p.peak_gain));
        for (const auto &w : d.warnings)
            std::fprintf(stderr, "warning: %s\n", w.c_str());
        std::printf("valid\n");
        return exit_ok;
    }

    struct CommonFlags
    {
        std::string config;
        std::uint64_t seed = 0;
        std::string out, env, mode;
        bool override_rich = false;
        CLI::Option *seed_opt = nullptr, *out_opt = nullptr, *env_opt = nullptr, *mode_opt = nullptr;

        void attach(CLI::App *sub)
        {
            sub->add_option("--config", config, "Run configuration (key = value file)")->required();
            seed_opt = sub->add_option("--seed", seed, "Master seed, overrides the config");
            out_opt = sub->add_option("--out", out, "Output directory, overrides the config");
            env_opt = sub->add_option("--env", env, "Environment: rimp or rlos")->check(CLI::IsMember({"rimp", "rlos"}));
            mode_opt = sub->add_option("--mode", mode, "Stream mode: 1bs or 2bs")->check(CLI::IsMember({"1bs", "2bs"}));
            sub->add_flag("--override-rich", override_rich, "Allow fewer than 100 multipath waves");
        }

        RunConfig resolve() const
        {
            CommandLineOverrides cl;
            if (seed_opt->count())
                cl.seed = seed;
            if (out_opt->count())
                cl.out = out;
            if (env_opt->count())
                cl.env = env;
            if (mode_opt->count())
                cl.mode = mode;
            cl.override_rich = override_rich;
            return build_config(KeyValueFile::load(config), cl);
        }
    };
}

int main(int argc, char **argv)
{
    CLI::App app{"MIMO efficiency of antennas in rich multipath and random line-of-sight"};
    app.require_subcommand(1);

    CommonFlags eval_flags, map_flags, opt_flags;
    auto *evaluate = app.add_subcommand("evaluate", "Efficiency per frequency, mode and environment");
    eval_flags.attach(evaluate);
    auto *maps = app.add_subcommand("maps", "Per-direction coverage and polarization-deficiency maps");
    map_flags.attach(maps);
    auto *optimize = app.add_subcommand("optimize", "Genetic-algorithm search over antenna parameters");
    opt_flags.attach(optimize);
    std::string ffg_path;
    auto *validate = app.add_subcommand("validate-ffg", "Check a far-field grid file");
    validate->add_option("path", ffg_path, "FFG file")->required();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::CallForAllHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        app.exit(e);
        return exit_usage;
    }

    try
    {
        if (*evaluate)
            return cmd_evaluate(eval_flags.resolve());
        if (*maps)
            return cmd_maps(map_flags.resolve());
        if (*optimize)
            return cmd_optimize(opt_flags.resolve());
        if (*validate)
            return cmd_validate_ffg(ffg_path);
    }
    catch (const UsageError &e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_usage;
    }
    catch (const std::exception &e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_runtime;
    }
    return exit_usage;
}
