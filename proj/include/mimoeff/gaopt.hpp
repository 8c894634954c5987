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

#ifndef MIMOEFF_GAOPT_HPP
#define MIMOEFF_GAOPT_HPP

#include "evaluation.hpp"
#include "farfield.hpp"
#include "parallel.hpp"
#include "rng.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mimoeff::ga
{
    struct Gene
    {
        std::string name;
        double lower = 0.0;
        double upper = 1.0;
    };

    struct GeneSpec
    {
        std::vector<Gene> genes;

        std::size_t size() const noexcept { return genes.size(); }

        void validate() const
        {
            if (genes.empty())
                throw std::invalid_argument("GeneSpec: no genes");
            std::set<std::string> names;
            for (const Gene &g : genes)
            {
                if (!(g.lower < g.upper) || !std::isfinite(g.lower) || !std::isfinite(g.upper))
                    throw std::invalid_argument("GeneSpec: gene '" + g.name + "' needs finite lower < upper");
                if (!names.insert(g.name).second)
                    throw std::invalid_argument("GeneSpec: duplicate gene name '" + g.name + "'");
            }
        }

        double clamp(std::size_t k, double v) const noexcept { return std::clamp(v, genes[k].lower, genes[k].upper); }
    };

    struct Individual
    {
        std::vector<double> genes;
        std::optional<double> fitness; // lower is better
    };

    using Population = std::vector<Individual>;

    // Defaults follow the reference scheme: 400 per generation, 15 elites plus 15 roulette picks,
    // every pair producing two children.
    struct GAConfig
    {
        std::size_t population_size = 400;
        std::size_t n_elites = 15;
        std::size_t n_roulette = 15;
        static constexpr std::size_t children_per_pair = 2;
        std::size_t max_generations = 10; // evaluated generations, the initial population included
        double mutation_rate = 0.05;
        double mutation_sigma_fraction = 0.05;
        double convergence_tolerance = 1e-6;
        std::size_t convergence_patience = 2; // consecutive stalled generations before stopping
        std::uint64_t seed = 1;
        unsigned threads = 1;

        std::size_t n_parents() const noexcept { return n_elites + n_roulette; }
        std::size_t n_children() const noexcept { return n_parents() / 2 * children_per_pair; }

        void validate() const
        {
            if (n_elites == 0)
                throw std::invalid_argument("GAConfig: at least one elite is required");
            if (n_parents() % 2 != 0)
                throw std::invalid_argument("GAConfig: n_elites + n_roulette must be even");
            if (population_size < n_elites + n_children() || population_size < n_parents())
                throw std::invalid_argument("GAConfig: population too small for elites and children");
            if (max_generations == 0)
                throw std::invalid_argument("GAConfig: max_generations must be positive");
            if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0))
                throw std::invalid_argument("GAConfig: mutation_rate outside [0, 1]");
            if (!(mutation_sigma_fraction >= 0.0))
                throw std::invalid_argument("GAConfig: negative mutation_sigma_fraction");
            if (!(convergence_tolerance >= 0.0))
                throw std::invalid_argument("GAConfig: negative convergence_tolerance");
            if (convergence_patience == 0)
                throw std::invalid_argument("GAConfig: convergence_patience must be positive");
        }
    };

    using FitnessFunction = std::function<double(std::span<const double>)>;

    // A fitness callback threw; carries the generation and the individual's index
    class FitnessError : public std::runtime_error
    {
    public:
        FitnessError(std::size_t generation, std::size_t index, const std::string &what)
            : std::runtime_error("fitness evaluation failed for individual " + std::to_string(index) + " of generation " +
                                 std::to_string(generation) + ": " + what),
              generation_(generation), index_(index) {}
        std::size_t generation() const noexcept { return generation_; }
        std::size_t index() const noexcept { return index_; }

    private:
        std::size_t generation_, index_;
    };

    inline Individual random_individual(const GeneSpec &spec, SubstreamRng &rng)
    {
        Individual ind;
        ind.genes.resize(spec.size());
        for (std::size_t k = 0; k < spec.size(); ++k)
            ind.genes[k] = rng.uniform(spec.genes[k].lower, spec.genes[k].upper);
        return ind;
    }

    inline Population init_population(const GeneSpec &spec, const GAConfig &config)
    {
        spec.validate();
        Population pop(config.population_size);
        for (std::size_t i = 0; i < pop.size(); ++i)
        {
            SubstreamRng rng(SeedSpec{config.seed, i}, Purpose::ga_init);
            pop[i] = random_individual(spec, rng);
        }
        return pop;
    }

    struct Selection
    {
        std::vector<std::size_t> elites;   // indices into the population, best first
        std::vector<std::size_t> roulette; // indices, in rank order
    };

    // Population indices sorted best first; ties keep population order
    inline std::vector<std::size_t> rank_order(const Population &pop)
    {
        std::vector<std::size_t> idx(pop.size());
        std::iota(idx.begin(), idx.end(), std::size_t(0));
        for (const auto &ind : pop)
            if (!ind.fitness)
                throw std::invalid_argument("rank_and_select: population contains unevaluated individuals");
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b)
                         { return *pop[a].fitness < *pop[b].fitness; });
        return idx;
    }

    // Elites are the n_elites best. The roulette then draws n_roulette of the others without replacement,
    // each with weight (worst remaining fitness - own fitness); a zero total weight falls back to uniform.
    inline Selection rank_and_select(const Population &pop, std::size_t n_elites, std::size_t n_roulette, SubstreamRng &rng)
    {
        if (n_elites + n_roulette > pop.size())
            throw std::invalid_argument("rank_and_select: population smaller than elites plus roulette picks");
        const auto ranked = rank_order(pop);
        Selection sel;
        sel.elites.assign(ranked.begin(), ranked.begin() + std::ptrdiff_t(n_elites));

        std::vector<std::size_t> pool(ranked.begin() + std::ptrdiff_t(n_elites), ranked.end()); // rank positions kept sorted
        double worst = -std::numeric_limits<double>::infinity();
        for (std::size_t i : pool)
            worst = std::max(worst, *pop[i].fitness);
        std::vector<double> weight(pool.size());
        for (std::size_t k = 0; k < pool.size(); ++k)
            weight[k] = worst - *pop[pool[k]].fitness;

        std::vector<std::size_t> picked_positions;
        std::vector<bool> taken(pool.size(), false);
        for (std::size_t n = 0; n < n_roulette; ++n)
        {
            double total = 0.0;
            std::size_t available = 0;
            for (std::size_t k = 0; k < pool.size(); ++k)
                if (!taken[k])
                {
                    total += weight[k];
                    ++available;
                }
            std::size_t chosen = pool.size();
            if (total > 0.0 && std::isfinite(total))
            {
                double target = rng.uniform() * total;
                for (std::size_t k = 0; k < pool.size(); ++k)
                {
                    if (taken[k] || weight[k] <= 0.0)
                        continue;
                    chosen = k;
                    target -= weight[k];
                    if (target < 0.0)
                        break;
                }
            }
            else
            {
                auto nth = std::size_t(rng.uniform() * double(available));
                for (std::size_t k = 0; k < pool.size(); ++k)
                    if (!taken[k] && nth-- == 0)
                    {
                        chosen = k;
                        break;
                    }
            }
            taken[chosen] = true;
            picked_positions.push_back(chosen);
        }
        std::sort(picked_positions.begin(), picked_positions.end());
        for (std::size_t k : picked_positions)
            sel.roulette.push_back(pool[k]);
        return sel;
    }

    // Blend crossover: per gene beta ~ U[-0.1, 1.1], children beta*a + (1-beta)*b and (1-beta)*a + beta*b, clamped
    inline std::pair<Individual, Individual> crossover(const Individual &a, const Individual &b, const GeneSpec &spec, SubstreamRng &rng)
    {
        if (a.genes.size() != spec.size() || b.genes.size() != spec.size())
            throw std::invalid_argument("crossover: parents do not match the gene spec");
        Individual c1, c2;
        c1.genes.resize(spec.size());
        c2.genes.resize(spec.size());
        for (std::size_t k = 0; k < spec.size(); ++k)
        {
            const double beta = rng.uniform(-0.1, 1.1);
            c1.genes[k] = spec.clamp(k, beta * a.genes[k] + (1.0 - beta) * b.genes[k]);
            c2.genes[k] = spec.clamp(k, (1.0 - beta) * a.genes[k] + beta * b.genes[k]);
        }
        return {std::move(c1), std::move(c2)};
    }

    // Each gene, with probability mutation_rate, gets N(0, (sigma_fraction * range)^2) noise, clamped.
    inline Individual mutate(Individual ind, const GeneSpec &spec, const GAConfig &config, SubstreamRng &rng)
    {
        if (config.mutation_rate <= 0.0)
            return ind;
        bool changed = false;
        for (std::size_t k = 0; k < spec.size(); ++k)
        {
            if (rng.uniform() >= config.mutation_rate)
                continue;
            const double sigma = config.mutation_sigma_fraction * (spec.genes[k].upper - spec.genes[k].lower);
            ind.genes[k] = spec.clamp(k, ind.genes[k] + sigma * rng.normal());
            changed = true;
        }
        if (changed)
            ind.fitness.reset();
        return ind;
    }

    struct TraceRow
    {
        std::size_t generation;
        double best;
        double mean;
        std::size_t evaluations; // cumulative
    };

    struct GAResult
    {
        Individual best;
        std::vector<TraceRow> trace;
        std::size_t non_finite_fitness = 0; // evaluations replaced by the worst fitness
        bool converged = false;
    };

    namespace detail
    {
        inline std::size_t evaluate(Population &pop, const FitnessFunction &fitness, std::size_t generation, unsigned threads,
                                    std::size_t &non_finite)
        {
            std::vector<std::size_t> todo;
            for (std::size_t i = 0; i < pop.size(); ++i)
                if (!pop[i].fitness)
                    todo.push_back(i);
            std::vector<double> values(todo.size());
            parallel_for(todo.size(), threads, [&](std::size_t k)
                         {
                const std::size_t i = todo[k];
                try
                {
                    values[k] = fitness(std::span<const double>(pop[i].genes));
                }
                catch (const std::exception &e)
                {
                    throw FitnessError(generation, i, e.what());
                } });

            double worst = -std::numeric_limits<double>::infinity();
            for (const auto &ind : pop)
                if (ind.fitness)
                    worst = std::max(worst, *ind.fitness);
            for (double v : values)
                if (std::isfinite(v))
                    worst = std::max(worst, v);
            if (!std::isfinite(worst))
                worst = std::numeric_limits<double>::max();
            for (std::size_t k = 0; k < todo.size(); ++k)
            {
                double v = values[k];
                if (!std::isfinite(v))
                {
                    v = worst;
                    ++non_finite;
                }
                pop[todo[k]].fitness = v;
            }
            return todo.size();
        }

        inline TraceRow summarize(const Population &pop, std::size_t generation, std::size_t evaluations)
        {
            double best = std::numeric_limits<double>::infinity(), sum = 0.0;
            for (const auto &ind : pop)
            {
                best = std::min(best, *ind.fitness);
                sum += *ind.fitness;
            }
            return {generation, best, sum / double(pop.size()), evaluations};
        }
    }

    // Next generation from an evaluated one: elites survive with their fitness, elites and roulette
    // picks are paired in rank order (one combined list, consecutive pairs), every pair yields two
    // mutated children, and fresh uniform individuals fill the population back up.
    inline Population next_generation(const Population &pop, const GeneSpec &spec, const GAConfig &config, std::size_t generation)
    {
        SubstreamRng sel_rng(SeedSpec{config.seed, generation}, Purpose::ga_roulette);
        const Selection sel = rank_and_select(pop, config.n_elites, config.n_roulette, sel_rng);

        std::vector<std::size_t> parents(sel.elites);
        parents.insert(parents.end(), sel.roulette.begin(), sel.roulette.end());

        Population next;
        next.reserve(config.population_size);
        for (std::size_t i : sel.elites)
            next.push_back(pop[i]);
        for (std::size_t k = 0; k + 1 < parents.size(); k += 2)
        {
            SubstreamRng cx_rng(SeedSpec{config.seed, generation}, Purpose::ga_crossover, 0, std::uint32_t(k / 2));
            auto [c1, c2] = crossover(pop[parents[k]], pop[parents[k + 1]], spec, cx_rng);
            SubstreamRng m1(SeedSpec{config.seed, generation}, Purpose::ga_mutation, 0, std::uint32_t(k));
            SubstreamRng m2(SeedSpec{config.seed, generation}, Purpose::ga_mutation, 0, std::uint32_t(k + 1));
            next.push_back(mutate(std::move(c1), spec, config, m1));
            next.push_back(mutate(std::move(c2), spec, config, m2));
        }
        for (std::size_t i = next.size(); i < config.population_size; ++i)
        {
            SubstreamRng rng(SeedSpec{config.seed, i}, Purpose::ga_refill, std::uint32_t(generation));
            next.push_back(random_individual(spec, rng));
        }
        return next;
    }

    // Evaluate, select, reproduce until max_generations or until the best fitness has improved by less than
    // convergence_tolerance (relative) in each of convergence_patience consecutive generations. Under
    // elitism a single stalled generation is common early on, so one stall alone does not stop the run.
    inline GAResult run_ga(const GeneSpec &spec, const GAConfig &config, const FitnessFunction &fitness)
    {
        spec.validate();
        config.validate();
        GAResult result;
        Population pop = init_population(spec, config);
        std::size_t evaluations = detail::evaluate(pop, fitness, 0, config.threads, result.non_finite_fitness);
        result.trace.push_back(detail::summarize(pop, 0, evaluations));

        std::size_t stalled = 0;
        for (std::size_t gen = 1; gen < config.max_generations; ++gen)
        {
            pop = next_generation(pop, spec, config, gen);
            evaluations += detail::evaluate(pop, fitness, gen, config.threads, result.non_finite_fitness);
            result.trace.push_back(detail::summarize(pop, gen, evaluations));
            const double prev = result.trace[result.trace.size() - 2].best;
            const double now = result.trace.back().best;
            stalled = prev - now < config.convergence_tolerance * std::abs(prev) ? stalled + 1 : 0;
            if (stalled >= config.convergence_patience)
            {
                result.converged = true;
                break;
            }
        }
        result.best = pop[rank_order(pop).front()];
        return result;
    }

    inline void write_trace_csv(std::ostream &out, const std::vector<TraceRow> &trace)
    {
        out << "generation,best,mean,evaluations\n";
        char buf[128];
        for (const auto &t : trace)
        {
            std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%zu\n", t.generation, t.best, t.mean, t.evaluations);
            out << buf;
        }
    }

    // sum (g_k - center)^2
    inline FitnessFunction sphere_fitness(double center = 0.3)
    {
        return [center](std::span<const double> g)
        {
            double s = 0.0;
            for (double x : g)
                s += (x - center) * (x - center);
            return s;
        };
    }

    using ModelMapping = std::function<AnalyticModel(std::span<const double>)>;

    struct EfficiencyFitnessOptions
    {
        std::vector<double> band;                 // Hz
        EnvironmentKind environment = EnvironmentKind::random_los;
        StreamMode mode = StreamMode::two_bitstream;
        CoverageRegion coverage = CoverageRegion::sector_120();
        SimulationOptions simulation{};           // fixed seed: common random numbers across individuals
        EvaluationPolicy policy{};
        double grid_step_deg = 2.0;
        std::optional<double> min_efficiency_db;  // optional acceptability constraint; violators get +inf
    };

    // Worst-over-band MIMO efficiency of the surrogate antenna, negated (dB) so that lower is better
    inline double efficiency_objective(const AnalyticModel &model, const EfficiencyFitnessOptions &opt, const DetectionSamples &reference)
    {
        FarFieldGrid grid;
        try
        {
            grid = make_analytic_farfield(model, opt.grid_step_deg, opt.grid_step_deg, opt.band);
        }
        catch (const std::invalid_argument &)
        {
            return std::numeric_limits<double>::infinity(); // degenerate antenna
        }
        double worst_db = std::numeric_limits<double>::infinity();
        for (double f : opt.band)
        {
            const DetectionSamples aut = simulate_detection(grid, opt.environment, opt.mode, opt.coverage, f, opt.simulation);
            const EfficiencyResult r = efficiency_from_samples(aut, reference, opt.mode, opt.policy);
            worst_db = std::min(worst_db, r.linear > 0.0 ? r.db() : -std::numeric_limits<double>::infinity());
        }
        if (opt.min_efficiency_db && !(worst_db >= *opt.min_efficiency_db))
            return std::numeric_limits<double>::infinity();
        return -worst_db;
    }

    inline FitnessFunction efficiency_fitness(ModelMapping mapping, EfficiencyFitnessOptions opt)
    {
        if (opt.band.empty())
            throw std::invalid_argument("efficiency_fitness: empty frequency band");
        auto reference = std::make_shared<const DetectionSamples>(
            reference_samples(opt.coverage, opt.environment, opt.mode, opt.simulation, opt.policy));
        auto options = std::make_shared<const EfficiencyFitnessOptions>(std::move(opt));
        return [mapping = std::move(mapping), options, reference](std::span<const double> genes)
        {
            return efficiency_objective(mapping(genes), *options, *reference);
        };
    }
}

#endif
