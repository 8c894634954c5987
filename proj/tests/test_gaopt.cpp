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

#include "test_support.hpp"

#include <mimoeff/gaopt.hpp>

#include <gtest/gtest.h>

#include <atomic>
#include <sstream>

using namespace mimoeff;
using namespace mimoeff::ga;

namespace
{
    GeneSpec unit_box(std::size_t n)
    {
        GeneSpec s;
        for (std::size_t k = 0; k < n; ++k)
            s.genes.push_back({"g" + std::to_string(k), 0.0, 1.0});
        return s;
    }

    Individual with_fitness(std::vector<double> genes, double f)
    {
        Individual i;
        i.genes = std::move(genes);
        i.fitness = f;
        return i;
    }
}

TEST(GeneSpecTest, Validation)
{
    GeneSpec s{{{"a", 0.0, 1.0}, {"b", -2.0, 3.0}}};
    EXPECT_NO_THROW(s.validate());
    s.genes[1].upper = -2.0;
    EXPECT_THROW(s.validate(), std::invalid_argument);
    GeneSpec dup{{{"a", 0.0, 1.0}, {"a", 0.0, 2.0}}};
    EXPECT_THROW(dup.validate(), std::invalid_argument);
    EXPECT_THROW(GeneSpec{}.validate(), std::invalid_argument);
}

TEST(GAConfigTest, Validation)
{
    GAConfig c;
    EXPECT_NO_THROW(c.validate());
    EXPECT_EQ(c.n_children(), 30u);
    c.n_roulette = 14;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = GAConfig{};
    c.population_size = 40;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = GAConfig{};
    c.mutation_rate = 1.5;
    EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(InitPopulation, BoundsMeanAndDeterminism)
{
    GeneSpec spec{{{"a", -1.0, 3.0}, {"b", 10.0, 11.0}}};
    GAConfig c;
    c.population_size = 100000;
    const auto pop = init_population(spec, c);
    double sa = 0.0, sb = 0.0;
    for (const auto &ind : pop)
    {
        ASSERT_GE(ind.genes[0], -1.0);
        ASSERT_LE(ind.genes[0], 3.0);
        ASSERT_GE(ind.genes[1], 10.0);
        ASSERT_LE(ind.genes[1], 11.0);
        ASSERT_FALSE(ind.fitness.has_value());
        sa += ind.genes[0];
        sb += ind.genes[1];
    }
    EXPECT_NEAR(sa / 1e5, 1.0, 0.01 * 4.0);
    EXPECT_NEAR(sb / 1e5, 10.5, 0.01 * 1.0);
    c.population_size = 400;
    const auto a = init_population(spec, c), b = init_population(spec, c);
    for (std::size_t i = 0; i < a.size(); ++i)
        EXPECT_EQ(a[i].genes, b[i].genes);
    c.seed = 2;
    EXPECT_NE(init_population(spec, c)[0].genes, a[0].genes);
}

TEST(Selection, ElitesAreTheBest)
{
    Population pop;
    SubstreamRng order({1, 0}, Purpose::test);
    std::vector<int> f(400);
    std::iota(f.begin(), f.end(), 1);
    for (std::size_t i = f.size() - 1; i > 0; --i)
        std::swap(f[i], f[std::size_t(order.next_u64() % (i + 1))]);
    for (int v : f)
        pop.push_back(with_fitness({0.5}, double(v)));
    SubstreamRng rng({2, 0}, Purpose::test);
    const auto sel = rank_and_select(pop, 15, 15, rng);
    ASSERT_EQ(sel.elites.size(), 15u);
    for (std::size_t k = 0; k < 15; ++k)
        EXPECT_EQ(*pop[sel.elites[k]].fitness, double(k + 1));
    ASSERT_EQ(sel.roulette.size(), 15u);
    std::set<std::size_t> distinct(sel.roulette.begin(), sel.roulette.end());
    EXPECT_EQ(distinct.size(), 15u);
    for (std::size_t k = 0; k < 15; ++k)
    {
        EXPECT_GT(*pop[sel.roulette[k]].fitness, 15.0);
        if (k > 0)
        {
            EXPECT_LT(*pop[sel.roulette[k - 1]].fitness, *pop[sel.roulette[k]].fitness);
        }
    }
    pop[3].fitness.reset();
    EXPECT_THROW(rank_and_select(pop, 15, 15, rng), std::invalid_argument);
}

TEST(Selection, RouletteFavorsBetterHalf)
{
    Population pop;
    for (int v = 1; v <= 400; ++v)
        pop.push_back(with_fitness({0.5}, double(v)));
    std::size_t better = 0, worse = 0;
    const double median = 15.0 + 385.0 / 2.0;
    for (std::uint64_t t = 0; t < 10000; ++t)
    {
        SubstreamRng rng({3, t}, Purpose::test);
        for (std::size_t i : rank_and_select(pop, 15, 15, rng).roulette)
            (*pop[i].fitness < median ? better : worse)++;
    }
    EXPECT_GT(better, worse);
    // weight (400 - f) over f = 16..400: mass below the median is ~3/4 of the total
    EXPECT_NEAR(double(better) / double(better + worse), 0.75, 0.02);
}

TEST(Selection, EqualFitnessIsUniformWithoutReplacement)
{
    Population pop;
    for (int v = 0; v < 40; ++v)
        pop.push_back(with_fitness({0.5}, 7.0));
    std::vector<std::size_t> count(40, 0);
    const int trials = 20000;
    for (int t = 0; t < trials; ++t)
    {
        SubstreamRng rng({4, std::uint64_t(t)}, Purpose::test);
        const auto sel = rank_and_select(pop, 5, 10, rng);
        std::set<std::size_t> d(sel.roulette.begin(), sel.roulette.end());
        ASSERT_EQ(d.size(), 10u);
        for (std::size_t i : sel.roulette)
        {
            ASSERT_GE(i, 5u); // stable ranking: the first five are the elites
            ++count[i];
        }
    }
    const double expect = trials * 10.0 / 35.0, sigma = std::sqrt(expect * (1.0 - 10.0 / 35.0));
    for (std::size_t i = 5; i < 40; ++i)
        EXPECT_LT(std::abs(double(count[i]) - expect), 5.0 * sigma) << i;
}

TEST(Crossover, IdenticalParentsBoundsAndMean)
{
    const GeneSpec spec = unit_box(3);
    SubstreamRng rng({5, 0}, Purpose::test);
    const Individual p = with_fitness({0.1, 0.5, 0.9}, 1.0);
    const auto [c1, c2] = crossover(p, p, spec, rng);
    for (std::size_t k = 0; k < 3; ++k)
    {
        EXPECT_NEAR(c1.genes[k], p.genes[k], 1e-15);
        EXPECT_NEAR(c2.genes[k], p.genes[k], 1e-15);
    }
    EXPECT_FALSE(c1.fitness.has_value());
    const Individual a = with_fitness({0.2, 0.0, 1.0}, 1.0), b = with_fitness({0.6, 1.0, 0.0}, 2.0);
    double sum[3] = {};
    for (int t = 0; t < 10000; ++t)
    {
        const auto [x, y] = crossover(a, b, spec, rng);
        for (std::size_t k = 0; k < 3; ++k)
        {
            ASSERT_GE(x.genes[k], 0.0);
            ASSERT_LE(x.genes[k], 1.0);
            ASSERT_GE(y.genes[k], 0.0);
            ASSERT_LE(y.genes[k], 1.0);
            sum[k] += x.genes[k] + y.genes[k];
        }
    }
    EXPECT_NEAR(sum[0] / 20000.0, 0.4, 0.01 * 0.4);
    EXPECT_NEAR(sum[1] / 20000.0, 0.5, 0.01 * 0.5);
    EXPECT_THROW(crossover(with_fitness({0.1}, 0), b, spec, rng), std::invalid_argument);
}

TEST(Mutation, DisabledBoundsAndRate)
{
    const GeneSpec spec = unit_box(10);
    GAConfig c;
    SubstreamRng rng({6, 0}, Purpose::test);
    const Individual edge = with_fitness(std::vector<double>(10, 1.0), 3.0);
    GAConfig off = c;
    off.mutation_rate = 0.0;
    const auto same = mutate(edge, spec, off, rng);
    EXPECT_EQ(same.genes, edge.genes);
    EXPECT_EQ(same.fitness, edge.fitness);
    std::size_t changed = 0, total = 0;
    for (int t = 0; t < 10000; ++t)
    {
        const auto m = mutate(edge, spec, c, rng);
        for (std::size_t k = 0; k < 10; ++k)
        {
            ASSERT_GE(m.genes[k], 0.0);
            ASSERT_LE(m.genes[k], 1.0);
            // at the upper bound only downward moves survive the clamp, so count draws instead
            changed += m.genes[k] != 1.0;
            ++total;
        }
    }
    // half of the perturbations push past the bound and clamp back to 1.0
    EXPECT_NEAR(double(changed) / double(total), 0.5 * c.mutation_rate, 0.01 * 0.5 * c.mutation_rate * 10);
    const Individual mid = with_fitness(std::vector<double>(10, 0.5), 3.0);
    changed = total = 0;
    for (int t = 0; t < 10000; ++t)
    {
        const auto m = mutate(mid, spec, c, rng);
        for (std::size_t k = 0; k < 10; ++k)
        {
            changed += m.genes[k] != 0.5;
            ++total;
        }
        if (m.genes != mid.genes)
        {
            ASSERT_FALSE(m.fitness.has_value());
        }
    }
    EXPECT_NEAR(double(changed) / double(total), c.mutation_rate, 0.01);
    EXPECT_NEAR(double(changed) / double(total), c.mutation_rate, 0.1 * c.mutation_rate);
}

TEST(RunGa, SphereConvergesWithinFiveGenerations)
{
    GAConfig c;
    c.max_generations = 5;
    const auto r = run_ga(unit_box(5), c, sphere_fitness());
    ASSERT_LE(r.trace.size(), 5u);
    EXPECT_LT(r.trace.back().best, 1e-2);
    EXPECT_LT(r.best.fitness.value(), 1e-2);
    for (std::size_t g = 1; g < r.trace.size(); ++g)
        EXPECT_LE(r.trace[g].best, r.trace[g - 1].best); // elitism, exact
    EXPECT_EQ(r.trace[0].evaluations, 400u);
    EXPECT_EQ(r.non_finite_fitness, 0u);
}

TEST(RunGa, EveryGenerationWithinBoundsAndElitist)
{
    GeneSpec spec{{{"a", -5.0, -4.0}, {"b", 2.0, 9.0}, {"c", 0.0, 0.01}}};
    GAConfig c;
    c.population_size = 60;
    c.n_elites = 5;
    c.n_roulette = 7;
    c.max_generations = 12;
    c.convergence_tolerance = 0.0;
    c.mutation_rate = 0.3;
    std::atomic<bool> in_bounds{true};
    const auto fit = [&](std::span<const double> g)
    {
        for (std::size_t k = 0; k < 3; ++k)
            if (g[k] < spec.genes[k].lower || g[k] > spec.genes[k].upper)
                in_bounds = false;
        return std::sin(3.0 * g[0]) + std::cos(g[1]) + 100.0 * g[2];
    };
    const auto r = run_ga(spec, c, fit);
    EXPECT_TRUE(in_bounds);
    EXPECT_EQ(r.trace.size(), 12u);
    for (std::size_t g = 1; g < r.trace.size(); ++g)
        EXPECT_LE(r.trace[g].best, r.trace[g - 1].best);
}

TEST(RunGa, ConstantFitness)
{
    GAConfig c;
    c.max_generations = 4;
    c.convergence_tolerance = 0.0;
    const auto r = run_ga(unit_box(2), c, [](std::span<const double>)
                          { return 2.5; });
    EXPECT_EQ(r.trace.size(), 4u);
    for (const auto &t : r.trace)
        EXPECT_EQ(t.best, 2.5);
    // with the default tolerance a flat landscape stops once the patience is used up
    GAConfig d;
    d.max_generations = 10;
    const auto s = run_ga(unit_box(2), d, [](std::span<const double>)
                          { return 2.5; });
    EXPECT_TRUE(s.converged);
    EXPECT_EQ(s.trace.size(), 1u + d.convergence_patience);
    d.convergence_patience = 1;
    EXPECT_EQ(run_ga(unit_box(2), d, [](std::span<const double>)
                     { return 2.5; })
                  .trace.size(),
              2u);
}

TEST(RunGa, SameSeedIdenticalTraceAnyThreadCount)
{
    GAConfig c;
    c.max_generations = 4;
    c.convergence_tolerance = 0.0;
    const auto a = run_ga(unit_box(5), c, sphere_fitness());
    c.threads = 3;
    const auto b = run_ga(unit_box(5), c, sphere_fitness());
    std::ostringstream sa, sb;
    write_trace_csv(sa, a.trace);
    write_trace_csv(sb, b.trace);
    EXPECT_EQ(sa.str(), sb.str());
    EXPECT_EQ(a.best.genes, b.best.genes);
    EXPECT_EQ(sa.str().rfind("generation,best,mean,evaluations\n0,", 0), 0u);
    c.seed = 99;
    std::ostringstream sc;
    write_trace_csv(sc, run_ga(unit_box(5), c, sphere_fitness()).trace);
    EXPECT_NE(sc.str(), sa.str());
}

TEST(RunGa, FixedPointWithoutMutation)
{
    // every individual identical: crossover reproduces the parents, refills are the only novelty,
    // and a fitness that rewards the shared point keeps it as the elite set
    const GeneSpec spec = unit_box(2);
    GAConfig c;
    c.population_size = 40;
    c.n_elites = 4;
    c.n_roulette = 0;
    c.mutation_rate = 0.0;
    Population pop(40, with_fitness({0.25, 0.75}, 0.0));
    for (std::size_t i = 4; i < 40; ++i)
        pop[i].fitness = 1.0 + double(i);
    const auto next = next_generation(pop, spec, c, 1);
    ASSERT_EQ(next.size(), 40u);
    for (std::size_t i = 0; i < 4 + c.n_children(); ++i)
    {
        EXPECT_NEAR(next[i].genes[0], 0.25, 1e-15);
        EXPECT_NEAR(next[i].genes[1], 0.75, 1e-15);
    }
    for (std::size_t i = 0; i < 4; ++i)
        EXPECT_EQ(next[i].fitness, 0.0);
}

TEST(RunGa, NonFiniteFitnessGetsWorstAndIsCounted)
{
    GAConfig c;
    c.population_size = 50;
    c.n_elites = 4;
    c.n_roulette = 4;
    c.max_generations = 3;
    c.convergence_tolerance = 0.0;
    const auto r = run_ga(unit_box(2), c, [](std::span<const double> g)
                          { return g[0] < 0.2 ? std::nan("") : g[0]; });
    EXPECT_GT(r.non_finite_fitness, 0u);
    EXPECT_TRUE(std::isfinite(r.trace.back().mean));
    EXPECT_GE(r.best.genes[0], 0.2);
}

TEST(RunGa, FitnessExceptionNamesIndividual)
{
    GAConfig c;
    c.population_size = 40;
    c.n_elites = 4;
    c.n_roulette = 4;
    try
    {
        run_ga(unit_box(1), c, [](std::span<const double> g) -> double
               {
            if (g[0] > 0.9)
                throw std::runtime_error("solver diverged");
            return g[0]; });
        FAIL() << "expected FitnessError";
    }
    catch (const FitnessError &e)
    {
        EXPECT_NE(std::string(e.what()).find("solver diverged"), std::string::npos);
        EXPECT_LT(e.index(), 40u);
    }
}

TEST(EfficiencyFitness, ReferenceEquivalentIsZero)
{
    EfficiencyFitnessOptions o;
    o.band = {1e9, 1.2e9};
    o.coverage = CoverageRegion::full_sphere();
    o.simulation.realizations = 2000;
    const auto fit = efficiency_fitness([](std::span<const double> g)
                                        {
        AnalyticModel m{ModelKind::isotropic_dualpol, {}};
        m.e_tot = g[0];
        return m; },
                                        o);
    const double one[] = {1.0}, half[] = {0.5};
    EXPECT_NEAR(fit(one), 0.0, 1e-9);
    EXPECT_NEAR(fit(half) - fit(one), 3.0103, 1e-3);
    // identical genes, identical fitness
    EXPECT_EQ(fit(half), fit(half));
}

TEST(EfficiencyFitness, QuarterWaveBeatsLowProfileInRandomLos)
{
    // Lossless normalization removes the broadside collapse as h -> 0, so in sector-limited
    // multipath the more directive low-profile pair can win; the ordering is a line-of-sight property.
    for (EnvironmentKind env : {EnvironmentKind::random_los})
    {
        EfficiencyFitnessOptions o;
        o.band = {1e9};
        o.environment = env;
        o.simulation.realizations = 2000;
        o.simulation.n_waves = 100;
        const auto fit = efficiency_fitness([](std::span<const double> g)
                                            { return AnalyticModel{ModelKind::crossed_dipoles_over_ground, {g[0]}}; },
                                            o);
        const double q[] = {0.25}, low[] = {0.05};
        EXPECT_LT(fit(q), fit(low)) << to_string(env) << " " << fit(q) << " " << fit(low);
    }
}

TEST(EfficiencyFitness, ConstraintAndDegenerateAntenna)
{
    EfficiencyFitnessOptions o;
    o.band = {1e9};
    o.coverage = CoverageRegion::full_sphere();
    o.simulation.realizations = 1000;
    o.min_efficiency_db = -1.0;
    const auto fit = efficiency_fitness([](std::span<const double> g)
                                        {
        AnalyticModel m{ModelKind::isotropic_dualpol, {}};
        m.e_tot = g[0];
        return m; },
                                        o);
    const double ok[] = {0.9}, bad[] = {0.5}, zero[] = {0.0};
    EXPECT_TRUE(std::isfinite(fit(ok)));
    EXPECT_TRUE(std::isinf(fit(bad)));
    EXPECT_TRUE(std::isinf(fit(zero)));
    EXPECT_THROW(efficiency_fitness([](std::span<const double>)
                                    { return AnalyticModel{}; },
                                    EfficiencyFitnessOptions{}),
                 std::invalid_argument);
}
