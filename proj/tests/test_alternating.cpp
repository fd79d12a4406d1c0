// SPDX-License-Identifier: Apache-2.0
//
// nfdma: near-field localization with dynamic metasurface antennas
// Copyright (C) 2026 The nfdma Authors
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
#include "nfdma/nfdma.hpp"

#include <gtest/gtest.h>

#include <filesystem>

using namespace nfdma;

namespace
{
    const double f = 28e9;
    const auto half = array_layout::strips({5, 48, 0.005, 0.005});
    const auto wg = waveguide_model::defaults(5, f);
    const polar_position truth{6.0, pi / 3};
    const auto coarse = search_grid::make(1.2, 28.8);
    const auto table =
        std::make_shared<const steering_table>(half, f, gain_model::unit, coarse.d_values, coarse.theta_values);

    alternating_config make_cfg(std::size_t K, std::uint64_t init_seed)
    {
        alternating_config c;
        c.iterations = K;
        c.initial_weights = init_seed;
        c.grid = coarse;
        c.table = table;
        return c;
    }

    // ensemble objective tr[P_DMA(truth) R] with R = Q H (g g^H + np I) H^H Q^H
    double ensemble_objective(const dma_weights &w, const waveguide_matrix &h, const std::vector<cdouble> &g, double np)
    {
        const auto u = apply_weights(w, h, g);
        const auto c = combined_weights(w, h);
        double uu = 0.0, noise = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i)
        {
            double d = 0.0;
            for (std::size_t l = 0; l < w.n_per_strip(); ++l)
                d += std::norm(c[i * w.n_per_strip() + l]);
            uu += std::norm(u[i]);
            noise += std::norm(u[i]) * d;
        }
        return uu + np * noise / uu;
    }
}

TEST(Alternating, TraceLengthAndDeterminism)
{
    const auto sc = dma_scenario::make(half, wg, truth, f, gain_model::unit, noise_power_from_snr_db(0.0), 64);
    const auto a = run_alternating(sc, make_cfg(3, 5), 99);
    const auto b = run_alternating(sc, make_cfg(3, 5), 99);
    ASSERT_EQ(a.records.size(), 4u);
    for (std::size_t k = 0; k < 4; ++k)
    {
        EXPECT_EQ(a.records[k].k, k);
        EXPECT_EQ(a.records[k].estimate.d, b.records[k].estimate.d);
        EXPECT_EQ(a.records[k].estimate.theta, b.records[k].estimate.theta);
        EXPECT_EQ(a.records[k].objective, b.records[k].objective);
        EXPECT_EQ(a.records[k].weight_checksum, b.records[k].weight_checksum);
        EXPECT_NEAR(a.records[k].error_m, position_error(half, a.records[k].estimate, truth), 1e-12);
    }
    EXPECT_EQ(a.final_estimate.d, a.records.back().estimate.d);
    EXPECT_EQ(a.final_weights, b.final_weights);
}

TEST(Alternating, NoiselessFixedPoint)
{
    const auto snapped = coarse.with_node(truth);
    const auto sc = dma_scenario::make(half, wg, truth, f, gain_model::unit, 0.0, 4);
    auto cfg = make_cfg(4, 17);
    cfg.grid = snapped;
    cfg.table = nullptr;
    const auto tr = run_alternating(sc, cfg, 1);
    const auto oracle = project_lorentzian(tune_weights(half, wg, truth, f));
    for (std::size_t k = 1; k < tr.records.size(); ++k)
    {
        EXPECT_EQ(tr.records[k].estimate.d, truth.d) << "k=" << k;
        EXPECT_EQ(tr.records[k].estimate.theta, truth.theta) << "k=" << k;
        EXPECT_LT(tr.records[k].error_m, 1e-9);
        if (k >= 2)
            EXPECT_EQ(tr.records[k].weight_checksum, oracle.checksum());
    }
    EXPECT_EQ(tr.final_weights, oracle);
}

TEST(Alternating, PreTunedSingleIterationMatchesSingleShot)
{
    const double np = noise_power_from_snr_db(0.0);
    const auto sc = dma_scenario::make(half, wg, truth, f, gain_model::unit, np, 64);
    const auto w = project_lorentzian(tune_weights(half, wg, truth, f));
    alternating_config cfg = make_cfg(1, 0);
    cfg.initial_weights = w;
    const std::uint64_t seed = 2024;
    const auto tr = run_alternating(sc, cfg, seed);
    const auto y = sample_snapshots(sc.channel, sc.h, w, 64, np, iteration_noise_seed(seed, 0));
    const auto single = grid_search_mle(dma_likelihood(half, f, gain_model::unit, sc.h, w, y, table), coarse);
    EXPECT_EQ(tr.records.front().estimate.d, single.estimate.d);
    EXPECT_EQ(tr.records.front().estimate.theta, single.estimate.theta);
    EXPECT_EQ(tr.records.front().weight_checksum, w.checksum());

    // noiseless, the final estimate of K = 1 is the single-shot tuned estimate as well
    const auto sc0 = dma_scenario::make(half, wg, truth, f, gain_model::unit, 0.0, 4);
    cfg.grid = coarse.with_node(truth);
    cfg.table = nullptr;
    const auto tr0 = run_alternating(sc0, cfg, seed);
    EXPECT_EQ(tr0.final_estimate.d, truth.d);
    EXPECT_EQ(tr0.final_estimate.theta, truth.theta);
}

TEST(Alternating, ReusedObservationsWithoutResampling)
{
    const auto sc = dma_scenario::make(half, wg, truth, f, gain_model::unit, 1.0, 16);
    auto cfg = make_cfg(2, 3);
    cfg.resample_per_iteration = false;
    const auto tr = run_alternating(sc, cfg, 8);
    // k = 0 is unchanged by the ablation
    const auto ref = run_alternating(sc, make_cfg(2, 3), 8);
    EXPECT_EQ(tr.records[0].estimate.d, ref.records[0].estimate.d);
    EXPECT_EQ(tr.records[0].objective, ref.records[0].objective);
}

TEST(Alternating, Errors)
{
    const auto sc = dma_scenario::make(half, wg, truth, f, gain_model::unit, 1.0, 4);
    EXPECT_THROW(run_alternating(sc, make_cfg(0, 1), 1), config_error);
    auto cfg = make_cfg(2, 1);
    cfg.initial_weights = dma_weights(5, 48, std::vector<double>(240, 1.5 * pi), weight_regime::lorentzian);
    try
    {
        run_alternating(sc, cfg, 1);
        FAIL() << "expected alternating_failure";
    }
    catch (const alternating_failure &e)
    {
        EXPECT_TRUE(e.partial().records.empty());
    }
    cfg.initial_weights = random_weights(array_layout::strips({5, 96, 0.0025, 0.005}), weight_regime::lorentzian, 1);
    EXPECT_THROW(run_alternating(sc, cfg, 1), config_error);
}

TEST(Alternating, WeightUpdateIgnoresNoise)
{
    // two scenarios with different noise: equal estimates at k imply equal weights at k + 1
    const auto a = dma_scenario::make(half, wg, truth, f, gain_model::unit, 0.0, 4);
    auto cfg = make_cfg(1, 0);
    cfg.initial_weights = project_lorentzian(tune_weights(half, wg, {4.0, 0.9}, f));
    const auto tr = run_alternating(a, cfg, 3);
    const auto expect = project_lorentzian(tune_weights(half, wg, tr.records[0].estimate, f));
    EXPECT_EQ(tr.records[1].weight_checksum, expect.checksum());
}

TEST(Alternating, TraceCsv)
{
    const auto dir = std::filesystem::temp_directory_path() / "nfdma_trace_test";
    std::filesystem::create_directories(dir);
    const auto sc = dma_scenario::make(half, wg, truth, f, gain_model::unit, 1.0, 8);
    const auto tr = run_alternating(sc, make_cfg(2, 1), 1);
    write_trace_csv(tr, (dir / "t.csv").string());
    std::ifstream in(dir / "t.csv");
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "k,d_k,theta_k,objective,error_m");
    int rows = 0;
    while (std::getline(in, line))
        ++rows;
    EXPECT_EQ(rows, 3);
    std::filesystem::remove_all(dir);
}

// Median final error over 100 seeded trials at -5 dB against the iteration-0 error
TEST(AlternatingMonteCarlo, FinalErrorBeatsRandomInitialization)
{
    const double np = noise_power_from_snr_db(-5.0);
    const auto sc = dma_scenario::make(half, wg, truth, f, gain_model::unit, np, 64);
    const std::size_t trials = 100;
    std::vector<double> first(trials), last(trials);
    parallel_for(trials, default_workers(), [&](std::size_t t)
                 {
        const std::uint64_t seed = derive_seed(1, {stream::trial, t});
        const auto tr = run_alternating(sc, make_cfg(5, seed), seed);
        first[t] = tr.records.front().error_m;
        last[t] = tr.records.back().error_m; });
    auto median = [](std::vector<double> v)
    {
        std::ranges::sort(v);
        return 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
    };
    const double m0 = median(first), mk = median(last);
    RecordProperty("median_iteration0_error_m", std::to_string(m0));
    RecordProperty("median_final_error_m", std::to_string(mk));
    EXPECT_LT(mk, m0) << "median iteration-0 error " << m0 << " m, median final error " << mk << " m";
}

// Whenever the estimate moved closer to the truth, the retuned weights capture at least
// as much ensemble energy at the truth; required in at least 90% of such events.
TEST(AlternatingMonteCarlo, FocusingObjectiveImprovesWithCloserEstimates)
{
    const double np = noise_power_from_snr_db(-5.0);
    const auto sc = dma_scenario::make(half, wg, truth, f, gain_model::unit, np, 64);
    const std::size_t trials = 40;
    std::vector<std::pair<int, int>> counts(trials);
    parallel_for(trials, default_workers(), [&](std::size_t t)
                 {
        const std::uint64_t seed = derive_seed(2, {stream::trial, t});
        const auto tr = run_alternating(sc, make_cfg(5, seed), seed);
        for (std::size_t k = 1; k < tr.records.size(); ++k)
        {
            if (!(tr.records[k].error_m < tr.records[k - 1].error_m))
                continue;
            const auto qk = project_lorentzian(tune_weights(half, wg, tr.records[k - 1].estimate, f));
            const auto qk1 = project_lorentzian(tune_weights(half, wg, tr.records[k].estimate, f));
            ++counts[t].second;
            if (ensemble_objective(qk1, sc.h, sc.channel.g, np) >= ensemble_objective(qk, sc.h, sc.channel.g, np))
                ++counts[t].first;
        } });
    int good = 0, events = 0;
    for (auto [g, e] : counts)
    {
        good += g;
        events += e;
    }
    ASSERT_GT(events, 0);
    EXPECT_GE(double(good), 0.9 * double(events)) << good << " of " << events;
}
