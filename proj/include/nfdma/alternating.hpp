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
#ifndef NFDMA_ALTERNATING_HPP
#define NFDMA_ALTERNATING_HPP

#include "nfdma/likelihood.hpp"

namespace nfdma
{
    // Everything about one DMA localization problem that stays fixed across iterations
    struct dma_scenario
    {
        const array_layout *layout = nullptr;
        waveguide_model waveguide;
        waveguide_matrix h;
        channel_realization channel;
        double noise_power = 0.0;
        std::size_t snapshots = 64;
        cdouble pilot = 1.0;

        static dma_scenario make(const array_layout &layout, const waveguide_model &wg, const polar_position &truth,
                                 double carrier_hz, gain_model gain, double noise_power, std::size_t snapshots)
        {
            return {&layout, wg, build_waveguide_matrix(layout, wg), build_channel(layout, truth, carrier_hz, gain),
                    noise_power, snapshots, 1.0};
        }

        double carrier_hz() const { return channel.carrier_hz; }
    };

    struct alternating_config
    {
        std::size_t iterations = 5; // K
        // Random Lorentzian weights from a seed, or explicit initial weights
        std::variant<std::uint64_t, dma_weights> initial_weights = std::uint64_t{0};
        search_grid grid = search_grid::make(1.2, 28.8);
        bool resample_per_iteration = true;
        std::shared_ptr<const steering_table> table; // optional cache for grid's coarse stage
    };

    struct iteration_record
    {
        std::size_t k = 0;
        polar_position estimate;
        double objective = 0.0;
        std::uint64_t weight_checksum = 0;
        double error_m = 0.0;
    };

    struct alternating_trace
    {
        std::vector<iteration_record> records; // K + 1 entries
        polar_position final_estimate;
        dma_weights final_weights;
    };

    // Estimation failure inside the loop; carries the iterations completed so far
    class alternating_failure : public estimation_failure
    {
    public:
        alternating_failure(const std::string &what, alternating_trace partial)
            : estimation_failure(what), partial_(std::move(partial)) {}
        const alternating_trace &partial() const noexcept { return partial_; }

    private:
        alternating_trace partial_;
    };

    inline double position_error(const array_layout &layout, const polar_position &a, const polar_position &b)
    {
        return norm(to_cartesian(layout, a) - to_cartesian(layout, b));
    }

    inline std::uint64_t iteration_noise_seed(std::uint64_t seed, std::size_t k)
    {
        return derive_seed(seed, {stream::iteration, k, stream::noise});
    }

    // Alternating localization and focusing: estimate under Q^k, retune Q^{k+1} on the
    // estimate (phase-only optimum projected onto the Lorentzian set), observe again.
    inline alternating_trace run_alternating(const dma_scenario &sc, const alternating_config &cfg, std::uint64_t seed)
    {
        if (cfg.iterations < 1)
            throw config_error("alternating estimator needs at least one iteration");
        if (!sc.layout)
            throw config_error("scenario has no layout");
        const array_layout &layout = *sc.layout;

        dma_weights q = std::holds_alternative<dma_weights>(cfg.initial_weights)
                            ? std::get<dma_weights>(cfg.initial_weights)
                            : random_weights(layout, weight_regime::lorentzian,
                                             derive_seed(std::get<std::uint64_t>(cfg.initial_weights), {stream::weights}));
        q.check_layout(layout);

        alternating_trace trace;
        for (std::size_t k = 0; k <= cfg.iterations; ++k)
        {
            const std::uint64_t noise_seed = iteration_noise_seed(seed, cfg.resample_per_iteration ? k : 0);
            const auto y = sample_snapshots(sc.channel, sc.h, q, sc.snapshots, sc.noise_power, noise_seed, sc.pilot);
            const dma_likelihood f(layout, sc.carrier_hz(), sc.channel.gain, sc.h, q, y, cfg.table);

            search_result est;
            try
            {
                est = grid_search_mle(f, cfg.grid);
            }
            catch (const estimation_failure &e)
            {
                trace.final_weights = q;
                throw alternating_failure(std::string("iteration ") + std::to_string(k) + ": " + e.what(), trace);
            }
            trace.records.push_back({k, est.estimate, est.value, q.checksum(),
                                     position_error(layout, est.estimate, sc.channel.source)});
            if (k == cfg.iterations)
                break;
            q = project_lorentzian(tune_weights(layout, sc.waveguide, est.estimate, sc.carrier_hz()));
        }
        trace.final_estimate = trace.records.back().estimate;
        trace.final_weights = std::move(q);
        return trace;
    }

    inline void write_trace_csv(const alternating_trace &t, const std::string &path)
    {
        std::ofstream f(path);
        if (!f)
            throw io_error("cannot open trace file for writing", path);
        f << "k,d_k,theta_k,objective,error_m\n" << std::setprecision(17);
        for (const auto &r : t.records)
            f << r.k << ',' << r.estimate.d << ',' << r.estimate.theta << ',' << r.objective << ',' << r.error_m << '\n';
        if (!f)
            throw io_error("failed writing trace file", path);
    }
}

#endif
