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
#ifndef NFDMA_SIGNAL_MODEL_HPP
#define NFDMA_SIGNAL_MODEL_HPP

#include "nfdma/dma.hpp"

#include <cmath>
#include <variant>

namespace nfdma
{
    enum class gain_model
    {
        unit,      // a = 1
        free_space // a = lambda / (4 pi d)
    };

    inline std::string_view to_string(gain_model g) { return g == gain_model::unit ? "unit" : "free_space"; }

    inline gain_model parse_gain_model(std::string_view s)
    {
        if (s == "unit")
            return gain_model::unit;
        if (s == "free_space")
            return gain_model::free_space;
        throw config_error("unknown gain model '" + std::string(s) + "'");
    }

    // Writes a_{i,l}(d,theta) exp(-j v_{i,l}(d,theta)) for every element. `dist` is scratch
    // space of layout.size() entries.
    inline void steering_into(const array_layout &layout, const polar_position &pos, double carrier_hz, gain_model gain,
                              std::span<double> dist, std::span<cdouble> out)
    {
        source_distances(layout, pos, dist);
        const double k = two_pi * carrier_hz / speed_of_light;
        const double lam = wavelength(carrier_hz);
        for (std::size_t n = 0; n < out.size(); ++n)
        {
            const double a = gain == gain_model::unit ? 1.0 : lam / (4.0 * pi * dist[n]);
            const double v = k * dist[n];
            out[n] = {a * std::cos(v), -a * std::sin(v)};
        }
    }

    // Near-field steering vector s(d, theta); equals the channel g at the true position
    inline std::vector<cdouble> steering_vector(const array_layout &layout, const polar_position &pos, double carrier_hz,
                                                gain_model gain = gain_model::unit)
    {
        std::vector<double> dist(layout.size());
        std::vector<cdouble> s(layout.size());
        steering_into(layout, pos, carrier_hz, gain, dist, s);
        return s;
    }

    struct channel_realization
    {
        std::vector<cdouble> g;
        gain_model gain = gain_model::unit;
        double carrier_hz = 28e9;
        polar_position source;
    };

    inline channel_realization build_channel(const array_layout &layout, const polar_position &src, double carrier_hz,
                                             gain_model gain = gain_model::unit)
    {
        check_position(src);
        if (!(carrier_hz > 0.0))
            throw config_error("carrier frequency must be positive");
        return {steering_vector(layout, src, carrier_hz, gain), gain, carrier_hz, src};
    }

    struct fully_digital
    {
    };

    // Either every element has its own RF chain or the strips are combined by Q
    using front_end = std::variant<fully_digital, dma_weights>;

    // T observation vectors of a common dimension, stored snapshot-major
    struct snapshot_batch
    {
        std::vector<cdouble> data;
        std::size_t dim = 0;
        std::size_t snapshot_count = 0;
        double noise_power = 0.0;
        cdouble pilot = 1.0;
        std::uint64_t seed = 0;
        polar_position truth;
        bool dma_output = false;

        std::span<const cdouble> snapshot(std::size_t t) const { return {data.data() + t * dim, dim}; }
    };

    // x_t = g x0 + z_t with z_t ~ CN(0, noise_power I); the DMA observes y_t = Q H x_t.
    // The element noise stream depends only on the seed, so two front ends fed with the
    // same seed see the same z_t.
    inline snapshot_batch sample_snapshots(const channel_realization &channel, const waveguide_matrix &h,
                                           const front_end &fe, std::size_t snapshots, double noise_power,
                                           std::uint64_t seed, cdouble pilot = 1.0)
    {
        if (snapshots == 0)
            throw config_error("snapshot count must be at least 1");
        if (!(noise_power >= 0.0))
            throw config_error("noise power must be non-negative");
        const std::size_t n = channel.g.size();
        const auto *w = std::get_if<dma_weights>(&fe);
        std::vector<cdouble> combiner;
        if (w)
        {
            if (w->size() != n)
                throw config_error("weights have " + std::to_string(w->size()) + " elements, channel has " +
                                   std::to_string(n));
            combiner = combined_weights(*w, h);
        }

        snapshot_batch b;
        b.dim = w ? w->n_strips() : n;
        b.snapshot_count = snapshots;
        b.noise_power = noise_power;
        b.pilot = pilot;
        b.seed = seed;
        b.truth = channel.source;
        b.dma_output = w != nullptr;
        b.data.resize(b.dim * snapshots);

        engine_type rng(seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        const double sigma = std::sqrt(0.5 * noise_power);
        std::vector<cdouble> x(n);
        for (std::size_t t = 0; t < snapshots; ++t)
        {
            for (std::size_t k = 0; k < n; ++k)
            {
                const double re = normal(rng);
                const double im = normal(rng);
                x[k] = channel.g[k] * pilot + cdouble(sigma * re, sigma * im);
            }
            std::span<cdouble> dst(b.data.data() + t * b.dim, b.dim);
            if (w)
                combine_strips(combiner, w->n_strips(), x, dst);
            else
                std::copy(x.begin(), x.end(), dst.begin());
        }
        return b;
    }

    // Per-element SNR in dB to noise power for a unit-power pilot
    inline double noise_power_from_snr_db(double snr_db)
    {
        if (std::isinf(snr_db) && snr_db > 0)
            return 0.0;
        return std::pow(10.0, -snr_db / 10.0);
    }
}

#endif
