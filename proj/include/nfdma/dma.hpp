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
#ifndef NFDMA_DMA_HPP
#define NFDMA_DMA_HPP

#include "nfdma/rng.hpp"
#include "nfdma/waveguide.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <string_view>

namespace nfdma
{
    enum class weight_regime
    {
        lorentzian, // q = (j + e^{j phi}) / 2
        phase_only  // q = e^{j phi}
    };

    inline std::string_view to_string(weight_regime r)
    {
        return r == weight_regime::lorentzian ? "lorentzian" : "phase_only";
    }

    inline weight_regime parse_regime(std::string_view s)
    {
        if (s == "lorentzian")
            return weight_regime::lorentzian;
        if (s == "phase_only")
            return weight_regime::phase_only;
        throw config_error("unknown weight regime '" + std::string(s) + "'");
    }

    inline cdouble materialize(double phase, weight_regime r)
    {
        const cdouble e = std::polar(1.0, phase);
        return r == weight_regime::lorentzian ? 0.5 * (cdouble(0.0, 1.0) + e) : e;
    }

    // Block-diagonal DMA weight matrix Q (N_d x N), stored as one phase per element.
    // Row i of Q is non-zero only on the columns of strip i, so the dense matrix is
    // never formed.
    class dma_weights
    {
    public:
        dma_weights() = default;
        dma_weights(std::size_t n_strips, std::size_t n_per_strip, std::vector<double> phases, weight_regime regime)
            : n_strips_(n_strips), n_per_strip_(n_per_strip), phases_(std::move(phases)), regime_(regime)
        {
            if (phases_.size() != n_strips_ * n_per_strip_)
                throw dimension_error("weight phase count does not match strips x elements");
            for (auto &p : phases_)
                p = wrap_phase(p);
        }

        std::size_t n_strips() const noexcept { return n_strips_; }
        std::size_t n_per_strip() const noexcept { return n_per_strip_; }
        std::size_t size() const noexcept { return phases_.size(); }
        weight_regime regime() const noexcept { return regime_; }
        std::span<const double> phases() const noexcept { return phases_; }

        double phase(std::size_t strip, std::size_t elem) const { return phases_[checked(strip, elem)]; }
        cdouble weight(std::size_t strip, std::size_t elem) const { return materialize(phase(strip, elem), regime_); }

        std::vector<cdouble> values() const
        {
            std::vector<cdouble> q(phases_.size());
            for (std::size_t k = 0; k < q.size(); ++k)
                q[k] = materialize(phases_[k], regime_);
            return q;
        }

        void check_layout(const array_layout &layout) const
        {
            if (layout.n_strips() != n_strips_ || layout.n_per_strip() != n_per_strip_)
                throw config_error("weights are " + std::to_string(n_strips_) + "x" + std::to_string(n_per_strip_) +
                                   " but layout is " + std::to_string(layout.n_strips()) + "x" +
                                   std::to_string(layout.n_per_strip()));
        }

        // FNV-1a over the phase bit patterns and the regime
        std::uint64_t checksum() const noexcept
        {
            std::uint64_t h = 0xcbf29ce484222325ULL;
            auto feed = [&h](std::uint64_t v)
            {
                for (int b = 0; b < 8; ++b)
                {
                    h ^= (v >> (8 * b)) & 0xFF;
                    h *= 0x100000001b3ULL;
                }
            };
            feed(static_cast<std::uint64_t>(regime_));
            for (double p : phases_)
                feed(std::bit_cast<std::uint64_t>(p));
            return h;
        }

        friend bool operator==(const dma_weights &, const dma_weights &) = default;

    private:
        std::size_t checked(std::size_t strip, std::size_t elem) const
        {
            if (strip >= n_strips_ || elem >= n_per_strip_)
                throw index_error("weight index out of range");
            return strip * n_per_strip_ + elem;
        }

        std::size_t n_strips_ = 0, n_per_strip_ = 0;
        std::vector<double> phases_;
        weight_regime regime_ = weight_regime::lorentzian;
    };

    // I.i.d. uniform phases on [0, 2 pi)
    inline dma_weights random_weights(const array_layout &layout, weight_regime regime, std::uint64_t seed)
    {
        engine_type rng(seed);
        std::uniform_real_distribution<double> u(0.0, two_pi);
        std::vector<double> ph(layout.size());
        for (auto &p : ph)
            p = u(rng);
        return dma_weights(layout.n_strips(), layout.n_per_strip(), std::move(ph), regime);
    }

    // Closed-form phase-only focusing on `focus`: psi_{i,l} = v_{i,l} + rho_{i,l} beta_i.
    // Every term q h g of a strip then carries zero phase at the focus, which attains
    // the triangle-inequality bound of the per-strip combining gain.
    inline dma_weights tune_weights(const array_layout &layout, const waveguide_model &wg,
                                    const polar_position &focus, double carrier_hz)
    {
        if (!(focus.d > 0.0))
            throw config_error("focus range must be positive");
        wg.check(layout.n_strips());
        std::vector<double> dist(layout.size());
        source_distances(layout, focus, dist);
        const auto rho = layout.feed_distances();
        std::vector<double> ph(layout.size());
        for (std::size_t i = 0; i < layout.n_strips(); ++i)
            for (std::size_t l = 0; l < layout.n_per_strip(); ++l)
            {
                const std::size_t k = i * layout.n_per_strip() + l;
                ph[k] = phase_delay(dist[k], carrier_hz) + rho[k] * wg.beta[i];
            }
        return dma_weights(layout.n_strips(), layout.n_per_strip(), std::move(ph), weight_regime::phase_only);
    }

    // Carries the phase field over to the Lorentzian set: q = (j + e^{j psi}) / 2
    inline dma_weights project_lorentzian(const dma_weights &w)
    {
        if (w.regime() != weight_regime::phase_only)
            throw config_error("project_lorentzian expects phase-only weights");
        return dma_weights(w.n_strips(), w.n_per_strip(), std::vector<double>(w.phases().begin(), w.phases().end()),
                           weight_regime::lorentzian);
    }

    // q_{i,l} h_{i,l} per element, the effective analog combiner
    inline std::vector<cdouble> combined_weights(const dma_weights &w, const waveguide_matrix &h)
    {
        if (h.size() != w.size())
            throw dimension_error("waveguide matrix and weights disagree in size");
        auto q = w.values();
        for (std::size_t k = 0; k < q.size(); ++k)
            q[k] *= h[k];
        return q;
    }

    // out_i = sum_l c_{i,l} v_{i,l} for a precomputed combiner c
    inline void combine_strips(std::span<const cdouble> combiner, std::size_t n_strips, std::span<const cdouble> v,
                               std::span<cdouble> out)
    {
        const std::size_t ne = combiner.size() / n_strips;
        for (std::size_t i = 0; i < n_strips; ++i)
        {
            double re = 0.0, im = 0.0;
            const cdouble *c = combiner.data() + i * ne;
            const cdouble *x = v.data() + i * ne;
            for (std::size_t l = 0; l < ne; ++l)
            {
                re += c[l].real() * x[l].real() - c[l].imag() * x[l].imag();
                im += c[l].real() * x[l].imag() + c[l].imag() * x[l].real();
            }
            out[i] = {re, im};
        }
    }

    // Q H v without forming Q
    inline std::vector<cdouble> apply_weights(const dma_weights &w, const waveguide_matrix &h, std::span<const cdouble> v)
    {
        if (v.size() != w.size())
            throw dimension_error("input vector has " + std::to_string(v.size()) + " entries, weights expect " +
                                  std::to_string(w.size()));
        const auto c = combined_weights(w, h);
        std::vector<cdouble> out(w.n_strips());
        combine_strips(c, w.n_strips(), v, out);
        return out;
    }

    // CSV with header "i,l,phase_radians,regime", zero-based indices
    inline void write_weights_csv(const dma_weights &w, const std::string &path)
    {
        std::ofstream f(path);
        if (!f)
            throw io_error("cannot open weights file for writing", path);
        f << "i,l,phase_radians,regime\n" << std::setprecision(17);
        for (std::size_t i = 0; i < w.n_strips(); ++i)
            for (std::size_t l = 0; l < w.n_per_strip(); ++l)
                f << i << ',' << l << ',' << w.phase(i, l) << ',' << to_string(w.regime()) << '\n';
        if (!f)
            throw io_error("failed writing weights file", path);
    }

    inline dma_weights read_weights_csv(const std::string &path)
    {
        std::ifstream f(path);
        if (!f)
            throw io_error("cannot open weights file", path);
        std::string line;
        std::getline(f, line);
        if (line.rfind("i,l,phase_radians,regime", 0) != 0)
            throw io_error("unexpected weights header", path);

        struct row
        {
            std::size_t i, l;
            double phase;
            std::string regime;
        };
        std::vector<row> rows;
        std::size_t ni = 0, nl = 0;
        while (std::getline(f, line))
        {
            if (line.empty())
                continue;
            std::istringstream ss(line);
            row r;
            char c1, c2, c3;
            if (!(ss >> r.i >> c1 >> r.l >> c2 >> r.phase >> c3) || c1 != ',' || c2 != ',' || c3 != ',')
                throw io_error("malformed weights row '" + line + "'", path);
            std::getline(ss, r.regime);
            ni = std::max(ni, r.i + 1);
            nl = std::max(nl, r.l + 1);
            rows.push_back(std::move(r));
        }
        if (rows.empty() || rows.size() != ni * nl)
            throw io_error("weights file does not describe a full strips x elements grid", path);
        std::vector<double> ph(ni * nl);
        const weight_regime reg = parse_regime(rows.front().regime);
        for (const auto &r : rows)
        {
            if (parse_regime(r.regime) != reg)
                throw io_error("mixed regimes in weights file", path);
            ph[r.i * nl + r.l] = r.phase;
        }
        return dma_weights(ni, nl, std::move(ph), reg);
    }
}

#endif
