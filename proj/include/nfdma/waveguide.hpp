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
#ifndef NFDMA_WAVEGUIDE_HPP
#define NFDMA_WAVEGUIDE_HPP

#include "nfdma/geometry.hpp"

#include <complex>
#include <vector>

namespace nfdma
{
    using cdouble = std::complex<double>;

    // Microstrip propagation: attenuation alpha [Np/m] and wavenumber beta [rad/m]
    // for every strip.
    struct waveguide_model
    {
        std::vector<double> alpha;
        std::vector<double> beta;

        static waveguide_model uniform(std::size_t n_strips, double alpha_np_per_m, double beta_rad_per_m)
        {
            return {std::vector<double>(n_strips, alpha_np_per_m), std::vector<double>(n_strips, beta_rad_per_m)};
        }

        // 0.5 Np/m and the free-space wavenumber
        static waveguide_model defaults(std::size_t n_strips, double carrier_hz)
        {
            return uniform(n_strips, 0.5, two_pi / wavelength(carrier_hz));
        }

        void check(std::size_t n_strips) const
        {
            if (alpha.size() != n_strips || beta.size() != n_strips)
                throw dimension_error("waveguide model needs one alpha and beta per strip");
            for (std::size_t i = 0; i < n_strips; ++i)
            {
                if (!(alpha[i] >= 0.0))
                    throw config_error("waveguide attenuation must be non-negative");
                if (!(beta[i] >= 0.0))
                    throw config_error("waveguide wavenumber must be non-negative");
            }
        }
    };

    // Diagonal of the N x N in-waveguide propagation matrix H
    class waveguide_matrix
    {
    public:
        waveguide_matrix() = default;
        explicit waveguide_matrix(std::vector<cdouble> diagonal) : diag_(std::move(diagonal)) {}

        std::size_t size() const noexcept { return diag_.size(); }
        const cdouble &operator[](std::size_t k) const { return diag_[k]; }
        std::span<const cdouble> diagonal() const noexcept { return diag_; }

        static waveguide_matrix identity(std::size_t n) { return waveguide_matrix(std::vector<cdouble>(n, 1.0)); }

    private:
        std::vector<cdouble> diag_;
    };

    // h_{i,l} = exp(-rho_{i,l} (alpha_i + j beta_i))
    inline waveguide_matrix build_waveguide_matrix(const array_layout &layout, const waveguide_model &model)
    {
        model.check(layout.n_strips());
        std::vector<cdouble> h(layout.size());
        const auto rho = layout.feed_distances();
        for (std::size_t i = 0; i < layout.n_strips(); ++i)
            for (std::size_t l = 0; l < layout.n_per_strip(); ++l)
            {
                const std::size_t k = i * layout.n_per_strip() + l;
                h[k] = std::exp(-rho[k] * cdouble(model.alpha[i], model.beta[i]));
            }
        return waveguide_matrix(std::move(h));
    }
}

#endif
