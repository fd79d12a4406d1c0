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
#ifndef NFDMA_SELFCHECK_HPP
#define NFDMA_SELFCHECK_HPP

// Independent oracles for the closed-form pieces: dense projectors built with Eigen,
// exhaustive phase-grid tuning and Cartesian distances.

#include "nfdma/likelihood.hpp"

#include <Eigen/Dense>

namespace nfdma
{
    struct check_result
    {
        std::string name;
        bool passed = false;
        double metric = 0.0;    // worst observed deviation
        double tolerance = 0.0; // pass threshold for metric
        std::string detail;
    };

    namespace detail
    {
        inline std::string short_num(double v)
        {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.3g", v);
            return buf;
        }
    }

    namespace oracle
    {
        using cmatrix = Eigen::MatrixXcd;
        using cvector = Eigen::VectorXcd;

        inline cvector to_eigen(std::span<const cdouble> v)
        {
            cvector out(Eigen::Index(v.size()));
            for (std::size_t k = 0; k < v.size(); ++k)
                out(Eigen::Index(k)) = v[k];
            return out;
        }

        // Rank-one orthogonal projector onto span{v}
        inline cmatrix projector(const cvector &v) { return v * v.adjoint() / v.squaredNorm(); }

        // Dense N_d x N weight matrix Q with its block-diagonal sparsity
        inline cmatrix dense_q(const dma_weights &w)
        {
            cmatrix q = cmatrix::Zero(Eigen::Index(w.n_strips()), Eigen::Index(w.size()));
            for (std::size_t i = 0; i < w.n_strips(); ++i)
                for (std::size_t l = 0; l < w.n_per_strip(); ++l)
                    q(Eigen::Index(i), Eigen::Index(i * w.n_per_strip() + l)) = w.weight(i, l);
            return q;
        }

        inline cmatrix dense_h(const waveguide_matrix &h) { return to_eigen(h.diagonal()).asDiagonal(); }

        inline cmatrix sample_covariance(const snapshot_batch &b)
        {
            cmatrix r = cmatrix::Zero(Eigen::Index(b.dim), Eigen::Index(b.dim));
            for (std::size_t t = 0; t < b.snapshot_count; ++t)
            {
                const cvector y = to_eigen(b.snapshot(t));
                r.noalias() += y * y.adjoint();
            }
            return r / double(b.snapshot_count);
        }

        // Max over a (grid^(n-1)) phase grid of |sum_l e^{j phi_l} c_l|^2 with phi_0 = 0.
        // A common rotation by a grid step maps the grid onto itself and leaves the
        // objective unchanged, so this equals the maximum over the full grid.
        inline std::pair<double, std::vector<std::size_t>> phase_grid_argmax(std::span<const cdouble> c,
                                                                             std::size_t grid)
        {
            std::vector<cdouble> rot(grid);
            for (std::size_t k = 0; k < grid; ++k)
                rot[k] = std::polar(1.0, two_pi * double(k) / double(grid));
            const std::size_t n = c.size();
            std::vector<std::size_t> idx(n, 0), best(n, 0);
            std::vector<cdouble> partial(n + 1, 0.0);
            double best_val = -1.0;
            partial[1] = c[0];
            // odometer over elements 1..n-1
            auto recurse = [&](auto &self, std::size_t l) -> void
            {
                if (l == n)
                {
                    const double v = std::norm(partial[n]);
                    if (v > best_val)
                    {
                        best_val = v;
                        best = idx;
                    }
                    return;
                }
                for (std::size_t k = 0; k < grid; ++k)
                {
                    idx[l] = k;
                    partial[l + 1] = partial[l] + rot[k] * c[l];
                    self(self, l + 1);
                }
            };
            recurse(recurse, 1);
            return {best_val, best};
        }
    }

    // Random single-strip instances: the tuned phase-only weights agree with the
    // exhaustive phase-grid maximizer of |sum_l q h g|^2 within one grid step, and their
    // objective dominates every grid point.
    inline check_result check_tuning_phase_grid(std::size_t instances = 50, std::size_t n_elem = 4,
                                                std::size_t grid = 256, std::uint64_t seed = 11)
    {
        engine_type rng(seed);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const double f = 28e9;
        const double step = two_pi / double(grid);
        double worst_phase = 0.0, worst_excess = -INFINITY;
        for (std::size_t n = 0; n < instances; ++n)
        {
            std::vector<vec3> pos;
            std::vector<double> rho;
            double z = 0.0, r = 0.0;
            for (std::size_t l = 0; l < n_elem; ++l)
            {
                z += 0.002 + 0.01 * u(rng);
                r += 0.002 + 0.02 * u(rng);
                pos.push_back({0.0, 0.0, z});
                rho.push_back(r);
            }
            const array_layout layout(1, n_elem, pos, rho, 0.005, 0.005);
            const waveguide_model wg{{5.0 * u(rng)}, {100.0 + 1500.0 * u(rng)}};
            const polar_position src{0.5 + 20.0 * u(rng), (u(rng) - 0.5) * 0.95 * pi};

            const auto g = steering_vector(layout, src, f, gain_model::free_space);
            const auto h = build_waveguide_matrix(layout, wg);
            std::vector<cdouble> c(n_elem);
            for (std::size_t l = 0; l < n_elem; ++l)
                c[l] = h[l] * g[l];

            const auto tuned = tune_weights(layout, wg, src, f);
            cdouble acc = 0.0;
            for (std::size_t l = 0; l < n_elem; ++l)
                acc += tuned.weight(0, l) * c[l];
            const double tuned_value = std::norm(acc);

            const auto [grid_best, arg] = oracle::phase_grid_argmax(c, grid);
            worst_excess = std::max(worst_excess, (grid_best - tuned_value) / tuned_value);
            for (std::size_t l = 1; l < n_elem; ++l)
            {
                const double rel = tuned.phase(0, l) - tuned.phase(0, 0);
                const double diff = wrap_phase(double(arg[l]) * step - rel);
                worst_phase = std::max(worst_phase, std::min(diff, two_pi - diff));
            }
        }
        const bool ok = worst_phase <= step && worst_excess <= 1e-12;
        return {"tuning_phase_grid", ok, worst_phase, step,
                "worst phase gap " + detail::short_num(worst_phase) + " rad, worst grid excess " +
                    detail::short_num(worst_excess)};
    }

    // Dense projector oracles on random instances with N <= 64: idempotence,
    // self-adjointness, unit trace, and agreement of both objective forms and of the
    // strip combiner with Q H.
    inline check_result check_projectors(std::size_t instances = 100, std::uint64_t seed = 12)
    {
        engine_type rng(seed);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::uniform_int_distribution<std::size_t> strips(1, 4), elems(1, 16);
        const double f = 28e9;
        double worst_proj = 0.0, worst_obj = 0.0;
        for (std::size_t n = 0; n < instances; ++n)
        {
            const auto layout = array_layout::strips({strips(rng), elems(rng), 0.002 + 0.008 * u(rng), 0.005});
            const auto gain = u(rng) < 0.5 ? gain_model::unit : gain_model::free_space;
            const auto wg = waveguide_model::uniform(layout.n_strips(), 2.0 * u(rng), 300.0 + 1000.0 * u(rng));
            const auto h = build_waveguide_matrix(layout, wg);
            const auto w = random_weights(layout, u(rng) < 0.5 ? weight_regime::lorentzian : weight_regime::phase_only,
                                          rng());
            const polar_position truth{0.5 + 10.0 * u(rng), (u(rng) - 0.5) * 0.9 * pi};
            const polar_position cand{0.5 + 10.0 * u(rng), (u(rng) - 0.5) * 0.9 * pi};
            const auto ch = build_channel(layout, truth, f, gain);
            const double np = 1e-6 * std::norm(ch.g[0]) + u(rng) * std::norm(ch.g[0]);
            const std::size_t T = 8;

            const auto s = oracle::to_eigen(steering_vector(layout, cand, f, gain));
            const oracle::cmatrix qh = oracle::dense_q(w) * oracle::dense_h(h);
            const oracle::cvector ue = qh * s;
            if (ue.norm() < 1e-9)
                continue;
            const auto pfd = oracle::projector(s);
            const auto pdma = oracle::projector(ue);
            for (const auto *p : {&pfd, &pdma})
            {
                worst_proj = std::max(worst_proj, ((*p) * (*p) - *p).norm());
                worst_proj = std::max(worst_proj, (*p - p->adjoint()).norm());
                worst_proj = std::max(worst_proj, std::abs(p->trace() - cdouble(1.0)));
            }

            const auto u_fast = effective_steering(std::vector<cdouble>(s.data(), s.data() + s.size()), h, w);
            worst_obj = std::max(worst_obj, (oracle::to_eigen(u_fast) - ue).norm() / ue.norm());

            const auto x = sample_snapshots(ch, waveguide_matrix::identity(layout.size()), fully_digital{}, T, np, rng());
            double dense_fd = 0.0;
            for (std::size_t t = 0; t < T; ++t)
                dense_fd += (pfd * oracle::to_eigen(x.snapshot(t))).squaredNorm();
            const double fast_fd = fd_objective(layout, f, gain, x, cand);
            worst_obj = std::max(worst_obj, std::abs(fast_fd - dense_fd) / dense_fd);

            const auto y = sample_snapshots(ch, h, w, T, np, rng());
            const double dense_dma = double(T) * (pdma * oracle::sample_covariance(y)).trace().real();
            const double fast_dma = dma_objective(layout, f, gain, y, cand, h, w);
            worst_obj = std::max(worst_obj, std::abs(fast_dma - dense_dma) / std::abs(dense_dma));
        }
        const bool ok = worst_proj <= 1e-9 && worst_obj <= 1e-10;
        return {"dense_projectors", ok, worst_proj, 1e-9,
                "worst projector defect " + detail::short_num(worst_proj) + ", worst objective mismatch " +
                    detail::short_num(worst_obj)};
    }

    // Polar law-of-cosines distance against the Cartesian distance
    inline check_result check_distances(std::size_t cases = 10000, std::uint64_t seed = 13)
    {
        engine_type rng(seed);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const auto layout = array_layout::strips({5, 96, 0.0025, 0.005});
        std::uniform_int_distribution<std::size_t> si(0, layout.n_strips() - 1), ei(0, layout.n_per_strip() - 1);
        double worst = 0.0;
        for (std::size_t n = 0; n < cases; ++n)
        {
            const polar_position src{0.1 + 50.0 * u(rng), (u(rng) - 0.5) * pi};
            const std::size_t i = si(rng), l = ei(rng);
            const double a = element_source_distance(layout, i, l, src);
            const double b = element_source_distance_cartesian(layout, i, l, src);
            worst = std::max(worst, std::abs(a - b) / b);
        }
        return {"polar_distance", worst <= 1e-12, worst, 1e-12, "worst relative gap " + detail::short_num(worst)};
    }

    // Sample covariance of pure-noise DMA outputs against delta^2 Q H H^H Q^H
    inline check_result check_noise_covariance(std::size_t snapshots = 100000, std::uint64_t seed = 14)
    {
        const double f = 28e9, np = 0.7;
        const auto layout = array_layout::strips({5, 48, 0.005, 0.005});
        const auto h = build_waveguide_matrix(layout, waveguide_model::defaults(layout.n_strips(), f));
        const auto w = random_weights(layout, weight_regime::lorentzian, derive_seed(seed, {stream::weights}));
        const auto ch = build_channel(layout, {6.0, pi / 3}, f);
        const auto y = sample_snapshots(ch, h, w, snapshots, np, derive_seed(seed, {stream::noise}), 0.0);
        const oracle::cmatrix qh = oracle::dense_q(w) * oracle::dense_h(h);
        const oracle::cmatrix expected = np * qh * qh.adjoint();
        const double rel = (oracle::sample_covariance(y) - expected).norm() / expected.norm();
        return {"noise_covariance", rel <= 0.05, rel, 0.05, "relative Frobenius gap " + detail::short_num(rel)};
    }

    inline std::vector<check_result> run_selfcheck()
    {
        return {check_tuning_phase_grid(), check_projectors(), check_distances(), check_noise_covariance()};
    }
}

#endif
