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
#ifndef NFDMA_LIKELIHOOD_HPP
#define NFDMA_LIKELIHOOD_HPP

#include "nfdma/signal_model.hpp"

#include <concepts>
#include <limits>
#include <memory>
#include <optional>

namespace nfdma
{
    inline constexpr double default_degeneracy_threshold = 1e-9;

    // Rectangular (d, theta) grid plus the coarse-to-fine refinement schedule. Each
    // refinement stage is a refine_points x refine_points grid centered on the
    // incumbent whose spans are the coarse spans divided by shrink^stage.
    struct search_grid
    {
        std::vector<double> d_values;
        std::vector<double> theta_values;
        std::size_t refinement_stages = 3;
        double shrink = 5.0;
        std::size_t refine_points = 21;

        static std::vector<double> log_spaced(double lo, double hi, std::size_t n)
        {
            if (n == 1)
                return {lo};
            std::vector<double> v(n);
            const double a = std::log(lo), b = std::log(hi);
            for (std::size_t i = 0; i < n; ++i)
                v[i] = std::exp(a + (b - a) * double(i) / double(n - 1));
            v.front() = lo;
            v.back() = hi;
            return v;
        }

        // n cell centers uniformly covering the open front half-plane (-pi/2, pi/2)
        static std::vector<double> front_angles(std::size_t n)
        {
            std::vector<double> v(n);
            for (std::size_t i = 0; i < n; ++i)
                v[i] = -0.5 * pi + pi * (double(i) + 0.5) / double(n);
            return v;
        }

        // Log-spaced ranges on [d_min, d_max] and uniform front angles
        static search_grid make(double d_min, double d_max, std::size_t n_d = 60, std::size_t n_theta = 121,
                                std::size_t stages = 3, double shrink = 5.0, std::size_t refine_points = 21)
        {
            search_grid g{log_spaced(d_min, d_max, n_d), front_angles(n_theta), stages, shrink, refine_points};
            g.check();
            return g;
        }

        // Copy whose nearest coarse node on each axis is moved onto p
        search_grid with_node(const polar_position &p) const
        {
            search_grid g = *this;
            auto snap = [](std::vector<double> &v, double x)
            {
                auto it = std::ranges::min_element(v, {}, [x](double a)
                                                   { return std::abs(a - x); });
                *it = x;
            };
            snap(g.d_values, p.d);
            snap(g.theta_values, p.theta);
            g.check();
            return g;
        }

        void check() const
        {
            if (d_values.empty() || theta_values.empty())
                throw config_error("search grid must be non-empty");
            for (std::size_t i = 0; i < d_values.size(); ++i)
            {
                if (!(d_values[i] > 0.0))
                    throw config_error("search grid ranges must be positive");
                if (i > 0 && !(d_values[i] > d_values[i - 1]))
                    throw config_error("search grid ranges must increase");
            }
            for (std::size_t i = 1; i < theta_values.size(); ++i)
                if (!(theta_values[i] > theta_values[i - 1]))
                    throw config_error("search grid angles must increase");
            if (refinement_stages > 0 && (!(shrink > 1.0) || refine_points < 2))
                throw config_error("refinement needs shrink > 1 and at least 2 points per axis");
        }
    };

    struct likelihood_surface
    {
        std::vector<double> d_values;
        std::vector<double> theta_values;
        std::vector<double> values; // d-major: values[id * n_theta + it]
        std::size_t argmax_d = 0, argmax_theta = 0;

        double at(std::size_t id, std::size_t it) const { return values[id * theta_values.size() + it]; }
        polar_position argmax() const { return {d_values[argmax_d], theta_values[argmax_theta]}; }
        double max_value() const { return at(argmax_d, argmax_theta); }
    };

    struct search_result
    {
        polar_position estimate;
        double value = 0.0;
        std::size_t evaluations = 0;
        std::vector<likelihood_surface> surfaces; // one per stage when requested
    };

    // Steering vectors for every cell of a fixed grid, shared read-only between searches
    class steering_table
    {
    public:
        steering_table(const array_layout &layout, double carrier_hz, gain_model gain, std::vector<double> d_values,
                       std::vector<double> theta_values)
            : n_(layout.size()), d_(std::move(d_values)), theta_(std::move(theta_values)),
              data_(d_.size() * theta_.size() * n_)
        {
            std::vector<double> dist(n_);
            for (std::size_t id = 0; id < d_.size(); ++id)
                for (std::size_t it = 0; it < theta_.size(); ++it)
                    steering_into(layout, {d_[id], theta_[it]}, carrier_hz, gain, dist,
                                  {data_.data() + (id * theta_.size() + it) * n_, n_});
        }

        bool covers(std::span<const double> d, std::span<const double> theta) const
        {
            return std::ranges::equal(d, d_) && std::ranges::equal(theta, theta_);
        }

        std::size_t elements() const noexcept { return n_; }
        std::span<const cdouble> cell(std::size_t id, std::size_t it) const
        {
            return {data_.data() + (id * theta_.size() + it) * n_, n_};
        }

    private:
        std::size_t n_;
        std::vector<double> d_, theta_;
        std::vector<cdouble> data_;
    };

    namespace detail
    {
        inline double norm2(std::span<const cdouble> v)
        {
            double s = 0.0;
            for (const auto &x : v)
                s += x.real() * x.real() + x.imag() * x.imag();
            return s;
        }

        // |a^H b|^2
        inline double inner_abs2(std::span<const cdouble> a, std::span<const cdouble> b)
        {
            double re = 0.0, im = 0.0;
            for (std::size_t k = 0; k < a.size(); ++k)
            {
                re += a[k].real() * b[k].real() + a[k].imag() * b[k].imag();
                im += a[k].real() * b[k].imag() - a[k].imag() * b[k].real();
            }
            return re * re + im * im;
        }

        template <class F>
        void for_each_cell(const array_layout &layout, double carrier_hz, gain_model gain,
                           const steering_table *table, std::span<const double> d, std::span<const double> theta,
                           std::span<double> out, F &&f)
        {
            std::vector<double> dist(layout.size());
            std::vector<cdouble> s(layout.size());
            const bool cached = table && table->covers(d, theta);
            for (std::size_t id = 0; id < d.size(); ++id)
                for (std::size_t it = 0; it < theta.size(); ++it)
                {
                    std::span<const cdouble> sv;
                    if (cached)
                        sv = table->cell(id, it);
                    else
                    {
                        steering_into(layout, {d[id], theta[it]}, carrier_hz, gain, dist, s);
                        sv = s;
                    }
                    out[id * theta.size() + it] = f(sv);
                }
        }
    }

    // Fully-digital projection likelihood: sum_t |s^H x_t|^2 / ||s||^2
    class fd_likelihood
    {
    public:
        fd_likelihood(const array_layout &layout, double carrier_hz, gain_model gain, const snapshot_batch &batch,
                      std::shared_ptr<const steering_table> table = nullptr)
            : layout_(&layout), carrier_(carrier_hz), gain_(gain), batch_(&batch), table_(std::move(table))
        {
            if (batch.dma_output || batch.dim != layout.size())
                throw config_error("fully-digital likelihood needs element-level snapshots");
        }

        double at_steering(std::span<const cdouble> s) const
        {
            double acc = 0.0;
            for (std::size_t t = 0; t < batch_->snapshot_count; ++t)
                acc += detail::inner_abs2(s, batch_->snapshot(t));
            return acc / detail::norm2(s);
        }

        double operator()(const polar_position &p) const
        {
            return at_steering(steering_vector(*layout_, p, carrier_, gain_));
        }

        void evaluate_grid(std::span<const double> d, std::span<const double> theta, std::span<double> out) const
        {
            detail::for_each_cell(*layout_, carrier_, gain_, table_.get(), d, theta, out,
                                  [this](std::span<const cdouble> s)
                                  { return at_steering(s); });
        }

    private:
        const array_layout *layout_;
        double carrier_;
        gain_model gain_;
        const snapshot_batch *batch_;
        std::shared_ptr<const steering_table> table_;
    };

    // DMA projection likelihood: with u = Q H s, sum_t |u^H y_t|^2 / ||u||^2, evaluated
    // as u^H (sum_t y_t y_t^H) u / ||u||^2. Candidates with ||u|| < eps score -inf.
    class dma_likelihood
    {
    public:
        dma_likelihood(const array_layout &layout, double carrier_hz, gain_model gain, const waveguide_matrix &h,
                       const dma_weights &w, const snapshot_batch &batch,
                       std::shared_ptr<const steering_table> table = nullptr,
                       double eps = default_degeneracy_threshold)
            : layout_(&layout), carrier_(carrier_hz), gain_(gain), nd_(w.n_strips()), combiner_(combined_weights(w, h)),
              scatter_(nd_ * nd_), table_(std::move(table)), eps_(eps)
        {
            w.check_layout(layout);
            if (!batch.dma_output || batch.dim != nd_)
                throw config_error("DMA likelihood needs strip-level snapshots matching the weights");
            for (std::size_t t = 0; t < batch.snapshot_count; ++t)
            {
                const auto y = batch.snapshot(t);
                for (std::size_t a = 0; a < nd_; ++a)
                    for (std::size_t b = 0; b < nd_; ++b)
                        scatter_[a * nd_ + b] += y[a] * std::conj(y[b]);
            }
        }

        // Objective for a given effective steering vector u, nullopt when degenerate
        std::optional<double> at_effective(std::span<const cdouble> u) const
        {
            const double nu = detail::norm2(u);
            if (!(std::sqrt(nu) >= eps_))
                return std::nullopt;
            double acc = 0.0;
            for (std::size_t a = 0; a < nd_; ++a)
            {
                cdouble row = 0.0;
                for (std::size_t b = 0; b < nd_; ++b)
                    row += scatter_[a * nd_ + b] * u[b];
                acc += (std::conj(u[a]) * row).real();
            }
            return acc / nu;
        }

        double at_steering(std::span<const cdouble> s, std::span<cdouble> u_scratch) const
        {
            combine_strips(combiner_, nd_, s, u_scratch);
            return at_effective(u_scratch).value_or(-std::numeric_limits<double>::infinity());
        }

        double operator()(const polar_position &p) const
        {
            std::vector<cdouble> u(nd_);
            return at_steering(steering_vector(*layout_, p, carrier_, gain_), u);
        }

        // Throws degenerate_candidate instead of returning -inf
        double checked(const polar_position &p) const
        {
            std::vector<cdouble> u(nd_);
            combine_strips(combiner_, nd_, steering_vector(*layout_, p, carrier_, gain_), u);
            auto v = at_effective(u);
            if (!v)
                throw degenerate_candidate("effective steering vector vanishes at d=" + std::to_string(p.d) +
                                           ", theta=" + std::to_string(p.theta));
            return *v;
        }

        void evaluate_grid(std::span<const double> d, std::span<const double> theta, std::span<double> out) const
        {
            std::vector<cdouble> u(nd_);
            detail::for_each_cell(*layout_, carrier_, gain_, table_.get(), d, theta, out,
                                  [&](std::span<const cdouble> s)
                                  { return at_steering(s, u); });
        }

    private:
        const array_layout *layout_;
        double carrier_;
        gain_model gain_;
        std::size_t nd_;
        std::vector<cdouble> combiner_;
        std::vector<cdouble> scatter_;
        std::shared_ptr<const steering_table> table_;
        double eps_;
    };

    // Q H s through the strip combiner
    inline std::vector<cdouble> effective_steering(std::span<const cdouble> s, const waveguide_matrix &h,
                                                   const dma_weights &w)
    {
        return apply_weights(w, h, s);
    }

    inline double fd_objective(const array_layout &layout, double carrier_hz, gain_model gain,
                               const snapshot_batch &batch, const polar_position &candidate)
    {
        return fd_likelihood(layout, carrier_hz, gain, batch)(candidate);
    }

    inline double dma_objective(const array_layout &layout, double carrier_hz, gain_model gain,
                                const snapshot_batch &batch, const polar_position &candidate,
                                const waveguide_matrix &h, const dma_weights &w,
                                double eps = default_degeneracy_threshold)
    {
        return dma_likelihood(layout, carrier_hz, gain, h, w, batch, nullptr, eps).checked(candidate);
    }

    template <class Objective>
    concept grid_objective = requires(const Objective &o, std::span<const double> a, std::span<double> out) {
        o.evaluate_grid(a, a, out);
    };

    template <class Objective>
    concept point_objective = requires(const Objective &o, polar_position p) {
        { o(p) } -> std::convertible_to<double>;
    };

    namespace detail
    {
        // n points spanning `span` centered on `center`, shifted to stay inside [lo, hi]
        inline std::vector<double> refine_axis(double center, double span, std::size_t n, double lo, double hi)
        {
            span = std::min(span, hi - lo);
            double start = center - 0.5 * span;
            if (start < lo)
                start = lo;
            if (start + span > hi)
                start = hi - span;
            const double step = span / double(n - 1);
            std::vector<double> v(n);
            const bool centered = start == center - 0.5 * span && n % 2 == 1;
            const std::size_t mid = (n - 1) / 2;
            for (std::size_t j = 0; j < n; ++j)
                v[j] = centered ? center + (double(j) - double(mid)) * step : start + double(j) * step;
            // strictly increasing even when the span collapsed
            for (std::size_t j = 1; j < n; ++j)
                if (!(v[j] > v[j - 1]))
                    v[j] = std::nextafter(v[j - 1], std::numeric_limits<double>::infinity());
            return v;
        }
    }

    // Exhaustive evaluation of one rectangular grid. Ties go to the smallest d, then
    // the smallest theta; -inf and NaN cells never win.
    template <class Objective>
        requires grid_objective<Objective> || point_objective<Objective>
    likelihood_surface evaluate_surface(const Objective &obj, std::vector<double> d, std::vector<double> theta)
    {
        likelihood_surface s{std::move(d), std::move(theta), {}, 0, 0};
        s.values.assign(s.d_values.size() * s.theta_values.size(), 0.0);
        if constexpr (grid_objective<Objective>)
            obj.evaluate_grid(s.d_values, s.theta_values, s.values);
        else
            for (std::size_t id = 0; id < s.d_values.size(); ++id)
                for (std::size_t it = 0; it < s.theta_values.size(); ++it)
                    s.values[id * s.theta_values.size() + it] = obj(polar_position{s.d_values[id], s.theta_values[it]});

        double best = -std::numeric_limits<double>::infinity();
        bool found = false;
        for (std::size_t id = 0; id < s.d_values.size(); ++id)
            for (std::size_t it = 0; it < s.theta_values.size(); ++it)
            {
                const double v = s.at(id, it);
                if (std::isfinite(v) && (!found || v > best))
                {
                    best = v;
                    s.argmax_d = id;
                    s.argmax_theta = it;
                    found = true;
                }
            }
        if (!found)
            throw estimation_failure("every search cell is degenerate");
        return s;
    }

    // Coarse-to-fine maximum-likelihood search over (d, theta)
    template <class Objective>
        requires grid_objective<Objective> || point_objective<Objective>
    search_result grid_search_mle(const Objective &obj, const search_grid &grid, bool keep_surfaces = false)
    {
        grid.check();
        search_result r;
        auto surf = evaluate_surface(obj, grid.d_values, grid.theta_values);
        r.evaluations += surf.values.size();

        const double d_lo = grid.d_values.front(), d_hi = grid.d_values.back();
        const double t_lo = grid.theta_values.front(), t_hi = grid.theta_values.back();
        double span_d = d_hi - d_lo, span_t = t_hi - t_lo;
        for (std::size_t stage = 0; stage < grid.refinement_stages; ++stage)
        {
            span_d /= grid.shrink;
            span_t /= grid.shrink;
            const auto inc = surf.argmax();
            auto dv = span_d > 0.0 ? detail::refine_axis(inc.d, span_d, grid.refine_points, d_lo, d_hi)
                                   : std::vector<double>{inc.d};
            auto tv = span_t > 0.0 ? detail::refine_axis(inc.theta, span_t, grid.refine_points, t_lo, t_hi)
                                   : std::vector<double>{inc.theta};
            auto next = evaluate_surface(obj, std::move(dv), std::move(tv));
            r.evaluations += next.values.size();
            if (keep_surfaces)
                r.surfaces.push_back(std::move(surf));
            surf = std::move(next);
        }
        r.estimate = surf.argmax();
        r.value = surf.max_value();
        if (keep_surfaces)
            r.surfaces.push_back(std::move(surf));
        return r;
    }

    inline void write_surface_csv(const likelihood_surface &s, const std::string &path)
    {
        std::ofstream f(path);
        if (!f)
            throw io_error("cannot open surface file for writing", path);
        f << "d_m,theta_rad,value\n" << std::setprecision(17);
        for (std::size_t id = 0; id < s.d_values.size(); ++id)
            for (std::size_t it = 0; it < s.theta_values.size(); ++it)
                f << s.d_values[id] << ',' << s.theta_values[it] << ',' << s.at(id, it) << '\n';
        if (!f)
            throw io_error("failed writing surface file", path);
    }
}

#endif
