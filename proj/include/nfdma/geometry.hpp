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
#ifndef NFDMA_GEOMETRY_HPP
#define NFDMA_GEOMETRY_HPP

#include "nfdma/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace nfdma
{
    inline constexpr double speed_of_light = 299792458.0; // m/s
    inline constexpr double pi = std::numbers::pi;
    inline constexpr double two_pi = 2.0 * std::numbers::pi;

    struct vec3
    {
        double x = 0.0, y = 0.0, z = 0.0;

        friend vec3 operator+(vec3 a, vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
        friend vec3 operator-(vec3 a, vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
        friend vec3 operator*(double s, vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
        friend bool operator==(const vec3 &, const vec3 &) = default;
    };

    inline double dot(vec3 a, vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
    inline double norm(vec3 a) { return std::sqrt(dot(a, a)); }
    inline vec3 cross(vec3 a, vec3 b)
    {
        return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
    }

    // Source position in the localization (X-Y) plane, range in meters and angle in
    // radians measured from the array broadside (+X) towards +Y.
    struct polar_position
    {
        double d = 1.0;
        double theta = 0.0;

        friend bool operator==(const polar_position &, const polar_position &) = default;
    };

    inline void check_position(const polar_position &p)
    {
        if (!(p.d > 0.0) || !std::isfinite(p.d))
            throw config_error("source range must be positive and finite, got " + std::to_string(p.d));
        if (!(p.theta >= -pi && p.theta < pi))
            throw config_error("source angle must lie in [-pi, pi), got " + std::to_string(p.theta));
    }

    inline double wavelength(double carrier_hz) { return speed_of_light / carrier_hz; }

    inline double wrap_phase(double phi)
    {
        double r = std::fmod(phi, two_pi);
        if (r < 0.0)
            r += two_pi;
        if (r >= two_pi) // fmod of tiny negatives
            r = 0.0;
        return r;
    }

    // Parameters of the default strip generator: strip i runs along Z with element
    // spacing `spacing_m`, strips are stacked along Y with pitch `pitch_m`, the
    // aperture lies in the X = 0 plane and its centroid is the origin.
    struct strip_layout_params
    {
        std::size_t n_strips = 5;
        std::size_t n_per_strip = 48;
        double spacing_m = 0.005;
        double pitch_m = 0.005;
    };

    class array_layout
    {
    public:
        // General constructor. Positions and feed distances are stored strip-major,
        // element (i, l) at index i * n_per_strip + l.
        array_layout(std::size_t n_strips, std::size_t n_per_strip,
                     std::vector<vec3> positions, std::vector<double> feed_distances,
                     double spacing_m, double pitch_m, vec3 reference = {})
            : n_strips_(n_strips), n_per_strip_(n_per_strip), positions_(std::move(positions)),
              feed_(std::move(feed_distances)), spacing_(spacing_m), pitch_(pitch_m), reference_(reference)
        {
            validate();
            cache_relative();
        }

        static array_layout strips(const strip_layout_params &p)
        {
            if (p.n_strips == 0 || p.n_per_strip == 0)
                throw config_error("layout needs at least one strip and one element per strip");
            if (!(p.spacing_m > 0.0) || !(p.pitch_m > 0.0))
                throw config_error("element spacing and strip pitch must be positive");

            std::vector<vec3> pos;
            std::vector<double> feed;
            pos.reserve(p.n_strips * p.n_per_strip);
            feed.reserve(p.n_strips * p.n_per_strip);
            const double y0 = 0.5 * double(p.n_strips - 1) * p.pitch_m;
            const double z0 = 0.5 * double(p.n_per_strip - 1) * p.spacing_m;
            for (std::size_t i = 0; i < p.n_strips; ++i)
                for (std::size_t l = 0; l < p.n_per_strip; ++l)
                {
                    pos.push_back({0.0, double(i) * p.pitch_m - y0, double(l) * p.spacing_m - z0});
                    // port sits one spacing before the first element
                    feed.push_back(double(l + 1) * p.spacing_m);
                }
            return array_layout(p.n_strips, p.n_per_strip, std::move(pos), std::move(feed), p.spacing_m, p.pitch_m);
        }

        std::size_t n_strips() const noexcept { return n_strips_; }
        std::size_t n_per_strip() const noexcept { return n_per_strip_; }
        std::size_t size() const noexcept { return positions_.size(); }
        double spacing() const noexcept { return spacing_; }
        double pitch() const noexcept { return pitch_; }
        vec3 reference() const noexcept { return reference_; }

        std::size_t index(std::size_t strip, std::size_t elem) const
        {
            if (strip >= n_strips_ || elem >= n_per_strip_)
                throw index_error("element (" + std::to_string(strip) + ", " + std::to_string(elem) +
                                  ") outside layout " + std::to_string(n_strips_) + "x" + std::to_string(n_per_strip_));
            return strip * n_per_strip_ + elem;
        }

        vec3 position(std::size_t strip, std::size_t elem) const { return positions_[index(strip, elem)]; }
        double feed_distance(std::size_t strip, std::size_t elem) const { return feed_[index(strip, elem)]; }

        std::span<const vec3> positions() const noexcept { return positions_; }
        std::span<const double> feed_distances() const noexcept { return feed_; }

        // Element coordinates relative to the reference point. The z part only enters
        // through the squared radius because sources live in the X-Y plane.
        std::span<const double> rel_x() const noexcept { return rel_x_; }
        std::span<const double> rel_y() const noexcept { return rel_y_; }
        std::span<const double> rel_r2() const noexcept { return rel_r2_; }

    private:
        void validate() const
        {
            const std::size_t n = n_strips_ * n_per_strip_;
            if (n == 0)
                throw config_error("empty layout");
            if (positions_.size() != n || feed_.size() != n)
                throw dimension_error("layout expects " + std::to_string(n) + " positions and feed distances");
            for (std::size_t i = 0; i < n_strips_; ++i)
                for (std::size_t l = 0; l < n_per_strip_; ++l)
                {
                    const double rho = feed_[i * n_per_strip_ + l];
                    if (!(rho >= 0.0))
                        throw config_error("feed distances must be non-negative");
                    if (l > 0 && !(rho > feed_[i * n_per_strip_ + l - 1]))
                        throw config_error("feed distances must increase along each strip");
                }
            if (n_per_strip_ < 2)
                return;

            // Collinear elements within each strip and parallel strips
            const vec3 axis0 = positions_[n_per_strip_ - 1] - positions_[0];
            const double len0 = norm(axis0);
            for (std::size_t i = 0; i < n_strips_; ++i)
            {
                const vec3 a = positions_[i * n_per_strip_];
                const vec3 axis = positions_[i * n_per_strip_ + n_per_strip_ - 1] - a;
                const double len = norm(axis);
                if (norm(cross(axis, axis0)) > 1e-9 * len * len0)
                    throw config_error("strips must be parallel");
                for (std::size_t l = 1; l + 1 < n_per_strip_; ++l)
                {
                    const vec3 b = positions_[i * n_per_strip_ + l] - a;
                    if (norm(cross(b, axis)) > 1e-9 * len * std::max(norm(b), 1e-12))
                        throw config_error("elements of a strip must be collinear");
                }
            }
        }

        void cache_relative()
        {
            rel_x_.resize(size());
            rel_y_.resize(size());
            rel_r2_.resize(size());
            for (std::size_t k = 0; k < size(); ++k)
            {
                const vec3 r = positions_[k] - reference_;
                rel_x_[k] = r.x;
                rel_y_[k] = r.y;
                rel_r2_[k] = dot(r, r);
            }
        }

        std::size_t n_strips_, n_per_strip_;
        std::vector<vec3> positions_;
        std::vector<double> feed_;
        double spacing_, pitch_;
        vec3 reference_;
        std::vector<double> rel_x_, rel_y_, rel_r2_;
    };

    // Source location in the array frame
    inline vec3 to_cartesian(const array_layout &layout, const polar_position &src)
    {
        return layout.reference() + vec3{src.d * std::cos(src.theta), src.d * std::sin(src.theta), 0.0};
    }

    // Element-to-source distance through the triangle formed by the reference point,
    // the element and the source: d^2 = r^2 + d0^2 - 2 r d0 cos(gamma).
    inline double element_source_distance(const array_layout &layout, std::size_t strip, std::size_t elem,
                                          const polar_position &src)
    {
        const std::size_t k = layout.index(strip, elem);
        const vec3 rel = layout.positions()[k] - layout.reference();
        const double r = norm(rel);
        const double cos_gamma = r > 0.0 ? (rel.x * std::cos(src.theta) + rel.y * std::sin(src.theta)) / r : 0.0;
        return std::sqrt(std::max(0.0, r * r + src.d * src.d - 2.0 * r * src.d * cos_gamma));
    }

    // Same distance through Cartesian coordinates
    inline double element_source_distance_cartesian(const array_layout &layout, std::size_t strip, std::size_t elem,
                                                    const polar_position &src)
    {
        return norm(layout.position(strip, elem) - to_cartesian(layout, src));
    }

    // Per-element distances for one source position, strip-major
    inline void source_distances(const array_layout &layout, const polar_position &src, std::span<double> out)
    {
        if (out.size() != layout.size())
            throw dimension_error("distance buffer size does not match layout");
        const double c = std::cos(src.theta), s = std::sin(src.theta), d2 = src.d * src.d;
        const auto rx = layout.rel_x(), ry = layout.rel_y(), r2 = layout.rel_r2();
        for (std::size_t k = 0; k < out.size(); ++k)
            out[k] = std::sqrt(std::max(0.0, r2[k] + d2 - 2.0 * src.d * (rx[k] * c + ry[k] * s)));
    }

    // Phase accumulated over `distance_m` at the carrier, not wrapped
    inline double phase_delay(double distance_m, double carrier_hz)
    {
        return two_pi * carrier_hz * distance_m / speed_of_light;
    }

    // 2 D^2 / lambda with D the largest element separation
    inline double fraunhofer_distance(const array_layout &layout, double carrier_hz)
    {
        const auto pos = layout.positions();
        double best = 0.0;
        for (std::size_t a = 0; a < pos.size(); ++a)
            for (std::size_t b = a + 1; b < pos.size(); ++b)
                best = std::max(best, dot(pos[a] - pos[b], pos[a] - pos[b]));
        return 2.0 * best / wavelength(carrier_hz);
    }
}

#endif
