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
#ifndef NFDMA_CONFIG_HPP
#define NFDMA_CONFIG_HPP

#include "nfdma/likelihood.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>

namespace nfdma
{
    struct array_params
    {
        std::size_t n_strips = 5;
        std::size_t n_per_strip = 48;
        double spacing_m = 0.005;
        double pitch_m = 0.005;

        strip_layout_params layout() const { return {n_strips, n_per_strip, spacing_m, pitch_m}; }
    };

    struct search_params
    {
        std::size_t n_d = 60;
        std::size_t n_theta = 121;
        std::size_t stages = 3;
        double shrink = 5.0;
        std::size_t refine_points = 21;
        double d_min_factor = 0.05; // times d_F
        double d_max_factor = 1.2;  // times d_F, widened to cover twice the true range

        search_grid grid(double d_fraunhofer, double truth_d) const
        {
            const double lo = d_min_factor * d_fraunhofer;
            const double hi = std::max(d_max_factor * d_fraunhofer, 2.0 * truth_d);
            return search_grid::make(lo, hi, n_d, n_theta, stages, shrink, refine_points);
        }
    };

    struct heatmap_params
    {
        double extent_m = 9.0;   // square side, array at the origin corner
        std::size_t points = 31; // per axis; 91 gives the 0.1 m grid
        std::size_t trials = 20;
        double snr_db = -5.0;
        std::size_t iterations = 1;
        std::string architecture = "dma_half";
        search_params search{30, 61, 3, 5.0, 11, 0.05, 1.2};
    };

    struct far_field_params
    {
        std::size_t n_per_strip = 10; // 5 cm strips at the dma_half spacing
        double d_fraunhofer = 2.0;
    };

    struct scenario_config
    {
        double carrier_hz = 28e9;
        polar_position truth{6.0, pi / 3.0};
        double d_fraunhofer = 24.0;
        std::vector<double> snr_db{-10.0, -5.0, 0.0, 5.0, 10.0};
        std::size_t trials = 100;
        std::size_t snapshots = 64;
        std::size_t iterations = 5;
        std::uint64_t master_seed = 1;
        gain_model gain = gain_model::unit;
        double alpha = 0.5; // Np/m
        double beta = 0.0;  // rad/m, 0 selects the free-space wavenumber
        bool resample_per_iteration = true;

        array_params fully_digital{5, 48, 0.005, 0.005};
        array_params dma_half{5, 48, 0.005, 0.005};
        array_params dma_quarter{5, 96, 0.0025, 0.005};
        search_params search;
        heatmap_params heatmap;
        far_field_params far_field;

        waveguide_model waveguide(std::size_t n_strips) const
        {
            return waveguide_model::uniform(n_strips, alpha, beta > 0.0 ? beta : two_pi / wavelength(carrier_hz));
        }

        const array_params &architecture(const std::string &name) const
        {
            if (name == "fully_digital")
                return fully_digital;
            if (name == "dma_half")
                return dma_half;
            if (name == "dma_quarter")
                return dma_quarter;
            throw config_error("unknown architecture '" + name + "'");
        }

        void validate() const
        {
            if (!(carrier_hz > 0.0))
                throw config_error("carrier_hz must be positive");
            check_position(truth);
            if (!(truth.theta > -0.5 * pi && truth.theta < 0.5 * pi))
                throw config_error("source must lie in front of the aperture");
            if (!(d_fraunhofer > 0.0))
                throw config_error("d_fraunhofer must be positive");
            if (snr_db.empty())
                throw config_error("snr_db list is empty");
            if (trials < 1 || snapshots < 1 || iterations < 1)
                throw config_error("trials, snapshots and iterations must be at least 1");
            if (!(alpha >= 0.0) || beta < 0.0)
                throw config_error("waveguide alpha must be >= 0 and beta >= 0");
            for (const auto *a : {&fully_digital, &dma_half, &dma_quarter})
                if (a->n_strips < 1 || a->n_per_strip < 1 || !(a->spacing_m > 0.0) || !(a->pitch_m > 0.0))
                    throw config_error("array dimensions must be positive");
            if (fully_digital.layout().n_strips * fully_digital.n_per_strip !=
                dma_half.n_strips * dma_half.n_per_strip)
                throw config_error("fully_digital and dma_half must have the same element count");
            if (heatmap.points < 2 || heatmap.trials < 1 || heatmap.iterations < 1 || !(heatmap.extent_m > 0.0))
                throw config_error("heatmap needs >= 2 points, >= 1 trial and iteration, positive extent");
            (void)architecture(heatmap.architecture);
            if (far_field.n_per_strip < 1 || !(far_field.d_fraunhofer > 0.0))
                throw config_error("far_field parameters must be positive");
            search.grid(d_fraunhofer, truth.d);
            heatmap.search.grid(d_fraunhofer, truth.d);
        }
    };

    namespace detail
    {
        inline double parse_double(const std::string &key, const std::string &v)
        {
            std::string s = v;
            s.erase(0, s.find_first_not_of(" \t"));
            s.erase(s.find_last_not_of(" \t") + 1);
            if (s == "inf" || s == "+inf")
                return std::numeric_limits<double>::infinity();
            if (s == "-inf")
                return -std::numeric_limits<double>::infinity();
            double out = 0.0;
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
            if (ec != std::errc() || p != s.data() + s.size() || s.empty())
                throw config_error("key '" + key + "': cannot parse number '" + v + "'");
            return out;
        }

        inline std::uint64_t parse_uint(const std::string &key, const std::string &v)
        {
            std::string s = v;
            s.erase(0, s.find_first_not_of(" \t"));
            s.erase(s.find_last_not_of(" \t") + 1);
            std::uint64_t out = 0;
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
            if (ec != std::errc() || p != s.data() + s.size() || s.empty())
                throw config_error("key '" + key + "': cannot parse unsigned integer '" + v + "'");
            return out;
        }

        inline bool parse_bool(const std::string &key, const std::string &v)
        {
            if (v == "true" || v == "1" || v == "yes")
                return true;
            if (v == "false" || v == "0" || v == "no")
                return false;
            throw config_error("key '" + key + "': expected boolean, got '" + v + "'");
        }

        inline std::vector<double> parse_list(const std::string &key, const std::string &v)
        {
            std::vector<double> out;
            std::size_t start = 0;
            while (start <= v.size())
            {
                const auto end = std::min(v.find(',', start), v.size());
                out.push_back(parse_double(key, v.substr(start, end - start)));
                start = end + 1;
            }
            return out;
        }

        // Binds every recognized "section.key" to a setter
        class binder
        {
        public:
            explicit binder(scenario_config &c)
            {
                num("scenario.carrier_hz", c.carrier_hz);
                num("scenario.d0_m", c.truth.d);
                num("scenario.theta0_rad", c.truth.theta);
                num("scenario.d_fraunhofer_m", c.d_fraunhofer);
                set_["scenario.snr_db"] = [&c](const std::string &k, const std::string &v)
                { c.snr_db = parse_list(k, v); };
                uint("scenario.trials", c.trials);
                uint("scenario.snapshots", c.snapshots);
                uint("scenario.iterations", c.iterations);
                set_["scenario.master_seed"] = [&c](const std::string &k, const std::string &v)
                { c.master_seed = parse_uint(k, v); };
                set_["scenario.gain_model"] = [&c](const std::string &, const std::string &v)
                { c.gain = parse_gain_model(v); };
                num("scenario.alpha_np_per_m", c.alpha);
                num("scenario.beta_rad_per_m", c.beta);
                set_["scenario.resample_per_iteration"] = [&c](const std::string &k, const std::string &v)
                { c.resample_per_iteration = parse_bool(k, v); };

                arr("fully_digital", c.fully_digital);
                arr("dma_half", c.dma_half);
                arr("dma_quarter", c.dma_quarter);
                search("search", c.search);

                num("heatmap.extent_m", c.heatmap.extent_m);
                uint("heatmap.points", c.heatmap.points);
                uint("heatmap.trials", c.heatmap.trials);
                num("heatmap.snr_db", c.heatmap.snr_db);
                uint("heatmap.iterations", c.heatmap.iterations);
                set_["heatmap.architecture"] = [&c](const std::string &, const std::string &v)
                { c.heatmap.architecture = v; };
                search("heatmap.search", c.heatmap.search);

                uint("far_field.n_per_strip", c.far_field.n_per_strip);
                num("far_field.d_fraunhofer_m", c.far_field.d_fraunhofer);
            }

            void apply(const std::string &key, const std::string &value) const
            {
                auto it = set_.find(key);
                if (it == set_.end())
                    throw config_error("unknown configuration key '" + key + "'");
                it->second(key, value);
            }

        private:
            using setter = std::function<void(const std::string &, const std::string &)>;

            void num(const std::string &k, double &ref)
            {
                set_[k] = [&ref](const std::string &key, const std::string &v)
                { ref = parse_double(key, v); };
            }
            void uint(const std::string &k, std::size_t &ref)
            {
                set_[k] = [&ref](const std::string &key, const std::string &v)
                { ref = static_cast<std::size_t>(parse_uint(key, v)); };
            }
            void arr(const std::string &s, array_params &a)
            {
                uint(s + ".n_strips", a.n_strips);
                uint(s + ".n_per_strip", a.n_per_strip);
                num(s + ".spacing_m", a.spacing_m);
                num(s + ".pitch_m", a.pitch_m);
            }
            void search(const std::string &s, search_params &p)
            {
                // "heatmap.search" keys live in the [heatmap] section with a search_ prefix
                const std::string pre = s == "search" ? "search." : "heatmap.search_";
                uint(pre + "n_d", p.n_d);
                uint(pre + "n_theta", p.n_theta);
                uint(pre + "stages", p.stages);
                num(pre + "shrink", p.shrink);
                uint(pre + "refine_points", p.refine_points);
                num(pre + "d_min_factor", p.d_min_factor);
                num(pre + "d_max_factor", p.d_max_factor);
            }

            std::map<std::string, setter> set_;
        };
    }

    // Flat key-value text with [sections], e.g.
    //   [scenario]
    //   snr_db = -10,-5,0,5,10
    //   [dma_quarter]
    //   n_per_strip = 96
    // Unknown keys are rejected; anything not given keeps its default.
    inline scenario_config parse_config(std::istream &in, scenario_config cfg = {})
    {
        boost::property_tree::ptree tree;
        try
        {
            boost::property_tree::ini_parser::read_ini(in, tree);
        }
        catch (const boost::property_tree::ini_parser_error &e)
        {
            throw config_error(std::string("malformed configuration: ") + e.what());
        }
        const detail::binder b(cfg);
        for (const auto &[section, body] : tree)
        {
            if (body.empty())
                throw config_error("key '" + section + "' must live inside a [section]");
            for (const auto &[key, value] : body)
                b.apply(section + "." + key, value.get_value<std::string>());
        }
        cfg.validate();
        return cfg;
    }

    inline scenario_config load_config(const std::string &path)
    {
        std::ifstream f(path);
        if (!f)
            throw config_error("cannot open configuration file '" + path + "'");
        return parse_config(f);
    }

    inline nlohmann::json to_json(const array_params &a)
    {
        return {{"n_strips", a.n_strips}, {"n_per_strip", a.n_per_strip}, {"spacing_m", a.spacing_m}, {"pitch_m", a.pitch_m}};
    }

    inline nlohmann::json to_json(const search_params &s)
    {
        return {{"n_d", s.n_d}, {"n_theta", s.n_theta}, {"stages", s.stages}, {"shrink", s.shrink},
                {"refine_points", s.refine_points}, {"d_min_factor", s.d_min_factor}, {"d_max_factor", s.d_max_factor}};
    }

    // Effective configuration, every value that influenced the run
    inline nlohmann::json to_json(const scenario_config &c)
    {
        nlohmann::json snr = nlohmann::json::array();
        for (double s : c.snr_db)
            snr.push_back(std::isinf(s) ? nlohmann::json("inf") : nlohmann::json(s));
        return {
            {"scenario",
             {{"carrier_hz", c.carrier_hz},
              {"d0_m", c.truth.d},
              {"theta0_rad", c.truth.theta},
              {"d_fraunhofer_m", c.d_fraunhofer},
              {"snr_db", snr},
              {"trials", c.trials},
              {"snapshots", c.snapshots},
              {"iterations", c.iterations},
              {"master_seed", c.master_seed},
              {"gain_model", std::string(to_string(c.gain))},
              {"alpha_np_per_m", c.alpha},
              {"beta_rad_per_m", c.beta > 0.0 ? c.beta : two_pi / wavelength(c.carrier_hz)},
              {"resample_per_iteration", c.resample_per_iteration}}},
            {"fully_digital", to_json(c.fully_digital)},
            {"dma_half", to_json(c.dma_half)},
            {"dma_quarter", to_json(c.dma_quarter)},
            {"search", to_json(c.search)},
            {"heatmap",
             {{"extent_m", c.heatmap.extent_m},
              {"points", c.heatmap.points},
              {"trials", c.heatmap.trials},
              {"snr_db", c.heatmap.snr_db},
              {"iterations", c.heatmap.iterations},
              {"architecture", c.heatmap.architecture},
              {"search", to_json(c.heatmap.search)}}},
            {"far_field", {{"n_per_strip", c.far_field.n_per_strip}, {"d_fraunhofer_m", c.far_field.d_fraunhofer}}}};
    }
}

#endif
