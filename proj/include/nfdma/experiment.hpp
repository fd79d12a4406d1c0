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
#ifndef NFDMA_EXPERIMENT_HPP
#define NFDMA_EXPERIMENT_HPP

#include "nfdma/alternating.hpp"
#include "nfdma/config.hpp"
#include "nfdma/parallel.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <filesystem>

namespace nfdma
{
    inline constexpr std::string_view version = "1.0.0";

    enum class scheme
    {
        fully_digital,
        dma_random_half,
        dma_random_quarter,
        dma_tuned_half,
        dma_tuned_quarter
    };

    inline constexpr std::array all_schemes{scheme::fully_digital, scheme::dma_random_half, scheme::dma_random_quarter,
                                            scheme::dma_tuned_half, scheme::dma_tuned_quarter};

    inline std::string_view to_string(scheme s)
    {
        switch (s)
        {
        case scheme::fully_digital:
            return "fd_mle";
        case scheme::dma_random_half:
            return "dma_random_half";
        case scheme::dma_random_quarter:
            return "dma_random_quarter";
        case scheme::dma_tuned_half:
            return "dma_tuned_half";
        case scheme::dma_tuned_quarter:
            return "dma_tuned_quarter";
        }
        return "?";
    }

    inline scheme parse_scheme(std::string_view s)
    {
        for (auto sc : all_schemes)
            if (to_string(sc) == s)
                return sc;
        throw config_error("unknown scheme '" + std::string(s) + "'");
    }

    // Shortest round-trip decimal representation
    inline std::string format_number(double v)
    {
        if (std::isnan(v))
            return "";
        if (std::isinf(v))
            return v > 0 ? "inf" : "-inf";
        char buf[64];
        auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, p);
    }

    inline double parse_number(const std::string &s)
    {
        if (s.empty())
            return std::numeric_limits<double>::quiet_NaN();
        return detail::parse_double("csv", s);
    }

    struct trial_row
    {
        scheme method = scheme::fully_digital;
        double snr_db = 0.0;
        std::size_t trial = 0;
        std::uint64_t seed = 0;
        double d_hat = 0.0;
        double theta_hat = 0.0;
        double error_m = 0.0;
    };

    struct aggregate_row
    {
        scheme method = scheme::fully_digital;
        double snr_db = 0.0;
        double rmse_m = 0.0;
        std::size_t trials = 0;
    };

    struct experiment_result
    {
        std::vector<trial_row> rows;
        std::vector<aggregate_row> aggregates;
        std::size_t failures = 0;
        double wall_seconds = 0.0;
        scenario_config config;
    };

    inline double rmse(std::span<const double> errors)
    {
        if (errors.empty())
            return std::numeric_limits<double>::quiet_NaN();
        double s = 0.0;
        for (double e : errors)
            s += e * e;
        return std::sqrt(s / double(errors.size()));
    }

    // Groups rows by (scheme, snr) in scheme-then-SNR order of first appearance
    inline std::vector<aggregate_row> aggregate(std::span<const trial_row> rows)
    {
        std::vector<aggregate_row> out;
        std::vector<std::vector<double>> errs;
        for (const auto &r : rows)
        {
            auto it = std::find_if(out.begin(), out.end(), [&](const aggregate_row &a)
                                   { return a.method == r.method && a.snr_db == r.snr_db; });
            if (it == out.end())
            {
                out.push_back({r.method, r.snr_db, 0.0, 0});
                errs.emplace_back();
                it = out.end() - 1;
            }
            errs[std::size_t(it - out.begin())].push_back(r.error_m);
        }
        for (std::size_t i = 0; i < out.size(); ++i)
        {
            out[i].rmse_m = rmse(errs[i]);
            out[i].trials = errs[i].size();
        }
        return out;
    }

    namespace detail
    {
        inline void check_failures(std::size_t failures, std::size_t attempts, const std::string &what)
        {
            if (failures > 0 && double(failures) >= 0.01 * double(attempts))
                throw estimation_failure(what + ": " + std::to_string(failures) + " of " + std::to_string(attempts) +
                                         " estimates failed (limit is 1%)");
        }

        inline double seconds_since(std::chrono::steady_clock::time_point t0)
        {
            return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
    }

    // Monte Carlo comparison of the fully-digital MLE, random-weight DMAs and DMAs tuned
    // by the alternating estimator, at every SNR of the configuration.
    //
    // Per (snr, trial) one seed drives all schemes: the fully-digital array and the
    // half-wavelength DMA observe identical element noise, and the random-weight
    // scheme is the iteration-0 estimate of the alternating run on the same draw.
    inline experiment_result run_rmse_vs_snr(const scenario_config &cfg, std::size_t workers = default_workers())
    {
        cfg.validate();
        const auto t0 = std::chrono::steady_clock::now();
        const double f = cfg.carrier_hz;
        const auto grid = cfg.search.grid(cfg.d_fraunhofer, cfg.truth.d);

        const auto fd_layout = array_layout::strips(cfg.fully_digital.layout());
        const auto half = array_layout::strips(cfg.dma_half.layout());
        const auto quarter = array_layout::strips(cfg.dma_quarter.layout());
        auto make_table = [&](const array_layout &l)
        { return std::make_shared<const steering_table>(l, f, cfg.gain, grid.d_values, grid.theta_values); };
        const auto half_table = make_table(half);
        const bool fd_shares = fd_layout.positions().size() == half.positions().size() &&
                               std::ranges::equal(fd_layout.positions(), half.positions());
        const auto fd_table = fd_shares ? half_table : make_table(fd_layout);
        const auto quarter_table = make_table(quarter);

        const std::size_t n_snr = cfg.snr_db.size(), n_trials = cfg.trials;
        constexpr std::size_t n_schemes = all_schemes.size();
        struct outcome
        {
            std::array<std::optional<trial_row>, n_schemes> rows;
        };
        std::vector<outcome> outcomes(n_snr * n_trials);

        parallel_for(outcomes.size(), workers, [&](std::size_t item)
                     {
            const std::size_t si = item / n_trials, trial = item % n_trials;
            const double snr = cfg.snr_db[si];
            const double noise = noise_power_from_snr_db(snr);
            const std::uint64_t seed = derive_seed(cfg.master_seed, {stream::trial, si, trial});
            auto &out = outcomes[item];
            auto row = [&](scheme s, const polar_position &est, double err) {
                out.rows[std::size_t(s)] = trial_row{s, snr, trial, seed, est.d, est.theta, err};
            };

            try
            {
                const auto ch = build_channel(fd_layout, cfg.truth, f, cfg.gain);
                const auto x = sample_snapshots(ch, waveguide_matrix::identity(fd_layout.size()), fully_digital{},
                                                cfg.snapshots, noise, iteration_noise_seed(seed, 0));
                const auto est = grid_search_mle(fd_likelihood(fd_layout, f, cfg.gain, x, fd_table), grid);
                row(scheme::fully_digital, est.estimate, position_error(fd_layout, est.estimate, cfg.truth));
            }
            catch (const estimation_failure &)
            {
            }

            const std::array<std::tuple<const array_layout *, std::shared_ptr<const steering_table>, scheme, scheme>, 2>
                dmas{{{&half, half_table, scheme::dma_random_half, scheme::dma_tuned_half},
                      {&quarter, quarter_table, scheme::dma_random_quarter, scheme::dma_tuned_quarter}}};
            for (const auto &[layout, table, random_scheme, tuned_scheme] : dmas)
            {
                const auto sc = dma_scenario::make(*layout, cfg.waveguide(layout->n_strips()), cfg.truth, f, cfg.gain,
                                                   noise, cfg.snapshots);
                alternating_config ac;
                ac.iterations = cfg.iterations;
                ac.initial_weights = seed;
                ac.grid = grid;
                ac.resample_per_iteration = cfg.resample_per_iteration;
                ac.table = table;
                try
                {
                    const auto tr = run_alternating(sc, ac, seed);
                    row(random_scheme, tr.records.front().estimate, tr.records.front().error_m);
                    row(tuned_scheme, tr.final_estimate, tr.records.back().error_m);
                }
                catch (const alternating_failure &e)
                {
                    if (!e.partial().records.empty())
                        row(random_scheme, e.partial().records.front().estimate, e.partial().records.front().error_m);
                }
            } });

        experiment_result res;
        res.config = cfg;
        for (std::size_t s = 0; s < n_schemes; ++s)
            for (std::size_t si = 0; si < n_snr; ++si)
                for (std::size_t t = 0; t < n_trials; ++t)
                {
                    const auto &r = outcomes[si * n_trials + t].rows[s];
                    if (r)
                        res.rows.push_back(*r);
                    else
                        ++res.failures;
                }
        detail::check_failures(res.failures, n_schemes * n_snr * n_trials, "rmse-vs-snr");
        res.aggregates = aggregate(res.rows);
        res.wall_seconds = detail::seconds_since(t0);
        return res;
    }

    enum class field_scenario
    {
        near_field,
        far_field
    };

    inline std::string_view to_string(field_scenario s) { return s == field_scenario::near_field ? "near_field" : "far_field"; }

    inline field_scenario parse_field_scenario(std::string_view s)
    {
        if (s == "near_field" || s == "near")
            return field_scenario::near_field;
        if (s == "far_field" || s == "far")
            return field_scenario::far_field;
        throw config_error("unknown heatmap scenario '" + std::string(s) + "'");
    }

    struct heatmap_cell
    {
        double x_m = 0.0;
        double y_m = 0.0;
        double rmse_m = std::numeric_limits<double>::quiet_NaN(); // NaN for skipped cells
        std::size_t trials = 0;
    };

    struct heatmap_result
    {
        field_scenario scenario = field_scenario::near_field;
        double extent_m = 0.0;
        std::size_t points = 0;
        double resolution_m = 0.0;
        std::vector<heatmap_cell> cells; // x-major: cells[ix * points + iy]
        std::size_t failures = 0;
        double wall_seconds = 0.0;
        scenario_config config;

        const heatmap_cell &at(std::size_t ix, std::size_t iy) const { return cells[ix * points + iy]; }
    };

    // Layout, d_F and search grid used by one heatmap scenario
    struct heatmap_setup
    {
        array_layout layout;
        double d_fraunhofer;
        search_grid grid;
    };

    inline heatmap_setup make_heatmap_setup(const scenario_config &cfg, field_scenario which)
    {
        auto arr = cfg.architecture(cfg.heatmap.architecture);
        double d_f = cfg.d_fraunhofer;
        if (which == field_scenario::far_field)
        {
            arr.n_per_strip = cfg.far_field.n_per_strip;
            d_f = cfg.far_field.d_fraunhofer;
        }
        return {array_layout::strips(arr.layout()), d_f, cfg.heatmap.search.grid(d_f, cfg.truth.d)};
    }

    // RMSE of the alternating estimator's final estimate when every grid point in turn
    // is the initial focus. The grid covers [0, extent]^2 with the array at the origin;
    // points on or behind the aperture plane (x <= 0) are skipped. Trial t uses the same
    // seed in every cell.
    inline heatmap_result run_heatmap(const scenario_config &cfg, field_scenario which,
                                      std::size_t workers = default_workers())
    {
        cfg.validate();
        const auto t0 = std::chrono::steady_clock::now();
        const auto setup = make_heatmap_setup(cfg, which);
        const auto &layout = setup.layout;
        const double f = cfg.carrier_hz;
        const auto table = std::make_shared<const steering_table>(layout, f, cfg.gain, setup.grid.d_values,
                                                                  setup.grid.theta_values);
        const auto wg = cfg.waveguide(layout.n_strips());
        const auto sc = dma_scenario::make(layout, wg, cfg.truth, f, cfg.gain,
                                           noise_power_from_snr_db(cfg.heatmap.snr_db), cfg.snapshots);

        heatmap_result res;
        res.scenario = which;
        res.extent_m = cfg.heatmap.extent_m;
        res.points = cfg.heatmap.points;
        res.resolution_m = cfg.heatmap.extent_m / double(cfg.heatmap.points - 1);
        res.config = cfg;
        res.cells.resize(res.points * res.points);
        std::vector<std::size_t> cell_failures(res.cells.size(), 0);

        parallel_for(res.cells.size(), workers, [&](std::size_t c)
                     {
            auto &cell = res.cells[c];
            cell.x_m = double(c / res.points) * res.resolution_m;
            cell.y_m = double(c % res.points) * res.resolution_m;
            if (!(cell.x_m > 0.0))
                return;
            const polar_position focus{std::hypot(cell.x_m, cell.y_m), std::atan2(cell.y_m, cell.x_m)};
            alternating_config ac;
            ac.iterations = cfg.heatmap.iterations;
            ac.initial_weights = project_lorentzian(tune_weights(layout, wg, focus, f));
            ac.grid = setup.grid;
            ac.resample_per_iteration = cfg.resample_per_iteration;
            ac.table = table;
            std::vector<double> errors;
            for (std::size_t t = 0; t < cfg.heatmap.trials; ++t)
            {
                try
                {
                    const auto tr = run_alternating(sc, ac, derive_seed(cfg.master_seed, {stream::trial, t}));
                    errors.push_back(tr.records.back().error_m);
                }
                catch (const estimation_failure &)
                {
                    ++cell_failures[c];
                }
            }
            cell.trials = errors.size();
            cell.rmse_m = rmse(errors); });

        std::size_t active = 0;
        for (std::size_t c = 0; c < res.cells.size(); ++c)
        {
            res.failures += cell_failures[c];
            active += res.cells[c].x_m > 0.0;
        }
        detail::check_failures(res.failures, active * cfg.heatmap.trials, "heatmap");
        res.wall_seconds = detail::seconds_since(t0);
        return res;
    }

    // ---- persistence ------------------------------------------------------------------

    namespace detail
    {
        inline std::ofstream open_out(const std::filesystem::path &p)
        {
            std::ofstream f(p);
            if (!f)
                throw io_error("cannot open for writing", p.string());
            return f;
        }

        inline void close_checked(std::ofstream &f, const std::filesystem::path &p)
        {
            f.close();
            if (!f)
                throw io_error("write failed", p.string());
        }

        inline std::vector<std::string> split_csv(const std::string &line)
        {
            std::vector<std::string> out;
            std::size_t start = 0;
            while (true)
            {
                const auto end = line.find(',', start);
                out.push_back(line.substr(start, end == std::string::npos ? std::string::npos : end - start));
                if (end == std::string::npos)
                    break;
                start = end + 1;
            }
            return out;
        }

        template <class F>
        void read_csv(const std::filesystem::path &p, const std::string &header, std::size_t columns, F &&on_row)
        {
            std::ifstream f(p);
            if (!f)
                throw io_error("cannot open", p.string());
            std::string line;
            if (!std::getline(f, line) || line != header)
                throw io_error("unexpected header, expected '" + header + "'", p.string());
            std::size_t lineno = 1;
            while (std::getline(f, line))
            {
                ++lineno;
                if (line.empty())
                    continue;
                auto cols = split_csv(line);
                if (cols.size() != columns)
                    throw io_error("line " + std::to_string(lineno) + " has " + std::to_string(cols.size()) +
                                       " columns",
                                   p.string());
                try
                {
                    on_row(cols);
                }
                catch (const config_error &e)
                {
                    throw io_error("line " + std::to_string(lineno) + ": " + e.what(), p.string());
                }
            }
        }
    }

    inline constexpr std::string_view trials_header = "scheme,snr_db,trial,seed,d_hat_m,theta_hat_rad,error_m";
    inline constexpr std::string_view aggregate_header = "scheme,snr_db,rmse_m,trials";
    inline constexpr std::string_view heatmap_header = "scenario,x_m,y_m,rmse_m,trials";

    inline void write_trials_csv(std::span<const trial_row> rows, const std::filesystem::path &p)
    {
        auto f = detail::open_out(p);
        f << trials_header << '\n';
        for (const auto &r : rows)
            f << to_string(r.method) << ',' << format_number(r.snr_db) << ',' << r.trial << ',' << r.seed << ','
              << format_number(r.d_hat) << ',' << format_number(r.theta_hat) << ',' << format_number(r.error_m) << '\n';
        detail::close_checked(f, p);
    }

    inline void write_aggregate_csv(std::span<const aggregate_row> rows, const std::filesystem::path &p)
    {
        auto f = detail::open_out(p);
        f << aggregate_header << '\n';
        for (const auto &a : rows)
            f << to_string(a.method) << ',' << format_number(a.snr_db) << ',' << format_number(a.rmse_m) << ','
              << a.trials << '\n';
        detail::close_checked(f, p);
    }

    inline void write_heatmap_csv(const heatmap_result &h, const std::filesystem::path &p)
    {
        auto f = detail::open_out(p);
        f << heatmap_header << '\n';
        for (const auto &c : h.cells)
            f << to_string(h.scenario) << ',' << format_number(c.x_m) << ',' << format_number(c.y_m) << ','
              << format_number(c.rmse_m) << ',' << c.trials << '\n';
        detail::close_checked(f, p);
    }

    inline std::vector<trial_row> read_trials_csv(const std::filesystem::path &p)
    {
        std::vector<trial_row> rows;
        detail::read_csv(p, std::string(trials_header), 7, [&](const std::vector<std::string> &c)
                         { rows.push_back({parse_scheme(c[0]), parse_number(c[1]), detail::parse_uint("trial", c[2]),
                                           detail::parse_uint("seed", c[3]), parse_number(c[4]), parse_number(c[5]),
                                           parse_number(c[6])}); });
        return rows;
    }

    inline std::vector<aggregate_row> read_aggregate_csv(const std::filesystem::path &p)
    {
        std::vector<aggregate_row> rows;
        detail::read_csv(p, std::string(aggregate_header), 4, [&](const std::vector<std::string> &c)
                         { rows.push_back({parse_scheme(c[0]), parse_number(c[1]), parse_number(c[2]),
                                           detail::parse_uint("trials", c[3])}); });
        return rows;
    }

    struct heatmap_csv
    {
        std::string scenario;
        std::vector<heatmap_cell> cells;
    };

    inline heatmap_csv read_heatmap_csv(const std::filesystem::path &p)
    {
        heatmap_csv out;
        detail::read_csv(p, std::string(heatmap_header), 5, [&](const std::vector<std::string> &c)
                         {
            out.scenario = c[0];
            out.cells.push_back({parse_number(c[1]), parse_number(c[2]), parse_number(c[3]),
                                 detail::parse_uint("trials", c[4])}); });
        return out;
    }

    inline nlohmann::json make_manifest(const scenario_config &cfg, const std::string &experiment, double wall_seconds,
                                        std::size_t failures, std::size_t workers, const nlohmann::json &extra = {})
    {
        nlohmann::json m{{"tool", "nfdma"},
                         {"version", std::string(version)},
                         {"experiment", experiment},
                         {"master_seed", cfg.master_seed},
                         {"workers", workers},
                         {"failures", failures},
                         {"timings", {{"wall_seconds", wall_seconds}}},
                         {"config", to_json(cfg)}};
        if (!extra.is_null())
            m["invocation"] = extra;
        return m;
    }

    inline void write_manifest(const nlohmann::json &m, const std::filesystem::path &p)
    {
        auto f = detail::open_out(p);
        f << m.dump(2) << '\n';
        detail::close_checked(f, p);
    }

    inline nlohmann::json read_manifest(const std::filesystem::path &p)
    {
        std::ifstream f(p);
        if (!f)
            throw io_error("cannot open", p.string());
        try
        {
            return nlohmann::json::parse(f);
        }
        catch (const nlohmann::json::exception &e)
        {
            throw io_error(std::string("malformed manifest: ") + e.what(), p.string());
        }
    }

    struct persisted_files
    {
        std::filesystem::path trials, aggregate, heatmap, manifest;
    };

    inline void ensure_directory(const std::filesystem::path &dir)
    {
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec)
            throw io_error("cannot create output directory (" + ec.message() + ")", dir.string());
    }

    inline persisted_files persist_results(const experiment_result &r, const std::filesystem::path &dir,
                                           std::size_t workers = 0, const nlohmann::json &invocation = {})
    {
        ensure_directory(dir);
        persisted_files out{dir / "rmse_vs_snr_trials.csv", dir / "rmse_vs_snr.csv", {}, dir / "manifest_rmse_vs_snr.json"};
        write_trials_csv(r.rows, out.trials);
        write_aggregate_csv(r.aggregates, out.aggregate);
        write_manifest(make_manifest(r.config, "rmse-vs-snr", r.wall_seconds, r.failures, workers, invocation), out.manifest);
        return out;
    }

    inline persisted_files persist_results(const heatmap_result &h, const std::filesystem::path &dir,
                                           std::size_t workers = 0, nlohmann::json invocation = {})
    {
        ensure_directory(dir);
        const std::string tag(to_string(h.scenario));
        persisted_files out{{}, {}, dir / ("heatmap_" + tag + ".csv"), dir / ("manifest_heatmap_" + tag + ".json")};
        write_heatmap_csv(h, out.heatmap);
        if (invocation.is_null())
            invocation = nlohmann::json::object();
        invocation["scenario"] = tag;
        invocation["resolution_m"] = h.resolution_m;
        write_manifest(make_manifest(h.config, "heatmap", h.wall_seconds, h.failures, workers, invocation),
                       out.manifest);
        return out;
    }
}

#endif
