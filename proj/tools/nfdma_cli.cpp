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

#include <CLI11.hpp>

#include <iostream>

namespace
{
    using namespace nfdma;

    struct common_options
    {
        std::string config;
        std::string out = "results";
        std::optional<std::uint64_t> seed;
        std::optional<std::size_t> trials;
        std::vector<std::string> snr;
        std::optional<std::size_t> parallel;
        bool plots = true;
    };

    void add_common(CLI::App &sub, common_options &o, bool with_out = true)
    {
        sub.add_option("--config", o.config, "Scenario file (INI)")->check(CLI::ExistingFile);
        if (with_out)
            sub.add_option("--out", o.out, "Output directory")->capture_default_str();
        sub.add_option("--seed", o.seed, "Master seed override");
        sub.add_option("--trials", o.trials, "Trials per point override")->check(CLI::PositiveNumber);
        sub.add_option("--snr", o.snr, "SNR in dB, repeatable ('inf' for noiseless)")->allow_extra_args(false);
        sub.add_option("--parallel", o.parallel, "Worker threads (default: available cores)")
            ->check(CLI::PositiveNumber);
        sub.add_flag("--plots,!--no-plots", o.plots, "Render SVG plots from the CSVs");
    }

    scenario_config load(const common_options &o)
    {
        scenario_config cfg = o.config.empty() ? scenario_config{} : load_config(o.config);
        if (o.seed)
            cfg.master_seed = *o.seed;
        return cfg;
    }

    std::vector<double> snr_values(const common_options &o)
    {
        std::vector<double> v;
        for (const auto &s : o.snr)
            v.push_back(detail::parse_double("--snr", s));
        return v;
    }

    std::size_t workers(const common_options &o) { return o.parallel ? *o.parallel : default_workers(); }

    nlohmann::json invocation(const common_options &o, const std::string &command)
    {
        nlohmann::json j{{"command", command},
                         {"config_file", o.config},
                         {"out", o.out},
                         {"plots", o.plots},
                         {"snr_flags", o.snr}};
        j["seed_flag"] = o.seed ? nlohmann::json(*o.seed) : nlohmann::json();
        j["trials_flag"] = o.trials ? nlohmann::json(*o.trials) : nlohmann::json();
        j["parallel_flag"] = o.parallel ? nlohmann::json(*o.parallel) : nlohmann::json();
        return j;
    }

    int cmd_rmse(const common_options &o)
    {
        auto cfg = load(o);
        if (o.trials)
            cfg.trials = *o.trials;
        if (!o.snr.empty())
            cfg.snr_db = snr_values(o);
        const auto n = workers(o);
        const auto res = run_rmse_vs_snr(cfg, n);
        const auto files = persist_results(res, o.out, n, invocation(o, "rmse-vs-snr"));
        if (o.plots)
            render_rmse_plot(read_aggregate_csv(files.aggregate), std::filesystem::path(o.out) / "rmse_vs_snr.svg");
        for (const auto &a : res.aggregates)
            std::cout << to_string(a.method) << " snr_db=" << format_number(a.snr_db)
                      << " rmse_m=" << format_number(a.rmse_m) << " trials=" << a.trials << '\n';
        if (res.failures)
            std::cout << "excluded failures: " << res.failures << '\n';
        return 0;
    }

    int cmd_heatmap(const common_options &o, const std::string &scenario, std::optional<double> grid)
    {
        auto cfg = load(o);
        if (o.trials)
            cfg.heatmap.trials = *o.trials;
        if (!o.snr.empty())
        {
            const auto v = snr_values(o);
            if (v.size() != 1)
                throw config_error("heatmap takes a single --snr value");
            cfg.heatmap.snr_db = v.front();
        }
        if (grid)
        {
            if (!(*grid > 0.0) || *grid > cfg.heatmap.extent_m)
                throw config_error("--grid must lie in (0, extent]");
            cfg.heatmap.points = std::size_t(std::lround(cfg.heatmap.extent_m / *grid)) + 1;
        }
        const auto which = parse_field_scenario(scenario);
        const auto n = workers(o);
        const auto res = run_heatmap(cfg, which, n);
        auto inv = invocation(o, "heatmap");
        inv["grid_flag"] = grid ? nlohmann::json(*grid) : nlohmann::json();
        const auto files = persist_results(res, o.out, n, inv);
        if (o.plots)
        {
            auto svg = files.heatmap;
            svg.replace_extension(".svg");
            render_heatmap(read_heatmap_csv(files.heatmap), svg);
        }
        const heatmap_cell *best = nullptr;
        for (const auto &c : res.cells)
            if (std::isfinite(c.rmse_m) && (!best || c.rmse_m < best->rmse_m))
                best = &c;
        std::cout << to_string(which) << ": " << res.points << "x" << res.points << " cells, resolution "
                  << format_number(res.resolution_m) << " m\n";
        if (best)
            std::cout << "lowest rmse_m=" << format_number(best->rmse_m) << " at x_m=" << format_number(best->x_m)
                      << " y_m=" << format_number(best->y_m) << '\n';
        return 0;
    }

    struct estimate_options
    {
        std::string scheme = "dma_tuned_half";
        std::string trace;
    };

    int cmd_estimate(const common_options &o, const estimate_options &e)
    {
        const auto cfg = load(o);
        cfg.validate();
        const auto snr = snr_values(o);
        if (snr.size() > 1)
            throw config_error("estimate-once takes a single --snr value");
        const double snr_db = snr.empty() ? cfg.snr_db.front() : snr.front();
        const std::uint64_t seed = cfg.master_seed;
        const auto method = parse_scheme(e.scheme);
        const double noise = noise_power_from_snr_db(snr_db);
        const auto grid = cfg.search.grid(cfg.d_fraunhofer, cfg.truth.d);

        polar_position est;
        double err = 0.0;
        if (method == scheme::fully_digital)
        {
            const auto layout = array_layout::strips(cfg.fully_digital.layout());
            const auto ch = build_channel(layout, cfg.truth, cfg.carrier_hz, cfg.gain);
            const auto x = sample_snapshots(ch, waveguide_matrix::identity(layout.size()), fully_digital{},
                                            cfg.snapshots, noise, iteration_noise_seed(seed, 0));
            est = grid_search_mle(fd_likelihood(layout, cfg.carrier_hz, cfg.gain, x), grid).estimate;
            err = position_error(layout, est, cfg.truth);
        }
        else
        {
            const bool half = method == scheme::dma_random_half || method == scheme::dma_tuned_half;
            const auto layout = array_layout::strips((half ? cfg.dma_half : cfg.dma_quarter).layout());
            const auto sc = dma_scenario::make(layout, cfg.waveguide(layout.n_strips()), cfg.truth, cfg.carrier_hz,
                                               cfg.gain, noise, cfg.snapshots);
            alternating_config ac;
            const bool random = method == scheme::dma_random_half || method == scheme::dma_random_quarter;
            ac.iterations = random ? 1 : cfg.iterations;
            ac.initial_weights = seed;
            ac.grid = grid;
            ac.resample_per_iteration = cfg.resample_per_iteration;
            const auto tr = run_alternating(sc, ac, seed);
            const auto &rec = random ? tr.records.front() : tr.records.back();
            est = rec.estimate;
            err = rec.error_m;
            if (!e.trace.empty())
                write_trace_csv(tr, e.trace);
            for (const auto &r : tr.records)
                std::cout << "k=" << r.k << " d_m=" << format_number(r.estimate.d)
                          << " theta_rad=" << format_number(r.estimate.theta) << " error_m=" << format_number(r.error_m)
                          << '\n';
        }
        std::cout << to_string(method) << " snr_db=" << format_number(snr_db) << " seed=" << seed
                  << " d_hat_m=" << format_number(est.d) << " theta_hat_rad=" << format_number(est.theta)
                  << " error_m=" << format_number(err) << '\n';
        return 0;
    }

    struct tune_options
    {
        std::optional<double> d, theta;
        std::string architecture = "dma_half";
        std::string regime = "lorentzian";
        std::string file = "weights.csv";
    };

    int cmd_tune(const common_options &o, const tune_options &t)
    {
        const auto cfg = load(o);
        cfg.validate();
        const auto layout = array_layout::strips(cfg.architecture(t.architecture).layout());
        const polar_position focus{t.d.value_or(cfg.truth.d), t.theta.value_or(cfg.truth.theta)};
        check_position(focus);
        auto w = tune_weights(layout, cfg.waveguide(layout.n_strips()), focus, cfg.carrier_hz);
        if (parse_regime(t.regime) == weight_regime::lorentzian)
            w = project_lorentzian(w);
        const auto dir = std::filesystem::path(o.out);
        ensure_directory(dir);
        const auto path = dir / t.file;
        write_weights_csv(w, path.string());
        std::cout << "wrote " << w.n_strips() << "x" << w.n_per_strip() << " " << to_string(w.regime())
                  << " weights to " << path.string() << " (checksum " << w.checksum() << ")\n";
        return 0;
    }

    int cmd_selfcheck()
    {
        bool all = true;
        for (const auto &r : run_selfcheck())
        {
            std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
            all = all && r.passed;
        }
        return all ? 0 : 2;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"Near-field localization with dynamic metasurface antennas"};
    app.require_subcommand(1);

    common_options rmse_o, heat_o, est_o, tune_o;
    auto *rmse = app.add_subcommand("rmse-vs-snr", "Monte Carlo RMSE of every scheme at each SNR");
    add_common(*rmse, rmse_o);

    auto *heat = app.add_subcommand("heatmap", "RMSE of the alternating estimator per initial position");
    add_common(*heat, heat_o);
    std::string scenario = "near";
    std::optional<double> grid;
    heat->add_option("--scenario", scenario, "near or far")
        ->check(CLI::IsMember({"near", "far", "near_field", "far_field"}))
        ->capture_default_str();
    heat->add_option("--grid", grid, "Cell resolution in meters (0.1 gives the 91x91 map)");

    auto *est = app.add_subcommand("estimate-once", "One seeded estimate, printed to stdout");
    add_common(*est, est_o, false);
    estimate_options eo;
    est->add_option("--scheme", eo.scheme, "fd_mle, dma_random_half, dma_random_quarter, dma_tuned_half or dma_tuned_quarter")
        ->capture_default_str();
    est->add_option("--trace", eo.trace, "Write the per-iteration trace CSV here");

    auto *tune = app.add_subcommand("tune-weights", "Write focused DMA weights as CSV");
    add_common(*tune, tune_o);
    tune_options to;
    tune->add_option("--d", to.d, "Focus range in meters (default: configured source)");
    tune->add_option("--theta", to.theta, "Focus angle in radians (default: configured source)");
    tune->add_option("--architecture", to.architecture, "dma_half or dma_quarter")->capture_default_str();
    tune->add_option("--regime", to.regime, "lorentzian or phase_only")->capture_default_str();
    tune->add_option("--file", to.file, "File name inside --out")->capture_default_str();

    auto *self = app.add_subcommand("selfcheck", "Run the embedded oracle checks");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::CallForAllHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        std::cerr << e.what() << "\n\n" << app.help();
        return 1;
    }

    try
    {
        if (*rmse)
            return cmd_rmse(rmse_o);
        if (*heat)
            return cmd_heatmap(heat_o, scenario, grid);
        if (*est)
            return cmd_estimate(est_o, eo);
        if (*tune)
            return cmd_tune(tune_o, to);
        if (*self)
            return cmd_selfcheck();
    }
    catch (const config_error &e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
