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
#include "nfdma/experiment.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <sstream>

namespace fs = std::filesystem;

namespace
{
    struct run_result
    {
        int code;
        std::string out, err;
    };

    run_result run(const std::string &args)
    {
        const auto err_file = fs::temp_directory_path() / "nfdma_cli_stderr.txt";
        const std::string cmd = std::string(NFDMA_CLI) + " " + args + " 2>" + err_file.string();
        FILE *p = popen(cmd.c_str(), "r");
        std::string out;
        std::array<char, 4096> buf;
        while (auto n = std::fread(buf.data(), 1, buf.size(), p))
            out.append(buf.data(), n);
        const int status = pclose(p);
        std::ifstream e(err_file);
        std::stringstream ss;
        ss << e.rdbuf();
        return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out, ss.str()};
    }

    fs::path tiny_config(const fs::path &dir)
    {
        const auto p = dir / "tiny.cfg";
        std::ofstream(p) << "[scenario]\nsnr_db = 0,10\ntrials = 2\niterations = 1\nsnapshots = 8\n"
                            "[search]\nn_d = 15\nn_theta = 21\nstages = 1\nrefine_points = 5\n"
                            "[heatmap]\ntrials = 1\nsearch_n_d = 10\nsearch_n_theta = 15\nsearch_stages = 1\n"
                            "search_refine_points = 5\n";
        return p;
    }

    fs::path fresh(const std::string &name)
    {
        const auto d = fs::temp_directory_path() / name;
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }
}

TEST(Cli, UnknownFlagPrintsUsageAndExitsOne)
{
    const auto r = run("rmse-vs-snr --bogus");
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("Usage"), std::string::npos);
    EXPECT_EQ(run("").code, 1);
}

TEST(Cli, ConfigErrorExitsOne)
{
    const auto dir = fresh("nfdma_cli_cfg");
    std::ofstream(dir / "bad.cfg") << "[scenario]\nwhatever = 1\n";
    const auto r = run("rmse-vs-snr --config " + (dir / "bad.cfg").string() + " --out " + (dir / "o").string());
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("whatever"), std::string::npos);
    EXPECT_EQ(run("estimate-once --snr loud").code, 1);
    fs::remove_all(dir);
}

TEST(Cli, RmseVsSnrWritesArtifacts)
{
    const auto dir = fresh("nfdma_cli_rmse");
    const auto out = dir / "results";
    const auto r = run("rmse-vs-snr --config " + tiny_config(dir).string() + " --out " + out.string() +
                       " --seed 5 --parallel 2 --snr 3 --snr 8");
    ASSERT_EQ(r.code, 0) << r.err;
    for (const char *f : {"rmse_vs_snr.csv", "rmse_vs_snr_trials.csv", "manifest_rmse_vs_snr.json", "rmse_vs_snr.svg"})
        EXPECT_TRUE(fs::exists(out / f)) << f;
    const auto m = nfdma::read_manifest(out / "manifest_rmse_vs_snr.json");
    EXPECT_EQ(m.at("master_seed").get<std::uint64_t>(), 5u);
    EXPECT_EQ(m.at("config").at("scenario").at("snr_db"), nlohmann::json({3.0, 8.0}));
    EXPECT_EQ(m.at("invocation").at("parallel_flag").get<int>(), 2);
    EXPECT_EQ(nfdma::read_aggregate_csv(out / "rmse_vs_snr.csv").size(), 10u);

    const auto again = run("rmse-vs-snr --config " + tiny_config(dir).string() + " --out " + (dir / "r2").string() +
                           " --seed 5 --parallel 1 --snr 3 --snr 8 --no-plots");
    ASSERT_EQ(again.code, 0);
    EXPECT_FALSE(fs::exists(dir / "r2" / "rmse_vs_snr.svg"));
    std::ifstream a(out / "rmse_vs_snr_trials.csv"), b(dir / "r2" / "rmse_vs_snr_trials.csv");
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    EXPECT_EQ(sa.str(), sb.str());
    fs::remove_all(dir);
}

TEST(Cli, HeatmapGridFlag)
{
    const auto dir = fresh("nfdma_cli_heat");
    const auto r = run("heatmap --scenario far --grid 4.5 --config " + tiny_config(dir).string() + " --out " +
                       (dir / "o").string());
    ASSERT_EQ(r.code, 0) << r.err;
    const auto h = nfdma::read_heatmap_csv(dir / "o" / "heatmap_far_field.csv");
    EXPECT_EQ(h.cells.size(), 9u);
    EXPECT_TRUE(fs::exists(dir / "o" / "heatmap_far_field.svg"));
    EXPECT_EQ(run("heatmap --scenario sideways").code, 1);
    fs::remove_all(dir);
}

TEST(Cli, EstimateOnceIsReproducible)
{
    const auto a = run("estimate-once --snr -5 --seed 7");
    const auto b = run("estimate-once --snr -5 --seed 7");
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_NE(a.out.find("d_hat_m="), std::string::npos);
    EXPECT_NE(a.out.find("error_m="), std::string::npos);
    const auto fd = run("estimate-once --snr 10 --seed 7 --scheme fd_mle");
    EXPECT_EQ(fd.code, 0);
    EXPECT_EQ(run("estimate-once --scheme nonsense").code, 1);
}

TEST(Cli, TuneWeightsWritesCsv)
{
    const auto dir = fresh("nfdma_cli_tune");
    const auto r = run("tune-weights --d 4 --theta 0.5 --architecture dma_quarter --out " + dir.string());
    ASSERT_EQ(r.code, 0) << r.err;
    const auto w = nfdma::read_weights_csv((dir / "weights.csv").string());
    EXPECT_EQ(w.size(), 480u);
    EXPECT_EQ(w.regime(), nfdma::weight_regime::lorentzian);
    fs::remove_all(dir);
}

TEST(Cli, RuntimeErrorExitsTwo)
{
    const auto dir = fresh("nfdma_cli_io");
    std::ofstream(dir / "file") << "x";
    const auto r = run("tune-weights --out " + (dir / "file" / "sub").string());
    EXPECT_EQ(r.code, 2);
    fs::remove_all(dir);
}

TEST(Cli, SelfcheckPasses)
{
    const auto r = run("selfcheck");
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
    EXPECT_NE(r.out.find("PASS dense_projectors"), std::string::npos);
}
