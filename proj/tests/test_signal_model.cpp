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
#include "nfdma/selfcheck.hpp"

#include <gtest/gtest.h>

using namespace nfdma;

namespace
{
    const double f = 28e9;
    const auto half = array_layout::strips({5, 48, 0.005, 0.005});
}

TEST(Channel, UnitGainHasUnitModulus)
{
    const auto ch = build_channel(half, {6.0, pi / 3}, f);
    double energy = 0.0;
    for (auto g : ch.g)
    {
        EXPECT_NEAR(std::abs(g), 1.0, 1e-14);
        energy += std::norm(g);
    }
    EXPECT_NEAR(energy, 240.0, 1e-10);
}

TEST(Channel, MatchesGeometryComposition)
{
    engine_type rng(21);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int n = 0; n < 20; ++n)
    {
        const polar_position src{0.3 + 20 * u(rng), (u(rng) - 0.5) * 3.0};
        const auto gain = n % 2 ? gain_model::free_space : gain_model::unit;
        const auto ch = build_channel(half, src, f, gain);
        for (std::size_t i = 0; i < 5; ++i)
            for (std::size_t l = 0; l < 48; ++l)
            {
                const double d = element_source_distance(half, i, l, src);
                const double a = gain == gain_model::unit ? 1.0 : wavelength(f) / (4 * pi * d);
                const cdouble oracle = a * std::exp(cdouble(0.0, -phase_delay(d, f)));
                EXPECT_LT(std::abs(ch.g[i * 48 + l] - oracle), 1e-9 * a);
                EXPECT_NEAR(std::abs(ch.g[i * 48 + l]), a, 1e-14 * a);
            }
    }
}

TEST(Channel, OneWavelengthIsInPhase)
{
    const auto l = array_layout(1, 1, {{0, 0, 0}}, {0.005}, 0.005, 0.005);
    const auto ch = build_channel(l, {wavelength(f), 0.2}, f, gain_model::free_space);
    const double a = 1.0 / (4 * pi);
    EXPECT_NEAR(ch.g[0].real(), a, 1e-14);
    EXPECT_NEAR(ch.g[0].imag(), 0.0, 1e-14);
}

TEST(Channel, RejectsBadInput)
{
    EXPECT_THROW(build_channel(half, {0.0, 0.1}, f), config_error);
    EXPECT_THROW(build_channel(half, {1.0, 0.1}, 0.0), config_error);
    EXPECT_EQ(parse_gain_model("free_space"), gain_model::free_space);
    EXPECT_THROW(parse_gain_model("isotropic"), config_error);
}

TEST(Waveguide, ScalarCases)
{
    const auto l = array_layout(1, 3, {{0, 0, 0}, {0, 0, 0.01}, {0, 0, 0.03}}, {0.0, 0.01, 0.03}, 0.01, 0.01);
    const auto h0 = build_waveguide_matrix(l, waveguide_model{{0.0}, {pi / 0.01}});
    EXPECT_EQ(h0[0], cdouble(1.0));
    EXPECT_NEAR(h0[1].real(), -1.0, 1e-15);
    EXPECT_NEAR(h0[1].imag(), 0.0, 1e-15);
    const auto h = build_waveguide_matrix(l, waveguide_model::defaults(1, f));
    EXPECT_NEAR(std::abs(h[2]), 0.98511193960306266148, 1e-15);
    EXPECT_NEAR(std::arg(h[2] * std::exp(cdouble(0, 0.03 * two_pi / wavelength(f)))), 0.0, 1e-12);
}

TEST(Waveguide, RejectsBadModel)
{
    EXPECT_THROW(build_waveguide_matrix(half, waveguide_model::uniform(4, 0.5, 1.0)), dimension_error);
    EXPECT_THROW(build_waveguide_matrix(half, waveguide_model::uniform(5, -0.5, 1.0)), config_error);
    EXPECT_THROW(build_waveguide_matrix(half, waveguide_model::uniform(5, 0.5, -1.0)), config_error);
}

TEST(Snapshots, NoiselessFullyDigitalEqualsChannel)
{
    const auto ch = build_channel(half, {6.0, pi / 3}, f);
    const auto x = sample_snapshots(ch, waveguide_matrix::identity(240), fully_digital{}, 1, 0.0, 3, cdouble(1.0));
    ASSERT_EQ(x.dim, 240u);
    for (std::size_t k = 0; k < 240; ++k)
        EXPECT_EQ(x.snapshot(0)[k], ch.g[k]);
    EXPECT_FALSE(x.dma_output);
}

TEST(Snapshots, NoiselessDmaMatchesTripleLoop)
{
    const auto ch = build_channel(half, {4.0, -0.3}, f);
    const auto h = build_waveguide_matrix(half, waveguide_model::defaults(5, f));
    const auto w = random_weights(half, weight_regime::lorentzian, 17);
    const cdouble x0(0.6, -0.8);
    const auto y = sample_snapshots(ch, h, w, 2, 0.0, 4, x0);
    ASSERT_EQ(y.dim, 5u);
    const auto q = oracle::dense_q(w);
    for (std::size_t i = 0; i < 5; ++i)
    {
        cdouble acc = 0.0;
        for (std::size_t n = 0; n < 240; ++n)
            acc += q(Eigen::Index(i), Eigen::Index(n)) * h[n] * ch.g[n] * x0;
        EXPECT_LT(std::abs(y.snapshot(0)[i] - acc), 1e-12 * std::abs(acc) + 1e-14);
        EXPECT_LT(std::abs(y.snapshot(1)[i] - acc), 1e-12 * std::abs(acc) + 1e-14);
    }
}

TEST(Snapshots, OutputNoiseCovariance)
{
    const auto r = check_noise_covariance(100000, 77);
    EXPECT_TRUE(r.passed) << r.detail;
}

TEST(Snapshots, PhaseOnlyOutputNoiseIsScaledIdentity)
{
    const auto h = build_waveguide_matrix(half, waveguide_model::defaults(5, f));
    const auto w = random_weights(half, weight_regime::phase_only, 8);
    const oracle::cmatrix qh = oracle::dense_q(w) * oracle::dense_h(h);
    const oracle::cmatrix c = qh * qh.adjoint();
    double expect = 0.0;
    for (std::size_t l = 0; l < 48; ++l)
        expect += std::norm(h[l]);
    EXPECT_LT((c - expect * oracle::cmatrix::Identity(5, 5)).norm(), 1e-12 * expect);

    // Lorentzian weights keep it diagonal but not scaled identity
    const auto wl = random_weights(half, weight_regime::lorentzian, 8);
    const oracle::cmatrix ql = oracle::dense_q(wl) * oracle::dense_h(h);
    const oracle::cmatrix cl = ql * ql.adjoint();
    oracle::cmatrix off = cl;
    off.diagonal().setZero();
    EXPECT_LT(off.norm(), 1e-12);
}

TEST(Snapshots, SameSeedIsBitIdentical)
{
    const auto ch = build_channel(half, {6.0, pi / 3}, f);
    const auto h = build_waveguide_matrix(half, waveguide_model::defaults(5, f));
    const auto w = random_weights(half, weight_regime::lorentzian, 1);
    const auto a = sample_snapshots(ch, h, w, 64, 0.3, 42);
    const auto b = sample_snapshots(ch, h, w, 64, 0.3, 42);
    const auto c = sample_snapshots(ch, h, w, 64, 0.3, 43);
    EXPECT_EQ(0, std::memcmp(a.data.data(), b.data.data(), a.data.size() * sizeof(cdouble)));
    EXPECT_NE(0, std::memcmp(a.data.data(), c.data.data(), a.data.size() * sizeof(cdouble)));
}

TEST(Snapshots, FrontEndsSeeTheSameElementNoise)
{
    const auto ch = build_channel(half, {6.0, pi / 3}, f);
    const auto h = build_waveguide_matrix(half, waveguide_model::defaults(5, f));
    const auto w = random_weights(half, weight_regime::lorentzian, 1);
    const auto x = sample_snapshots(ch, waveguide_matrix::identity(240), fully_digital{}, 16, 1.0, 9);
    const auto y = sample_snapshots(ch, h, w, 16, 1.0, 9);
    for (std::size_t t = 0; t < 16; ++t)
    {
        const auto expect = apply_weights(w, h, x.snapshot(t));
        for (std::size_t i = 0; i < 5; ++i)
            EXPECT_LT(std::abs(expect[i] - y.snapshot(t)[i]), 1e-12);
    }
}

TEST(Snapshots, ElementNoisePower)
{
    const auto ch = build_channel(half, {6.0, pi / 3}, f);
    const double np = noise_power_from_snr_db(-5.0);
    const auto x = sample_snapshots(ch, waveguide_matrix::identity(240), fully_digital{}, 2000, np, 10, 0.0);
    double p = 0.0;
    for (auto v : x.data)
        p += std::norm(v);
    p /= double(x.data.size());
    EXPECT_NEAR(p / np, 1.0, 0.02);
}

TEST(Snapshots, RejectsBadInput)
{
    const auto ch = build_channel(half, {6.0, pi / 3}, f);
    const auto h = build_waveguide_matrix(half, waveguide_model::defaults(5, f));
    const auto quarter = array_layout::strips({5, 96, 0.0025, 0.005});
    const auto w = random_weights(quarter, weight_regime::lorentzian, 1);
    EXPECT_THROW(sample_snapshots(ch, h, w, 4, 0.1, 1), config_error);
    EXPECT_THROW(sample_snapshots(ch, h, fully_digital{}, 0, 0.1, 1), config_error);
    EXPECT_THROW(sample_snapshots(ch, h, fully_digital{}, 4, -0.1, 1), config_error);
}

TEST(Snr, NoisePowerMapping)
{
    EXPECT_DOUBLE_EQ(noise_power_from_snr_db(10.0), 0.1);
    EXPECT_DOUBLE_EQ(noise_power_from_snr_db(0.0), 1.0);
    EXPECT_NEAR(noise_power_from_snr_db(-5.0), 3.1622776601683795, 1e-15);
    EXPECT_EQ(noise_power_from_snr_db(std::numeric_limits<double>::infinity()), 0.0);
}
