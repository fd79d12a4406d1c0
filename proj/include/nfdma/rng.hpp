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
#ifndef NFDMA_RNG_HPP
#define NFDMA_RNG_HPP

#include <cstdint>
#include <initializer_list>
#include <random>

namespace nfdma
{
    using engine_type = std::mt19937_64;

    // splitmix64 finalizer
    constexpr std::uint64_t mix64(std::uint64_t x) noexcept
    {
        x += 0x9E3779B97F4A7C15ULL;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

    // Child seed for a (master, tag...) path. Trials, iterations and grid cells
    // each get their own stream, so results do not depend on scheduling order.
    constexpr std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) noexcept
    {
        std::uint64_t s = mix64(master);
        for (auto p : path)
            s = mix64(s ^ mix64(p + 0x632BE59BD9B4E019ULL));
        return s;
    }

    // Stream tags, kept stable because they are part of the reproducibility contract
    namespace stream
    {
        inline constexpr std::uint64_t noise = 1;
        inline constexpr std::uint64_t weights = 2;
        inline constexpr std::uint64_t trial = 3;
        inline constexpr std::uint64_t iteration = 4;
    }
}

#endif
