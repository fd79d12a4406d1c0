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
#ifndef NFDMA_ERROR_HPP
#define NFDMA_ERROR_HPP

#include <stdexcept>
#include <string>

namespace nfdma
{
    // Invalid or inconsistent configuration (bad keys, dimension mismatch between
    // weights and layout, violated preconditions on scenario parameters).
    class config_error : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    // Element or strip index outside the layout
    class index_error : public std::out_of_range
    {
    public:
        using std::out_of_range::out_of_range;
    };

    // Vector dimensions do not agree with the layout or weights
    class dimension_error : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    // Candidate whose effective steering vector vanishes under the current weights
    class degenerate_candidate : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Every cell of a search grid was degenerate or non-finite
    class estimation_failure : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // File system errors, always carrying the offending path in the message
    class io_error : public std::runtime_error
    {
    public:
        io_error(const std::string &what, const std::string &path)
            : std::runtime_error(what + ": " + path), path_(path) {}
        const std::string &path() const noexcept { return path_; }

    private:
        std::string path_;
    };
}

#endif
