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
#ifndef NFDMA_NFDMA_HPP
#define NFDMA_NFDMA_HPP

#include "nfdma/alternating.hpp"
#include "nfdma/config.hpp"
#include "nfdma/dma.hpp"
#include "nfdma/error.hpp"
#include "nfdma/experiment.hpp"
#include "nfdma/geometry.hpp"
#include "nfdma/likelihood.hpp"
#include "nfdma/parallel.hpp"
#include "nfdma/plot.hpp"
#include "nfdma/rng.hpp"
#include "nfdma/selfcheck.hpp"
#include "nfdma/signal_model.hpp"
#include "nfdma/waveguide.hpp"

#endif
