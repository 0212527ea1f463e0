// SPDX-License-Identifier: Apache-2.0
//
// lspca-sim: MIMO-OFDM link-level simulation with PCA-denoised channel estimation
// Copyright (C) 2026 The lspca-sim authors
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

#ifndef LSPCA_LSPCA_HPP
#define LSPCA_LSPCA_HPP

#include "binary_io.hpp"
#include "channel.hpp"
#include "config.hpp"
#include "csirs.hpp"
#include "errors.hpp"
#include "estimation.hpp"
#include "harness.hpp"
#include "modem.hpp"
#include "numerics.hpp"
#include "ofdm.hpp"
#include "stbc.hpp"

#endif
