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

#ifndef LSPCA_OFDM_HPP
#define LSPCA_OFDM_HPP

#include "numerics.hpp"

#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace lspca
{
    // All k_subcarriers are active; there is no guard band or DC null.
    struct OfdmConfig
    {
        std::size_t k_subcarriers = 128;
        double delta_f = 30e3;
        std::size_t cp_len = 0;

        double sample_rate() const { return static_cast<double>(k_subcarriers) * delta_f; }
        std::size_t block_length() const { return k_subcarriers + cp_len; }
        double symbol_duration() const { return static_cast<double>(block_length()) / sample_rate(); }

        void validate() const
        {
            if (!is_power_of_two(k_subcarriers))
                throw ParameterError("OfdmConfig: k_subcarriers must be a power of two");
            if (!(delta_f > 0.0))
                throw ParameterError("OfdmConfig: delta_f must be positive");
            if (cp_len >= k_subcarriers)
                throw ParameterError("OfdmConfig: cp_len must be shorter than the symbol");
        }
    };

    // CP covering 120% of the channel's maximum delay. The result also exceeds the largest tap
    // index after rounding delays to the sample grid, so every tap lies at n <= cp_len - 1.
    inline std::size_t cp_len_for_delay(double max_delay_samples)
    {
        const auto scaled = static_cast<std::size_t>(std::ceil(1.2 * max_delay_samples - 1e-9));
        const auto rounded = static_cast<std::size_t>(std::llround(max_delay_samples)) + 1;
        return std::max(scaled, rounded);
    }

    // IFFT (1/K normalisation) of one antenna's K subcarrier values, tail prepended as CP.
    inline CVector ofdm_modulate(std::span<const cplx> freq_symbols, const OfdmConfig &cfg)
    {
        const std::size_t k = cfg.k_subcarriers;
        if (freq_symbols.size() != k)
            throw FramingError("ofdm_modulate: expected " + std::to_string(k) + " subcarrier values, got " +
                               std::to_string(freq_symbols.size()));
        CVector out(cfg.cp_len + k);
        std::copy(freq_symbols.begin(), freq_symbols.end(), out.begin() + static_cast<std::ptrdiff_t>(cfg.cp_len));
        std::span<cplx> body(out.data() + cfg.cp_len, k);
        fft_inplace(body, true);
        std::copy(out.end() - static_cast<std::ptrdiff_t>(cfg.cp_len), out.end(), out.begin());
        return out;
    }

    inline CVector ofdm_demodulate(std::span<const cplx> samples, const OfdmConfig &cfg)
    {
        if (samples.size() != cfg.block_length())
            throw FramingError("ofdm_demodulate: expected " + std::to_string(cfg.block_length()) + " samples, got " +
                               std::to_string(samples.size()));
        CVector body(samples.begin() + static_cast<std::ptrdiff_t>(cfg.cp_len), samples.end());
        fft_inplace(body, false);
        return body;
    }

    enum class BlockKind
    {
        data,
        csirs
    };

    // One pilot (CSIRS) block followed by data_blocks_per_pilot data blocks, repeated.
    // A block is one MIMO-OFDM block: P consecutive OFDM symbols on all antennas.
    struct FrameSchedule
    {
        std::size_t data_blocks_per_pilot = 23;

        std::size_t period() const { return data_blocks_per_pilot + 1; }
        double pilot_ratio() const { return 1.0 / static_cast<double>(period()); }
    };

    inline std::vector<BlockKind> schedule_frames(std::size_t n_blocks, const FrameSchedule &sched)
    {
        std::vector<BlockKind> tags(n_blocks, BlockKind::data);
        for (std::size_t i = 0; i < n_blocks; i += sched.period())
            tags[i] = BlockKind::csirs;
        return tags;
    }
}

#endif
