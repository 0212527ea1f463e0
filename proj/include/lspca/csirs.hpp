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

#ifndef LSPCA_CSIRS_HPP
#define LSPCA_CSIRS_HPP

// CSI reference signals: Zadoff-Chu base sequence and the per-subcarrier pilot matrices X[k].

#include "binary_io.hpp"
#include "numerics.hpp"

#include <filesystem>
#include <fstream>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

namespace lspca
{
    struct ZcConfig
    {
        std::uint64_t root = 1;
        std::uint64_t n_zc = 127;

        void validate() const
        {
            if (n_zc % 2 == 0)
                throw ParameterError("ZcConfig: n_zc must be odd");
            if (root == 0 || root >= n_zc)
                throw ParameterError("ZcConfig: root must satisfy 0 < u < n_zc");
            if (std::gcd(root, n_zc) != 1)
                throw ParameterError("ZcConfig: root and n_zc must be coprime");
        }
    };

    // Largest odd length not above k, root 1.
    inline ZcConfig default_zc_config(std::size_t k_subcarriers)
    {
        const std::uint64_t n = k_subcarriers % 2 == 0 ? k_subcarriers - 1 : k_subcarriers;
        return {1, std::max<std::uint64_t>(n, 3)};
    }

    // z[n] = exp(-i pi u n (n+1) / N_zc)
    inline CVector zc_generate(const ZcConfig &cfg)
    {
        cfg.validate();
        CVector z(cfg.n_zc);
        for (std::uint64_t n = 0; n < cfg.n_zc; ++n)
        {
            // Reduce the phase index modulo 2 N_zc before converting to double.
            const std::uint64_t idx = (cfg.root * ((n * (n + 1)) % (2 * cfg.n_zc))) % (2 * cfg.n_zc);
            z[n] = std::polar(1.0, -std::numbers::pi * static_cast<double>(idx) / static_cast<double>(cfg.n_zc));
        }
        return z;
    }

    struct PilotBlock
    {
        std::size_t m_t = 0;
        std::size_t p = 0;
        std::size_t k = 0;
        double sigma_x_sq = 1.0;            // pilot power per antenna
        std::vector<ComplexMatrix> symbols; // K matrices, M_T x P

        // X[k] X[k]^H = gram() * I for every k.
        double gram() const { return static_cast<double>(p) * sigma_x_sq; }
    };

    inline constexpr double pilot_orthogonality_tolerance = 1e-10;

    // Antenna m sends the ZC sequence cyclically shifted by m * floor(N_zc / M_T) along the
    // subcarrier axis, and slot t carries the phase exp(2 pi i m t / P). The slot phases make the
    // rows of every X[k] orthogonal for any P >= M_T; subcarriers beyond N_zc wrap around the
    // sequence. `amplitude` scales every entry, so sigma_x^2 = amplitude^2.
    inline PilotBlock build_pilot_block(std::span<const cplx> zc, std::size_t m_t, std::size_t p, std::size_t k,
                                        double amplitude = 1.0)
    {
        if (m_t == 0 || p == 0 || k == 0)
            throw ParameterError("build_pilot_block: dimensions must be positive");
        if (zc.size() < m_t)
            throw ParameterError("build_pilot_block: ZC length " + std::to_string(zc.size()) +
                                 " leaves no distinct cyclic shift per antenna");
        if (p < m_t)
            throw ParameterError("build_pilot_block: need at least M_T = " + std::to_string(m_t) + " slots, got " +
                                 std::to_string(p));

        const std::size_t n_zc = zc.size();
        const std::size_t shift = n_zc / m_t;
        PilotBlock blk{m_t, p, k, amplitude * amplitude, {}};
        blk.symbols.reserve(k);
        for (std::size_t sc = 0; sc < k; ++sc)
        {
            ComplexMatrix x(m_t, p);
            for (std::size_t m = 0; m < m_t; ++m)
            {
                const cplx base = amplitude * zc[(sc + m * shift) % n_zc];
                for (std::size_t t = 0; t < p; ++t)
                {
                    const std::size_t ph = (m * t) % p;
                    x(m, t) = base * std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(ph) /
                                                         static_cast<double>(p));
                }
            }
            blk.symbols.push_back(std::move(x));
        }

        const ComplexMatrix expected = ComplexMatrix::identity(m_t).scaled(blk.gram());
        for (std::size_t sc = 0; sc < k; ++sc)
        {
            const ComplexMatrix g = matmul(blk.symbols[sc], blk.symbols[sc].adjoint());
            if ((g - expected).frobenius_norm() > pilot_orthogonality_tolerance * blk.gram())
                throw NumericError("build_pilot_block: pilots on subcarrier " + std::to_string(sc) +
                                   " are not orthogonal");
        }
        return blk;
    }

    // Pilot fixture, little-endian:
    //   u32 M_T, u32 P, u32 K, then for k in [0,K), m in [0,M_T), t in [0,P): f64 re, f64 im.
    inline void write_pilot_fixture(const PilotBlock &blk, std::ostream &os)
    {
        binary::put_u32(os, static_cast<std::uint32_t>(blk.m_t));
        binary::put_u32(os, static_cast<std::uint32_t>(blk.p));
        binary::put_u32(os, static_cast<std::uint32_t>(blk.k));
        for (const auto &x : blk.symbols)
            for (const auto &z : x.data())
                binary::put_complex(os, z);
    }

    inline void write_pilot_fixture(const PilotBlock &blk, const std::filesystem::path &path)
    {
        std::ofstream os(path, std::ios::binary);
        if (!os)
            throw ConfigError("cannot open " + path.string() + " for writing");
        write_pilot_fixture(blk, os);
        if (!os)
            throw ConfigError("write failed: " + path.string());
    }

    inline PilotBlock read_pilot_fixture(std::istream &is)
    {
        PilotBlock blk;
        blk.m_t = binary::get_u32(is, "pilot header");
        blk.p = binary::get_u32(is, "pilot header");
        blk.k = binary::get_u32(is, "pilot header");
        if (blk.m_t == 0 || blk.p == 0 || blk.k == 0)
            throw ConfigError("pilot fixture: zero dimension in header");
        blk.symbols.reserve(blk.k);
        double power = 0.0;
        for (std::size_t sc = 0; sc < blk.k; ++sc)
        {
            CVector d(blk.m_t * blk.p);
            for (auto &z : d)
            {
                z = binary::get_complex(is, "pilot entries");
                power += std::norm(z);
            }
            blk.symbols.emplace_back(blk.m_t, blk.p, std::move(d));
        }
        blk.sigma_x_sq = power / static_cast<double>(blk.k * blk.m_t * blk.p);
        return blk;
    }
}

#endif
