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

#ifndef LSPCA_STBC_HPP
#define LSPCA_STBC_HPP

// Orthogonal space-time block codes and their symbol-by-symbol ML decoder.
//
// A codeword X is M_T x P (rows = transmit antennas, columns = time slots) and every entry is
// 0 or +-s_i / +-s_i^* for one source symbol s_i. For the shipped codes
//     X X^H = kappa * (sum_i |s_i|^2) * I_{M_T},
// which makes the ML metric ||Y - H^T X||_F^2 separate into one term per symbol.

#include "modem.hpp"
#include "numerics.hpp"

#include <array>
#include <span>
#include <string>
#include <vector>

namespace lspca
{
    struct StbcEntry
    {
        int symbol = -1; // -1: silent entry
        int sign = 1;
        bool conj = false;
    };

    struct StbcCode
    {
        std::string name;
        std::size_t m_t = 1;
        std::size_t p = 1;  // time slots per codeword
        std::size_t q = 1;  // source symbols per codeword
        double kappa = 1.0; // X X^H = kappa * sum|s|^2 * I
        std::vector<StbcEntry> generator; // m_t x p, row-major

        double rate() const { return static_cast<double>(q) / static_cast<double>(p); }
        const StbcEntry &at(std::size_t m, std::size_t slot) const { return generator[m * p + slot]; }

        static StbcCode siso() { return {"siso", 1, 1, 1, 1.0, {{0, 1, false}}}; }

        // [ s1  -s2* ]
        // [ s2   s1* ]
        static StbcCode alamouti()
        {
            return {"alamouti", 2, 2, 2, 1.0, {{0, 1, false}, {1, -1, true}, {1, 1, false}, {0, 1, true}}};
        }

        // Rate-1/2 complex orthogonal design for 8 antennas: the 8x8 real orthogonal design G8
        // evaluated on (s_1..s_8) over slots 0-7, then on (s_1^*..s_8^*) over slots 8-15.
        static StbcCode g8()
        {
            // Rows: time slot, columns: antenna; +-k stands for +-s_k.
            static constexpr std::array<std::array<int, 8>, 8> real_design{{
                {1, 2, 3, 4, 5, 6, 7, 8},
                {-2, 1, 4, -3, 6, -5, -8, 7},
                {-3, -4, 1, 2, 7, 8, -5, -6},
                {-4, 3, -2, 1, 8, -7, 6, -5},
                {-5, -6, -7, -8, 1, 2, 3, 4},
                {-6, 5, -8, 7, -2, 1, -4, 3},
                {-7, 8, 5, -6, -3, 4, 1, -2},
                {-8, -7, 6, 5, -4, -3, 2, 1},
            }};
            StbcCode c{"g8", 8, 16, 8, 2.0, std::vector<StbcEntry>(8 * 16)};
            for (std::size_t m = 0; m < 8; ++m)
                for (std::size_t t = 0; t < 8; ++t)
                {
                    const int e = real_design[t][m];
                    const int sym = (e < 0 ? -e : e) - 1;
                    const int sign = e < 0 ? -1 : 1;
                    c.generator[m * 16 + t] = {sym, sign, false};
                    c.generator[m * 16 + t + 8] = {sym, sign, true};
                }
            return c;
        }

        static StbcCode by_name(const std::string &name)
        {
            if (name == "siso")
                return siso();
            if (name == "alamouti")
                return alamouti();
            if (name == "g8")
                return g8();
            throw ParameterError("unknown STBC code '" + name + "' (expected siso, alamouti, g8)");
        }
    };

    struct StbcCodeword
    {
        ComplexMatrix matrix; // M_T x P
        CVector source_symbols;
    };

    inline StbcCodeword stbc_encode(std::span<const cplx> symbols, const StbcCode &code)
    {
        if (symbols.size() != code.q)
            throw FramingError("stbc_encode: " + code.name + " takes " + std::to_string(code.q) + " symbols, got " +
                               std::to_string(symbols.size()));
        ComplexMatrix x(code.m_t, code.p);
        for (std::size_t m = 0; m < code.m_t; ++m)
            for (std::size_t t = 0; t < code.p; ++t)
            {
                const StbcEntry &e = code.at(m, t);
                if (e.symbol < 0)
                    continue;
                const cplx s = symbols[static_cast<std::size_t>(e.symbol)];
                x(m, t) = static_cast<double>(e.sign) * (e.conj ? std::conj(s) : s);
            }
        return {std::move(x), CVector(symbols.begin(), symbols.end())};
    }

    struct StbcDecision
    {
        std::vector<unsigned> labels;
        CVector symbols;
        bool zero_energy_channel = false;
    };

    // ML decision for Y = a * H^T X + Z, where a is the transmit amplitude applied to codewords.
    // With ||H||_F = 0 every candidate has the same metric; the decoder then returns label 0 for
    // every symbol and raises zero_energy_channel.
    inline StbcDecision stbc_ml_decode(const ComplexMatrix &received, const ComplexMatrix &h_est, const StbcCode &code,
                                       const QamConstellation &qam, double tx_amplitude = 1.0)
    {
        if (h_est.rows() != code.m_t || received.cols() != code.p || h_est.cols() != received.rows())
            throw SizeError("stbc_ml_decode: received " + std::to_string(received.rows()) + "x" +
                            std::to_string(received.cols()) + ", channel " + std::to_string(h_est.rows()) + "x" +
                            std::to_string(h_est.cols()) + ", code " + code.name);

        const std::size_t m_r = received.rows();
        StbcDecision out;
        out.labels.assign(code.q, 0u);
        out.symbols.assign(code.q, qam.point(0));

        const double energy = code.kappa * tx_amplitude * tx_amplitude * h_est.frobenius_norm_sq();
        if (energy == 0.0)
        {
            out.zero_energy_channel = true;
            return out;
        }

        // Matched filter Q = conj(a H) Y, M_T x P.
        CVector num(code.q, 0.0);
        for (std::size_t m = 0; m < code.m_t; ++m)
            for (std::size_t t = 0; t < code.p; ++t)
            {
                const StbcEntry &e = code.at(m, t);
                if (e.symbol < 0)
                    continue;
                cplx qmt = 0.0;
                for (std::size_t r = 0; r < m_r; ++r)
                    qmt += std::conj(h_est(m, r)) * received(r, t);
                qmt *= tx_amplitude;
                num[static_cast<std::size_t>(e.symbol)] += static_cast<double>(e.sign) * (e.conj ? std::conj(qmt) : qmt);
            }

        for (std::size_t i = 0; i < code.q; ++i)
        {
            const unsigned label = qam.nearest_label(num[i] / energy);
            out.labels[i] = label;
            out.symbols[i] = qam.point(label);
        }
        return out;
    }
}

#endif
