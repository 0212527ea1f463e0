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

#ifndef LSPCA_MODEM_HPP
#define LSPCA_MODEM_HPP

#include "numerics.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace lspca
{
    using Bits = std::vector<std::uint8_t>;

    struct BitStream
    {
        Bits bits;
        std::uint64_t rng_seed = 0;
    };

    // Uniform i.i.d. bits, reproducible from the seed.
    inline BitStream random_bits(std::size_t count, std::uint64_t seed)
    {
        BitStream out{Bits(count), seed};
        std::mt19937_64 rng(seed);
        std::uint64_t word = 0;
        for (std::size_t i = 0; i < count; ++i)
        {
            if (i % 64 == 0)
                word = rng();
            out.bits[i] = static_cast<std::uint8_t>((word >> (i % 64)) & 1u);
        }
        return out;
    }

    // Square Gray-coded M-QAM with unit average symbol energy.
    //
    // A label of log2(M) bits is split in half: the leading half selects the in-phase level, the
    // trailing half the quadrature level. Each half is Gray-decoded to a level index i and mapped
    // to amplitude (sqrt(M) - 1 - 2i), so bit 0 maps to the positive side. For 4-QAM:
    //
    //     label 00 -> (+1 + 1i)/sqrt(2)     label 01 -> (+1 - 1i)/sqrt(2)
    //     label 10 -> (-1 + 1i)/sqrt(2)     label 11 -> (-1 - 1i)/sqrt(2)
    //
    // points[label] is the constellation point carrying that label (bits read MSB first).
    class QamConstellation
    {
    public:
        explicit QamConstellation(unsigned order) : order_(order)
        {
            if (order < 4 || (order & (order - 1)) != 0)
                throw ParameterError("QamConstellation: order must be a power of 4");
            bits_ = 0;
            while ((1u << bits_) < order)
                ++bits_;
            if (bits_ % 2 != 0)
                throw ParameterError("QamConstellation: order must be a power of 4");
            axis_bits_ = bits_ / 2;
            side_ = 1u << axis_bits_;

            const double scale = 1.0 / std::sqrt(2.0 * (order - 1) / 3.0);
            levels_.resize(side_);
            for (unsigned g = 0; g < side_; ++g)
            {
                const unsigned idx = gray_to_binary(g);
                levels_[g] = (static_cast<double>(side_) - 1.0 - 2.0 * idx) * scale;
            }
            points_.resize(order);
            for (unsigned label = 0; label < order; ++label)
                points_[label] = {levels_[label >> axis_bits_], levels_[label & (side_ - 1)]};
        }

        unsigned order() const { return order_; }
        unsigned bits_per_symbol() const { return bits_; }
        const CVector &points() const { return points_; }
        const cplx &point(unsigned label) const { return points_[label]; }

        // Nearest point; among equidistant points the smallest label wins.
        unsigned nearest_label(cplx z) const { return (nearest_axis(z.real()) << axis_bits_) | nearest_axis(z.imag()); }

    private:
        static unsigned gray_to_binary(unsigned g)
        {
            unsigned b = g;
            for (unsigned s = g >> 1; s; s >>= 1)
                b ^= s;
            return b;
        }

        // Distances add across axes, so the lexicographically smallest minimiser per axis gives
        // the smallest minimising label overall.
        unsigned nearest_axis(double x) const
        {
            unsigned best = 0;
            double best_d = std::abs(x - levels_[0]);
            for (unsigned g = 1; g < side_; ++g)
            {
                const double d = std::abs(x - levels_[g]);
                if (d < best_d)
                {
                    best_d = d;
                    best = g;
                }
            }
            return best;
        }

        unsigned order_;
        unsigned bits_ = 0;
        unsigned axis_bits_ = 0;
        unsigned side_ = 0;
        std::vector<double> levels_; // indexed by Gray label of one axis
        CVector points_;
    };

    inline CVector qam_map(std::span<const std::uint8_t> bits, const QamConstellation &qam)
    {
        const unsigned k = qam.bits_per_symbol();
        if (bits.size() % k != 0)
            throw FramingError("qam_map: " + std::to_string(bits.size()) + " bits not divisible by " + std::to_string(k));
        CVector out(bits.size() / k);
        for (std::size_t s = 0; s < out.size(); ++s)
        {
            unsigned label = 0;
            for (unsigned b = 0; b < k; ++b)
                label = (label << 1) | (bits[s * k + b] & 1u);
            out[s] = qam.point(label);
        }
        return out;
    }

    inline void append_label_bits(unsigned label, unsigned bits_per_symbol, Bits &out)
    {
        for (unsigned b = bits_per_symbol; b-- > 0;)
            out.push_back(static_cast<std::uint8_t>((label >> b) & 1u));
    }

    inline Bits qam_demap_hard(std::span<const cplx> symbols, const QamConstellation &qam)
    {
        Bits out;
        out.reserve(symbols.size() * qam.bits_per_symbol());
        for (const auto &z : symbols)
            append_label_bits(qam.nearest_label(z), qam.bits_per_symbol(), out);
        return out;
    }

    inline double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

    inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

    // Average BER of BPSK-per-bit detection, Q(sqrt(2 g)), with maximal-ratio combining over
    // `diversity` i.i.d. Rayleigh branches of mean SNR g_mean:
    //   mu = sqrt(g/(1+g)),  P = [(1-mu)/2]^D sum_{k<D} C(D-1+k, k) [(1+mu)/2]^k
    inline double mrc_rayleigh_ber(double g_mean, unsigned diversity)
    {
        const double mu = std::sqrt(g_mean / (1.0 + g_mean));
        const double lo = 0.5 * (1.0 - mu);
        const double hi = 0.5 * (1.0 + mu);
        double term = 1.0; // C(D-1, 0) hi^0
        double sum = term;
        for (unsigned k = 1; k < diversity; ++k)
        {
            term *= static_cast<double>(diversity - 1 + k) / static_cast<double>(k) * hi;
            sum += term;
        }
        return std::pow(lo, static_cast<double>(diversity)) * sum;
    }

    // Closed-form BER of Gray M-QAM with MRC over `diversity_order` i.i.d. Rayleigh branches.
    // `ebn0_db` is the mean per-branch Eb/N0. Exact for 4-QAM; for larger orders the standard
    // nearest-level expansion of the AWGN error probability is averaged term by term.
    inline double theoretical_ber_diversity(double ebn0_db, unsigned diversity_order, unsigned qam_order = 4)
    {
        if (diversity_order < 1)
            throw ParameterError("theoretical_ber_diversity: diversity_order must be >= 1");
        const QamConstellation qam(qam_order);
        const double gb = db_to_linear(ebn0_db);
        if (qam_order == 4)
            return mrc_rayleigh_ber(gb, diversity_order);

        const double k = qam.bits_per_symbol();
        const double root_m = std::sqrt(static_cast<double>(qam_order));
        const double base = 3.0 * k / (2.0 * (qam_order - 1.0));
        double p = 0.0;
        for (unsigned i = 1; i <= root_m / 2; ++i)
        {
            const double w = (2.0 * i - 1.0) * (2.0 * i - 1.0);
            p += mrc_rayleigh_ber(gb * base * w, diversity_order);
        }
        return std::min(0.5, 4.0 / k * (1.0 - 1.0 / root_m) * p);
    }
}

#endif
