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

#ifndef LSPCA_ESTIMATION_HPP
#define LSPCA_ESTIMATION_HPP

// Pilot-based channel estimators.
//
// Signal model per subcarrier k, with X[k] the M_T x P pilot matrix and H[k] the M_T x M_R
// channel:
//     Y[k] = H[k]^T X[k] + Z[k]                                   (M_R x P)
//
// All estimators return H[k] itself, i.e. they are written against the transposed model
// Y^T = X^T H + Z^T. For least squares this reads
//     H_ls[k] = (X^* X^T)^{-1} X^* Y^T = conj( (X X^H)^{-1} X Y^H ),
// which recovers H exactly without noise. The regularised (MMSE) estimator is
//     H_mmse[k] = ( X^* X^T / (M_R sx2) + I / (M_R sh2) )^{-1} X^* Y^T / (M_R sx2),
// the complex conjugate of the same expression written with X Y^H.
//
// LSPCA: LS -> IFFT over subcarriers -> keep the first L taps -> push into a ring of the last
// I realisations -> rank-lambda truncated SVD of the L x I tap history -> newest column ->
// FFT back to subcarriers. The SVD is taken without mean removal: the mean over realisations is
// the static part of the channel, which is signal.

#include "binary_io.hpp"
#include "csirs.hpp"
#include "numerics.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

namespace lspca
{
    enum class EstimateMethod : std::uint32_t
    {
        genie = 0,
        ls = 1,
        ls_smooth = 2,
        mmse = 3,
        lspca = 4,
    };

    inline std::string to_string(EstimateMethod m)
    {
        switch (m)
        {
        case EstimateMethod::genie: return "genie";
        case EstimateMethod::ls: return "ls";
        case EstimateMethod::ls_smooth: return "ls_smooth";
        case EstimateMethod::mmse: return "mmse";
        case EstimateMethod::lspca: return "lspca";
        }
        return "unknown";
    }

    // Received pilot block: K matrices of M_R x P.
    using ReceivedPilots = std::vector<ComplexMatrix>;

    struct ChannelEstimate
    {
        std::vector<ComplexMatrix> h; // K matrices of M_T x M_R
        EstimateMethod method = EstimateMethod::ls;
        OpCount op_count;

        std::size_t k() const { return h.size(); }
        std::size_t m_t() const { return h.empty() ? 0 : h.front().rows(); }
        std::size_t m_r() const { return h.empty() ? 0 : h.front().cols(); }
    };

    // Mean squared entry error against the true response.
    inline double estimate_mse(const ChannelEstimate &est, const std::vector<ComplexMatrix> &truth)
    {
        if (est.h.size() != truth.size())
            throw SizeError("estimate_mse: subcarrier count mismatch");
        double acc = 0.0;
        std::size_t n = 0;
        for (std::size_t k = 0; k < truth.size(); ++k)
        {
            acc += (est.h[k] - truth[k]).frobenius_norm_sq();
            n += truth[k].rows() * truth[k].cols();
        }
        return n ? acc / static_cast<double>(n) : 0.0;
    }

    struct MmseParams
    {
        double sigma_x_sq = 1.0;
        double sigma_h_sq = 1.0;
        std::size_t stored_blocks = 1; // I: most recent CSIRS blocks entering the estimate

        void validate() const
        {
            if (!(sigma_x_sq > 0.0) || !(sigma_h_sq > 0.0))
                throw ParameterError("MmseParams: variances must be positive");
            if (stored_blocks == 0)
                throw ParameterError("MmseParams: stored_blocks must be positive");
        }
    };

    struct SmoothingParams
    {
        std::size_t l = 1; // taps kept: n = 0 .. L-1
    };

    namespace detail
    {
        inline void check_pilot_shapes(const PilotBlock &pilot, const ReceivedPilots &y)
        {
            if (y.size() != pilot.k)
                throw SizeError("estimator: " + std::to_string(y.size()) + " received subcarriers, pilot has " +
                                std::to_string(pilot.k));
            for (const auto &yk : y)
                if (yk.cols() != pilot.p)
                    throw SizeError("estimator: received block has " + std::to_string(yk.cols()) + " slots, pilot has " +
                                    std::to_string(pilot.p));
        }

        // Per-pair sequences over subcarriers: out[pair][k] = est.h[k](m, r).
        inline std::vector<CVector> per_pair(const std::vector<ComplexMatrix> &h)
        {
            const std::size_t k = h.size(), m_t = h.front().rows(), m_r = h.front().cols();
            std::vector<CVector> out(m_t * m_r, CVector(k));
            for (std::size_t sc = 0; sc < k; ++sc)
                for (std::size_t m = 0; m < m_t; ++m)
                    for (std::size_t r = 0; r < m_r; ++r)
                        out[m * m_r + r][sc] = h[sc](m, r);
            return out;
        }

        inline std::vector<ComplexMatrix> from_pairs(const std::vector<CVector> &pairs, std::size_t m_t, std::size_t m_r)
        {
            const std::size_t k = pairs.front().size();
            std::vector<ComplexMatrix> h(k, ComplexMatrix(m_t, m_r));
            for (std::size_t sc = 0; sc < k; ++sc)
                for (std::size_t m = 0; m < m_t; ++m)
                    for (std::size_t r = 0; r < m_r; ++r)
                        h[sc](m, r) = pairs[m * m_r + r][sc];
            return h;
        }
    }

    // H_ls[k] = X^* Y^T / c, with X X^H = c I guaranteed by the pilot construction.
    inline ChannelEstimate estimate_ls(const PilotBlock &pilot, const ReceivedPilots &y, OpCount *counter = nullptr)
    {
        detail::check_pilot_shapes(pilot, y);
        const double c = pilot.gram();
        if (!(c > 0.0))
            throw SingularityError("estimate_ls: pilot Gram matrix is singular");
        ChannelEstimate est;
        est.method = EstimateMethod::ls;
        est.h.reserve(pilot.k);
        for (std::size_t k = 0; k < pilot.k; ++k)
            est.h.push_back(matmul(pilot.symbols[k].conjugate(), y[k].transpose(), &est.op_count).scaled(1.0 / c));
        charge(counter, est.op_count);
        return est;
    }

    // Regularised estimate over the most recent params.stored_blocks pilot blocks in `history`
    // (oldest first). Every block is assumed to carry the same pilot matrices.
    inline ChannelEstimate estimate_mmse(const PilotBlock &pilot, std::span<const ReceivedPilots> history,
                                         const MmseParams &params, OpCount *counter = nullptr)
    {
        params.validate();
        if (history.empty())
            throw StateError("estimate_mmse: no received pilot blocks");
        const std::size_t blocks = std::min(params.stored_blocks, history.size());
        const auto recent = history.subspan(history.size() - blocks);
        for (const auto &y : recent)
            detail::check_pilot_shapes(pilot, y);

        const std::size_t m_t = pilot.m_t, p = pilot.p;
        const std::size_t m_r = recent.front().front().rows();
        const double norm = static_cast<double>(m_r) * params.sigma_x_sq;
        const ComplexMatrix reg = ComplexMatrix::identity(m_t).scaled(1.0 / (static_cast<double>(m_r) * params.sigma_h_sq));

        ChannelEstimate est;
        est.method = EstimateMethod::mmse;
        est.h.reserve(pilot.k);
        for (std::size_t k = 0; k < pilot.k; ++k)
        {
            // Stack the stored blocks side by side: X_s is M_T x (P I), Y_s is M_R x (P I).
            ComplexMatrix xs_conj(m_t, p * blocks);
            ComplexMatrix ys_t(p * blocks, m_r);
            for (std::size_t b = 0; b < blocks; ++b)
            {
                const ComplexMatrix &x = pilot.symbols[k];
                const ComplexMatrix &yk = recent[b][k];
                if (yk.rows() != m_r)
                    throw SizeError("estimate_mmse: inconsistent receive antenna count across blocks");
                for (std::size_t t = 0; t < p; ++t)
                {
                    for (std::size_t m = 0; m < m_t; ++m)
                        xs_conj(m, b * p + t) = std::conj(x(m, t));
                    for (std::size_t r = 0; r < m_r; ++r)
                        ys_t(b * p + t, r) = yk(r, t);
                }
            }
            ComplexMatrix gram = matmul(xs_conj, xs_conj.adjoint(), &est.op_count); // X^* X^T
            ComplexMatrix lhs = gram.scaled(1.0 / norm) + reg;
            ComplexMatrix rhs = matmul(xs_conj, ys_t, &est.op_count).scaled(1.0 / norm);
            est.h.push_back(solve_regularized(lhs, rhs, &est.op_count));
        }
        charge(counter, est.op_count);
        return est;
    }

    inline ChannelEstimate estimate_mmse(const PilotBlock &pilot, const ReceivedPilots &y, const MmseParams &params,
                                         OpCount *counter = nullptr)
    {
        return estimate_mmse(pilot, std::span<const ReceivedPilots>(&y, 1), params, counter);
    }

    // IFFT over subcarriers, zero taps n >= L, FFT back; per antenna pair.
    inline ChannelEstimate smooth_filter(const ChannelEstimate &est, const SmoothingParams &params,
                                         OpCount *counter = nullptr)
    {
        const std::size_t k = est.k();
        if (k == 0)
            throw ParameterError("smooth_filter: empty estimate");
        if (!is_power_of_two(k))
            throw SizeError("smooth_filter: subcarrier count must be a power of two");
        if (params.l == 0 || params.l > k)
            throw ParameterError("smooth_filter: L = " + std::to_string(params.l) + " outside [1, " + std::to_string(k) +
                                 "]");
        OpCount cost;
        auto pairs = detail::per_pair(est.h);
        for (auto &seq : pairs)
        {
            fft_inplace(seq, true, &cost);
            std::fill(seq.begin() + static_cast<std::ptrdiff_t>(params.l), seq.end(), cplx{});
            fft_inplace(seq, false, &cost);
        }
        ChannelEstimate out{detail::from_pairs(pairs, est.m_t(), est.m_r()), est.method, est.op_count + cost};
        if (est.method == EstimateMethod::ls)
            out.method = EstimateMethod::ls_smooth;
        charge(counter, cost);
        return out;
    }

    // Ring of the last `capacity` truncated CIRs for every antenna pair.
    class CirBuffer
    {
    public:
        CirBuffer(std::size_t pairs, std::size_t l, std::size_t capacity = 20)
            : pairs_(pairs), l_(l), capacity_(capacity), slots_(capacity, std::vector<CVector>(pairs))
        {
            if (pairs == 0 || l == 0 || capacity == 0)
                throw ParameterError("CirBuffer: dimensions must be positive");
        }

        std::size_t pairs() const { return pairs_; }
        std::size_t rows() const { return l_; }
        std::size_t capacity() const { return capacity_; }
        std::size_t size() const { return size_; }
        bool empty() const { return size_ == 0; }

        // Total number of pushes so far; the newest column is the pushes()-th realisation.
        std::uint64_t pushes() const { return pushes_; }
        // Column index of the newest realisation in matrix().
        std::size_t newest_column() const
        {
            if (empty())
                throw StateError("CirBuffer: empty");
            return size_ - 1;
        }

        // cir[pair] holds L taps. The oldest column is evicted once the ring is full.
        void push(std::vector<CVector> cir)
        {
            if (cir.size() != pairs_)
                throw SizeError("CirBuffer::push: " + std::to_string(cir.size()) + " pairs, expected " +
                                std::to_string(pairs_));
            for (const auto &c : cir)
                if (c.size() != l_)
                    throw SizeError("CirBuffer::push: CIR of " + std::to_string(c.size()) + " taps, expected " +
                                    std::to_string(l_));
            slots_[head_] = std::move(cir);
            head_ = (head_ + 1) % capacity_;
            size_ = std::min(size_ + 1, capacity_);
            ++pushes_;
        }

        // L x size() tap history of one pair, oldest column first.
        ComplexMatrix matrix(std::size_t pair) const
        {
            if (empty())
                throw StateError("CirBuffer: empty");
            ComplexMatrix m(l_, size_);
            const std::size_t oldest = (head_ + capacity_ - size_) % capacity_;
            for (std::size_t c = 0; c < size_; ++c)
                m.set_col(c, slots_[(oldest + c) % capacity_][pair]);
            return m;
        }

    private:
        std::size_t pairs_, l_, capacity_;
        std::vector<std::vector<CVector>> slots_;
        std::size_t head_ = 0;
        std::size_t size_ = 0;
        std::uint64_t pushes_ = 0;
    };

    inline void buffer_push(CirBuffer &buffer, std::vector<CVector> cir) { buffer.push(std::move(cir)); }

    // Rank-lambda_max reconstruction of each pair's tap history, newest column only.
    inline std::vector<CVector> pca_denoise(const CirBuffer &buffer, std::size_t lambda_max, OpCount *counter = nullptr)
    {
        if (buffer.empty())
            throw StateError("pca_denoise: empty buffer");
        const std::size_t limit = std::min(buffer.rows(), buffer.size());
        if (lambda_max < 1 || lambda_max > limit)
            throw ParameterError("pca_denoise: lambda_max " + std::to_string(lambda_max) + " outside [1, " +
                                 std::to_string(limit) + "]");

        const std::size_t l = buffer.rows();
        const std::size_t newest = buffer.newest_column();
        std::vector<CVector> out(buffer.pairs(), CVector(l));
        for (std::size_t pr = 0; pr < buffer.pairs(); ++pr)
        {
            const SvdResult res = svd(buffer.matrix(pr));
            for (std::size_t t = 0; t < lambda_max; ++t)
            {
                const cplx w = res.s[t] * std::conj(res.v(newest, t));
                for (std::size_t n = 0; n < l; ++n)
                    out[pr][n] += res.u(n, t) * w;
            }
            charge(counter, svd_cost(l, buffer.size()) + matmul_cost(l, lambda_max, 1));
        }
        return out;
    }

    inline ChannelEstimate estimate_lspca(const PilotBlock &pilot, const ReceivedPilots &y, CirBuffer &buffer,
                                          const SmoothingParams &params, std::size_t lambda_max,
                                          OpCount *counter = nullptr)
    {
        if (buffer.rows() != params.l)
            throw SizeError("estimate_lspca: buffer holds " + std::to_string(buffer.rows()) + " taps, L = " +
                            std::to_string(params.l));
        ChannelEstimate ls = estimate_ls(pilot, y);
        const std::size_t k = ls.k();
        if (!is_power_of_two(k) || params.l == 0 || params.l > k)
            throw ParameterError("estimate_lspca: need power-of-two K and 1 <= L <= K");
        if (buffer.pairs() != ls.m_t() * ls.m_r())
            throw SizeError("estimate_lspca: buffer pair count does not match the antenna configuration");

        OpCount cost = ls.op_count;
        auto pairs = detail::per_pair(ls.h);
        std::vector<CVector> truncated(pairs.size());
        for (std::size_t pr = 0; pr < pairs.size(); ++pr)
        {
            fft_inplace(pairs[pr], true, &cost);
            truncated[pr].assign(pairs[pr].begin(), pairs[pr].begin() + static_cast<std::ptrdiff_t>(params.l));
        }
        buffer.push(std::move(truncated));

        const auto denoised = pca_denoise(buffer, lambda_max, &cost);
        for (std::size_t pr = 0; pr < pairs.size(); ++pr)
        {
            std::fill(pairs[pr].begin(), pairs[pr].end(), cplx{});
            std::copy(denoised[pr].begin(), denoised[pr].end(), pairs[pr].begin());
            fft_inplace(pairs[pr], false, &cost);
        }
        ChannelEstimate out{detail::from_pairs(pairs, ls.m_t(), ls.m_r()), EstimateMethod::lspca, cost};
        charge(counter, cost);
        return out;
    }

    // Estimate dump, little-endian:
    //   u32 method, u32 K, u32 M_T, u32 M_R, then for each k the M_T x M_R matrix row-major as
    //   f64 re, f64 im pairs.
    inline void write_estimate(const ChannelEstimate &est, std::ostream &os)
    {
        binary::put_u32(os, static_cast<std::uint32_t>(est.method));
        binary::put_u32(os, static_cast<std::uint32_t>(est.k()));
        binary::put_u32(os, static_cast<std::uint32_t>(est.m_t()));
        binary::put_u32(os, static_cast<std::uint32_t>(est.m_r()));
        for (const auto &h : est.h)
            for (const auto &z : h.data())
                binary::put_complex(os, z);
    }

    inline void write_estimate(const ChannelEstimate &est, const std::filesystem::path &path)
    {
        std::ofstream os(path, std::ios::binary);
        if (!os)
            throw ConfigError("cannot open " + path.string() + " for writing");
        write_estimate(est, os);
        if (!os)
            throw ConfigError("write failed: " + path.string());
    }

    inline ChannelEstimate read_estimate(std::istream &is)
    {
        ChannelEstimate est;
        const std::uint32_t method = binary::get_u32(is, "estimate header");
        if (method > static_cast<std::uint32_t>(EstimateMethod::lspca))
            throw ConfigError("estimate dump: unknown method code " + std::to_string(method));
        est.method = static_cast<EstimateMethod>(method);
        const std::uint32_t k = binary::get_u32(is, "estimate header");
        const std::uint32_t m_t = binary::get_u32(is, "estimate header");
        const std::uint32_t m_r = binary::get_u32(is, "estimate header");
        if (k == 0 || m_t == 0 || m_r == 0)
            throw ConfigError("estimate dump: zero dimension in header");
        est.h.reserve(k);
        for (std::uint32_t sc = 0; sc < k; ++sc)
        {
            CVector d(static_cast<std::size_t>(m_t) * m_r);
            for (auto &z : d)
                z = binary::get_complex(is, "estimate entries");
            est.h.emplace_back(m_t, m_r, std::move(d));
        }
        return est;
    }
}

#endif
