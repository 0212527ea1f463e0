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

#ifndef LSPCA_NUMERICS_HPP
#define LSPCA_NUMERICS_HPP

// Dense complex linear algebra used throughout the simulator: radix-2 FFT, matrix product,
// Hermitian positive definite solve, one-sided Jacobi SVD and rank truncation.
//
// Every kernel that appears in the estimator cost analysis accepts an optional OpCount*.
// The charged amounts come from closed-form cost models (see *_cost functions below), not
// from instrumenting the arithmetic actually executed. This keeps counts exact integers and
// independent of the algorithm chosen behind each kernel.

#include "errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace lspca
{
    using cplx = std::complex<double>;
    using CVector = std::vector<cplx>;

    // Tally of real multiplications and additions charged to a computation.
    struct OpCount
    {
        std::uint64_t real_mults = 0;
        std::uint64_t real_adds = 0;

        OpCount &operator+=(const OpCount &o)
        {
            real_mults += o.real_mults;
            real_adds += o.real_adds;
            return *this;
        }
        friend OpCount operator+(OpCount a, const OpCount &b) { return a += b; }
        friend OpCount operator*(std::uint64_t k, const OpCount &a) { return {k * a.real_mults, k * a.real_adds}; }
        friend OpCount operator*(const OpCount &a, std::uint64_t k) { return k * a; }
        friend bool operator==(const OpCount &, const OpCount &) = default;
    };

    inline void charge(OpCount *counter, const OpCount &cost)
    {
        if (counter)
            *counter += cost;
    }

    // ---------------------------------------------------------------------------------------------
    // Cost models

    // Complex (m x n) * (n x p): 4nmp real multiplications, (3n-1)mp real additions.
    constexpr OpCount matmul_cost(std::uint64_t m, std::uint64_t n, std::uint64_t p)
    {
        return {4 * n * m * p, (3 * n - 1) * m * p};
    }

    // Inversion of an n x n complex matrix, charged at the SDF-SGR figures:
    // 8n^3 + 4n^2 + 3n multiplications, 25/3 n^3 - 4n^2 - 1/3 n additions.
    // 25n^3 - n is always divisible by 3, so the addition count is an exact integer.
    constexpr OpCount inversion_cost(std::uint64_t n)
    {
        const std::uint64_t mults = 8 * n * n * n + 4 * n * n + 3 * n;
        const std::uint64_t adds = (25 * n * n * n - 12 * n * n - n) / 3;
        return {mults, adds};
    }

    // Radix-2 FFT of length n: (n/2) log2(n) butterflies, one complex multiply and two complex adds each.
    constexpr OpCount fft_cost(std::uint64_t n)
    {
        std::uint64_t stages = 0;
        while ((std::uint64_t{1} << stages) < n)
            ++stages;
        return {2 * n * stages, 3 * n * stages};
    }

    // Thin SVD with both singular-vector sets, Golub-Reinsch model: 4 m n^2 + 8 n^3 complex
    // multiply-accumulates with m >= n, each charged as 4 real mults and 4 real adds.
    constexpr OpCount svd_cost(std::uint64_t m, std::uint64_t n)
    {
        if (m < n)
            std::swap(m, n);
        const std::uint64_t macs = 4 * m * n * n + 8 * n * n * n;
        return {4 * macs, 4 * macs};
    }

    // ---------------------------------------------------------------------------------------------
    // ComplexMatrix

    // Dense row-major complex matrix. Shapes are always positive; a default-constructed matrix is
    // an empty placeholder (0 x 0) used only for container slots.
    class ComplexMatrix
    {
    public:
        ComplexMatrix() = default;

        ComplexMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols)
        {
            if (rows == 0 || cols == 0)
                throw ParameterError("ComplexMatrix: rows and cols must be positive");
        }

        ComplexMatrix(std::size_t rows, std::size_t cols, CVector entries)
            : rows_(rows), cols_(cols), data_(std::move(entries))
        {
            if (rows == 0 || cols == 0)
                throw ParameterError("ComplexMatrix: rows and cols must be positive");
            if (data_.size() != rows * cols)
                throw SizeError("ComplexMatrix: entry count " + std::to_string(data_.size()) + " != " +
                                std::to_string(rows) + "x" + std::to_string(cols));
            for (const auto &z : data_)
                if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
                    throw ParameterError("ComplexMatrix: non-finite entry");
        }

        static ComplexMatrix from_rows(std::initializer_list<std::initializer_list<cplx>> rows)
        {
            const std::size_t r = rows.size();
            const std::size_t c = r ? rows.begin()->size() : 0;
            CVector d;
            d.reserve(r * c);
            for (const auto &row : rows)
            {
                if (row.size() != c)
                    throw SizeError("ComplexMatrix::from_rows: ragged rows");
                d.insert(d.end(), row.begin(), row.end());
            }
            return ComplexMatrix(r, c, std::move(d));
        }

        static ComplexMatrix identity(std::size_t n)
        {
            ComplexMatrix m(n, n);
            for (std::size_t i = 0; i < n; ++i)
                m(i, i) = 1.0;
            return m;
        }

        static ComplexMatrix diagonal(std::span<const double> d)
        {
            ComplexMatrix m(d.size(), d.size());
            for (std::size_t i = 0; i < d.size(); ++i)
                m(i, i) = d[i];
            return m;
        }

        static ComplexMatrix diagonal(std::initializer_list<double> d)
        {
            return diagonal(std::span<const double>(d.begin(), d.size()));
        }

        std::size_t rows() const { return rows_; }
        std::size_t cols() const { return cols_; }
        bool empty() const { return data_.empty(); }

        cplx &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
        const cplx &operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

        std::span<cplx> data() { return data_; }
        std::span<const cplx> data() const { return data_; }

        CVector col(std::size_t c) const
        {
            CVector v(rows_);
            for (std::size_t r = 0; r < rows_; ++r)
                v[r] = (*this)(r, c);
            return v;
        }

        void set_col(std::size_t c, std::span<const cplx> v)
        {
            if (v.size() != rows_)
                throw SizeError("ComplexMatrix::set_col: length mismatch");
            for (std::size_t r = 0; r < rows_; ++r)
                (*this)(r, c) = v[r];
        }

        ComplexMatrix transpose() const
        {
            ComplexMatrix t(cols_, rows_);
            for (std::size_t r = 0; r < rows_; ++r)
                for (std::size_t c = 0; c < cols_; ++c)
                    t(c, r) = (*this)(r, c);
            return t;
        }

        ComplexMatrix conjugate() const
        {
            ComplexMatrix t = *this;
            for (auto &z : t.data_)
                z = std::conj(z);
            return t;
        }

        ComplexMatrix adjoint() const
        {
            ComplexMatrix t(cols_, rows_);
            for (std::size_t r = 0; r < rows_; ++r)
                for (std::size_t c = 0; c < cols_; ++c)
                    t(c, r) = std::conj((*this)(r, c));
            return t;
        }

        ComplexMatrix scaled(cplx k) const
        {
            ComplexMatrix t = *this;
            for (auto &z : t.data_)
                z *= k;
            return t;
        }

        double frobenius_norm_sq() const
        {
            double s = 0.0;
            for (const auto &z : data_)
                s += std::norm(z);
            return s;
        }
        double frobenius_norm() const { return std::sqrt(frobenius_norm_sq()); }

        ComplexMatrix &operator+=(const ComplexMatrix &o)
        {
            require_same_shape(o);
            for (std::size_t i = 0; i < data_.size(); ++i)
                data_[i] += o.data_[i];
            return *this;
        }
        ComplexMatrix &operator-=(const ComplexMatrix &o)
        {
            require_same_shape(o);
            for (std::size_t i = 0; i < data_.size(); ++i)
                data_[i] -= o.data_[i];
            return *this;
        }
        friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix &b) { return a += b; }
        friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix &b) { return a -= b; }
        friend bool operator==(const ComplexMatrix &, const ComplexMatrix &) = default;

    private:
        void require_same_shape(const ComplexMatrix &o) const
        {
            if (o.rows_ != rows_ || o.cols_ != cols_)
                throw SizeError("ComplexMatrix: shape mismatch");
        }

        std::size_t rows_ = 0;
        std::size_t cols_ = 0;
        CVector data_;
    };

    // Frobenius distance relative to the norm of `ref` (absolute if ref is zero).
    inline double relative_error(const ComplexMatrix &a, const ComplexMatrix &ref)
    {
        const double d = (a - ref).frobenius_norm();
        const double n = ref.frobenius_norm();
        return n > 0.0 ? d / n : d;
    }

    // ---------------------------------------------------------------------------------------------
    // FFT

    constexpr bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

    namespace detail
    {
        // exp(-2 pi i k / n) for k < n/2, cached per thread.
        inline const CVector &twiddles(std::size_t n)
        {
            thread_local std::unordered_map<std::size_t, CVector> cache;
            auto it = cache.find(n);
            if (it != cache.end())
                return it->second;
            CVector w(n / 2);
            for (std::size_t k = 0; k < n / 2; ++k)
                w[k] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
            return cache.emplace(n, std::move(w)).first->second;
        }
    }

    // In-place radix-2 DFT. Forward: X[k] = sum_n x[n] e^{-2 pi i k n / N}.
    // Inverse: x[n] = (1/N) sum_k X[k] e^{+2 pi i k n / N}.
    inline void fft_inplace(std::span<cplx> x, bool inverse = false, OpCount *counter = nullptr)
    {
        const std::size_t n = x.size();
        if (!is_power_of_two(n))
            throw SizeError("fft: length " + std::to_string(n) + " is not a power of two");
        charge(counter, fft_cost(n));
        if (n == 1)
            return;

        for (std::size_t i = 1, j = 0; i < n; ++i)
        {
            std::size_t bit = n >> 1;
            for (; j & bit; bit >>= 1)
                j ^= bit;
            j ^= bit;
            if (i < j)
                std::swap(x[i], x[j]);
        }

        const CVector &w = detail::twiddles(n);
        for (std::size_t len = 2; len <= n; len <<= 1)
        {
            const std::size_t half = len / 2;
            const std::size_t step = n / len;
            for (std::size_t start = 0; start < n; start += len)
            {
                for (std::size_t k = 0; k < half; ++k)
                {
                    const cplx tw = inverse ? std::conj(w[k * step]) : w[k * step];
                    const cplx u = x[start + k];
                    const cplx v = x[start + k + half] * tw;
                    x[start + k] = u + v;
                    x[start + k + half] = u - v;
                }
            }
        }

        if (inverse)
        {
            const double s = 1.0 / static_cast<double>(n);
            for (auto &z : x)
                z *= s;
        }
    }

    inline CVector fft(std::span<const cplx> x, bool inverse = false, OpCount *counter = nullptr)
    {
        CVector y(x.begin(), x.end());
        fft_inplace(y, inverse, counter);
        return y;
    }

    // ---------------------------------------------------------------------------------------------
    // Matrix product and solve

    inline ComplexMatrix matmul(const ComplexMatrix &a, const ComplexMatrix &b, OpCount *counter = nullptr)
    {
        if (a.cols() != b.rows())
            throw SizeError("matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " * " +
                            std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
        const std::size_t m = a.rows(), n = a.cols(), p = b.cols();
        ComplexMatrix c(m, p);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t k = 0; k < n; ++k)
            {
                const cplx aik = a(i, k);
                for (std::size_t j = 0; j < p; ++j)
                    c(i, j) += aik * b(k, j);
            }
        charge(counter, matmul_cost(m, n, p));
        return c;
    }

    // Condition number above which solve_regularized refuses to answer.
    inline constexpr double max_condition_number = 1e12;

    // Solves a * x = b for Hermitian positive definite a via Cholesky factorisation.
    // The charged cost is one n x n inversion plus the (n x n)(n x cols(b)) product, whatever
    // the factorisation actually performs. The condition number is estimated as
    // (max L_ii / min L_ii)^2 from the Cholesky factor, which is exact for diagonal a and a lower
    // bound otherwise.
    inline ComplexMatrix solve_regularized(const ComplexMatrix &a, const ComplexMatrix &b, OpCount *counter = nullptr)
    {
        const std::size_t n = a.rows();
        if (a.cols() != n)
            throw SizeError("solve_regularized: matrix is not square");
        if (b.rows() != n)
            throw SizeError("solve_regularized: right-hand side has " + std::to_string(b.rows()) + " rows, expected " +
                            std::to_string(n));

        const double scale = std::max(a.frobenius_norm(), 1e-300);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j)
                if (std::abs(a(i, j) - std::conj(a(j, i))) > 1e-10 * scale)
                    throw ParameterError("solve_regularized: matrix is not Hermitian");

        ComplexMatrix l(n, n);
        for (std::size_t j = 0; j < n; ++j)
        {
            double d = a(j, j).real();
            for (std::size_t k = 0; k < j; ++k)
                d -= std::norm(l(j, k));
            if (!(d > 0.0))
                throw SingularityError("solve_regularized: matrix is not positive definite");
            const double ljj = std::sqrt(d);
            l(j, j) = ljj;
            for (std::size_t i = j + 1; i < n; ++i)
            {
                cplx s = a(i, j);
                for (std::size_t k = 0; k < j; ++k)
                    s -= l(i, k) * std::conj(l(j, k));
                l(i, j) = s / ljj;
            }
        }

        double dmax = 0.0, dmin = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i)
        {
            dmax = std::max(dmax, l(i, i).real());
            dmin = std::min(dmin, l(i, i).real());
        }
        const double cond = (dmax / dmin) * (dmax / dmin);
        if (!(cond <= max_condition_number))
            throw SingularityError("solve_regularized: condition number estimate " + std::to_string(cond) +
                                   " exceeds 1e12");

        ComplexMatrix x = b;
        for (std::size_t c = 0; c < b.cols(); ++c)
        {
            for (std::size_t i = 0; i < n; ++i)
            {
                cplx s = x(i, c);
                for (std::size_t k = 0; k < i; ++k)
                    s -= l(i, k) * x(k, c);
                x(i, c) = s / l(i, i);
            }
            for (std::size_t ii = n; ii-- > 0;)
            {
                cplx s = x(ii, c);
                for (std::size_t k = ii + 1; k < n; ++k)
                    s -= std::conj(l(k, ii)) * x(k, c);
                x(ii, c) = s / l(ii, ii);
            }
        }

        charge(counter, inversion_cost(n) + matmul_cost(n, n, b.cols()));
        return x;
    }

    // ---------------------------------------------------------------------------------------------
    // SVD

    struct SvdResult
    {
        ComplexMatrix u;        // m x r, orthonormal columns
        std::vector<double> s;  // r values, non-increasing, r = min(m, n)
        ComplexMatrix v;        // n x r, orthonormal columns
    };

    inline constexpr double svd_tolerance = 1e-12;
    inline constexpr int svd_max_sweeps = 100;

    namespace detail
    {
        // Fills columns of q flagged in `missing` with unit vectors orthogonal to all other columns.
        inline void complete_orthonormal(std::vector<CVector> &q, const std::vector<bool> &missing)
        {
            const std::size_t m = q.empty() ? 0 : q.front().size();
            std::size_t next_basis = 0;
            for (std::size_t c = 0; c < q.size(); ++c)
            {
                if (!missing[c])
                    continue;
                for (; next_basis < m; ++next_basis)
                {
                    CVector cand(m, 0.0);
                    cand[next_basis] = 1.0;
                    for (int pass = 0; pass < 2; ++pass)
                        for (std::size_t o = 0; o < q.size(); ++o)
                        {
                            if (o == c)
                                continue;
                            cplx proj = 0.0;
                            for (std::size_t i = 0; i < m; ++i)
                                proj += std::conj(q[o][i]) * cand[i];
                            for (std::size_t i = 0; i < m; ++i)
                                cand[i] -= proj * q[o][i];
                        }
                    double nrm = 0.0;
                    for (const auto &z : cand)
                        nrm += std::norm(z);
                    nrm = std::sqrt(nrm);
                    if (nrm > 1e-6)
                    {
                        for (auto &z : cand)
                            z /= nrm;
                        q[c] = std::move(cand);
                        ++next_basis;
                        break;
                    }
                }
            }
        }

        // One-sided (Hestenes) Jacobi for m >= n.
        inline SvdResult svd_tall(const ComplexMatrix &a)
        {
            const std::size_t m = a.rows(), n = a.cols();
            std::vector<CVector> w(n, CVector(m));
            std::vector<CVector> v(n, CVector(n, 0.0));
            for (std::size_t j = 0; j < n; ++j)
            {
                for (std::size_t i = 0; i < m; ++i)
                    w[j][i] = a(i, j);
                v[j][j] = 1.0;
            }

            // Columns below this energy are numerical zeros; rotating them only churns roundoff.
            double total = 0.0;
            for (const auto &z : a.data())
                total += std::norm(z);
            const double negligible = 1e-28 * total;

            bool converged = false;
            for (int sweep = 0; sweep < svd_max_sweeps && !converged; ++sweep)
            {
                converged = true;
                for (std::size_t p = 0; p + 1 < n; ++p)
                    for (std::size_t q = p + 1; q < n; ++q)
                    {
                        double alpha = 0.0, beta = 0.0;
                        cplx gamma = 0.0;
                        for (std::size_t i = 0; i < m; ++i)
                        {
                            alpha += std::norm(w[p][i]);
                            beta += std::norm(w[q][i]);
                            gamma += std::conj(w[p][i]) * w[q][i];
                        }
                        const double g = std::abs(gamma);
                        if (g == 0.0 || g <= svd_tolerance * std::sqrt(alpha * beta) || alpha <= negligible ||
                            beta <= negligible)
                            continue;
                        converged = false;

                        const cplx phase = gamma / g;
                        const double zeta = (beta - alpha) / (2.0 * g);
                        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                        const double c = 1.0 / std::sqrt(1.0 + t * t);
                        const double s = c * t;
                        const cplx sp = s * phase;            // s e^{i phi}
                        const cplx sm = s * std::conj(phase); // s e^{-i phi}

                        for (std::size_t i = 0; i < m; ++i)
                        {
                            const cplx xp = w[p][i], xq = w[q][i];
                            w[p][i] = c * xp - sm * xq;
                            w[q][i] = sp * xp + c * xq;
                        }
                        for (std::size_t i = 0; i < n; ++i)
                        {
                            const cplx xp = v[p][i], xq = v[q][i];
                            v[p][i] = c * xp - sm * xq;
                            v[q][i] = sp * xp + c * xq;
                        }
                    }
            }
            if (!converged)
                throw NumericError("svd: no convergence after " + std::to_string(svd_max_sweeps) + " sweeps");

            std::vector<double> sigma(n);
            for (std::size_t j = 0; j < n; ++j)
            {
                double s2 = 0.0;
                for (const auto &z : w[j])
                    s2 += std::norm(z);
                sigma[j] = std::sqrt(s2);
            }
            std::vector<std::size_t> order(n);
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

            const double smax = n ? sigma[order.front()] : 0.0;
            const double zero_threshold = smax * 1e-13 * static_cast<double>(std::max(m, n));

            std::vector<CVector> ucols(n), vcols(n);
            std::vector<bool> missing(n, false);
            SvdResult r;
            r.s.resize(n);
            for (std::size_t k = 0; k < n; ++k)
            {
                const std::size_t j = order[k];
                vcols[k] = v[j];
                if (sigma[j] > zero_threshold && sigma[j] > 0.0)
                {
                    r.s[k] = sigma[j];
                    ucols[k] = w[j];
                    for (auto &z : ucols[k])
                        z /= sigma[j];
                }
                else
                {
                    r.s[k] = 0.0;
                    ucols[k] = CVector(m, 0.0);
                    missing[k] = true;
                }
            }
            complete_orthonormal(ucols, missing);

            r.u = ComplexMatrix(m, n);
            r.v = ComplexMatrix(n, n);
            for (std::size_t k = 0; k < n; ++k)
            {
                r.u.set_col(k, ucols[k]);
                r.v.set_col(k, vcols[k]);
            }
            return r;
        }
    }

    // Economy SVD: a = u diag(s) v^H with min(m, n) singular triplets.
    inline SvdResult svd(const ComplexMatrix &a)
    {
        if (a.empty())
            throw ParameterError("svd: empty matrix");
        for (const auto &z : a.data())
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
                throw ParameterError("svd: non-finite entry");
        if (a.rows() >= a.cols())
            return detail::svd_tall(a);
        SvdResult t = detail::svd_tall(a.adjoint());
        return SvdResult{std::move(t.v), std::move(t.s), std::move(t.u)};
    }

    // Best rank-lambda_max approximation: sum_{j < lambda_max} s_j u_j v_j^H.
    inline ComplexMatrix truncate_rank(const SvdResult &res, std::size_t lambda_max)
    {
        if (lambda_max < 1 || lambda_max > res.s.size())
            throw ParameterError("truncate_rank: lambda_max " + std::to_string(lambda_max) + " outside [1, " +
                                 std::to_string(res.s.size()) + "]");
        const std::size_t m = res.u.rows(), n = res.v.rows();
        ComplexMatrix out(m, n);
        for (std::size_t t = 0; t < lambda_max; ++t)
            for (std::size_t i = 0; i < m; ++i)
            {
                const cplx us = res.u(i, t) * res.s[t];
                for (std::size_t j = 0; j < n; ++j)
                    out(i, j) += us * std::conj(res.v(j, t));
            }
        return out;
    }
}

#endif
