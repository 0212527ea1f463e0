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

#include <catch2/catch_amalgamated.hpp>

#include "test_support.hpp"

using namespace lspca;
using namespace lspca_test;

namespace
{
    CVector random_qam_symbols(const QamConstellation &q, std::size_t n, std::mt19937_64 &rng)
    {
        std::uniform_int_distribution<unsigned> pick(0, q.order() - 1);
        CVector s(n);
        for (auto &z : s)
            z = q.point(pick(rng));
        return s;
    }
}

TEST_CASE("stbc: shipped designs are orthogonal")
{
    std::mt19937_64 rng(7);
    const QamConstellation q(4);
    for (const char *name : {"siso", "alamouti", "g8"})
    {
        const StbcCode code = StbcCode::by_name(name);
        CHECK(code.generator.size() == code.m_t * code.p);
        for (int trial = 0; trial < 100; ++trial)
        {
            const CVector s = random_qam_symbols(q, code.q, rng);
            const StbcCodeword cw = stbc_encode(s, code);
            double e = 0.0;
            for (const auto &z : s)
                e += std::norm(z);
            const ComplexMatrix g = matmul(cw.matrix, cw.matrix.adjoint());
            const ComplexMatrix expected = ComplexMatrix::identity(code.m_t).scaled(code.kappa * e);
            CHECK((g - expected).frobenius_norm() < 1e-10);
        }
    }
}

TEST_CASE("stbc: entries are signed copies or conjugates of one source symbol")
{
    std::mt19937_64 rng(8);
    const CVector s = random_vector(rng, 8);
    for (const char *name : {"alamouti", "g8"})
    {
        const StbcCode code = StbcCode::by_name(name);
        const CVector src(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(code.q));
        const ComplexMatrix x = stbc_encode(src, code).matrix;
        for (std::size_t m = 0; m < code.m_t; ++m)
            for (std::size_t t = 0; t < code.p; ++t)
            {
                const cplx v = x(m, t);
                bool found = std::abs(v) == 0.0;
                for (const auto &z : src)
                    for (cplx c : {z, -z, std::conj(z), -std::conj(z)})
                        found = found || std::abs(v - c) < 1e-15;
                CHECK(found);
            }
    }
}

TEST_CASE("stbc: Alamouti layout and rates")
{
    const StbcCode a = StbcCode::alamouti();
    const cplx s1(1.0, 2.0), s2(-3.0, 0.5);
    const CVector src{s1, s2};
    const ComplexMatrix x = stbc_encode(src, a).matrix;
    CHECK(x(0, 0) == s1);
    CHECK(x(1, 0) == s2);
    CHECK(x(0, 1) == -std::conj(s2));
    CHECK(x(1, 1) == std::conj(s1));
    CHECK(a.rate() == 1.0);
    CHECK(StbcCode::g8().rate() == 0.5);
    CHECK(StbcCode::g8().m_t == 8);
    CHECK_THROWS_AS(stbc_encode(CVector{s1}, a), FramingError);
    CHECK_THROWS(StbcCode::by_name("nope"));
}

TEST_CASE("stbc_ml_decode: Alamouti 2x1 decoupled decoder equals exhaustive search")
{
    const StbcCode code = StbcCode::alamouti();
    const QamConstellation q(4);
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g(0.0, 0.5);
    for (int frame = 0; frame < 1000; ++frame)
    {
        const CVector s = random_qam_symbols(q, 2, rng);
        const ComplexMatrix h = random_matrix(rng, 2, 1);
        ComplexMatrix y = matmul(h.transpose(), stbc_encode(s, code).matrix);
        for (auto &z : y.data())
        {
            const double re = g(rng);
            z += cplx(re, g(rng));
        }

        double best = std::numeric_limits<double>::infinity();
        unsigned b1 = 0, b2 = 0;
        for (unsigned l1 = 0; l1 < 4; ++l1)
            for (unsigned l2 = 0; l2 < 4; ++l2)
            {
                const CVector cand{q.point(l1), q.point(l2)};
                const double m = (y - matmul(h.transpose(), stbc_encode(cand, code).matrix)).frobenius_norm_sq();
                if (m < best)
                {
                    best = m;
                    b1 = l1;
                    b2 = l2;
                }
            }
        const StbcDecision d = stbc_ml_decode(y, h, code, q);
        CHECK(d.labels[0] == b1);
        CHECK(d.labels[1] == b2);
    }
}

TEST_CASE("stbc_ml_decode: noiseless recovery for every code and size")
{
    std::mt19937_64 rng(12);
    for (unsigned m : {4u, 16u})
    {
        const QamConstellation q(m);
        for (const char *name : {"siso", "alamouti", "g8"})
            for (std::size_t m_r : {1u, 2u, 8u})
            {
                const StbcCode code = StbcCode::by_name(name);
                const CVector s = random_qam_symbols(q, code.q, rng);
                const ComplexMatrix h = random_matrix(rng, code.m_t, m_r);
                const double a = 0.37;
                const ComplexMatrix y = matmul(h.transpose(), stbc_encode(s, code).matrix).scaled(a);
                const StbcDecision d = stbc_ml_decode(y, h, code, q, a);
                for (std::size_t i = 0; i < code.q; ++i)
                    CHECK(std::abs(d.symbols[i] - s[i]) < 1e-12);
            }
    }
}

TEST_CASE("stbc_ml_decode: invariant to a common positive scale")
{
    const StbcCode code = StbcCode::g8();
    const QamConstellation q(4);
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 50; ++trial)
    {
        const ComplexMatrix h = random_matrix(rng, 8, 2);
        const ComplexMatrix y = random_matrix(rng, 2, code.p);
        const auto a = stbc_ml_decode(y, h, code, q);
        const auto b = stbc_ml_decode(y.scaled(3.5), h.scaled(3.5), code, q);
        CHECK(a.labels == b.labels);
    }
}

TEST_CASE("stbc_ml_decode: zero channel and shape errors")
{
    const StbcCode code = StbcCode::alamouti();
    const QamConstellation q(4);
    const ComplexMatrix y(1, 2);
    const auto d = stbc_ml_decode(y, ComplexMatrix(2, 1), code, q);
    CHECK(d.zero_energy_channel);
    CHECK(d.labels == std::vector<unsigned>{0u, 0u});
    CHECK_THROWS_AS(stbc_ml_decode(ComplexMatrix(1, 3), ComplexMatrix(2, 1), code, q), SizeError);
    CHECK_THROWS_AS(stbc_ml_decode(y, ComplexMatrix(2, 2), code, q), SizeError);
}
