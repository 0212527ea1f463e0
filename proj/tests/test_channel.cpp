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

#include <filesystem>
#include <fstream>

using namespace lspca;
using namespace lspca_test;

namespace
{
    const std::filesystem::path tdl_dir = LSPCA_DATA_DIR "/tdl";

    TdlProfile flat() { return tdl_profile_load("flat", 0.0, tdl_dir); }

    std::filesystem::path write_temp(const std::string &name, const std::string &body)
    {
        const auto p = std::filesystem::temp_directory_path() / name;
        std::ofstream(p) << body;
        return p;
    }
}

TEST_CASE("tdl_profile_load: TDL-B matches the transcribed table")
{
    const TdlProfile p = tdl_profile_load("TDL-B", 1.0, tdl_dir);
    REQUIRE(p.tap_delays.size() == 23);
    REQUIRE(p.tap_powers_db.size() == 23);
    double sum_d = 0.0, sum_db = 0.0, sum_lin = 0.0;
    for (std::size_t i = 0; i < 23; ++i)
    {
        sum_d += p.tap_delays[i];
        sum_db += p.tap_powers_db[i];
        sum_lin += p.tap_powers[i];
    }
    CHECK(std::abs(sum_d - 34.1999) < 1e-9);
    CHECK(std::abs(sum_db - (-153.8)) < 1e-9);
    CHECK(std::abs(sum_lin - 1.0) < 1e-12);
    CHECK(p.tap_delays[0] == 0.0);
    CHECK(p.tap_powers_db[0] == 0.0);
    CHECK(p.tap_delays[15] == 1.7842);
    CHECK(p.tap_powers_db[15] == -1.9);
    CHECK(p.tap_delays[22] == 4.7834);
    CHECK(p.tap_powers_db[22] == -11.3);
    CHECK(p.max_delay() == 4.7834);

    const TdlProfile scaled = tdl_profile_load("TDL-B", 272e-9, tdl_dir / "TDL-B.txt");
    CHECK(std::abs(scaled.max_delay() - 4.7834 * 272e-9) < 1e-20);
    CHECK(scaled.tap_powers == p.tap_powers);
}

TEST_CASE("tdl_profile_load: errors")
{
    CHECK_THROWS_AS(tdl_profile_load("TDL-Z", 1.0, tdl_dir), ConfigError);
    CHECK_THROWS_AS(tdl_profile_load("flat", 1.0, tdl_dir / "TDL-B.txt"), ConfigError);
    CHECK_THROWS_AS(tdl_profile_load("bad", 1.0, write_temp("lspca_bad.txt", "profile bad\n0.0 0 7\n")), ConfigError);
    CHECK_THROWS_AS(tdl_profile_load("bad", 1.0, write_temp("lspca_bad2.txt", "0.0 0\n")), ConfigError);
    CHECK_THROWS_AS(tdl_profile_load("bad", 1.0, write_temp("lspca_bad3.txt", "profile bad\n0.5 0\n")), ConfigError);
    CHECK_THROWS_AS(tdl_profile_load("bad", 1.0, write_temp("lspca_bad4.txt", "profile bad\n0 0\n-1 3\n")), ConfigError);
    CHECK_THROWS_AS(tdl_profile_load("flat", -1.0, tdl_dir), ConfigError);
}

TEST_CASE("evolve: zero Doppler is static, seeds are reproducible")
{
    const TdlProfile p = tdl_profile_load("TDL-B", 272e-9, tdl_dir);
    const TdlChannelState s(p, 2, 2, 3.84e6, 0.0, 5);
    const auto a = s.evolve(0.0), b = s.evolve(17.3);
    for (std::size_t pr = 0; pr < 4; ++pr)
        CHECK(a.cir[pr] == b.cir[pr]);
    CHECK(s.cir_length() == 6);

    const TdlChannelState s2(p, 2, 2, 3.84e6, 30.0, 5), s3(p, 2, 2, 3.84e6, 30.0, 5), s4(p, 2, 2, 3.84e6, 30.0, 6);
    CHECK(s2.evolve(0.01).cir == s3.evolve(0.01).cir);
    CHECK(s2.evolve(0.01).cir != s4.evolve(0.01).cir);
    CHECK(s2.evolve(0.0).cir != s2.evolve(0.01).cir);
}

TEST_CASE("evolve: autocorrelation follows J0(2 pi fd tau)")
{
    const double fd = 40.0, dt = 5e-4;
    const std::size_t lags = 100, len = 200, seeds = 500;
    std::vector<cplx> acc(lags + 1, 0.0);
    std::vector<std::size_t> cnt(lags + 1, 0);
    for (std::size_t seed = 0; seed < seeds; ++seed)
    {
        const TdlChannelState s(flat(), 1, 1, 1e6, fd, 1000 + seed);
        CVector g(len);
        for (std::size_t j = 0; j < len; ++j)
            g[j] = s.tap_gain(0, 0, 0.37 * static_cast<double>(seed) + static_cast<double>(j) * dt);
        for (std::size_t lag = 0; lag <= lags; ++lag)
            for (std::size_t j = 0; j + lag < len; ++j)
            {
                acc[lag] += g[j + lag] * std::conj(g[j]);
                ++cnt[lag];
            }
    }
    const double r0 = acc[0].real() / static_cast<double>(cnt[0]);
    CHECK(std::abs(r0 - 1.0) < 0.03);
    double sq = 0.0;
    for (std::size_t lag = 0; lag <= lags; ++lag)
    {
        const double r = acc[lag].real() / static_cast<double>(cnt[lag]) / r0;
        const double ref = std::cyl_bessel_j(0.0, 2.0 * std::numbers::pi * fd * static_cast<double>(lag) * dt);
        sq += (r - ref) * (r - ref);
    }
    CHECK(std::sqrt(sq / static_cast<double>(lags + 1)) < 0.05);
}

TEST_CASE("evolve: tap gain magnitude is Rayleigh")
{
    const std::size_t n = 100'000;
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        const TdlChannelState s(flat(), 1, 1, 1e6, 10.0, 77'000 + i);
        r[i] = std::abs(s.tap_gain(0, 0, 0.01));
    }
    std::sort(r.begin(), r.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
        const double f = 1.0 - std::exp(-r[i] * r[i]);
        ks = std::max({ks, std::abs(f - static_cast<double>(i) / n), std::abs(f - static_cast<double>(i + 1) / n)});
    }
    CHECK(ks < 0.01);
}

TEST_CASE("evolve: mean tap power matches the profile")
{
    const TdlProfile p = tdl_profile_load("TDL-B", 272e-9, tdl_dir);
    std::vector<double> acc(p.tap_powers.size(), 0.0);
    const std::size_t seeds = 20'000;
    for (std::size_t seed = 0; seed < seeds; ++seed)
    {
        const TdlChannelState s(p, 1, 1, 3.84e6, 20.0, seed);
        for (std::size_t l = 0; l < acc.size(); ++l)
            acc[l] += std::norm(s.tap_gain(0, l, 0.5));
    }
    for (std::size_t l = 0; l < acc.size(); ++l)
        CHECK(std::abs(acc[l] / static_cast<double>(seeds) / p.tap_powers[l] - 1.0) < 0.03);
}

TEST_CASE("apply_channel: direct convolution examples")
{
    std::mt19937_64 rng(31);
    const CVector x = random_vector(rng, 32);

    ChannelRealization id{1, 1, {CVector{1.0}}, 0.0};
    CHECK(apply_channel({x}, id, 1)[0] == x);

    ChannelRealization two{1, 1, {CVector{1.0, 0.5}}, 0.0};
    const CVector y = apply_channel({x}, two, 2)[0];
    CHECK(y[0] == x[0]);
    for (std::size_t n = 1; n < 32; ++n)
        CHECK(std::abs(y[n] - (x[n] + 0.5 * x[n - 1])) < 1e-15);

    CHECK_THROWS_AS(apply_channel({x}, two, 1), ConfigError);
    CHECK_THROWS_AS(apply_channel({x, x}, two, 2), SizeError);
}

TEST_CASE("apply_channel: 2x2 static channel gives H^T X per subcarrier")
{
    std::mt19937_64 rng(32);
    const OfdmConfig ofdm{64, 30e3, 8};
    ChannelRealization real{2, 2, {}, 0.0};
    for (int pr = 0; pr < 4; ++pr)
        real.cir.push_back(random_vector(rng, 8));
    const ComplexMatrix x = random_matrix(rng, 2, 64); // antenna x subcarrier

    std::vector<CVector> tx;
    for (std::size_t m = 0; m < 2; ++m)
    {
        const CVector row(x.data().begin() + static_cast<std::ptrdiff_t>(m * 64),
                          x.data().begin() + static_cast<std::ptrdiff_t>((m + 1) * 64));
        tx.push_back(ofdm_modulate(row, ofdm));
    }
    const auto rx = apply_channel(tx, real, ofdm.cp_len);

    // H[k] from the DFT of each CIR, computed here without the library FFT.
    std::vector<CVector> hf;
    for (const auto &c : real.cir)
    {
        CVector pad(64);
        std::copy(c.begin(), c.end(), pad.begin());
        hf.push_back(direct_dft(pad, false));
    }
    const auto h_lib = real.frequency_response(64);
    for (std::size_t r = 0; r < 2; ++r)
    {
        const CVector y = ofdm_demodulate(rx[r], ofdm);
        for (std::size_t k = 0; k < 64; ++k)
        {
            const cplx ref = hf[real.pair(0, r)][k] * x(0, k) + hf[real.pair(1, r)][k] * x(1, k);
            CHECK(std::abs(y[k] - ref) <= 1e-9 * std::abs(ref));
            for (std::size_t m = 0; m < 2; ++m)
                CHECK(std::abs(h_lib[k](m, r) - hf[real.pair(m, r)][k]) < 1e-12);
        }
    }
}

TEST_CASE("apply_channel: received power equals transmit power")
{
    const TdlProfile p = tdl_profile_load("TDL-B", 272e-9, tdl_dir);
    std::mt19937_64 rng(33);
    std::normal_distribution<double> g(0.0, std::sqrt(0.5 / 2.0)); // 1/M_T per antenna
    double acc[2] = {0.0, 0.0};
    const std::size_t seeds = 5000, n = 256;
    for (std::size_t seed = 0; seed < seeds; ++seed)
    {
        const TdlChannelState s(p, 2, 2, 3.84e6, 5.0, seed);
        std::vector<CVector> tx(2, CVector(n));
        for (auto &v : tx)
            for (auto &z : v)
            {
                const double re = g(rng);
                z = cplx(re, g(rng));
            }
        const auto rx = apply_channel(tx, s.evolve(0.0), 6);
        for (std::size_t r = 0; r < 2; ++r)
            for (std::size_t i = 6; i < n; ++i)
                acc[r] += std::norm(rx[r][i]);
    }
    for (double a : acc)
        CHECK(std::abs(a / static_cast<double>(seeds * (n - 6)) - 1.0) < 0.02);
}

TEST_CASE("add_awgn: variance, vanishing noise and reproducibility")
{
    const LinkParams link{2, 1.0, 24.0 / 23.0, 1.0 / 128.0};
    const double n0 = noise_variance(6.0, link);
    CHECK(std::abs(n0 - (1.0 / 128.0) * (24.0 / 23.0) / 2.0 / std::pow(10.0, 0.6)) < 1e-18);

    std::mt19937_64 rng(41);
    const CVector zero(1'000'000);
    const CVector z = add_awgn(zero, 6.0, link, rng);
    double p = 0.0, re2 = 0.0;
    cplx pseudo = 0.0;
    for (const auto &v : z)
    {
        p += std::norm(v);
        re2 += v.real() * v.real();
        pseudo += v * v;
    }
    const double n = static_cast<double>(z.size());
    CHECK(std::abs(p / n / n0 - 1.0) < 0.01);
    CHECK(std::abs(re2 / n / (n0 / 2.0) - 1.0) < 0.01);
    CHECK(std::abs(pseudo) / n / n0 < 0.01);

    std::mt19937_64 rng2(42);
    const CVector x = random_vector(rng2, 100);
    std::mt19937_64 a(9), b(9);
    CHECK(add_awgn(x, 6.0, link, a) == add_awgn(x, 6.0, link, b));
    CHECK(max_abs_diff(add_awgn(x, 300.0, link, a), x) < 1e-12);
}

TEST_CASE("add_awgn: uncoded 4-QAM over OFDM matches Q(sqrt(2 Eb/N0)) at 6 dB")
{
    const OfdmConfig ofdm{64, 30e3, 0};
    const QamConstellation q(4);
    const LinkParams link{2, 1.0, 1.0, 1.0 / 64.0};
    std::mt19937_64 rng(51);
    std::size_t errors = 0, bits_total = 0;
    for (std::uint64_t blk = 0; blk < 8000; ++blk)
    {
        const auto bits = random_bits(128, 1'000'000 + blk);
        const CVector t = ofdm_modulate(qam_map(bits.bits, q), ofdm);
        const CVector y = ofdm_demodulate(add_awgn(t, 6.0, link, rng), ofdm);
        const Bits out = qam_demap_hard(y, q);
        for (std::size_t i = 0; i < out.size(); ++i)
            errors += out[i] != bits.bits[i];
        bits_total += out.size();
    }
    const double ber = static_cast<double>(errors) / static_cast<double>(bits_total);
    const double ref = q_function(std::sqrt(2.0 * db_to_linear(6.0)));
    CHECK(std::abs(ber / ref - 1.0) < 0.10);
}
