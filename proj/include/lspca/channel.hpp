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

#ifndef LSPCA_CHANNEL_HPP
#define LSPCA_CHANNEL_HPP

// Tapped-delay-line Rayleigh fading between every transmit/receive antenna pair, plus AWGN.
//
// Each tap of each pair is an independent sum-of-sinusoids (Jakes) process
//     g(t) = sqrt(p / N) sum_n exp(i (2 pi f_d cos(a_n) t + phi_n)),
//     a_n = (2 pi n + theta) / N,
// with theta and phi_n drawn once per process. The arrival angles are equally spaced with a
// random offset, which keeps the time autocorrelation of a single process close to
// J0(2 pi f_d tau). Tap delays are rounded to the nearest sample.

#include "numerics.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace lspca
{
    struct TdlProfile
    {
        std::string name;
        std::vector<double> tap_delays;    // seconds
        std::vector<double> tap_powers_db; // as listed
        std::vector<double> tap_powers;    // linear, normalised to sum 1

        double max_delay() const
        {
            double d = 0.0;
            for (double x : tap_delays)
                d = std::max(d, x);
            return d;
        }
    };

    inline TdlProfile make_tdl_profile(std::string name, std::span<const double> normalized_delays,
                                       std::span<const double> powers_db, double delay_spread)
    {
        if (normalized_delays.empty() || normalized_delays.size() != powers_db.size())
            throw ConfigError("TDL profile '" + name + "': delays and powers must be non-empty and equally long");
        if (!(delay_spread >= 0.0))
            throw ConfigError("TDL profile '" + name + "': negative delay spread");
        if (normalized_delays.front() != 0.0)
            throw ConfigError("TDL profile '" + name + "': first tap must have zero delay");
        TdlProfile p{std::move(name), {}, {powers_db.begin(), powers_db.end()}, {}};
        double total = 0.0;
        for (std::size_t i = 0; i < normalized_delays.size(); ++i)
        {
            if (!(normalized_delays[i] >= 0.0))
                throw ConfigError("TDL profile '" + p.name + "': negative delay");
            p.tap_delays.push_back(normalized_delays[i] * delay_spread);
            p.tap_powers.push_back(std::pow(10.0, powers_db[i] / 10.0));
            total += p.tap_powers.back();
        }
        for (double &x : p.tap_powers)
            x /= total;
        return p;
    }

    // Profile file: '#' comments, a "profile <name>" line, then "normalized_delay power_db" per tap.
    // `path` is either the file itself or a directory holding <name>.txt.
    inline TdlProfile tdl_profile_load(const std::string &name, double delay_spread, const std::filesystem::path &path)
    {
        const std::filesystem::path file = std::filesystem::is_directory(path) ? path / (name + ".txt") : path;
        std::ifstream in(file);
        if (!in)
            throw ConfigError("unknown TDL profile '" + name + "': cannot open " + file.string());

        std::string declared;
        std::vector<double> delays, powers;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line))
        {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos)
                line.erase(hash);
            std::istringstream ls(line);
            std::string first;
            if (!(ls >> first))
                continue;
            if (first == "profile")
            {
                if (!(ls >> declared))
                    throw ConfigError(file.string() + ":" + std::to_string(lineno) + ": missing profile name");
                continue;
            }
            double d = 0.0, pdb = 0.0;
            std::istringstream vs(line);
            std::string extra;
            if (!(vs >> d >> pdb) || (vs >> extra))
                throw ConfigError(file.string() + ":" + std::to_string(lineno) + ": expected 'normalized_delay power_db'");
            delays.push_back(d);
            powers.push_back(pdb);
        }
        if (declared.empty())
            throw ConfigError(file.string() + ": missing 'profile <name>' header");
        if (declared != name)
            throw ConfigError("unknown TDL profile '" + name + "': " + file.string() + " declares '" + declared + "'");
        return make_tdl_profile(declared, delays, powers, delay_spread);
    }

    // Per-pair CIRs frozen at one instant. Pair index = m_t_index * M_R + m_r_index.
    struct ChannelRealization
    {
        std::size_t m_t = 0;
        std::size_t m_r = 0;
        std::vector<CVector> cir;
        double time = 0.0;

        std::size_t pair(std::size_t tx, std::size_t rx) const { return tx * m_r + rx; }
        std::size_t length() const { return cir.empty() ? 0 : cir.front().size(); }

        // H[k] (M_T x M_R) with H[k](m, r) = DFT_K of the (m, r) CIR.
        std::vector<ComplexMatrix> frequency_response(std::size_t k) const
        {
            std::vector<ComplexMatrix> h(k, ComplexMatrix(m_t, m_r));
            CVector buf(k);
            for (std::size_t tx = 0; tx < m_t; ++tx)
                for (std::size_t rx = 0; rx < m_r; ++rx)
                {
                    std::fill(buf.begin(), buf.end(), cplx{});
                    const CVector &c = cir[pair(tx, rx)];
                    if (c.size() > k)
                        throw SizeError("frequency_response: CIR longer than the FFT size");
                    std::copy(c.begin(), c.end(), buf.begin());
                    fft_inplace(buf);
                    for (std::size_t sc = 0; sc < k; ++sc)
                        h[sc](tx, rx) = buf[sc];
                }
            return h;
        }
    };

    inline constexpr std::size_t default_sinusoids = 64;

    // Fading state for all antenna pairs. Single-owner mutable object.
    class TdlChannelState
    {
    public:
        TdlChannelState(TdlProfile profile, std::size_t m_t, std::size_t m_r, double sample_rate, double doppler_fd,
                        std::uint64_t rng_seed, bool fading = true, std::size_t sinusoids = default_sinusoids)
            : profile_(std::move(profile)), m_t_(m_t), m_r_(m_r), doppler_fd_(doppler_fd), rng_seed_(rng_seed),
              fading_(fading), sinusoids_(sinusoids)
        {
            if (m_t == 0 || m_r == 0)
                throw ParameterError("TdlChannelState: antenna counts must be positive");
            if (!(doppler_fd >= 0.0))
                throw ParameterError("TdlChannelState: Doppler must be non-negative");
            if (sinusoids == 0)
                throw ParameterError("TdlChannelState: need at least one sinusoid");

            const std::size_t taps = profile_.tap_powers.size();
            tap_sample_.resize(taps);
            length_ = 0;
            for (std::size_t l = 0; l < taps; ++l)
            {
                tap_sample_[l] = static_cast<std::size_t>(std::llround(profile_.tap_delays[l] * sample_rate));
                length_ = std::max(length_, tap_sample_[l] + 1);
            }

            std::mt19937_64 rng(rng_seed);
            std::uniform_real_distribution<double> uni(0.0, 2.0 * std::numbers::pi);
            const std::size_t n_proc = m_t * m_r * taps;
            omega_.resize(n_proc * sinusoids);
            phase_.resize(n_proc * sinusoids);
            for (std::size_t proc = 0; proc < n_proc; ++proc)
            {
                const double theta = uni(rng);
                for (std::size_t n = 0; n < sinusoids; ++n)
                {
                    const double alpha = (2.0 * std::numbers::pi * static_cast<double>(n) + theta) /
                                         static_cast<double>(sinusoids);
                    omega_[proc * sinusoids + n] = 2.0 * std::numbers::pi * doppler_fd * std::cos(alpha);
                    phase_[proc * sinusoids + n] = uni(rng);
                }
            }
        }

        std::size_t m_t() const { return m_t_; }
        std::size_t m_r() const { return m_r_; }
        double doppler_fd() const { return doppler_fd_; }
        std::uint64_t rng_seed() const { return rng_seed_; }
        const TdlProfile &profile() const { return profile_; }
        std::size_t cir_length() const { return length_; }
        std::size_t tap_count() const { return tap_sample_.size(); }

        // Complex gain of one tap of one pair at time t (seconds), including the tap power.
        cplx tap_gain(std::size_t pair, std::size_t tap, double t) const
        {
            const double amp = std::sqrt(profile_.tap_powers[tap]);
            if (!fading_)
                return amp;
            const std::size_t proc = pair * tap_sample_.size() + tap;
            cplx g = 0.0;
            for (std::size_t n = 0; n < sinusoids_; ++n)
                g += std::polar(1.0, omega_[proc * sinusoids_ + n] * t + phase_[proc * sinusoids_ + n]);
            return g * (amp / std::sqrt(static_cast<double>(sinusoids_)));
        }

        // Channel frozen at time t. Successive calls are expected with non-decreasing t.
        ChannelRealization evolve(double t) const
        {
            ChannelRealization r{m_t_, m_r_, std::vector<CVector>(m_t_ * m_r_, CVector(length_)), t};
            for (std::size_t pr = 0; pr < m_t_ * m_r_; ++pr)
                for (std::size_t l = 0; l < tap_sample_.size(); ++l)
                    r.cir[pr][tap_sample_[l]] += tap_gain(pr, l, t);
            return r;
        }

    private:
        TdlProfile profile_;
        std::size_t m_t_, m_r_;
        double doppler_fd_;
        std::uint64_t rng_seed_;
        bool fading_;
        std::size_t sinusoids_;
        std::vector<std::size_t> tap_sample_;
        std::size_t length_ = 1;
        std::vector<double> omega_;
        std::vector<double> phase_;
    };

    // Causal linear convolution of every TX stream with its pair CIR, summed per RX antenna.
    // Output streams have the input length; the tail beyond it belongs to the next block's CP.
    inline std::vector<CVector> apply_channel(const std::vector<CVector> &tx, const ChannelRealization &real,
                                              std::size_t cp_len)
    {
        if (tx.size() != real.m_t)
            throw SizeError("apply_channel: " + std::to_string(tx.size()) + " TX streams for " +
                            std::to_string(real.m_t) + " antennas");
        if (real.length() > cp_len)
            throw ConfigError("apply_channel: CIR of " + std::to_string(real.length()) +
                              " samples does not fit the cyclic prefix of " + std::to_string(cp_len));
        const std::size_t n = tx.empty() ? 0 : tx.front().size();
        std::vector<CVector> rx(real.m_r, CVector(n));
        for (std::size_t m = 0; m < real.m_t; ++m)
        {
            if (tx[m].size() != n)
                throw SizeError("apply_channel: TX streams differ in length");
            for (std::size_t r = 0; r < real.m_r; ++r)
            {
                const CVector &h = real.cir[real.pair(m, r)];
                CVector &y = rx[r];
                for (std::size_t d = 0; d < h.size(); ++d)
                {
                    const cplx hd = h[d];
                    if (hd == cplx{})
                        continue;
                    for (std::size_t i = d; i < n; ++i)
                        y[i] += hd * tx[m][i - d];
                }
            }
        }
        return rx;
    }

    // Energy accounting for Eb/N0.
    //   Eb = signal_energy * pilot_overhead / (bits_per_symbol * code_rate)
    //   N0 = Eb / 10^(EbN0/10)
    // signal_energy is the mean received energy per complex sample, code_rate the STBC rate in
    // symbols per slot, pilot_overhead the energy factor spent on CSIRS blocks (24/23 for one pilot
    // block per 23 data blocks, 1 when pilots are not charged).
    struct LinkParams
    {
        unsigned bits_per_symbol = 2;
        double code_rate = 1.0;
        double pilot_overhead = 1.0;
        double signal_energy = 1.0;
    };

    inline double noise_variance(double ebn0_db, const LinkParams &link)
    {
        const double eb = link.signal_energy * link.pilot_overhead / (link.bits_per_symbol * link.code_rate);
        return eb / std::pow(10.0, ebn0_db / 10.0);
    }

    // Adds circularly-symmetric complex Gaussian noise of variance N0 per sample.
    inline CVector add_awgn(std::span<const cplx> samples, double ebn0_db, const LinkParams &link, std::mt19937_64 &rng)
    {
        const double sd = std::sqrt(noise_variance(ebn0_db, link) / 2.0);
        std::normal_distribution<double> gauss(0.0, 1.0);
        CVector out(samples.begin(), samples.end());
        for (auto &z : out)
        {
            const double re = gauss(rng);
            const double im = gauss(rng);
            z += cplx(sd * re, sd * im);
        }
        return out;
    }
}

#endif
