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

#ifndef LSPCA_HARNESS_HPP
#define LSPCA_HARNESS_HPP

// Monte-Carlo BER sweep, complexity table and result files.
//
// A trial is one independent channel instance: `warmup` pilot-only frames that fill the
// estimator histories, then `frames_per_trial` measured frames of one CSIRS block followed by
// data_blocks_per_pilot data blocks. The channel is frozen over each block and evaluated at the
// block's start time. Every (estimator, Eb/N0) pair of a trial sees the same bits, fading and
// unit-variance noise; only the noise scale changes. Trial seeds depend on (seed, Doppler index,
// trial index) alone, and trials run in fixed-size batches with the stop rule applied between
// batches, so results do not depend on the worker count.

#include "config.hpp"
#include "estimation.hpp"

#include <atomic>
#include <bit>
#include <chrono>
#include <cstdio>
#include <deque>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <thread>

namespace lspca
{
    struct BerRecord
    {
        std::string estimator;
        double doppler_hz = 0.0;
        double ebn0_db = 0.0;
        std::uint64_t bits_sent = 0;
        std::uint64_t bit_errors = 0;
        double ber = 0.0;
        bool capped = false;     // stopped by max_bits before reaching min_bit_errors
        bool reference = false;  // theoretical curve, no simulation behind it
        double elapsed_seconds = 0.0;
        OpCount op_count;        // summed over all measured estimations
        std::uint64_t estimations = 0;
    };

    namespace detail
    {
        inline std::uint64_t splitmix64(std::uint64_t x)
        {
            x += 0x9e3779b97f4a7c15ull;
            x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
            x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
            return x ^ (x >> 31);
        }

        inline std::uint64_t trial_seed(std::uint64_t master, std::size_t doppler_index, std::uint64_t trial)
        {
            std::uint64_t h = splitmix64(master);
            h = splitmix64(h ^ (0x1000003ull * (doppler_index + 1)));
            return splitmix64(h ^ trial);
        }

        struct Tally
        {
            std::uint64_t bits = 0;
            std::uint64_t errors = 0;
            OpCount ops;
            std::uint64_t estimations = 0;

            Tally &operator+=(const Tally &o)
            {
                bits += o.bits;
                errors += o.errors;
                ops += o.ops;
                estimations += o.estimations;
                return *this;
            }
        };

        // Frequency-domain view of one block at the receiver: noiseless part and the spectrum of
        // unit-variance time-domain noise, both K matrices of M_R x slots.
        struct BlockObservation
        {
            std::vector<ComplexMatrix> clean;
            std::vector<ComplexMatrix> noise;

            std::vector<ComplexMatrix> at(double sd) const
            {
                std::vector<ComplexMatrix> y;
                y.reserve(clean.size());
                for (std::size_t k = 0; k < clean.size(); ++k)
                    y.push_back(sd == 0.0 ? clean[k] : clean[k] + noise[k].scaled(sd));
                return y;
            }
        };

        // x: K matrices of M_T x slots (already scaled by the transmit amplitude).
        inline BlockObservation transmit_block(const std::vector<ComplexMatrix> &x, const ChannelRealization &ch,
                                               const OfdmConfig &ofdm, std::mt19937_64 &noise_rng)
        {
            const std::size_t k = ofdm.k_subcarriers, m_t = ch.m_t, m_r = ch.m_r, slots = x.front().cols();
            BlockObservation obs{std::vector<ComplexMatrix>(k, ComplexMatrix(m_r, slots)),
                                 std::vector<ComplexMatrix>(k, ComplexMatrix(m_r, slots))};
            std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
            CVector freq(k), w(ofdm.block_length());
            std::vector<CVector> tx(m_t);
            for (std::size_t t = 0; t < slots; ++t)
            {
                for (std::size_t m = 0; m < m_t; ++m)
                {
                    for (std::size_t sc = 0; sc < k; ++sc)
                        freq[sc] = x[sc](m, t);
                    tx[m] = ofdm_modulate(freq, ofdm);
                }
                const auto rx = apply_channel(tx, ch, ofdm.cp_len);
                for (std::size_t r = 0; r < m_r; ++r)
                {
                    const CVector y = ofdm_demodulate(rx[r], ofdm);
                    for (auto &z : w)
                    {
                        const double re = gauss(noise_rng);
                        z = cplx(re, gauss(noise_rng));
                    }
                    const CVector n = ofdm_demodulate(w, ofdm);
                    for (std::size_t sc = 0; sc < k; ++sc)
                    {
                        obs.clean[sc](r, t) = y[sc];
                        obs.noise[sc](r, t) = n[sc];
                    }
                }
            }
            return obs;
        }

        // Everything a trial needs, fixed for the whole sweep.
        struct SweepContext
        {
            SimConfig cfg;
            StbcCode code;
            QamConstellation qam{4};
            OfdmConfig ofdm;
            TdlProfile profile;
            PilotBlock pilot;
            std::vector<EstimatorSpec> estimators;
            std::size_t trunc_len = 0;
            std::size_t warmup = 0;
            double tx_amplitude = 1.0;
            LinkParams link;
            std::vector<double> noise_sd; // per Eb/N0 point, time-domain
            double pilot_duration = 0.0;
            double data_duration = 0.0;
        };

        inline SweepContext make_context(const SimConfig &cfg)
        {
            cfg.validate();
            SweepContext ctx;
            ctx.cfg = cfg;
            ctx.code = cfg.code();
            ctx.qam = QamConstellation(cfg.qam_order);
            ctx.profile = cfg.profile();
            ctx.ofdm = OfdmConfig{cfg.k_subcarriers, cfg.delta_f, cfg.resolved_cp_len()};
            ctx.ofdm.validate();
            ctx.estimators = cfg.estimator_specs();
            ctx.trunc_len = cfg.resolved_trunc_len();
            ctx.warmup = cfg.resolved_warmup();
            ctx.tx_amplitude = 1.0 / std::sqrt(static_cast<double>(cfg.m_t));
            const auto zc = zc_generate(default_zc_config(cfg.k_subcarriers));
            ctx.pilot = build_pilot_block(zc, cfg.m_t, cfg.resolved_pilot_slots(), cfg.k_subcarriers, ctx.tx_amplitude);
            // Received energy per subcarrier and slot is 1 per RX antenna, 1/K per time sample.
            ctx.link = LinkParams{ctx.qam.bits_per_symbol(), ctx.code.rate(), cfg.pilot_overhead(),
                                  1.0 / static_cast<double>(cfg.k_subcarriers)};
            for (double e : cfg.ebn0_db)
                ctx.noise_sd.push_back(std::sqrt(noise_variance(e, ctx.link)));
            ctx.pilot_duration = static_cast<double>(ctx.pilot.p) * ctx.ofdm.symbol_duration();
            ctx.data_duration = static_cast<double>(ctx.code.p) * ctx.ofdm.symbol_duration();
            return ctx;
        }

        // Per (estimator, Eb/N0) estimator memory inside one trial.
        struct EstimatorState
        {
            std::optional<CirBuffer> buffer;
            std::deque<ReceivedPilots> history;
            ChannelEstimate current;
        };

        // Runs one trial for the `active` (estimator, Eb/N0) slots; slot = e * n_ebn0 + j.
        inline std::vector<Tally> run_trial(const SweepContext &ctx, std::size_t doppler_index, std::uint64_t trial,
                                            const std::vector<bool> &active)
        {
            const SimConfig &cfg = ctx.cfg;
            const std::size_t n_ebn0 = cfg.ebn0_db.size();
            const std::size_t k = cfg.k_subcarriers;
            const std::uint64_t seed = trial_seed(cfg.seed, doppler_index, trial);

            TdlChannelState channel(ctx.profile, cfg.m_t, cfg.m_r, ctx.ofdm.sample_rate(), cfg.doppler_hz[doppler_index],
                                    splitmix64(seed ^ 1), cfg.fading, cfg.sinusoids);
            std::mt19937_64 noise_rng(splitmix64(seed ^ 2));
            std::mt19937_64 data_rng(splitmix64(seed ^ 3));

            std::vector<Tally> out(active.size());
            std::vector<EstimatorState> state(active.size());
            const std::size_t pairs = cfg.m_t * cfg.m_r;
            for (std::size_t e = 0; e < ctx.estimators.size(); ++e)
                if (ctx.estimators[e].kind == EstimatorKind::lspca)
                    for (std::size_t j = 0; j < n_ebn0; ++j)
                        state[e * n_ebn0 + j].buffer.emplace(pairs, ctx.trunc_len, cfg.buffer_size);

            const double frame_duration =
                ctx.pilot_duration + static_cast<double>(cfg.data_blocks_per_pilot) * ctx.data_duration;
            const std::size_t frames = ctx.warmup + cfg.frames_per_trial;
            const SmoothingParams smoothing{ctx.trunc_len};
            const MmseParams mmse{ctx.pilot.sigma_x_sq, 1.0, cfg.mmse_blocks};

            std::vector<unsigned> labels(k * ctx.code.q);
            std::vector<ComplexMatrix> x_data(k);

            for (std::size_t f = 0; f < frames; ++f)
            {
                const bool measured = f >= ctx.warmup;
                const double t0 = static_cast<double>(f) * frame_duration;

                // CSIRS block and estimation.
                const BlockObservation pilot_obs =
                    transmit_block(ctx.pilot.symbols, channel.evolve(t0), ctx.ofdm, noise_rng);
                for (std::size_t e = 0; e < ctx.estimators.size(); ++e)
                {
                    const EstimatorSpec &spec = ctx.estimators[e];
                    if (spec.kind == EstimatorKind::genie)
                        continue;
                    for (std::size_t j = 0; j < n_ebn0; ++j)
                    {
                        const std::size_t slot = e * n_ebn0 + j;
                        if (!active[slot])
                            continue;
                        EstimatorState &st = state[slot];
                        ReceivedPilots y = pilot_obs.at(ctx.noise_sd[j]);
                        OpCount ops;
                        switch (spec.kind)
                        {
                        case EstimatorKind::ls:
                            st.current = estimate_ls(ctx.pilot, y, &ops);
                            break;
                        case EstimatorKind::ls_smooth:
                            st.current = smooth_filter(estimate_ls(ctx.pilot, y, &ops), smoothing, &ops);
                            break;
                        case EstimatorKind::mmse:
                            st.history.push_back(std::move(y));
                            while (st.history.size() > cfg.mmse_blocks)
                                st.history.pop_front();
                            if (measured)
                            {
                                std::vector<ReceivedPilots> hist(st.history.begin(), st.history.end());
                                st.current = estimate_mmse(ctx.pilot, std::span<const ReceivedPilots>(hist), mmse, &ops);
                                if (cfg.mmse_smoothing)
                                    st.current = smooth_filter(st.current, smoothing, &ops);
                            }
                            break;
                        case EstimatorKind::lspca:
                        {
                            const std::size_t lam =
                                measured ? spec.lambda_max : std::min(spec.lambda_max, st.buffer->size() + 1);
                            st.current = estimate_lspca(ctx.pilot, y, *st.buffer, smoothing, lam, &ops);
                            break;
                        }
                        case EstimatorKind::genie:
                            break;
                        }
                        if (measured)
                        {
                            out[slot].ops += ops;
                            ++out[slot].estimations;
                        }
                    }
                }
                if (!measured)
                    continue;

                // Data blocks.
                for (std::size_t b = 0; b < cfg.data_blocks_per_pilot; ++b)
                {
                    const double t = t0 + ctx.pilot_duration + static_cast<double>(b) * ctx.data_duration;
                    const ChannelRealization real = channel.evolve(t);
                    std::uniform_int_distribution<unsigned> pick(0, ctx.qam.order() - 1);
                    CVector syms(ctx.code.q);
                    for (std::size_t sc = 0; sc < k; ++sc)
                    {
                        for (std::size_t i = 0; i < ctx.code.q; ++i)
                        {
                            labels[sc * ctx.code.q + i] = pick(data_rng);
                            syms[i] = ctx.qam.point(labels[sc * ctx.code.q + i]);
                        }
                        x_data[sc] = stbc_encode(syms, ctx.code).matrix.scaled(ctx.tx_amplitude);
                    }
                    const BlockObservation obs = transmit_block(x_data, real, ctx.ofdm, noise_rng);

                    std::vector<ComplexMatrix> truth;
                    for (std::size_t e = 0; e < ctx.estimators.size(); ++e)
                    {
                        if (ctx.estimators[e].kind == EstimatorKind::genie && truth.empty())
                            truth = real.frequency_response(k);
                        for (std::size_t j = 0; j < n_ebn0; ++j)
                        {
                            const std::size_t slot = e * n_ebn0 + j;
                            if (!active[slot])
                                continue;
                            const auto &h = ctx.estimators[e].kind == EstimatorKind::genie ? truth : state[slot].current.h;
                            const double sd = ctx.noise_sd[j];
                            std::uint64_t errors = 0;
                            for (std::size_t sc = 0; sc < k; ++sc)
                            {
                                const ComplexMatrix y =
                                    sd == 0.0 ? obs.clean[sc] : obs.clean[sc] + obs.noise[sc].scaled(sd);
                                const StbcDecision d = stbc_ml_decode(y, h[sc], ctx.code, ctx.qam, ctx.tx_amplitude);
                                for (std::size_t i = 0; i < ctx.code.q; ++i)
                                    errors += static_cast<std::uint64_t>(
                                        std::popcount(d.labels[i] ^ labels[sc * ctx.code.q + i]));
                            }
                            out[slot].errors += errors;
                            out[slot].bits += static_cast<std::uint64_t>(k * ctx.code.q * ctx.qam.bits_per_symbol());
                        }
                    }
                }
            }
            return out;
        }
    }

    using SweepLog = std::function<void(const std::string &)>;

    // Records come out ordered by estimator (config order), then Doppler, then Eb/N0.
    inline std::vector<BerRecord> run_sweep(const SimConfig &cfg, const SweepLog &log = nullptr)
    {
        const detail::SweepContext ctx = detail::make_context(cfg);
        const std::size_t n_est = ctx.estimators.size(), n_ebn0 = cfg.ebn0_db.size();
        const std::size_t n_slots = n_est * n_ebn0;

        std::vector<BerRecord> records(n_est * cfg.doppler_hz.size() * n_ebn0);
        for (std::size_t fi = 0; fi < cfg.doppler_hz.size(); ++fi)
        {
            const auto start = std::chrono::steady_clock::now();
            std::vector<detail::Tally> total(n_slots);
            std::vector<bool> active(n_slots, true);
            auto still_active = [&](std::size_t s) {
                return total[s].errors < cfg.min_bit_errors && total[s].bits < cfg.max_bits;
            };

            std::uint64_t next_trial = 0;
            while (std::any_of(active.begin(), active.end(), [](bool a) { return a; }))
            {
                const std::size_t batch = cfg.batch_trials;
                std::vector<std::vector<detail::Tally>> results(batch);
                std::atomic<std::size_t> cursor{0};
                std::exception_ptr failure;
                std::mutex failure_mutex;
                auto worker = [&] {
                    for (std::size_t i = cursor++; i < batch; i = cursor++)
                    {
                        try
                        {
                            results[i] = detail::run_trial(ctx, fi, next_trial + i, active);
                        }
                        catch (...)
                        {
                            std::lock_guard lock(failure_mutex);
                            if (!failure)
                                failure = std::current_exception();
                        }
                    }
                };
                const std::size_t n_threads = std::min(cfg.workers, batch);
                if (n_threads <= 1)
                    worker();
                else
                {
                    std::vector<std::jthread> pool;
                    for (std::size_t w = 0; w < n_threads; ++w)
                        pool.emplace_back(worker);
                }
                if (failure)
                    std::rethrow_exception(failure);

                // Integer sums in trial order: independent of which thread ran what.
                for (const auto &r : results)
                    for (std::size_t s = 0; s < n_slots; ++s)
                        total[s] += r[s];
                next_trial += batch;
                // An Eb/N0 point stays open for every estimator until all of them meet the stop
                // rule, so estimators at one point are always compared on the same trials.
                for (std::size_t j = 0; j < n_ebn0; ++j)
                {
                    bool open = false;
                    for (std::size_t e = 0; e < n_est; ++e)
                        open = open || (active[e * n_ebn0 + j] && still_active(e * n_ebn0 + j));
                    for (std::size_t e = 0; e < n_est; ++e)
                        active[e * n_ebn0 + j] = open;
                }
            }

            const double elapsed =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            for (std::size_t e = 0; e < n_est; ++e)
                for (std::size_t j = 0; j < n_ebn0; ++j)
                {
                    const auto &t = total[e * n_ebn0 + j];
                    BerRecord &r = records[(e * cfg.doppler_hz.size() + fi) * n_ebn0 + j];
                    r.estimator = ctx.estimators[e].tag();
                    r.doppler_hz = cfg.doppler_hz[fi];
                    r.ebn0_db = cfg.ebn0_db[j];
                    r.bits_sent = t.bits;
                    r.bit_errors = t.errors;
                    r.ber = t.bits ? static_cast<double>(t.errors) / static_cast<double>(t.bits) : 0.0;
                    r.capped = t.errors < cfg.min_bit_errors;
                    r.elapsed_seconds = elapsed;
                    r.op_count = t.ops;
                    r.estimations = t.estimations;
                }
            if (log)
            {
                char buf[160];
                std::snprintf(buf, sizeof buf, "doppler %g Hz: %llu trials, %.1f s", cfg.doppler_hz[fi],
                              static_cast<unsigned long long>(next_trial), elapsed);
                log(buf);
            }
        }
        return records;
    }

    // Per-branch Eb/N0 seen by each of the D i.i.d. branches: transmit power is split over M_T
    // antennas, and pilot energy (when charged to Eb) is not available to data.
    inline std::vector<BerRecord> theoretical_overlay(const SimConfig &cfg)
    {
        const unsigned d = cfg.resolved_diversity();
        const double offset_db = -10.0 * std::log10(static_cast<double>(cfg.m_t)) -
                                 10.0 * std::log10(cfg.pilot_overhead());
        std::vector<BerRecord> out;
        for (double e : cfg.ebn0_db)
        {
            BerRecord r;
            r.estimator = "theory_D" + std::to_string(d);
            r.ebn0_db = e;
            r.ber = std::isinf(e) ? 0.0 : theoretical_ber_diversity(e + offset_db, d, cfg.qam_order);
            r.reference = true;
            out.push_back(r);
        }
        return out;
    }

    struct ComplexityRow
    {
        std::size_t n = 0; // M_T = M_R = N, pilot length P = N
        OpCount mmse_per_subcarrier;
        OpCount mmse_per_estimation;  // x K subcarriers
        OpCount ls_stage;             // K pilot correlations, shared by LS-based estimators
        OpCount lspca_pca_stage;      // per pair: IFFT, SVD of L x I, rank-lambda column, FFT
        OpCount lspca_total;          // ls_stage + lspca_pca_stage
        std::uint64_t lead_cubic = 0; // N^3
        std::uint64_t lead_quadratic = 0; // N^2
    };

    struct ComplexityParams
    {
        std::size_t k = 1024;
        std::size_t l = 64;
        std::size_t buffer = 20;
        std::size_t lambda_max = 3;
    };

    inline std::vector<ComplexityRow> complexity_report(const std::vector<std::size_t> &antennas,
                                                        const ComplexityParams &p = {})
    {
        std::vector<ComplexityRow> rows;
        for (std::size_t n : antennas)
        {
            ComplexityRow r;
            r.n = n;
            const std::uint64_t nn = n, k = p.k;
            // X X^H, X^* Y^T, one N x N inversion, inverse times the correlation.
            r.mmse_per_subcarrier =
                matmul_cost(nn, nn, nn) + matmul_cost(nn, nn, nn) + inversion_cost(nn) + matmul_cost(nn, nn, nn);
            r.mmse_per_estimation = r.mmse_per_subcarrier * k;
            r.ls_stage = matmul_cost(nn, nn, nn) * k;
            const OpCount per_pair = fft_cost(k) + fft_cost(k) + svd_cost(p.l, p.buffer) + matmul_cost(p.l, p.lambda_max, 1);
            r.lspca_pca_stage = per_pair * (nn * nn);
            r.lspca_total = r.ls_stage + r.lspca_pca_stage;
            r.lead_cubic = nn * nn * nn;
            r.lead_quadratic = nn * nn;
            rows.push_back(r);
        }
        return rows;
    }

    namespace detail
    {
        inline std::string fmt_num(double d)
        {
            if (std::isinf(d))
                return d > 0 ? "inf" : "-inf";
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.6g", d);
            return buf;
        }

        inline std::string fmt_ber(double d)
        {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.9e", d);
            return buf;
        }

        inline std::string fmt_u(std::uint64_t u) { return std::to_string(u); }

        inline void write_text(const std::filesystem::path &path, const std::string &text)
        {
            std::ofstream os(path, std::ios::binary);
            if (!os)
                throw ConfigError("cannot open " + path.string() + " for writing");
            os << text;
            os.close();
            if (!os)
                throw ConfigError("write failed: " + path.string());
        }

        inline std::string per_estimation(std::uint64_t total, std::uint64_t n)
        {
            return n ? fmt_u(total / n) : "0";
        }
    }

    inline constexpr const char *ber_vs_ebn0_header =
        "kind,estimator,doppler_hz,ebn0_db,bits_sent,bit_errors,ber,capped,real_mults_per_estimate,"
        "real_adds_per_estimate";
    inline constexpr const char *ber_vs_doppler_header = "ebn0_db,estimator,doppler_hz,bits_sent,bit_errors,ber,capped";
    inline constexpr const char *complexity_header =
        "n,mmse_subcarrier_mults,mmse_subcarrier_adds,mmse_estimate_mults,ls_stage_mults,lspca_pca_stage_mults,"
        "lspca_pca_stage_adds,lspca_total_mults,lead_cubic,lead_quadratic";

    inline std::string complexity_csv(const std::vector<ComplexityRow> &rows)
    {
        using detail::fmt_u;
        std::string s = std::string(complexity_header) + "\n";
        for (const auto &r : rows)
            s += fmt_u(r.n) + "," + fmt_u(r.mmse_per_subcarrier.real_mults) + "," +
                 fmt_u(r.mmse_per_subcarrier.real_adds) + "," + fmt_u(r.mmse_per_estimation.real_mults) + "," +
                 fmt_u(r.ls_stage.real_mults) + "," + fmt_u(r.lspca_pca_stage.real_mults) + "," +
                 fmt_u(r.lspca_pca_stage.real_adds) + "," + fmt_u(r.lspca_total.real_mults) + "," +
                 fmt_u(r.lead_cubic) + "," + fmt_u(r.lead_quadratic) + "\n";
        return s;
    }

    // Writes ber_vs_ebn0.csv, ber_vs_doppler.csv, complexity.csv and plot.gp into `dir`.
    // Reference (theory) records only appear in ber_vs_ebn0.csv. Elapsed time is not written, so
    // identical records give identical files.
    inline void emit_results(const std::vector<BerRecord> &records, const std::filesystem::path &dir,
                             const std::vector<ComplexityRow> &complexity = {})
    {
        using namespace detail;
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec)
            throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());

        std::string ebn0 = std::string(ber_vs_ebn0_header) + "\n";
        for (const auto &r : records)
        {
            if (r.reference)
                ebn0 += "theory," + r.estimator + ",," + fmt_num(r.ebn0_db) + ",0,0," + fmt_ber(r.ber) + ",0,0,0\n";
            else
                ebn0 += "sim," + r.estimator + "," + fmt_num(r.doppler_hz) + "," + fmt_num(r.ebn0_db) + "," +
                        fmt_u(r.bits_sent) + "," + fmt_u(r.bit_errors) + "," + fmt_ber(r.ber) + "," +
                        (r.capped ? "1" : "0") + "," + per_estimation(r.op_count.real_mults, r.estimations) + "," +
                        per_estimation(r.op_count.real_adds, r.estimations) + "\n";
        }
        write_text(dir / "ber_vs_ebn0.csv", ebn0);

        std::vector<const BerRecord *> sims;
        for (const auto &r : records)
            if (!r.reference)
                sims.push_back(&r);
        std::stable_sort(sims.begin(), sims.end(),
                         [](const BerRecord *a, const BerRecord *b) { return a->ebn0_db < b->ebn0_db; });
        std::string dop = std::string(ber_vs_doppler_header) + "\n";
        for (const auto *r : sims)
            dop += fmt_num(r->ebn0_db) + "," + r->estimator + "," + fmt_num(r->doppler_hz) + "," + fmt_u(r->bits_sent) +
                   "," + fmt_u(r->bit_errors) + "," + fmt_ber(r->ber) + "," + (r->capped ? "1" : "0") + "\n";
        write_text(dir / "ber_vs_doppler.csv", dop);

        write_text(dir / "complexity.csv", complexity_csv(complexity));

        // gnuplot script: one curve per (estimator, Doppler) plus reference curves.
        std::vector<std::pair<std::string, double>> curves;
        std::vector<std::string> refs;
        for (const auto &r : records)
        {
            if (r.reference)
            {
                if (std::find(refs.begin(), refs.end(), r.estimator) == refs.end())
                    refs.push_back(r.estimator);
                continue;
            }
            const std::pair<std::string, double> key{r.estimator, r.doppler_hz};
            if (std::find(curves.begin(), curves.end(), key) == curves.end())
                curves.push_back(key);
        }
        std::string gp = "# gnuplot -persist plot.gp\n"
                         "set datafile separator ','\n"
                         "set logscale y\n"
                         "set format y '10^{%L}'\n"
                         "set grid\n"
                         "set key outside right\n"
                         "set xlabel 'Eb/N0 (dB)'\n"
                         "set ylabel 'BER'\n";
        std::vector<std::string> terms;
        for (const auto &[est, fd] : curves)
            terms.push_back("'ber_vs_ebn0.csv' using 4:((strcol(2) eq '" + est + "' && $3 == " + fmt_num(fd) +
                            " && $6 > 0) ? $7 : 1/0) with linespoints title '" + est + " " + fmt_num(fd) + " Hz'");
        for (const auto &ref : refs)
            terms.push_back("'ber_vs_ebn0.csv' using 4:(strcol(2) eq '" + ref + "' ? $7 : 1/0) with lines dt 2 title '" +
                            ref + "'");
        if (terms.empty())
            gp += "# no BER records\n";
        else
        {
            gp += "plot ";
            for (std::size_t i = 0; i < terms.size(); ++i)
                gp += (i ? ", \\\n     " : "") + terms[i];
            gp += "\n";
        }
        if (!complexity.empty())
            gp += "pause -1\n"
                  "unset format y\n"
                  "set logscale x 2\n"
                  "set xlabel 'antennas N'\n"
                  "set ylabel 'real multiplications'\n"
                  "plot 'complexity.csv' using 1:2 every ::1 with linespoints title 'MMSE per subcarrier', \\\n"
                  "     'complexity.csv' using 1:6 every ::1 with linespoints title 'LSPCA PCA stage', \\\n"
                  "     'complexity.csv' using 1:9 every ::1 with lines dt 2 title 'N^3', \\\n"
                  "     'complexity.csv' using 1:10 every ::1 with lines dt 2 title 'N^2'\n";
        write_text(dir / "plot.gp", gp);
    }

    // BER at which `curve` crosses `target` by log-linear interpolation in Eb/N0; nullopt if the
    // curve never brackets it. Records must share estimator and Doppler and be sorted by Eb/N0.
    inline std::optional<double> ebn0_at_ber(const std::vector<BerRecord> &curve, double target)
    {
        for (std::size_t i = 0; i + 1 < curve.size(); ++i)
        {
            const double b0 = curve[i].ber, b1 = curve[i + 1].ber;
            if (b0 >= target && b1 <= target && b0 > 0.0 && b1 > 0.0)
            {
                if (b0 == b1)
                    return curve[i].ebn0_db;
                const double f = (std::log10(b0) - std::log10(target)) / (std::log10(b0) - std::log10(b1));
                return curve[i].ebn0_db + f * (curve[i + 1].ebn0_db - curve[i].ebn0_db);
            }
        }
        return std::nullopt;
    }

    inline std::vector<BerRecord> select_curve(const std::vector<BerRecord> &records, const std::string &estimator,
                                               double doppler_hz)
    {
        std::vector<BerRecord> out;
        for (const auto &r : records)
            if (r.estimator == estimator && (r.reference || r.doppler_hz == doppler_hz))
                out.push_back(r);
        std::stable_sort(out.begin(), out.end(),
                         [](const BerRecord &a, const BerRecord &b) { return a.ebn0_db < b.ebn0_db; });
        return out;
    }
}

#endif
