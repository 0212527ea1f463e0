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

// Usage sample: run the four estimators on a 2x2 TDL-B link at 10 dB and print their mean
// squared error against the true channel. Pilot blocks are 24 OFDM blocks apart, as in a sweep.
//
//   ./demo_estimators [doppler_hz] [ebn0_db]

#include <lspca/lspca.hpp>

#include <cstdio>
#include <cstdlib>
#include <deque>

using namespace lspca;

int main(int argc, char **argv)
{
    const double fd = argc > 1 ? std::atof(argv[1]) : 10.0;
    const double ebn0 = argc > 2 ? std::atof(argv[2]) : 10.0;

    SimConfig cfg = make_preset("desk");
    cfg.validate();
    const std::size_t k = cfg.k_subcarriers, l = cfg.resolved_trunc_len();
    const OfdmConfig ofdm{k, cfg.delta_f, cfg.resolved_cp_len()};
    const double amp = 1.0 / std::sqrt(2.0);
    const PilotBlock pilot = build_pilot_block(zc_generate(default_zc_config(k)), 2, 2, k, amp);
    const TdlChannelState channel(cfg.profile(), 2, 2, ofdm.sample_rate(), fd, 7);

    // Frequency-domain noise variance for this Eb/N0 (time-domain N0 times K).
    const LinkParams link{2, 1.0, cfg.pilot_overhead(), 1.0 / double(k)};
    const double n0 = noise_variance(ebn0, link) * double(k);
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g(0.0, std::sqrt(n0 / 2.0));

    CirBuffer buf3(4, l, cfg.buffer_size), buf5(4, l, cfg.buffer_size);
    std::deque<ReceivedPilots> history;
    const double spacing = 24.0 * double(ofdm.block_length()) * 2.0 / ofdm.sample_rate();
    double mse[5] = {0, 0, 0, 0, 0};
    OpCount ops[5];
    int measured = 0;

    for (int blk = 0; blk < 60; ++blk)
    {
        const auto h = channel.evolve(blk * spacing).frequency_response(k);
        ReceivedPilots y;
        for (std::size_t sc = 0; sc < k; ++sc)
        {
            ComplexMatrix yk = matmul(h[sc].transpose(), pilot.symbols[sc]);
            for (auto &z : yk.data())
            {
                const double re = g(rng);
                z += cplx(re, g(rng));
            }
            y.push_back(std::move(yk));
        }
        history.push_back(y);
        if (history.size() > cfg.mmse_blocks)
            history.pop_front();

        OpCount c[5];
        const auto ls = estimate_ls(pilot, y, &c[0]);
        c[1] = c[0];
        const auto sm = smooth_filter(ls, {l}, &c[1]);
        const std::vector<ReceivedPilots> hist(history.begin(), history.end());
        const auto mm = smooth_filter(
            estimate_mmse(pilot, std::span<const ReceivedPilots>(hist), {pilot.sigma_x_sq, 1.0, cfg.mmse_blocks}, &c[2]),
            {l}, &c[2]);
        const auto p3 = estimate_lspca(pilot, y, buf3, {l}, std::min<std::size_t>(3, buf3.size() + 1), &c[3]);
        const auto p5 = estimate_lspca(pilot, y, buf5, {l}, std::min<std::size_t>(5, buf5.size() + 1), &c[4]);
        if (blk < 20)
            continue; // let the buffers fill
        const ChannelEstimate *e[5] = {&ls, &sm, &mm, &p3, &p5};
        for (int i = 0; i < 5; ++i)
        {
            mse[i] += estimate_mse(*e[i], h);
            ops[i] += c[i];
        }
        ++measured;
    }

    std::printf("2x2 TDL-B, K=%zu, L=%zu, fd=%g Hz, Eb/N0=%g dB, %d pilot blocks\n", k, l, fd, ebn0, measured);
    const char *names[5] = {"ls", "ls_smooth", "mmse+smooth", "lspca:3", "lspca:5"};
    for (int i = 0; i < 5; ++i)
        std::printf("  %-12s mse %.3e   real mults/estimate %llu\n", names[i], mse[i] / measured,
                    static_cast<unsigned long long>(ops[i].real_mults / static_cast<unsigned>(measured)));
    return 0;
}
