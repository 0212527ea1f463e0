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

// lspca_sim: command-line front end.
//
//   lspca_sim sweep      [--preset P] [--config F] [--seed S] [--workers N] [--out DIR]
//   lspca_sim complexity [--config F] [--out DIR]
//   lspca_sim presets    [--preset P]
//   lspca_sim pilots     [--preset P] [--config F] --out FILE
//
// Exit codes: 0 success, 2 configuration error, 3 numeric failure during the run.

#include "lspca/lspca.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace
{
    constexpr int exit_config = 2;
    constexpr int exit_numeric = 3;

    struct Options
    {
        std::string preset;
        std::string config;
        std::string out;
        std::optional<std::uint64_t> seed;
        std::optional<std::size_t> workers;
    };

    lspca::SimConfig resolve(const Options &o)
    {
        lspca::SimConfig cfg = o.preset.empty() ? lspca::make_preset("desk") : lspca::make_preset(o.preset);
        if (!o.config.empty())
        {
            cfg = lspca::load_config(o.config);
            // An explicit --preset wins over the file's own preset line only if the file has none.
            if (!o.preset.empty() && cfg.preset != o.preset)
                std::cerr << "note: --preset " << o.preset << " ignored, config file sets '" << cfg.preset << "'\n";
        }
        if (o.seed)
            cfg.seed = *o.seed;
        if (o.workers)
            cfg.workers = *o.workers;
        cfg.validate();
        return cfg;
    }

    void print_table(const std::vector<lspca::BerRecord> &records)
    {
        std::printf("%-12s %9s %8s %12s %10s %12s\n", "estimator", "fd_hz", "ebn0_db", "bits", "errors", "ber");
        for (const auto &r : records)
        {
            if (r.reference)
                std::printf("%-12s %9s %8.2f %12s %10s %12.4e\n", r.estimator.c_str(), "-", r.ebn0_db, "-", "-", r.ber);
            else
                std::printf("%-12s %9.2f %8.2f %12llu %10llu %12.4e%s\n", r.estimator.c_str(), r.doppler_hz, r.ebn0_db,
                            static_cast<unsigned long long>(r.bits_sent),
                            static_cast<unsigned long long>(r.bit_errors), r.ber, r.capped ? " (capped)" : "");
        }
    }

    int run_sweep_cmd(const Options &o)
    {
        const lspca::SimConfig cfg = resolve(o);
        const std::string out = o.out.empty() ? "results" : o.out;
        auto records = lspca::run_sweep(cfg, [](const std::string &msg) { std::cerr << msg << "\n"; });
        print_table(records);
        if (cfg.theory)
        {
            const auto ref = lspca::theoretical_overlay(cfg);
            records.insert(records.end(), ref.begin(), ref.end());
        }
        const lspca::ComplexityParams cp{cfg.k_subcarriers, cfg.resolved_trunc_len(), cfg.buffer_size, 3};
        lspca::emit_results(records, out, lspca::complexity_report(cfg.complexity_n, cp));
        lspca::detail::write_text(std::filesystem::path(out) / "config.toml", lspca::to_toml(cfg, false));
        std::cerr << "results written to " << out << "\n";
        return 0;
    }

    int run_complexity_cmd(const Options &o)
    {
        lspca::SimConfig cfg = o.config.empty() ? lspca::make_preset("paper") : lspca::load_config(o.config);
        // The paper-scale table: K = 1024 subcarriers unless the config says otherwise.
        const lspca::ComplexityParams cp{cfg.k_subcarriers, cfg.resolved_trunc_len(), cfg.buffer_size, 3};
        const auto rows = lspca::complexity_report(cfg.complexity_n, cp);
        std::printf("%6s %14s %14s %16s %16s %10s %10s\n", "N", "mmse_mults", "mmse_x_K", "lspca_pca_mults",
                    "lspca_total", "N^3", "N^2");
        for (const auto &r : rows)
            std::printf("%6zu %14llu %14llu %16llu %16llu %10llu %10llu\n", r.n,
                        static_cast<unsigned long long>(r.mmse_per_subcarrier.real_mults),
                        static_cast<unsigned long long>(r.mmse_per_estimation.real_mults),
                        static_cast<unsigned long long>(r.lspca_pca_stage.real_mults),
                        static_cast<unsigned long long>(r.lspca_total.real_mults),
                        static_cast<unsigned long long>(r.lead_cubic),
                        static_cast<unsigned long long>(r.lead_quadratic));
        if (!o.out.empty())
        {
            std::filesystem::create_directories(o.out);
            lspca::detail::write_text(std::filesystem::path(o.out) / "complexity.csv", lspca::complexity_csv(rows));
        }
        return 0;
    }

    int run_presets_cmd(const Options &o)
    {
        if (!o.preset.empty())
        {
            std::cout << lspca::to_toml(lspca::make_preset(o.preset));
            return 0;
        }
        for (const auto &p : lspca::preset_list())
            std::printf("%-10s %s\n", p.name.c_str(), p.description.c_str());
        return 0;
    }

    int run_pilots_cmd(const Options &o)
    {
        const lspca::SimConfig cfg = resolve(o);
        if (o.out.empty())
            throw lspca::ConfigError("pilots: --out FILE is required");
        const auto zc = lspca::zc_generate(lspca::default_zc_config(cfg.k_subcarriers));
        const auto blk = lspca::build_pilot_block(zc, cfg.m_t, cfg.resolved_pilot_slots(), cfg.k_subcarriers,
                                                  1.0 / std::sqrt(static_cast<double>(cfg.m_t)));
        lspca::write_pilot_fixture(blk, std::filesystem::path(o.out));
        return 0;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"MIMO-OFDM BER simulator comparing LS, MMSE and LSPCA channel estimation"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App *sub) {
        sub->add_option("--preset", o.preset, "named preset (see 'presets')");
        sub->add_option("--config", o.config, "TOML-style key = value file");
        sub->add_option("--out", o.out, "output directory (file for 'pilots')");
    };
    auto *sweep = app.add_subcommand("sweep", "run the Monte-Carlo BER sweep and write CSVs");
    add_common(sweep);
    sweep->add_option("--seed", o.seed, "master seed");
    sweep->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
    auto *complexity = app.add_subcommand("complexity", "print the operation-count table");
    complexity->add_option("--config", o.config, "config file (K, L, buffer size, antenna list)");
    complexity->add_option("--out", o.out, "directory for complexity.csv");
    auto *presets = app.add_subcommand("presets", "list presets, or dump one as a config file");
    presets->add_option("--preset", o.preset, "preset to dump");
    auto *pilots = app.add_subcommand("pilots", "write the CSIRS pilot fixture for a config");
    add_common(pilots);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_config;
    }

    try
    {
        if (*sweep)
            return run_sweep_cmd(o);
        if (*complexity)
            return run_complexity_cmd(o);
        if (*presets)
            return run_presets_cmd(o);
        if (*pilots)
            return run_pilots_cmd(o);
    }
    catch (const lspca::ConfigError &e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    }
    catch (const lspca::NumericError &e)
    {
        std::cerr << "numeric error: " << e.what() << "\n";
        return exit_numeric;
    }
    catch (const std::invalid_argument &e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return exit_numeric;
    }
    return 0;
}
