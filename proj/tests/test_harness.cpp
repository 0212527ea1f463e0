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
#include <set>
#include <sstream>

using namespace lspca;
using namespace lspca_test;

namespace
{
    std::string slurp(const std::filesystem::path &p)
    {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    std::size_t lines(const std::string &s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

    std::filesystem::path scratch(const std::string &name)
    {
        const auto p = std::filesystem::temp_directory_path() / ("lspca_test_" + name);
        std::filesystem::remove_all(p);
        return p;
    }

    SimConfig parse(const std::string &text)
    {
        std::istringstream in(text);
        return parse_config(in);
    }

    // Small desk-shaped link for sweep tests.
    SimConfig small_desk()
    {
        SimConfig c = make_preset("desk");
        c.k_subcarriers = 64;
        c.doppler_hz = {10.0};
        c.ebn0_db = {4.0, 10.0};
        c.estimators = {"genie", "ls", "ls_smooth", "mmse", "lspca:3"};
        c.buffer_size = 8;
        c.min_bit_errors = 100;
        c.max_bits = 400'000;
        c.batch_trials = 4;
        return c;
    }

    // D = 1 Rayleigh BER by quadrature over the exponential SNR density.
    double rayleigh_quadrature(double gbar)
    {
        const std::size_t n = 200'000;
        const double upper = 60.0 * gbar, h = upper / double(n);
        auto f = [&](double x) { return q_function(std::sqrt(2.0 * x)) * std::exp(-x / gbar) / gbar; };
        double acc = f(0.0) + f(upper);
        for (std::size_t i = 1; i < n; ++i)
            acc += (i % 2 ? 4.0 : 2.0) * f(double(i) * h);
        return acc * h / 3.0;
    }
}

TEST_CASE("config: presets validate and round-trip through the text format")
{
    for (const auto &p : preset_list())
    {
        const SimConfig c = make_preset(p.name);
        CHECK_NOTHROW(c.validate());
        const SimConfig back = parse(to_toml(c));
        CHECK(to_toml(back) == to_toml(c));
    }
    CHECK_THROWS_AS(make_preset("nope"), ConfigError);
}

TEST_CASE("config: derived defaults")
{
    const SimConfig c = make_preset("desk");
    CHECK(c.resolved_cp_len() == 6);
    CHECK(c.resolved_trunc_len() == 6);
    CHECK(c.resolved_pilot_slots() == 2);
    CHECK(c.resolved_diversity() == 4);
    CHECK(c.resolved_warmup() == 19);
    CHECK(c.pilot_overhead() == 24.0 / 23.0);
    const SimConfig p = make_preset("paper");
    CHECK(p.resolved_pilot_slots() == 16);
    CHECK(p.resolved_diversity() == 64);
    CHECK(p.k_subcarriers == 1024);
}

TEST_CASE("config: parser accepts comments, lists, quotes and inf")
{
    const SimConfig c = parse("preset = \"awgn\"  # base\n"
                              "\n"
                              "ebn0_db = [1, 2.5, inf]\n"
                              "estimators = [\"genie\", \"lspca:2\"]\n"
                              "fading = true\n"
                              "warmup_frames = 3\n"
                              "seed = 99\n");
    CHECK(c.preset == "awgn");
    CHECK(c.m_t == 1);
    CHECK(c.ebn0_db.size() == 3);
    CHECK(std::isinf(c.ebn0_db[2]));
    CHECK(c.estimators == std::vector<std::string>{"genie", "lspca:2"});
    CHECK(c.fading);
    CHECK(c.warmup_frames == 3);
    CHECK(c.seed == 99);
}

TEST_CASE("config: malformed input is a ConfigError")
{
    CHECK_THROWS_AS(parse("[link]\nm_t = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse("m_t 2\n"), ConfigError);
    CHECK_THROWS_AS(parse("mt = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse("m_t = two\n"), ConfigError);
    CHECK_THROWS_AS(parse("m_t = -1\n"), ConfigError);
    CHECK_THROWS_AS(parse("fading = maybe\n"), ConfigError);
    CHECK_THROWS_AS(parse("ebn0_db = [1, 2\n"), ConfigError);
    CHECK_THROWS_AS(parse("seed = 1\npreset = \"desk\"\n"), ConfigError);
    CHECK_THROWS_AS(parse("preset = \"bogus\"\n"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/lspca.toml"), ConfigError);
}

TEST_CASE("config: invariant violations")
{
    auto bad = [](auto mutate) {
        SimConfig c = make_preset("desk");
        mutate(c);
        CHECK_THROWS_AS(c.validate(), ConfigError);
    };
    bad([](SimConfig &c) { c.m_t = 4; });
    bad([](SimConfig &c) { c.qam_order = 8; });
    bad([](SimConfig &c) { c.k_subcarriers = 100; });
    bad([](SimConfig &c) { c.doppler_hz.clear(); });
    bad([](SimConfig &c) { c.ebn0_db.clear(); });
    bad([](SimConfig &c) { c.estimators = {"kalman"}; });
    bad([](SimConfig &c) { c.estimators = {"lspca:0"}; });
    bad([](SimConfig &c) { c.estimators = {"lspca:7"}; });
    bad([](SimConfig &c) { c.min_bit_errors = 0; });
    bad([](SimConfig &c) { c.max_bits = 0; });
    bad([](SimConfig &c) { c.workers = 0; });
    bad([](SimConfig &c) { c.tdl_profile = "TDL-Q"; });
    bad([](SimConfig &c) { c.cp_len = 3; });
    bad([](SimConfig &c) { c.delay_spread_ns = 1e5; });
    bad([](SimConfig &c) { c.doppler_hz = {-1.0}; });
    bad([](SimConfig &c) {
        c.estimators = {"lspca:3"};
        c.warmup_frames = 0;
    });
    bad([](SimConfig &c) { c.pilot_slots = 1; });

    SimConfig c = make_preset("desk");
    c.trunc_len = 2;
    CHECK_THROWS_AS(run_sweep(c), ConfigError);
}

TEST_CASE("EstimatorSpec: parse and tag")
{
    CHECK(EstimatorSpec::parse("lspca:5").lambda_max == 5);
    CHECK(EstimatorSpec::parse("lspca:5").tag() == "lspca:5");
    CHECK(EstimatorSpec::parse("mmse").kind == EstimatorKind::mmse);
    CHECK_THROWS_AS(EstimatorSpec::parse("lspca:"), ConfigError);
    CHECK_THROWS_AS(EstimatorSpec::parse("lspca:3x"), ConfigError);
}

TEST_CASE("run_sweep: noiseless genie makes no errors and hits the bit cap")
{
    SimConfig c = make_preset("desk");
    c.k_subcarriers = 64;
    c.doppler_hz = {20.0};
    c.ebn0_db = {std::numeric_limits<double>::infinity()};
    c.estimators = {"genie"};
    c.max_bits = 50'000;
    const auto recs = run_sweep(c);
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].bit_errors == 0);
    CHECK(recs[0].ber == 0.0);
    CHECK(recs[0].capped);
    CHECK(recs[0].bits_sent >= c.max_bits);
}

TEST_CASE("run_sweep: 1x1 AWGN at 8 dB")
{
    SimConfig c = make_preset("awgn");
    c.ebn0_db = {8.0};
    const auto recs = run_sweep(c);
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].bit_errors >= 200);
    CHECK(std::abs(recs[0].ber / q_function(std::sqrt(2.0 * db_to_linear(8.0))) - 1.0) < 0.10);
}

TEST_CASE("run_sweep: record bookkeeping, ordering and sanity of the estimators")
{
    const SimConfig c = small_desk();
    const auto recs = run_sweep(c);
    REQUIRE(recs.size() == 5 * 2);
    const auto specs = c.estimator_specs();
    for (std::size_t e = 0; e < 5; ++e)
        for (std::size_t j = 0; j < 2; ++j)
        {
            const BerRecord &r = recs[e * 2 + j];
            CHECK(r.estimator == specs[e].tag());
            CHECK(r.ebn0_db == c.ebn0_db[j]);
            CHECK(r.doppler_hz == 10.0);
            CHECK(r.ber == double(r.bit_errors) / double(r.bits_sent));
            CHECK(r.capped == (r.bit_errors < c.min_bit_errors));
            if (!r.capped)
                CHECK(r.bits_sent < c.max_bits + 4 * 23 * 64 * 2 * 2);
            if (specs[e].kind != EstimatorKind::genie)
                CHECK(r.estimations > 0);
        }

    // Perfect CSI never loses, and BER does not rise with Eb/N0 (only checked with enough errors).
    for (std::size_t e = 1; e < 5; ++e)
        for (std::size_t j = 0; j < 2; ++j)
            if (recs[e * 2 + j].bit_errors >= 50 && recs[j].bit_errors >= 50)
                CHECK(recs[j].ber <= recs[e * 2 + j].ber);
    for (std::size_t e = 0; e < 5; ++e)
        if (recs[e * 2 + 1].bit_errors >= 50)
            CHECK(recs[e * 2 + 1].ber <= recs[e * 2].ber);

    // Estimations per measured frame carry the modelled operation counts.
    const BerRecord &ls = recs[2];
    CHECK(ls.op_count.real_mults / ls.estimations == 64 * matmul_cost(2, 2, 2).real_mults);
}

TEST_CASE("run_sweep: identical results for any worker count")
{
    SimConfig c = small_desk();
    c.estimators = {"mmse", "lspca:3"};
    c.max_bits = 150'000;
    c.workers = 1;
    const auto a = run_sweep(c);
    c.workers = 8;
    const auto b = run_sweep(c);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        CHECK(a[i].bits_sent == b[i].bits_sent);
        CHECK(a[i].bit_errors == b[i].bit_errors);
        CHECK(a[i].ber == b[i].ber);
        CHECK(a[i].op_count == b[i].op_count);
    }
    c.seed = 2;
    const auto other = run_sweep(c);
    bool differ = false;
    for (std::size_t i = 0; i < a.size(); ++i)
        differ = differ || other[i].bit_errors != a[i].bit_errors;
    CHECK(differ);
}

TEST_CASE("trial seeds are distinct across Doppler points and trials")
{
    std::set<std::uint64_t> seen;
    for (std::size_t f = 0; f < 9; ++f)
        for (std::uint64_t t = 0; t < 1000; ++t)
            seen.insert(detail::trial_seed(1, f, t));
    CHECK(seen.size() == 9000);
}

TEST_CASE("theoretical_overlay: closed form, monotone, diversity ordering")
{
    SimConfig c = make_preset("desk");
    c.ebn0_db = {-4, -2, 0, 2, 4, 6, 8, 10, 12};
    c.eb_includes_pilots = false;
    c.m_t = 1;
    c.m_r = 1;
    c.stbc = "siso";
    const auto d1 = theoretical_overlay(c);
    REQUIRE(d1.size() == c.ebn0_db.size());
    for (std::size_t i = 0; i < d1.size(); ++i)
    {
        CHECK(d1[i].reference);
        CHECK(d1[i].estimator == "theory_D1");
        CHECK(std::abs(d1[i].ber - rayleigh_quadrature(db_to_linear(c.ebn0_db[i]))) < 1e-6);
        if (i)
            CHECK(d1[i].ber < d1[i - 1].ber);
    }

    SimConfig big = make_preset("paper");
    big.ebn0_db = {1, 2, 3, 4, 6, 8};
    big.diversity_order = 8;
    const auto d8 = theoretical_overlay(big);
    big.diversity_order = 0;
    const auto d64 = theoretical_overlay(big);
    CHECK(d64[0].estimator == "theory_D64");
    for (std::size_t i = 0; i < d8.size(); ++i)
        CHECK(d64[i].ber < d8[i].ber);

    // Pilot energy and the split over transmit antennas shift the curve right.
    SimConfig desk = make_preset("desk");
    desk.ebn0_db = {6.0};
    const double shift = 10.0 * std::log10(2.0) + 10.0 * std::log10(24.0 / 23.0);
    CHECK(std::abs(theoretical_overlay(desk)[0].ber - theoretical_ber_diversity(6.0 - shift, 4)) < 1e-15);
}

TEST_CASE("complexity_report: leading-order columns and doubling ratios")
{
    const auto rows = complexity_report({2, 4, 8, 16, 32, 64, 128});
    CHECK(rows[2].lead_cubic == 512);
    CHECK(rows[4].lead_cubic == 32768);
    CHECK(rows[4].lead_quadratic == 1024);
    for (std::size_t i = 3; i + 1 < rows.size(); ++i)
    {
        const double mmse = double(rows[i + 1].mmse_per_subcarrier.real_mults) / double(rows[i].mmse_per_subcarrier.real_mults);
        const double pca = double(rows[i + 1].lspca_pca_stage.real_mults) / double(rows[i].lspca_pca_stage.real_mults);
        CHECK(std::abs(mmse / 8.0 - 1.0) < 0.15);
        CHECK(std::abs(pca / 4.0 - 1.0) < 0.15);
    }
    // Per-subcarrier MMSE: three N x N products plus one inversion.
    const std::uint64_t n = 8;
    CHECK(rows[2].mmse_per_subcarrier.real_mults == 3 * 4 * n * n * n + 8 * n * n * n + 4 * n * n + 3 * n);
    CHECK(rows[2].mmse_per_estimation == rows[2].mmse_per_subcarrier * 1024);
    CHECK(rows[2].lspca_total == rows[2].ls_stage + rows[2].lspca_pca_stage);
}

TEST_CASE("emit_results: header-only, cardinality and byte identity")
{
    const auto empty_dir = scratch("empty");
    emit_results({}, empty_dir);
    CHECK(slurp(empty_dir / "ber_vs_ebn0.csv") == std::string(ber_vs_ebn0_header) + "\n");
    CHECK(slurp(empty_dir / "ber_vs_doppler.csv") == std::string(ber_vs_doppler_header) + "\n");
    CHECK(slurp(empty_dir / "complexity.csv") == std::string(complexity_header) + "\n");
    CHECK(std::filesystem::exists(empty_dir / "plot.gp"));

    std::vector<BerRecord> recs;
    for (const char *est : {"mmse", "lspca:3"})
        for (double e : {0.0, 5.0, 10.0})
        {
            BerRecord r;
            r.estimator = est;
            r.doppler_hz = 20.0;
            r.ebn0_db = e;
            r.bits_sent = 1000;
            r.bit_errors = 10;
            r.ber = 0.01;
            r.elapsed_seconds = e; // must not reach the files
            r.op_count = {100, 50};
            r.estimations = 10;
            recs.push_back(r);
        }
    const auto a = scratch("a"), b = scratch("b");
    emit_results(recs, a, complexity_report({2, 4}));
    for (auto &r : recs)
        r.elapsed_seconds += 1.0;
    emit_results(recs, b, complexity_report({2, 4}));
    const std::string ebn0 = slurp(a / "ber_vs_ebn0.csv");
    CHECK(lines(ebn0) == 1 + 6);
    CHECK(lines(slurp(a / "ber_vs_doppler.csv")) == 1 + 6);
    CHECK(lines(slurp(a / "complexity.csv")) == 1 + 2);
    CHECK(ebn0.find("sim,mmse,20,5,1000,10,1.000000000e-02,0,10,5\n") != std::string::npos);
    for (const char *f : {"ber_vs_ebn0.csv", "ber_vs_doppler.csv", "complexity.csv", "plot.gp"})
        CHECK(slurp(a / f) == slurp(b / f));

    // ber_vs_doppler groups rows by Eb/N0.
    const std::string dop = slurp(a / "ber_vs_doppler.csv");
    CHECK(dop.find("0,mmse,20") < dop.find("0,lspca:3,20"));
    CHECK(dop.find("0,lspca:3,20") < dop.find("5,mmse,20"));

    CHECK_THROWS_AS(emit_results(recs, "/proc/lspca_cannot_write_here"), ConfigError);
}

TEST_CASE("ebn0_at_ber: log-linear interpolation")
{
    std::vector<BerRecord> curve(3);
    curve[0].ebn0_db = 0.0;
    curve[0].ber = 1e-1;
    curve[1].ebn0_db = 2.0;
    curve[1].ber = 1e-2;
    curve[2].ebn0_db = 4.0;
    curve[2].ber = 1e-4;
    CHECK(std::abs(*ebn0_at_ber(curve, std::sqrt(1e-1 * 1e-2)) - 1.0) < 1e-12);
    CHECK(std::abs(*ebn0_at_ber(curve, 1e-3) - 3.0) < 1e-12);
    CHECK_FALSE(ebn0_at_ber(curve, 1e-6).has_value());
    CHECK_FALSE(ebn0_at_ber(curve, 0.5).has_value());
}
