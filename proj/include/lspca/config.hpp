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

#ifndef LSPCA_CONFIG_HPP
#define LSPCA_CONFIG_HPP

// Simulation configuration: the SimConfig record, named presets, and a flat TOML-style
// "key = value" reader/writer.

#include "channel.hpp"
#include "csirs.hpp"
#include "modem.hpp"
#include "ofdm.hpp"
#include "stbc.hpp"

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#ifndef LSPCA_DATA_DIR
#define LSPCA_DATA_DIR "data"
#endif

namespace lspca
{
    enum class EstimatorKind
    {
        genie,
        ls,
        ls_smooth,
        mmse,
        lspca
    };

    struct EstimatorSpec
    {
        EstimatorKind kind = EstimatorKind::genie;
        std::size_t lambda_max = 0; // lspca only

        std::string tag() const
        {
            switch (kind)
            {
            case EstimatorKind::genie: return "genie";
            case EstimatorKind::ls: return "ls";
            case EstimatorKind::ls_smooth: return "ls_smooth";
            case EstimatorKind::mmse: return "mmse";
            case EstimatorKind::lspca: return "lspca:" + std::to_string(lambda_max);
            }
            return "?";
        }

        // "genie", "ls", "ls_smooth", "mmse", "lspca:<lambda_max>"
        static EstimatorSpec parse(const std::string &s)
        {
            if (s == "genie")
                return {EstimatorKind::genie, 0};
            if (s == "ls")
                return {EstimatorKind::ls, 0};
            if (s == "ls_smooth")
                return {EstimatorKind::ls_smooth, 0};
            if (s == "mmse")
                return {EstimatorKind::mmse, 0};
            if (s.rfind("lspca:", 0) == 0)
            {
                const std::string n = s.substr(6);
                std::size_t pos = 0;
                unsigned long v = 0;
                try
                {
                    v = std::stoul(n, &pos);
                }
                catch (const std::exception &)
                {
                    pos = 0;
                }
                if (pos == 0 || pos != n.size() || v == 0)
                    throw ConfigError("estimator '" + s + "': lambda_max must be a positive integer");
                return {EstimatorKind::lspca, v};
            }
            throw ConfigError("unknown estimator '" + s + "' (expected genie, ls, ls_smooth, mmse, lspca:<n>)");
        }
    };

    struct SimConfig
    {
        std::string preset = "desk";

        // Link
        std::size_t m_t = 2;
        std::size_t m_r = 2;
        std::string stbc = "alamouti";
        unsigned qam_order = 4;
        std::size_t k_subcarriers = 128;
        double delta_f = 30e3;
        std::size_t cp_len = 0; // 0: 120% of the maximum excess delay

        // Channel
        std::string tdl_profile = "TDL-B";
        double delay_spread_ns = 272.0; // TDL-B max delay ~40 samples at 30.72 Msps
        std::string profile_dir = LSPCA_DATA_DIR "/tdl";
        bool fading = true;
        std::size_t sinusoids = default_sinusoids;
        std::vector<double> doppler_hz{0.5, 10.0, 20.0};
        std::vector<double> ebn0_db{0, 2, 4, 6, 8, 10, 12, 14};

        // Estimation
        std::vector<std::string> estimators{"genie", "mmse", "lspca:3", "lspca:5"};
        std::size_t mmse_blocks = 2;    // I for MMSE
        bool mmse_smoothing = true;
        std::size_t buffer_size = 20;   // LSPCA realisations, current one included
        std::size_t trunc_len = 0;      // L; 0: cp_len
        std::size_t pilot_slots = 0;    // P; 0: code length
        std::size_t data_blocks_per_pilot = 23;
        bool eb_includes_pilots = true;

        // Monte Carlo
        std::uint64_t min_bit_errors = 200;
        std::uint64_t max_bits = 4'000'000;
        std::size_t batch_trials = 8;
        std::size_t frames_per_trial = 1;
        long long warmup_frames = -1; // -1: just enough to fill the estimator histories
        std::uint64_t seed = 1;
        std::size_t workers = 1;

        // Reporting
        unsigned diversity_order = 0; // 0: M_T * M_R
        bool theory = true;
        std::vector<std::size_t> complexity_n{2, 4, 8, 16, 32, 64};

        // Derived quantities.
        StbcCode code() const { return StbcCode::by_name(stbc); }
        double sample_rate() const { return static_cast<double>(k_subcarriers) * delta_f; }

        TdlProfile profile() const { return tdl_profile_load(tdl_profile, delay_spread_ns * 1e-9, profile_dir); }

        std::size_t resolved_cp_len() const
        {
            if (cp_len)
                return cp_len;
            return cp_len_for_delay(profile().max_delay() * sample_rate());
        }
        std::size_t resolved_trunc_len() const { return trunc_len ? trunc_len : resolved_cp_len(); }
        std::size_t resolved_pilot_slots() const { return pilot_slots ? pilot_slots : std::max(code().p, m_t); }
        unsigned resolved_diversity() const
        {
            return diversity_order ? diversity_order : static_cast<unsigned>(m_t * m_r);
        }

        std::vector<EstimatorSpec> estimator_specs() const
        {
            std::vector<EstimatorSpec> out;
            for (const auto &s : estimators)
                out.push_back(EstimatorSpec::parse(s));
            return out;
        }

        std::size_t resolved_warmup() const
        {
            if (warmup_frames >= 0)
                return static_cast<std::size_t>(warmup_frames);
            std::size_t w = 0;
            for (const auto &e : estimator_specs())
            {
                if (e.kind == EstimatorKind::lspca)
                    w = std::max(w, buffer_size - 1);
                if (e.kind == EstimatorKind::mmse)
                    w = std::max(w, mmse_blocks - 1);
            }
            return w;
        }

        double pilot_overhead() const
        {
            return eb_includes_pilots
                       ? static_cast<double>(data_blocks_per_pilot + 1) / static_cast<double>(data_blocks_per_pilot)
                       : 1.0;
        }

        // Everything checked here is reported as ConfigError before any simulation starts.
        void validate() const
        {
            auto fail = [](const std::string &msg) { throw ConfigError("config: " + msg); };
            if (m_t == 0 || m_r == 0)
                fail("antenna counts must be positive");
            StbcCode c;
            try
            {
                c = code();
            }
            catch (const std::exception &e)
            {
                fail(e.what());
            }
            if (c.m_t != m_t)
                fail("stbc '" + stbc + "' needs m_t = " + std::to_string(c.m_t) + ", got " + std::to_string(m_t));
            try
            {
                QamConstellation q(qam_order);
                (void)q;
            }
            catch (const std::exception &e)
            {
                fail(e.what());
            }
            if (!is_power_of_two(k_subcarriers) || k_subcarriers < 4)
                fail("k_subcarriers must be a power of two >= 4");
            if (!(delta_f > 0.0))
                fail("delta_f must be positive");
            if (!(delay_spread_ns >= 0.0))
                fail("delay_spread_ns must be non-negative");
            if (sinusoids == 0)
                fail("sinusoids must be positive");
            if (doppler_hz.empty() || ebn0_db.empty() || estimators.empty())
                fail("doppler_hz, ebn0_db and estimators must be non-empty");
            for (double f : doppler_hz)
                if (!(f >= 0.0) || !std::isfinite(f))
                    fail("Doppler values must be finite and non-negative");
            for (double e : ebn0_db)
                if (std::isnan(e) || e == -std::numeric_limits<double>::infinity())
                    fail("ebn0_db values must be numbers (inf allowed for noiseless)");
            if (min_bit_errors == 0 || max_bits == 0)
                fail("stop rules must be positive");
            if (batch_trials == 0 || frames_per_trial == 0 || workers == 0)
                fail("batch_trials, frames_per_trial and workers must be positive");
            if (mmse_blocks == 0 || buffer_size == 0)
                fail("mmse_blocks and buffer_size must be positive");
            if (data_blocks_per_pilot == 0)
                fail("data_blocks_per_pilot must be positive");

            TdlProfile prof;
            try
            {
                prof = profile();
            }
            catch (const ConfigError &e)
            {
                fail(e.what());
            }
            const std::size_t cp = resolved_cp_len();
            if (cp >= k_subcarriers)
                fail("cyclic prefix of " + std::to_string(cp) + " samples does not fit K = " +
                     std::to_string(k_subcarriers));
            const auto taps = static_cast<std::size_t>(std::llround(prof.max_delay() * sample_rate())) + 1;
            if (taps > cp)
                fail("channel spans " + std::to_string(taps) + " samples, longer than cp_len = " + std::to_string(cp));
            const std::size_t l = resolved_trunc_len();
            if (l == 0 || l > k_subcarriers)
                fail("trunc_len must lie in [1, K]");
            if (resolved_pilot_slots() < m_t)
                fail("pilot_slots must be at least m_t");

            std::vector<EstimatorSpec> specs;
            try
            {
                specs = estimator_specs();
            }
            catch (const ConfigError &e)
            {
                fail(e.what());
            }
            const std::size_t filled = std::min(buffer_size, resolved_warmup() + 1);
            for (const auto &e : specs)
                if (e.kind == EstimatorKind::lspca &&
                    (e.lambda_max > std::min(l, buffer_size) || e.lambda_max > filled))
                    fail("estimator " + e.tag() + ": lambda_max exceeds min(L, buffered realisations)");
        }
    };

    struct PresetInfo
    {
        std::string name;
        std::string description;
    };

    inline std::vector<PresetInfo> preset_list()
    {
        return {
            {"desk", "2x2 Alamouti, K=128, TDL-B, Doppler 0.5/10/20 Hz, genie/MMSE/LSPCA(3,5)"},
            {"paper", "8x8 rate-1/2 orthogonal code, K=1024, TDL-B, Doppler 0-40 Hz (long run)"},
            {"awgn", "1x1 4-QAM, flat non-fading channel, perfect CSI"},
            {"diversity", "2x2 Alamouti, flat i.i.d. Rayleigh, perfect CSI"},
        };
    }

    inline SimConfig make_preset(const std::string &name)
    {
        SimConfig c;
        c.preset = name;
        if (name == "desk")
            return c;
        if (name == "paper")
        {
            c.m_t = c.m_r = 8;
            c.stbc = "g8";
            c.k_subcarriers = 1024;
            c.doppler_hz = {0, 5, 10, 15, 20, 25, 30, 35, 40};
            c.ebn0_db = {-6, -4, -2, 0, 2, 4};
            c.estimators = {"genie", "mmse", "lspca:3", "lspca:5"};
            c.batch_trials = 4;
            c.max_bits = 20'000'000;
            return c;
        }
        if (name == "awgn")
        {
            c.m_t = c.m_r = 1;
            c.stbc = "siso";
            c.tdl_profile = "flat";
            c.fading = false;
            c.doppler_hz = {0};
            c.ebn0_db = {4, 6, 8};
            c.estimators = {"genie"};
            c.eb_includes_pilots = false;
            c.theory = false; // the fading overlay does not describe a static channel
            c.min_bit_errors = 2000;
            c.max_bits = 20'000'000;
            return c;
        }
        if (name == "diversity")
        {
            c.tdl_profile = "flat";
            c.doppler_hz = {0};
            c.ebn0_db = {0, 2, 4, 6, 8, 10, 12};
            c.estimators = {"genie"};
            c.eb_includes_pilots = false;
            c.data_blocks_per_pilot = 1;
            c.frames_per_trial = 1;
            c.min_bit_errors = 2000; // every trial is one flat fade, so errors come in bursts
            c.max_bits = 40'000'000;
            return c;
        }
        throw ConfigError("unknown preset '" + name + "'");
    }

    namespace detail
    {
        inline std::string trim(const std::string &s)
        {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos)
                return {};
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        }

        inline std::string unquote(const std::string &s)
        {
            if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\'')))
                return s.substr(1, s.size() - 2);
            return s;
        }

        // Drops a '#' comment that is not inside quotes.
        inline std::string strip_comment(const std::string &line)
        {
            bool quoted = false;
            for (std::size_t i = 0; i < line.size(); ++i)
            {
                if (line[i] == '"')
                    quoted = !quoted;
                else if (line[i] == '#' && !quoted)
                    return line.substr(0, i);
            }
            return line;
        }

        inline std::vector<std::string> split_list(const std::string &key, const std::string &v)
        {
            if (v.size() < 2 || v.front() != '[' || v.back() != ']')
                throw ConfigError("config: '" + key + "' expects a list like [a, b]");
            std::vector<std::string> out;
            std::stringstream ss(v.substr(1, v.size() - 2));
            std::string item;
            while (std::getline(ss, item, ','))
            {
                item = trim(item);
                if (!item.empty())
                    out.push_back(unquote(item));
            }
            return out;
        }

        inline double to_double(const std::string &key, const std::string &v)
        {
            const std::string s = unquote(v);
            if (s == "inf" || s == "+inf")
                return std::numeric_limits<double>::infinity();
            std::size_t pos = 0;
            double d = 0.0;
            try
            {
                d = std::stod(s, &pos);
            }
            catch (const std::exception &)
            {
                pos = 0;
            }
            if (pos == 0 || pos != s.size())
                throw ConfigError("config: '" + key + "' expects a number, got '" + v + "'");
            return d;
        }

        inline std::uint64_t to_uint(const std::string &key, const std::string &v)
        {
            const std::string s = unquote(v);
            std::size_t pos = 0;
            unsigned long long u = 0;
            try
            {
                if (!s.empty() && s.front() != '-')
                    u = std::stoull(s, &pos, 0);
            }
            catch (const std::exception &)
            {
                pos = 0;
            }
            if (pos == 0 || pos != s.size())
                throw ConfigError("config: '" + key + "' expects a non-negative integer, got '" + v + "'");
            return u;
        }

        inline bool to_bool(const std::string &key, const std::string &v)
        {
            if (v == "true")
                return true;
            if (v == "false")
                return false;
            throw ConfigError("config: '" + key + "' expects true or false, got '" + v + "'");
        }

        inline std::string fmt_double(double d)
        {
            if (std::isinf(d))
                return "inf";
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17g", d);
            return buf;
        }

        template <typename T, typename F>
        std::string fmt_list(const std::vector<T> &v, F f)
        {
            std::string s = "[";
            for (std::size_t i = 0; i < v.size(); ++i)
                s += (i ? ", " : "") + f(v[i]);
            return s + "]";
        }
    }

    // Applies one key. Unknown keys are errors so that typos do not silently fall back to defaults.
    inline void apply_config_value(SimConfig &c, const std::string &key, const std::string &raw)
    {
        using namespace detail;
        const std::string v = trim(raw);
        auto sz = [&] { return static_cast<std::size_t>(to_uint(key, v)); };
        if (key == "m_t") c.m_t = sz();
        else if (key == "m_r") c.m_r = sz();
        else if (key == "stbc") c.stbc = unquote(v);
        else if (key == "qam_order") c.qam_order = static_cast<unsigned>(to_uint(key, v));
        else if (key == "k_subcarriers") c.k_subcarriers = sz();
        else if (key == "delta_f") c.delta_f = to_double(key, v);
        else if (key == "cp_len") c.cp_len = sz();
        else if (key == "tdl_profile") c.tdl_profile = unquote(v);
        else if (key == "delay_spread_ns") c.delay_spread_ns = to_double(key, v);
        else if (key == "profile_dir") c.profile_dir = unquote(v);
        else if (key == "fading") c.fading = to_bool(key, v);
        else if (key == "sinusoids") c.sinusoids = sz();
        else if (key == "doppler_hz")
        {
            c.doppler_hz.clear();
            for (const auto &s : split_list(key, v))
                c.doppler_hz.push_back(to_double(key, s));
        }
        else if (key == "ebn0_db")
        {
            c.ebn0_db.clear();
            for (const auto &s : split_list(key, v))
                c.ebn0_db.push_back(to_double(key, s));
        }
        else if (key == "estimators") c.estimators = split_list(key, v);
        else if (key == "mmse_blocks") c.mmse_blocks = sz();
        else if (key == "mmse_smoothing") c.mmse_smoothing = to_bool(key, v);
        else if (key == "buffer_size") c.buffer_size = sz();
        else if (key == "trunc_len") c.trunc_len = sz();
        else if (key == "pilot_slots") c.pilot_slots = sz();
        else if (key == "data_blocks_per_pilot") c.data_blocks_per_pilot = sz();
        else if (key == "eb_includes_pilots") c.eb_includes_pilots = to_bool(key, v);
        else if (key == "min_bit_errors") c.min_bit_errors = to_uint(key, v);
        else if (key == "max_bits") c.max_bits = to_uint(key, v);
        else if (key == "batch_trials") c.batch_trials = sz();
        else if (key == "frames_per_trial") c.frames_per_trial = sz();
        else if (key == "warmup_frames")
            c.warmup_frames = unquote(v) == "auto" ? -1 : static_cast<long long>(to_uint(key, v));
        else if (key == "seed") c.seed = to_uint(key, v);
        else if (key == "workers") c.workers = sz();
        else if (key == "diversity_order") c.diversity_order = static_cast<unsigned>(to_uint(key, v));
        else if (key == "theory") c.theory = to_bool(key, v);
        else if (key == "complexity_n")
        {
            c.complexity_n.clear();
            for (const auto &s : split_list(key, v))
                c.complexity_n.push_back(static_cast<std::size_t>(to_uint(key, s)));
        }
        else
            throw ConfigError("config: unknown key '" + key + "'");
    }

    // Flat "key = value" lines, '#' comments, lists as [a, b, c]. A "preset = name" line, if present,
    // must come first and resets every field to that preset before the remaining keys apply.
    inline SimConfig parse_config(std::istream &in, const std::string &origin = "<config>")
    {
        SimConfig c = make_preset("desk");
        std::string line;
        std::size_t lineno = 0;
        bool any_key = false;
        while (std::getline(in, line))
        {
            ++lineno;
            const std::string body = detail::trim(detail::strip_comment(line));
            if (body.empty())
                continue;
            const std::string where = origin + ":" + std::to_string(lineno) + ": ";
            if (body.front() == '[')
                throw ConfigError(where + "sections are not supported; use flat keys");
            const auto eq = body.find('=');
            if (eq == std::string::npos)
                throw ConfigError(where + "expected 'key = value'");
            const std::string key = detail::trim(body.substr(0, eq));
            const std::string value = detail::trim(body.substr(eq + 1));
            try
            {
                if (key == "preset")
                {
                    if (any_key)
                        throw ConfigError("'preset' must precede every other key");
                    c = make_preset(detail::unquote(value));
                }
                else
                    apply_config_value(c, key, value);
            }
            catch (const ConfigError &e)
            {
                throw ConfigError(where + e.what());
            }
            any_key = true;
        }
        return c;
    }

    inline SimConfig load_config(const std::filesystem::path &path)
    {
        std::ifstream in(path);
        if (!in)
            throw ConfigError("cannot open config " + path.string());
        return parse_config(in, path.string());
    }

    // `workers` is left out when include_workers is false: it never changes results.
    inline std::string to_toml(const SimConfig &c, bool include_workers = true)
    {
        using detail::fmt_double;
        auto q = [](const std::string &s) { return "\"" + s + "\""; };
        auto b = [](bool x) { return std::string(x ? "true" : "false"); };
        std::ostringstream os;
        os << "preset = " << q(c.preset) << "\n"
           << "m_t = " << c.m_t << "\n"
           << "m_r = " << c.m_r << "\n"
           << "stbc = " << q(c.stbc) << "\n"
           << "qam_order = " << c.qam_order << "\n"
           << "k_subcarriers = " << c.k_subcarriers << "\n"
           << "delta_f = " << fmt_double(c.delta_f) << "\n"
           << "cp_len = " << c.cp_len << "\n"
           << "tdl_profile = " << q(c.tdl_profile) << "\n"
           << "delay_spread_ns = " << fmt_double(c.delay_spread_ns) << "\n"
           << "profile_dir = " << q(c.profile_dir) << "\n"
           << "fading = " << b(c.fading) << "\n"
           << "sinusoids = " << c.sinusoids << "\n"
           << "doppler_hz = " << detail::fmt_list(c.doppler_hz, fmt_double) << "\n"
           << "ebn0_db = " << detail::fmt_list(c.ebn0_db, fmt_double) << "\n"
           << "estimators = " << detail::fmt_list(c.estimators, q) << "\n"
           << "mmse_blocks = " << c.mmse_blocks << "\n"
           << "mmse_smoothing = " << b(c.mmse_smoothing) << "\n"
           << "buffer_size = " << c.buffer_size << "\n"
           << "trunc_len = " << c.trunc_len << "\n"
           << "pilot_slots = " << c.pilot_slots << "\n"
           << "data_blocks_per_pilot = " << c.data_blocks_per_pilot << "\n"
           << "eb_includes_pilots = " << b(c.eb_includes_pilots) << "\n"
           << "min_bit_errors = " << c.min_bit_errors << "\n"
           << "max_bits = " << c.max_bits << "\n"
           << "batch_trials = " << c.batch_trials << "\n"
           << "frames_per_trial = " << c.frames_per_trial << "\n"
           << "warmup_frames = " << (c.warmup_frames < 0 ? q("auto") : std::to_string(c.warmup_frames)) << "\n"
           << "seed = " << c.seed << "\n"
           << (include_workers ? "workers = " + std::to_string(c.workers) + "\n" : std::string())
           << "diversity_order = " << c.diversity_order << "\n"
           << "theory = " << b(c.theory) << "\n"
           << "complexity_n = "
           << detail::fmt_list(c.complexity_n, [](std::size_t n) { return std::to_string(n); }) << "\n";
        return os.str();
    }
}

#endif
