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

#ifndef LSPCA_BINARY_IO_HPP
#define LSPCA_BINARY_IO_HPP

// Little-endian primitives for the fixture formats, independent of host byte order.

#include "errors.hpp"

#include <bit>
#include <complex>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>

namespace lspca::binary
{
    inline void put_u32(std::ostream &os, std::uint32_t v)
    {
        char b[4];
        for (int i = 0; i < 4; ++i)
            b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
        os.write(b, 4);
    }

    inline void put_f64(std::ostream &os, double d)
    {
        const auto v = std::bit_cast<std::uint64_t>(d);
        char b[8];
        for (int i = 0; i < 8; ++i)
            b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
        os.write(b, 8);
    }

    inline void put_complex(std::ostream &os, std::complex<double> z)
    {
        put_f64(os, z.real());
        put_f64(os, z.imag());
    }

    inline std::uint64_t get_bytes(std::istream &is, int n, const char *what)
    {
        unsigned char b[8] = {};
        if (!is.read(reinterpret_cast<char *>(b), n))
            throw ConfigError(std::string("truncated binary stream while reading ") + what);
        std::uint64_t v = 0;
        for (int i = 0; i < n; ++i)
            v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
        return v;
    }

    inline std::uint32_t get_u32(std::istream &is, const char *what)
    {
        return static_cast<std::uint32_t>(get_bytes(is, 4, what));
    }

    inline double get_f64(std::istream &is, const char *what) { return std::bit_cast<double>(get_bytes(is, 8, what)); }

    inline std::complex<double> get_complex(std::istream &is, const char *what)
    {
        const double re = get_f64(is, what);
        return {re, get_f64(is, what)};
    }
}

#endif
