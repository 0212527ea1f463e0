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

#ifndef LSPCA_ERRORS_HPP
#define LSPCA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace lspca
{
    // Dimension or length mismatch between operands.
    struct SizeError : std::invalid_argument
    {
        using std::invalid_argument::invalid_argument;
    };

    // Input length does not fit the block/frame structure (bits per symbol, symbols per codeword, ...).
    struct FramingError : std::invalid_argument
    {
        using std::invalid_argument::invalid_argument;
    };

    // Parameter outside its admissible range.
    struct ParameterError : std::invalid_argument
    {
        using std::invalid_argument::invalid_argument;
    };

    // Object used in a state that does not allow the operation (e.g. empty buffer).
    struct StateError : std::logic_error
    {
        using std::logic_error::logic_error;
    };

    // Numerical failure: ill-conditioning, non-convergence.
    struct NumericError : std::runtime_error
    {
        using std::runtime_error::runtime_error;
    };

    // Matrix too ill-conditioned to solve.
    struct SingularityError : NumericError
    {
        using NumericError::NumericError;
    };

    // Invalid configuration, unreadable profile or config file.
    struct ConfigError : std::runtime_error
    {
        using std::runtime_error::runtime_error;
    };
}

#endif
