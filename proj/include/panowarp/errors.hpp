// Copyright Contributors to the panowarp Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace panowarp {

// Missing or malformed inputs (files, maps that violate invariants).
// Surfaces as exit code 3 in the CLI.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure: singular systems, diverging optimization.
// Surfaces as exit code 4 in the CLI.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace panowarp
