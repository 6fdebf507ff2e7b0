// SPDX-License-Identifier: Apache-2.0
//
// Error types shared across the library.

#pragma once

#include <stdexcept>
#include <string>

namespace sense {

/// Thrown when inputs are structurally valid but outside the supported
/// domain (e.g. fewer observations than antennas, unsupported sweep sizes).
class unsupported_configuration : public std::runtime_error {
public:
  explicit unsupported_configuration(const std::string &what)
      : std::runtime_error(what) {}
};

/// Thrown when a numerical routine cannot meet its accuracy contract
/// (failed bracketing, determinant evaluation outside tolerance, ...).
/// The message carries the diagnostics needed to reproduce the failure.
class numerical_failure : public std::runtime_error {
public:
  explicit numerical_failure(const std::string &what)
      : std::runtime_error(what) {}
};

} // namespace sense
