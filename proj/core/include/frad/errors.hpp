//
// Project frad - Copyright 2026 the frad developers
// SPDX-License-Identifier: Apache-2.0
//
#ifndef FRAD_ERRORS_HPP
#define FRAD_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace frad {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (XYZ, MOL, manifests, checkpoints).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Violated structural precondition on the bond graph.
class TopologyError : public Error {
 public:
  using Error::Error;
};

/// Degenerate coordinates: collinear hinges, zero-length axes.
class GeometryError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

/// Non-finite losses, undefined ratios, failed solves.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace frad

#endif
