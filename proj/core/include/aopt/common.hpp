// Copyright (c) the aopt contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace aopt {

enum class ErrorKind {
  ConfigInvalid,
  IoError,
  InadmissibleProfile,
  TraceViolation,
  GridTooCoarse,
  UnknownEdge,
  ShapeMismatch,
  UnsupportedAbsorbingCoefficients,
  SingularSystem,
  NonDegeneracyViolated,
  NewtonDiverged,
  LineSearchStalled,
};

/// All library failures carry a kind so the CLI can map them to exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) { throw Error(kind, msg); }

/// Full-precision decimal formatting used for every numeric artifact.
inline std::string to17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return std::string(buf);
}

using Vec = std::vector<double>;

inline void check_shape(bool ok, const std::string& where) {
  if (!ok) fail(ErrorKind::ShapeMismatch, "shape mismatch in " + where);
}

}  // namespace aopt
