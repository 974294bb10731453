// Copyright 2026 The uqoc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace uqoc {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Role aliases. A ParamVector holds nodal coefficients of the uncertain field
// (primal); a DualVector holds gradients and residuals paired with it by a
// plain coefficient dot product.
using ParamVector = Vec;
using DualVector = Vec;
using StateVector = Vec;
using AdjointVector = Vec;
using ControlVector = Vec;

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user input: bad dimensions, non-positive parameters, unknown tags.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  enum class Kind { Indefinite, Singular, NotConverged, Breakdown };

  SolverError(Kind kind, const std::string &what) : Error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

}  // namespace uqoc
