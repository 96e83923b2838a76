// Copyright (c) the sureid authors. Distributed under the Apache License,
// Version 2.0 (http://www.apache.org/licenses/LICENSE-2.0).

#pragma once

#include <stdexcept>
#include <string>

namespace sureid {

/// Thrown when an operation requires an infinitely divisible law but the
/// model is not one (uniform noise has its own dedicated code path).
class unsupported_model_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when adaptive quadrature fails to reach the requested tolerance;
/// carries the tolerance that was actually achieved.
class quadrature_error : public std::runtime_error {
 public:
  quadrature_error(const std::string& what, double achieved)
      : std::runtime_error(what + " (achieved tolerance " +
                           std::to_string(achieved) + ")"),
        achieved_(achieved) {}

  double achieved_tolerance() const { return achieved_; }

 private:
  double achieved_;
};

}  // namespace sureid
