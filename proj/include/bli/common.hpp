#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace bli {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input files or arguments detected before any computation starts.
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace bli
