// Copyright 2026 The hvi Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HVI_COMMON_HPP
#define HVI_COMMON_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <stdexcept>
#include <string>

namespace hvi {

using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;
/// Column-major sparse storage. Every matrix the library assembles is
/// symmetric, so column j doubles as row j.
using SparseMatrix = Eigen::SparseMatrix<double>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad dimensions, sizes or otherwise malformed arguments.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A file could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// An iterative method hit its iteration cap.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, int iterations, double last_change)
      : Error(what), iterations_(iterations), last_change_(last_change) {}

  int iterations() const { return iterations_; }
  double last_change() const { return last_change_; }

 private:
  int iterations_;
  double last_change_;
};

}  // namespace hvi

#endif  // HVI_COMMON_HPP
