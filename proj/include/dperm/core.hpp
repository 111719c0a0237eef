// Copyright 2026 The dperm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPERM_CORE_HPP_
#define DPERM_CORE_HPP_

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace dperm {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using VectorXd = Vector<double>;
using MatrixXd = Matrix<double>;

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when an input does not satisfy a documented precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Raised when an iterative routine exhausts its iteration budget.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// Absolute tolerance on defining inequalities (membership, optimality).
inline constexpr double kFeasTol = 1e-9;

inline void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidArgument(what);
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& v) {
  return v.allFinite();
}

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& v,
                    const std::string& what) {
  if (!v.allFinite()) throw InvalidArgument(what + ": non-finite entry");
}

inline void require_dim(Eigen::Index got, Eigen::Index want,
                        const std::string& what) {
  if (got != want) {
    throw InvalidArgument(what + ": dimension mismatch (got " +
                          std::to_string(got) + ", expected " +
                          std::to_string(want) + ")");
  }
}

// SplitMix64 finalizer. Used to derive independent generator seeds from a
// (master seed, stream id) pair.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(splitmix64(master) ^ splitmix64(~stream));
}

}  // namespace dperm

#endif  // DPERM_CORE_HPP_
