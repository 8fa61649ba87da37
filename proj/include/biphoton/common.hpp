// Copyright 2026 The biphoton Authors
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

#ifndef BIPHOTON_COMMON_HPP
#define BIPHOTON_COMMON_HPP

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace biphoton {

using cplx = std::complex<double>;
using CMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic>;
using CVector = Eigen::Matrix<cplx, Eigen::Dynamic, 1>;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

enum class ErrorKind {
    invalid_argument,
    config,
    numeric,
    io,
};

/// Exception type thrown by every operation in the library.
class Error : public std::runtime_error {
   public:
    Error(ErrorKind kind, const std::string &what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

   private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(const std::string &what) { throw Error(ErrorKind::invalid_argument, what); }
[[noreturn]] inline void fail_io(const std::string &what) { throw Error(ErrorKind::io, what); }
[[noreturn]] inline void fail_numeric(const std::string &what) { throw Error(ErrorKind::numeric, what); }
[[noreturn]] inline void fail_config(const std::string &what) { throw Error(ErrorKind::config, what); }

/// Wraps an angle into [0, 2pi).
double wrap_phase(double theta);
/// Wraps an angle into (-pi, pi].
double wrap_signed_phase(double theta);

/// splitmix64 finalizer, used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace biphoton

#endif
