// Copyright nepkit contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef NEPKIT_TYPES_HPP
#define NEPKIT_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace nepkit
{

using cd = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using SpMatrix = Eigen::SparseMatrix<cd, Eigen::ColMajor>;

// Error categories surfaced through the C API as distinct status codes.
enum class ErrorKind
{
  InvalidArgument,
  Io,
  Parse,
  Breakdown,
  RankDeficient,
  Singular,
  PoleHit,
  Domain,
  NotConverged,
};

class Error : public std::runtime_error
{
public:
  Error(ErrorKind kind, const std::string &msg) : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void Fail(ErrorKind kind, const std::string &msg)
{
  throw Error(kind, msg);
}

inline void Require(bool cond, const std::string &msg)
{
  if (!cond)
  {
    Fail(ErrorKind::InvalidArgument, msg);
  }
}

}  // namespace nepkit

#endif  // NEPKIT_TYPES_HPP
