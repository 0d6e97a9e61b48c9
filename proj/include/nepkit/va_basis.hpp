// Copyright nepkit contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef NEPKIT_VA_BASIS_HPP
#define NEPKIT_VA_BASIS_HPP

#include <span>
#include <vector>

#include "nepkit/types.hpp"

namespace nepkit
{

//
// Discrete orthogonal, degree-graded polynomial basis built by the Arnoldi
// process on multiplication by x over a node set (Vandermonde with Arnoldi).
//
// The basis polynomials theta_0..theta_g satisfy
//
//   x [theta_0, ..., theta_{g-1}] = [theta_0, ..., theta_g] H,
//
// with H upper Hessenberg of shape (g+1) x g and nonzero subdiagonal. The
// inner product is <f, g> = (1/m) sum_l conj(f(x_l)) g(x_l) and every
// theta_j has unit norm under it, so each column of Q has Euclidean norm
// sqrt(m). theta_0 == 1.
//
class VABasis
{
public:
  VABasis() = default;

  int Degree() const { return degree_; }
  int NumNodes() const { return static_cast<int>(nodes_.size()); }

  const std::vector<cd> &Nodes() const { return nodes_; }

  // m x (g+1) node evaluations, column j = theta_j at every node.
  const CMatrix &Q() const { return q_; }

  // (g+1) x g recurrence matrix.
  const CMatrix &H() const { return h_; }

  // Leading coefficients k_0..k_g of theta_0..theta_g.
  const std::vector<cd> &LeadingCoeffs() const { return k_; }

  // Rows are points, column j holds theta_j(point).
  CMatrix Evaluate(std::span<const cd> points) const;

  // theta_0(y)..theta_{upto}(y) at a single point, upto <= Degree().
  CVector EvaluateAt(cd y, int upto) const;

  friend VABasis BuildBasis(std::span<const cd> nodes, int degree);

private:
  int degree_ = 0;
  std::vector<cd> nodes_;
  CMatrix q_;
  CMatrix h_;
  std::vector<cd> k_;
};

// Throws ErrorKind::Breakdown if a new column collapses (norm below
// 1e-14 * m before normalization) and InvalidArgument if degree + 1 > m.
VABasis BuildBasis(std::span<const cd> nodes, int degree);

// Rows are points, column j holds theta_j(point) for j = 0..H.cols().
CMatrix EvalRecurrence(const CMatrix &H, std::span<const cd> points);

// k_0 = 1, k_j = k_{j-1} / H(j, j-1). Throws if a subdiagonal entry is zero.
std::vector<cd> LeadingCoeffs(const CMatrix &H);

}  // namespace nepkit

#endif  // NEPKIT_VA_BASIS_HPP
