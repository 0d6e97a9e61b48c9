// Copyright nepkit contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "nepkit/va_basis.hpp"

#include <cmath>
#include <string>

namespace nepkit
{

VABasis BuildBasis(std::span<const cd> nodes, int degree)
{
  const int m = static_cast<int>(nodes.size());
  Require(m >= 1, "BuildBasis: empty node set");
  Require(degree >= 0, "BuildBasis: negative degree");
  Require(degree + 1 <= m, "BuildBasis: degree " + std::to_string(degree) +
                               " needs at least " + std::to_string(degree + 1) +
                               " nodes, got " + std::to_string(m));

  VABasis basis;
  basis.degree_ = degree;
  basis.nodes_.assign(nodes.begin(), nodes.end());
  basis.q_ = CMatrix::Ones(m, degree + 1);
  basis.h_ = CMatrix::Zero(degree + 1, degree);

  const double inv_m = 1.0 / m;
  const double breakdown_tol = 1e-14 * m;
  CVector x(m);
  for (int l = 0; l < m; l++)
  {
    x(l) = nodes[l];
  }

  for (int j = 0; j < degree; j++)
  {
    CVector v = x.cwiseProduct(basis.q_.col(j));
    // Modified Gram-Schmidt followed by one reorthogonalization pass.
    for (int pass = 0; pass < 2; pass++)
    {
      for (int i = 0; i <= j; i++)
      {
        const cd c = basis.q_.col(i).dot(v) * inv_m;
        basis.h_(i, j) += c;
        v -= c * basis.q_.col(i);
      }
    }
    const double nrm = v.norm();
    if (!(nrm >= breakdown_tol))
    {
      Fail(ErrorKind::Breakdown, "BuildBasis: breakdown at degree " + std::to_string(j + 1) +
                                     " (column norm " + std::to_string(nrm) + ")");
    }
    const double h = nrm * std::sqrt(inv_m);
    basis.h_(j + 1, j) = h;
    basis.q_.col(j + 1) = v / h;
  }
  basis.k_ = LeadingCoeffs(basis.h_);
  return basis;
}

CMatrix EvalRecurrence(const CMatrix &H, std::span<const cd> points)
{
  const int g = static_cast<int>(H.cols());
  const int p = static_cast<int>(points.size());
  CMatrix out(p, g + 1);
  for (int l = 0; l < p; l++)
  {
    const cd y = points[l];
    out(l, 0) = 1.0;
    for (int j = 0; j < g; j++)
    {
      cd acc = y * out(l, j);
      for (int i = 0; i <= j; i++)
      {
        acc -= H(i, j) * out(l, i);
      }
      out(l, j + 1) = acc / H(j + 1, j);
    }
  }
  return out;
}

CMatrix VABasis::Evaluate(std::span<const cd> points) const
{
  return EvalRecurrence(h_, points);
}

CVector VABasis::EvaluateAt(cd y, int upto) const
{
  Require(upto >= 0 && upto <= degree_, "VABasis::EvaluateAt: degree out of range");
  const cd pt[1] = {y};
  CMatrix row = EvalRecurrence(h_.topLeftCorner(upto + 1, upto), pt);
  return row.row(0).transpose();
}

std::vector<cd> LeadingCoeffs(const CMatrix &H)
{
  const int g = static_cast<int>(H.cols());
  Require(H.rows() == g + 1, "LeadingCoeffs: H must be (g+1) x g");
  std::vector<cd> k(g + 1);
  k[0] = 1.0;
  for (int j = 1; j <= g; j++)
  {
    const cd sub = H(j, j - 1);
    if (sub == cd(0.0))
    {
      Fail(ErrorKind::Singular,
           "LeadingCoeffs: zero subdiagonal entry at column " + std::to_string(j - 1));
    }
    k[j] = k[j - 1] / sub;
  }
  return k;
}

}  // namespace nepkit
