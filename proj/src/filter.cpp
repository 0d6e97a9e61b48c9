// Copyright nepkit contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "nepkit/filter.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace nepkit
{

namespace
{

// Orthonormal basis of the range of U; columns whose QR diagonal falls below
// 1e-12 ||U|| are dropped.
CMatrix Orth(const CMatrix &U)
{
  const Eigen::Index rows = U.rows();
  const Eigen::Index cols = std::min(U.rows(), U.cols());
  Eigen::HouseholderQR<CMatrix> qr(U);
  const CMatrix Q = qr.householderQ() * CMatrix::Identity(rows, cols);
  const double tol = 1e-12 * U.norm();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < cols; j++)
  {
    if (std::abs(qr.matrixQR()(j, j)) > tol)
    {
      keep.push_back(j);
    }
  }
  CMatrix out(rows, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); j++)
  {
    out.col(static_cast<Eigen::Index>(j)) = Q.col(keep[j]);
  }
  return out;
}

double RitzSigma(const SplitFormNEP &nep, const Region &region, cd lambda, const CVector &v1)
{
  const double vn = v1.norm();
  if (!(vn > 0.0))
  {
    return std::numeric_limits<double>::infinity();
  }
  try
  {
    const double r = nep.Apply(lambda, v1).norm() / ((std::abs(region.center) + region.radius) * vn);
    return std::isfinite(r) ? r : std::numeric_limits<double>::infinity();
  }
  catch (const Error &e)
  {
    if (e.kind() != ErrorKind::Domain)
    {
      throw;
    }
    return std::numeric_limits<double>::infinity();
  }
}

}  // namespace

QuadratureRule Quadrature(cd center, double radius, int k)
{
  Require(k >= 1, "Quadrature: order must be at least 1");
  Require(radius > 0.0, "Quadrature: radius must be positive");
  QuadratureRule rule;
  rule.center = center;
  rule.radius = radius;
  rule.poles.reserve(k);
  rule.weights.reserve(k);
  for (int j = 1; j <= k; j++)
  {
    const double theta = (2.0 * j - 1.0) * std::numbers::pi / k;
    const cd e = std::polar(1.0, theta);
    rule.poles.push_back(center + radius * e);
    rule.weights.push_back((radius / k) * e);
  }
  return rule;
}

cd ScalarFilter(const QuadratureRule &rule, cd x)
{
  cd sum = 0.0;
  for (int j = 0; j < rule.Order(); j++)
  {
    const cd d = rule.poles[j] - x;
    if (d == cd(0.0))
    {
      std::ostringstream msg;
      msg << "ScalarFilter: x = " << x << " is quadrature pole " << j + 1;
      Fail(ErrorKind::PoleHit, msg.str());
    }
    sum += rule.weights[j] / d;
  }
  return sum;
}

CMatrix ShiftInvert(const StructuredPencil &pencil, cd mu, const CMatrix &Y)
{
  return BlockLU(pencil, mu).ShiftInvert(Y);
}

RationalFilter::RationalFilter(const StructuredPencil &pencil, QuadratureRule rule)
  : rule_(std::move(rule))
{
  lu_.reserve(rule_.poles.size());
  for (int j = 0; j < rule_.Order(); j++)
  {
    try
    {
      lu_.emplace_back(pencil, rule_.poles[j]);
    }
    catch (const Error &e)
    {
      std::ostringstream msg;
      msg << "RationalFilter: quadrature pole " << j + 1 << " (" << rule_.poles[j]
          << ") is on the spectrum: " << e.what();
      Fail(e.kind(), msg.str());
    }
  }
}

CMatrix RationalFilter::Apply(const CMatrix &Y) const
{
  CMatrix Z = CMatrix::Zero(Y.rows(), Y.cols());
  for (int j = 0; j < rule_.Order(); j++)
  {
    Z += rule_.weights[j] * lu_[j].ShiftInvert(Y);
  }
  return Z;
}

CMatrix ApplyFilter(const StructuredPencil &pencil, const QuadratureRule &rule, const CMatrix &Y)
{
  return RationalFilter(pencil, rule).Apply(Y);
}

void SIFConfig::Validate() const
{
  Require(subspace >= 1, "SIFConfig: subspace must be at least 1");
  Require(order >= 1, "SIFConfig: order must be at least 1");
  Require(tau_r > 0.0 && tau_r < tau_g, "SIFConfig: need 0 < tau_r < tau_g");
  Require(max_iters >= 1, "SIFConfig: max_iters must be at least 1");
}

SIFResult SubspaceIterationFilter(const StructuredPencil &pencil, const SplitFormNEP &nep,
                                  const Region &region, const SIFConfig &config)
{
  config.Validate();
  Require(pencil.Dim() == nep.Dim(), "SubspaceIterationFilter: pencil / problem size mismatch");
  const int N = pencil.Size();
  const int n = pencil.Dim();
  const cd sigma =
    config.shift.value_or(region.center + 1.1 * region.radius * std::polar(1.0, std::numbers::pi / 7));

  SIFResult result;
  result.subspace = std::min(config.subspace, N);

  const RationalFilter filter(pencil, Quadrature(region.center, region.radius, config.order));
  const double scale = pencil.BalancingScale();
  const double n0 = pencil.NormC0(scale);
  const double n1 = pencil.NormC1(scale);
  const double cutoff = InfiniteCutoff(region);

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal;
  CMatrix Y(N, result.subspace);
  for (Eigen::Index j = 0; j < Y.cols(); j++)
  {
    for (Eigen::Index i = 0; i < Y.rows(); i++)
    {
      const double re = normal(rng);
      const double im = normal(rng);
      Y(i, j) = cd(re, im);
    }
  }

  int prev_count = -1;
  for (int iter = 1; iter <= config.max_iters; iter++)
  {
    const CMatrix V = Orth(filter.Apply(Y));
    if (V.cols() == 0)
    {
      Fail(ErrorKind::Breakdown, "SubspaceIterationFilter: filtered subspace collapsed");
    }
    const CMatrix C0V = pencil.ApplyC0(V, scale);
    const CMatrix C1V = pencil.ApplyC1(V, scale);
    const CMatrix W = Orth(C0V - sigma * C1V);
    Require(W.cols() == V.cols(), "SubspaceIterationFilter: projected pencil lost rank");
    const DenseSolveResult small = SolveDense(W.adjoint() * C0V, W.adjoint() * C1V, cutoff);

    result.pairs.clear();
    SIFTraceRow row;
    row.iter = iter;
    row.max_sigma = std::numeric_limits<double>::quiet_NaN();
    row.min_sigma = std::numeric_limits<double>::quiet_NaN();
    bool all_below = true;
    bool settled = true;
    for (const auto &p : small.pairs)
    {
      SIFPair sp;
      sp.pair.lambda = p.lambda;
      const double xn = p.v.norm();
      sp.pair.v = V * (p.v / xn);
      sp.pair.backward_error = (C0V * p.v - p.lambda * (C1V * p.v)).norm() /
                               ((n0 + std::abs(p.lambda) * n1) * xn);
      sp.in_region = region.Contains(p.lambda);
      sp.sigma = RitzSigma(nep, region, p.lambda, sp.pair.v.head(n));
      sp.ghost = !(sp.sigma < config.tau_g);
      if (sp.in_region)
      {
        if (sp.ghost)
        {
          row.ghost_count++;
          settled = settled && sp.pair.backward_error <= kGhostSettled;
        }
        else
        {
          row.in_region_count++;
          all_below = all_below && sp.sigma < config.tau_r;
          row.max_sigma = std::isnan(row.max_sigma) ? sp.sigma : std::max(row.max_sigma, sp.sigma);
          row.min_sigma = std::isnan(row.min_sigma) ? sp.sigma : std::min(row.min_sigma, sp.sigma);
        }
      }
      result.pairs.push_back(std::move(sp));
    }
    result.trace.push_back(row);
    result.iterations = iter;
    if (all_below && settled && row.in_region_count == prev_count)
    {
      result.converged = true;
      break;
    }
    prev_count = row.in_region_count;
    Y = V;
  }

  return result;
}

void WriteSIFTrace(std::ostream &os, std::span<const SIFTraceRow> trace)
{
  os << "iter,in_region_count,ghost_count,max_sigma,min_sigma\n";
  os << std::setprecision(17);
  for (const auto &row : trace)
  {
    os << row.iter << ',' << row.in_region_count << ',' << row.ghost_count << ',' << row.max_sigma
       << ',' << row.min_sigma << '\n';
  }
}

}  // namespace nepkit
