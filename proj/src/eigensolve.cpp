// Copyright nepkit contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "nepkit/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace nepkit
{

namespace
{

double BackwardError(const CMatrix &C0, const CMatrix &C1, double n0, double n1, cd lambda,
                     const CVector &v)
{
  const double denom = (n0 + std::abs(lambda) * n1) * v.norm();
  return denom > 0.0 ? (C0 * v - lambda * (C1 * v)).norm() / denom : 0.0;
}

bool ByReIm(const PencilPair &a, const PencilPair &b)
{
  if (a.lambda.real() != b.lambda.real())
  {
    return a.lambda.real() < b.lambda.real();
  }
  return a.lambda.imag() < b.lambda.imag();
}

bool StandardReduction(const CMatrix &C0, const CMatrix &C1, double cutoff, double n0, double n1,
                       DenseSolveResult &out)
{
  const int N = static_cast<int>(C0.rows());
  Eigen::PartialPivLU<CMatrix> lu(C1);
  if (!(lu.rcond() > 1e-6))
  {
    return false;
  }
  CMatrix M = lu.solve(C0);
  CVector w(N);
  CMatrix vr(N, N);
  std::complex<double> dummy;
  const lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'V', N, M.data(), N, w.data(),
                                        &dummy, 1, vr.data(), N);
  if (info != 0)
  {
    return false;
  }
  std::vector<PencilPair> pairs;
  int discarded = 0;
  for (int i = 0; i < N; i++)
  {
    if (!(std::abs(w(i)) <= cutoff))
    {
      discarded++;
      continue;
    }
    PencilPair p{w(i), vr.col(i), 0.0};
    p.backward_error = BackwardError(C0, C1, n0, n1, p.lambda, p.v);
    if (!(p.backward_error <= 1e-10))
    {
      return false;
    }
    pairs.push_back(std::move(p));
  }
  out.pairs = std::move(pairs);
  out.discarded = discarded;
  out.used_qz = false;
  return true;
}

}  // namespace

DenseSolveResult SolveDense(const CMatrix &C0, const CMatrix &C1, double cutoff)
{
  Require(C0.rows() == C0.cols() && C1.rows() == C1.cols() && C0.rows() == C1.rows(),
          "SolveDense: matrices must be square and of equal size");
  DenseSolveResult out;
  const int N = static_cast<int>(C0.rows());
  if (N == 0)
  {
    return out;
  }
  const double n0 = C0.norm();
  const double n1 = C1.norm();
  if (!StandardReduction(C0, C1, cutoff, n0, n1, out))
  {
    CMatrix A = C0;
    CMatrix B = C1;
    CVector alpha(N), beta(N);
    CMatrix vr(N, N);
    std::complex<double> dummy;
    const lapack_int info = LAPACKE_zggev(LAPACK_COL_MAJOR, 'N', 'V', N, A.data(), N, B.data(), N,
                                          alpha.data(), beta.data(), &dummy, 1, vr.data(), N);
    if (info != 0)
    {
      Fail(ErrorKind::NotConverged,
           "SolveDense: QZ iteration failed (LAPACK info " + std::to_string(info) + ")");
    }
    out.used_qz = true;
    out.pairs.clear();
    out.discarded = 0;
    for (int i = 0; i < N; i++)
    {
      if (beta(i) == cd(0.0))
      {
        out.discarded++;
        continue;
      }
      const cd lambda = alpha(i) / beta(i);
      if (!(std::abs(lambda) <= cutoff))
      {
        out.discarded++;
        continue;
      }
      PencilPair p{lambda, vr.col(i), 0.0};
      p.backward_error = BackwardError(C0, C1, n0, n1, lambda, p.v);
      out.pairs.push_back(std::move(p));
    }
  }
  for (auto &p : out.pairs)
  {
    const double vn = p.v.norm();
    if (vn > 0.0)
    {
      p.v /= vn;
    }
  }
  std::stable_sort(out.pairs.begin(), out.pairs.end(), ByReIm);
  return out;
}

void NormalizeEigenvector(CVector &u)
{
  const double nrm = u.norm();
  Require(nrm > 0.0, "NormalizeEigenvector: zero vector");
  u /= nrm;
  const double tol = 1e-12 * u.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < u.size(); i++)
  {
    if (std::abs(u(i)) > tol)
    {
      u *= std::conj(u(i)) / std::abs(u(i));
      u(i) = cd(std::abs(u(i)), 0.0);
      break;
    }
  }
}

double Residual(const SplitFormNEP &nep, cd lambda, const CVector &u)
{
  const double un = u.norm();
  Require(un > 0.0, "Residual: zero vector");
  return nep.Apply(lambda, u).norm() / un;
}

double NormalizedResidual(const SplitFormNEP &nep, cd lambda, const CVector &u)
{
  const double un = u.norm();
  Require(un > 0.0, "NormalizedResidual: zero vector");
  const CVector t = nep.EvalTerms(lambda);
  double denom = 0.0;
  for (int i = 0; i < nep.NumTerms(); i++)
  {
    if (t(i) == cd(0.0))
    {
      continue;
    }
    double norm1 = 0.0;
    const SpMatrix &E = nep.matrices[i];
    for (Eigen::Index j = 0; j < E.outerSize(); j++)
    {
      double col = 0.0;
      for (SpMatrix::InnerIterator it(E, j); it; ++it)
      {
        col += std::abs(it.value());
      }
      norm1 = std::max(norm1, col);
    }
    denom += std::abs(t(i)) * norm1;
  }
  if (!(denom > 0.0))
  {
    Fail(ErrorKind::Domain, "NormalizedResidual: zero denominator");
  }
  return nep.Apply(lambda, u).norm() / (denom * un);
}

int RefinePolyEigenpair(const MatrixPolynomial &poly, cd &lambda, CVector &u, int max_steps)
{
  const cd start = lambda;
  const double max_move = 1e-6 * (1.0 + std::abs(lambda));
  u /= u.norm();
  double res = (poly.SparseAt(lambda) * u).norm();
  int accepted = 0;
  for (int step = 0; step < max_steps; step++)
  {
    CVector x;
    try
    {
      const PolyFactorization lu(poly.SparseAt(lambda), "RefinePolyEigenpair", true);
      x = lu.Solve(poly.SparseDerivativeAt(lambda) * u);
    }
    catch (const Error &e)
    {
      if (e.kind() == ErrorKind::Singular)
      {
        break;
      }
      throw;
    }
    const cd ux = u.dot(x);
    if (ux == cd(0.0) || !x.allFinite())
    {
      break;
    }
    const cd next = lambda - 1.0 / ux;
    if (!(std::abs(next - start) <= max_move))
    {
      break;
    }
    CVector v = x / x.norm();
    const double next_res = (poly.SparseAt(next) * v).norm();
    if (!(next_res < res))
    {
      break;
    }
    lambda = next;
    u = std::move(v);
    res = next_res;
    accepted++;
  }
  return accepted;
}

std::vector<Eigenpair> ExtractNepEigenpairs(const std::vector<PencilPair> &pairs,
                                            const MatrixPolynomial &poly, const SplitFormNEP &nep,
                                            const Region &region, int refine_steps, int *skipped)
{
  std::vector<Eigenpair> out;
  int skip = 0;
  for (const auto &p : pairs)
  {
    const RecoveredVector rv = RecoverEigenvector(p.v, p.lambda, poly);
    if (rv.bottom_dominated)
    {
      skip++;
      continue;
    }
    Eigenpair e;
    e.lambda = p.lambda;
    e.u = rv.u;
    e.consistency = rv.consistency;
    if (refine_steps > 0 && region.Contains(p.lambda))
    {
      RefinePolyEigenpair(poly, e.lambda, e.u, refine_steps);
    }
    NormalizeEigenvector(e.u);
    e.in_region = region.Contains(e.lambda);
    try
    {
      e.residual = Residual(nep, e.lambda, e.u);
      e.normalized_residual = NormalizedResidual(nep, e.lambda, e.u);
    }
    catch (const Error &err)
    {
      if (err.kind() != ErrorKind::Domain || e.in_region)
      {
        throw;
      }
      e.residual = std::numeric_limits<double>::quiet_NaN();
      e.normalized_residual = std::numeric_limits<double>::quiet_NaN();
    }
    out.push_back(std::move(e));
  }
  if (skipped)
  {
    *skipped = skip;
  }
  return out;
}

PoleCheck PoleFreeCheck(const RationalApproximant &xi, const Region &region)
{
  PoleCheck out;
  if (xi.b.size() <= 1)
  {
    return out;
  }
  out.poles = PolyRoots(xi.b, xi.basis->H());
  for (cd z : out.poles)
  {
    if (region.Contains(z))
    {
      out.inside.push_back(z);
    }
  }
  out.pole_free = out.inside.empty();
  return out;
}

}  // namespace nepkit
