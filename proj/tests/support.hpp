// Copyright nepkit contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef NEPKIT_TESTS_SUPPORT_HPP
#define NEPKIT_TESTS_SUPPORT_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "nepkit/linearize.hpp"
#include "nepkit/mdlawson.hpp"
#include "nepkit/nep.hpp"
#include "nepkit/types.hpp"
#include "nepkit/va_basis.hpp"

namespace nepkit::test
{

// Deterministic random source shared by the randomized tests.
class Rng
{
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double Uniform(double lo = -1.0, double hi = 1.0)
  {
    return std::uniform_real_distribution<double>(lo, hi)(gen_);
  }
  int Int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }
  cd Complex() { return {normal_(gen_), normal_(gen_)}; }

  CMatrix Matrix(int rows, int cols)
  {
    CMatrix A(rows, cols);
    for (int j = 0; j < cols; j++)
    {
      for (int i = 0; i < rows; i++)
      {
        A(i, j) = Complex();
      }
    }
    return A;
  }
  CVector Vector(int n) { return Matrix(n, 1).col(0); }

  // Point on the probability simplex with all entries positive.
  std::vector<double> Simplex(int m)
  {
    std::vector<double> w(m);
    double sum = 0.0;
    for (auto &x : w)
    {
      x = Uniform(0.05, 1.0);
      sum += x;
    }
    for (auto &x : w)
    {
      x /= sum;
    }
    return w;
  }

private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

inline std::vector<cd> CircleNodes(cd center, double radius, int m)
{
  std::vector<cd> x(m);
  for (int l = 0; l < m; l++)
  {
    x[l] = center + radius * std::polar(1.0, 2.0 * std::numbers::pi * l / m);
  }
  return x;
}

inline SpMatrix Sparse(const CMatrix &A)
{
  return A.sparseView();
}

// Random matrix polynomial in a V+A basis built on a circle.
inline MatrixPolynomial RandomPoly(Rng &rng, int degree, int n)
{
  const VABasis basis = BuildBasis(CircleNodes(rng.Complex(), 1.0 + rng.Uniform(0.0, 2.0),
                                               degree + 8),
                                   degree);
  MatrixPolynomial P;
  P.H = basis.H();
  P.k = basis.LeadingCoeffs();
  for (int j = 0; j <= degree; j++)
  {
    CMatrix A = rng.Matrix(n, n);
    if (j == degree)
    {
      A += 4.0 * CMatrix::Identity(n, n);
    }
    P.coeffs.push_back(Sparse(A));
  }
  return P;
}

// P(x) evaluated directly as sum_j theta_j(x) A_j.
inline CMatrix DirectEval(const MatrixPolynomial &P, cd x)
{
  const std::vector<cd> pt{x};
  const CMatrix th = EvalRecurrence(P.H, pt);
  CMatrix out = CMatrix::Zero(P.Dim(), P.Dim());
  for (int j = 0; j <= P.Degree(); j++)
  {
    out += th(0, j) * CMatrix(P.coeffs[j]);
  }
  return out;
}

inline SampleSet Samples(const SplitFormNEP &nep, const std::vector<cd> &nodes)
{
  SampleSet s;
  s.nodes = nodes;
  s.values.resize(static_cast<Eigen::Index>(nodes.size()), nep.NumTerms());
  for (std::size_t l = 0; l < nodes.size(); l++)
  {
    s.values.row(static_cast<Eigen::Index>(l)) = nep.EvalTerms(nodes[l]).transpose();
  }
  return s;
}

inline double RelDiff(const CMatrix &A, const CMatrix &B)
{
  const double scale = std::max(A.norm(), B.norm());
  return scale == 0.0 ? 0.0 : (A - B).norm() / scale;
}

inline SampleSet RandomSamples(Rng &rng, int m, int s)
{
  SampleSet S;
  S.nodes = CircleNodes(rng.Complex(), rng.Uniform(0.5, 3.0), m);
  S.values = rng.Matrix(m, s);
  return S;
}

// Smooth random fitting problem: t_i(x) = exp(alpha_i x) / (x - pole_i), poles off the nodes.
inline SampleSet SmoothSamples(Rng &rng, int m, int s)
{
  SampleSet S;
  S.nodes = CircleNodes(0.0, 1.0, m);
  S.values.resize(m, s);
  for (int i = 0; i < s; i++)
  {
    const cd alpha = 0.5 * rng.Complex();
    const cd pole = std::polar(rng.Uniform(1.3, 2.5), rng.Uniform(0.0, 6.28));
    for (int l = 0; l < m; l++)
    {
      S.values(l, i) = std::exp(alpha * S.nodes[l]) / (S.nodes[l] - pole);
    }
  }
  return S;
}

// Smallest eigenvalue of the weighted Hermitian pencil (S(w), B(w)) in the
// basis coefficients of the denominator, with the numerators eliminated.
inline double DenseDualOracle(const SampleSet &S, const VABasis &basis, const DegreeSpec &spec,
                       const std::vector<double> &w)
{
  const int m = S.NumNodes();
  const int d1 = spec.denominator + 1;
  RVector sw(m);
  for (int l = 0; l < m; l++)
  {
    sw(l) = std::sqrt(w[l]);
  }
  const CMatrix Wq = sw.asDiagonal() * basis.Q().leftCols(d1);
  CMatrix Sw = CMatrix::Zero(d1, d1);
  for (int i = 0; i < S.NumTerms(); i++)
  {
    const CMatrix Wp = sw.asDiagonal() * basis.Q().leftCols(spec.numerator[i] + 1);
    const CMatrix M = S.values.col(i).asDiagonal() * Wq;
    // Projector onto the complement of span(Wp) via the pseudo-inverse.
    const CMatrix proj = Wp * Wp.completeOrthogonalDecomposition().solve(M);
    Sw += M.adjoint() * (M - proj);
  }
  Sw = 0.5 * (Sw + Sw.adjoint()).eval();
  const CMatrix B = Wq.adjoint() * Wq;
  Eigen::GeneralizedSelfAdjointEigenSolver<CMatrix> es(Sw, B);
  return es.eigenvalues()(0);
}

// Block vector [theta_0(x) B; ...; theta_{g-1}(x) B].
inline CMatrix Kron(const CVector &theta, int g, const CMatrix &B)
{
  CMatrix out(static_cast<Eigen::Index>(g) * B.rows(), B.cols());
  for (int j = 0; j < g; j++)
  {
    out.middleRows(static_cast<Eigen::Index>(j) * B.rows(), B.rows()) = theta(j) * B;
  }
  return out;
}

// Dense check of (C0 - x C1)(theta(x) (x) I) = -e_g (x) k_{g-1} P(x).
inline double IdentityResidual(const StructuredPencil &pencil, cd x)
{
  const auto &P = pencil.Poly();
  const int g = P.Degree();
  const int n = P.Dim();
  const CMatrix C0 = pencil.DenseC0();
  const CMatrix C1 = pencil.DenseC1();
  const CMatrix T = Kron(P.Theta(x), g, CMatrix::Identity(n, n));
  CMatrix R = (C0 - x * C1) * T;
  R.bottomRows(n) += P.k[g - 1] * DirectEval(P, x);
  return R.norm() / ((C0.norm() + std::abs(x) * C1.norm()) * T.norm());
}

}  // namespace nepkit::test

#endif  // NEPKIT_TESTS_SUPPORT_HPP
