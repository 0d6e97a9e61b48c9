// Copyright nepkit contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "nepkit/linearize.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/SparseLU>

#include "nepkit/problems.hpp"
#include "nepkit/va_basis.hpp"

namespace nepkit
{

CVector MatrixPolynomial::Theta(cd x) const
{
  const cd pt[1] = {x};
  return EvalRecurrence(H, pt).row(0).transpose();
}

CVector MatrixPolynomial::ThetaDerivative(cd x) const
{
  const int g = static_cast<int>(H.cols());
  const CVector th = Theta(x);
  CVector dth = CVector::Zero(g + 1);
  for (int j = 0; j < g; j++)
  {
    cd acc = th(j) + x * dth(j);
    for (int i = 0; i <= j; i++)
    {
      acc -= H(i, j) * dth(i);
    }
    dth(j + 1) = acc / H(j + 1, j);
  }
  return dth;
}

SpMatrix MatrixPolynomial::SparseDerivativeAt(cd x) const
{
  const CVector dth = ThetaDerivative(x);
  SpMatrix P(Dim(), Dim());
  for (int j = 1; j <= Degree(); j++)
  {
    P += dth(j) * coeffs[j];
  }
  P.makeCompressed();
  return P;
}

SpMatrix MatrixPolynomial::SparseAt(cd x) const
{
  const CVector th = Theta(x);
  SpMatrix P(Dim(), Dim());
  for (int j = 0; j <= Degree(); j++)
  {
    P += th(j) * coeffs[j];
  }
  P.makeCompressed();
  return P;
}

CMatrix MatrixPolynomial::DenseAt(cd x) const
{
  const CVector th = Theta(x);
  CMatrix P = CMatrix::Zero(Dim(), Dim());
  for (int j = 0; j <= Degree(); j++)
  {
    P += th(j) * CMatrix(coeffs[j]);
  }
  return P;
}

MatrixPolynomial MatrixPolynomial::Trimmed(double rel) const
{
  double amax = 0.0;
  for (const auto &A : coeffs)
  {
    amax = std::max(amax, A.norm());
  }
  int g = Degree();
  while (g >= 1 && !(coeffs[g].norm() >= rel * amax))
  {
    g--;
  }
  MatrixPolynomial out;
  out.coeffs.assign(coeffs.begin(), coeffs.begin() + g + 1);
  out.H = H.topLeftCorner(g + 1, g);
  out.k.assign(k.begin(), k.begin() + g + 1);
  return out;
}

MatrixPolynomial Assemble(const RationalApproximant &xi, const SplitFormNEP &nep)
{
  nep.Validate();
  Require(xi.NumTerms() == nep.NumTerms(),
          "Assemble: approximant has " + std::to_string(xi.NumTerms()) + " terms, problem has " +
              std::to_string(nep.NumTerms()));
  const int g = xi.basis->Degree();
  const int n = nep.Dim();
  MatrixPolynomial P;
  P.H = xi.basis->H();
  P.k = xi.basis->LeadingCoeffs();
  P.coeffs.assign(g + 1, SpMatrix(n, n));
  for (int i = 0; i < nep.NumTerms(); i++)
  {
    const CVector a = xi.PaddedNumerator(i);
    for (int j = 0; j <= g; j++)
    {
      if (a(j) != cd(0.0))
      {
        P.coeffs[j] += a(j) * nep.matrices[i];
      }
    }
  }
  for (auto &A : P.coeffs)
  {
    A.makeCompressed();
  }
  return P;
}

StructuredPencil::StructuredPencil(const MatrixPolynomial &poly) : poly_(poly.Trimmed())
{
  const int g = poly_.Degree();
  Require(g >= 1, "StructuredPencil: polynomial degree is " + std::to_string(g) +
                      " after trimming; a pencil needs degree >= 1");
  const cd kg1 = poly_.k[g - 1];
  const cd kg = poly_.k[g];
  const SpMatrix &Ag = poly_.coeffs[g];
  bottom_.resize(g);
  for (int j = 0; j < g; j++)
  {
    bottom_[j] = -kg1 * poly_.coeffs[j] + (kg * poly_.H(j, g - 1)) * Ag;
    bottom_[j].makeCompressed();
  }
  c1_last_ = kg * Ag;
  c1_last_.makeCompressed();
}

CMatrix StructuredPencil::ApplyC0(const CMatrix &X, double bottom_scale) const
{
  const int g = Degree();
  const int n = Dim();
  Require(X.rows() == Size(), "StructuredPencil::ApplyC0: row count mismatch");
  CMatrix Y = CMatrix::Zero(X.rows(), X.cols());
  const CMatrix &H = poly_.H;
  for (int r = 0; r + 1 < g; r++)
  {
    auto Yr = Y.middleRows(static_cast<Eigen::Index>(r) * n, n);
    for (int i = 0; i <= r + 1; i++)
    {
      Yr += H(i, r) * X.middleRows(static_cast<Eigen::Index>(i) * n, n);
    }
  }
  auto Yb = Y.middleRows(static_cast<Eigen::Index>(g - 1) * n, n);
  for (int j = 0; j < g; j++)
  {
    Yb += bottom_[j] * X.middleRows(static_cast<Eigen::Index>(j) * n, n);
  }
  if (bottom_scale != 1.0)
  {
    Yb *= bottom_scale;
  }
  return Y;
}

CMatrix StructuredPencil::ApplyC1(const CMatrix &X, double bottom_scale) const
{
  const int g = Degree();
  const int n = Dim();
  Require(X.rows() == Size(), "StructuredPencil::ApplyC1: row count mismatch");
  CMatrix Y(X.rows(), X.cols());
  const auto top = static_cast<Eigen::Index>(g - 1) * n;
  Y.topRows(top) = X.topRows(top);
  Y.bottomRows(n) = bottom_scale * (c1_last_ * X.bottomRows(n));
  return Y;
}

CMatrix StructuredPencil::DenseC0(double bottom_scale) const
{
  const int g = Degree();
  const int n = Dim();
  CMatrix C0 = CMatrix::Zero(Size(), Size());
  const CMatrix I = CMatrix::Identity(n, n);
  for (int r = 0; r + 1 < g; r++)
  {
    for (int i = 0; i <= r + 1; i++)
    {
      C0.block(static_cast<Eigen::Index>(r) * n, static_cast<Eigen::Index>(i) * n, n, n) =
          poly_.H(i, r) * I;
    }
  }
  for (int j = 0; j < g; j++)
  {
    C0.block(static_cast<Eigen::Index>(g - 1) * n, static_cast<Eigen::Index>(j) * n, n, n) =
        bottom_scale * CMatrix(bottom_[j]);
  }
  return C0;
}

CMatrix StructuredPencil::DenseC1(double bottom_scale) const
{
  const int n = Dim();
  CMatrix C1 = CMatrix::Identity(Size(), Size());
  C1.bottomRightCorner(n, n) = bottom_scale * CMatrix(c1_last_);
  return C1;
}

double StructuredPencil::NormC0(double bottom_scale) const
{
  const int g = Degree();
  double s = 0.0;
  for (int r = 0; r + 1 < g; r++)
  {
    for (int i = 0; i <= r + 1; i++)
    {
      s += std::norm(poly_.H(i, r)) * Dim();
    }
  }
  for (const auto &B : bottom_)
  {
    s += bottom_scale * bottom_scale * B.squaredNorm();
  }
  return std::sqrt(s);
}

double StructuredPencil::NormC1(double bottom_scale) const
{
  return std::sqrt(static_cast<double>(Degree() - 1) * Dim() +
                   bottom_scale * bottom_scale * c1_last_.squaredNorm());
}

double StructuredPencil::BalancingScale() const
{
  double bottom = c1_last_.squaredNorm();
  for (const auto &B : bottom_)
  {
    bottom += B.squaredNorm();
  }
  const double top = std::max(1.0, poly_.H.norm()) * std::sqrt(static_cast<double>(Dim()));
  return bottom > 0.0 ? top / std::sqrt(bottom) : 1.0;
}

void StructuredPencil::Export(const std::filesystem::path &c0_path,
                              const std::filesystem::path &c1_path) const
{
  WriteMatrixMarketDense(c0_path, DenseC0());
  WriteMatrixMarketDense(c1_path, DenseC1());
}

double VerifyLinearization(const StructuredPencil &pencil, cd x0)
{
  const int g = pencil.Degree();
  const int n = pencil.Dim();
  const auto &P = pencil.Poly();
  const CVector th = P.Theta(x0);
  CMatrix T(pencil.Size(), n);
  for (int j = 0; j < g; j++)
  {
    T.middleRows(static_cast<Eigen::Index>(j) * n, n) = th(j) * CMatrix::Identity(n, n);
  }
  CMatrix R = pencil.ApplyC0(T) - x0 * pencil.ApplyC1(T);
  R.bottomRows(n) += P.k[g - 1] * P.DenseAt(x0);
  return R.norm() / ((pencil.NormC0() + std::abs(x0) * pencil.NormC1()) * T.norm());
}

RecoveredVector RecoverEigenvector(const CVector &v, cd lambda, const MatrixPolynomial &poly)
{
  const int n = poly.Dim();
  const int g = poly.Degree();
  Require(v.size() == static_cast<Eigen::Index>(g) * n,
          "RecoverEigenvector: vector length does not match the pencil");
  const double vn = v.norm();
  Require(vn > 0.0, "RecoverEigenvector: zero vector");
  const CVector th = poly.Theta(lambda);
  RecoveredVector out;
  out.u = v.head(n);
  for (int i = 1; i < g; i++)
  {
    const double d = (v.segment(static_cast<Eigen::Index>(i) * n, n) - th(i) * out.u).norm();
    out.consistency = std::max(out.consistency, d / vn);
  }
  out.bottom_dominated = out.u.norm() < 1e-10 * vn;
  return out;
}

struct PolyFactorization::Impl
{
  bool dense = true;
  Eigen::PartialPivLU<CMatrix> dlu;
  Eigen::SparseLU<SpMatrix, Eigen::COLAMDOrdering<int>> slu;
};

PolyFactorization::PolyFactorization(const SpMatrix &A, const std::string &label,
                                     bool near_singular_ok)
    : impl_(std::make_unique<Impl>()), n_(static_cast<int>(A.rows()))
{
  Require(A.rows() == A.cols(), "PolyFactorization: matrix must be square");
  const double density = n_ > 0 ? static_cast<double>(A.nonZeros()) / n_ / n_ : 1.0;
  impl_->dense = n_ <= 500 || density > 0.1;
  const double anorm = A.norm();
  if (!(anorm > 0.0))
  {
    Fail(ErrorKind::Singular, label + ": matrix is zero");
  }
  if (impl_->dense)
  {
    impl_->dlu.compute(CMatrix(A));
    const double rc = impl_->dlu.rcond();
    if (!near_singular_ok && !(rc > 1e-14))
    {
      Fail(ErrorKind::Singular,
           label + ": matrix is numerically singular (rcond " + std::to_string(rc) + ")");
    }
    return;
  }
  impl_->slu.compute(A);
  if (impl_->slu.info() != Eigen::Success)
  {
    Fail(ErrorKind::Singular, label + ": sparse LU failed (" + impl_->slu.lastErrorMessage() + ")");
  }
  if (near_singular_ok)
  {
    return;
  }
  // Probe solve: a tiny pivot shows up as a blown-up or inaccurate solution.
  const CVector b = CVector::Ones(n_);
  const CVector x = impl_->slu.solve(b);
  const double xn = x.norm();
  if (!std::isfinite(xn) || (A * x - b).norm() > 1e-8 * b.norm() ||
      xn * anorm > 1e14 * b.norm())
  {
    Fail(ErrorKind::Singular, label + ": matrix is numerically singular");
  }
}

PolyFactorization::~PolyFactorization() = default;
PolyFactorization::PolyFactorization(PolyFactorization &&) noexcept = default;
PolyFactorization &PolyFactorization::operator=(PolyFactorization &&) noexcept = default;

CMatrix PolyFactorization::Solve(const CMatrix &B) const
{
  if (impl_->dense)
  {
    return impl_->dlu.solve(B);
  }
  return impl_->slu.solve(B);
}

BlockLU::BlockLU(const StructuredPencil &pencil, cd mu)
    : pencil_(&pencil), mu_(mu), theta_(pencil.Poly().Theta(mu)),
      lu_(pencil.Poly().SparseAt(mu),
          "P(mu) at mu = (" + std::to_string(mu.real()) + ", " + std::to_string(mu.imag()) + ")")
{
}

CMatrix BlockLU::ShiftInvert(const CMatrix &Y) const
{
  const auto &P = pencil_->Poly();
  const int g = P.Degree();
  const int n = P.Dim();
  const auto cols = Y.cols();
  Require(Y.rows() == pencil_->Size(), "BlockLU::ShiftInvert: row count mismatch");
  const CMatrix &H = P.H;
  auto blk = [n](const CMatrix &M, int i) { return M.middleRows(static_cast<Eigen::Index>(i) * n, n); };

  // Forward recurrence for X_1..X_{g-1} (X_0 = 0).
  std::vector<CMatrix> X(g, CMatrix::Zero(n, cols));
  for (int r = 0; r + 1 < g; r++)
  {
    CMatrix acc = mu_ * X[r] - blk(Y, r);
    for (int i = 1; i <= r; i++)
    {
      acc -= H(i, r) * X[i];
    }
    X[r + 1] = acc / H(r + 1, r);
  }

  // k_{g-1} P(mu) Z_0 = k_g A_g Y_{g-1} - B(X).
  const cd kg1 = P.k[g - 1];
  const cd kg = P.k[g];
  const SpMatrix &Ag = P.coeffs[g];
  CMatrix sumA = CMatrix::Zero(n, cols);
  CMatrix sumH = -mu_ * X[g - 1];
  for (int j = 1; j < g; j++)
  {
    sumA += P.coeffs[j] * X[j];
    sumH += H(j, g - 1) * X[j];
  }
  CMatrix rhs = kg * (Ag * (CMatrix(blk(Y, g - 1)) + sumH)) - kg1 * sumA;
  const CMatrix Z0 = lu_.Solve(rhs / kg1);

  CMatrix Z(Y.rows(), cols);
  Z.topRows(n) = Z0;
  for (int j = 1; j < g; j++)
  {
    Z.middleRows(static_cast<Eigen::Index>(j) * n, n) = X[j] + theta_(j) * Z0;
  }
  return Z;
}

CMatrix BlockLU::DenseL() const
{
  const auto &P = pencil_->Poly();
  const int g = P.Degree();
  const int n = P.Dim();
  const CMatrix &H = P.H;
  const CMatrix I = CMatrix::Identity(n, n);
  CMatrix L = CMatrix::Zero(pencil_->Size(), pencil_->Size());
  auto at = [&](int r, int c) -> decltype(auto)
  { return L.block(static_cast<Eigen::Index>(r) * n, static_cast<Eigen::Index>(c) * n, n, n); };
  // Unknown ordering [X_1, ..., X_{g-1}, Z_0]; X_i sits in block column i - 1.
  for (int r = 0; r + 1 < g; r++)
  {
    for (int i = 1; i < r; i++)
    {
      at(r, i - 1) = -H(i, r) * I;
    }
    if (r >= 1)
    {
      at(r, r - 1) = (mu_ - H(r, r)) * I;
    }
    at(r, r) = -H(r + 1, r) * I;
  }
  const cd kg1 = P.k[g - 1];
  const cd kg = P.k[g];
  const CMatrix Ag(P.coeffs[g]);
  for (int j = 1; j < g; j++)
  {
    CMatrix l = kg1 * CMatrix(P.coeffs[j]) - kg * H(j, g - 1) * Ag;
    if (j == g - 1)
    {
      l += mu_ * kg * Ag;
    }
    at(g - 1, j - 1) = l;
  }
  at(g - 1, g - 1) = kg1 * P.DenseAt(mu_);
  return L;
}

CMatrix BlockLU::DenseU() const
{
  const int g = pencil_->Degree();
  const int n = pencil_->Dim();
  CMatrix U = CMatrix::Identity(pencil_->Size(), pencil_->Size());
  for (int j = 1; j < g; j++)
  {
    U.block(static_cast<Eigen::Index>(j - 1) * n, static_cast<Eigen::Index>(g - 1) * n, n, n) =
        -theta_(j) * CMatrix::Identity(n, n);
  }
  return U;
}

CMatrix BlockLU::DenseS() const
{
  const int g = pencil_->Degree();
  const int n = pencil_->Dim();
  CMatrix S = CMatrix::Zero(pencil_->Size(), pencil_->Size());
  // (M S) has block columns [M_1, ..., M_{g-1}, M_0].
  for (int c = 0; c < g; c++)
  {
    const int src = (c + 1) % g;
    S.block(static_cast<Eigen::Index>(src) * n, static_cast<Eigen::Index>(c) * n, n, n) =
        CMatrix::Identity(n, n);
  }
  return S;
}

CMatrix GramMatrix(const SplitFormNEP &nep)
{
  nep.Validate();
  const int s = nep.NumTerms();
  CMatrix G(s, s);
  for (int i = 0; i < s; i++)
  {
    for (int j = 0; j <= i; j++)
    {
      const cd v = nep.matrices[i].conjugate().cwiseProduct(nep.matrices[j]).sum();
      G(i, j) = v;
      G(j, i) = std::conj(v);
    }
  }
  return G;
}

double GramNorm(const CMatrix &G)
{
  Eigen::SelfAdjointEigenSolver<CMatrix> es(G, Eigen::EigenvaluesOnly);
  return std::max(0.0, es.eigenvalues().maxCoeff());
}

double ErrorBound(const CMatrix &G, double e_max)
{
  Require(e_max >= 0.0, "ErrorBound: negative error");
  return std::sqrt(GramNorm(G) * e_max);
}

CorkCoefficients Cork(const MatrixPolynomial &poly)
{
  const int g = poly.Degree();
  Require(g >= 1, "Cork: degree must be at least 1");
  const CMatrix &H = poly.H;
  const cd hlast = H(g, g - 1);
  const SpMatrix &Ag = poly.coeffs[g];
  CorkCoefficients out;
  out.A.resize(g);
  out.B.resize(g);
  for (int i = 0; i < g; i++)
  {
    out.A[i] = poly.coeffs[i] - (H(i, g - 1) / hlast) * Ag;
    out.B[i] = SpMatrix(poly.Dim(), poly.Dim());
  }
  out.B[g - 1] = (-1.0 / hlast) * Ag;
  out.M = H.topLeftCorner(g, g - 1).transpose();
  out.N = CMatrix::Zero(g - 1, g);
  out.N.leftCols(g - 1) = CMatrix::Identity(g - 1, g - 1);
  return out;
}

std::vector<cd> PolyRoots(const CVector &coeffs, const CMatrix &H)
{
  Require(coeffs.size() >= 1 && coeffs.size() <= H.cols() + 1,
          "PolyRoots: coefficient count does not match the basis");
  const double cmax = coeffs.cwiseAbs().maxCoeff();
  Require(cmax > 0.0, "PolyRoots: all coefficients are zero");
  int g = static_cast<int>(coeffs.size()) - 1;
  while (g >= 1 && !(std::abs(coeffs(g)) >= 1e-14 * cmax))
  {
    g--;
  }
  if (g == 0)
  {
    return {};
  }
  MatrixPolynomial P;
  P.H = H.topLeftCorner(g + 1, g);
  P.k = LeadingCoeffs(P.H);
  for (int j = 0; j <= g; j++)
  {
    SpMatrix c(1, 1);
    c.insert(0, 0) = coeffs(j);
    P.coeffs.push_back(c);
  }
  const StructuredPencil pencil(P);
  // C1 = diag(1, ..., 1, k_g c_g) is nonsingular: reduce to a standard problem.
  CMatrix C = pencil.DenseC0();
  C.row(g - 1) /= pencil.LastC1Block().coeff(0, 0);
  Eigen::ComplexEigenSolver<CMatrix> es(C, false);
  if (es.info() != Eigen::Success)
  {
    Fail(ErrorKind::NotConverged, "PolyRoots: eigenvalue iteration did not converge");
  }
  std::vector<cd> roots(es.eigenvalues().data(), es.eigenvalues().data() + g);
  std::sort(roots.begin(), roots.end(), [](cd a, cd b)
            { return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag(); });
  return roots;
}

}  // namespace nepkit
