// Copyright nepkit contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef NEPKIT_LINEARIZE_HPP
#define NEPKIT_LINEARIZE_HPP

#include <filesystem>
#include <memory>
#include <vector>

#include "nepkit/mdlawson.hpp"
#include "nepkit/nep.hpp"
#include "nepkit/types.hpp"

namespace nepkit
{

//
// P(x) = sum_{j=0}^{g} theta_j(x) A_j, with theta_j given by the recurrence
// matrix H ((g+1) x g) and leading coefficients k_0..k_g.
//
struct MatrixPolynomial
{
  std::vector<SpMatrix> coeffs;
  CMatrix H;
  std::vector<cd> k;

  int Degree() const { return static_cast<int>(coeffs.size()) - 1; }
  int Dim() const { return coeffs.empty() ? 0 : static_cast<int>(coeffs.front().rows()); }

  // theta_0(x)..theta_g(x).
  CVector Theta(cd x) const;
  // theta_0'(x)..theta_g'(x).
  CVector ThetaDerivative(cd x) const;
  SpMatrix SparseAt(cd x) const;
  CMatrix DenseAt(cd x) const;
  SpMatrix SparseDerivativeAt(cd x) const;

  // Drops trailing A_j with ||A_j||_F < rel * max_j ||A_j||_F and shrinks
  // H and k to match.
  MatrixPolynomial Trimmed(double rel = 1e-14) const;
};

// A_j = sum_i a_{i,j} E_i (numerators zero-padded to the basis degree).
MatrixPolynomial Assemble(const RationalApproximant &xi, const SplitFormNEP &nep);

//
// Block pencil (C0, C1) of size g n. Block rows 0..g-2 encode the basis
// recurrence,
//
//   C0[r, i] = H(i, r) I,  C1[r, r] = I,
//
// and the last block row carries the coefficients,
//
//   C0[g-1, j] = -k_{g-1} A_j + k_g H(j, g-1) A_g,  C1[g-1, g-1] = k_g A_g,
//
// so that (C0 - x C1)(theta(x) (x) I) = -k_{g-1} e_g (x) P(x). The
// polynomial is trimmed on construction; a degree below 1 is rejected.
//
class StructuredPencil
{
public:
  explicit StructuredPencil(const MatrixPolynomial &poly);

  const MatrixPolynomial &Poly() const { return poly_; }
  int Degree() const { return poly_.Degree(); }
  int Dim() const { return poly_.Dim(); }
  int Size() const { return Degree() * Dim(); }

  // Last block row of C0 (block j) and the trailing block k_g A_g of C1.
  const SpMatrix &BottomBlock(int j) const { return bottom_[j]; }
  const SpMatrix &LastC1Block() const { return c1_last_; }

  // Products and dense forms with the last block row multiplied by
  // bottom_scale; the eigenpairs do not depend on it.
  CMatrix ApplyC0(const CMatrix &X, double bottom_scale = 1.0) const;
  CMatrix ApplyC1(const CMatrix &X, double bottom_scale = 1.0) const;

  CMatrix DenseC0(double bottom_scale = 1.0) const;
  CMatrix DenseC1(double bottom_scale = 1.0) const;
  // Frobenius norms.
  double NormC0(double bottom_scale = 1.0) const;
  double NormC1(double bottom_scale = 1.0) const;

  // Scale that brings the last block row to the size of the recurrence rows.
  double BalancingScale() const;

  // Matrix Market array files for (C0, C1).
  void Export(const std::filesystem::path &c0_path, const std::filesystem::path &c1_path) const;

private:
  MatrixPolynomial poly_;
  std::vector<SpMatrix> bottom_;
  SpMatrix c1_last_;
};

// Relative residual of the linearization identity at x0.
double VerifyLinearization(const StructuredPencil &pencil, cd x0);

struct RecoveredVector
{
  CVector u;
  double consistency = 0.0;
  bool bottom_dominated = false;  // ||u|| < 1e-10 ||v||
};

// u = leading block of v; consistency = max_i ||v_i - theta_i(lambda) v_0|| / ||v||.
RecoveredVector RecoverEigenvector(const CVector &v, cd lambda, const MatrixPolynomial &poly);

//
// LU factorization of an n x n matrix polynomial value. Dense partial
// pivoting for small or dense systems, sparse LU otherwise. Throws
// ErrorKind::Singular when the matrix is numerically singular, unless
// near_singular_ok is set (inverse iteration), in which case only a failed
// factorization is reported.
//
class PolyFactorization
{
public:
  PolyFactorization(const SpMatrix &A, const std::string &label, bool near_singular_ok = false);
  ~PolyFactorization();
  PolyFactorization(PolyFactorization &&) noexcept;
  PolyFactorization &operator=(PolyFactorization &&) noexcept;

  CMatrix Solve(const CMatrix &B) const;
  int Dim() const { return n_; }

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int n_ = 0;
};

//
// (mu C1 - C0) S = L(mu) U(mu), where S moves block column 0 to the end.
// Only P(mu) is factorized; the other blocks come from H, theta(mu) and the
// coefficients.
//
class BlockLU
{
public:
  BlockLU(const StructuredPencil &pencil, cd mu);

  cd Shift() const { return mu_; }

  // Z with (mu C1 - C0) Z = C1 Y, one n x n solve per call.
  CMatrix ShiftInvert(const CMatrix &Y) const;

  // Dense factors for checking on small instances.
  CMatrix DenseL() const;
  CMatrix DenseU() const;
  CMatrix DenseS() const;

private:
  const StructuredPencil *pencil_;
  cd mu_;
  CVector theta_;
  PolyFactorization lu_;
};

// G(i, j) = tr(E_j^H E_i).
CMatrix GramMatrix(const SplitFormNEP &nep);

double GramNorm(const CMatrix &G);

// sqrt(||G||_2 e_max).
double ErrorBound(const CMatrix &G, double e_max);

struct CorkCoefficients
{
  std::vector<SpMatrix> A;  // A~_0..A~_{g-1}
  std::vector<SpMatrix> B;  // B~_0..B~_{g-1}
  CMatrix M;                // (g-1) x g
  CMatrix N;                // (g-1) x g
};

CorkCoefficients Cork(const MatrixPolynomial &poly);

// Roots of sum_j c_j theta_j(x) with theta_j from H. Trailing coefficients
// below 1e-14 max|c| are dropped first; an all-zero vector is rejected.
std::vector<cd> PolyRoots(const CVector &coeffs, const CMatrix &H);

}  // namespace nepkit

#endif  // NEPKIT_LINEARIZE_HPP
