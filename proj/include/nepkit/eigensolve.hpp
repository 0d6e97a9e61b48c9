// Copyright nepkit contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef NEPKIT_EIGENSOLVE_HPP
#define NEPKIT_EIGENSOLVE_HPP

#include <limits>
#include <vector>

#include "nepkit/linearize.hpp"
#include "nepkit/mdlawson.hpp"
#include "nepkit/nep.hpp"
#include "nepkit/types.hpp"

namespace nepkit
{

struct PencilPair
{
  cd lambda;
  CVector v;
  double backward_error = 0.0;  // ||C0 v - lambda C1 v|| / ((||C0|| + |lambda| ||C1||) ||v||)
};

struct DenseSolveResult
{
  std::vector<PencilPair> pairs;  // finite eigenvalues, sorted by (re, im)
  int discarded = 0;              // infinite or beyond the cutoff
  bool used_qz = false;
};

//
// Finite eigenpairs of C0 v = lambda C1 v. When C1 is well conditioned the
// problem is reduced to C1^{-1} C0 and solved by the standard dense
// eigensolver; the result is accepted only if every pair passes the
// backward-error gate (1e-10), otherwise the QZ algorithm is used.
// Eigenvalues with |lambda| > cutoff are discarded.
//
DenseSolveResult SolveDense(const CMatrix &C0, const CMatrix &C1,
                            double cutoff = std::numeric_limits<double>::infinity());

// 2-norm 1, first component above 1e-12 ||u||_inf rotated onto the positive reals.
void NormalizeEigenvector(CVector &u);

// ||T(lambda) u|| / ||u|| with exact scalar functions.
double Residual(const SplitFormNEP &nep, cd lambda, const CVector &u);

// ||T(lambda) u|| / (sum_i |t_i(lambda)| ||E_i||_1 ||u||).
double NormalizedResidual(const SplitFormNEP &nep, cd lambda, const CVector &u);

struct Eigenpair
{
  cd lambda;
  CVector u;
  double residual = 0.0;
  double normalized_residual = 0.0;
  double consistency = 0.0;
  bool in_region = false;
};

//
// Newton steps on P(lambda) u = 0 starting from (lambda, u) (nonlinear
// inverse iteration). A step is kept only while ||P(lambda) u|| / ||u||
// decreases and the total move stays below 1e-6 (1 + |lambda|). Returns
// the number of accepted steps.
//
int RefinePolyEigenpair(const MatrixPolynomial &poly, cd &lambda, CVector &u, int max_steps);

//
// Leading-block recovery, normalization, residuals and region flag for each
// pencil pair. In-region pairs are first polished with refine_steps Newton
// steps on the matrix polynomial. Bottom-dominated vectors are skipped
// (count returned through skipped). A scalar function that is not finite at
// an eigenvalue outside the region yields NaN residuals instead of an error.
//
std::vector<Eigenpair> ExtractNepEigenpairs(const std::vector<PencilPair> &pairs,
                                            const MatrixPolynomial &poly, const SplitFormNEP &nep,
                                            const Region &region, int refine_steps = 2,
                                            int *skipped = nullptr);

// |lambda| limit used to drop spurious huge eigenvalues.
inline double InfiniteCutoff(const Region &region)
{
  return 1e12 * (1.0 + std::abs(region.center) + region.radius);
}

struct PoleCheck
{
  bool pole_free = true;
  std::vector<cd> inside;  // roots of the denominator in the closed region
  std::vector<cd> poles;   // all roots of the denominator
};

PoleCheck PoleFreeCheck(const RationalApproximant &xi, const Region &region);

}  // namespace nepkit

#endif  // NEPKIT_EIGENSOLVE_HPP
