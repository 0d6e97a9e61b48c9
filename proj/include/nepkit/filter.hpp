// Copyright nepkit contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef NEPKIT_FILTER_HPP
#define NEPKIT_FILTER_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "nepkit/eigensolve.hpp"
#include "nepkit/linearize.hpp"
#include "nepkit/nep.hpp"
#include "nepkit/types.hpp"

namespace nepkit
{

//
// k-point trapezoid rule on the circle |s - c| = r:
//
//   s_j = c + r e^{i theta_j},  g_j = (r / k) e^{i theta_j},  theta_j = (2j - 1) pi / k.
//
struct QuadratureRule
{
  cd center;
  double radius = 0.0;
  std::vector<cd> poles;
  std::vector<cd> weights;

  int Order() const { return static_cast<int>(poles.size()); }
};

QuadratureRule Quadrature(cd center, double radius, int k);

// sum_j g_j / (s_j - x); equals 1 / (1 + ((x - c) / r)^k). Throws
// ErrorKind::PoleHit when x coincides with a pole.
cd ScalarFilter(const QuadratureRule &rule, cd x);

// Z with (mu C1 - C0) Z = C1 Y.
CMatrix ShiftInvert(const StructuredPencil &pencil, cd mu, const CMatrix &Y);

//
// Rational filter sum_j g_j (s_j C1 - C0)^{-1} C1 applied through the
// structured shift-invert. The k factorizations of P(s_j) are built once
// and reused by every Apply call.
//
class RationalFilter
{
public:
  RationalFilter(const StructuredPencil &pencil, QuadratureRule rule);

  const QuadratureRule &Rule() const { return rule_; }

  CMatrix Apply(const CMatrix &Y) const;

private:
  QuadratureRule rule_;
  std::vector<BlockLU> lu_;
};

CMatrix ApplyFilter(const StructuredPencil &pencil, const QuadratureRule &rule, const CMatrix &Y);

struct SIFConfig
{
  int subspace = 60;       // number of columns of the search space
  std::optional<cd> shift;  // default: c + 1.1 r e^{i pi / 7}
  int order = 16;          // quadrature points
  double tau_r = 1e-4;
  double tau_g = 1e-2;
  int max_iters = 30;
  std::uint64_t seed = 0;

  void Validate() const;
};

// Default subspace size for an expected number of eigenvalues.
inline int DefaultSubspace(int expected) { return 2 * expected + 10; }

struct SIFPair
{
  PencilPair pair;     // backward error on the full (balanced) pencil
  double sigma = 0.0;  // ||T(lambda) v_1|| / ((|c| + r) ||v_1||)
  bool ghost = false;  // sigma >= tau_g
  bool in_region = false;
};

// Backward error below which a ghost counts as a settled pencil eigenpair.
inline constexpr double kGhostSettled = 1e-10;

struct SIFTraceRow
{
  int iter = 0;
  int in_region_count = 0;  // in-region pairs that are not ghosts
  int ghost_count = 0;      // in-region ghosts
  double max_sigma = 0.0;   // over in-region non-ghost pairs (NaN if none)
  double min_sigma = 0.0;
};

struct SIFResult
{
  std::vector<SIFPair> pairs;  // Ritz pairs of the last iteration, sorted by (re, im)
  std::vector<SIFTraceRow> trace;
  int iterations = 0;
  bool converged = false;
  int subspace = 0;  // columns actually used
};

//
// Subspace iteration with the rational filter of the disk enclosing the
// region. Each iteration filters the current basis, orthonormalizes it,
// projects the pencil onto (W, V) with W spanning (C0 - sigma C1) V and
// classifies the Ritz pairs by their residual on the original problem. All
// Ritz vectors are kept for the next iteration. Converged when every
// in-region non-ghost pair has sigma < tau_r, every in-region ghost is a
// settled pencil eigenpair and the in-region count matches the previous
// iteration.
//
SIFResult SubspaceIterationFilter(const StructuredPencil &pencil, const SplitFormNEP &nep,
                                  const Region &region, const SIFConfig &config);

void WriteSIFTrace(std::ostream &os, std::span<const SIFTraceRow> trace);

}  // namespace nepkit

#endif  // NEPKIT_FILTER_HPP
