// Copyright nepkit contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef NEPKIT_MDLAWSON_HPP
#define NEPKIT_MDLAWSON_HPP

#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "nepkit/types.hpp"
#include "nepkit/va_basis.hpp"

namespace nepkit
{

// Sampled data {(x_l, t(x_l))}: values is m x s with entry (l, i) = t_i(x_l).
struct SampleSet
{
  std::vector<cd> nodes;
  CMatrix values;

  int NumNodes() const { return static_cast<int>(nodes.size()); }
  int NumTerms() const { return static_cast<int>(values.cols()); }
};

// Numerator degrees n_1..n_s and common denominator degree d.
struct DegreeSpec
{
  std::vector<int> numerator;
  int denominator = 0;

  static DegreeSpec Uniform(int s, int degree);

  int NumTerms() const { return static_cast<int>(numerator.size()); }
  int MaxDegree() const;
  // Minimum node count max_i(n_i + d + 2).
  int MinNodes() const;
};

// Minimizer of the weighted linearized problem for a fixed weight vector.
struct DualResult
{
  double d_value = 0.0;
  std::vector<CVector> a;  // a_i, length n_i + 1
  CVector b;               // length d + 1
  double sigma_gap = 0.0;  // gap between the two smallest singular values
};

//
// Evaluate d(w): the squared smallest singular value of
// (I - Q_p Q_p^H) F Q_q, where sqrt(W) Phi = Q_q R_q and
// sqrt(W_kron) Theta = Q_p R_p are thin QR factorizations. The coefficient
// vectors follow from R_q b = bhat and R_p a = S_qp^H bhat.
//
// weights[k] belongs to node active[k]; an empty active list means all nodes.
// Throws ErrorKind::RankDeficient naming the collapsed column.
//
DualResult DualValue(const SampleSet &samples, const VABasis &basis, const DegreeSpec &spec,
                     std::span<const double> weights, std::span<const int> active = {});

struct RationalApproximant
{
  std::vector<CVector> a;
  CVector b;
  DegreeSpec spec;
  std::shared_ptr<const VABasis> basis;
  std::vector<int> active;  // retained node indices
  double e_max = 0.0;       // max over retained nodes of ||t - xi||_2^2
  double e_all = 0.0;       // same over every sample node
  double d_value = 0.0;
  double gap = 0.0;
  int iterations = 0;
  bool converged = false;

  int NumTerms() const { return static_cast<int>(a.size()); }

  // Numerator i coefficients zero-padded to the basis degree.
  CVector PaddedNumerator(int i) const;
  CVector PaddedDenominator() const;

  // Rows are points, entry (l, i) = p_i(y_l) / q(y_l). Throws
  // ErrorKind::PoleHit listing points where q vanishes.
  CMatrix Evaluate(std::span<const cd> points) const;

  CVector Denominator(std::span<const cd> points) const;
};

// Squared pointwise error ||t(x_l) - xi(x_l)||_2^2 at every sample node.
RVector PointwiseErrors(const SampleSet &samples, const RationalApproximant &xi);

// e(xi) over xi.active (all nodes if empty).
double MaxError(const SampleSet &samples, const RationalApproximant &xi);

struct LawsonOptions
{
  double eps_r = 1e-10;
  int max_iters = 500;
  double beta = 1.0;
  double eps_w = 1e-12;
  // Optional filter for the returned iterate (for instance pole-freeness in
  // a target region). Iterates failing it are returned only if no iterate
  // passes.
  std::function<bool(const RationalApproximant &)> admissible;
};

struct LawsonTraceRow
{
  int iter = 0;
  double d_w = 0.0;
  double e_xi = 0.0;
  double gap = 0.0;
  int active_nodes = 0;
};

struct LawsonResult
{
  RationalApproximant approx;
  std::vector<LawsonTraceRow> trace;
  RVector final_weights;  // over approx.active of the last iterate
  std::vector<int> final_active;
  bool rank_stop = false;  // stopped because the weighted basis lost rank
  bool admissible = true;  // approx passed LawsonOptions::admissible
};

//
// Dual Lawson iteration for the discrete vector-valued rational minimax
// problem. Reaching max_iters is not an error: the result carries
// converged = false and the gap of the returned iterate, which is the one
// with the smallest e(xi) seen.
//
LawsonResult Lawson(const SampleSet &samples, const DegreeSpec &spec,
                    const LawsonOptions &opts = {});

// Same, but on a caller-provided basis (degree >= spec.MaxDegree()).
LawsonResult Lawson(const SampleSet &samples, std::shared_ptr<const VABasis> basis,
                    const DegreeSpec &spec, const LawsonOptions &opts = {});

// iter,d_w,e_xi,gap,active_nodes
void WriteLawsonTrace(std::ostream &os, std::span<const LawsonTraceRow> trace);

}  // namespace nepkit

#endif  // NEPKIT_MDLAWSON_HPP
