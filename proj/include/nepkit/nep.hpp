// Copyright nepkit contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef NEPKIT_NEP_HPP
#define NEPKIT_NEP_HPP

#include <optional>
#include <string>
#include <vector>

#include "nepkit/types.hpp"

namespace nepkit
{

//
// Scalar nonlinearity t_i of a split-form problem. Evaluation uses the exact
// formula for each kind; square roots take the principal branch, and points
// exactly on the branch cut take the limit from above.
//
struct ScalarFunction
{
  enum class Kind
  {
    Constant,      // alpha
    Monomial,      // alpha * x^power
    ExpAffine,     // exp(alpha * x + beta)
    ExpQuadratic,  // exp(i * alpha * x^2)
    Expm1,         // exp(x) - 1
    SqrtShift,     // i * sqrt(x - shift)
  };

  Kind kind = Kind::Constant;
  cd alpha = 1.0;
  cd beta = 0.0;
  int power = 0;
  cd shift = 0.0;

  static ScalarFunction Constant(cd alpha);
  static ScalarFunction Monomial(int power, cd alpha = 1.0);
  static ScalarFunction ExpAffine(cd alpha, cd beta = 0.0);
  static ScalarFunction ExpQuadratic(cd alpha = 1.0);
  static ScalarFunction Expm1();
  static ScalarFunction SqrtShift(cd shift);

  cd operator()(cd x) const;

  std::string KindName() const;
};

// Complex exp(z) - 1 without cancellation near z = 0.
cd ComplexExpm1(cd z);

// Closed disk |x - c| <= r, optionally restricted to Im(x - c) >= 0.
struct Region
{
  cd center = 0.0;
  double radius = 1.0;
  bool upper_half = false;

  bool Contains(cd x) const;
};

inline bool InRegion(cd x, const Region &region) { return region.Contains(x); }

//
// T(x) = sum_i t_i(x) E_i with every E_i of size n x n.
//
struct SplitFormNEP
{
  std::string name;
  std::vector<ScalarFunction> terms;
  std::vector<SpMatrix> matrices;
  std::optional<Region> default_region;

  int NumTerms() const { return static_cast<int>(terms.size()); }
  int Dim() const { return matrices.empty() ? 0 : static_cast<int>(matrices.front().rows()); }

  // Throws InvalidArgument on term/matrix count or dimension mismatch.
  void Validate() const;

  // t_1(x)..t_s(x); throws ErrorKind::Domain naming the term if a value is
  // not finite.
  CVector EvalTerms(cd x) const;

  // T(x) u without forming T(x).
  CVector Apply(cd x, const CVector &u) const;

  CMatrix DenseAt(cd x) const;
};

}  // namespace nepkit

#endif  // NEPKIT_NEP_HPP
