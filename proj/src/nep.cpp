// Copyright nepkit contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "nepkit/nep.hpp"

#include <cmath>

namespace nepkit
{

ScalarFunction ScalarFunction::Constant(cd alpha)
{
  ScalarFunction f;
  f.kind = Kind::Constant;
  f.alpha = alpha;
  return f;
}

ScalarFunction ScalarFunction::Monomial(int power, cd alpha)
{
  Require(power >= 0, "ScalarFunction::Monomial: negative power");
  ScalarFunction f;
  f.kind = Kind::Monomial;
  f.power = power;
  f.alpha = alpha;
  return f;
}

ScalarFunction ScalarFunction::ExpAffine(cd alpha, cd beta)
{
  ScalarFunction f;
  f.kind = Kind::ExpAffine;
  f.alpha = alpha;
  f.beta = beta;
  return f;
}

ScalarFunction ScalarFunction::ExpQuadratic(cd alpha)
{
  ScalarFunction f;
  f.kind = Kind::ExpQuadratic;
  f.alpha = alpha;
  return f;
}

ScalarFunction ScalarFunction::Expm1()
{
  ScalarFunction f;
  f.kind = Kind::Expm1;
  return f;
}

ScalarFunction ScalarFunction::SqrtShift(cd shift)
{
  ScalarFunction f;
  f.kind = Kind::SqrtShift;
  f.shift = shift;
  return f;
}

cd ComplexExpm1(cd z)
{
  const double a = z.real();
  const double b = z.imag();
  if (b == 0.0)
  {
    return {std::expm1(a), 0.0};
  }
  const double s = std::sin(0.5 * b);
  const double re = std::expm1(a) * std::cos(b) - 2.0 * s * s;
  const double im = std::exp(a) * std::sin(b);
  return {re, im};
}

cd ScalarFunction::operator()(cd x) const
{
  using namespace std::complex_literals;
  switch (kind)
  {
    case Kind::Constant:
      return alpha;
    case Kind::Monomial:
    {
      cd p = 1.0;
      for (int i = 0; i < power; i++)
      {
        p *= x;
      }
      return alpha * p;
    }
    case Kind::ExpAffine:
      return std::exp(alpha * x + beta);
    case Kind::ExpQuadratic:
      return std::exp(1i * alpha * x * x);
    case Kind::Expm1:
      return ComplexExpm1(x);
    case Kind::SqrtShift:
    {
      cd z = x - shift;
      if (z.imag() == 0.0)
      {
        z = cd(z.real(), 0.0);  // drop a signed zero so the cut maps from above
      }
      return 1i * std::sqrt(z);
    }
  }
  return 0.0;
}

std::string ScalarFunction::KindName() const
{
  switch (kind)
  {
    case Kind::Constant:
      return "constant";
    case Kind::Monomial:
      return "monomial";
    case Kind::ExpAffine:
      return "exp_affine";
    case Kind::ExpQuadratic:
      return "exp_quadratic";
    case Kind::Expm1:
      return "expm1";
    case Kind::SqrtShift:
      return "sqrt_shift";
  }
  return "unknown";
}

bool Region::Contains(cd x) const
{
  const cd d = x - center;
  if (std::abs(d) > radius)
  {
    return false;
  }
  return !upper_half || d.imag() >= 0.0;
}

void SplitFormNEP::Validate() const
{
  Require(!terms.empty(), "SplitFormNEP: no terms");
  Require(terms.size() == matrices.size(),
          "SplitFormNEP: " + std::to_string(terms.size()) + " terms but " +
              std::to_string(matrices.size()) + " matrices");
  const auto n = matrices.front().rows();
  for (std::size_t i = 0; i < matrices.size(); i++)
  {
    Require(matrices[i].rows() == n && matrices[i].cols() == n,
            "SplitFormNEP: matrix " + std::to_string(i) + " is " +
                std::to_string(matrices[i].rows()) + "x" + std::to_string(matrices[i].cols()) +
                ", expected " + std::to_string(n) + "x" + std::to_string(n));
  }
}

CVector SplitFormNEP::EvalTerms(cd x) const
{
  CVector t(NumTerms());
  for (int i = 0; i < NumTerms(); i++)
  {
    t(i) = terms[i](x);
    if (!std::isfinite(t(i).real()) || !std::isfinite(t(i).imag()))
    {
      Fail(ErrorKind::Domain, "term " + std::to_string(i) + " (" + terms[i].KindName() +
                                  ") is not finite at x = (" + std::to_string(x.real()) +
                                  ", " + std::to_string(x.imag()) + ")");
    }
  }
  return t;
}

CVector SplitFormNEP::Apply(cd x, const CVector &u) const
{
  const CVector t = EvalTerms(x);
  CVector y = CVector::Zero(Dim());
  for (int i = 0; i < NumTerms(); i++)
  {
    if (t(i) != cd(0.0))
    {
      y.noalias() += t(i) * (matrices[i] * u);
    }
  }
  return y;
}

CMatrix SplitFormNEP::DenseAt(cd x) const
{
  const CVector t = EvalTerms(x);
  CMatrix T = CMatrix::Zero(Dim(), Dim());
  for (int i = 0; i < NumTerms(); i++)
  {
    T += t(i) * CMatrix(matrices[i]);
  }
  return T;
}

}  // namespace nepkit
