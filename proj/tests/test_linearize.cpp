// Copyright nepkit contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <memory>
#include <vector>

#include <doctest.h>

#include "nepkit/eigensolve.hpp"
#include "nepkit/linearize.hpp"
#include "nepkit/problems.hpp"
#include "support.hpp"

using namespace nepkit;
using nepkit::test::CircleNodes;
using nepkit::test::DirectEval;
using nepkit::test::IdentityResidual;
using nepkit::test::Kron;
using nepkit::test::RandomPoly;
using nepkit::test::RelDiff;
using nepkit::test::Rng;

namespace
{

SplitFormNEP RandomNep(Rng &rng, int s, int n)
{
  SplitFormNEP nep;
  nep.name = "random";
  for (int i = 0; i < s; i++)
  {
    nep.terms.push_back(ScalarFunction::Monomial(i));
    nep.matrices.push_back(nepkit::test::Sparse(rng.Matrix(n, n)));
  }
  return nep;
}

RationalApproximant RandomApprox(Rng &rng, int s, int g)
{
  RationalApproximant xi;
  xi.basis = std::make_shared<const VABasis>(BuildBasis(CircleNodes(0.0, 2.0, g + 10), g));
  xi.spec = DegreeSpec::Uniform(s, g);
  for (int i = 0; i < s; i++)
  {
    xi.a.push_back(rng.Vector(g + 1));
  }
  xi.b = rng.Vector(g + 1);
  return xi;
}

}  // namespace

TEST_CASE("assembly of simple approximants")
{
  Rng rng(1);
  SUBCASE("single identity term with constant numerator")
  {
    SplitFormNEP nep;
    nep.terms = {ScalarFunction::Constant(1.0)};
    nep.matrices = {nepkit::test::Sparse(CMatrix::Identity(3, 3))};
    RationalApproximant xi = RandomApprox(rng, 1, 2);
    xi.a[0].setZero();
    xi.a[0](0) = 1.0;
    const MatrixPolynomial P = Assemble(xi, nep).Trimmed();
    CHECK(P.Degree() == 0);
    CHECK((P.DenseAt(cd(0.7, -1.1)) - CMatrix::Identity(3, 3)).norm() < 1e-15);
  }

  SUBCASE("vanishing numerator drops its matrix")
  {
    SplitFormNEP nep = RandomNep(rng, 2, 4);
    RationalApproximant xi = RandomApprox(rng, 2, 3);
    xi.a[1].setZero();
    const MatrixPolynomial P = Assemble(xi, nep);
    nep.matrices[1] = nepkit::test::Sparse(rng.Matrix(4, 4));
    const MatrixPolynomial Q = Assemble(xi, nep);
    const cd x(0.3, 0.4);
    CHECK(RelDiff(P.DenseAt(x), Q.DenseAt(x)) == 0.0);
  }

  SUBCASE("matches independent evaluation of the numerators")
  {
    for (int trial = 0; trial < 10; trial++)
    {
      const int s = rng.Int(1, 4);
      const int g = rng.Int(1, 6);
      const int n = rng.Int(1, 6);
      const SplitFormNEP nep = RandomNep(rng, s, n);
      const RationalApproximant xi = RandomApprox(rng, s, g);
      const MatrixPolynomial P = Assemble(xi, nep);
      const cd x = rng.Complex();
      const CVector th = xi.basis->EvaluateAt(x, g);
      CMatrix oracle = CMatrix::Zero(n, n);
      for (int i = 0; i < s; i++)
      {
        oracle += th.head(xi.a[i].size()).cwiseProduct(xi.a[i]).sum() * CMatrix(nep.matrices[i]);
      }
      CHECK(RelDiff(P.DenseAt(x), oracle) < 1e-12);
    }
  }
}

TEST_CASE("degree-one scalar pencil has the root as eigenvalue")
{
  const VABasis b = BuildBasis(CircleNodes(0.0, 1.0, 6), 1);
  const cd c(0.25, -0.5);
  MatrixPolynomial P;
  P.H = b.H();
  P.k = b.LeadingCoeffs();
  SpMatrix A0(1, 1);
  SpMatrix A1(1, 1);
  // theta_1 = (x - h11) / h21, so h21 theta_1 + (h11 - c) = x - c.
  A0.insert(0, 0) = b.H()(0, 0) - c;
  A1.insert(0, 0) = b.H()(1, 0);
  P.coeffs = {A0, A1};
  const StructuredPencil pencil(P);
  REQUIRE(pencil.Size() == 1);
  const DenseSolveResult r = SolveDense(pencil.DenseC0(), pencil.DenseC1());
  REQUIRE(r.pairs.size() == 1);
  CHECK(std::abs(r.pairs[0].lambda - c) < 1e-14);
}

TEST_CASE("linearization identity on random polynomials")
{
  Rng rng(2);
  for (int trial = 0; trial < 40; trial++)
  {
    const int g = rng.Int(1, 8);
    const int n = rng.Int(1, 20);
    const StructuredPencil pencil(RandomPoly(rng, g, n));
    for (int probe = 0; probe < 10; probe++)
    {
      const cd x = 2.0 * rng.Complex();
      CHECK(IdentityResidual(pencil, x) < 1e-12);
      CHECK(VerifyLinearization(pencil, x) < 1e-12);
    }
  }
}

TEST_CASE("degree-one identity involves the bottom row only")
{
  Rng rng(3);
  const StructuredPencil pencil(RandomPoly(rng, 1, 5));
  REQUIRE(pencil.Size() == 5);
  const cd x(0.4, 1.2);
  const auto &P = pencil.Poly();
  const CMatrix lhs = (pencil.DenseC0() - x * pencil.DenseC1()) * P.Theta(x)(0);
  CHECK(RelDiff(lhs, -P.k[0] * DirectEval(P, x)) < 1e-13);
}

TEST_CASE("eigenvalues of the polynomial annihilate the structured vector")
{
  Rng rng(4);
  const StructuredPencil pencil(RandomPoly(rng, 3, 4));
  const DenseSolveResult r = SolveDense(pencil.DenseC0(), pencil.DenseC1());
  REQUIRE(r.pairs.size() == 12);
  const auto &P = pencil.Poly();
  for (const auto &pair : r.pairs)
  {
    const cd x = pair.lambda;
    Eigen::JacobiSVD<CMatrix> svd(DirectEval(P, x), Eigen::ComputeFullV);
    const CVector u = svd.matrixV().col(3);
    const CVector v = Kron(P.Theta(x), 3, u);
    const CMatrix res = (pencil.DenseC0() - x * pencil.DenseC1()) * v;
    CHECK(res.norm() / ((pencil.NormC0() + std::abs(x) * pencil.NormC1()) * v.norm()) < 1e-10);
  }
}

TEST_CASE("eigenvector recovery")
{
  Rng rng(5);
  const MatrixPolynomial P = RandomPoly(rng, 4, 3);
  const cd x(0.2, -0.3);

  const CVector u = rng.Vector(3);
  const RecoveredVector exact = RecoverEigenvector(Kron(P.Theta(x), 4, u), x, P);
  CHECK(exact.consistency < 1e-15);
  CHECK((exact.u - u).norm() < 1e-15 * u.norm());
  CHECK_FALSE(exact.bottom_dominated);

  const CVector v = rng.Vector(12);
  const RecoveredVector rv = RecoverEigenvector(v, x, P);
  const CVector th = P.Theta(x);
  double brute = 0.0;
  for (int i = 1; i < 4; i++)
  {
    brute = std::max(brute, (v.segment(3 * i, 3) - th(i) * v.head(3)).norm() / v.norm());
  }
  CHECK(std::abs(rv.consistency - brute) < 1e-15);

  CVector tail = CVector::Zero(12);
  tail.tail(3) = rng.Vector(3);
  CHECK(RecoverEigenvector(tail, x, P).bottom_dominated);
}

TEST_CASE("time-delay pencil eigenvectors have consistent block structure")
{
  const SplitFormNEP nep = TimeDelay2();
  const Region region = *nep.default_region;
  const SampleSet S = nepkit::test::Samples(nep, SampleBoundary(region, 50));
  const LawsonResult fit = Lawson(S, DegreeSpec::Uniform(3, 10));
  const StructuredPencil pencil(Assemble(fit.approx, nep));
  CHECK(VerifyLinearization(pencil, cd(-1.0, 2.0)) < 1e-12);
  const DenseSolveResult r =
    SolveDense(pencil.DenseC0(), pencil.DenseC1(), InfiniteCutoff(region));
  int inside = 0;
  for (const auto &pair : r.pairs)
  {
    if (region.Contains(pair.lambda))
    {
      inside++;
      CHECK(RecoverEigenvector(pair.v, pair.lambda, pencil.Poly()).consistency < 1e-8);
    }
  }
  CHECK(inside == 5);
}

TEST_CASE("block LU factors the shifted pencil")
{
  Rng rng(6);
  for (int trial = 0; trial < 20; trial++)
  {
    const int g = rng.Int(1, 5);
    const int n = rng.Int(1, 6);
    const StructuredPencil pencil(RandomPoly(rng, g, n));
    const cd mu = 3.0 * rng.Complex();
    const BlockLU lu(pencil, mu);
    const CMatrix lhs = lu.DenseL() * lu.DenseU();
    const CMatrix rhs = (mu * pencil.DenseC1() - pencil.DenseC0()) * lu.DenseS();
    CHECK(RelDiff(lhs, rhs) < 1e-12);

    const CMatrix Y = rng.Matrix(pencil.Size(), 3);
    const CMatrix Z = lu.ShiftInvert(Y);
    const CMatrix oracle =
      (mu * pencil.DenseC1() - pencil.DenseC0()).partialPivLu().solve(pencil.DenseC1() * Y);
    CHECK(RelDiff(Z, oracle) < 1e-9);
  }
}

TEST_CASE("block LU refuses a shift at an eigenvalue")
{
  Rng rng(7);
  const StructuredPencil pencil(RandomPoly(rng, 2, 3));
  const DenseSolveResult r = SolveDense(pencil.DenseC0(), pencil.DenseC1());
  REQUIRE(!r.pairs.empty());
  try
  {
    BlockLU lu(pencil, r.pairs[0].lambda);
    FAIL("expected a singular factorization");
  }
  catch (const Error &e)
  {
    CHECK(e.kind() == ErrorKind::Singular);
  }
}

TEST_CASE("gram matrix and a-priori bound")
{
  Rng rng(8);
  SUBCASE("orthogonal coefficients give a diagonal matrix")
  {
    SplitFormNEP nep;
    nep.terms = {ScalarFunction::Constant(1.0), ScalarFunction::Monomial(1),
                 ScalarFunction::Expm1()};
    CMatrix E0 = CMatrix::Zero(3, 3);
    CMatrix E1 = CMatrix::Zero(3, 3);
    CMatrix E2 = CMatrix::Zero(3, 3);
    E0(0, 0) = 2.0;
    E1(1, 2) = cd(0.0, 3.0);
    E2(2, 0) = -1.0;
    E2(1, 1) = 1.0;
    nep.matrices = {E0.sparseView(), E1.sparseView(), E2.sparseView()};
    const CMatrix G = GramMatrix(nep);
    CHECK(std::abs(G(0, 0) - 4.0) < 1e-15);
    CHECK(std::abs(G(1, 1) - 9.0) < 1e-15);
    CHECK(std::abs(G(2, 2) - 2.0) < 1e-15);
    CHECK((G - CMatrix(G.diagonal().asDiagonal())).norm() == 0.0);
  }

  SUBCASE("quadratic form reproduces the combined Frobenius norm")
  {
    const SplitFormNEP nep = RandomNep(rng, 4, 5);
    const CMatrix G = GramMatrix(nep);
    const double gn = GramNorm(G);
    for (int trial = 0; trial < 10; trial++)
    {
      const CVector z = rng.Vector(4);
      CMatrix sum = CMatrix::Zero(5, 5);
      for (int i = 0; i < 4; i++)
      {
        sum += z(i) * CMatrix(nep.matrices[i]);
      }
      const double direct = sum.squaredNorm();
      const cd form = z.dot(G * z);
      CHECK(std::abs(form - direct) < 1e-12 * direct);
      CHECK(sum.norm() <= std::sqrt(gn) * z.norm() * (1.0 + 1e-12));
    }
  }

  SUBCASE("bound helpers")
  {
    CHECK(ErrorBound(CMatrix::Identity(3, 3), 4.0) == doctest::Approx(2.0).epsilon(1e-15));
    const SplitFormNEP nep = RandomNep(rng, 1, 4);
    const double norm = CMatrix(nep.matrices[0]).norm();
    CHECK(ErrorBound(GramMatrix(nep), 0.25) == doctest::Approx(0.5 * norm).epsilon(1e-14));
    CHECK_THROWS_AS(ErrorBound(CMatrix::Identity(2, 2), -1.0), Error);
  }
}

TEST_CASE("cork coefficients")
{
  Rng rng(9);
  for (int trial = 0; trial < 10; trial++)
  {
    const int g = rng.Int(1, 6);
    const int n = rng.Int(1, 5);
    const MatrixPolynomial P = RandomPoly(rng, g, n);
    const CorkCoefficients c = Cork(P);
    REQUIRE(static_cast<int>(c.A.size()) == g);
    for (int probe = 0; probe < 5; probe++)
    {
      const cd x = rng.Complex();
      const CVector th = P.Theta(x);
      CMatrix sum = CMatrix::Zero(n, n);
      for (int i = 0; i < g; i++)
      {
        sum += th(i) * (CMatrix(c.A[i]) - x * CMatrix(c.B[i]));
      }
      CHECK(RelDiff(sum, DirectEval(P, x)) < 1e-12);
      if (g > 1)
      {
        CHECK(((c.M - x * c.N) * th.head(g)).norm() < 1e-12 * th.norm() * (1.0 + std::abs(x)));
      }
    }
  }

  SUBCASE("vanishing top coefficient")
  {
    MatrixPolynomial P = RandomPoly(rng, 3, 2);
    P.coeffs[3] = SpMatrix(2, 2);
    const CorkCoefficients c = Cork(P);
    for (int i = 0; i < 3; i++)
    {
      CHECK((CMatrix(c.A[i]) - CMatrix(P.coeffs[i])).norm() == 0.0);
      CHECK(c.B[i].norm() == 0.0);
    }
  }
}

TEST_CASE("polynomial roots in the orthogonal basis")
{
  Rng rng(10);
  const auto nodes = CircleNodes({0.1, 0.2}, 1.5, 30);
  const VABasis b = BuildBasis(nodes, 8);

  CVector e1 = CVector::Zero(2);
  e1(1) = 1.0;
  const auto r1 = PolyRoots(e1, b.H());
  REQUIRE(r1.size() == 1);
  CHECK(std::abs(r1[0] - b.H()(0, 0)) < 1e-14);

  for (int trial = 0; trial < 10; trial++)
  {
    std::vector<cd> roots(5);
    for (auto &r : roots)
    {
      r = 0.8 * rng.Complex();
    }
    CVector vals(30);
    for (int l = 0; l < 30; l++)
    {
      cd p = 1.0;
      for (cd r : roots)
      {
        p *= nodes[l] - r;
      }
      vals(l) = p;
    }
    const CVector coeffs = b.Q().leftCols(6).colPivHouseholderQr().solve(vals);
    const auto found = PolyRoots(coeffs, b.H());
    REQUIRE(found.size() == 5);
    for (cd r : roots)
    {
      double best = 1e300;
      for (cd f : found)
      {
        best = std::min(best, std::abs(f - r));
      }
      CHECK(best < 1e-8);
    }
  }
}

TEST_CASE("trimming drops negligible leading coefficients")
{
  Rng rng(11);
  MatrixPolynomial P = RandomPoly(rng, 5, 3);
  P.coeffs[5] *= 1e-16;
  P.coeffs[4] *= 1e-15;
  const MatrixPolynomial T = P.Trimmed();
  CHECK(T.Degree() == 3);
  CHECK(T.H.rows() == 4);
  CHECK(T.H.cols() == 3);
  CHECK(T.k.size() == 4);
}

TEST_CASE("hadeler degree-six pencil dimension")
{
  const SplitFormNEP nep = Hadeler();
  const SampleSet S = nepkit::test::Samples(nep, SampleBoundary(*nep.default_region, 50));
  const LawsonResult fit = Lawson(S, DegreeSpec::Uniform(3, 6));
  const StructuredPencil pencil(Assemble(fit.approx, nep));
  CHECK(pencil.Size() == 1200);
  CHECK(VerifyLinearization(pencil, cd(-30.0, 5.0)) < 1e-12);
}

TEST_CASE("pencil export round-trips through Matrix Market")
{
  Rng rng(12);
  const StructuredPencil pencil(RandomPoly(rng, 3, 4));
  const auto dir = std::filesystem::temp_directory_path() / "nepkit_test_linearize";
  std::filesystem::create_directories(dir);
  pencil.Export(dir / "c0.mtx", dir / "c1.mtx");
  const CMatrix C0(ReadMatrixMarket(dir / "c0.mtx"));
  const CMatrix C1(ReadMatrixMarket(dir / "c1.mtx"));
  CHECK((C0 - pencil.DenseC0()).norm() == 0.0);
  CHECK((C1 - pencil.DenseC1()).norm() == 0.0);
  std::filesystem::remove_all(dir);
}
