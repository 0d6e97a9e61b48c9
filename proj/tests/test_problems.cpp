// Copyright nepkit contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "nepkit/problems.hpp"
#include "nepkit/run.hpp"
#include "support.hpp"

using namespace nepkit;
using nepkit::test::Rng;

namespace
{

using cld = std::complex<long double>;

const std::filesystem::path kData = NEPKIT_TEST_DATA;

std::filesystem::path TempDir(const std::string &name)
{
  const auto dir = std::filesystem::temp_directory_path() / ("nepkit_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Extended-precision reference values.
cld ExpSeries(cld z)
{
  // exp(z) = exp(z / 2^s)^(2^s) with a Taylor series for the reduced argument.
  int s = 0;
  while (std::abs(z) > 0.25L)
  {
    z /= 2.0L;
    s++;
  }
  cld term = 1.0L;
  cld sum = 1.0L;
  for (int k = 1; k < 30; k++)
  {
    term *= z / static_cast<long double>(k);
    sum += term;
  }
  for (int i = 0; i < s; i++)
  {
    sum *= sum;
  }
  return sum;
}

cld Expm1Series(cld z)
{
  if (std::abs(z) > 0.5L)
  {
    return ExpSeries(z) - 1.0L;
  }
  cld term = 1.0L;
  cld sum = 0.0L;
  for (int k = 1; k < 40; k++)
  {
    term *= z / static_cast<long double>(k);
    sum += term;
  }
  return sum;
}

double RelErr(cd got, cld ref)
{
  const cld diff = cld(got.real(), got.imag()) - ref;
  return static_cast<double>(std::abs(diff) / std::abs(ref));
}

}  // namespace

TEST_CASE("scalar functions agree with extended-precision references")
{
  Rng rng(1);
  for (int p = 0; p < 20; p++)
  {
    const cd x = 2.0 * rng.Complex();
    const cld X(x.real(), x.imag());

    const cd alpha(0.7, -0.3);
    CHECK(ScalarFunction::Constant(alpha)(x) == alpha);

    const ScalarFunction mono = ScalarFunction::Monomial(3, 2.0);
    CHECK(RelErr(mono(x), 2.0L * X * X * X) < 1e-14);

    const ScalarFunction ea = ScalarFunction::ExpAffine(cd(-1.0, 0.5), cd(0.2, 0.1));
    CHECK(RelErr(ea(x), ExpSeries(cld(-1.0L, 0.5L) * X + cld(0.2L, 0.1L))) < 1e-14);

    const ScalarFunction eq = ScalarFunction::ExpQuadratic(1.0);
    CHECK(RelErr(eq(x), ExpSeries(cld(0.0L, 1.0L) * X * X)) < 1e-14);

    const ScalarFunction em = ScalarFunction::Expm1();
    CHECK(RelErr(em(x), Expm1Series(X)) < 1e-14);
    const cd tiny = 1e-9 * rng.Complex();
    CHECK(RelErr(em(tiny), Expm1Series(cld(tiny.real(), tiny.imag()))) < 1e-14);

    const ScalarFunction sq = ScalarFunction::SqrtShift(cd(0.5, 0.0));
    const cld ref = cld(0.0L, 1.0L) * std::sqrt(X - 0.5L);
    CHECK(RelErr(sq(x), ref) < 1e-14);
  }
}

TEST_CASE("square-root term follows the principal branch")
{
  const ScalarFunction sq = ScalarFunction::SqrtShift(4.0);
  // x - 4 = -1 on the cut: limit from above gives sqrt(-1) = i, times i.
  CHECK(std::abs(sq(3.0) - cd(-1.0, 0.0)) < 1e-15);
  CHECK(std::abs(sq(13.0) - cd(0.0, 3.0)) < 1e-15);
  CHECK(std::abs(ScalarFunction::SqrtShift(0.0)(cd(0.0, 2.0)) - cd(-1.0, 1.0)) < 1e-15);
}

TEST_CASE("exponential example")
{
  const SplitFormNEP nep = Example1();
  CHECK(nep.NumTerms() == 2);
  CHECK(nep.Dim() == 2);
  REQUIRE(nep.default_region.has_value());
  CHECK(nep.default_region->center == cd(0.0));
  CHECK(nep.default_region->radius == 3.0);

  CHECK(std::abs(nep.DenseAt(0.0).determinant()) < 1e-15);
  CHECK(std::abs(nep.DenseAt(std::sqrt(2.0 * std::numbers::pi)).determinant()) < 1e-14);
  CVector u(2);
  u << 1.0, -1.0;
  CHECK(nep.Apply(1.0, u).norm() > 0.1);

  const CMatrix T = nep.DenseAt(cd(0.3, 0.2));
  CHECK(std::abs(T(0, 0) - std::exp(cd(0.0, 1.0) * cd(0.3, 0.2) * cd(0.3, 0.2))) < 1e-15);
  CHECK(T(0, 1) == cd(1.0));
  CHECK(T(1, 0) == cd(1.0));
  CHECK(T(1, 1) == cd(1.0));
}

TEST_CASE("time-delay problem")
{
  const SplitFormNEP nep = TimeDelay2();
  CHECK(nep.NumTerms() == 3);
  CMatrix B0(2, 2);
  CMatrix A1(2, 2);
  B0 << -5.0, 1.0, 2.0, -6.0;
  A1 << 2.0, -1.0, -4.0, 1.0;
  CHECK((nep.DenseAt(0.0) - (-B0 + A1)).norm() == 0.0);
  const cd x(1.5, -2.0);
  CHECK((nep.DenseAt(x) - (-B0 + x * CMatrix::Identity(2, 2) + std::exp(-x) * A1)).norm() <
        1e-14);
  CHECK(std::isfinite(nep.DenseAt(cd(-40.0, 3.0)).norm()));
  CHECK(nep.default_region->center == cd(-1.0));
  CHECK(nep.default_region->radius == 6.0);
}

TEST_CASE("hadeler problem")
{
  const SplitFormNEP small = Hadeler(2, 100.0);
  // Terms are [-1, x^2, e^x - 1] with matrices [B0, B2, B1].
  const CMatrix B0(small.matrices[0]);
  const CMatrix B2(small.matrices[1]);
  const CMatrix B1(small.matrices[2]);
  CMatrix B1ref(2, 2);
  CMatrix B2ref(2, 2);
  B1ref << 2.0, 2.0, 2.0, 4.0;
  B2ref << 2.0 + 1.0 / 2.0, 1.0 / 3.0, 1.0 / 3.0, 2.0 + 1.0 / 4.0;
  CHECK((B1 - B1ref).norm() == 0.0);
  CHECK((B2 - B2ref).norm() < 1e-15);
  CHECK((B0 - 100.0 * CMatrix::Identity(2, 2)).norm() == 0.0);

  const SplitFormNEP nep = Hadeler();
  CHECK(nep.Dim() == 200);
  CHECK(nep.default_region->center == cd(-30.0));
  CHECK(nep.default_region->radius == 11.5);
  for (const auto &E : nep.matrices)
  {
    const CMatrix D(E);
    CHECK((D - D.transpose()).norm() == 0.0);
  }
  CHECK_THROWS_AS(Hadeler(0), Error);
}

TEST_CASE("built-in registry")
{
  const auto names = BuiltinNames();
  CHECK(names.size() == 3);
  for (const auto &name : names)
  {
    CHECK(BuiltinProblem(name).name == name);
  }
  CHECK(BuiltinProblem("hadeler:20").Dim() == 20);
  CHECK_THROWS_AS(BuiltinProblem("hadeler:x"), Error);
  CHECK_THROWS_AS(BuiltinProblem("gun"), Error);
}

TEST_CASE("boundary sampling")
{
  const auto four = SampleBoundary(Region{0.0, 1.0, false}, 4);
  const std::vector<cd> expect{1.0, cd(0.0, 1.0), -1.0, cd(0.0, -1.0)};
  for (int l = 0; l < 4; l++)
  {
    CHECK(std::abs(four[l] - expect[l]) < 1e-15);
  }
  CHECK(SampleBoundary(Region{-1.0, 6.0, false}, 50).front() == cd(5.0));

  const Region half{cd(2.0, 1.0), 3.0, true};
  const auto nodes = SampleBoundary(half, 100);
  CHECK(nodes.size() == 100);
  int on_arc = 0;
  for (cd x : nodes)
  {
    CHECK(std::abs(x - half.center) <= half.radius + 1e-12);
    CHECK((x - half.center).imag() >= -1e-12);
    on_arc += std::abs(std::abs(x - half.center) - half.radius) < 1e-12 &&
                  (x - half.center).imag() > 1e-12
                ? 1
                : 0;
  }
  // Arc gets round(m pi / (pi + 2)) nodes; its two endpoints sit on the diameter line.
  CHECK(on_arc == std::lround(100 * std::numbers::pi / (std::numbers::pi + 2.0)) - 2);

  std::vector<cd> all = SampleBoundary(half, 1000);
  std::sort(all.begin(), all.end(), [](cd a, cd b)
            { return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag(); });
  CHECK(std::adjacent_find(all.begin(), all.end()) == all.end());

  std::vector<cd> big = SampleBoundary(Region{0.0, 1.0, false}, 1000000);
  std::sort(big.begin(), big.end(), [](cd a, cd b)
            { return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag(); });
  CHECK(std::adjacent_find(big.begin(), big.end()) == big.end());

  CHECK_THROWS_AS(SampleBoundary(Region{0.0, 1.0, false}, 0), Error);
}

TEST_CASE("Matrix Market reader")
{
  SUBCASE("symmetric storage is expanded")
  {
    const CMatrix A(ReadMatrixMarket(kData / "sym_real.mtx"));
    CMatrix ref(3, 3);
    ref << 4.0, -1.0, 0.0, -1.0, 0.0, -1.5, 0.0, -1.5, 2.0;
    CHECK((A - ref).norm() == 0.0);
  }

  SUBCASE("hermitian storage is expanded with conjugation")
  {
    const CMatrix A(ReadMatrixMarket(kData / "herm_complex.mtx"));
    CHECK(A(1, 0) == cd(1.0, 2.0));
    CHECK(A(0, 1) == cd(1.0, -2.0));
    CHECK(A(0, 0) == cd(3.0, 0.0));
  }

  SUBCASE("array format is column major")
  {
    const CMatrix A(ReadMatrixMarket(kData / "dense_array.mtx"));
    REQUIRE(A.rows() == 2);
    REQUIRE(A.cols() == 3);
    CHECK(A(0, 0) == cd(1.0));
    CHECK(A(1, 0) == cd(2.0));
    CHECK(A(0, 2) == cd(5.0));
  }

  SUBCASE("errors carry file and line")
  {
    try
    {
      ReadMatrixMarket(kData / "bad_entry.mtx");
      FAIL("expected a parse error");
    }
    catch (const Error &e)
    {
      CHECK(e.kind() == ErrorKind::Parse);
      CHECK(std::string(e.what()).find("bad_entry.mtx:4") != std::string::npos);
    }
    try
    {
      ReadMatrixMarket(kData / "missing.mtx");
      FAIL("expected an I/O error");
    }
    catch (const Error &e)
    {
      CHECK(e.kind() == ErrorKind::Io);
    }
    std::istringstream no_banner("3 3 1\n1 1 1.0\n");
    CHECK_THROWS_AS(ReadMatrixMarket(no_banner), Error);
  }

  SUBCASE("round trip is lossless")
  {
    Rng rng(2);
    CMatrix D = rng.Matrix(7, 5);
    D(3, 2) = 0.0;
    D(0, 4) = cd(1.0 / 3.0, -std::numbers::pi);
    const SpMatrix A = D.sparseView();
    std::stringstream buf;
    WriteMatrixMarket(buf, A);
    const CMatrix B(ReadMatrixMarket(buf));
    CHECK((B - D).norm() == 0.0);

    RVector rd = RVector::Random(6);
    const SpMatrix R = CMatrix(rd.cast<cd>().asDiagonal()).sparseView();
    std::stringstream rbuf;
    WriteMatrixMarket(rbuf, R);
    CHECK((CMatrix(ReadMatrixMarket(rbuf)) - CMatrix(R)).norm() == 0.0);
  }
}

TEST_CASE("manifest loading")
{
  SUBCASE("mixed file and inline matrices")
  {
    const SplitFormNEP nep = LoadManifest(kData / "small.json");
    CHECK(nep.name == "small");
    CHECK(nep.NumTerms() == 3);
    CHECK(nep.Dim() == 3);
    CHECK(nep.terms[2].kind == ScalarFunction::Kind::SqrtShift);
    CHECK(CMatrix(nep.matrices[2])(2, 2) == cd(0.0, 0.2));
    REQUIRE(nep.default_region.has_value());
    CHECK(nep.default_region->center == cd(3.0));
  }

  SUBCASE("dimension mismatch is reported")
  {
    CHECK_THROWS_AS(LoadManifest(kData / "mismatch.json"), Error);
  }

  SUBCASE("malformed documents")
  {
    const auto dir = TempDir("manifest_bad");
    std::ofstream(dir / "a.json") << "{ not json";
    std::ofstream(dir / "b.json") << R"({"terms": [{"kind": "warp"}], "matrices": [{"inline": [[1]]}]})";
    for (const char *f : {"a.json", "b.json"})
    {
      try
      {
        LoadManifest(dir / f);
        FAIL("expected a parse error");
      }
      catch (const Error &e)
      {
        CHECK(e.kind() == ErrorKind::Parse);
      }
    }
    try
    {
      LoadManifest(dir / "absent.json");
      FAIL("expected an I/O error");
    }
    catch (const Error &e)
    {
      CHECK(e.kind() == ErrorKind::Io);
    }
    std::filesystem::remove_all(dir);
  }

  SUBCASE("x-independent problem has an empty spectrum")
  {
    const auto dir = TempDir("manifest_const");
    std::ofstream(dir / "id.json")
      << R"({"name": "id", "terms": [{"kind": "constant", "params": {"alpha": 1}}],
            "matrices": [{"inline": [[1, 0], [0, 1]]}]})";
    const SplitFormNEP nep = LoadManifest(dir / "id.json");
    RunConfig config;
    config.problem = "id";
    config.region = Region{cd(0.5, 0.5), 2.0, false};
    config.nodes = 20;
    config.max_degree = 4;
    const EigenReport report = Run(nep, config);
    CHECK(report.InRegionCount() == 0);
    CHECK(report.eigen.empty());
    std::filesystem::remove_all(dir);
  }

  SUBCASE("export and reload reproduce the matrices exactly")
  {
    const auto dir = TempDir("manifest_roundtrip");
    const SplitFormNEP nep = Hadeler(20);
    const auto path = ExportManifest(nep, dir, "hadeler20");
    const SplitFormNEP back = LoadManifest(path);
    REQUIRE(back.NumTerms() == nep.NumTerms());
    for (int i = 0; i < nep.NumTerms(); i++)
    {
      CHECK((CMatrix(back.matrices[i]) - CMatrix(nep.matrices[i])).norm() == 0.0);
      CHECK(back.terms[i].kind == nep.terms[i].kind);
      CHECK(back.terms[i](cd(0.3, 0.4)) == nep.terms[i](cd(0.3, 0.4)));
    }
    CHECK(back.default_region->center == nep.default_region->center);
    CHECK(back.default_region->radius == nep.default_region->radius);
    std::filesystem::remove_all(dir);
  }
}
