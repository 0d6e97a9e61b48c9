// Copyright nepkit contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "nepkit/problems.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace nepkit
{

namespace
{

using json = nlohmann::json;

SpMatrix FromTriplets(int rows, int cols, const std::vector<Eigen::Triplet<cd>> &trip)
{
  SpMatrix A(rows, cols);
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();
  return A;
}

SpMatrix DenseToSparse(const CMatrix &D)
{
  std::vector<Eigen::Triplet<cd>> trip;
  for (Eigen::Index j = 0; j < D.cols(); j++)
  {
    for (Eigen::Index i = 0; i < D.rows(); i++)
    {
      if (D(i, j) != cd(0.0))
      {
        trip.emplace_back(static_cast<int>(i), static_cast<int>(j), D(i, j));
      }
    }
  }
  return FromTriplets(static_cast<int>(D.rows()), static_cast<int>(D.cols()), trip);
}

std::string Lower(std::string s)
{
  for (auto &c : s)
  {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return s;
}

[[noreturn]] void ParseFail(const std::string &source, int line, const std::string &msg)
{
  Fail(ErrorKind::Parse, source + ":" + std::to_string(line) + ": " + msg);
}

std::string FormatDouble(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

cd ParseComplex(const json &j, const std::string &what)
{
  if (j.is_number())
  {
    return {j.get<double>(), 0.0};
  }
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
  {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  Fail(ErrorKind::Parse, what + ": expected a number or [re, im]");
}

json ComplexToJson(cd z)
{
  if (z.imag() == 0.0)
  {
    return z.real();
  }
  return json::array({z.real(), z.imag()});
}

cd ParamComplex(const json &params, const char *key, cd fallback, const std::string &where)
{
  if (!params.contains(key))
  {
    return fallback;
  }
  return ParseComplex(params.at(key), where + "." + key);
}

ScalarFunction ParseTerm(const json &t, std::size_t index)
{
  const std::string where = "terms[" + std::to_string(index) + "]";
  if (!t.is_object() || !t.contains("kind") || !t.at("kind").is_string())
  {
    Fail(ErrorKind::Parse, where + ": missing string field 'kind'");
  }
  const std::string kind = t.at("kind").get<std::string>();
  const json params = t.contains("params") ? t.at("params") : json::object();
  if (!params.is_object())
  {
    Fail(ErrorKind::Parse, where + ".params: expected an object");
  }
  if (kind == "constant")
  {
    return ScalarFunction::Constant(ParamComplex(params, "alpha", 1.0, where));
  }
  if (kind == "monomial")
  {
    if (!params.contains("power") || !params.at("power").is_number_integer())
    {
      Fail(ErrorKind::Parse, where + ": monomial needs integer 'power'");
    }
    return ScalarFunction::Monomial(params.at("power").get<int>(),
                                    ParamComplex(params, "alpha", 1.0, where));
  }
  if (kind == "exp_affine")
  {
    return ScalarFunction::ExpAffine(ParamComplex(params, "alpha", 1.0, where),
                                     ParamComplex(params, "beta", 0.0, where));
  }
  if (kind == "exp_quadratic")
  {
    return ScalarFunction::ExpQuadratic(ParamComplex(params, "alpha", 1.0, where));
  }
  if (kind == "expm1")
  {
    return ScalarFunction::Expm1();
  }
  if (kind == "sqrt_shift")
  {
    return ScalarFunction::SqrtShift(ParamComplex(params, "shift", 0.0, where));
  }
  Fail(ErrorKind::Parse, where + ": unknown kind '" + kind + "'");
}

json TermToJson(const ScalarFunction &f)
{
  json params = json::object();
  switch (f.kind)
  {
    case ScalarFunction::Kind::Constant:
      params["alpha"] = ComplexToJson(f.alpha);
      break;
    case ScalarFunction::Kind::Monomial:
      params["power"] = f.power;
      params["alpha"] = ComplexToJson(f.alpha);
      break;
    case ScalarFunction::Kind::ExpAffine:
      params["alpha"] = ComplexToJson(f.alpha);
      params["beta"] = ComplexToJson(f.beta);
      break;
    case ScalarFunction::Kind::ExpQuadratic:
      params["alpha"] = ComplexToJson(f.alpha);
      break;
    case ScalarFunction::Kind::Expm1:
      break;
    case ScalarFunction::Kind::SqrtShift:
      params["shift"] = ComplexToJson(f.shift);
      break;
  }
  return json{{"kind", f.KindName()}, {"params", params}};
}

SpMatrix ParseInline(const json &rows, const std::string &where)
{
  if (!rows.is_array() || rows.empty())
  {
    Fail(ErrorKind::Parse, where + ": inline matrix must be a non-empty array of rows");
  }
  const auto nr = rows.size();
  const auto nc = rows[0].is_array() ? rows[0].size() : 0;
  CMatrix D(nr, nc);
  for (std::size_t i = 0; i < nr; i++)
  {
    if (!rows[i].is_array() || rows[i].size() != nc)
    {
      Fail(ErrorKind::Parse, where + ": row " + std::to_string(i) + " has the wrong length");
    }
    for (std::size_t j = 0; j < nc; j++)
    {
      D(i, j) = ParseComplex(rows[i][j], where);
    }
  }
  return DenseToSparse(D);
}

}  // namespace

SplitFormNEP Example1()
{
  SplitFormNEP nep;
  nep.name = "example1";
  nep.terms = {ScalarFunction::ExpQuadratic(1.0), ScalarFunction::Constant(1.0)};
  CMatrix E1 = CMatrix::Zero(2, 2);
  E1(0, 0) = 1.0;
  CMatrix E2 = CMatrix::Ones(2, 2);
  E2(0, 0) = 0.0;
  nep.matrices = {DenseToSparse(E1), DenseToSparse(E2)};
  nep.default_region = Region{0.0, 3.0, false};
  return nep;
}

SplitFormNEP TimeDelay2()
{
  SplitFormNEP nep;
  nep.name = "time_delay2";
  nep.terms = {ScalarFunction::Constant(1.0), ScalarFunction::Monomial(1),
               ScalarFunction::ExpAffine(-1.0)};
  CMatrix B0(2, 2), A1(2, 2);
  B0 << -5.0, 1.0, 2.0, -6.0;
  A1 << 2.0, -1.0, -4.0, 1.0;
  nep.matrices = {DenseToSparse(-B0), DenseToSparse(CMatrix::Identity(2, 2)), DenseToSparse(A1)};
  nep.default_region = Region{-1.0, 6.0, false};
  return nep;
}

SplitFormNEP Hadeler(int n, double b0)
{
  Require(n >= 1, "Hadeler: n must be positive");
  SplitFormNEP nep;
  nep.name = n == 200 ? "hadeler" : "hadeler:" + std::to_string(n);
  nep.terms = {ScalarFunction::Constant(-1.0), ScalarFunction::Monomial(2),
               ScalarFunction::Expm1()};
  CMatrix B1(n, n), B2(n, n);
  for (int j = 1; j <= n; j++)
  {
    for (int i = 1; i <= n; i++)
    {
      B1(i - 1, j - 1) = static_cast<double>(n + 1 - std::max(i, j)) * i * j;
      B2(i - 1, j - 1) = (i == j ? n : 0.0) + 1.0 / (i + j);
    }
  }
  nep.matrices = {DenseToSparse(b0 * CMatrix::Identity(n, n)), DenseToSparse(B2),
                  DenseToSparse(B1)};
  nep.default_region = Region{-30.0, 11.5, false};
  return nep;
}

std::vector<std::string> BuiltinNames()
{
  return {"example1", "time_delay2", "hadeler"};
}

SplitFormNEP BuiltinProblem(const std::string &name)
{
  if (name == "example1")
  {
    return Example1();
  }
  if (name == "time_delay2")
  {
    return TimeDelay2();
  }
  if (name == "hadeler")
  {
    return Hadeler();
  }
  if (name.rfind("hadeler:", 0) == 0)
  {
    const std::string arg = name.substr(8);
    std::size_t pos = 0;
    int n = 0;
    try
    {
      n = std::stoi(arg, &pos);
    }
    catch (const std::exception &)
    {
      pos = 0;
    }
    Require(pos == arg.size() && n >= 1, "BuiltinProblem: bad hadeler size '" + arg + "'");
    return Hadeler(n);
  }
  Fail(ErrorKind::InvalidArgument,
       "unknown problem '" + name + "' (known: example1, time_delay2, hadeler[:N])");
}

std::vector<cd> SampleBoundary(const Region &region, int m)
{
  Require(m >= 1, "SampleBoundary: m must be positive");
  Require(region.radius > 0.0, "SampleBoundary: radius must be positive");
  const double pi = std::numbers::pi;
  const cd c = region.center;
  const double r = region.radius;
  std::vector<cd> nodes;
  nodes.reserve(m);
  if (!region.upper_half)
  {
    for (int l = 0; l < m; l++)
    {
      nodes.push_back(c + r * std::polar(1.0, 2.0 * pi * l / m));
    }
    return nodes;
  }
  Require(m >= 2, "SampleBoundary: half-disk needs at least 2 nodes");
  int arc = static_cast<int>(std::lround(m * pi / (pi + 2.0)));
  arc = std::clamp(arc, 2, m);
  const int diam = m - arc;
  for (int l = 0; l < arc; l++)
  {
    nodes.push_back(c + r * std::polar(1.0, pi * l / (arc - 1)));
  }
  for (int l = 1; l <= diam; l++)
  {
    nodes.push_back(c + cd(-r + 2.0 * r * l / (diam + 1), 0.0));
  }
  return nodes;
}

SpMatrix ReadMatrixMarket(std::istream &in, const std::string &source)
{
  std::string line;
  int lineno = 0;
  if (!std::getline(in, line))
  {
    ParseFail(source, 1, "empty input");
  }
  lineno++;
  std::istringstream hs(line);
  std::string banner, object, format, field, symmetry;
  hs >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket")
  {
    ParseFail(source, lineno, "missing %%MatrixMarket banner");
  }
  object = Lower(object);
  format = Lower(format);
  field = Lower(field);
  symmetry = Lower(symmetry);
  if (object != "matrix")
  {
    ParseFail(source, lineno, "unsupported object '" + object + "'");
  }
  const bool coordinate = format == "coordinate";
  if (!coordinate && format != "array")
  {
    ParseFail(source, lineno, "unsupported format '" + format + "'");
  }
  if (field != "real" && field != "complex" && field != "integer" && field != "pattern")
  {
    ParseFail(source, lineno, "unsupported field '" + field + "'");
  }
  if (field == "pattern" && !coordinate)
  {
    ParseFail(source, lineno, "pattern field requires coordinate format");
  }
  if (symmetry != "general" && symmetry != "symmetric" && symmetry != "hermitian" &&
      symmetry != "skew-symmetric")
  {
    ParseFail(source, lineno, "unsupported symmetry '" + symmetry + "'");
  }
  const bool is_complex = field == "complex";

  auto next_data_line = [&](std::string &out) -> bool
  {
    while (std::getline(in, out))
    {
      lineno++;
      const auto p = out.find_first_not_of(" \t\r");
      if (p == std::string::npos || out[p] == '%')
      {
        continue;
      }
      return true;
    }
    return false;
  };

  if (!next_data_line(line))
  {
    ParseFail(source, lineno, "missing size line");
  }
  long rows = 0, cols = 0, nnz = 0;
  {
    std::istringstream ss(line);
    if (!(ss >> rows >> cols) || rows < 0 || cols < 0)
    {
      ParseFail(source, lineno, "bad size line");
    }
    if (coordinate && !(ss >> nnz))
    {
      ParseFail(source, lineno, "coordinate size line needs an entry count");
    }
  }
  if (symmetry != "general" && rows != cols)
  {
    ParseFail(source, lineno, "symmetric storage requires a square matrix");
  }

  std::vector<Eigen::Triplet<cd>> trip;
  auto add = [&](long i, long j, cd v)
  {
    trip.emplace_back(static_cast<int>(i), static_cast<int>(j), v);
    if (i != j)
    {
      if (symmetry == "symmetric")
      {
        trip.emplace_back(static_cast<int>(j), static_cast<int>(i), v);
      }
      else if (symmetry == "hermitian")
      {
        trip.emplace_back(static_cast<int>(j), static_cast<int>(i), std::conj(v));
      }
      else if (symmetry == "skew-symmetric")
      {
        trip.emplace_back(static_cast<int>(j), static_cast<int>(i), -v);
      }
    }
  };
  auto read_value = [&](std::istringstream &ss) -> cd
  {
    double re = 0.0, im = 0.0;
    if (field == "pattern")
    {
      return 1.0;
    }
    if (!(ss >> re))
    {
      ParseFail(source, lineno, "missing value");
    }
    if (is_complex && !(ss >> im))
    {
      ParseFail(source, lineno, "missing imaginary part");
    }
    return {re, im};
  };

  if (coordinate)
  {
    trip.reserve(symmetry == "general" ? nnz : 2 * nnz);
    for (long k = 0; k < nnz; k++)
    {
      if (!next_data_line(line))
      {
        ParseFail(source, lineno, "expected " + std::to_string(nnz) + " entries, got " +
                                      std::to_string(k));
      }
      std::istringstream ss(line);
      long i = 0, j = 0;
      if (!(ss >> i >> j))
      {
        ParseFail(source, lineno, "bad index pair");
      }
      if (i < 1 || i > rows || j < 1 || j > cols)
      {
        ParseFail(source, lineno, "index out of range");
      }
      add(i - 1, j - 1, read_value(ss));
    }
  }
  else
  {
    for (long j = 0; j < cols; j++)
    {
      const long i0 = symmetry == "general" ? 0 : (symmetry == "skew-symmetric" ? j + 1 : j);
      for (long i = i0; i < rows; i++)
      {
        if (!next_data_line(line))
        {
          ParseFail(source, lineno, "array data ended early");
        }
        std::istringstream ss(line);
        const cd v = read_value(ss);
        if (v != cd(0.0))
        {
          add(i, j, v);
        }
      }
    }
  }
  return FromTriplets(static_cast<int>(rows), static_cast<int>(cols), trip);
}

SpMatrix ReadMatrixMarket(const std::filesystem::path &path)
{
  std::ifstream in(path);
  if (!in)
  {
    Fail(ErrorKind::Io, "cannot open '" + path.string() + "'");
  }
  return ReadMatrixMarket(in, path.string());
}

void WriteMatrixMarket(std::ostream &out, const SpMatrix &A)
{
  out << "%%MatrixMarket matrix coordinate complex general\n";
  out << A.rows() << ' ' << A.cols() << ' ' << A.nonZeros() << '\n';
  for (Eigen::Index j = 0; j < A.outerSize(); j++)
  {
    for (SpMatrix::InnerIterator it(A, j); it; ++it)
    {
      out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << FormatDouble(it.value().real()) << ' '
          << FormatDouble(it.value().imag()) << '\n';
    }
  }
}

void WriteMatrixMarket(const std::filesystem::path &path, const SpMatrix &A)
{
  std::ofstream out(path);
  if (!out)
  {
    Fail(ErrorKind::Io, "cannot write '" + path.string() + "'");
  }
  WriteMatrixMarket(out, A);
  if (!out)
  {
    Fail(ErrorKind::Io, "write failed for '" + path.string() + "'");
  }
}

void WriteMatrixMarketDense(const std::filesystem::path &path, const CMatrix &A)
{
  std::ofstream out(path);
  if (!out)
  {
    Fail(ErrorKind::Io, "cannot write '" + path.string() + "'");
  }
  out << "%%MatrixMarket matrix array complex general\n";
  out << A.rows() << ' ' << A.cols() << '\n';
  for (Eigen::Index j = 0; j < A.cols(); j++)
  {
    for (Eigen::Index i = 0; i < A.rows(); i++)
    {
      out << FormatDouble(A(i, j).real()) << ' ' << FormatDouble(A(i, j).imag()) << '\n';
    }
  }
  if (!out)
  {
    Fail(ErrorKind::Io, "write failed for '" + path.string() + "'");
  }
}

SplitFormNEP LoadManifest(const std::filesystem::path &path)
{
  std::ifstream in(path);
  if (!in)
  {
    Fail(ErrorKind::Io, "cannot open manifest '" + path.string() + "'");
  }
  json doc;
  try
  {
    doc = json::parse(in);
  }
  catch (const json::parse_error &e)
  {
    Fail(ErrorKind::Parse, path.string() + ": " + e.what());
  }
  const std::string src = path.string();
  if (!doc.is_object())
  {
    Fail(ErrorKind::Parse, src + ": manifest must be a JSON object");
  }
  SplitFormNEP nep;
  try
  {
    nep.name = doc.value("name", path.stem().string());
    if (!doc.contains("terms") || !doc.at("terms").is_array())
    {
      Fail(ErrorKind::Parse, "missing array 'terms'");
    }
    if (!doc.contains("matrices") || !doc.at("matrices").is_array())
    {
      Fail(ErrorKind::Parse, "missing array 'matrices'");
    }
    const json &terms = doc.at("terms");
    for (std::size_t i = 0; i < terms.size(); i++)
    {
      nep.terms.push_back(ParseTerm(terms[i], i));
    }
    const auto dir = path.parent_path();
    const json &mats = doc.at("matrices");
    for (std::size_t i = 0; i < mats.size(); i++)
    {
      const std::string where = "matrices[" + std::to_string(i) + "]";
      const json &m = mats[i];
      if (m.is_object() && m.contains("path"))
      {
        std::filesystem::path p = m.at("path").get<std::string>();
        if (p.is_relative())
        {
          p = dir / p;
        }
        nep.matrices.push_back(ReadMatrixMarket(p));
      }
      else if (m.is_object() && m.contains("inline"))
      {
        nep.matrices.push_back(ParseInline(m.at("inline"), where));
      }
      else
      {
        Fail(ErrorKind::Parse, where + ": expected {\"path\": ...} or {\"inline\": ...}");
      }
    }
    if (doc.contains("region"))
    {
      const json &r = doc.at("region");
      Region region;
      region.center = ParseComplex(r.at("center"), "region.center");
      region.radius = r.at("radius").get<double>();
      region.upper_half = r.value("half_plane", false);
      if (!(region.radius > 0.0))
      {
        Fail(ErrorKind::Parse, "region.radius must be positive");
      }
      nep.default_region = region;
    }
  }
  catch (const Error &e)
  {
    if (e.kind() == ErrorKind::Parse && std::string(e.what()).rfind(src, 0) != 0)
    {
      Fail(ErrorKind::Parse, src + ": " + e.what());
    }
    throw;
  }
  catch (const json::exception &e)
  {
    Fail(ErrorKind::Parse, src + ": " + e.what());
  }
  try
  {
    nep.Validate();
  }
  catch (const Error &e)
  {
    Fail(e.kind(), src + ": " + e.what());
  }
  return nep;
}

std::filesystem::path ExportManifest(const SplitFormNEP &nep, const std::filesystem::path &dir,
                                     const std::string &stem)
{
  nep.Validate();
  std::filesystem::create_directories(dir);
  json doc;
  doc["name"] = nep.name;
  doc["terms"] = json::array();
  doc["matrices"] = json::array();
  for (int i = 0; i < nep.NumTerms(); i++)
  {
    doc["terms"].push_back(TermToJson(nep.terms[i]));
    const std::string file = stem + "_E" + std::to_string(i + 1) + ".mtx";
    WriteMatrixMarket(dir / file, nep.matrices[i]);
    doc["matrices"].push_back(json{{"path", file}});
  }
  if (nep.default_region)
  {
    const Region &r = *nep.default_region;
    doc["region"] = json{{"center", json::array({r.center.real(), r.center.imag()})},
                         {"radius", r.radius},
                         {"half_plane", r.upper_half}};
  }
  const auto out_path = dir / (stem + ".json");
  std::ofstream out(out_path);
  if (!out)
  {
    Fail(ErrorKind::Io, "cannot write '" + out_path.string() + "'");
  }
  out << doc.dump(2) << '\n';
  return out_path;
}

}  // namespace nepkit
