// Copyright nepkit contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "nepkit/mdlawson.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

namespace nepkit
{

namespace
{

// The dual problem is small ((m s) x (d + 1)), so it is solved in extended
// precision: its smallest singular value sits near the double rounding floor
// of ||F Q_q|| for well-resolved fits.
using xcd = std::complex<long double>;
using XMatrix = Eigen::Matrix<xcd, Eigen::Dynamic, Eigen::Dynamic>;
using XVector = Eigen::Matrix<xcd, Eigen::Dynamic, 1>;
using XRVector = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

struct ThinQR
{
  XMatrix q;
  XMatrix r;
};

ThinQR ThinQRChecked(const XMatrix &A, const char *what)
{
  const auto cols = A.cols();
  Eigen::HouseholderQR<XMatrix> qr(A);
  ThinQR out;
  out.q = qr.householderQ() * XMatrix::Identity(A.rows(), cols);
  out.r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  const long double tol = 1e-14L * A.norm();
  for (Eigen::Index j = 0; j < cols; j++)
  {
    if (!(std::abs(out.r(j, j)) > tol))
    {
      Fail(ErrorKind::RankDeficient, std::string("DualValue: weighted ") + what +
                                         " basis lost rank at column " + std::to_string(j) +
                                         " of " + std::to_string(cols));
    }
  }
  return out;
}

// Unit vector in span(V) whose trailing (t - 1) entries vanish, i.e. the
// lowest-degree member of a tied singular subspace.
XVector LowestDegreeVector(const XMatrix &V)
{
  const auto t = V.cols();
  if (t == 1)
  {
    return V.col(0);
  }
  const XMatrix tail = V.bottomRows(t - 1);
  Eigen::JacobiSVD<XMatrix> svd(tail, Eigen::ComputeFullV);
  const XVector y = svd.matrixV().col(t - 1);
  XVector v = V * y;
  v.tail(t - 1).setZero();
  return v / v.norm();
}

CVector ToDouble(const XVector &x)
{
  CVector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); i++)
  {
    out(i) = cd(static_cast<double>(x(i).real()), static_cast<double>(x(i).imag()));
  }
  return out;
}

std::vector<int> AllIndices(int m)
{
  std::vector<int> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

}  // namespace

DegreeSpec DegreeSpec::Uniform(int s, int degree)
{
  DegreeSpec spec;
  spec.numerator.assign(s, degree);
  spec.denominator = degree;
  return spec;
}

int DegreeSpec::MaxDegree() const
{
  int g = denominator;
  for (int n : numerator)
  {
    g = std::max(g, n);
  }
  return g;
}

int DegreeSpec::MinNodes() const
{
  int m = denominator + 2;
  for (int n : numerator)
  {
    m = std::max(m, n + denominator + 2);
  }
  return m;
}

DualResult DualValue(const SampleSet &samples, const VABasis &basis, const DegreeSpec &spec,
                     std::span<const double> weights, std::span<const int> active_in)
{
  const int s = samples.NumTerms();
  Require(spec.NumTerms() == s, "DualValue: degree spec has " +
                                    std::to_string(spec.NumTerms()) + " terms, samples have " +
                                    std::to_string(s));
  Require(basis.Degree() >= spec.MaxDegree(), "DualValue: basis degree too low");
  Require(basis.NumNodes() == samples.NumNodes(), "DualValue: basis/sample node mismatch");

  std::vector<int> all;
  std::span<const int> active = active_in;
  if (active.empty())
  {
    all = AllIndices(samples.NumNodes());
    active = all;
  }
  const int ma = static_cast<int>(active.size());
  Require(static_cast<int>(weights.size()) == ma, "DualValue: weight/node count mismatch");
  const int d1 = spec.denominator + 1;
  Require(ma >= d1, "DualValue: fewer active nodes than denominator coefficients");

  const CMatrix &Q = basis.Q();
  XRVector sw(ma);
  for (int k = 0; k < ma; k++)
  {
    Require(weights[k] >= 0.0, "DualValue: negative weight");
    sw(k) = std::sqrt(static_cast<long double>(weights[k]));
  }
  auto weighted_rows = [&](int cols)
  {
    XMatrix out(ma, cols);
    for (int k = 0; k < ma; k++)
    {
      for (int j = 0; j < cols; j++)
      {
        out(k, j) = sw(k) * xcd(Q(active[k], j));
      }
    }
    return out;
  };

  const ThinQR qq = ThinQRChecked(weighted_rows(d1), "denominator");

  // Stacked projected matrix (I - Q_p Q_p^H) F Q_q, one block per term.
  XMatrix K(static_cast<Eigen::Index>(ma) * s, d1);
  std::vector<ThinQR> qp(s);
  std::vector<XMatrix> FQq(s);
  for (int i = 0; i < s; i++)
  {
    const int ni1 = spec.numerator[i] + 1;
    Require(ma >= ni1, "DualValue: fewer active nodes than numerator coefficients");
    qp[i] = ni1 == d1 ? qq : ThinQRChecked(weighted_rows(ni1), "numerator");
    FQq[i].resize(ma, d1);
    for (int k = 0; k < ma; k++)
    {
      FQq[i].row(k) = xcd(samples.values(active[k], i)) * qq.q.row(k);
    }
    K.middleRows(static_cast<Eigen::Index>(i) * ma, ma) =
        FQq[i] - qp[i].q * (qp[i].q.adjoint() * FQq[i]);
  }

  Eigen::JacobiSVD<XMatrix> svd(K, Eigen::ComputeThinV);
  const XRVector &sv = svd.singularValues();
  const long double smin = sv(d1 - 1);

  long double scale = 0.0L;
  for (int i = 0; i < s; i++)
  {
    scale += FQq[i].squaredNorm();
  }
  scale = std::max(std::sqrt(scale), sv(0));
  const long double tie_tol = 1e-14L * scale;
  int first_tied = d1 - 1;
  while (first_tied > 0 && sv(first_tied - 1) - smin <= tie_tol)
  {
    first_tied--;
  }
  const XVector bhat = LowestDegreeVector(svd.matrixV().rightCols(d1 - first_tied));

  DualResult out;
  out.d_value = static_cast<double>(smin * smin);
  out.sigma_gap = d1 >= 2 ? static_cast<double>(sv(d1 - 2) - smin)
                          : std::numeric_limits<double>::infinity();
  out.b = ToDouble(qq.r.triangularView<Eigen::Upper>().solve(bhat));
  out.a.resize(s);
  for (int i = 0; i < s; i++)
  {
    const XVector ahat = qp[i].q.adjoint() * (FQq[i] * bhat);
    out.a[i] = ToDouble(qp[i].r.triangularView<Eigen::Upper>().solve(ahat));
  }
  return out;
}

CVector RationalApproximant::PaddedNumerator(int i) const
{
  CVector c = CVector::Zero(basis->Degree() + 1);
  c.head(a[i].size()) = a[i];
  return c;
}

CVector RationalApproximant::PaddedDenominator() const
{
  CVector c = CVector::Zero(basis->Degree() + 1);
  c.head(b.size()) = b;
  return c;
}

CVector RationalApproximant::Denominator(std::span<const cd> points) const
{
  const CMatrix V = basis->Evaluate(points);
  return V.leftCols(b.size()) * b;
}

CMatrix RationalApproximant::Evaluate(std::span<const cd> points) const
{
  const CMatrix V = basis->Evaluate(points);
  const CVector q = V.leftCols(b.size()) * b;
  std::string bad;
  for (Eigen::Index l = 0; l < q.size(); l++)
  {
    if (q(l) == cd(0.0) || !std::isfinite(std::abs(q(l))))
    {
      bad += " (" + std::to_string(points[l].real()) + "," + std::to_string(points[l].imag()) +
             ")";
    }
  }
  if (!bad.empty())
  {
    Fail(ErrorKind::PoleHit, "RationalApproximant::Evaluate: denominator vanishes at" + bad);
  }
  CMatrix out(points.size(), NumTerms());
  for (int i = 0; i < NumTerms(); i++)
  {
    out.col(i) = (V.leftCols(a[i].size()) * a[i]).cwiseQuotient(q);
  }
  return out;
}

RVector PointwiseErrors(const SampleSet &samples, const RationalApproximant &xi)
{
  const CMatrix &Q = xi.basis->Q();
  const int m = samples.NumNodes();
  const auto d1 = xi.b.size();
  RVector err(m);
  for (int l = 0; l < m; l++)
  {
    const cd q = Q.row(l).head(d1).transpose().cwiseProduct(xi.b).sum();
    double e = 0.0;
    for (int i = 0; i < xi.NumTerms(); i++)
    {
      const auto ni1 = xi.a[i].size();
      const cd p = Q.row(l).head(ni1).transpose().cwiseProduct(xi.a[i]).sum();
      e += std::norm(samples.values(l, i) - p / q);
    }
    err(l) = std::isfinite(e) ? e : std::numeric_limits<double>::infinity();
  }
  return err;
}

double MaxError(const SampleSet &samples, const RationalApproximant &xi)
{
  const RVector err = PointwiseErrors(samples, xi);
  if (xi.active.empty())
  {
    return err.maxCoeff();
  }
  double e = 0.0;
  for (int l : xi.active)
  {
    e = std::max(e, err(l));
  }
  return e;
}

LawsonResult Lawson(const SampleSet &samples, const DegreeSpec &spec, const LawsonOptions &opts)
{
  auto basis = std::make_shared<const VABasis>(BuildBasis(samples.nodes, spec.MaxDegree()));
  return Lawson(samples, std::move(basis), spec, opts);
}

LawsonResult Lawson(const SampleSet &samples, std::shared_ptr<const VABasis> basis,
                    const DegreeSpec &spec, const LawsonOptions &opts)
{
  Require(opts.eps_r > 0.0, "Lawson: eps_r must be positive");
  Require(opts.max_iters >= 1, "Lawson: max_iters must be at least 1");
  Require(opts.beta > 0.0, "Lawson: beta must be positive");
  Require(samples.values.rows() == samples.NumNodes(), "Lawson: value rows != node count");
  Require(spec.NumTerms() == samples.NumTerms(), "Lawson: degree spec / term count mismatch");
  const int m = samples.NumNodes();
  Require(m >= spec.MinNodes(), "Lawson: need at least " + std::to_string(spec.MinNodes()) +
                                    " nodes for this degree spec, got " + std::to_string(m));

  // Scale used to recognise an exact fit (e(xi) at rounding level).
  double tmax = 0.0;
  for (int l = 0; l < m; l++)
  {
    tmax = std::max(tmax, samples.values.row(l).norm());
  }
  const double exact_tol = 16.0 * std::numeric_limits<double>::epsilon() * (1.0 + tmax);

  std::vector<int> active = AllIndices(m);
  std::vector<double> w(m, 1.0 / m);

  LawsonResult result;
  bool have_best = false;
  bool best_ok = false;

  for (int iter = 0; iter < opts.max_iters; iter++)
  {
    // Filtering.
    {
      std::vector<int> keep_idx;
      std::vector<double> keep_w;
      for (std::size_t k = 0; k < active.size(); k++)
      {
        if (w[k] >= opts.eps_w)
        {
          keep_idx.push_back(active[k]);
          keep_w.push_back(w[k]);
        }
      }
      // Filtering stops short of leaving fewer nodes than the degree spec
      // needs; the small weights then simply stay in play.
      const bool enough = static_cast<int>(keep_idx.size()) >= spec.MinNodes();
      if (keep_idx.size() != active.size() && enough)
      {
        long double sum = 0.0L;
        for (double v : keep_w)
        {
          sum += v;
        }
        for (double &v : keep_w)
        {
          v = static_cast<double>(v / sum);
        }
        active = std::move(keep_idx);
        w = std::move(keep_w);
      }
    }

    DualResult dual;
    try
    {
      dual = DualValue(samples, *basis, spec, w, active);
    }
    catch (const Error &e)
    {
      // Weights concentrated so far that the weighted basis lost rank: keep
      // the best iterate found so far, or report if there is none.
      if (e.kind() != ErrorKind::RankDeficient || !have_best)
      {
        throw;
      }
      result.rank_stop = true;
      break;
    }

    RationalApproximant xi;
    xi.a = dual.a;
    xi.b = dual.b;
    xi.spec = spec;
    xi.basis = basis;
    xi.active = active;
    xi.d_value = dual.d_value;
    xi.iterations = iter + 1;

    const RVector err = PointwiseErrors(samples, xi);
    double e = 0.0;
    for (int l : active)
    {
      e = std::max(e, err(l));
    }
    xi.e_max = e;
    xi.e_all = err.maxCoeff();
    const bool exact = std::sqrt(e) <= exact_tol;
    xi.gap = exact ? 0.0 : std::abs(e - dual.d_value) / e;
    xi.converged = xi.gap < opts.eps_r;

    result.trace.push_back({iter + 1, dual.d_value, e, xi.gap, static_cast<int>(active.size())});

    // Ranked on every sample node so that filtering cannot make an iterate
    // look better than it is; admissible iterates win over the rest.
    const bool ok = !opts.admissible || opts.admissible(xi);
    const bool take = !have_best || (ok != best_ok ? ok : (xi.e_all < result.approx.e_all || xi.converged));
    if (take)
    {
      result.approx = xi;
      have_best = true;
      best_ok = ok;
    }
    result.final_active = active;
    result.final_weights = Eigen::Map<const RVector>(w.data(), static_cast<Eigen::Index>(w.size()));
    if (xi.converged)
    {
      break;
    }

    // Weight update w_l <- w_l ||t(x_l) - xi(x_l)||^beta / sum(...).
    long double sum = 0.0L;
    std::vector<double> next(active.size());
    for (std::size_t k = 0; k < active.size(); k++)
    {
      next[k] = w[k] * std::pow(err(active[k]), 0.5 * opts.beta);
      sum += next[k];
    }
    if (!(sum > 0.0L) || !std::isfinite(static_cast<double>(sum)))
    {
      break;
    }
    for (std::size_t k = 0; k < active.size(); k++)
    {
      w[k] = static_cast<double>(next[k] / sum);
    }
  }
  result.admissible = best_ok;
  return result;
}

void WriteLawsonTrace(std::ostream &os, std::span<const LawsonTraceRow> trace)
{
  os << "iter,d_w,e_xi,gap,active_nodes\n";
  os << std::setprecision(17);
  for (const auto &row : trace)
  {
    os << row.iter << ',' << row.d_w << ',' << row.e_xi << ',' << row.gap << ','
       << row.active_nodes << '\n';
  }
}

}  // namespace nepkit
