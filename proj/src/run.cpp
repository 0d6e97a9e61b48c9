// Copyright nepkit contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "nepkit/run.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "nepkit/linearize.hpp"
#include "nepkit/problems.hpp"
#include "nepkit/va_basis.hpp"

namespace nepkit
{

namespace
{

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point a, Clock::time_point b)
{
  return std::chrono::duration<double>(b - a).count();
}

nlohmann::ordered_json Complex(cd z)
{
  return {{"re", z.real()}, {"im", z.imag()}};
}

nlohmann::ordered_json ComplexList(const std::vector<cd> &zs)
{
  auto out = nlohmann::ordered_json::array();
  for (cd z : zs)
  {
    out.push_back(Complex(z));
  }
  return out;
}

std::string Num(double x)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

struct FitOutcome
{
  LawsonResult lawson;
  double sqrt_e = std::numeric_limits<double>::infinity();
  int degree = 0;
};

FitOutcome FitEscalating(const SplitFormNEP &nep, const Region &region, const RunConfig &config)
{
  SampleSet samples;
  samples.nodes = SampleBoundary(region, config.nodes);
  samples.values.resize(config.nodes, nep.NumTerms());
  for (int l = 0; l < config.nodes; l++)
  {
    samples.values.row(l) = nep.EvalTerms(samples.nodes[l]).transpose();
  }

  LawsonOptions opts = config.lawson;
  opts.admissible = [&region](const RationalApproximant &xi)
  {
    return PoleFreeCheck(xi, region).pole_free;
  };

  FitOutcome best;
  for (int k = 1; k <= config.max_degree; k++)
  {
    const DegreeSpec spec = DegreeSpec::Uniform(nep.NumTerms(), k);
    if (spec.MinNodes() > config.nodes)
    {
      Require(k > 1, "Run: " + std::to_string(config.nodes) +
                       " boundary nodes are too few for a degree 1 fit");
      break;
    }
    LawsonResult res = Lawson(samples, spec, opts);
    const double sqrt_e = std::sqrt(res.approx.e_all);
    const bool better = best.degree == 0 || (res.admissible && !best.lawson.admissible) ||
                        (res.admissible == best.lawson.admissible && sqrt_e < best.sqrt_e);
    const bool met = sqrt_e < config.tol;
    if (better || met)
    {
      best.lawson = std::move(res);
      best.sqrt_e = sqrt_e;
      best.degree = k;
    }
    if (met)
    {
      break;
    }
  }
  return best;
}

}  // namespace

const char *SolverName(SolverKind kind)
{
  switch (kind)
  {
    case SolverKind::Auto:
      return "auto";
    case SolverKind::Dense:
      return "dense";
    case SolverKind::Filter:
      return "filter";
  }
  return "auto";
}

SolverKind ParseSolver(const std::string &name)
{
  if (name == "auto")
  {
    return SolverKind::Auto;
  }
  if (name == "dense")
  {
    return SolverKind::Dense;
  }
  if (name == "filter")
  {
    return SolverKind::Filter;
  }
  Fail(ErrorKind::InvalidArgument, "unknown solver '" + name + "' (expected auto, dense or filter)");
}

ReportFormat ParseFormat(const std::string &name)
{
  if (name == "json")
  {
    return ReportFormat::Json;
  }
  if (name == "csv")
  {
    return ReportFormat::Csv;
  }
  Fail(ErrorKind::InvalidArgument, "unknown format '" + name + "' (expected json or csv)");
}

void RunConfig::Validate() const
{
  Require(!problem.empty() || !manifest.empty(), "RunConfig: no problem or manifest given");
  Require(tol > 0.0, "RunConfig: tol must be positive");
  Require(max_degree >= 1, "RunConfig: max_degree must be at least 1");
  Require(nodes >= 1, "RunConfig: nodes must be at least 1");
  Require(refine_steps >= 0, "RunConfig: refine_steps must be non-negative");
  if (region)
  {
    Require(region->radius > 0.0, "RunConfig: region radius must be positive");
  }
  sif.Validate();
}

int EigenReport::InRegionCount() const
{
  int count = 0;
  for (const auto &e : eigen)
  {
    count += e.in_region ? 1 : 0;
  }
  return count;
}

SplitFormNEP LoadProblem(const RunConfig &config)
{
  if (!config.manifest.empty())
  {
    return LoadManifest(config.manifest);
  }
  return BuiltinProblem(config.problem);
}

EigenReport Run(const RunConfig &config)
{
  config.Validate();
  return Run(LoadProblem(config), config);
}

EigenReport Run(const SplitFormNEP &nep, const RunConfig &config)
{
  config.Validate();
  nep.Validate();
  Require(config.region.has_value() || nep.default_region.has_value(),
          "Run: problem '" + nep.name + "' has no default region; give one explicitly");

  EigenReport report;
  report.problem = nep.name;
  report.config = config;
  report.region = config.region.value_or(*nep.default_region);
  const Region &region = report.region;

  // Fit.
  auto t0 = Clock::now();
  FitOutcome fit = FitEscalating(nep, region, config);
  const RationalApproximant &xi = fit.lawson.approx;
  report.approx.degree = fit.degree;
  report.approx.sqrt_e = fit.sqrt_e;
  report.approx.gap = xi.gap;
  report.approx.iterations = xi.iterations;
  report.approx.converged = xi.converged;
  report.approx.met_tol = fit.sqrt_e < config.tol;
  report.approx.admissible = fit.lawson.admissible;
  report.lawson_trace = fit.lawson.trace;
  const CMatrix G = GramMatrix(nep);
  report.gram_norm = GramNorm(G);
  report.bound = ErrorBound(G, xi.e_all);

  const PoleCheck pc = PoleFreeCheck(xi, region);
  report.pole_free = pc.pole_free;
  report.poles = pc.poles;
  report.poles_inside = pc.inside;
  for (int i = 0; i < nep.NumTerms(); i++)
  {
    std::vector<cd> roots;
    try
    {
      roots = PolyRoots(xi.PaddedNumerator(i), xi.basis->H());
    }
    catch (const Error &e)
    {
      if (e.kind() != ErrorKind::InvalidArgument)
      {
        throw;
      }
    }
    report.zeros.push_back(std::move(roots));
  }
  auto t1 = Clock::now();
  report.timings.fit = Seconds(t0, t1);

  // Linearization.
  const MatrixPolynomial poly = Assemble(xi, nep).Trimmed();
  if (poly.Degree() < 1)
  {
    // A constant matrix polynomial has no finite eigenvalues to report.
    report.solver_used = config.solver == SolverKind::Filter ? SolverKind::Filter : SolverKind::Dense;
    report.timings.pencil = Seconds(t1, Clock::now());
    return report;
  }
  const StructuredPencil pencil(poly);
  report.pencil_size = pencil.Size();
  if (!config.pencil_export.empty())
  {
    std::filesystem::path c0 = config.pencil_export;
    std::filesystem::path c1 = config.pencil_export;
    c0 += "_C0.mtx";
    c1 += "_C1.mtx";
    pencil.Export(c0, c1);
  }
  SolverKind solver = config.solver;
  if (solver == SolverKind::Auto)
  {
    solver = pencil.Size() <= kDenseLimit ? SolverKind::Dense : SolverKind::Filter;
  }
  report.solver_used = solver;
  auto t2 = Clock::now();
  report.timings.pencil = Seconds(t1, t2);

  // Eigenpairs.
  std::vector<PencilPair> pairs;
  if (solver == SolverKind::Dense)
  {
    const double scale = pencil.BalancingScale();
    DenseSolveResult dense =
      SolveDense(pencil.DenseC0(scale), pencil.DenseC1(scale), InfiniteCutoff(region));
    pairs = std::move(dense.pairs);
    report.solver_iterations = 1;
  }
  else
  {
    SIFResult sif = SubspaceIterationFilter(pencil, nep, region, config.sif);
    for (auto &sp : sif.pairs)
    {
      if (!sp.ghost)
      {
        pairs.push_back(std::move(sp.pair));
      }
    }
    report.solver_converged = sif.converged;
    report.solver_iterations = sif.iterations;
    report.sif_trace = std::move(sif.trace);
  }
  report.eigen = ExtractNepEigenpairs(pairs, pencil.Poly(), nep, region, config.refine_steps);
  report.timings.solve = Seconds(t2, Clock::now());
  return report;
}

void WriteJson(std::ostream &os, const EigenReport &report)
{
  using nlohmann::ordered_json;
  const RunConfig &c = report.config;
  ordered_json j;
  j["problem"] = report.problem;
  ordered_json cfg;
  cfg["nodes"] = c.nodes;
  cfg["tol"] = c.tol;
  cfg["max_degree"] = c.max_degree;
  cfg["solver"] = SolverName(c.solver);
  cfg["region"] = {{"center", Complex(report.region.center)},
                   {"radius", report.region.radius},
                   {"half_plane", report.region.upper_half}};
  cfg["filter_order"] = c.sif.order;
  cfg["subspace"] = c.sif.subspace;
  cfg["shift"] = c.sif.shift ? Complex(*c.sif.shift) : ordered_json();
  cfg["tau_r"] = c.sif.tau_r;
  cfg["tau_g"] = c.sif.tau_g;
  cfg["seed"] = c.sif.seed;
  j["config"] = cfg;
  j["approx"] = {{"degree", report.approx.degree},
                 {"sqrt_e", report.approx.sqrt_e},
                 {"gap", report.approx.gap},
                 {"iterations", report.approx.iterations},
                 {"converged", report.approx.converged},
                 {"met_tol", report.approx.met_tol}};
  j["bound"] = report.bound;
  j["gram_norm"] = report.gram_norm;
  j["pole_free"] = report.pole_free;
  j["poles"] = ComplexList(report.poles);
  ordered_json zeros = ordered_json::object();
  for (std::size_t i = 0; i < report.zeros.size(); i++)
  {
    zeros["t" + std::to_string(i + 1)] = ComplexList(report.zeros[i]);
  }
  j["zeros"] = zeros;
  auto eigen = ordered_json::array();
  for (const auto &e : report.eigen)
  {
    eigen.push_back({{"re", e.lambda.real()},
                     {"im", e.lambda.imag()},
                     {"residual", e.residual},
                     {"normalized_residual", e.normalized_residual},
                     {"in_region", e.in_region},
                     {"consistency", e.consistency}});
  }
  j["eigen"] = eigen;
  j["timings"] = {{"fit", report.timings.fit},
                  {"pencil", report.timings.pencil},
                  {"solve", report.timings.solve}};
  j["status"] = {{"solver", SolverName(report.solver_used)},
                 {"pencil_size", report.pencil_size},
                 {"solver_converged", report.solver_converged},
                 {"solver_iterations", report.solver_iterations},
                 {"in_region_count", report.InRegionCount()},
                 {"success", report.Success()}};
  os << j.dump(2) << '\n';
}

void WriteCsv(std::ostream &os, const EigenReport &report)
{
  os << "# problem," << report.problem << '\n';
  os << "# degree," << report.approx.degree << '\n';
  os << "# sqrt_e," << Num(report.approx.sqrt_e) << '\n';
  os << "# gap," << Num(report.approx.gap) << '\n';
  os << "# bound," << Num(report.bound) << '\n';
  os << "# pole_free," << (report.pole_free ? "true" : "false") << '\n';
  os << "# solver," << SolverName(report.solver_used) << '\n';
  os << "# success," << (report.Success() ? "true" : "false") << '\n';
  os << "re,im,residual,normalized_residual,in_region,consistency\n";
  for (const auto &e : report.eigen)
  {
    os << Num(e.lambda.real()) << ',' << Num(e.lambda.imag()) << ',' << Num(e.residual) << ','
       << Num(e.normalized_residual) << ',' << (e.in_region ? 1 : 0) << ',' << Num(e.consistency)
       << '\n';
  }
}

void Emit(const EigenReport &report, ReportFormat format, const std::filesystem::path &path)
{
  std::ofstream out(path);
  if (!out)
  {
    Fail(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  }
  if (format == ReportFormat::Json)
  {
    WriteJson(out, report);
  }
  else
  {
    WriteCsv(out, report);
  }
  if (!out)
  {
    Fail(ErrorKind::Io, "write to '" + path.string() + "' failed");
  }
}

}  // namespace nepkit
