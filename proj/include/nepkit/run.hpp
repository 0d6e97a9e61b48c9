// Copyright nepkit contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef NEPKIT_RUN_HPP
#define NEPKIT_RUN_HPP

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nepkit/eigensolve.hpp"
#include "nepkit/filter.hpp"
#include "nepkit/mdlawson.hpp"
#include "nepkit/nep.hpp"
#include "nepkit/types.hpp"

namespace nepkit
{

enum class SolverKind
{
  Auto,
  Dense,
  Filter
};

const char *SolverName(SolverKind kind);
SolverKind ParseSolver(const std::string &name);

// Pencil size up to which the automatic choice uses the dense solver.
inline constexpr int kDenseLimit = 5000;

struct RunConfig
{
  std::string problem;                   // built-in name, used when manifest is empty
  std::filesystem::path manifest;
  std::optional<Region> region;          // default: the problem's region
  int nodes = 100;                       // boundary samples
  double tol = 1e-10;                    // target sqrt(e)
  int max_degree = 30;
  SolverKind solver = SolverKind::Auto;
  SIFConfig sif;                         // subspace, shift, order, thresholds, seed
  LawsonOptions lawson;                  // admissible is set by Run
  int refine_steps = 2;
  std::filesystem::path pencil_export;   // stem for C0 / C1 Matrix Market files

  void Validate() const;
};

struct ApproxSummary
{
  int degree = 0;
  double sqrt_e = 0.0;  // over all sample nodes
  double gap = 0.0;
  int iterations = 0;
  bool converged = false;  // Lawson duality gap below eps_r
  bool met_tol = false;    // sqrt_e < RunConfig::tol
  bool admissible = true;  // pole-free in the region
};

struct Timings
{
  double fit = 0.0;
  double pencil = 0.0;
  double solve = 0.0;
};

struct EigenReport
{
  std::string problem;
  RunConfig config;
  Region region;
  SolverKind solver_used = SolverKind::Dense;
  int pencil_size = 0;

  ApproxSummary approx;
  std::vector<LawsonTraceRow> lawson_trace;  // of the returned fit
  double gram_norm = 0.0;
  double bound = 0.0;

  bool pole_free = true;
  std::vector<cd> poles;
  std::vector<cd> poles_inside;
  std::vector<std::vector<cd>> zeros;  // per term

  std::vector<Eigenpair> eigen;
  bool solver_converged = true;
  int solver_iterations = 0;
  std::vector<SIFTraceRow> sif_trace;
  Timings timings;

  // Exit status 0 condition: the fit met the tolerance and the solver converged.
  bool Success() const { return approx.met_tol && solver_converged; }
  int InRegionCount() const;
};

//
// Degree escalation k = 1..max_degree with type (k, k) fits on a fixed set
// of boundary samples, stopping at the first fit with sqrt(e) < tol (the
// best fit is kept if none does). The fit is linearized and solved with the
// dense or the filter solver, and each eigenpair is checked against the
// original problem.
//
EigenReport Run(const RunConfig &config);
EigenReport Run(const SplitFormNEP &nep, const RunConfig &config);

SplitFormNEP LoadProblem(const RunConfig &config);

enum class ReportFormat
{
  Json,
  Csv
};

ReportFormat ParseFormat(const std::string &name);

void WriteJson(std::ostream &os, const EigenReport &report);
void WriteCsv(std::ostream &os, const EigenReport &report);
void Emit(const EigenReport &report, ReportFormat format, const std::filesystem::path &path);

}  // namespace nepkit

#endif  // NEPKIT_RUN_HPP
