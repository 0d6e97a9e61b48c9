// Copyright nepkit contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

//
// Command-line front end: fits a rational approximation of a split-form
// nonlinear eigenvalue problem on the boundary of a disk or half-disk,
// linearizes it and reports the eigenpairs inside the region.
//

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "nepkit/nepkit.h"

namespace
{

constexpr int kExitIncomplete = 1;
constexpr int kExitError = 2;

bool ParseComplex(const std::string &text, double &re, double &im)
{
  std::istringstream in(text);
  char comma = 0;
  if (!(in >> re))
  {
    return false;
  }
  if (!(in >> comma))
  {
    im = 0.0;
    return true;
  }
  return comma == ',' && (in >> im) && (in >> std::ws).eof();
}

int Report(nepkit_status status, const char *what)
{
  std::fprintf(stderr, "nepkit: %s failed (%s): %s\n", what, nepkit_status_name(status),
               nepkit_last_error());
  return kExitError;
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Rational minimax eigensolver for split-form nonlinear eigenvalue problems"};

  std::string problem_name;
  std::string manifest;
  std::string center;
  double radius = 0.0;
  bool half_disk = false;
  int nodes = 100;
  double tol = 1e-10;
  int max_degree = 30;
  std::string solver = "auto";
  int filter_order = 16;
  int subspace = 0;
  int expected = 25;
  std::string shift;
  std::uint64_t seed = 0;
  int filter_iters = 30;
  std::string out = "-";
  std::string format = "json";
  std::string lawson_trace;
  std::string filter_trace;
  std::string export_manifest;
  std::string export_pencil;
  bool list = false;

  auto *source = app.add_option_group("source");
  source->add_option("--problem", problem_name, "built-in problem (see --list)");
  source->add_option("--manifest", manifest, "problem manifest (JSON)");
  source->add_flag("--list", list, "list the built-in problems and exit");
  source->require_option(1);

  app.add_option("--center", center, "region center RE,IM (default: the problem's region)");
  app.add_option("--radius", radius, "region radius")->check(CLI::PositiveNumber);
  app.add_flag("--half-disk", half_disk, "use the upper half of the disk");
  app.add_option("--nodes", nodes, "boundary sample count")->capture_default_str();
  app.add_option("--tol", tol, "target sqrt(e) of the fit")->capture_default_str();
  app.add_option("--max-degree", max_degree, "highest degree tried")->capture_default_str();
  app.add_option("--solver", solver, "dense, filter or auto")
    ->check(CLI::IsMember({"auto", "dense", "filter"}))
    ->capture_default_str();
  app.add_option("--filter-order", filter_order, "quadrature points of the filter")
    ->capture_default_str();
  app.add_option("--subspace", subspace, "filter subspace columns (default 2*expected+10)");
  app.add_option("--expected-count", expected, "estimate of the in-region eigenvalue count")
    ->capture_default_str();
  app.add_option("--shift", shift, "projection shift RE,IM for the filter solver");
  app.add_option("--seed", seed, "seed of the random start block")->capture_default_str();
  app.add_option("--filter-iters", filter_iters, "maximum filter iterations")->capture_default_str();
  app.add_option("--out", out, "report path, '-' for standard output")->capture_default_str();
  app.add_option("--format", format, "json or csv")
    ->check(CLI::IsMember({"json", "csv"}))
    ->capture_default_str();
  app.add_option("--lawson-trace", lawson_trace, "write the fit iteration trace (CSV)");
  app.add_option("--filter-trace", filter_trace, "write the filter iteration trace (CSV)");
  app.add_option("--export-manifest", export_manifest,
                 "write the problem as manifest + Matrix Market files into DIR and exit");
  app.add_option("--export-pencil", export_pencil, "write the pencil to STEM_C0.mtx, STEM_C1.mtx");

  CLI11_PARSE(app, argc, argv);

  if (list)
  {
    for (int i = 0; i < nepkit_builtin_count(); i++)
    {
      std::printf("%s\n", nepkit_builtin_name(i));
    }
    return EXIT_SUCCESS;
  }

  nepkit_problem *problem = nullptr;
  nepkit_status st = manifest.empty() ? nepkit_problem_builtin(problem_name.c_str(), &problem)
                                      : nepkit_problem_load_manifest(manifest.c_str(), &problem);
  if (st != NEPKIT_OK)
  {
    return Report(st, "loading the problem");
  }

  if (!export_manifest.empty())
  {
    const std::string stem = manifest.empty() ? problem_name : "problem";
    st = nepkit_problem_export_manifest(problem, export_manifest.c_str(), stem.c_str());
    nepkit_problem_free(problem);
    return st == NEPKIT_OK ? EXIT_SUCCESS : Report(st, "exporting the manifest");
  }

  nepkit_config *config = nullptr;
  if ((st = nepkit_config_create(&config)) != NEPKIT_OK)
  {
    nepkit_problem_free(problem);
    return Report(st, "creating the configuration");
  }
  auto fail = [&](nepkit_status s, const char *what)
  {
    nepkit_config_free(config);
    nepkit_problem_free(problem);
    return Report(s, what);
  };

  if (!center.empty() || radius > 0.0 || half_disk)
  {
    double cre = 0.0;
    double cim = 0.0;
    if (center.empty() || !(radius > 0.0) || !ParseComplex(center, cre, cim))
    {
      std::fprintf(stderr, "nepkit: a region override needs --center RE,IM and --radius R\n");
      nepkit_config_free(config);
      nepkit_problem_free(problem);
      return kExitError;
    }
    if ((st = nepkit_config_set_region(config, cre, cim, radius, half_disk ? 1 : 0)) != NEPKIT_OK)
    {
      return fail(st, "setting the region");
    }
  }
  if (!shift.empty())
  {
    double sre = 0.0;
    double sim = 0.0;
    if (!ParseComplex(shift, sre, sim))
    {
      std::fprintf(stderr, "nepkit: --shift expects RE,IM\n");
      nepkit_config_free(config);
      nepkit_problem_free(problem);
      return kExitError;
    }
    nepkit_config_set_shift(config, sre, sim);
  }
  const int columns = subspace > 0 ? subspace : 2 * expected + 10;
  if ((st = nepkit_config_set_nodes(config, nodes)) != NEPKIT_OK ||
      (st = nepkit_config_set_tol(config, tol)) != NEPKIT_OK ||
      (st = nepkit_config_set_max_degree(config, max_degree)) != NEPKIT_OK ||
      (st = nepkit_config_set_solver(config, solver.c_str())) != NEPKIT_OK ||
      (st = nepkit_config_set_filter_order(config, filter_order)) != NEPKIT_OK ||
      (st = nepkit_config_set_subspace(config, columns)) != NEPKIT_OK ||
      (st = nepkit_config_set_filter_iters(config, filter_iters)) != NEPKIT_OK ||
      (st = nepkit_config_set_seed(config, seed)) != NEPKIT_OK)
  {
    return fail(st, "configuring the run");
  }
  if (!export_pencil.empty() &&
      (st = nepkit_config_set_pencil_export(config, export_pencil.c_str())) != NEPKIT_OK)
  {
    return fail(st, "configuring the pencil export");
  }

  nepkit_report *report = nullptr;
  if ((st = nepkit_run(problem, config, &report)) != NEPKIT_OK)
  {
    return fail(st, "the run");
  }
  nepkit_config_free(config);
  nepkit_problem_free(problem);

  int rc = EXIT_SUCCESS;
  if ((st = nepkit_report_write(report, out.c_str(), format.c_str())) != NEPKIT_OK)
  {
    rc = Report(st, "writing the report");
  }
  if (!lawson_trace.empty() &&
      (st = nepkit_report_write_lawson_trace(report, lawson_trace.c_str())) != NEPKIT_OK)
  {
    rc = Report(st, "writing the fit trace");
  }
  if (!filter_trace.empty() &&
      (st = nepkit_report_write_filter_trace(report, filter_trace.c_str())) != NEPKIT_OK)
  {
    rc = Report(st, "writing the filter trace");
  }

  int degree = 0;
  int pole_free = 0;
  int count = 0;
  int inside = 0;
  int success = 0;
  double sqrt_e = 0.0;
  double gap = 0.0;
  double bound = 0.0;
  nepkit_report_summary(report, &degree, &sqrt_e, &gap, &bound, &pole_free);
  nepkit_report_eigen_count(report, &count, &inside);
  nepkit_report_success(report, &success);
  std::fprintf(stderr,
               "nepkit: degree %d, sqrt(e) %.3e, gap %.2e, bound %.3e, %s, %d eigenvalues in "
               "region (%d total)\n",
               degree, sqrt_e, gap, bound, pole_free ? "pole-free" : "POLES IN REGION", inside,
               count);
  if (!success)
  {
    std::fprintf(stderr, "nepkit: tolerance not met or solver did not converge\n");
    if (rc == EXIT_SUCCESS)
    {
      rc = kExitIncomplete;
    }
  }
  nepkit_report_free(report);
  return rc;
}
