// Copyright nepkit contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "nepkit/nepkit.h"

#include <exception>
#include <fstream>
#include <iostream>
#include <new>
#include <string>
#include <vector>

#include "nepkit/problems.hpp"
#include "nepkit/run.hpp"

struct nepkit_problem
{
  nepkit::SplitFormNEP nep;
};

struct nepkit_config
{
  nepkit::RunConfig config;
};

struct nepkit_report
{
  nepkit::EigenReport report;
};

namespace
{

thread_local std::string last_error;

nepkit_status StatusOf(nepkit::ErrorKind kind)
{
  using nepkit::ErrorKind;
  switch (kind)
  {
    case ErrorKind::InvalidArgument:
      return NEPKIT_E_INVALID_ARGUMENT;
    case ErrorKind::Io:
      return NEPKIT_E_IO;
    case ErrorKind::Parse:
      return NEPKIT_E_PARSE;
    case ErrorKind::Breakdown:
      return NEPKIT_E_BREAKDOWN;
    case ErrorKind::RankDeficient:
      return NEPKIT_E_RANK_DEFICIENT;
    case ErrorKind::Singular:
      return NEPKIT_E_SINGULAR;
    case ErrorKind::PoleHit:
      return NEPKIT_E_POLE_HIT;
    case ErrorKind::Domain:
      return NEPKIT_E_DOMAIN;
    case ErrorKind::NotConverged:
      return NEPKIT_E_NOT_CONVERGED;
  }
  return NEPKIT_E_INTERNAL;
}

nepkit_status Invalid(const char *msg)
{
  last_error = msg;
  return NEPKIT_E_INVALID_ARGUMENT;
}

// Runs f, translating exceptions into status codes.
template <typename F>
nepkit_status Guard(F &&f)
{
  try
  {
    f();
    return NEPKIT_OK;
  }
  catch (const nepkit::Error &e)
  {
    last_error = e.what();
    return StatusOf(e.kind());
  }
  catch (const std::bad_alloc &)
  {
    last_error = "out of memory";
    return NEPKIT_E_INTERNAL;
  }
  catch (const std::exception &e)
  {
    last_error = e.what();
    return NEPKIT_E_INTERNAL;
  }
}

const std::vector<std::string> &Builtins()
{
  static const std::vector<std::string> names = nepkit::BuiltinNames();
  return names;
}

}  // namespace

extern "C"
{

  const char *nepkit_version(void) { return "1.0.0"; }

  const char *nepkit_status_name(nepkit_status status)
  {
    switch (status)
    {
      case NEPKIT_OK:
        return "ok";
      case NEPKIT_E_INVALID_ARGUMENT:
        return "invalid argument";
      case NEPKIT_E_IO:
        return "i/o error";
      case NEPKIT_E_PARSE:
        return "parse error";
      case NEPKIT_E_BREAKDOWN:
        return "breakdown";
      case NEPKIT_E_RANK_DEFICIENT:
        return "rank deficient";
      case NEPKIT_E_SINGULAR:
        return "singular";
      case NEPKIT_E_POLE_HIT:
        return "pole hit";
      case NEPKIT_E_DOMAIN:
        return "domain error";
      case NEPKIT_E_NOT_CONVERGED:
        return "not converged";
      case NEPKIT_E_INTERNAL:
        return "internal error";
    }
    return "unknown";
  }

  const char *nepkit_last_error(void) { return last_error.c_str(); }

  nepkit_status nepkit_problem_builtin(const char *name, nepkit_problem **out)
  {
    if (!name || !out)
    {
      return Invalid("nepkit_problem_builtin: null argument");
    }
    return Guard([&] { *out = new nepkit_problem{nepkit::BuiltinProblem(name)}; });
  }

  nepkit_status nepkit_problem_load_manifest(const char *path, nepkit_problem **out)
  {
    if (!path || !out)
    {
      return Invalid("nepkit_problem_load_manifest: null argument");
    }
    return Guard([&] { *out = new nepkit_problem{nepkit::LoadManifest(path)}; });
  }

  nepkit_status nepkit_problem_export_manifest(const nepkit_problem *problem, const char *dir,
                                               const char *stem)
  {
    if (!problem || !dir || !stem)
    {
      return Invalid("nepkit_problem_export_manifest: null argument");
    }
    return Guard([&] { nepkit::ExportManifest(problem->nep, dir, stem); });
  }

  nepkit_status nepkit_problem_info(const nepkit_problem *problem, int *dim, int *num_terms)
  {
    if (!problem)
    {
      return Invalid("nepkit_problem_info: null problem");
    }
    if (dim)
    {
      *dim = problem->nep.Dim();
    }
    if (num_terms)
    {
      *num_terms = problem->nep.NumTerms();
    }
    return NEPKIT_OK;
  }

  void nepkit_problem_free(nepkit_problem *problem) { delete problem; }

  int nepkit_builtin_count(void) { return static_cast<int>(Builtins().size()); }

  const char *nepkit_builtin_name(int i)
  {
    if (i < 0 || i >= nepkit_builtin_count())
    {
      return nullptr;
    }
    return Builtins()[i].c_str();
  }

  nepkit_status nepkit_config_create(nepkit_config **out)
  {
    if (!out)
    {
      return Invalid("nepkit_config_create: null argument");
    }
    return Guard([&] { *out = new nepkit_config{}; });
  }

  void nepkit_config_free(nepkit_config *config) { delete config; }

  nepkit_status nepkit_config_set_region(nepkit_config *config, double center_re,
                                         double center_im, double radius, int upper_half)
  {
    if (!config)
    {
      return Invalid("nepkit_config_set_region: null config");
    }
    if (!(radius > 0.0))
    {
      return Invalid("nepkit_config_set_region: radius must be positive");
    }
    config->config.region = nepkit::Region{{center_re, center_im}, radius, upper_half != 0};
    return NEPKIT_OK;
  }

  nepkit_status nepkit_config_set_nodes(nepkit_config *config, int nodes)
  {
    if (!config || nodes < 1)
    {
      return Invalid("nepkit_config_set_nodes: need a config and nodes >= 1");
    }
    config->config.nodes = nodes;
    return NEPKIT_OK;
  }

  nepkit_status nepkit_config_set_tol(nepkit_config *config, double tol)
  {
    if (!config || !(tol > 0.0))
    {
      return Invalid("nepkit_config_set_tol: need a config and tol > 0");
    }
    config->config.tol = tol;
    return NEPKIT_OK;
  }

  nepkit_status nepkit_config_set_max_degree(nepkit_config *config, int max_degree)
  {
    if (!config || max_degree < 1)
    {
      return Invalid("nepkit_config_set_max_degree: need a config and max_degree >= 1");
    }
    config->config.max_degree = max_degree;
    return NEPKIT_OK;
  }

  nepkit_status nepkit_config_set_solver(nepkit_config *config, const char *solver)
  {
    if (!config || !solver)
    {
      return Invalid("nepkit_config_set_solver: null argument");
    }
    return Guard([&] { config->config.solver = nepkit::ParseSolver(solver); });
  }

  nepkit_status nepkit_config_set_filter_order(nepkit_config *config, int order)
  {
    if (!config || order < 1)
    {
      return Invalid("nepkit_config_set_filter_order: need a config and order >= 1");
    }
    config->config.sif.order = order;
    return NEPKIT_OK;
  }

  nepkit_status nepkit_config_set_subspace(nepkit_config *config, int columns)
  {
    if (!config || columns < 1)
    {
      return Invalid("nepkit_config_set_subspace: need a config and columns >= 1");
    }
    config->config.sif.subspace = columns;
    return NEPKIT_OK;
  }

  nepkit_status nepkit_config_set_shift(nepkit_config *config, double re, double im)
  {
    if (!config)
    {
      return Invalid("nepkit_config_set_shift: null config");
    }
    config->config.sif.shift = nepkit::cd(re, im);
    return NEPKIT_OK;
  }

  nepkit_status nepkit_config_set_thresholds(nepkit_config *config, double tau_r, double tau_g)
  {
    if (!config || !(tau_r > 0.0 && tau_r < tau_g))
    {
      return Invalid("nepkit_config_set_thresholds: need a config and 0 < tau_r < tau_g");
    }
    config->config.sif.tau_r = tau_r;
    config->config.sif.tau_g = tau_g;
    return NEPKIT_OK;
  }

  nepkit_status nepkit_config_set_filter_iters(nepkit_config *config, int max_iters)
  {
    if (!config || max_iters < 1)
    {
      return Invalid("nepkit_config_set_filter_iters: need a config and max_iters >= 1");
    }
    config->config.sif.max_iters = max_iters;
    return NEPKIT_OK;
  }

  nepkit_status nepkit_config_set_seed(nepkit_config *config, uint64_t seed)
  {
    if (!config)
    {
      return Invalid("nepkit_config_set_seed: null config");
    }
    config->config.sif.seed = seed;
    return NEPKIT_OK;
  }

  nepkit_status nepkit_config_set_pencil_export(nepkit_config *config, const char *stem)
  {
    if (!config || !stem)
    {
      return Invalid("nepkit_config_set_pencil_export: null argument");
    }
    config->config.pencil_export = stem;
    return NEPKIT_OK;
  }

  nepkit_status nepkit_run(const nepkit_problem *problem, const nepkit_config *config,
                           nepkit_report **out)
  {
    if (!problem || !config || !out)
    {
      return Invalid("nepkit_run: null argument");
    }
    return Guard(
      [&]
      {
        nepkit::RunConfig cfg = config->config;
        cfg.problem = problem->nep.name;
        *out = new nepkit_report{nepkit::Run(problem->nep, cfg)};
      });
  }

  void nepkit_report_free(nepkit_report *report) { delete report; }

  nepkit_status nepkit_report_success(const nepkit_report *report, int *success)
  {
    if (!report || !success)
    {
      return Invalid("nepkit_report_success: null argument");
    }
    *success = report->report.Success() ? 1 : 0;
    return NEPKIT_OK;
  }

  nepkit_status nepkit_report_summary(const nepkit_report *report, int *degree, double *sqrt_e,
                                      double *gap, double *bound, int *pole_free)
  {
    if (!report)
    {
      return Invalid("nepkit_report_summary: null report");
    }
    const auto &r = report->report;
    if (degree)
    {
      *degree = r.approx.degree;
    }
    if (sqrt_e)
    {
      *sqrt_e = r.approx.sqrt_e;
    }
    if (gap)
    {
      *gap = r.approx.gap;
    }
    if (bound)
    {
      *bound = r.bound;
    }
    if (pole_free)
    {
      *pole_free = r.pole_free ? 1 : 0;
    }
    return NEPKIT_OK;
  }

  nepkit_status nepkit_report_eigen_count(const nepkit_report *report, int *count,
                                          int *in_region)
  {
    if (!report)
    {
      return Invalid("nepkit_report_eigen_count: null report");
    }
    if (count)
    {
      *count = static_cast<int>(report->report.eigen.size());
    }
    if (in_region)
    {
      *in_region = report->report.InRegionCount();
    }
    return NEPKIT_OK;
  }

  nepkit_status nepkit_report_eigenpair(const nepkit_report *report, int i, double *re,
                                        double *im, double *residual, double *normalized_residual,
                                        int *in_region)
  {
    if (!report)
    {
      return Invalid("nepkit_report_eigenpair: null report");
    }
    if (i < 0 || i >= static_cast<int>(report->report.eigen.size()))
    {
      return Invalid("nepkit_report_eigenpair: index out of range");
    }
    const auto &e = report->report.eigen[i];
    if (re)
    {
      *re = e.lambda.real();
    }
    if (im)
    {
      *im = e.lambda.imag();
    }
    if (residual)
    {
      *residual = e.residual;
    }
    if (normalized_residual)
    {
      *normalized_residual = e.normalized_residual;
    }
    if (in_region)
    {
      *in_region = e.in_region ? 1 : 0;
    }
    return NEPKIT_OK;
  }

  nepkit_status nepkit_report_write(const nepkit_report *report, const char *path,
                                    const char *format)
  {
    if (!report || !format)
    {
      return Invalid("nepkit_report_write: null argument");
    }
    return Guard(
      [&]
      {
        const nepkit::ReportFormat fmt = nepkit::ParseFormat(format);
        if (!path || std::string(path) == "-")
        {
          if (fmt == nepkit::ReportFormat::Json)
          {
            nepkit::WriteJson(std::cout, report->report);
          }
          else
          {
            nepkit::WriteCsv(std::cout, report->report);
          }
          std::cout.flush();
          return;
        }
        nepkit::Emit(report->report, fmt, path);
      });
  }

  nepkit_status nepkit_report_write_lawson_trace(const nepkit_report *report, const char *path)
  {
    if (!report || !path)
    {
      return Invalid("nepkit_report_write_lawson_trace: null argument");
    }
    return Guard(
      [&]
      {
        std::ofstream out(path);
        if (!out)
        {
          nepkit::Fail(nepkit::ErrorKind::Io, std::string("cannot open '") + path + "' for writing");
        }
        nepkit::WriteLawsonTrace(out, report->report.lawson_trace);
      });
  }

  nepkit_status nepkit_report_write_filter_trace(const nepkit_report *report, const char *path)
  {
    if (!report || !path)
    {
      return Invalid("nepkit_report_write_filter_trace: null argument");
    }
    return Guard(
      [&]
      {
        std::ofstream out(path);
        if (!out)
        {
          nepkit::Fail(nepkit::ErrorKind::Io, std::string("cannot open '") + path + "' for writing");
        }
        nepkit::WriteSIFTrace(out, report->report.sif_trace);
      });
  }
}
