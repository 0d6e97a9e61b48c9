// Copyright nepkit contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef NEPKIT_PROBLEMS_HPP
#define NEPKIT_PROBLEMS_HPP

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "nepkit/nep.hpp"
#include "nepkit/types.hpp"

namespace nepkit
{

// T(x) = [exp(i x^2) 1; 1 1], region disk(0, 3).
SplitFormNEP Example1();

// T(x) = -B0 + x I + exp(-x) A1 (2 x 2), region disk(-1, 6).
SplitFormNEP TimeDelay2();

// T(x) = (exp(x) - 1) B1 + x^2 B2 - b0 I, region disk(-30, 11.5).
SplitFormNEP Hadeler(int n = 200, double b0 = 100.0);

// Looks up "example1", "time_delay2" or "hadeler" (optionally "hadeler:N").
SplitFormNEP BuiltinProblem(const std::string &name);

std::vector<std::string> BuiltinNames();

// Boundary nodes: c + r exp(2 pi i l / m) for a disk; for an upper half-disk,
// round(m pi / (pi + 2)) nodes on the arc (both corners included) and the
// rest spread over the open diameter.
std::vector<cd> SampleBoundary(const Region &region, int m);

//
// Matrix Market I/O. The reader accepts coordinate and array layouts with
// real, complex, integer or pattern fields and general, symmetric, hermitian
// or skew-symmetric storage. Errors carry file and line.
//
SpMatrix ReadMatrixMarket(const std::filesystem::path &path);
SpMatrix ReadMatrixMarket(std::istream &in, const std::string &source = "<stream>");

// Coordinate, complex, general; values printed with 17 significant digits.
void WriteMatrixMarket(const std::filesystem::path &path, const SpMatrix &A);
void WriteMatrixMarket(std::ostream &out, const SpMatrix &A);

// Array, complex, general.
void WriteMatrixMarketDense(const std::filesystem::path &path, const CMatrix &A);

//
// JSON manifest:
//
//   { "name": "...",
//     "terms": [ {"kind": "monomial", "params": {"power": 2, "alpha": 1}}, ... ],
//     "matrices": [ {"path": "K.mtx"}, {"inline": [[1, 0], [0, [0, 1]]]}, ... ],
//     "region": {"center": [-30, 0], "radius": 11.5, "half_plane": false} }
//
// Complex numbers are written as a number or [re, im]. Relative matrix paths
// resolve against the manifest's directory.
//
SplitFormNEP LoadManifest(const std::filesystem::path &path);

// Writes <dir>/<stem>.json plus one Matrix Market file per term.
std::filesystem::path ExportManifest(const SplitFormNEP &nep, const std::filesystem::path &dir,
                                     const std::string &stem);

}  // namespace nepkit

#endif  // NEPKIT_PROBLEMS_HPP
