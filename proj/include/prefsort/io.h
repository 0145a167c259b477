/*
 * Copyright 2026 The prefsort Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef PREFSORT_IO_H_
#define PREFSORT_IO_H_

#include <cstddef>
#include <string>
#include <string_view>

#include "prefsort/core.h"
#include "prefsort/loss.h"
#include "prefsort/oracle.h"

namespace prefsort {

// Whole file as a string. Throws InvalidInput when it cannot be read.
std::string read_file(const std::string& path);

// Lower-case hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

// Tournament document, text or JSON (detected by a leading '{').
//
// Text:
//   n <count>
//   [elements <id> ...]          optional, defaults to 0..n-1
//   n rows of 0/1, space separated or written as one run of digits
// Blank lines and lines starting with '#' are ignored. M[i][j] = 1 means
// element i is preferred over element j.
//
// JSON: {"elements": [ids], "prefers": [[0/1, ...], ...]}.
//
// Diagonal entries must be 0 and the result must be pairwise consistent;
// violations throw ParseError (text) or InvalidInput naming the pair.
Tournament parse_tournament(std::string_view text);
std::string format_tournament(const Tournament& t);

// Ranking document: whitespace-separated ids best first, or JSON
// {"elements": [ids], "ranking": [ids]}. Without "elements" the element set
// is the set of listed ids.
Ranking parse_ranking(std::string_view text);

// Weight spec "constant", "top-k:K" or "bipartite:K" for domain size n.
WeightFunction parse_weight_spec(std::string_view spec, std::size_t n);

// Normalizer spec "binomial", "mixed-pairs" or a positive rational.
NormalizerSpec parse_normalizer(std::string_view spec);

// Ground-truth document (JSON):
//   {"elements": [...], "labels": [0/1, ...], "normalizer": "..."}
//   {"elements": [...], "ranking": [ids], "weight": {...}}
// Weight objects: {"kind": "constant" | "top-k" | "bipartite" | "score" |
// "table", "k": K, "scores": [...], "table": [[...]]}. Numeric entries may
// be JSON numbers or rational strings such as "1/3".
GroundTruth parse_truth(std::string_view text);

// Distribution document (JSON):
//   {"elements": [...], "support": [{"labels": [...] | "ranking": [...],
//    "weight": {...}, "elements": [subset], "prob": "p/q"}, ...]}
// Each entry's "elements" defaults to the full set.
GroundTruthDistribution parse_distribution(std::string_view text);

}  // namespace prefsort

#endif  // PREFSORT_IO_H_
