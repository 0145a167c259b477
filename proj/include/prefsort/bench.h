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

#ifndef PREFSORT_BENCH_H_
#define PREFSORT_BENCH_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "prefsort/core.h"

namespace prefsort {

enum class TournamentKind { kUniformRandom, kTransitive, kPlantedCycle };

std::string to_string(TournamentKind kind);
// "uniform-random", "transitive" or "planted-cycle".
TournamentKind parse_tournament_kind(std::string_view name);

// Tournament on 0..n-1 whose preferences are computed on demand from a seeded
// hash, so large n needs O(n) memory.
//   uniform-random: each pair oriented by a fair coin;
//   transitive:     induced by a random permutation;
//   planted-cycle:  transitive, with each pair reversed with probability
//                   `density`.
class ImplicitTournament {
 public:
  // Throws InvalidInput for n == 0 or density outside [0, 1].
  ImplicitTournament(TournamentKind kind, std::size_t n, std::uint64_t seed,
                     double density = 0.0);

  TournamentKind kind() const { return kind_; }
  std::size_t size() const { return n_; }
  bool prefers(std::size_t i, std::size_t j) const;
  // Generating permutation, best first (transitive and planted-cycle).
  std::span<const std::size_t> permutation() const { return order_; }

 private:
  bool coin(std::size_t lo, std::size_t hi) const;

  TournamentKind kind_;
  std::size_t n_;
  std::uint64_t seed_;
  std::uint64_t threshold_ = 0;  // reversal threshold on 64-bit hashes
  bool reverse_all_ = false;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> rank_;
};

// Dense copy of an implicit tournament.
Tournament generate_tournament(TournamentKind kind, std::size_t n,
                               std::uint64_t seed, double density = 0.0);

struct ScalingCell {
  std::size_t n = 0;
  std::optional<std::size_t> k;  // none: full sort
};

// Every n with every k (k <= n); full sorts when `ks` is empty.
std::vector<ScalingCell> scaling_grid(std::span<const std::size_t> ns,
                                      std::span<const std::size_t> ks);

struct ScalingOptions {
  std::vector<ScalingCell> cells;
  std::size_t trials = 30;
  std::uint64_t seed = 1;
  TournamentKind kind = TournamentKind::kUniformRandom;
  double density = 0.0;
  bool fallback = false;
  std::uint64_t max_comparisons = 0;  // total over all runs; 0 = unlimited
  unsigned threads = 1;
};

struct ScalingRow {
  std::size_t n = 0;
  std::optional<std::size_t> k;
  std::size_t trials = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double seconds = 0.0;
  std::vector<std::uint64_t> comparisons;  // per trial
  // Transitive kind only: runs whose output differs from the generating
  // permutation.
  std::size_t order_mismatches = 0;
};

// Least-squares fit y ~ sum_i coefficients[i] * basis_i.
struct LinearFit {
  std::vector<double> coefficients;
  std::vector<double> residuals;  // one per fitted row
  double rms = 0.0;
};

// Least squares on the given design rows; throws InvalidInput when the
// system is singular.
LinearFit least_squares(const std::vector<std::vector<double>>& design,
                        const std::vector<double>& y);

struct ScalingReport {
  std::vector<ScalingRow> rows;
  std::optional<LinearFit> full_fit;  // a * n ln n + b over full-sort rows
  std::optional<LinearFit> topk_fit;  // c1 * n + c2 * k ln k over top-k rows
  std::uint64_t total_comparisons = 0;
};

// Trial t of a cell with size n draws its tournament and pivots from
// (seed, n, t) only, so cells that differ only in k share random numbers.
// Throws InvalidInput for fewer than 3 trials or k outside [1, n], and
// ResourceLimitExceeded when the comparison cap is reached.
ScalingReport run_scaling(const ScalingOptions& options);

}  // namespace prefsort

#endif  // PREFSORT_BENCH_H_
