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

#include "prefsort/bench.h"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "prefsort/errors.h"
#include "prefsort/qsrank.h"

namespace prefsort {

std::string to_string(TournamentKind kind) {
  switch (kind) {
    case TournamentKind::kUniformRandom: return "uniform-random";
    case TournamentKind::kTransitive: return "transitive";
    case TournamentKind::kPlantedCycle: return "planted-cycle";
  }
  return "unknown";
}

TournamentKind parse_tournament_kind(std::string_view name) {
  if (name == "uniform-random") return TournamentKind::kUniformRandom;
  if (name == "transitive") return TournamentKind::kTransitive;
  if (name == "planted-cycle") return TournamentKind::kPlantedCycle;
  throw InvalidInput("unknown tournament kind '" + std::string(name) +
                     "' (expected uniform-random, transitive or planted-cycle)");
}

namespace {

constexpr std::uint64_t kPermutationStream = 0x7065726dULL;
constexpr std::uint64_t kReversalStream = 0x72657673ULL;

}  // namespace

ImplicitTournament::ImplicitTournament(TournamentKind kind, std::size_t n,
                                       std::uint64_t seed, double density)
    : kind_(kind), n_(n), seed_(seed) {
  if (n == 0) throw InvalidInput("tournament size must be at least 1");
  if (!(density >= 0.0 && density <= 1.0))
    throw InvalidInput("density must lie in [0, 1]");
  if (kind == TournamentKind::kUniformRandom) return;
  order_.resize(n);
  for (std::size_t i = 0; i < n; ++i) order_[i] = i;
  RandomSource rng(RandomSource::mix(seed, kPermutationStream));
  for (std::size_t i = n; i > 1; --i) std::swap(order_[i - 1], order_[rng.uniform_index(i)]);
  rank_.resize(n);
  for (std::size_t p = 0; p < n; ++p) rank_[order_[p]] = p;
  if (kind == TournamentKind::kPlantedCycle) {
    reverse_all_ = density >= 1.0;
    threshold_ = static_cast<std::uint64_t>(std::ldexp(density, 64));
  }
}

bool ImplicitTournament::coin(std::size_t lo, std::size_t hi) const {
  const std::uint64_t pair = static_cast<std::uint64_t>(lo) * n_ + hi;
  if (kind_ == TournamentKind::kUniformRandom)
    return RandomSource::mix(seed_, pair) & 1u;
  return reverse_all_ ||
         RandomSource::mix(seed_ ^ kReversalStream, pair) < threshold_;
}

bool ImplicitTournament::prefers(std::size_t i, std::size_t j) const {
  if (i == j) return false;
  const std::size_t lo = std::min(i, j), hi = std::max(i, j);
  switch (kind_) {
    case TournamentKind::kUniformRandom:
      return (i == lo) == coin(lo, hi);
    case TournamentKind::kTransitive:
      return rank_[i] < rank_[j];
    case TournamentKind::kPlantedCycle:
      return (rank_[i] < rank_[j]) != coin(lo, hi);
  }
  return false;
}

Tournament generate_tournament(TournamentKind kind, std::size_t n,
                               std::uint64_t seed, double density) {
  ImplicitTournament t(kind, n, seed, density);
  return Tournament::from_predicate(
      ElementSet::range(n),
      [&](std::size_t i, std::size_t j) { return t.prefers(i, j); });
}

std::vector<ScalingCell> scaling_grid(std::span<const std::size_t> ns,
                                      std::span<const std::size_t> ks) {
  std::vector<ScalingCell> cells;
  for (std::size_t n : ns) {
    if (ks.empty()) cells.push_back({n, std::nullopt});
    for (std::size_t k : ks)
      if (k <= n) cells.push_back({n, k});
  }
  return cells;
}

LinearFit least_squares(const std::vector<std::vector<double>>& design,
                        const std::vector<double>& y) {
  if (design.empty() || design.size() != y.size())
    throw InvalidInput("least squares needs one target per design row");
  const std::size_t p = design.front().size();
  // Normal equations [X'X | X'y], solved by Gaussian elimination with
  // partial pivoting.
  std::vector<std::vector<double>> a(p, std::vector<double>(p + 1, 0.0));
  for (std::size_t r = 0; r < design.size(); ++r)
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = 0; j < p; ++j) a[i][j] += design[r][i] * design[r][j];
      a[i][p] += design[r][i] * y[r];
    }
  for (std::size_t c = 0; c < p; ++c) {
    std::size_t pivot = c;
    for (std::size_t r = c + 1; r < p; ++r)
      if (std::abs(a[r][c]) > std::abs(a[pivot][c])) pivot = r;
    if (std::abs(a[pivot][c]) < 1e-12 * (1.0 + std::abs(a[c][c])))
      throw InvalidInput("least-squares system is singular");
    std::swap(a[c], a[pivot]);
    for (std::size_t r = 0; r < p; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (std::size_t j = c; j <= p; ++j) a[r][j] -= f * a[c][j];
    }
  }
  LinearFit fit;
  for (std::size_t i = 0; i < p; ++i) fit.coefficients.push_back(a[i][p] / a[i][i]);
  double squares = 0.0;
  for (std::size_t r = 0; r < design.size(); ++r) {
    double predicted = 0.0;
    for (std::size_t i = 0; i < p; ++i) predicted += fit.coefficients[i] * design[r][i];
    fit.residuals.push_back(y[r] - predicted);
    squares += fit.residuals.back() * fit.residuals.back();
  }
  fit.rms = std::sqrt(squares / static_cast<double>(design.size()));
  return fit;
}

namespace {

class ComparisonBudget {
 public:
  explicit ComparisonBudget(std::uint64_t cap) : cap_(cap) {}

  // Per-run cap for the next run; 0 means unlimited.
  std::uint64_t next_cap() const {
    if (cap_ == 0) return 0;
    const std::uint64_t used = used_.load();
    if (used >= cap_) throw exceeded();
    return cap_ - used;
  }
  void charge(std::uint64_t comparisons) { used_ += comparisons; }
  std::uint64_t used() const { return used_.load(); }
  ResourceLimitExceeded exceeded() const {
    return ResourceLimitExceeded("total comparison cap of " +
                                 std::to_string(cap_) + " exceeded");
  }

 private:
  std::uint64_t cap_;
  std::atomic<std::uint64_t> used_{0};
};

ScalingRow run_cell(const ScalingCell& cell, const ScalingOptions& options,
                    ComparisonBudget& budget) {
  const auto start = std::chrono::steady_clock::now();
  ScalingRow row;
  row.n = cell.n;
  row.k = cell.k;
  row.trials = options.trials;
  const std::size_t k = cell.k.value_or(cell.n);
  for (std::size_t t = 0; t < options.trials; ++t) {
    const std::uint64_t trial_seed =
        RandomSource::mix(RandomSource::mix(options.seed, cell.n), t);
    ImplicitTournament h(options.kind, cell.n, RandomSource::mix(trial_seed, 0),
                         options.density);
    RandomSource rng(RandomSource::mix(trial_seed, 1));
    RankOptions rank_options;
    rank_options.max_comparisons = budget.next_cap();
    QuickSortRun run;
    try {
      run = run_quicksort(
          cell.n, k, options.fallback,
          [&](std::size_t a, std::size_t b) { return h.prefers(a, b); },
          [&](std::size_t size) { return rng.uniform_index(size); },
          rank_options);
    } catch (const ResourceLimitExceeded&) {
      throw budget.exceeded();
    }
    budget.charge(run.comparisons);
    row.comparisons.push_back(run.comparisons);
    if (options.kind == TournamentKind::kTransitive) {
      auto perm = h.permutation();
      if (!std::equal(run.order.begin(), run.order.begin() + run.determined,
                      perm.begin()))
        ++row.order_mismatches;
    }
  }
  double sum = 0.0;
  for (auto c : row.comparisons) sum += static_cast<double>(c);
  row.mean = sum / static_cast<double>(row.trials);
  double squares = 0.0;
  for (auto c : row.comparisons)
    squares += (static_cast<double>(c) - row.mean) * (static_cast<double>(c) - row.mean);
  row.stddev = std::sqrt(squares / static_cast<double>(row.trials - 1));
  row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                    .count();
  return row;
}

std::optional<LinearFit> try_fit(const std::vector<std::vector<double>>& design,
                                 const std::vector<double>& y) {
  if (design.size() < design.front().size()) return std::nullopt;
  try {
    return least_squares(design, y);
  } catch (const InvalidInput&) {
    return std::nullopt;
  }
}

}  // namespace

ScalingReport run_scaling(const ScalingOptions& options) {
  if (options.trials < 3) throw InvalidInput("scaling runs need at least 3 trials");
  for (const ScalingCell& cell : options.cells) {
    if (cell.n == 0) throw InvalidInput("cell size must be at least 1");
    if (cell.k && (*cell.k < 1 || *cell.k > cell.n))
      throw InvalidInput("cell k=" + std::to_string(*cell.k) + " outside [1, " +
                         std::to_string(cell.n) + "]");
  }
  // Validate the kind parameters once, before any worker starts.
  if (!options.cells.empty())
    (void)ImplicitTournament(options.kind, 1, options.seed, options.density);

  ScalingReport report;
  report.rows.resize(options.cells.size());
  ComparisonBudget budget(options.max_comparisons);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < options.cells.size(); i = next++) {
      try {
        report.rows[i] = run_cell(options.cells[i], options, budget);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = options.cells.size();
      }
    }
  };
  const unsigned threads = std::max(1u, options.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  report.total_comparisons = budget.used();

  std::vector<std::vector<double>> full_x, topk_x;
  std::vector<double> full_y, topk_y;
  for (const ScalingRow& row : report.rows) {
    const double n = static_cast<double>(row.n);
    if (row.k) {
      const double k = static_cast<double>(*row.k);
      topk_x.push_back({n, k * std::log(k)});
      topk_y.push_back(row.mean);
    } else {
      full_x.push_back({n * std::log(n), 1.0});
      full_y.push_back(row.mean);
    }
  }
  if (!full_x.empty()) report.full_fit = try_fit(full_x, full_y);
  if (!topk_x.empty()) report.topk_fit = try_fit(topk_x, topk_y);
  return report;
}

}  // namespace prefsort
