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

#include "prefsort/qsrank.h"

#include <cmath>
#include <thread>

namespace prefsort {

namespace {

RankResult to_result(const Tournament& h, QuickSortRun run, bool full) {
  const ElementSet& el = h.elements();
  RankResult result;
  result.comparisons = run.comparisons;
  result.prefix.reserve(run.determined);
  for (std::size_t p = 0; p < run.determined; ++p)
    result.prefix.push_back(el.id(run.order[p]));
  for (const auto& record : run.trace) {
    PivotTraceEntry entry{el.id(record.pivot), {}};
    entry.subarray.reserve(record.subarray.size());
    for (std::size_t index : record.subarray)
      entry.subarray.push_back(el.id(index));
    result.pivot_trace.push_back(std::move(entry));
  }
  if (full) result.ranking = Ranking::from_indices(el, std::move(run.order));
  return result;
}

}  // namespace

RankResult quicksort_rank(const Tournament& h, RandomSource& rng,
                          const RankOptions& options) {
  h.require_consistent();
  const std::size_t n = h.size();
  auto run = run_quicksort(
      n, n, false,
      [&](std::size_t a, std::size_t b) { return h.prefers(a, b); },
      [&](std::size_t size) { return rng.uniform_index(size); }, options);
  return to_result(h, std::move(run), true);
}

RankResult quicksort_topk(const Tournament& h, std::size_t k, RandomSource& rng,
                          bool fallback, const RankOptions& options) {
  h.require_consistent();
  const std::size_t n = h.size();
  if (k < 1 || k > n)
    throw InvalidInput("top-k requires 1 <= k <= n (k=" + std::to_string(k) +
                       ", n=" + std::to_string(n) + ")");
  auto run = run_quicksort(
      n, k, fallback,
      [&](std::size_t a, std::size_t b) { return h.prefers(a, b); },
      [&](std::size_t size) { return rng.uniform_index(size); }, options);
  return to_result(h, std::move(run), k == n);
}

LossEstimate estimate_expected_loss(const Tournament& h,
                                    const GroundTruth& truth,
                                    std::uint64_t trials, std::uint64_t seed,
                                    unsigned threads) {
  if (trials == 0) throw InvalidInput("estimate needs at least one trial");
  h.require_consistent();
  // Surface ground-truth mismatches before spawning workers.
  (void)loss_against<double>(h, truth);

  const RandomSource root(seed);
  const std::size_t n = h.size();
  std::vector<double> losses(trials);
  auto work = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t i = begin; i < end; ++i) {
      RandomSource rng = root.derive(i);
      auto run = run_quicksort(
          n, n, false,
          [&](std::size_t a, std::size_t b) { return h.prefers(a, b); },
          [&](std::size_t size) { return rng.uniform_index(size); });
      Ranking sigma = Ranking::from_indices(h.elements(), std::move(run.order));
      losses[i] = loss_against<double>(sigma, truth);
    }
  };
  const unsigned workers =
      static_cast<unsigned>(std::min<std::uint64_t>(std::max(1u, threads), trials));
  if (workers == 1) {
    work(0, trials);
  } else {
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (trials + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      std::uint64_t begin = w * chunk;
      std::uint64_t end = std::min<std::uint64_t>(trials, begin + chunk);
      if (begin < end) pool.emplace_back(work, begin, end);
    }
    for (auto& t : pool) t.join();
  }

  LossEstimate estimate;
  estimate.trials = trials;
  double sum = 0.0;
  for (double x : losses) sum += x;
  estimate.mean = sum / static_cast<double>(trials);
  if (trials > 1) {
    double ss = 0.0;
    for (double x : losses) ss += (x - estimate.mean) * (x - estimate.mean);
    double variance = ss / static_cast<double>(trials - 1);
    estimate.standard_error = std::sqrt(variance / static_cast<double>(trials));
  }
  return estimate;
}

}  // namespace prefsort
