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

#ifndef PREFSORT_QSRANK_H_
#define PREFSORT_QSRANK_H_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "prefsort/core.h"
#include "prefsort/errors.h"
#include "prefsort/loss.h"

namespace prefsort {

// Seeded pseudo-random stream used for pivot selection. Copies continue the
// same stream independently; derive() produces statistically independent
// child streams from the seed alone (not from the draws made so far).
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }
  // Uniform in [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n) {
    std::uniform_int_distribution<std::size_t> dist(0, n - 1);
    return dist(engine_);
  }
  double uniform_real() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
  }
  std::uint64_t next_u64() { return engine_(); }
  RandomSource derive(std::uint64_t stream) const {
    return RandomSource(mix(seed_, stream));
  }

  // Stateless 64-bit mixing of two words (splitmix64 finalizer).
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

struct RankOptions {
  bool trace = false;
  // 0 means unlimited. Exceeding it throws ResourceLimitExceeded.
  std::uint64_t max_comparisons = 0;
};

// One recursive call: the pivot and the sub-array it partitioned, in the
// order the sub-array was held when the pivot was drawn.
struct PivotRecord {
  std::size_t pivot;
  std::vector<std::size_t> subarray;
};

// Index-level result of the QuickSort engine. The first `determined`
// entries of `order` are final; the remainder is only meaningful in full
// mode (determined == n).
struct QuickSortRun {
  std::vector<std::size_t> order;
  std::size_t determined = 0;
  std::uint64_t comparisons = 0;
  std::vector<PivotRecord> trace;
};

// QuickSort with preference pivoting on local indices 0..n-1.
//
// `prefers(a, b)` evaluates h(a, b). `choose_pivot(size)` returns an offset
// in [0, size) into the current sub-array. A non-pivot v goes left of the
// pivot u iff h(v, u) = 1; partitioning is stable. Sub-arrays are processed
// depth first, left before right, from an explicit stack.
//
// With k < n only the first k positions are produced: the left side recurses
// with min(k, n_L) and the right side with max(0, k - n_L - 1). With
// `fallback`, any call whose budget satisfies 8k >= size sorts fully.
template <class Pref, class Chooser>
QuickSortRun run_quicksort(std::size_t n, std::size_t k, bool fallback,
                           Pref&& prefers, Chooser&& choose_pivot,
                           const RankOptions& options = {}) {
  struct Frame {
    std::size_t lo, hi, k;
  };
  QuickSortRun run;
  run.order.resize(n);
  std::iota(run.order.begin(), run.order.end(), std::size_t{0});
  run.determined = std::min(k, n);
  std::vector<std::size_t> right;
  std::vector<Frame> stack;
  stack.push_back({0, n, std::min(k, n)});
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    const std::size_t size = f.hi - f.lo;
    if (size <= 1 || f.k == 0) continue;
    if (fallback && 8 * f.k >= size) f.k = size;
    if (options.max_comparisons != 0 &&
        run.comparisons + (size - 1) > options.max_comparisons)
      throw ResourceLimitExceeded("comparison cap of " +
                                  std::to_string(options.max_comparisons) +
                                  " exceeded");
    const std::size_t offset = choose_pivot(size);
    const std::size_t pivot = run.order[f.lo + offset];
    if (options.trace)
      run.trace.push_back(
          {pivot, std::vector<std::size_t>(run.order.begin() + f.lo,
                                           run.order.begin() + f.hi)});
    right.clear();
    std::size_t left = 0;
    for (std::size_t t = f.lo; t < f.hi; ++t) {
      const std::size_t v = run.order[t];
      if (t == f.lo + offset) continue;
      ++run.comparisons;
      if (prefers(v, pivot)) {
        run.order[f.lo + left++] = v;
      } else {
        right.push_back(v);
      }
    }
    run.order[f.lo + left] = pivot;
    std::copy(right.begin(), right.end(), run.order.begin() + f.lo + left + 1);
    const std::size_t k_left = std::min(f.k, left);
    const std::size_t k_right = f.k > left + 1 ? f.k - left - 1 : 0;
    stack.push_back({f.lo + left + 1, f.hi, k_right});
    stack.push_back({f.lo, f.lo + left, k_left});
  }
  return run;
}

struct PivotTraceEntry {
  ElementId pivot;
  std::vector<ElementId> subarray;
};

struct RankResult {
  std::optional<Ranking> ranking;  // full mode only
  std::vector<ElementId> prefix;   // full order, or the top k
  std::uint64_t comparisons = 0;
  std::vector<PivotTraceEntry> pivot_trace;
};

// Throws InvalidInput for an inconsistent tournament.
RankResult quicksort_rank(const Tournament& h, RandomSource& rng,
                          const RankOptions& options = {});

// Throws InvalidInput unless 1 <= k <= n.
RankResult quicksort_topk(const Tournament& h, std::size_t k, RandomSource& rng,
                          bool fallback = false,
                          const RankOptions& options = {});

struct LossEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::uint64_t trials = 0;
};

// Monte Carlo estimate of E_s[L(QuickSort_s(h), truth)]. Trial i uses the
// stream RandomSource(seed).derive(i), so the result does not depend on
// `threads`. Throws InvalidInput for zero trials.
LossEstimate estimate_expected_loss(const Tournament& h,
                                    const GroundTruth& truth,
                                    std::uint64_t trials, std::uint64_t seed,
                                    unsigned threads = 1);

}  // namespace prefsort

#endif  // PREFSORT_QSRANK_H_
