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

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "doctest.h"
#include "prefsort/errors.h"
#include "prefsort/exact.h"
#include "prefsort/loss.h"
#include "prefsort/oracle.h"
#include "prefsort/qsrank.h"

using namespace prefsort;

namespace {

// Recursive QuickSort written directly from the placement rule. Pivots are
// drawn from `rng` in the same depth-first, left-first order as the engine.
struct Reference {
  const Tournament& h;
  RandomSource& rng;
  bool fallback = false;
  std::uint64_t comparisons = 0;

  std::vector<std::size_t> sort(const std::vector<std::size_t>& items, std::size_t k) {
    if (items.size() <= 1 || k == 0) return k == 0 ? std::vector<std::size_t>{} : items;
    if (fallback && 8 * k >= items.size()) k = items.size();
    const std::size_t pivot = items[rng.uniform_index(items.size())];
    std::vector<std::size_t> left, right;
    for (std::size_t v : items) {
      if (v == pivot) continue;
      ++comparisons;
      (h.prefers(v, pivot) ? left : right).push_back(v);
    }
    const std::size_t nl = left.size();
    std::vector<std::size_t> out = sort(left, std::min(k, nl));
    if (k > nl) {
      out.push_back(pivot);
      auto tail = sort(right, k > nl + 1 ? k - nl - 1 : 0);
      out.insert(out.end(), tail.begin(), tail.end());
    }
    return out;
  }
};

std::vector<std::size_t> indices(const std::vector<ElementId>& ids, const ElementSet& e) {
  std::vector<std::size_t> out;
  for (ElementId id : ids) out.push_back(e.require_index(id));
  return out;
}

Tournament cycle3() {
  return Tournament(ElementSet::range(3), {{0, 1, 0}, {0, 0, 1}, {1, 0, 0}});
}

}  // namespace

TEST_CASE("random source is reproducible") {
  RandomSource a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    differs = differs || x != c.next_u64();
  }
  CHECK(differs);
  CHECK(RandomSource(42).derive(3).next_u64() == RandomSource(42).derive(3).next_u64());
  CHECK(RandomSource(42).derive(3).next_u64() != RandomSource(42).derive(4).next_u64());
}

TEST_CASE("transitive tournaments are sorted exactly") {
  RandomSource gen(1);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + gen.uniform_index(40);
    const ElementSet e = ElementSet::range(n);
    const Ranking r = random_ranking(e, gen);
    RandomSource rng(trial);
    auto result = quicksort_rank(Tournament::from_ranking(r), rng);
    REQUIRE(result.ranking.has_value());
    CHECK(result.ranking->ids_in_order() == r.ids_in_order());
    CHECK(loss_ranking(*result.ranking, r, WeightFunction::constant(n)).value == 0);
    auto top = quicksort_topk(Tournament::from_ranking(r), 1, rng);
    REQUIRE(top.prefix.size() == 1);
    CHECK(top.prefix[0] == r.elements().id(r.at(1)));
  }
}

TEST_CASE("placement rule on the 3-cycle") {
  const Tournament h = cycle3();
  auto prefers = [&](std::size_t a, std::size_t b) { return h.prefers(a, b); };
  auto first_is_u = [](std::size_t) { return std::size_t{0}; };
  auto run = run_quicksort(3, 3, false, prefers, first_is_u);
  CHECK(run.order == std::vector<std::size_t>{2, 0, 1});
  CHECK(run.comparisons == 2);
  auto top = run_quicksort(3, 1, false, prefers, first_is_u);
  REQUIRE(top.determined == 1);
  CHECK(top.order[0] == 2);
}

TEST_CASE("singletons and bad arguments") {
  RandomSource rng(3);
  const Tournament one(ElementSet::range(1), {{0}});
  auto r = quicksort_rank(one, rng);
  CHECK(r.comparisons == 0);
  CHECK(r.prefix == std::vector<ElementId>{ElementId(0)});
  CHECK_THROWS_AS(quicksort_topk(cycle3(), 0, rng), InvalidInput);
  CHECK_THROWS_AS(quicksort_topk(cycle3(), 4, rng), InvalidInput);
  const Tournament bad(ElementSet::range(2), {{0, 1}, {1, 0}});
  CHECK_THROWS_AS(quicksort_rank(bad, rng), InvalidInput);
  RankOptions capped;
  capped.max_comparisons = 5;
  RandomSource gen(9);
  CHECK_THROWS_AS(quicksort_rank(random_tournament(20, gen), rng, capped),
                  ResourceLimitExceeded);
}

TEST_CASE("engine matches the recursive reference") {
  RandomSource gen(11);
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t n = 1 + gen.uniform_index(30);
    const Tournament h = random_tournament(n, gen);
    const std::uint64_t seed = gen.next_u64();
    const std::size_t k = 1 + gen.uniform_index(n);
    const bool fallback = trial % 2 == 1;

    RandomSource a(seed), b(seed);
    auto full = quicksort_rank(h, a);
    Reference ref{h, b};
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    CHECK(indices(full.prefix, h.elements()) == ref.sort(all, n));
    CHECK(full.comparisons == ref.comparisons);

    RandomSource c(seed), d(seed);
    auto top = quicksort_topk(h, k, c, fallback);
    Reference ref_top{h, d, fallback};
    auto expected = ref_top.sort(all, k);
    expected.resize(k);  // the fallback may sort past k
    CHECK(indices(top.prefix, h.elements()) == expected);
    CHECK(top.comparisons == ref_top.comparisons);
  }
}

TEST_CASE("output invariants") {
  RandomSource gen(13);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + gen.uniform_index(25);
    const Tournament h = random_tournament(n, gen);
    const std::uint64_t seed = gen.next_u64();
    RandomSource rng(seed);
    RankOptions opts;
    opts.trace = true;
    auto result = quicksort_rank(h, rng, opts);
    REQUIRE(result.ranking.has_value());
    const Ranking& sigma = *result.ranking;

    std::set<std::size_t> positions;
    for (std::size_t i = 0; i < n; ++i) positions.insert(sigma.position(i));
    CHECK(positions.size() == n);
    CHECK(*positions.begin() == 1);
    CHECK(*positions.rbegin() == n);

    // Comparison accounting.
    std::uint64_t expected = 0;
    for (const auto& rec : result.pivot_trace) expected += rec.subarray.size() - 1;
    CHECK(result.comparisons == expected);

    // Outermost pivot places every other element by h.
    if (n >= 2) {
      REQUIRE_FALSE(result.pivot_trace.empty());
      const auto& root = result.pivot_trace.front();
      CHECK(root.subarray.size() == n);
      const std::size_t u = h.elements().require_index(root.pivot);
      for (std::size_t v = 0; v < n; ++v)
        if (v != u) CHECK((sigma.position(v) < sigma.position(u)) == h.prefers(v, u));
    }

    // Same seed, same output.
    RandomSource again(seed);
    CHECK(quicksort_rank(h, again).prefix == result.prefix);

    // k = n matches full mode including the count.
    RandomSource kn(seed);
    auto same = quicksort_topk(h, n, kn);
    CHECK(same.prefix == result.prefix);
    CHECK(same.comparisons == result.comparisons);
  }
}

TEST_CASE("top-k prefix consistency") {
  RandomSource gen(17);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + gen.uniform_index(40);
    const Tournament h = random_tournament(n, gen);
    const std::uint64_t seed = gen.next_u64();
    RandomSource full_rng(seed);
    const auto full = quicksort_rank(h, full_rng);
    for (std::size_t k = 1; k <= n; ++k)
      for (bool fallback : {false, true}) {
        RandomSource rng(seed);
        auto top = quicksort_topk(h, k, rng, fallback);
        REQUIRE(top.prefix.size() == k);
        CHECK(std::equal(top.prefix.begin(), top.prefix.end(), full.prefix.begin()));
        CHECK(top.comparisons <= full.comparisons);
      }
  }
}

TEST_CASE("expected loss estimates") {
  SUBCASE("transitive input has zero loss") {
    RandomSource gen(19);
    const ElementSet e = ElementSet::range(6);
    const Ranking r = random_ranking(e, gen);
    auto est = estimate_expected_loss(Tournament::from_ranking(r),
                                      RankingTruth{r, WeightFunction::constant(6)}, 50, 1);
    CHECK(est.mean == 0.0);
    CHECK(est.standard_error == 0.0);
    CHECK_THROWS_AS(estimate_expected_loss(Tournament::from_ranking(r),
                                           RankingTruth{r, WeightFunction::constant(6)}, 0, 1),
                    InvalidInput);
  }
  SUBCASE("thread count does not change the estimate") {
    RandomSource gen(23);
    const Tournament h = random_tournament(7, gen);
    const GroundTruth truth = PartitionTruth{random_partition(h.elements(), gen), {}};
    auto one = estimate_expected_loss(h, truth, 500, 5, 1);
    auto four = estimate_expected_loss(h, truth, 500, 5, 4);
    CHECK(one.mean == four.mean);
    CHECK(one.standard_error == four.standard_error);
  }
  SUBCASE("within four standard errors of the exact expectation") {
    RandomSource gen(29);
    const Ranking star = Ranking::identity(ElementSet::range(3));
    auto cyc = estimate_expected_loss(cycle3(), RankingTruth{star, WeightFunction::constant(3)},
                                      10000, 2);
    CHECK(std::abs(cyc.mean - 4.0 / 9.0) <= 4 * cyc.standard_error);
    auto bip = estimate_expected_loss(
        cycle3(), PartitionTruth{Partition(ElementSet::range(3), {0, 1, 1}), {}}, 10000, 3);
    CHECK(std::abs(bip.mean - 1.0 / 3.0) <= 4 * bip.standard_error);
    for (int trial = 0; trial < 6; ++trial) {
      const std::size_t n = 3 + gen.uniform_index(4);
      const Tournament h = random_tournament(n, gen);
      const Ranking s = random_ranking(h.elements(), gen);
      const GroundTruth truth = RankingTruth{s, random_admissible_weight(n, gen)};
      const double exact = expected_loss_exact(h, truth).get_d();
      auto est = estimate_expected_loss(h, truth, 10000, 100 + trial, 2);
      // The slack covers summation error when every run has the same loss.
      CHECK(std::abs(est.mean - exact) <= 4 * est.standard_error + 1e-9);
    }
  }
}
