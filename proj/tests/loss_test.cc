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

#include "doctest.h"
#include "prefsort/errors.h"
#include "prefsort/loss.h"
#include "prefsort/oracle.h"
#include "prefsort/qsrank.h"

using namespace prefsort;

namespace {

const ElementSet kThree = ElementSet::range(3);  // u, v, w

Ranking order(std::vector<std::size_t> indices, const ElementSet& e = kThree) {
  return Ranking::from_indices(e, std::move(indices));
}

Tournament cycle3() {
  return Tournament(kThree, {{0, 1, 0}, {0, 0, 1}, {1, 0, 0}});
}

std::vector<Ranking> all_rankings(const ElementSet& e) {
  std::vector<std::size_t> idx(e.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::vector<Ranking> out;
  do {
    out.push_back(Ranking::from_indices(e, idx));
  } while (std::next_permutation(idx.begin(), idx.end()));
  return out;
}

std::vector<Partition> all_partitions(const ElementSet& e) {
  std::vector<Partition> out;
  for (unsigned mask = 0; mask < (1u << e.size()); ++mask) {
    std::vector<int> labels(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) labels[i] = (mask >> i) & 1u;
    out.emplace_back(e, labels);
  }
  return out;
}

// A ranking that sorts by label, with ties broken by descending index.
Ranking sorted_descending(const Partition& p) {
  std::vector<std::size_t> idx(p.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = idx.size() - 1 - i;
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return p.label(a) < p.label(b); });
  return Ranking::from_indices(p.elements(), idx);
}

}  // namespace

TEST_CASE("ranking loss examples") {
  auto w = WeightFunction::constant(3);
  Ranking star = order({0, 1, 2});
  CHECK(loss_ranking(star, star, w).value == 0);
  CHECK(loss_ranking(order({2, 1, 0}), star, w).value == 1);
  CHECK(loss_ranking(order({2, 0, 1}), star, w).value == make_rational(2, 3));
  RandomSource rng(5);
  for (int t = 0; t < 20; ++t) {
    auto tw = random_admissible_weight(3, rng);
    CHECK(loss_ranking(star, star, tw).value == 0);
  }
}

TEST_CASE("preference loss examples") {
  auto w = WeightFunction::constant(3);
  Ranking star = order({0, 1, 2});
  CHECK(loss_pref(Tournament::from_ranking(star), star, w).value == 0);
  CHECK(loss_pref(cycle3(), star, w).value == make_rational(1, 3));
  CHECK(loss_pref(Tournament::from_ranking(order({2, 1, 0})), star, w).value == 1);
  Tournament bad(kThree, {{0, 1, 1}, {1, 0, 1}, {0, 0, 0}});
  CHECK_THROWS_AS(loss_pref(bad, star, w), InvalidInput);
}

TEST_CASE("bipartite loss examples") {
  Partition tau(kThree, {0, 1, 1});
  SUBCASE("positives first") {
    for (auto spec : {NormalizerSpec{}, NormalizerSpec{Normalizer::kMixedPairs, 1}})
      CHECK(loss_bipartite(order({0, 2, 1}), tau, spec).value == 0);
  }
  SUBCASE("3-cycle under both normalizers") {
    CHECK(loss_bipartite(cycle3(), tau).value == make_rational(1, 3));
    auto mixed = loss_bipartite(cycle3(), tau, {Normalizer::kMixedPairs, 1});
    CHECK(mixed.value == make_rational(1, 2));
    CHECK(mixed.denominator == 2);
    CHECK(mixed.normalizer == Normalizer::kMixedPairs);
    CHECK(loss_bipartite(cycle3(), tau, {Normalizer::kCustom, Rational(4)}).value ==
          make_rational(1, 4));
  }
  SUBCASE("all labels equal") {
    Partition flat(kThree, {1, 1, 1});
    CHECK(loss_bipartite(cycle3(), flat).value == 0);
    CHECK_THROWS_AS(loss_bipartite(cycle3(), flat, {Normalizer::kMixedPairs, 1}),
                    DegenerateInput);
  }
}

TEST_CASE("small and mismatched inputs") {
  ElementSet one = ElementSet::range(1);
  auto r = Ranking::identity(one);
  CHECK(loss_ranking(r, r, WeightFunction::constant(1)).value == 0);
  CHECK(loss_ranking(r, r, WeightFunction::constant(1)).denominator == 0);
  auto empty = Ranking::identity(ElementSet{});
  CHECK(loss_ranking(empty, empty, WeightFunction::constant(0)).value == 0);
  CHECK_THROWS_AS(loss_ranking(order({0, 1, 2}), Ranking::identity(ElementSet::range(2)),
                               WeightFunction::constant(2)),
                  InvalidInput);
  CHECK_THROWS_AS(loss_ranking(order({0, 1, 2}), order({0, 1, 2}), WeightFunction::constant(4)),
                  InvalidInput);
}

TEST_CASE("bipartite loss equals the weighted loss with the bipartite weight") {
  for (std::size_t n = 1; n <= 5; ++n) {
    const ElementSet e = ElementSet::range(n);
    const auto partitions = all_partitions(e);
    const auto rankings = all_rankings(e);
    const std::size_t pairs = n * (n - 1) / 2;
    for (const Partition& tau : partitions) {
      const auto w = WeightFunction::bipartite(n, tau.positives());
      const Ranking s1 = tau.sorted_ranking();
      const Ranking s2 = sorted_descending(tau);
      for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << pairs); ++bits) {
        const Tournament h = tournament_from_bits(n, bits);
        const Rational lb = loss_bipartite(h, tau).value;
        CHECK(lb == loss_pref(h, s1, w).value);
        CHECK(lb == loss_pref(h, s2, w).value);
      }
      if (n <= 4)
        for (const Ranking& sigma : rankings) {
          const Rational lb = loss_bipartite(sigma, tau).value;
          CHECK(lb == loss_ranking(sigma, s1, w).value);
          CHECK(lb == loss_ranking(sigma, s2, w).value);
        }
    }
  }
}

TEST_CASE("bipartite loss and AUC sum to one after rescaling") {
  for (std::size_t n = 2; n <= 5; ++n) {
    const ElementSet e = ElementSet::range(n);
    for (const Partition& tau : all_partitions(e)) {
      if (tau.mixed_pairs() == 0) continue;
      const auto w = WeightFunction::bipartite(n, tau.positives());
      const Rational scale = choose2(n) / Rational(static_cast<long>(tau.mixed_pairs()));
      for (const Ranking& sigma : all_rankings(e)) {
        const Rational l = loss_ranking(sigma, tau.sorted_ranking(), w).value;
        CHECK(l * scale + auc(sigma, tau) == 1);
        const double lf = loss_ranking<double>(sigma, tau.sorted_ranking(), w).value;
        CHECK(std::abs(lf * scale.get_d() + auc(sigma, tau).get_d() - 1.0) <= 1e-12);
      }
    }
  }
  CHECK_THROWS_AS(auc(order({0, 1, 2}), Partition(kThree, {0, 0, 0})), DegenerateInput);
}

TEST_CASE("flipping a concordant adjacent pair never decreases the loss") {
  RandomSource rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(6);
    const ElementSet e = ElementSet::range(n);
    const Ranking star = random_ranking(e, rng);
    const Ranking sigma = random_ranking(e, rng);
    const auto w = random_admissible_weight(n, rng);
    const Rational base = loss_ranking(sigma, star, w).value;
    for (std::size_t p = 1; p < n; ++p) {
      const std::size_t a = sigma.at(p), b = sigma.at(p + 1);
      if (!star.before(a, b)) continue;
      std::vector<std::size_t> idx(sigma.order().begin(), sigma.order().end());
      std::swap(idx[p - 1], idx[p]);
      const Rational flipped = loss_ranking(Ranking::from_indices(e, idx), star, w).value;
      CHECK(flipped >= base);
      CHECK(flipped - base == w.exact(star.position(a), star.position(b)) / choose2(n));
    }
  }
}

TEST_CASE("loss of a distribution is the expectation of losses") {
  RandomSource rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(4);
    const ElementSet e = ElementSet::range(n);
    std::vector<Outcome> support;
    const std::size_t m = 1 + rng.uniform_index(4);
    for (std::size_t i = 0; i < m; ++i)
      support.push_back({e, PartitionTruth{random_partition(e, rng), {}},
                         make_rational(1, static_cast<long>(m))});
    GroundTruthDistribution d(e, support);
    const PairMarginal mu = mu_of(d);
    const Ranking sigma = random_ranking(e, rng);
    Rational expected;
    for (const Outcome& o : d.support())
      expected += o.probability * loss_against(sigma, o.truth);
    Rational via_mu;
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = 0; v < n; ++v)
        if (sigma.before(u, v)) via_mu += mu(v, u);
    CHECK(expected == via_mu / choose2(n));
  }
}

TEST_CASE("float and rational losses agree") {
  RandomSource rng(29);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(6);
    const ElementSet e = ElementSet::range(n);
    const Tournament h = random_tournament(n, rng);
    const Ranking star = random_ranking(e, rng);
    const auto w = random_admissible_weight(n, rng);
    CHECK(std::abs(loss_pref<double>(h, star, w).value - loss_pref(h, star, w).value.get_d()) <
          1e-12);
  }
}

TEST_CASE("score weights are non-negative combinations of bipartite weights") {
  RandomSource rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(6);
    const ElementSet e = ElementSet::range(n);
    std::vector<Rational> scores(n);
    Rational level(static_cast<long>(3 * n));
    for (auto& s : scores) s = (level -= make_rational(static_cast<long>(rng.uniform_index(4)), 2));
    const auto w = WeightFunction::score(scores);
    const Ranking star = random_ranking(e, rng);
    const Ranking sigma = random_ranking(e, rng);
    Rational combined;
    for (std::size_t k = 1; k < n; ++k) {
      const Rational c = scores[k - 1] - scores[k];
      CHECK(c >= 0);
      combined += c * loss_ranking(sigma, star, WeightFunction::bipartite(n, k)).value;
    }
    CHECK(loss_ranking(sigma, star, w).value == combined);
  }
}
