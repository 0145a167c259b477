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
#include <functional>
#include <map>

#include "doctest.h"
#include "prefsort/errors.h"
#include "prefsort/exact.h"
#include "prefsort/loss.h"
#include "prefsort/oracle.h"
#include "prefsort/qsrank.h"

using namespace prefsort;

namespace {

Tournament cycle3() {
  return Tournament(ElementSet::range(3), {{0, 1, 0}, {0, 0, 1}, {1, 0, 0}});
}

// Every pivot script, replayed through the engine: choices are advanced like
// an odometer whose digit ranges are the sub-array sizes seen on the way.
struct ScriptOracle {
  std::map<std::vector<std::size_t>, Rational> distribution;
  PairMatrix<Rational> direct;
  std::map<std::vector<std::size_t>, Rational> triple;  // sorted triple -> p

  explicit ScriptOracle(const Tournament& h) : direct(h.size()) {
    const std::size_t n = h.size();
    std::vector<std::size_t> choices, sizes;
    RankOptions opts;
    opts.trace = true;
    while (true) {
      std::size_t step = 0;
      sizes.clear();
      auto run = run_quicksort(
          n, n, false, [&](std::size_t a, std::size_t b) { return h.prefers(a, b); },
          [&](std::size_t size) {
            sizes.push_back(size);
            if (step == choices.size()) choices.push_back(0);
            return choices[step++];
          },
          opts);
      Rational p(1);
      for (std::size_t s : sizes) p /= static_cast<long>(s);
      distribution[run.order] += p;
      for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = u + 1; v < n; ++v) {
          if (decided(run.trace, {u, v})) direct(u, v) += p;
          for (std::size_t w = v + 1; w < n; ++w)
            if (decided(run.trace, {u, v, w})) triple[{u, v, w}] += p;
        }
      // Advance the odometer.
      while (!choices.empty() && choices.back() + 1 == sizes[choices.size() - 1]) {
        choices.pop_back();
      }
      if (choices.empty()) break;
      ++choices.back();
    }
  }

  // Some call holds every element of `group` and pivots on one of them.
  static bool decided(const std::vector<PivotRecord>& trace,
                      const std::vector<std::size_t>& group) {
    for (const auto& rec : trace) {
      bool all = true, pivot = false;
      for (std::size_t x : group) {
        all = all && std::find(rec.subarray.begin(), rec.subarray.end(), x) != rec.subarray.end();
        pivot = pivot || rec.pivot == x;
      }
      if (all && pivot) return true;
    }
    return false;
  }
};

int hv(const Tournament& h, std::size_t a, std::size_t b) { return h.h(a, b); }

// beta and gamma transcribed term by term.
Rational beta_ref(const Tournament& h, const PairFunction& x, std::size_t u, std::size_t v,
                  std::size_t w) {
  Rational s = hv(h, u, v) * hv(h, v, w) * x(w, u) + hv(h, w, v) * hv(h, v, u) * x(u, w) +
               hv(h, v, u) * hv(h, u, w) * x(w, v) + hv(h, w, u) * hv(h, u, v) * x(v, w) +
               hv(h, u, w) * hv(h, w, v) * x(v, u) + hv(h, v, w) * hv(h, w, u) * x(u, v);
  return s / 3;
}

Rational gamma_ref(const Tournament& h, const PairFunction& z, std::size_t u, std::size_t v,
                   std::size_t w) {
  auto zz = [&](std::size_t a, std::size_t b) { return a < b ? z(a, b) : z(b, a); };
  Rational s = (hv(h, u, v) * hv(h, v, w) + hv(h, w, v) * hv(h, v, u)) * zz(u, w) +
               (hv(h, v, u) * hv(h, u, w) + hv(h, w, u) * hv(h, u, v)) * zz(v, w) +
               (hv(h, u, w) * hv(h, w, v) + hv(h, v, w) * hv(h, w, u)) * zz(u, v);
  return s / 3;
}

PairFunction random_pair_function(std::size_t n, RandomSource& rng) {
  PairFunction f(n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (a != b) f(a, b) = make_rational(static_cast<long>(rng.uniform_index(11)) - 3,
                                          1 + static_cast<long>(rng.uniform_index(4)));
  return f;
}

std::size_t pair_count(std::size_t n) { return n * (n - 1) / 2; }

}  // namespace

TEST_CASE("output distribution examples") {
  SUBCASE("3-cycle") {
    auto d = enumerate_distribution(cycle3());
    REQUIRE(d.size() == 3);
    std::map<std::vector<ElementId>, Rational> m;
    for (const auto& wr : d) m[wr.ranking.ids_in_order()] = wr.probability;
    const Rational third = make_rational(1, 3);
    CHECK(m[{ElementId(2), ElementId(0), ElementId(1)}] == third);
    CHECK(m[{ElementId(0), ElementId(1), ElementId(2)}] == third);
    CHECK(m[{ElementId(1), ElementId(2), ElementId(0)}] == third);
  }
  SUBCASE("transitive input is a point mass") {
    RandomSource rng(3);
    for (std::size_t n = 1; n <= 7; ++n) {
      const Ranking r = random_ranking(ElementSet::range(n), rng);
      auto d = enumerate_distribution(Tournament::from_ranking(r));
      REQUIRE(d.size() == 1);
      CHECK(d[0].probability == 1);
      CHECK(d[0].ranking.ids_in_order() == r.ids_in_order());
    }
  }
  SUBCASE("two elements") {
    Tournament h(ElementSet::range(2), {{0, 0}, {1, 0}});
    auto d = enumerate_distribution(h);
    REQUIRE(d.size() == 1);
    CHECK(d[0].ranking.at(1) == 1);
  }
  SUBCASE("limit") {
    RandomSource rng(5);
    CHECK_THROWS_AS(enumerate_distribution(random_tournament(9, rng)), ResourceLimitExceeded);
    CHECK_THROWS_AS(pair_probs(random_tournament(5, rng), ExactLimits{4}),
                    ResourceLimitExceeded);
    CHECK_NOTHROW(enumerate_distribution(random_tournament(9, rng), ExactLimits{9}));
  }
}

TEST_CASE("pivot tree leaves sum to one") {
  RandomSource rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const Tournament h = random_tournament(2 + rng.uniform_index(6), rng);
    auto tree = build_pivot_tree(h);
    Rational total;
    for (const auto& leaf : tree->leaves()) total += leaf.second;
    CHECK(total == 1);
    for (const auto& b : tree->branches)
      CHECK(b.probability == make_rational(1, static_cast<long>(h.size())));
  }
}

TEST_CASE("distribution and pair statistics match the script oracle") {
  RandomSource rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(5);
    const Tournament h = random_tournament(n, rng);
    const ScriptOracle oracle(h);
    std::map<std::vector<std::size_t>, Rational> got;
    Rational total;
    for (const auto& wr : enumerate_distribution(h)) {
      got[std::vector<std::size_t>(wr.ranking.order().begin(), wr.ranking.order().end())] +=
          wr.probability;
      total += wr.probability;
    }
    CHECK(total == 1);
    CHECK(got == oracle.distribution);

    const PairStats s = pair_probs(h);
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = u + 1; v < n; ++v) {
        CHECK(s.p(u, v) == oracle.direct(u, v));
        CHECK(s.p(v, u) == oracle.direct(u, v));
        for (std::size_t w = v + 1; w < n; ++w) {
          auto it = oracle.triple.find({u, v, w});
          const Rational expect = it == oracle.triple.end() ? Rational(0) : it->second;
          CHECK(s.p(u, v, w) == expect);
          CHECK(s.p(w, u, v) == expect);
          CHECK(s.p(v, w, u) == expect);
        }
      }
  }
}

TEST_CASE("pair probability examples") {
  const PairStats s = pair_probs(cycle3());
  CHECK(s.p(0, 1) == make_rational(2, 3));
  CHECK(s.p(1, 2) == make_rational(2, 3));
  CHECK(s.p(0, 2) == make_rational(2, 3));
  CHECK(s.p(0, 1, 2) == 1);
  Tournament two(ElementSet::range(2), {{0, 1}, {0, 0}});
  CHECK(pair_probs(two).p(0, 1) == 1);
  const PairStats t = pair_probs(Tournament::from_ranking(Ranking::identity(ElementSet::range(3))));
  CHECK(t.p(0, 1, 2) == 1);
  CHECK(check_decided_once(ExactModel(cycle3())).ok());
}

TEST_CASE("each pair is decided exactly once") {
  RandomSource rng(13);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(6);
    const Tournament h = random_tournament(n, rng);
    const ExactModel model(h);
    auto report = check_decided_once(model);
    CHECK(report.ok());
    CHECK(report.checked == pair_count(n));
    const PairStats& s = model.stats();
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = u + 1; v < n; ++v) {
        Rational sum = s.p(u, v);
        for (std::size_t w = 0; w < n; ++w)
          if (w != u && w != v)
            sum += s.p(u, v, w) * (hv(h, u, w) * hv(h, w, v) + hv(h, v, w) * hv(h, w, u)) / 3;
        CHECK(sum == 1);
      }
  }
}

TEST_CASE("alpha beta gamma") {
  const Tournament h = cycle3();
  const PairFunction hi = indicator(h);
  for (std::size_t u = 0; u < 3; ++u)
    for (std::size_t v = u + 1; v < 3; ++v) CHECK(alpha(hi, hi, u, v) == 0);
  PairFunction ones(3, Rational(1));
  CHECK(gamma(h, ones, 0, 1, 2) == 1);
  const PairFunction d = delta(Ranking::identity(ElementSet::range(3)), WeightFunction::constant(3));
  CHECK(beta(h, d, 0, 1, 2) == make_rational(2, 3));

  RandomSource rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 3 + rng.uniform_index(4);
    const Tournament t = random_tournament(n, rng);
    const PairFunction x = random_pair_function(n, rng);
    const PairFunction y = random_pair_function(n, rng);
    const std::size_t u = rng.uniform_index(n);
    std::size_t v = rng.uniform_index(n - 1);
    if (v >= u) ++v;
    std::size_t w = 0;
    while (w == u || w == v) ++w;
    CHECK(alpha(x, y, u, v) == x(u, v) * y(v, u) + x(v, u) * y(u, v));
    CHECK(alpha_matrix(x, y)(u, v) == alpha(x, y, u, v));
    CHECK(beta(t, x, u, v, w) == beta_ref(t, x, u, v, w));
    CHECK(beta(t, x, u, v, w) == beta(t, x, v, w, u));
    PairFunction z(n);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b) z(a, b) = x(a, b);
    CHECK(gamma(t, z, u, v, w) == gamma_ref(t, z, u, v, w));
  }
}

TEST_CASE("delta") {
  const PairFunction d = delta(Ranking::identity(ElementSet::range(3)), WeightFunction::constant(3));
  CHECK(d(0, 1) == 1);
  CHECK(d(1, 0) == 0);
  const Partition tau(ElementSet::range(3), {0, 1, 1});
  const PairFunction dp = delta(tau);
  CHECK(dp(0, 1) == 1);
  CHECK(dp(1, 0) == 0);
  CHECK(dp(1, 2) == 0);

  // Delta(u,v) + Delta(v,u) = omega, and the triangle inequality, for every
  // sigma* and a family of admissible weights.
  RandomSource rng(19);
  for (std::size_t n = 2; n <= 5; ++n) {
    const ElementSet e = ElementSet::range(n);
    std::vector<WeightFunction> weights{WeightFunction::constant(n)};
    for (std::size_t k = 1; k <= n; ++k) {
      weights.push_back(WeightFunction::top_k(n, k));
      weights.push_back(WeightFunction::bipartite(n, k));
    }
    for (int i = 0; i < 5; ++i) weights.push_back(random_admissible_weight(n, rng));
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    do {
      const Ranking star = Ranking::from_indices(e, idx);
      for (const auto& w : weights) {
        const PairFunction dd = delta(star, w);
        for (std::size_t a = 0; a < n; ++a)
          for (std::size_t b = 0; b < n; ++b) {
            if (a == b) continue;
            CHECK(dd(a, b) + dd(b, a) == w.exact(star.position(a), star.position(b)));
            for (std::size_t c = 0; c < n; ++c)
              if (c != a && c != b) CHECK(dd(a, c) <= dd(a, b) + dd(b, c));
          }
      }
    } while (std::next_permutation(idx.begin(), idx.end()));
  }
}

TEST_CASE("expected loss examples") {
  const Ranking star = Ranking::identity(ElementSet::range(3));
  CHECK(expected_loss_exact(cycle3(), RankingTruth{star, WeightFunction::constant(3)}) ==
        make_rational(4, 9));
  const Partition tau(ElementSet::range(3), {0, 1, 1});
  CHECK(expected_loss_exact(cycle3(), PartitionTruth{tau, {}}) == make_rational(1, 3));
  CHECK(expected_loss_exact(cycle3(), PartitionTruth{tau, {Normalizer::kMixedPairs, 1}}) ==
        make_rational(1, 2));
  CHECK(expected_loss_exact(Tournament::from_ranking(star),
                            RankingTruth{star, WeightFunction::constant(3)}) == 0);
  const ExactModel model(cycle3());
  CHECK(model.order_probability(0, 1) == make_rational(2, 3));
  CHECK(model.order_probability(1, 0) == make_rational(1, 3));
  CHECK_THROWS_AS(expected_loss_exact(Tournament(ElementSet::range(1), {{0}}),
                                      RankingTruth{Ranking::identity(ElementSet::range(1)),
                                                   WeightFunction::constant(1)}),
                  InvalidInput);
}

TEST_CASE("decomposition identities") {
  const ExactModel cyc(cycle3());
  auto ones = check_pair_decomposition(cyc, PairFunction(3, Rational(1)));
  CHECK(ones.ok());
  CHECK(ones.lhs == 3);
  CHECK(ones.rhs == 3);
  auto zeros = check_pair_decomposition(cyc, PairFunction(3));
  CHECK(zeros.ok());
  CHECK(zeros.lhs == 0);

  RandomSource rng(23);
  for (int trial = 0; trial < 80; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(4);
    const Tournament h = random_tournament(n, rng);
    const Ranking star = random_ranking(h.elements(), rng);
    const PairFunction d = delta(star, random_admissible_weight(n, rng));
    const PairFunction z = random_pair_function(n, rng);
    auto report = decomposition_check(h, z, d);
    CHECK(report.ok());
    CHECK(report.checked == 2);
    CHECK(decomposition_check(h, z, random_pair_function(n, rng)).ok());
  }
}

TEST_CASE("QuickSort is a 2-approximation in expectation") {
  RandomSource rng(29);
  for (std::size_t n = 2; n <= 5; ++n)
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << pair_count(n)); ++bits) {
      const Tournament h = tournament_from_bits(n, bits);
      const ExactModel model(h);
      for (int s = 0; s < 3; ++s) {
        const Ranking star = random_ranking(h.elements(), rng);
        const auto w = s == 0 ? WeightFunction::constant(n) : random_admissible_weight(n, rng);
        const Rational e = model.expected_loss(RankingTruth{star, w});
        CHECK(e <= 2 * loss_pref(h, star, w).value);
      }
    }
}

TEST_CASE("bipartite expected loss equals the preference loss") {
  for (std::size_t n = 2; n <= 5; ++n) {
    const ElementSet e = ElementSet::range(n);
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << pair_count(n)); ++bits) {
      const Tournament h = tournament_from_bits(n, bits);
      const ExactModel model(h);
      for (unsigned mask = 0; mask < (1u << n); ++mask) {
        std::vector<int> labels(n);
        for (std::size_t i = 0; i < n; ++i) labels[i] = (mask >> i) & 1u;
        const Partition tau(e, labels);
        CHECK(model.expected_loss(PartitionTruth{tau, {}}) == loss_bipartite(h, tau).value);
      }
    }
  }
}

TEST_CASE("beta is at most twice gamma of alpha") {
  RandomSource rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 3 + rng.uniform_index(4);
    const Tournament h = random_tournament(n, rng);
    const PairFunction d =
        trial % 2 == 0 ? delta(random_ranking(h.elements(), rng), random_admissible_weight(n, rng))
                       : delta(random_partition(h.elements(), rng));
    auto report = check_beta_gamma(h, d);
    CHECK(report.ok());
    CHECK(report.checked == n * (n - 1) * (n - 2) / 6);
  }
}

TEST_CASE("survivor order does not change the output distribution") {
  // Uniform pivots are equivalent to a uniformly random priority order with
  // the highest-priority survivor as pivot. Under that view the survivor
  // order inside a call is irrelevant; replaying every priority order with
  // three different orders must reproduce the exact distribution.
  RandomSource rng(37);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(4);
    const Tournament h = random_tournament(n, rng);
    std::map<std::vector<std::size_t>, Rational> expected;
    for (const auto& wr : enumerate_distribution(h))
      expected[std::vector<std::size_t>(wr.ranking.order().begin(), wr.ranking.order().end())] +=
          wr.probability;

    for (int layout = 0; layout < 3; ++layout) {
      std::vector<std::size_t> priority(n);
      for (std::size_t i = 0; i < n; ++i) priority[i] = i;
      long orders = 0;
      std::map<std::vector<std::size_t>, long> tally;
      do {
        std::function<std::vector<std::size_t>(std::vector<std::size_t>)> sort =
            [&](std::vector<std::size_t> items) {
              if (items.size() <= 1) return items;
              if (layout == 1) std::reverse(items.begin(), items.end());
              if (layout == 2) std::rotate(items.begin(), items.begin() + 1, items.end());
              const std::size_t pivot = *std::min_element(
                  items.begin(), items.end(),
                  [&](std::size_t a, std::size_t b) { return priority[a] < priority[b]; });
              std::vector<std::size_t> left, right;
              for (std::size_t v : items)
                if (v != pivot) (h.prefers(v, pivot) ? left : right).push_back(v);
              auto out = sort(left);
              out.push_back(pivot);
              auto tail = sort(right);
              out.insert(out.end(), tail.begin(), tail.end());
              return out;
            };
        std::vector<std::size_t> all(n);
        for (std::size_t i = 0; i < n; ++i) all[i] = i;
        ++tally[sort(all)];
        ++orders;
      } while (std::next_permutation(priority.begin(), priority.end()));
      std::map<std::vector<std::size_t>, Rational> got;
      for (const auto& [order, c] : tally) got[order] = make_rational(c, orders);
      CHECK(got == expected);
    }
  }
}
