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

#include "prefsort/oracle.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>

#include "prefsort/errors.h"
#include "prefsort/qsrank.h"

namespace prefsort {

namespace {

std::vector<std::uint64_t> key_of(const ElementSet& set) {
  std::vector<std::uint64_t> key;
  key.reserve(set.size());
  for (ElementId id : set.ids()) key.push_back(id.value);
  return key;
}

// Pair indicator of a ground truth: sigma*(u,v) or tau*(u,v).
bool truth_before(const GroundTruth& truth, std::size_t u, std::size_t v) {
  if (const auto* r = std::get_if<RankingTruth>(&truth))
    return r->sigma_star.before(u, v);
  return std::get<PartitionTruth>(truth).tau_star.before(u, v);
}

PairFunction truth_delta(const GroundTruth& truth) {
  if (const auto* r = std::get_if<RankingTruth>(&truth))
    return delta(r->sigma_star, r->weight);
  return delta(std::get<PartitionTruth>(truth).tau_star);
}

// Adds p * Delta / nu of every outcome to `cost`, indexed over `target`.
void accumulate_cost(const std::vector<const Outcome*>& outcomes,
                     const ElementSet& target, PairFunction& cost) {
  for (const Outcome* o : outcomes) {
    const Rational nu = truth_denominator(o->truth);
    if (nu == 0 || o->probability == 0) continue;
    const PairFunction d = truth_delta(o->truth);
    const Rational scale = o->probability / nu;
    const std::size_t m = o->elements.size();
    std::vector<std::size_t> map(m);
    for (std::size_t a = 0; a < m; ++a)
      map[a] = target.require_index(o->elements.id(a));
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b)
        if (a != b && d(a, b) != 0) cost(map[a], map[b]) += scale * d(a, b);
  }
}

// Outcomes grouped by their subset V, in ascending key order.
std::map<std::vector<std::uint64_t>, std::vector<const Outcome*>> by_subset(
    const GroundTruthDistribution& d) {
  std::map<std::vector<std::uint64_t>, std::vector<const Outcome*>> groups;
  for (const Outcome& o : d.support()) groups[key_of(o.elements)].push_back(&o);
  return groups;
}

Rational class_comparator(const PairFunction& cost) {
  Rational sum;
  for (std::size_t u = 0; u < cost.size(); ++u)
    for (std::size_t v = u + 1; v < cost.size(); ++v)
      sum += std::min(cost(u, v), cost(v, u));
  return sum;
}

void require_universe(const Tournament& h, const GroundTruthDistribution& d) {
  if (!(h.elements() == d.universe()))
    throw InvalidInput(
        "preference function and distribution use different element sets");
  h.require_consistent();
}

// E over D and the algorithm's randomness of L(A(V), truth).
Rational expected_rank_loss(const RankingProcedure& alg, const Tournament& h,
                            const GroundTruthDistribution& d) {
  std::map<std::vector<std::uint64_t>, RankingDistribution> cache;
  Rational sum;
  for (const Outcome& o : d.support()) {
    if (o.probability == 0) continue;
    auto key = key_of(o.elements);
    auto it = cache.find(key);
    if (it == cache.end())
      it = cache.emplace(std::move(key), alg(restrict(h, o.elements))).first;
    Rational inner;
    for (const auto& [sigma, q] : it->second) {
      if (!(sigma.elements() == o.elements))
        throw InvalidInput("ranking procedure returned a ranking of other elements");
      inner += q * loss_against<Rational>(sigma, o.truth);
    }
    sum += o.probability * inner;
  }
  return sum;
}

Rational expected_class_loss(const Tournament& h,
                             const GroundTruthDistribution& d) {
  Rational sum;
  for (const Outcome& o : d.support())
    if (o.probability != 0)
      sum += o.probability * loss_against<Rational>(restrict(h, o.elements), o.truth);
  return sum;
}

// Exhaustive scan over position vectors in lexicographic order, keeping the
// first strict minimum.
template <class T>
std::pair<std::vector<std::size_t>, T> scan_positions(
    std::size_t n, const std::vector<T>& cost, const std::vector<T>& weight,
    bool non_negative) {
  std::vector<std::size_t> pos(n);
  std::iota(pos.begin(), pos.end(), std::size_t{0});
  std::vector<std::size_t> best_pos = pos;
  T best{};
  bool have = false;
  do {
    T sum{};
    bool pruned = false;
    for (std::size_t a = 0; a < n && !pruned; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        if (pos[b] < pos[a]) sum += cost[a * n + b] * weight[pos[a] * n + pos[b]];
      }
      if (non_negative && have && sum >= best) pruned = true;
    }
    if (!pruned && (!have || sum < best)) {
      best = sum;
      best_pos = pos;
      have = true;
    }
  } while (std::next_permutation(pos.begin(), pos.end()));
  return {best_pos, best};
}

// Common denominator scaling of a rational vector to 64-bit integers.
bool scale_to_integers(const std::vector<Rational>& values,
                       std::vector<std::int64_t>& out, mpz_class& scale,
                       mpz_class& max_abs) {
  scale = 1;
  for (const Rational& v : values) mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(),
                                          v.get_den_mpz_t());
  out.resize(values.size());
  max_abs = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    mpz_class z = values[i].get_num() * (scale / values[i].get_den());
    if (!z.fits_slong_p()) return false;
    out[i] = z.get_si();
    if (abs(z) > max_abs) max_abs = abs(z);
  }
  return true;
}

}  // namespace

// --- optimal rankings ----------------------------------------------------------

OptimalRanking optimal_ranking(const ElementSet& elements,
                               const PairFunction& cost,
                               const std::optional<WeightFunction>& w,
                               const OracleLimits& limits) {
  const std::size_t n = elements.size();
  if (n > limits.max_n)
    throw ResourceLimitExceeded("brute-force optimum supports n <= " +
                                std::to_string(limits.max_n) + ", got n=" +
                                std::to_string(n));
  if (cost.size() != n)
    throw InvalidInput("cost matrix size does not match the element set");
  if (w && w->size() != n)
    throw InvalidInput("weight function size does not match the element set");

  std::vector<Rational> c(n * n), omega(n * n);
  bool non_negative = true;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      c[a * n + b] = cost(a, b);
      omega[a * n + b] = w ? w->exact(a + 1, b + 1) : Rational(1);
      if (c[a * n + b] < 0 || omega[a * n + b] < 0) non_negative = false;
    }

  std::vector<std::size_t> positions;
  Rational sum;
  std::vector<std::int64_t> ci, wi;
  mpz_class cs, ws, cmax, wmax;
  const bool fits = scale_to_integers(c, ci, cs, cmax) &&
                    scale_to_integers(omega, wi, ws, wmax) &&
                    cmax * wmax * static_cast<long>(n * n + 1) <
                        mpz_class(std::numeric_limits<std::int64_t>::max());
  if (fits) {
    auto [pos, best] = scan_positions<std::int64_t>(n, ci, wi, non_negative);
    positions = std::move(pos);
    sum = Rational(mpz_class(static_cast<long>(best)), cs * ws);
    sum.canonicalize();
  } else {
    auto [pos, best] = scan_positions<Rational>(n, c, omega, non_negative);
    positions = std::move(pos);
    sum = std::move(best);
  }
  for (std::size_t& p : positions) ++p;
  OptimalRanking out{Ranking::from_positions(elements, positions), sum, Rational(0)};
  if (n >= 2) out.loss = sum / choose2(n);
  return out;
}

OptimalRanking optimal_ranking(const Tournament& h, const WeightFunction& w,
                               const OracleLimits& limits) {
  h.require_consistent();
  return optimal_ranking(h.elements(), indicator(h), w, limits);
}

// --- pair marginals ------------------------------------------------------------

std::optional<std::string> marginal_violation(const PairFunction& mu) {
  const std::size_t n = mu.size();
  auto pair = [](std::size_t a, std::size_t b) {
    return "(" + std::to_string(a) + "," + std::to_string(b) + ")";
  };
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      if (mu(a, b) < 0) return "negative marginal at " + pair(a, b);
      if (a < b && mu(a, b) + mu(b, a) > 1)
        return "marginals at " + pair(a, b) + " sum to more than 1";
    }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c) {
        if (a == b || b == c || a == c) continue;
        if (mu(a, c) > mu(a, b) + mu(b, c))
          return "triangle inequality fails for " + pair(a, c) + " through " +
                 std::to_string(b);
        if (a < b && b < c &&
            mu(a, b) + mu(b, c) + mu(c, a) != mu(b, a) + mu(c, b) + mu(a, c))
          return "cyclic sums differ on triple (" + std::to_string(a) + "," +
                 std::to_string(b) + "," + std::to_string(c) + ")";
      }
  return std::nullopt;
}

PairMarginal::PairMarginal(ElementSet elements, PairFunction mu)
    : elements_(std::move(elements)), mu_(std::move(mu)) {
  if (mu_.size() != elements_.size())
    throw InvalidInput("marginal matrix size does not match the element set");
  if (auto v = marginal_violation(mu_)) throw InvalidInput("invalid marginal: " + *v);
}

Tournament optimal_pref(const PairMarginal& mu) {
  const ElementSet& e = mu.elements();
  return Tournament::from_predicate(e, [&](std::size_t a, std::size_t b) {
    if (mu(a, b) != mu(b, a)) return mu(a, b) > mu(b, a);
    return e.id(a) > e.id(b);
  });
}

// --- ground-truth distributions ---------------------------------------------------

GroundTruthDistribution::GroundTruthDistribution(ElementSet universe,
                                                 std::vector<Outcome> support)
    : universe_(std::move(universe)), support_(std::move(support)) {
  if (support_.empty()) throw InvalidInput("distribution has empty support");
  Rational total;
  for (std::size_t i = 0; i < support_.size(); ++i) {
    const Outcome& o = support_[i];
    const std::string where = "support entry " + std::to_string(i);
    if (o.probability < 0) throw InvalidInput(where + ": negative probability");
    if (!o.elements.is_subset_of(universe_))
      throw InvalidInput(where + ": subset contains foreign elements");
    if (!(truth_elements(o.truth) == o.elements))
      throw InvalidInput(where + ": ground truth is not defined on its subset");
    total += o.probability;
  }
  if (total != 1)
    throw InvalidInput("probabilities sum to " + to_string(total) + ", not 1");
}

GroundTruthDistribution GroundTruthDistribution::point_mass(ElementSet universe,
                                                            GroundTruth truth) {
  std::vector<Outcome> support;
  support.push_back({universe, std::move(truth), Rational(1)});
  return GroundTruthDistribution(std::move(universe), std::move(support));
}

bool GroundTruthDistribution::fixed_subset() const {
  return std::all_of(support_.begin(), support_.end(),
                     [&](const Outcome& o) { return o.elements == universe_; });
}

bool GroundTruthDistribution::bipartite() const {
  return std::all_of(support_.begin(), support_.end(), [](const Outcome& o) {
    return std::holds_alternative<PartitionTruth>(o.truth);
  });
}

PairMarginal mu_of(const GroundTruthDistribution& d) {
  if (!d.bipartite())
    throw InvalidInput("pair marginals need a bipartite distribution");
  if (!d.fixed_subset())
    throw InvalidInput("pair marginals need a fixed element subset");
  const std::size_t n = d.universe().size();
  PairFunction mu(n);
  for (const Outcome& o : d.support()) {
    const Partition& tau = std::get<PartitionTruth>(o.truth).tau_star;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        if (tau.before(a, b)) mu(a, b) += o.probability;
  }
  return PairMarginal(d.universe(), std::move(mu));
}

// --- pairwise IIA ---------------------------------------------------------------

IiaReport check_pairwise_iia(const GroundTruthDistribution& d) {
  struct Group {
    ElementSet elements;
    Rational mass;
    PairFunction weighted;  // sum of p * indicator over the universe
  };
  const ElementSet& universe = d.universe();
  const std::size_t n = universe.size();
  std::vector<Group> groups;
  for (const auto& [key, outcomes] : by_subset(d)) {
    Group g{outcomes.front()->elements, Rational(0), PairFunction(n)};
    for (const Outcome* o : outcomes) {
      g.mass += o->probability;
      const std::size_t m = o->elements.size();
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b)
          if (a != b && truth_before(o->truth, a, b))
            g.weighted(universe.require_index(o->elements.id(a)),
                       universe.require_index(o->elements.id(b))) += o->probability;
    }
    if (g.mass != 0) groups.push_back(std::move(g));
  }
  IiaReport report;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      const ElementId u = universe.id(a), v = universe.id(b);
      for (std::size_t i = 0; i < groups.size(); ++i) {
        const Group& g0 = groups[i];
        if (!g0.elements.contains(u) || !g0.elements.contains(v)) continue;
        for (std::size_t j = i + 1; j < groups.size(); ++j) {
          const Group& g1 = groups[j];
          if (!g1.elements.contains(u) || !g1.elements.contains(v)) continue;
          ++report.comparisons;
          Rational e0 = g0.weighted(a, b) / g0.mass;
          Rational e1 = g1.weighted(a, b) / g1.mass;
          if (e0 != e1) {
            report.ok = false;
            report.violations.push_back({u, v, g0.elements, g1.elements,
                                         std::move(e0), std::move(e1)});
          }
        }
      }
    }
  return report;
}

// --- regret ----------------------------------------------------------------------

RankingProcedure quicksort_procedure(const ExactLimits& limits) {
  return [limits](const Tournament& h) { return enumerate_distribution(h, limits); };
}

RankingProcedure deterministic_procedure(
    std::function<Ranking(const Tournament&)> algorithm) {
  return [algorithm = std::move(algorithm)](const Tournament& h) {
    return RankingDistribution{{algorithm(h), Rational(1)}};
  };
}

PairFunction expected_cost(const GroundTruthDistribution& d) {
  std::vector<const Outcome*> all;
  for (const Outcome& o : d.support()) all.push_back(&o);
  PairFunction cost(d.universe().size());
  accumulate_cost(all, d.universe(), cost);
  return cost;
}

RegretValue regret_rank(const RankingProcedure& alg, const Tournament& h,
                        const GroundTruthDistribution& d,
                        const OracleLimits& limits) {
  require_universe(h, d);
  RegretValue r;
  r.expected = expected_rank_loss(alg, h, d);
  r.comparator =
      optimal_ranking(d.universe(), expected_cost(d), std::nullopt, limits)
          .weighted_sum;
  r.regret = r.expected - r.comparator;
  return r;
}

RegretValue regret_class(const Tournament& h, const GroundTruthDistribution& d) {
  require_universe(h, d);
  RegretValue r;
  r.expected = expected_class_loss(h, d);
  r.comparator = class_comparator(expected_cost(d));
  r.regret = r.expected - r.comparator;
  return r;
}

RegretValue regret_rank_prime(const RankingProcedure& alg, const Tournament& h,
                              const GroundTruthDistribution& d,
                              const OracleLimits& limits) {
  require_universe(h, d);
  RegretValue r;
  r.expected = expected_rank_loss(alg, h, d);
  for (const auto& [key, outcomes] : by_subset(d)) {
    const ElementSet& subset = outcomes.front()->elements;
    PairFunction cost(subset.size());
    accumulate_cost(outcomes, subset, cost);
    r.comparator +=
        optimal_ranking(subset, cost, std::nullopt, limits).weighted_sum;
  }
  r.regret = r.expected - r.comparator;
  return r;
}

RegretValue regret_class_prime(const Tournament& h,
                               const GroundTruthDistribution& d) {
  require_universe(h, d);
  RegretValue r;
  r.expected = expected_class_loss(h, d);
  for (const auto& [key, outcomes] : by_subset(d)) {
    const ElementSet& subset = outcomes.front()->elements;
    PairFunction cost(subset.size());
    accumulate_cost(outcomes, subset, cost);
    r.comparator += class_comparator(cost);
  }
  r.regret = r.expected - r.comparator;
  return r;
}

// --- F <= 0 on the marginal polytope ---------------------------------------------

namespace {

template <class S>
using Mat3 = std::array<std::array<S, 3>, 3>;

template <class S>
Mat3<S> to_matrix(const MuTuple<S>& t) {
  Mat3<S> m{};
  m[0][1] = t[0];
  m[1][0] = t[1];
  m[0][2] = t[2];
  m[2][0] = t[3];
  m[2][1] = t[4];
  m[1][2] = t[5];
  return m;
}

template <class S>
MuTuple<S> to_tuple(const Mat3<S>& m) {
  return {m[0][1], m[1][0], m[0][2], m[2][0], m[2][1], m[1][2]};
}

template <class S>
Mat3<S> alpha3(const Mat3<S>& x, const Mat3<S>& mu) {
  Mat3<S> out{};
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b)
      if (a != b) out[a][b] = x[a][b] * mu[b][a] + x[b][a] * mu[a][b];
  return out;
}

template <class S>
S beta3(const Mat3<S>& h, const Mat3<S>& x) {
  constexpr std::size_t u = 0, v = 1, w = 2;
  S sum = h[u][v] * h[v][w] * x[w][u] + h[w][v] * h[v][u] * x[u][w];
  sum += h[v][u] * h[u][w] * x[w][v] + h[w][u] * h[u][v] * x[v][w];
  sum += h[u][w] * h[w][v] * x[v][u] + h[v][w] * h[w][u] * x[u][v];
  return sum / S(3);
}

template <class S>
S gamma3(const Mat3<S>& h, const Mat3<S>& z) {
  constexpr std::size_t u = 0, v = 1, w = 2;
  S sum = (h[u][v] * h[v][w] + h[w][v] * h[v][u]) * z[u][w];
  sum += (h[v][u] * h[u][w] + h[w][u] * h[u][v]) * z[v][w];
  sum += (h[u][w] * h[w][v] + h[v][w] * h[w][u]) * z[u][v];
  return sum / S(3);
}

template <class S>
std::optional<std::string> check_tuple(const MuTuple<S>& t, const S& tol) {
  const Mat3<S> m = to_matrix(t);
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b) {
      if (a == b) continue;
      if (m[a][b] < -tol) return std::string("negative coordinate");
      for (std::size_t c = 0; c < 3; ++c)
        if (c != a && c != b && m[a][c] > m[a][b] + m[b][c] + tol)
          return std::string("triangle inequality fails");
    }
  S forward = m[0][1] + m[1][2] + m[2][0];
  S backward = m[1][0] + m[2][1] + m[0][2];
  if (forward - backward > tol || backward - forward > tol)
    return std::string("cyclic sums differ");
  return std::nullopt;
}

MuTuple<Rational> tuple_of(std::initializer_list<int> halves) {
  MuTuple<Rational> t;
  std::size_t i = 0;
  for (int x : halves) t[i++] = make_rational(x, 2);
  return t;
}

const std::array<std::array<std::size_t, 3>, 6> kPermutations = {{
    {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};

template <class S>
void evaluate_all(const MuTuple<S>& mu, const std::vector<Tournament>& hs,
                  bool relabel_all, std::size_t& evaluations,
                  const std::function<void(const S&)>& sink) {
  const std::size_t perms = relabel_all ? kPermutations.size() : 1;
  for (std::size_t p = 0; p < perms; ++p) {
    const MuTuple<S> relabeled = relabel(mu, kPermutations[p]);
    for (const Tournament& h : hs) {
      ++evaluations;
      sink(evaluate_f(h, relabeled));
    }
  }
}

}  // namespace

template <class S>
S evaluate_f(const Tournament& h, const MuTuple<S>& tuple) {
  if (h.size() != 3) throw InvalidInput("F is defined on a triple");
  h.require_consistent();
  const Mat3<S> mu = to_matrix(tuple);
  Mat3<S> hm{}, ht{}, st{};
  const ElementSet& e = h.elements();
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b) {
      if (a == b) continue;
      hm[a][b] = S(h.h(a, b));
      bool tilde = mu[a][b] != mu[b][a] ? mu[a][b] > mu[b][a] : e.id(a) > e.id(b);
      ht[a][b] = S(tilde ? 1 : 0);
    }
  // sigma~: minimizes sum mu(a,b) [b ahead of a]; first minimum in
  // lexicographic position order.
  std::array<std::size_t, 3> pos = {0, 1, 2}, best_pos = pos;
  S best{};
  bool have = false;
  do {
    S sum{};
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = 0; b < 3; ++b)
        if (pos[b] < pos[a]) sum += mu[a][b];
    if (!have || sum < best) {
      best = sum;
      best_pos = pos;
      have = true;
    }
  } while (std::next_permutation(pos.begin(), pos.end()));
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b)
      st[a][b] = S(a != b && best_pos[a] < best_pos[b] ? 1 : 0);
  return beta3(hm, mu) - gamma3(hm, alpha3(st, mu)) -
         (gamma3(hm, alpha3(hm, mu)) - gamma3(hm, alpha3(ht, mu)));
}

template Rational evaluate_f<Rational>(const Tournament&, const MuTuple<Rational>&);
template double evaluate_f<double>(const Tournament&, const MuTuple<double>&);

template <class S>
MuTuple<S> relabel(const MuTuple<S>& mu, const std::array<std::size_t, 3>& perm) {
  const Mat3<S> m = to_matrix(mu);
  Mat3<S> out{};
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b)
      if (a != b) out[perm[a]][perm[b]] = m[a][b];
  return to_tuple(out);
}

template MuTuple<Rational> relabel<Rational>(const MuTuple<Rational>&,
                                             const std::array<std::size_t, 3>&);
template MuTuple<double> relabel<double>(const MuTuple<double>&,
                                         const std::array<std::size_t, 3>&);

std::vector<MuTuple<Rational>> polytope_vertices_a() {
  return {tuple_of({0, 0, 2, 0, 0, 2}), tuple_of({2, 0, 2, 0, 0, 0})};
}

std::vector<MuTuple<Rational>> polytope_vertices_b() {
  return {tuple_of({1, 1, 1, 1, 0, 0}), tuple_of({1, 1, 0, 0, 1, 1}),
          tuple_of({0, 0, 1, 1, 1, 1})};
}

std::optional<std::string> tuple_violation(const MuTuple<Rational>& mu) {
  return check_tuple(mu, Rational(0));
}

std::optional<std::string> tuple_violation(const MuTuple<double>& mu,
                                           double tolerance) {
  return check_tuple(mu, tolerance);
}

std::vector<Tournament> triple_tournaments() {
  std::vector<Tournament> out;
  const ElementSet e = ElementSet::range(3);
  for (unsigned mask = 0; mask < 8; ++mask) {
    // Bits for pairs (0,1), (0,2), (1,2): set means the lower index wins.
    out.push_back(Tournament::from_predicate(e, [mask](std::size_t a, std::size_t b) {
      const std::size_t lo = std::min(a, b), hi = std::max(a, b);
      const unsigned bit = lo == 0 ? (hi == 1 ? 0u : 1u) : 2u;
      const bool lower_wins = (mask >> bit) & 1u;
      return (a == lo) == lower_wins;
    }));
  }
  return out;
}

FReport f_negativity_sample(const FSampleOptions& options) {
  FReport report;
  const auto hs = triple_tournaments();
  std::vector<MuTuple<Rational>> vertices = polytope_vertices_a();
  for (auto& v : polytope_vertices_b()) vertices.push_back(v);

  bool have_exact = false;
  auto exact_sink = [&](const Rational& f) {
    if (!have_exact || f > report.max_exact) report.max_exact = f;
    have_exact = true;
    if (f > 0) ++report.exact_violations;
  };
  bool have_float = false;
  auto float_sink = [&](const double& f) {
    if (!have_float || f > report.max_float) report.max_float = f;
    have_float = true;
    if (f > options.tolerance) ++report.float_violations;
  };
  auto run_exact = [&](const MuTuple<Rational>& mu) {
    ++report.samples;
    if (tuple_violation(mu)) {
      ++report.invalid_samples;
      return;
    }
    evaluate_all<Rational>(mu, hs, options.relabel, report.evaluations,
                           exact_sink);
  };

  for (const auto& v : vertices) run_exact(v);

  RandomSource root(options.seed);
  RandomSource rational_rng = root.derive(1);
  for (std::size_t s = 0; s < options.rational_samples; ++s) {
    std::vector<long> weights(vertices.size());
    long total = 0;
    while (total == 0) {
      total = 0;
      for (long& w : weights) {
        w = static_cast<long>(rational_rng.uniform_index(11));
        total += w;
      }
    }
    MuTuple<Rational> mu{};
    for (std::size_t i = 0; i < vertices.size(); ++i)
      for (std::size_t c = 0; c < 6; ++c)
        mu[c] += vertices[i][c] * make_rational(weights[i], total);
    run_exact(mu);
  }

  RandomSource float_rng = root.derive(2);
  for (std::size_t s = 0; s < options.float_samples; ++s) {
    std::vector<double> weights(vertices.size());
    double total = 0;
    for (double& w : weights) {
      // Exponential draws give a uniform point on the simplex.
      w = -std::log1p(-float_rng.uniform_real());
      total += w;
    }
    MuTuple<double> mu{};
    for (std::size_t i = 0; i < vertices.size(); ++i)
      for (std::size_t c = 0; c < 6; ++c)
        mu[c] += vertices[i][c].get_d() * (weights[i] / total);
    ++report.samples;
    if (tuple_violation(mu, options.tolerance)) {
      ++report.invalid_samples;
      continue;
    }
    evaluate_all<double>(mu, hs, options.relabel, report.evaluations,
                         float_sink);
  }
  return report;
}

// --- instance generators --------------------------------------------------------

Tournament tournament_from_bits(std::size_t n, std::uint64_t bits) {
  std::vector<std::vector<int>> m(n, std::vector<int>(n, 0));
  std::size_t bit = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j, ++bit) {
      const bool i_wins = (bits >> bit) & 1u;
      m[i][j] = i_wins ? 1 : 0;
      m[j][i] = i_wins ? 0 : 1;
    }
  return Tournament(ElementSet::range(n), m);
}

Tournament random_tournament(std::size_t n, RandomSource& rng) {
  std::vector<std::vector<int>> m(n, std::vector<int>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool i_wins = rng.uniform_index(2) == 1;
      m[i][j] = i_wins ? 1 : 0;
      m[j][i] = i_wins ? 0 : 1;
    }
  return Tournament(ElementSet::range(n), m);
}

Ranking random_ranking(const ElementSet& elements, RandomSource& rng) {
  std::vector<std::size_t> order(elements.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[rng.uniform_index(i)]);
  return Ranking::from_indices(elements, std::move(order));
}

Partition random_partition(const ElementSet& elements, RandomSource& rng) {
  std::vector<int> labels(elements.size());
  for (int& label : labels) label = static_cast<int>(rng.uniform_index(2));
  return Partition(elements, std::move(labels));
}

WeightFunction random_admissible_weight(std::size_t n, RandomSource& rng) {
  auto coefficient = [&] { return Rational(static_cast<long>(rng.uniform_index(4))); };
  std::vector<std::vector<Rational>> table(n, std::vector<Rational>(n));
  auto add = [&](const Rational& c, auto&& omega) {
    if (c == 0) return;
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t j = 1; j <= n; ++j)
        if (i != j) table[i - 1][j - 1] += c * omega(i, j);
  };
  const WeightFunction constant = WeightFunction::constant(n);
  add(coefficient(), [&](std::size_t i, std::size_t j) -> Rational { return constant.exact(i, j); });
  if (n >= 1) {
    const WeightFunction top = WeightFunction::top_k(n, 1 + rng.uniform_index(n));
    add(coefficient(), [&](std::size_t i, std::size_t j) -> Rational { return top.exact(i, j); });
    const WeightFunction bip = WeightFunction::bipartite(n, 1 + rng.uniform_index(n));
    add(coefficient(), [&](std::size_t i, std::size_t j) -> Rational { return bip.exact(i, j); });
  }
  // Non-increasing scores.
  std::vector<Rational> scores(n);
  Rational level(static_cast<long>(4 * n));
  for (std::size_t i = 0; i < n; ++i) {
    level -= static_cast<long>(rng.uniform_index(4));
    scores[i] = level;
  }
  add(coefficient(), [&](std::size_t i, std::size_t j) -> Rational {
    return abs(scores[i - 1] - scores[j - 1]);
  });
  // g(d) with g(0) = 0, non-decreasing and concave: increments shrink.
  std::vector<Rational> g(n + 1);
  Rational step(static_cast<long>(n + rng.uniform_index(4)));
  for (std::size_t d = 1; d <= n; ++d) {
    g[d] = g[d - 1] + step;
    Rational shrink(static_cast<long>(rng.uniform_index(2)));
    if (step - shrink >= 0) step -= shrink;
  }
  add(coefficient(), [&](std::size_t i, std::size_t j) -> Rational {
    return g[i > j ? i - j : j - i];
  });
  return WeightFunction::table(std::move(table));
}

// --- deterministic lower bound ----------------------------------------------------

LowerBoundResult lower_bound_adversary(
    const std::function<Ranking(const Tournament&)>& algorithm) {
  const ElementSet e = ElementSet::range(3);
  Tournament h = Tournament::from_predicate(e, [](std::size_t a, std::size_t b) {
    return (a + 1) % 3 == b;  // u -> v -> w -> u
  });
  Ranking output = algorithm(h);
  if (!(output.elements() == e))
    throw InvalidInput("algorithm returned a ranking of other elements");

  // The element ranked last becomes the only positive.
  const std::size_t first = output.at(1), second = output.at(2),
                    last = output.at(3);
  std::vector<int> labels(3, 1);
  labels[last] = 0;
  Partition tau(e, labels);

  LowerBoundResult r{h, output, tau, 0, {}, {}, {}};
  if (h.prefers(first, second) && h.prefers(second, last)) {
    r.adversary_case = 1;
  } else if (h.prefers(second, first) && h.prefers(last, second)) {
    r.adversary_case = 2;
  }
  auto d = GroundTruthDistribution::point_mass(e, PartitionTruth{tau, {}});
  r.regret_rank = regret_rank(
      [&output](const Tournament&) {
        return RankingDistribution{{output, Rational(1)}};
      },
      h, d).regret;
  r.regret_class = regret_class(h, d).regret;
  if (r.regret_class != 0) r.ratio = r.regret_rank / r.regret_class;
  return r;
}

}  // namespace prefsort
