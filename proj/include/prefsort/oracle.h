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

#ifndef PREFSORT_ORACLE_H_
#define PREFSORT_ORACLE_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "prefsort/core.h"
#include "prefsort/exact.h"
#include "prefsort/loss.h"
#include "prefsort/qsrank.h"
#include "prefsort/rational.h"

namespace prefsort {

struct OracleLimits {
  std::size_t max_n = 10;  // brute force over n! rankings
};

// --- optimal rankings ----------------------------------------------------------

struct OptimalRanking {
  Ranking ranking;
  Rational weighted_sum;  // sum_{a != b} cost(a,b) sigma(b,a) omega(...)
  Rational loss;          // weighted_sum / (n choose 2); 0 when n < 2
};

// Minimizes sum_{a != b} cost(a,b) [b ranked ahead of a] omega(pos(a), pos(b))
// over all rankings of `elements`; `cost(a,b)` is the charge for placing b
// ahead of a. Without a weight, omega = 1. Ties go to the lexicographically
// smallest position vector (positions listed in canonical element order).
// Throws ResourceLimitExceeded when n > limits.max_n.
OptimalRanking optimal_ranking(const ElementSet& elements,
                               const PairFunction& cost,
                               const std::optional<WeightFunction>& w,
                               const OracleLimits& limits = {});

// sigma_optimal = argmin_sigma L_omega(h, sigma).
OptimalRanking optimal_ranking(const Tournament& h, const WeightFunction& w,
                               const OracleLimits& limits = {});

// --- pair marginals ------------------------------------------------------------

// mu(u,v) = E[tau*(u,v)] on a fixed element set.
class PairMarginal {
 public:
  PairMarginal() = default;
  // Throws InvalidInput unless `mu` lies in the marginal polytope.
  PairMarginal(ElementSet elements, PairFunction mu);

  const ElementSet& elements() const { return elements_; }
  std::size_t size() const { return elements_.size(); }
  const Rational& operator()(std::size_t u, std::size_t v) const {
    return mu_(u, v);
  }
  const PairFunction& matrix() const { return mu_; }

 private:
  ElementSet elements_;
  PairFunction mu_;
};

// Empty when `mu` satisfies non-negativity, mu(u,v) + mu(v,u) <= 1, the
// triangle inequality and the cyclic-sum equality on every triple; otherwise
// the first violated constraint.
std::optional<std::string> marginal_violation(const PairFunction& mu);

// h~(u,v) = 1 iff mu(u,v) > mu(v,u); ties go to the larger canonical id.
Tournament optimal_pref(const PairMarginal& mu);

// --- ground-truth distributions ---------------------------------------------------

struct Outcome {
  ElementSet elements;  // the ranked subset V
  GroundTruth truth;    // defined on `elements`
  Rational probability;
};

class GroundTruthDistribution {
 public:
  GroundTruthDistribution() = default;
  // Throws InvalidInput when probabilities are negative or do not sum to 1,
  // or an outcome is not a subset of `universe`.
  GroundTruthDistribution(ElementSet universe, std::vector<Outcome> support);

  // Point mass on a single ground truth over `universe`.
  static GroundTruthDistribution point_mass(ElementSet universe,
                                            GroundTruth truth);

  const ElementSet& universe() const { return universe_; }
  const std::vector<Outcome>& support() const { return support_; }
  bool fixed_subset() const;  // every outcome ranks the whole universe
  bool bipartite() const;     // every outcome is a partition

 private:
  ElementSet universe_;
  std::vector<Outcome> support_;
};

// Requires a fixed-subset bipartite distribution; throws InvalidInput
// otherwise.
PairMarginal mu_of(const GroundTruthDistribution& d);

// --- pairwise IIA ---------------------------------------------------------------

struct IiaViolation {
  ElementId u;
  ElementId v;
  ElementSet first;   // conditioning subsets V0, V1
  ElementSet second;
  Rational first_value;  // E[tau*(u,v) | V = V0]
  Rational second_value;
};

struct IiaReport {
  bool ok = true;
  std::size_t comparisons = 0;
  std::vector<IiaViolation> violations;
};

IiaReport check_pairwise_iia(const GroundTruthDistribution& d);

// --- regret ----------------------------------------------------------------------

// Output distribution of a ranking procedure on the restriction of h to V.
// Deterministic procedures return a single ranking with probability 1.
using RankingProcedure = std::function<RankingDistribution(const Tournament&)>;

RankingProcedure quicksort_procedure(const ExactLimits& limits = {});
RankingProcedure deterministic_procedure(
    std::function<Ranking(const Tournament&)> algorithm);

// M(a,b) = sum over outcomes containing a, b of p * Delta(a,b) / normalizer:
// the expected loss of any ranking sigma is sum_{a,b} sigma(b,a) M(a,b).
PairFunction expected_cost(const GroundTruthDistribution& d);

struct RegretValue {
  Rational expected;    // E[L] of the algorithm or preference function
  Rational comparator;  // loss of the best static comparator
  Rational regret;      // expected - comparator
};

// h is defined on the universe of D. Comparators are rankings of U (rank)
// and preference functions on U (class).
RegretValue regret_rank(const RankingProcedure& alg, const Tournament& h,
                        const GroundTruthDistribution& d,
                        const OracleLimits& limits = {});
RegretValue regret_class(const Tournament& h, const GroundTruthDistribution& d);
// The same with the minimum taken per subset V, inside the expectation.
RegretValue regret_rank_prime(const RankingProcedure& alg, const Tournament& h,
                              const GroundTruthDistribution& d,
                              const OracleLimits& limits = {});
RegretValue regret_class_prime(const Tournament& h,
                               const GroundTruthDistribution& d);

// --- F <= 0 on the marginal polytope ---------------------------------------------

// (mu(u,v), mu(v,u), mu(u,w), mu(w,u), mu(w,v), mu(v,w)) for u, v, w = 0, 1, 2.
template <class S>
using MuTuple = std::array<S, 6>;

// F = beta[mu] - gamma[alpha[sigma~, mu]] - (gamma[alpha[h, mu]] -
// gamma[alpha[h~, mu]]) on the triple, with sigma~ the optimal ranking and h~
// the optimal preference for mu. `h` must have three elements.
template <class S>
S evaluate_f(const Tournament& h, const MuTuple<S>& mu);

// The two explicit vertex families of the polytope section sampled below.
std::vector<MuTuple<Rational>> polytope_vertices_a();
std::vector<MuTuple<Rational>> polytope_vertices_b();

// Applies a relabeling of {u, v, w} (perm[x] is the new label of x).
template <class S>
MuTuple<S> relabel(const MuTuple<S>& mu, const std::array<std::size_t, 3>& perm);

// nullopt when the tuple lies in the polytope (up to `tolerance` for
// doubles); otherwise the violated constraint.
std::optional<std::string> tuple_violation(const MuTuple<Rational>& mu);
std::optional<std::string> tuple_violation(const MuTuple<double>& mu,
                                           double tolerance);

// All eight binary tournaments on {0, 1, 2}.
std::vector<Tournament> triple_tournaments();

struct FSampleOptions {
  std::size_t float_samples = 10000;     // Dirichlet convex combinations
  std::size_t rational_samples = 10000;  // integer-weight combinations
  bool relabel = true;                   // evaluate every relabeling
  std::uint64_t seed = 1;
  double tolerance = 1e-12;
};

struct FReport {
  std::size_t samples = 0;      // mu tuples, vertices included
  std::size_t evaluations = 0;  // (mu, h, relabeling) combinations
  double max_float = 0;         // over float samples
  Rational max_exact;           // over vertices and rational samples
  std::size_t float_violations = 0;  // F > tolerance
  std::size_t exact_violations = 0;  // F > 0
  std::size_t invalid_samples = 0;   // failed polytope re-validation

  bool ok() const {
    return float_violations == 0 && exact_violations == 0 &&
           invalid_samples == 0;
  }
};

FReport f_negativity_sample(const FSampleOptions& options);

// --- instance generators --------------------------------------------------------

// Tournament on 0..n-1 from a bit string over the pairs (i, j), i < j, in
// lexicographic order: bit set means i is preferred over j. Enumerating
// bits in [0, 2^(n choose 2)) yields every tournament once.
Tournament tournament_from_bits(std::size_t n, std::uint64_t bits);
Tournament random_tournament(std::size_t n, RandomSource& rng);
Ranking random_ranking(const ElementSet& elements, RandomSource& rng);
Partition random_partition(const ElementSet& elements, RandomSource& rng);
// Random non-negative rational combination of constant, top-k, bipartite,
// score-difference and concave-distance weights, as a table.
WeightFunction random_admissible_weight(std::size_t n, RandomSource& rng);

// --- deterministic lower bound ----------------------------------------------------

struct LowerBoundResult {
  Tournament h;          // the 3-cycle u -> v -> w -> u on ids 0, 1, 2
  Ranking output;        // the algorithm's ranking
  Partition tau_star;    // chosen by the adversary
  int adversary_case = 0;    // 1: output follows the cycle, 2: output reverses it
  Rational regret_rank;
  Rational regret_class;
  Rational ratio;
};

// Throws InvalidInput if the algorithm returns a ranking of other elements.
LowerBoundResult lower_bound_adversary(
    const std::function<Ranking(const Tournament&)>& algorithm);

}  // namespace prefsort

#endif  // PREFSORT_ORACLE_H_
