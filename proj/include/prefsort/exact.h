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

#ifndef PREFSORT_EXACT_H_
#define PREFSORT_EXACT_H_

#include <cstddef>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "prefsort/core.h"
#include "prefsort/loss.h"
#include "prefsort/rational.h"

namespace prefsort {

// Exact mode enumerates QuickSort's pivot choices; cost grows roughly like
// n! so inputs are capped.
struct ExactLimits {
  std::size_t max_n = 8;
};

// Function on ordered pairs of local indices. Unordered-pair functions use
// the upper triangle (see PairMatrix::unordered).
using PairFunction = PairMatrix<Rational>;

struct WeightedRanking {
  Ranking ranking;
  Rational probability;
};

// Output distribution of QuickSort, sorted by the ranking's index order.
using RankingDistribution = std::vector<WeightedRanking>;

// AND/OR tree of pivot choices. Each node is a sub-array (always in
// ascending index order, since partitioning is stable); each branch picks a
// pivot with probability 1/|sub-array| and owns the two recursive calls.
// Identical sub-arrays share one node.
struct PivotTree {
  struct Branch {
    std::size_t pivot;
    Rational probability;
    std::shared_ptr<const PivotTree> left;
    std::shared_ptr<const PivotTree> right;
  };

  std::vector<std::size_t> subarray;
  std::vector<Branch> branches;  // empty when the sub-array has <= 1 element

  // Every complete pivot-choice outcome below this node: the resulting
  // order of the sub-array and its probability. Outcomes are not merged, so
  // equal orders reached by different choices appear separately.
  std::vector<std::pair<std::vector<std::size_t>, Rational>> leaves() const;
};

// Throws ResourceLimitExceeded when h.size() > limits.max_n.
std::shared_ptr<const PivotTree> build_pivot_tree(const Tournament& h,
                                                  const ExactLimits& limits = {});

RankingDistribution enumerate_distribution(const Tournament& h,
                                           const ExactLimits& limits = {});

// p_uv: probability that u or v is chosen as pivot while both share the
// current sub-array. p_uvw: probability that u, v, w share a sub-array when
// one of the three is chosen as pivot.
class PairStats {
 public:
  PairStats() = default;
  PairStats(std::size_t n, PairFunction direct, std::vector<Rational> triple)
      : n_(n), direct_(std::move(direct)), triple_(std::move(triple)) {}

  std::size_t size() const { return n_; }
  const Rational& p(std::size_t u, std::size_t v) const { return direct_(u, v); }
  const Rational& p(std::size_t u, std::size_t v, std::size_t w) const {
    return triple_[(u * n_ + v) * n_ + w];
  }

 private:
  std::size_t n_ = 0;
  PairFunction direct_;
  std::vector<Rational> triple_;  // dense, symmetric under permutation
};

PairStats pair_probs(const Tournament& h, const ExactLimits& limits = {});

// alpha[X,Y]_{uv} = X(u,v)Y(v,u) + X(v,u)Y(u,v).
Rational alpha(const PairFunction& x, const PairFunction& y, std::size_t u,
               std::size_t v);
// beta[X]_{uvw}: each of the three elements taken as the middle pivot b, the
// outer pair (a,c) ordered through b is charged X at the reversed pair.
Rational beta(const Tournament& h, const PairFunction& x, std::size_t u,
              std::size_t v, std::size_t w);
// gamma[Z]_{uvw} for an unordered-pair function Z.
Rational gamma(const Tournament& h, const PairFunction& z, std::size_t u,
               std::size_t v, std::size_t w);
// alpha[X,Y] as a symmetric matrix.
PairFunction alpha_matrix(const PairFunction& x, const PairFunction& y);

// 0/1 indicator matrices.
PairFunction indicator(const Tournament& h);
PairFunction indicator(const Ranking& sigma);

// Delta(u,v) = omega(sigma*(u), sigma*(v)) * sigma*(u,v).
PairFunction delta(const Ranking& sigma_star, const WeightFunction& w);
// Bipartite ground truth: Delta(u,v) = tau*(u,v).
PairFunction delta(const Partition& tau_star);

// Result of an exact identity or inequality check.
struct IdentityReport {
  std::size_t checked = 0;
  std::size_t violations = 0;
  Rational lhs;  // last (or aggregate) left-hand side
  Rational rhs;
  std::vector<std::string> details;  // one line per violation

  bool ok() const { return violations == 0; }
  void merge(const IdentityReport& other);
};

// Distribution and pair statistics of QuickSort on one tournament, computed
// once and reused across ground truths.
class ExactModel {
 public:
  explicit ExactModel(const Tournament& h, const ExactLimits& limits = {});

  const Tournament& tournament() const { return h_; }
  std::size_t size() const { return h_.size(); }
  const RankingDistribution& distribution() const { return distribution_; }
  const PairStats& stats() const { return stats_; }

  // E_s[L(Q_s, truth)] by summing over the output distribution.
  Rational expected_loss_by_enumeration(const GroundTruth& truth) const;
  // The same expectation through p_uv alpha[h,Delta] + p_uvw beta[Delta].
  Rational expected_loss_by_decomposition(const GroundTruth& truth) const;
  // Both routes; throws IdentityViolation if they differ.
  Rational expected_loss(const GroundTruth& truth) const;

  // Probability that `a` is ranked ahead of `b` in the output.
  Rational order_probability(std::size_t a, std::size_t b) const;

 private:
  Tournament h_;
  RankingDistribution distribution_;
  PairStats stats_;
};

// Requires n >= 2. Throws IdentityViolation if the two routes disagree.
Rational expected_loss_exact(const Tournament& h, const GroundTruth& truth,
                             const ExactLimits& limits = {});

// sum_{u<v} Z_uv = sum p_uv Z_uv + sum p_uvw gamma[Z]_uvw.
IdentityReport check_pair_decomposition(const ExactModel& model, const PairFunction& z);
// E_s[sum alpha[Q_s,X]] = sum p_uv alpha[h,X] + sum p_uvw beta[X].
IdentityReport check_alpha_decomposition(const ExactModel& model, const PairFunction& x);
// Both parts of the QuickSort decomposition.
IdentityReport decomposition_check(const Tournament& h, const PairFunction& z,
                                   const PairFunction& x,
                                   const ExactLimits& limits = {});

// Per pair: p_uv + sum_w (1/3) p_uvw (h(u,w)h(w,v) + h(v,w)h(w,u)) = 1.
IdentityReport check_decided_once(const ExactModel& model);

// Per triple: beta[Delta] <= 2 gamma[alpha[h,Delta]].
IdentityReport check_beta_gamma(const Tournament& h, const PairFunction& d);

}  // namespace prefsort

#endif  // PREFSORT_EXACT_H_
