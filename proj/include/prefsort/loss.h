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

#ifndef PREFSORT_LOSS_H_
#define PREFSORT_LOSS_H_

#include <string>
#include <variant>

#include "prefsort/core.h"
#include "prefsort/rational.h"

namespace prefsort {

enum class Normalizer {
  kBinomial,    // n choose 2
  kMixedPairs,  // |{u,v : tau(u) < tau(v)}|
  kCustom,      // caller-supplied nu
};

std::string to_string(Normalizer normalizer);

// Choice of normalizer for bipartite losses. `custom` is used only with
// Normalizer::kCustom and must be positive.
struct NormalizerSpec {
  Normalizer kind = Normalizer::kBinomial;
  Rational custom = Rational(1);
};

template <class S>
struct BasicLossValue {
  S value{};            // weighted disagreement sum / denominator
  S weighted_sum{};     // numerator
  S denominator{};      // 0 when the loss is defined as 0 (n < 2)
  Normalizer normalizer = Normalizer::kBinomial;
};

using LossValue = BasicLossValue<Rational>;
using LossValueF = BasicLossValue<double>;

// Ground truth of a loss evaluation: a ranking with a weight function, or a
// bipartite partition with a normalizer.
struct RankingTruth {
  Ranking sigma_star;
  WeightFunction weight;
};

struct PartitionTruth {
  Partition tau_star;
  NormalizerSpec normalizer;
};

using GroundTruth = std::variant<RankingTruth, PartitionTruth>;

// Denominator nu of a bipartite loss: n choose 2 (0 when n < 2), the number
// of mixed pairs, or the custom value. Throws DegenerateInput for mixed pairs
// when there are none and InvalidInput for a non-positive custom value.
Rational partition_denominator(const Partition& tau,
                               const NormalizerSpec& spec);

const ElementSet& truth_elements(const GroundTruth& truth);
// Denominator of any loss against `truth`; 0 means the loss is identically 0.
Rational truth_denominator(const GroundTruth& truth);

// L_omega(sigma, sigma*): inverted pairs weighted by omega at sigma*'s
// positions, normalized by n choose 2. Throws InvalidInput on mismatched
// element sets or a weight of the wrong size.
template <class S = Rational>
BasicLossValue<S> loss_ranking(const Ranking& sigma, const Ranking& sigma_star,
                               const WeightFunction& w);

// L_omega(h, sigma*): disagreements of a preference function with sigma*.
template <class S = Rational>
BasicLossValue<S> loss_pref(const Tournament& h, const Ranking& sigma_star,
                            const WeightFunction& w);

// Bipartite loss sum_{u != v} x(u,v) tau*(v,u) / nu. Throws DegenerateInput
// for the mixed-pairs normalizer when no mixed pair exists.
template <class S = Rational>
BasicLossValue<S> loss_bipartite(const Ranking& sigma, const Partition& tau_star,
                                 const NormalizerSpec& normalizer = {});
template <class S = Rational>
BasicLossValue<S> loss_bipartite(const Tournament& h, const Partition& tau_star,
                                 const NormalizerSpec& normalizer = {});

// Loss of a ranking against either kind of ground truth.
template <class S = Rational>
S loss_against(const Ranking& sigma, const GroundTruth& truth);
// Loss of a preference function against either kind of ground truth.
template <class S = Rational>
S loss_against(const Tournament& h, const GroundTruth& truth);

// Area under the ROC curve of `sigma` with label 0 as the positive class,
// computed from the Mann-Whitney statistic. Throws DegenerateInput when one
// class is empty.
Rational auc(const Ranking& sigma, const Partition& tau_star);

}  // namespace prefsort

#endif  // PREFSORT_LOSS_H_
