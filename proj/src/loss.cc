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

#include "prefsort/loss.h"

#include "prefsort/errors.h"

namespace prefsort {

std::string to_string(Normalizer normalizer) {
  switch (normalizer) {
    case Normalizer::kBinomial: return "binomial";
    case Normalizer::kMixedPairs: return "mixed-pairs";
    case Normalizer::kCustom: return "custom";
  }
  return "unknown";
}

namespace {

template <class S>
S from_rational(const Rational& r) {
  if constexpr (std::is_same_v<S, double>) {
    return r.get_d();
  } else {
    return r;
  }
}

void require_same(const ElementSet& a, const ElementSet& b) {
  if (!(a == b))
    throw InvalidInput("loss arguments are defined on different element sets");
}

// sum_{u != v} x(u,v) * truth(v,u) * omega(sigma*(u), sigma*(v)), divided by
// n choose 2. `x` is a pair indicator on local indices.
template <class S, class Indicator>
BasicLossValue<S> weighted_disagreement(Indicator&& x, const Ranking& sigma_star,
                                        const WeightFunction& w) {
  const std::size_t n = sigma_star.size();
  if (w.size() != n)
    throw InvalidInput("weight function has size " + std::to_string(w.size()) +
                       " but the ranking has " + std::to_string(n) +
                       " elements");
  BasicLossValue<S> loss;
  loss.normalizer = Normalizer::kBinomial;
  loss.weighted_sum = S(0);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v)
      if (u != v && x(u, v) && sigma_star.before(v, u))
        loss.weighted_sum +=
            w.at<S>(sigma_star.position(u), sigma_star.position(v));
  if (n < 2) {
    loss.denominator = S(0);
    loss.value = S(0);
    return loss;
  }
  loss.denominator = from_rational<S>(choose2(n));
  loss.value = loss.weighted_sum / loss.denominator;
  return loss;
}

template <class S, class Indicator>
BasicLossValue<S> bipartite_disagreement(Indicator&& x, const Partition& tau,
                                         const NormalizerSpec& spec) {
  const std::size_t n = tau.size();
  BasicLossValue<S> loss;
  loss.normalizer = spec.kind;
  std::size_t misordered = 0;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v)
      if (u != v && x(u, v) && tau.before(v, u)) ++misordered;
  loss.weighted_sum = S(static_cast<long>(misordered));
  const Rational denominator = partition_denominator(tau, spec);
  if (denominator == 0) {
    loss.denominator = S(0);
    loss.value = S(0);
    return loss;
  }
  loss.denominator = from_rational<S>(denominator);
  loss.value = loss.weighted_sum / loss.denominator;
  return loss;
}

}  // namespace

Rational partition_denominator(const Partition& tau,
                               const NormalizerSpec& spec) {
  switch (spec.kind) {
    case Normalizer::kBinomial:
      break;
    case Normalizer::kMixedPairs:
      if (tau.mixed_pairs() == 0)
        throw DegenerateInput(
            "mixed-pairs normalizer undefined: partition has no mixed pair");
      return Rational(static_cast<long>(tau.mixed_pairs()));
    case Normalizer::kCustom:
      if (spec.custom <= 0)
        throw InvalidInput("custom normalizer must be positive");
      return spec.custom;
  }
  return choose2(tau.size());
}

const ElementSet& truth_elements(const GroundTruth& truth) {
  if (const auto* r = std::get_if<RankingTruth>(&truth))
    return r->sigma_star.elements();
  return std::get<PartitionTruth>(truth).tau_star.elements();
}

Rational truth_denominator(const GroundTruth& truth) {
  if (const auto* r = std::get_if<RankingTruth>(&truth))
    return choose2(r->sigma_star.size());
  const auto& p = std::get<PartitionTruth>(truth);
  return partition_denominator(p.tau_star, p.normalizer);
}

template <class S>
BasicLossValue<S> loss_ranking(const Ranking& sigma, const Ranking& sigma_star,
                               const WeightFunction& w) {
  require_same(sigma.elements(), sigma_star.elements());
  return weighted_disagreement<S>(
      [&](std::size_t u, std::size_t v) { return sigma.before(u, v); },
      sigma_star, w);
}

template <class S>
BasicLossValue<S> loss_pref(const Tournament& h, const Ranking& sigma_star,
                            const WeightFunction& w) {
  require_same(h.elements(), sigma_star.elements());
  h.require_consistent();
  return weighted_disagreement<S>(
      [&](std::size_t u, std::size_t v) { return h.prefers(u, v); }, sigma_star,
      w);
}

template <class S>
BasicLossValue<S> loss_bipartite(const Ranking& sigma, const Partition& tau_star,
                                 const NormalizerSpec& normalizer) {
  require_same(sigma.elements(), tau_star.elements());
  return bipartite_disagreement<S>(
      [&](std::size_t u, std::size_t v) { return sigma.before(u, v); },
      tau_star, normalizer);
}

template <class S>
BasicLossValue<S> loss_bipartite(const Tournament& h, const Partition& tau_star,
                                 const NormalizerSpec& normalizer) {
  require_same(h.elements(), tau_star.elements());
  h.require_consistent();
  return bipartite_disagreement<S>(
      [&](std::size_t u, std::size_t v) { return h.prefers(u, v); }, tau_star,
      normalizer);
}

template <class S>
S loss_against(const Ranking& sigma, const GroundTruth& truth) {
  if (const auto* r = std::get_if<RankingTruth>(&truth))
    return loss_ranking<S>(sigma, r->sigma_star, r->weight).value;
  const auto& p = std::get<PartitionTruth>(truth);
  return loss_bipartite<S>(sigma, p.tau_star, p.normalizer).value;
}

template <class S>
S loss_against(const Tournament& h, const GroundTruth& truth) {
  if (const auto* r = std::get_if<RankingTruth>(&truth))
    return loss_pref<S>(h, r->sigma_star, r->weight).value;
  const auto& p = std::get<PartitionTruth>(truth);
  return loss_bipartite<S>(h, p.tau_star, p.normalizer).value;
}

Rational auc(const Ranking& sigma, const Partition& tau_star) {
  require_same(sigma.elements(), tau_star.elements());
  const std::size_t positives = tau_star.positives();
  const std::size_t negatives = tau_star.size() - positives;
  if (positives == 0 || negatives == 0)
    throw DegenerateInput("AUC undefined: one class is empty");
  // Walk the ranking top-down; each negative is correctly ordered against
  // every positive already seen.
  std::size_t correct = 0;
  std::size_t seen_positive = 0;
  for (std::size_t index : sigma.order()) {
    if (tau_star.label(index) == 0) {
      ++seen_positive;
    } else {
      correct += seen_positive;
    }
  }
  return make_rational(static_cast<long>(correct),
                       static_cast<long>(positives * negatives));
}

#define PREFSORT_INSTANTIATE_LOSS(S)                                         \
  template BasicLossValue<S> loss_ranking<S>(const Ranking&, const Ranking&, \
                                             const WeightFunction&);         \
  template BasicLossValue<S> loss_pref<S>(const Tournament&, const Ranking&, \
                                          const WeightFunction&);            \
  template BasicLossValue<S> loss_bipartite<S>(                              \
      const Ranking&, const Partition&, const NormalizerSpec&);              \
  template BasicLossValue<S> loss_bipartite<S>(                              \
      const Tournament&, const Partition&, const NormalizerSpec&);           \
  template S loss_against<S>(const Ranking&, const GroundTruth&);            \
  template S loss_against<S>(const Tournament&, const GroundTruth&);

PREFSORT_INSTANTIATE_LOSS(Rational)
PREFSORT_INSTANTIATE_LOSS(double)

#undef PREFSORT_INSTANTIATE_LOSS

}  // namespace prefsort
