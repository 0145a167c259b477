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

#include "prefsort/exact.h"

#include <array>
#include <bit>
#include <cstdint>
#include <map>
#include <unordered_map>

#include "prefsort/errors.h"

namespace prefsort {

namespace {

using Mask = std::uint64_t;

void require_exact_size(const Tournament& h, const ExactLimits& limits) {
  h.require_consistent();
  if (h.size() > limits.max_n || h.size() > 30)
    throw ResourceLimitExceeded("exact mode supports n <= " +
                                std::to_string(limits.max_n) + ", got n=" +
                                std::to_string(h.size()));
}

std::vector<std::size_t> members(Mask mask) {
  std::vector<std::size_t> out;
  while (mask != 0) {
    out.push_back(static_cast<std::size_t>(std::countr_zero(mask)));
    mask &= mask - 1;
  }
  return out;
}

// Splits `mask` around `pivot`: elements v with h(v, pivot) = 1 go left.
std::pair<Mask, Mask> split(const Tournament& h, Mask mask, std::size_t pivot) {
  Mask left = 0;
  Mask right = 0;
  for (std::size_t v : members(mask)) {
    if (v == pivot) continue;
    if (h.prefers(v, pivot)) {
      left |= Mask{1} << v;
    } else {
      right |= Mask{1} << v;
    }
  }
  return {left, right};
}

Mask full_mask(std::size_t n) {
  return n == 0 ? 0 : (n >= 64 ? ~Mask{0} : (Mask{1} << n) - 1);
}

const Rational kThird = make_rational(1, 3);

}  // namespace

// --- pivot tree ---------------------------------------------------------------

std::vector<std::pair<std::vector<std::size_t>, Rational>> PivotTree::leaves()
    const {
  std::vector<std::pair<std::vector<std::size_t>, Rational>> out;
  if (branches.empty()) {
    out.emplace_back(subarray, Rational(1));
    return out;
  }
  for (const Branch& b : branches) {
    auto left = b.left->leaves();
    auto right = b.right->leaves();
    for (const auto& [lo, lp] : left) {
      for (const auto& [ro, rp] : right) {
        std::vector<std::size_t> order = lo;
        order.push_back(b.pivot);
        order.insert(order.end(), ro.begin(), ro.end());
        Rational p = b.probability * lp * rp;
        out.emplace_back(std::move(order), std::move(p));
      }
    }
  }
  return out;
}

std::shared_ptr<const PivotTree> build_pivot_tree(const Tournament& h,
                                                  const ExactLimits& limits) {
  require_exact_size(h, limits);
  std::unordered_map<Mask, std::shared_ptr<const PivotTree>> memo;
  auto build = [&](auto&& self, Mask mask) -> std::shared_ptr<const PivotTree> {
    if (auto it = memo.find(mask); it != memo.end()) return it->second;
    auto node = std::make_shared<PivotTree>();
    node->subarray = members(mask);
    if (node->subarray.size() > 1) {
      Rational share = make_rational(1, static_cast<long>(node->subarray.size()));
      for (std::size_t pivot : node->subarray) {
        auto [left, right] = split(h, mask, pivot);
        node->branches.push_back({pivot, share, self(self, left), self(self, right)});
      }
    }
    memo.emplace(mask, node);
    return node;
  };
  return build(build, full_mask(h.size()));
}

// --- output distribution ------------------------------------------------------

RankingDistribution enumerate_distribution(const Tournament& h,
                                           const ExactLimits& limits) {
  require_exact_size(h, limits);
  using Dist = std::map<std::vector<std::size_t>, Rational>;
  std::unordered_map<Mask, Dist> memo;
  auto solve = [&](auto&& self, Mask mask) -> const Dist& {
    if (auto it = memo.find(mask); it != memo.end()) return it->second;
    Dist dist;
    auto elems = members(mask);
    if (elems.size() <= 1) {
      dist.emplace(elems, Rational(1));
    } else {
      Rational share = make_rational(1, static_cast<long>(elems.size()));
      for (std::size_t pivot : elems) {
        auto [left, right] = split(h, mask, pivot);
        // Copies: the recursive calls may rehash `memo`.
        Dist left_dist = self(self, left);
        const Dist& right_dist = self(self, right);
        for (const auto& [lo, lp] : left_dist) {
          for (const auto& [ro, rp] : right_dist) {
            std::vector<std::size_t> order = lo;
            order.push_back(pivot);
            order.insert(order.end(), ro.begin(), ro.end());
            dist[std::move(order)] += share * lp * rp;
          }
        }
      }
    }
    return memo.emplace(mask, std::move(dist)).first->second;
  };
  const Dist& root = solve(solve, full_mask(h.size()));
  RankingDistribution out;
  out.reserve(root.size());
  for (const auto& [order, p] : root)
    out.push_back({Ranking::from_indices(h.elements(), order), p});
  return out;
}

// --- pair statistics ------------------------------------------------------------

PairStats pair_probs(const Tournament& h, const ExactLimits& limits) {
  require_exact_size(h, limits);
  const std::size_t n = h.size();
  const Mask full = full_mask(n);
  std::vector<Rational> reach(static_cast<std::size_t>(full) + 1);
  PairFunction direct(n);
  std::vector<Rational> triple(n * n * n);
  if (n == 0) return PairStats(n, std::move(direct), std::move(triple));
  reach[full] = 1;
  // A child sub-array is a strict subset of its parent, hence numerically
  // smaller: descending order visits every parent before its children.
  for (Mask mask = full; mask != 0; --mask) {
    const Rational& r = reach[mask];
    if (r == 0) continue;
    auto elems = members(mask);
    const std::size_t size = elems.size();
    if (size < 2) continue;
    Rational share = r / static_cast<long>(size);
    for (std::size_t pivot : elems) {
      auto [left, right] = split(h, mask, pivot);
      reach[left] += share;
      reach[right] += share;
    }
    Rational pair_share = share * 2;
    Rational triple_share = share * 3;
    for (std::size_t a = 0; a < size; ++a) {
      for (std::size_t b = a + 1; b < size; ++b) {
        const std::size_t u = elems[a], v = elems[b];
        direct(u, v) += pair_share;
        direct(v, u) += pair_share;
        for (std::size_t c = b + 1; c < size; ++c) {
          const std::size_t w = elems[c];
          for (auto [x, y, z] : {std::array{u, v, w}, std::array{u, w, v},
                                 std::array{v, u, w}, std::array{v, w, u},
                                 std::array{w, u, v}, std::array{w, v, u}})
            triple[(x * n + y) * n + z] += triple_share;
        }
      }
    }
  }
  return PairStats(n, std::move(direct), std::move(triple));
}

// --- alpha / beta / gamma -------------------------------------------------------

Rational alpha(const PairFunction& x, const PairFunction& y, std::size_t u,
               std::size_t v) {
  return x(u, v) * y(v, u) + x(v, u) * y(u, v);
}

Rational beta(const Tournament& h, const PairFunction& x, std::size_t u,
              std::size_t v, std::size_t w) {
  auto H = [&](std::size_t a, std::size_t b) { return h.h(a, b); };
  Rational sum = H(u, v) * H(v, w) * x(w, u) + H(w, v) * H(v, u) * x(u, w);
  sum += H(v, u) * H(u, w) * x(w, v) + H(w, u) * H(u, v) * x(v, w);
  sum += H(u, w) * H(w, v) * x(v, u) + H(v, w) * H(w, u) * x(u, v);
  return sum * kThird;
}

Rational gamma(const Tournament& h, const PairFunction& z, std::size_t u,
               std::size_t v, std::size_t w) {
  auto H = [&](std::size_t a, std::size_t b) { return h.h(a, b); };
  Rational sum = (H(u, v) * H(v, w) + H(w, v) * H(v, u)) * z.unordered(u, w);
  sum += (H(v, u) * H(u, w) + H(w, u) * H(u, v)) * z.unordered(v, w);
  sum += (H(u, w) * H(w, v) + H(v, w) * H(w, u)) * z.unordered(u, v);
  return sum * kThird;
}

PairFunction alpha_matrix(const PairFunction& x, const PairFunction& y) {
  const std::size_t n = x.size();
  PairFunction out(n);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v) {
      out(u, v) = alpha(x, y, u, v);
      out(v, u) = out(u, v);
    }
  return out;
}

PairFunction indicator(const Tournament& h) {
  PairFunction out(h.size());
  for (std::size_t u = 0; u < h.size(); ++u)
    for (std::size_t v = 0; v < h.size(); ++v)
      if (u != v && h.prefers(u, v)) out(u, v) = 1;
  return out;
}

PairFunction indicator(const Ranking& sigma) {
  PairFunction out(sigma.size());
  for (std::size_t u = 0; u < sigma.size(); ++u)
    for (std::size_t v = 0; v < sigma.size(); ++v)
      if (sigma.before(u, v)) out(u, v) = 1;
  return out;
}

PairFunction delta(const Ranking& sigma_star, const WeightFunction& w) {
  const std::size_t n = sigma_star.size();
  if (w.size() != n)
    throw InvalidInput("weight function size does not match the ranking");
  PairFunction out(n);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v)
      if (sigma_star.before(u, v))
        out(u, v) = w.exact(sigma_star.position(u), sigma_star.position(v));
  return out;
}

PairFunction delta(const Partition& tau_star) {
  const std::size_t n = tau_star.size();
  PairFunction out(n);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v)
      if (tau_star.before(u, v)) out(u, v) = 1;
  return out;
}

void IdentityReport::merge(const IdentityReport& other) {
  checked += other.checked;
  violations += other.violations;
  lhs = other.lhs;
  rhs = other.rhs;
  details.insert(details.end(), other.details.begin(), other.details.end());
}

// --- exact model ------------------------------------------------------------------

namespace {

PairFunction truth_delta(const GroundTruth& truth) {
  if (const auto* r = std::get_if<RankingTruth>(&truth))
    return delta(r->sigma_star, r->weight);
  return delta(std::get<PartitionTruth>(truth).tau_star);
}

}  // namespace

ExactModel::ExactModel(const Tournament& h, const ExactLimits& limits)
    : h_(h),
      distribution_(enumerate_distribution(h, limits)),
      stats_(pair_probs(h, limits)) {}

Rational ExactModel::expected_loss_by_enumeration(const GroundTruth& truth) const {
  Rational sum;
  for (const auto& [ranking, p] : distribution_)
    sum += p * loss_against<Rational>(ranking, truth);
  return sum;
}

Rational ExactModel::expected_loss_by_decomposition(
    const GroundTruth& truth) const {
  if (!(truth_elements(truth) == h_.elements()))
    throw InvalidInput("ground truth is defined on a different element set");
  const std::size_t n = size();
  const Rational norm = truth_denominator(truth);
  if (norm == 0) return Rational(0);
  const PairFunction d = truth_delta(truth);
  const PairFunction hx = indicator(h_);
  Rational sum;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v) {
      sum += stats_.p(u, v) * alpha(hx, d, u, v);
      for (std::size_t w = v + 1; w < n; ++w)
        sum += stats_.p(u, v, w) * beta(h_, d, u, v, w);
    }
  return sum / norm;
}

Rational ExactModel::expected_loss(const GroundTruth& truth) const {
  Rational by_enumeration = expected_loss_by_enumeration(truth);
  Rational by_decomposition = expected_loss_by_decomposition(truth);
  if (by_enumeration != by_decomposition)
    throw IdentityViolation(
        "expected loss mismatch: enumeration gives " + to_string(by_enumeration) +
        ", decomposition gives " + to_string(by_decomposition));
  return by_enumeration;
}

Rational ExactModel::order_probability(std::size_t a, std::size_t b) const {
  Rational sum;
  for (const auto& [ranking, p] : distribution_)
    if (ranking.before(a, b)) sum += p;
  return sum;
}

Rational expected_loss_exact(const Tournament& h, const GroundTruth& truth,
                             const ExactLimits& limits) {
  if (h.size() < 2)
    throw InvalidInput("exact expected loss requires n >= 2");
  return ExactModel(h, limits).expected_loss(truth);
}

// --- identity checks ---------------------------------------------------------------

namespace {

void record(IdentityReport& report, Rational lhs, Rational rhs,
            const std::string& what) {
  ++report.checked;
  if (lhs != rhs) {
    ++report.violations;
    report.details.push_back(what + ": " + to_string(lhs) +
                             " != " + to_string(rhs));
  }
  report.lhs = std::move(lhs);
  report.rhs = std::move(rhs);
}

}  // namespace

IdentityReport check_pair_decomposition(const ExactModel& model, const PairFunction& z) {
  const Tournament& h = model.tournament();
  const PairStats& s = model.stats();
  const std::size_t n = model.size();
  Rational lhs, rhs;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v) {
      lhs += z.unordered(u, v);
      rhs += s.p(u, v) * z.unordered(u, v);
      for (std::size_t w = v + 1; w < n; ++w)
        rhs += s.p(u, v, w) * gamma(h, z, u, v, w);
    }
  IdentityReport report;
  record(report, std::move(lhs), std::move(rhs), "pair decomposition");
  return report;
}

IdentityReport check_alpha_decomposition(const ExactModel& model, const PairFunction& x) {
  const Tournament& h = model.tournament();
  const PairStats& s = model.stats();
  const std::size_t n = model.size();
  Rational lhs;
  for (const auto& [ranking, p] : model.distribution()) {
    Rational inner;
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = u + 1; v < n; ++v)
        inner += ranking.before(u, v) ? x(v, u) : x(u, v);
    lhs += p * inner;
  }
  const PairFunction hx = indicator(h);
  Rational rhs;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v) {
      rhs += s.p(u, v) * alpha(hx, x, u, v);
      for (std::size_t w = v + 1; w < n; ++w)
        rhs += s.p(u, v, w) * beta(h, x, u, v, w);
    }
  IdentityReport report;
  record(report, std::move(lhs), std::move(rhs), "alpha decomposition");
  return report;
}

IdentityReport decomposition_check(const Tournament& h, const PairFunction& z,
                                   const PairFunction& x,
                                   const ExactLimits& limits) {
  ExactModel model(h, limits);
  IdentityReport report = check_pair_decomposition(model, z);
  report.merge(check_alpha_decomposition(model, x));
  return report;
}

IdentityReport check_decided_once(const ExactModel& model) {
  const Tournament& h = model.tournament();
  const PairStats& s = model.stats();
  const std::size_t n = model.size();
  IdentityReport report;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v) {
      Rational total = s.p(u, v);
      for (std::size_t w = 0; w < n; ++w) {
        if (w == u || w == v) continue;
        int paths = h.h(u, w) * h.h(w, v) + h.h(v, w) * h.h(w, u);
        total += kThird * s.p(u, v, w) * paths;
      }
      record(report, std::move(total), Rational(1),
             "pair {" + std::to_string(u) + "," + std::to_string(v) + "}");
    }
  return report;
}

IdentityReport check_beta_gamma(const Tournament& h, const PairFunction& d) {
  const std::size_t n = h.size();
  const PairFunction ahd = alpha_matrix(indicator(h), d);
  IdentityReport report;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v)
      for (std::size_t w = v + 1; w < n; ++w) {
        Rational b = beta(h, d, u, v, w);
        Rational g2 = 2 * gamma(h, ahd, u, v, w);
        ++report.checked;
        if (b > g2) {
          ++report.violations;
          report.details.push_back("triple {" + std::to_string(u) + "," +
                                   std::to_string(v) + "," + std::to_string(w) +
                                   "}: beta " + to_string(b) + " > 2 gamma " +
                                   to_string(g2));
        }
        report.lhs = std::move(b);
        report.rhs = std::move(g2);
      }
  return report;
}

}  // namespace prefsort
