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

#ifndef PREFSORT_CORE_H_
#define PREFSORT_CORE_H_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "prefsort/rational.h"

namespace prefsort {

// Identifier of an element of the universe. The numeric order on ids is the
// canonical order used for tie-breaking only; it is never a ranking.
struct ElementId {
  std::uint64_t value = 0;

  constexpr ElementId() = default;
  constexpr explicit ElementId(std::uint64_t v) : value(v) {}
  friend constexpr auto operator<=>(ElementId, ElementId) = default;
};

std::string to_string(ElementId id);

// A finite set of elements, stored in canonical (ascending id) order. Local
// indices 0..n-1 follow that order, so index comparison is id comparison.
class ElementSet {
 public:
  ElementSet() = default;
  // Throws InvalidInput on duplicate ids.
  explicit ElementSet(std::vector<ElementId> ids);

  // Elements with ids 0..n-1.
  static ElementSet range(std::size_t n);

  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  ElementId id(std::size_t index) const { return ids_[index]; }
  std::span<const ElementId> ids() const { return ids_; }
  std::optional<std::size_t> index_of(ElementId id) const;
  bool contains(ElementId id) const { return index_of(id).has_value(); }
  // Throws InvalidInput if `id` is not a member.
  std::size_t require_index(ElementId id) const;
  bool is_subset_of(const ElementSet& other) const;

  friend bool operator==(const ElementSet&, const ElementSet&) = default;

 private:
  std::vector<ElementId> ids_;
};

// Dense n x n matrix over ordered pairs of local indices. Used for pair
// functions X(u,v), marginals mu(u,v) and cost matrices.
template <class T>
class PairMatrix {
 public:
  PairMatrix() = default;
  explicit PairMatrix(std::size_t n, const T& fill = T())
      : n_(n), data_(n * n, fill) {}

  std::size_t size() const { return n_; }
  T& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const {
    return data_[i * n_ + j];
  }
  // Reads an unordered-pair function stored in the upper triangle.
  const T& unordered(std::size_t i, std::size_t j) const {
    return i < j ? (*this)(i, j) : (*this)(j, i);
  }

  friend bool operator==(const PairMatrix&, const PairMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<T> data_;
};

class Ranking;

// Binary pairwise preference function h restricted to an element set.
// prefers(u, v) == true means u is preferred over (ranked ahead of) v.
// Construction does not require consistency; validate_tournament reports
// violations and operations that need a valid tournament reject it.
class Tournament {
 public:
  Tournament() = default;
  // `matrix[i][j]` in {0,1} for local indices i, j.
  Tournament(ElementSet elements, const std::vector<std::vector<int>>& matrix);

  // Builds the tournament from a predicate pref(i, j) on local indices,
  // evaluated for i != j only.
  template <class Pred>
  static Tournament from_predicate(ElementSet elements, Pred&& pref) {
    Tournament t;
    const std::size_t n = elements.size();
    t.elements_ = std::move(elements);
    t.bits_.assign(n * n, 0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j && pref(i, j)) t.bits_[i * n + j] = 1;
    t.consistent_ = t.compute_consistent();
    return t;
  }

  // The acyclic tournament induced by a ranking.
  static Tournament from_ranking(const Ranking& ranking);

  const ElementSet& elements() const { return elements_; }
  std::size_t size() const { return elements_.size(); }
  bool prefers(std::size_t i, std::size_t j) const {
    return bits_[i * elements_.size() + j] != 0;
  }
  bool prefers(ElementId u, ElementId v) const;
  int h(std::size_t i, std::size_t j) const { return prefers(i, j) ? 1 : 0; }
  bool is_consistent() const { return consistent_; }
  // Throws InvalidInput naming the first inconsistent pair.
  void require_consistent() const;
  std::size_t out_degree(std::size_t i) const;

  friend bool operator==(const Tournament& a, const Tournament& b) {
    return a.elements_ == b.elements_ && a.bits_ == b.bits_;
  }

 private:
  bool compute_consistent() const;

  ElementSet elements_;
  std::vector<std::uint8_t> bits_;
  bool consistent_ = true;
};

// A total order on an element set. Positions are 1-based.
class Ranking {
 public:
  Ranking() = default;

  // `order` lists ids from most to least preferred. Throws InvalidInput unless
  // it is a permutation of `elements`.
  static Ranking from_ids(ElementSet elements, std::span<const ElementId> order);
  // Same, with local indices.
  static Ranking from_indices(ElementSet elements,
                              std::vector<std::size_t> order);
  // positions[i] is the 1-based position of local index i.
  static Ranking from_positions(ElementSet elements,
                                std::span<const std::size_t> positions);
  // Canonical order: ascending ids.
  static Ranking identity(ElementSet elements);

  const ElementSet& elements() const { return elements_; }
  std::size_t size() const { return order_.size(); }
  std::size_t position(std::size_t index) const { return position_[index]; }
  std::size_t position(ElementId id) const;
  // Local index at 1-based position `pos`.
  std::size_t at(std::size_t pos) const { return order_[pos - 1]; }
  std::span<const std::size_t> order() const { return order_; }
  std::span<const std::size_t> positions() const { return position_; }
  std::vector<ElementId> ids_in_order() const;
  // sigma(u, v): 1 iff u is ranked ahead of v.
  bool before(std::size_t i, std::size_t j) const {
    return position_[i] < position_[j];
  }

  friend bool operator==(const Ranking& a, const Ranking& b) {
    return a.elements_ == b.elements_ && a.order_ == b.order_;
  }

 private:
  ElementSet elements_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> position_;
};

// Bipartite ground truth: label 0 is the preferred (positive) class.
class Partition {
 public:
  Partition() = default;
  // Throws InvalidInput unless labels.size() == elements.size() and every
  // label is 0 or 1.
  Partition(ElementSet elements, std::vector<int> labels);

  const ElementSet& elements() const { return elements_; }
  std::size_t size() const { return labels_.size(); }
  int label(std::size_t index) const { return labels_[index]; }
  std::span<const int> labels() const { return labels_; }
  // tau(u, v): 1 iff label(u) < label(v). Both directions may be 0.
  bool before(std::size_t i, std::size_t j) const {
    return labels_[i] < labels_[j];
  }
  std::size_t positives() const;
  // Number of unordered pairs with different labels.
  std::size_t mixed_pairs() const;
  // A ranking that places every label-0 element first (canonical order
  // within each class).
  Ranking sorted_ranking() const;

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  ElementSet elements_;
  std::vector<int> labels_;
};

enum class WeightKind { kConstant, kTopK, kBipartite, kScore, kTable };

std::string to_string(WeightKind kind);

// Weight function omega on pairs of 1-based positions. Values are exact
// rationals; a double copy of the table is kept for bench-mode loops. Both
// tables are materialized on first use and shared between copies.
class WeightFunction {
 public:
  WeightFunction() : WeightFunction(constant(0)) {}

  static WeightFunction constant(std::size_t n);
  // omega(i,j) = 1 iff i != j and min(i,j) <= k.
  static WeightFunction top_k(std::size_t n, std::size_t k);
  // omega(i,j) = 1 iff exactly one of i, j is <= k.
  static WeightFunction bipartite(std::size_t n, std::size_t k);
  // omega(i,j) = |s(i) - s(j)|; `scores` indexed by position - 1 and
  // required to be non-increasing.
  static WeightFunction score(std::vector<Rational> scores);
  // Explicit table indexed by position - 1. Must be square with
  // non-negative entries; the axioms are checked by validate_weight.
  static WeightFunction table(std::vector<std::vector<Rational>> entries);

  WeightKind kind() const { return kind_; }
  std::size_t size() const { return n_; }
  // Threshold of the top-k and bipartite kinds; 0 otherwise.
  std::size_t k() const { return k_; }
  std::span<const Rational> scores() const { return scores_; }

  // 1-based positions.
  const Rational& exact(std::size_t i, std::size_t j) const;
  double value(std::size_t i, std::size_t j) const;
  // Scalar-generic accessor used by templated loss code.
  template <class S>
  S at(std::size_t i, std::size_t j) const {
    if constexpr (std::is_same_v<S, double>) {
      return value(i, j);
    } else {
      return exact(i, j);
    }
  }

 private:
  struct Tables;

  WeightFunction(WeightKind kind, std::size_t n, std::size_t k,
                 std::vector<Rational> scores,
                 std::vector<Rational> explicit_table);
  Rational closed_form(std::size_t i, std::size_t j) const;
  const Tables& tables() const;

  WeightKind kind_ = WeightKind::kConstant;
  std::size_t n_ = 0;
  std::size_t k_ = 0;
  std::vector<Rational> scores_;
  std::shared_ptr<Tables> tables_;
};

// --- validation -------------------------------------------------------------

struct PairViolation {
  ElementId u;
  ElementId v;
  int h_uv = 0;
  int h_vu = 0;
};

struct TournamentReport {
  bool ok = true;
  std::vector<PairViolation> violations;  // includes u == v for the diagonal
};

TournamentReport validate_tournament(const Tournament& t);

enum class WeightAxiom { kSymmetry, kMonotonicity, kTriangle, kZeroDiagonal };

std::string to_string(WeightAxiom axiom);

// Witness positions are 1-based. For the triangle axiom the witness (i,j,k)
// violates omega(i,j) <= omega(i,k) + omega(k,j); for monotonicity it
// violates omega(i,j) <= omega(i,k).
struct WeightViolation {
  WeightAxiom axiom;
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t k = 0;
};

// At most one violation per axiom (the first in lexicographic witness order),
// listed in the order symmetry, monotonicity, triangle, zero diagonal.
struct WeightReport {
  bool ok = true;
  std::vector<WeightViolation> violations;
};

WeightReport validate_weight(const WeightFunction& w);

// --- restriction ------------------------------------------------------------

// Throws InvalidInput if `subset` contains elements outside the source.
Tournament restrict(const Tournament& t, const ElementSet& subset);
Ranking restrict(const Ranking& r, const ElementSet& subset);
Partition restrict(const Partition& p, const ElementSet& subset);

}  // namespace prefsort

#endif  // PREFSORT_CORE_H_
