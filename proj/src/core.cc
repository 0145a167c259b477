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

#include "prefsort/core.h"

#include <algorithm>
#include <cctype>
#include <mutex>
#include <numeric>
#include <sstream>
#include <utility>

#include "prefsort/errors.h"

namespace prefsort {

// --- rational helpers -------------------------------------------------------

namespace {

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isdigit(static_cast<unsigned char>(c)) != 0;
  });
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  const std::string bad = "malformed rational '" + std::string(text) + "'";
  bool negative = false;
  std::string_view body = s;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  Rational result;
  if (auto slash = body.find('/'); slash != std::string_view::npos) {
    std::string_view num = body.substr(0, slash);
    std::string_view den = body.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) throw InvalidInput(bad);
    mpz_class d(std::string(den), 10);
    if (d == 0) throw InvalidInput(bad + ": zero denominator");
    result = Rational(mpz_class(std::string(num), 10), d);
  } else if (auto dot = body.find('.'); dot != std::string_view::npos) {
    std::string_view whole = body.substr(0, dot);
    std::string_view frac = body.substr(dot + 1);
    if ((!whole.empty() && !all_digits(whole)) ||
        (!frac.empty() && !all_digits(frac)) || (whole.empty() && frac.empty()))
      throw InvalidInput(bad);
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
    mpz_class w = whole.empty() ? mpz_class(0) : mpz_class(std::string(whole), 10);
    mpz_class f = frac.empty() ? mpz_class(0) : mpz_class(std::string(frac), 10);
    result = Rational(w * scale + f, scale);
  } else {
    if (!all_digits(body)) throw InvalidInput(bad);
    result = Rational(mpz_class(std::string(body), 10));
  }
  result.canonicalize();
  if (negative) result = -result;
  return result;
}

std::string to_string(const Rational& value) { return value.get_str(10); }

Rational make_rational(long num, long den) {
  Rational r{mpz_class(num), mpz_class(den)};
  r.canonicalize();
  return r;
}

Rational choose2(std::size_t n) {
  if (n < 2) return Rational(0);
  mpz_class c(static_cast<unsigned long>(n));
  c = c * (c - 1) / 2;
  return Rational(c);
}

// --- ElementSet -------------------------------------------------------------

std::string to_string(ElementId id) { return std::to_string(id.value); }

ElementSet::ElementSet(std::vector<ElementId> ids) : ids_(std::move(ids)) {
  std::sort(ids_.begin(), ids_.end());
  auto dup = std::adjacent_find(ids_.begin(), ids_.end());
  if (dup != ids_.end())
    throw InvalidInput("duplicate element id " + to_string(*dup));
}

ElementSet ElementSet::range(std::size_t n) {
  std::vector<ElementId> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = ElementId(i);
  return ElementSet(std::move(ids));
}

std::optional<std::size_t> ElementSet::index_of(ElementId id) const {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it == ids_.end() || *it != id) return std::nullopt;
  return static_cast<std::size_t>(it - ids_.begin());
}

std::size_t ElementSet::require_index(ElementId id) const {
  auto index = index_of(id);
  if (!index) throw InvalidInput("element " + to_string(id) + " not in set");
  return *index;
}

bool ElementSet::is_subset_of(const ElementSet& other) const {
  return std::includes(other.ids_.begin(), other.ids_.end(), ids_.begin(),
                       ids_.end());
}

// --- Tournament -------------------------------------------------------------

Tournament::Tournament(ElementSet elements,
                       const std::vector<std::vector<int>>& matrix)
    : elements_(std::move(elements)) {
  const std::size_t n = elements_.size();
  if (matrix.size() != n)
    throw InvalidInput("tournament matrix has " + std::to_string(matrix.size()) +
                       " rows, expected " + std::to_string(n));
  bits_.assign(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (matrix[i].size() != n)
      throw InvalidInput("tournament matrix row " + std::to_string(i) +
                         " has " + std::to_string(matrix[i].size()) +
                         " entries, expected " + std::to_string(n));
    for (std::size_t j = 0; j < n; ++j) {
      int value = matrix[i][j];
      if (value != 0 && value != 1)
        throw InvalidInput("tournament entry (" + std::to_string(i) + "," +
                           std::to_string(j) + ") is not 0 or 1");
      bits_[i * n + j] = static_cast<std::uint8_t>(value);
    }
  }
  consistent_ = compute_consistent();
}

Tournament Tournament::from_ranking(const Ranking& ranking) {
  return from_predicate(ranking.elements(), [&](std::size_t i, std::size_t j) {
    return ranking.before(i, j);
  });
}

bool Tournament::prefers(ElementId u, ElementId v) const {
  return prefers(elements_.require_index(u), elements_.require_index(v));
}

bool Tournament::compute_consistent() const {
  const std::size_t n = elements_.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (bits_[i * n + i]) return false;
    for (std::size_t j = i + 1; j < n; ++j)
      if (bits_[i * n + j] + bits_[j * n + i] != 1) return false;
  }
  return true;
}

void Tournament::require_consistent() const {
  if (consistent_) return;
  auto report = validate_tournament(*this);
  const auto& v = report.violations.front();
  throw InvalidInput("inconsistent preference at pair {" + to_string(v.u) +
                     "," + to_string(v.v) + "}: h(u,v)=" +
                     std::to_string(v.h_uv) +
                     ", h(v,u)=" + std::to_string(v.h_vu));
}

std::size_t Tournament::out_degree(std::size_t i) const {
  std::size_t d = 0;
  for (std::size_t j = 0; j < size(); ++j) d += h(i, j);
  return d;
}

TournamentReport validate_tournament(const Tournament& t) {
  TournamentReport report;
  const std::size_t n = t.size();
  const auto& el = t.elements();
  for (std::size_t i = 0; i < n; ++i) {
    if (t.prefers(i, i))
      report.violations.push_back({el.id(i), el.id(i), 1, 1});
    for (std::size_t j = i + 1; j < n; ++j) {
      if (t.h(i, j) + t.h(j, i) != 1)
        report.violations.push_back({el.id(i), el.id(j), t.h(i, j), t.h(j, i)});
    }
  }
  report.ok = report.violations.empty();
  return report;
}

// --- Ranking ----------------------------------------------------------------

Ranking Ranking::from_indices(ElementSet elements,
                              std::vector<std::size_t> order) {
  const std::size_t n = elements.size();
  if (order.size() != n)
    throw InvalidInput("ranking lists " + std::to_string(order.size()) +
                       " elements, expected " + std::to_string(n));
  Ranking r;
  r.position_.assign(n, 0);
  for (std::size_t pos = 0; pos < n; ++pos) {
    std::size_t index = order[pos];
    if (index >= n || r.position_[index] != 0)
      throw InvalidInput("ranking is not a permutation of its element set");
    r.position_[index] = pos + 1;
  }
  r.elements_ = std::move(elements);
  r.order_ = std::move(order);
  return r;
}

Ranking Ranking::from_ids(ElementSet elements,
                          std::span<const ElementId> order) {
  std::vector<std::size_t> indices;
  indices.reserve(order.size());
  for (ElementId id : order) indices.push_back(elements.require_index(id));
  return from_indices(std::move(elements), std::move(indices));
}

Ranking Ranking::from_positions(ElementSet elements,
                                std::span<const std::size_t> positions) {
  const std::size_t n = elements.size();
  if (positions.size() != n)
    throw InvalidInput("position vector has wrong length");
  std::vector<std::size_t> order(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t pos = positions[i];
    if (pos < 1 || pos > n || order[pos - 1] != n)
      throw InvalidInput("positions are not a permutation of 1..n");
    order[pos - 1] = i;
  }
  return from_indices(std::move(elements), std::move(order));
}

Ranking Ranking::identity(ElementSet elements) {
  std::vector<std::size_t> order(elements.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  return from_indices(std::move(elements), std::move(order));
}

std::size_t Ranking::position(ElementId id) const {
  return position_[elements_.require_index(id)];
}

std::vector<ElementId> Ranking::ids_in_order() const {
  std::vector<ElementId> ids;
  ids.reserve(order_.size());
  for (std::size_t index : order_) ids.push_back(elements_.id(index));
  return ids;
}

// --- Partition --------------------------------------------------------------

Partition::Partition(ElementSet elements, std::vector<int> labels)
    : elements_(std::move(elements)), labels_(std::move(labels)) {
  if (labels_.size() != elements_.size())
    throw InvalidInput("partition has " + std::to_string(labels_.size()) +
                       " labels for " + std::to_string(elements_.size()) +
                       " elements");
  for (int label : labels_)
    if (label != 0 && label != 1)
      throw InvalidInput("partition labels must be 0 or 1");
}

std::size_t Partition::positives() const {
  return static_cast<std::size_t>(
      std::count(labels_.begin(), labels_.end(), 0));
}

std::size_t Partition::mixed_pairs() const {
  const std::size_t p = positives();
  return p * (labels_.size() - p);
}

Ranking Partition::sorted_ranking() const {
  std::vector<std::size_t> order(labels_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return labels_[a] < labels_[b];
  });
  return Ranking::from_indices(elements_, std::move(order));
}

// --- WeightFunction ---------------------------------------------------------

std::string to_string(WeightKind kind) {
  switch (kind) {
    case WeightKind::kConstant: return "constant";
    case WeightKind::kTopK: return "top-k";
    case WeightKind::kBipartite: return "bipartite";
    case WeightKind::kScore: return "score";
    case WeightKind::kTable: return "table";
  }
  return "unknown";
}

struct WeightFunction::Tables {
  std::once_flag exact_once;
  std::once_flag real_once;
  std::vector<Rational> exact;
  std::vector<double> real;
};

WeightFunction::WeightFunction(WeightKind kind, std::size_t n, std::size_t k,
                               std::vector<Rational> scores,
                               std::vector<Rational> explicit_table)
    : kind_(kind),
      n_(n),
      k_(k),
      scores_(std::move(scores)),
      tables_(std::make_shared<Tables>()) {
  if (kind_ == WeightKind::kTable) tables_->exact = std::move(explicit_table);
}

WeightFunction WeightFunction::constant(std::size_t n) {
  return WeightFunction(WeightKind::kConstant, n, 0, {}, {});
}

WeightFunction WeightFunction::top_k(std::size_t n, std::size_t k) {
  if (k > n)
    throw InvalidInput("top-k weight needs k <= n (k=" + std::to_string(k) +
                       ", n=" + std::to_string(n) + ")");
  return WeightFunction(WeightKind::kTopK, n, k, {}, {});
}

WeightFunction WeightFunction::bipartite(std::size_t n, std::size_t k) {
  if (k > n)
    throw InvalidInput("bipartite weight needs k <= n (k=" +
                       std::to_string(k) + ", n=" + std::to_string(n) + ")");
  return WeightFunction(WeightKind::kBipartite, n, k, {}, {});
}

WeightFunction WeightFunction::score(std::vector<Rational> scores) {
  for (std::size_t i = 1; i < scores.size(); ++i)
    if (scores[i] > scores[i - 1])
      throw InvalidInput("score weight requires non-increasing scores; s(" +
                         std::to_string(i + 1) + ") > s(" + std::to_string(i) +
                         ")");
  const std::size_t n = scores.size();
  return WeightFunction(WeightKind::kScore, n, 0, std::move(scores), {});
}

WeightFunction WeightFunction::table(std::vector<std::vector<Rational>> entries) {
  const std::size_t n = entries.size();
  std::vector<Rational> flat;
  flat.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    if (entries[i].size() != n)
      throw InvalidInput("weight table row " + std::to_string(i + 1) +
                         " has " + std::to_string(entries[i].size()) +
                         " entries, expected " + std::to_string(n));
    for (std::size_t j = 0; j < n; ++j) {
      if (entries[i][j] < 0)
        throw InvalidInput("weight table entry (" + std::to_string(i + 1) +
                           "," + std::to_string(j + 1) + ") is negative");
      flat.push_back(entries[i][j]);
    }
  }
  return WeightFunction(WeightKind::kTable, n, 0, {}, std::move(flat));
}

Rational WeightFunction::closed_form(std::size_t i, std::size_t j) const {
  if (i == j) return Rational(0);
  switch (kind_) {
    case WeightKind::kConstant:
      return Rational(1);
    case WeightKind::kTopK:
      return Rational((i <= k_ || j <= k_) ? 1 : 0);
    case WeightKind::kBipartite:
      return Rational(((i <= k_) != (j <= k_)) ? 1 : 0);
    case WeightKind::kScore: {
      Rational d = scores_[i - 1] - scores_[j - 1];
      return abs(d);
    }
    case WeightKind::kTable:
      break;
  }
  return tables_->exact[(i - 1) * n_ + (j - 1)];
}

const WeightFunction::Tables& WeightFunction::tables() const {
  std::call_once(tables_->exact_once, [this] {
    if (kind_ == WeightKind::kTable) return;
    auto& t = tables_->exact;
    t.resize(n_ * n_);
    for (std::size_t i = 1; i <= n_; ++i)
      for (std::size_t j = 1; j <= n_; ++j)
        t[(i - 1) * n_ + (j - 1)] = closed_form(i, j);
  });
  return *tables_;
}

const Rational& WeightFunction::exact(std::size_t i, std::size_t j) const {
  return tables().exact[(i - 1) * n_ + (j - 1)];
}

double WeightFunction::value(std::size_t i, std::size_t j) const {
  const Tables& t = tables();
  std::call_once(tables_->real_once, [this, &t] {
    tables_->real.resize(t.exact.size());
    for (std::size_t x = 0; x < t.exact.size(); ++x)
      tables_->real[x] = t.exact[x].get_d();
  });
  return tables_->real[(i - 1) * n_ + (j - 1)];
}

std::string to_string(WeightAxiom axiom) {
  switch (axiom) {
    case WeightAxiom::kSymmetry: return "P1 symmetry";
    case WeightAxiom::kMonotonicity: return "P2 monotonicity";
    case WeightAxiom::kTriangle: return "P3 triangle inequality";
    case WeightAxiom::kZeroDiagonal: return "zero diagonal";
  }
  return "unknown";
}

WeightReport validate_weight(const WeightFunction& w) {
  WeightReport report;
  const std::size_t n = w.size();
  auto find_first = [&](WeightAxiom axiom, auto&& violated) {
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t j = 1; j <= n; ++j)
        for (std::size_t k = 1; k <= n; ++k)
          if (violated(i, j, k)) {
            report.violations.push_back({axiom, i, j, k});
            return;
          }
  };
  // Symmetry and the diagonal are pair properties; k is reported as 0.
  auto find_pair = [&](WeightAxiom axiom, auto&& violated) {
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t j = 1; j <= n; ++j)
        if (violated(i, j)) {
          report.violations.push_back({axiom, i, j, 0});
          return;
        }
  };

  find_pair(WeightAxiom::kSymmetry, [&](std::size_t i, std::size_t j) {
    return w.exact(i, j) != w.exact(j, i);
  });
  find_first(WeightAxiom::kMonotonicity,
             [&](std::size_t i, std::size_t j, std::size_t k) {
               bool ordered = (i < j && j < k) || (i > j && j > k);
               return ordered && w.exact(i, j) > w.exact(i, k);
             });
  find_first(WeightAxiom::kTriangle,
             [&](std::size_t i, std::size_t j, std::size_t k) {
               return w.exact(i, j) > w.exact(i, k) + w.exact(k, j);
             });
  find_pair(WeightAxiom::kZeroDiagonal, [&](std::size_t i, std::size_t j) {
    return i == j && w.exact(i, i) != 0;
  });
  report.ok = report.violations.empty();
  return report;
}

// --- restriction ------------------------------------------------------------

namespace {

std::vector<std::size_t> source_indices(const ElementSet& source,
                                        const ElementSet& subset) {
  std::vector<std::size_t> map;
  map.reserve(subset.size());
  for (ElementId id : subset.ids()) {
    auto index = source.index_of(id);
    if (!index)
      throw InvalidInput("cannot restrict: element " + to_string(id) +
                         " is not in the source set");
    map.push_back(*index);
  }
  return map;
}

}  // namespace

Tournament restrict(const Tournament& t, const ElementSet& subset) {
  auto map = source_indices(t.elements(), subset);
  return Tournament::from_predicate(subset, [&](std::size_t i, std::size_t j) {
    return t.prefers(map[i], map[j]);
  });
}

Ranking restrict(const Ranking& r, const ElementSet& subset) {
  auto map = source_indices(r.elements(), subset);
  std::vector<std::size_t> order(subset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return r.position(map[a]) < r.position(map[b]);
  });
  return Ranking::from_indices(subset, std::move(order));
}

Partition restrict(const Partition& p, const ElementSet& subset) {
  auto map = source_indices(p.elements(), subset);
  std::vector<int> labels;
  labels.reserve(map.size());
  for (std::size_t index : map) labels.push_back(p.label(index));
  return Partition(subset, std::move(labels));
}

}  // namespace prefsort
