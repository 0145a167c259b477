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

#include "prefsort/io.h"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "prefsort/errors.h"

namespace prefsort {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot read file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  EVP_Digest(data.data(), data.size(), digest.data(), &length, EVP_sha256(),
             nullptr);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 15]);
  }
  return out;
}

namespace {

bool looks_like_json(std::string_view text) {
  auto it = std::find_if(text.begin(), text.end(),
                         [](char c) { return !std::isspace(static_cast<unsigned char>(c)); });
  return it != text.end() && *it == '{';
}

std::vector<std::string_view> split_words(std::string_view line) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) words.push_back(line.substr(i, j - i));
    i = j;
  }
  return words;
}

std::optional<std::uint64_t> parse_uint(std::string_view word) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(word.data(), word.data() + word.size(), value);
  if (ec != std::errc() || ptr != word.data() + word.size()) return std::nullopt;
  return value;
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const int line =
        1 + static_cast<int>(std::count(text.begin(), text.begin() + upto, '\n'));
    throw ParseError("malformed JSON: " + std::string(e.what()), line);
  }
}

const json& field(const json& doc, const char* name) {
  if (!doc.is_object() || !doc.contains(name))
    throw InvalidInput(std::string("missing field '") + name + "'");
  return doc.at(name);
}

std::string field_error(const char* name, const std::string& what) {
  return std::string("field '") + name + "': " + what;
}

Rational rational_of(const json& value, const char* name) {
  try {
    if (value.is_number_integer()) return Rational(value.get<long>());
    if (value.is_number_float()) return parse_rational(value.dump());
    if (value.is_string()) return parse_rational(value.get<std::string>());
  } catch (const InvalidInput& e) {
    throw InvalidInput(field_error(name, e.what()));
  }
  throw InvalidInput(field_error(name, "expected a number or rational string"));
}

std::vector<ElementId> ids_of(const json& value, const char* name) {
  if (!value.is_array()) throw InvalidInput(field_error(name, "expected an array"));
  std::vector<ElementId> ids;
  for (const json& v : value) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
      throw InvalidInput(field_error(name, "element ids must be non-negative integers"));
    ids.emplace_back(v.get<std::uint64_t>());
  }
  return ids;
}

// Element set as listed in a document. Per-element data (matrix rows,
// labels) follows the listed order; slot[i] is the canonical index of the
// i-th listed id.
struct Listed {
  ElementSet set;
  std::vector<std::size_t> slot;
};

std::vector<ElementId> range_ids(std::size_t n) {
  const ElementSet e = ElementSet::range(n);
  return {e.ids().begin(), e.ids().end()};
}

Listed listed_from(const std::vector<ElementId>& ids) {
  Listed l{ElementSet(ids), {}};
  for (ElementId id : ids) l.slot.push_back(l.set.require_index(id));
  return l;
}

Listed elements_of(const json& doc, std::size_t default_size) {
  if (doc.contains("elements")) return listed_from(ids_of(doc.at("elements"), "elements"));
  return listed_from(range_ids(default_size));
}

std::vector<std::vector<int>> to_canonical(const Listed& l,
                                           const std::vector<std::vector<int>>& m) {
  const std::size_t n = l.slot.size();
  if (m.size() != n) return m;  // the Tournament constructor reports the size
  std::vector<std::vector<int>> out(n, std::vector<int>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (m[i].size() != n) return m;
    for (std::size_t j = 0; j < n; ++j) out[l.slot[i]][l.slot[j]] = m[i][j];
  }
  return out;
}

std::vector<int> labels_of(const json& value) {
  if (!value.is_array()) throw InvalidInput(field_error("labels", "expected an array"));
  std::vector<int> labels;
  for (const json& v : value) {
    if (!v.is_number_integer() || (v.get<long>() != 0 && v.get<long>() != 1))
      throw InvalidInput(field_error("labels", "labels must be 0 or 1"));
    labels.push_back(v.get<int>());
  }
  return labels;
}

WeightFunction weight_of(const json& value, std::size_t n) {
  if (!value.is_object()) throw InvalidInput(field_error("weight", "expected an object"));
  const std::string kind = value.value("kind", std::string("constant"));
  auto k_of = [&] {
    const json& k = field(value, "k");
    if (!k.is_number_integer() || k.get<long>() < 0)
      throw InvalidInput(field_error("k", "expected a non-negative integer"));
    return static_cast<std::size_t>(k.get<long>());
  };
  WeightFunction w;
  if (kind == "constant") {
    w = WeightFunction::constant(n);
  } else if (kind == "top-k") {
    w = WeightFunction::top_k(n, k_of());
  } else if (kind == "bipartite") {
    w = WeightFunction::bipartite(n, k_of());
  } else if (kind == "score") {
    const json& s = field(value, "scores");
    if (!s.is_array()) throw InvalidInput(field_error("scores", "expected an array"));
    std::vector<Rational> scores;
    for (const json& x : s) scores.push_back(rational_of(x, "scores"));
    w = WeightFunction::score(std::move(scores));
  } else if (kind == "table") {
    const json& t = field(value, "table");
    if (!t.is_array()) throw InvalidInput(field_error("table", "expected an array"));
    std::vector<std::vector<Rational>> rows;
    for (const json& row : t) {
      if (!row.is_array()) throw InvalidInput(field_error("table", "rows must be arrays"));
      rows.emplace_back();
      for (const json& x : row) rows.back().push_back(rational_of(x, "table"));
    }
    w = WeightFunction::table(std::move(rows));
  } else {
    throw InvalidInput(field_error("kind", "unknown weight kind '" + kind + "'"));
  }
  if (w.size() != n)
    throw InvalidInput(field_error("weight", "domain size " + std::to_string(w.size()) +
                                                 " does not match " + std::to_string(n) +
                                                 " elements"));
  return w;
}

NormalizerSpec normalizer_of(const json& doc) {
  if (!doc.contains("normalizer")) return {};
  const json& v = doc.at("normalizer");
  if (v.is_string()) return parse_normalizer(v.get<std::string>());
  return {Normalizer::kCustom, rational_of(v, "normalizer")};
}

Ranking ranking_of(const ElementSet& elements, const json& value) {
  std::vector<ElementId> order = ids_of(value, "ranking");
  return Ranking::from_ids(elements, order);
}

// A ground truth object over `elements`.
GroundTruth truth_of(const json& doc, const Listed& listed) {
  const ElementSet& elements = listed.set;
  const bool has_labels = doc.contains("labels");
  const bool has_ranking = doc.contains("ranking");
  if (has_labels == has_ranking)
    throw InvalidInput("ground truth needs exactly one of 'labels' and 'ranking'");
  if (has_labels) {
    std::vector<int> labels = labels_of(doc.at("labels"));
    if (labels.size() != elements.size())
      throw InvalidInput(field_error("labels", "expected " +
                                                   std::to_string(elements.size()) +
                                                   " labels"));
    std::vector<int> canonical(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) canonical[listed.slot[i]] = labels[i];
    return PartitionTruth{Partition(elements, std::move(canonical)), normalizer_of(doc)};
  }
  Ranking sigma = ranking_of(elements, doc.at("ranking"));
  WeightFunction w = doc.contains("weight") ? weight_of(doc.at("weight"), elements.size())
                                            : WeightFunction::constant(elements.size());
  return RankingTruth{std::move(sigma), std::move(w)};
}

Tournament tournament_from_json(const json& doc) {
  const json& rows = field(doc, "prefers");
  if (!rows.is_array()) throw InvalidInput(field_error("prefers", "expected an array"));
  std::vector<std::vector<int>> matrix;
  for (const json& row : rows) {
    if (!row.is_array()) throw InvalidInput(field_error("prefers", "rows must be arrays"));
    matrix.emplace_back();
    for (const json& x : row) {
      if (!x.is_number_integer())
        throw InvalidInput(field_error("prefers", "entries must be 0 or 1"));
      matrix.back().push_back(x.get<int>());
    }
  }
  const Listed listed = elements_of(doc, matrix.size());
  return Tournament(listed.set, to_canonical(listed, matrix));
}

void require_valid(const Tournament& t) {
  const TournamentReport report = validate_tournament(t);
  if (report.ok) return;
  const PairViolation& v = report.violations.front();
  if (v.u == v.v)
    throw InvalidInput("diagonal entry for element " + to_string(v.u) + " must be 0");
  throw InvalidInput("inconsistent preference at pair {" + to_string(v.u) + "," +
                     to_string(v.v) + "}: h(u,v)=" + std::to_string(v.h_uv) +
                     ", h(v,u)=" + std::to_string(v.h_vu));
}

Tournament tournament_from_text(std::string_view text) {
  std::vector<std::pair<int, std::string_view>> lines;
  int number = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++number;
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    auto words = split_words(line);
    if (!words.empty() && words.front().front() != '#') lines.emplace_back(number, line);
    start = end + 1;
  }
  if (lines.empty()) throw ParseError("empty tournament file", 1);

  auto header = split_words(lines[0].second);
  if (header.size() != 2 || header[0] != "n" || !parse_uint(header[1]))
    throw ParseError("expected header 'n <count>'", lines[0].first);
  const std::size_t n = *parse_uint(header[1]);

  std::size_t next = 1;
  Listed listed = listed_from(range_ids(n));
  if (next < lines.size()) {
    auto words = split_words(lines[next].second);
    if (words.front() == "elements") {
      std::vector<ElementId> ids;
      for (std::size_t i = 1; i < words.size(); ++i) {
        auto id = parse_uint(words[i]);
        if (!id) throw ParseError("element ids must be non-negative integers", lines[next].first);
        ids.emplace_back(*id);
      }
      if (ids.size() != n)
        throw ParseError("expected " + std::to_string(n) + " element ids", lines[next].first);
      try {
        listed = listed_from(ids);
      } catch (const InvalidInput& e) {
        throw ParseError(e.what(), lines[next].first);
      }
      ++next;
    }
  }

  if (lines.size() - next != n)
    throw ParseError("expected " + std::to_string(n) + " matrix rows, found " +
                         std::to_string(lines.size() - next),
                     lines.size() > next ? lines.back().first : lines[0].first);
  std::vector<std::vector<int>> matrix(n);
  std::vector<int> row_line(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& [line_no, line] = lines[next + i];
    row_line[i] = line_no;
    auto words = split_words(line);
    std::string digits;
    if (words.size() == 1) {
      digits = std::string(words[0]);
    } else {
      for (auto w : words) {
        if (w.size() != 1) throw ParseError("matrix entries must be 0 or 1", line_no);
        digits += w;
      }
    }
    if (digits.size() != n)
      throw ParseError("row has " + std::to_string(digits.size()) + " entries, expected " +
                           std::to_string(n),
                       line_no);
    for (std::size_t j = 0; j < n; ++j) {
      if (digits[j] != '0' && digits[j] != '1')
        throw ParseError("matrix entries must be 0 or 1", line_no);
      matrix[i].push_back(digits[j] - '0');
    }
    if (matrix[i][i] != 0)
      throw ParseError("diagonal entry for element " +
                           to_string(listed.set.id(listed.slot[i])) + " must be 0",
                       line_no);
    // Pairs are complete once the later row is read.
    for (std::size_t j = 0; j < i; ++j)
      if (matrix[i][j] + matrix[j][i] != 1) {
        ElementId a = listed.set.id(listed.slot[j]), b = listed.set.id(listed.slot[i]);
        throw ParseError("inconsistent preference at pair {" + to_string(a) + "," +
                             to_string(b) + "}: M[" + to_string(a) + "][" + to_string(b) +
                             "]=" + std::to_string(matrix[j][i]) + ", M[" + to_string(b) +
                             "][" + to_string(a) + "]=" + std::to_string(matrix[i][j]),
                         line_no);
      }
  }
  return Tournament(listed.set, to_canonical(listed, matrix));
}

}  // namespace

Tournament parse_tournament(std::string_view text) {
  if (!looks_like_json(text)) return tournament_from_text(text);
  Tournament t = tournament_from_json(parse_json(text));
  require_valid(t);
  return t;
}

std::string format_tournament(const Tournament& t) {
  std::string out = "n " + std::to_string(t.size()) + "\n";
  if (!(t.elements() == ElementSet::range(t.size()))) {
    out += "elements";
    for (ElementId id : t.elements().ids()) out += " " + to_string(id);
    out += "\n";
  }
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (std::size_t j = 0; j < t.size(); ++j) {
      if (j > 0) out += ' ';
      out += t.prefers(i, j) ? '1' : '0';
    }
    out += '\n';
  }
  return out;
}

Ranking parse_ranking(std::string_view text) {
  if (looks_like_json(text)) {
    const json doc = parse_json(text);
    std::vector<ElementId> order = ids_of(field(doc, "ranking"), "ranking");
    ElementSet elements = doc.contains("elements")
                              ? ElementSet(ids_of(doc.at("elements"), "elements"))
                              : ElementSet(order);
    return Ranking::from_ids(std::move(elements), order);
  }
  std::vector<ElementId> order;
  for (auto word : split_words(text)) {
    auto id = parse_uint(word);
    if (!id) throw InvalidInput("ranking ids must be non-negative integers");
    order.emplace_back(*id);
  }
  return Ranking::from_ids(ElementSet(order), order);
}

WeightFunction parse_weight_spec(std::string_view spec, std::size_t n) {
  const std::size_t colon = spec.find(':');
  const std::string_view kind = spec.substr(0, colon);
  if (kind == "constant" && colon == std::string_view::npos)
    return WeightFunction::constant(n);
  if ((kind == "top-k" || kind == "bipartite") && colon != std::string_view::npos) {
    auto k = parse_uint(spec.substr(colon + 1));
    if (!k) throw InvalidInput("weight spec '" + std::string(spec) + "': bad k");
    return kind == "top-k" ? WeightFunction::top_k(n, *k) : WeightFunction::bipartite(n, *k);
  }
  throw InvalidInput("unknown weight spec '" + std::string(spec) +
                     "' (expected constant, top-k:K or bipartite:K)");
}

NormalizerSpec parse_normalizer(std::string_view spec) {
  if (spec == "binomial") return {};
  if (spec == "mixed-pairs") return {Normalizer::kMixedPairs, Rational(1)};
  Rational value = parse_rational(spec);
  if (value <= 0) throw InvalidInput("custom normalizer must be positive");
  return {Normalizer::kCustom, value};
}

GroundTruth parse_truth(std::string_view text) {
  const json doc = parse_json(text);
  std::size_t n = 0;
  if (doc.contains("labels") && doc.at("labels").is_array()) n = doc.at("labels").size();
  if (doc.contains("ranking") && doc.at("ranking").is_array()) n = doc.at("ranking").size();
  return truth_of(doc, elements_of(doc, n));
}

GroundTruthDistribution parse_distribution(std::string_view text) {
  const json doc = parse_json(text);
  const Listed universe = listed_from(ids_of(field(doc, "elements"), "elements"));
  const json& support = field(doc, "support");
  if (!support.is_array()) throw InvalidInput(field_error("support", "expected an array"));
  std::vector<Outcome> outcomes;
  for (std::size_t i = 0; i < support.size(); ++i) {
    const json& entry = support[i];
    try {
      Listed subset = entry.contains("elements")
                          ? listed_from(ids_of(entry.at("elements"), "elements"))
                          : universe;
      GroundTruth truth = truth_of(entry, subset);
      Rational p = rational_of(field(entry, "prob"), "prob");
      outcomes.push_back({std::move(subset.set), std::move(truth), std::move(p)});
    } catch (const InvalidInput& e) {
      throw InvalidInput("support entry " + std::to_string(i) + ": " + e.what());
    }
  }
  return GroundTruthDistribution(universe.set, std::move(outcomes));
}

}  // namespace prefsort
