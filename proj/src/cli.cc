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

#include "prefsort/cli.h"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <functional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "prefsort/bench.h"
#include "prefsort/errors.h"
#include "prefsort/exact.h"
#include "prefsort/io.h"
#include "prefsort/loss.h"
#include "prefsort/oracle.h"
#include "prefsort/qsrank.h"

namespace prefsort {

namespace {

using Json = nlohmann::ordered_json;

struct Result {
  Json report;
  std::string human;
  int code = kExitOk;
};

struct LoadedFile {
  std::string path;
  std::string content;
};

class Session {
 public:
  explicit Session(const RunConfig& config) : config_(config) {
    report_["command"] = config.command;
    report_["seed"] = config.seed;
    report_["limits"] = {{"exact_n", config.limits.exact_n},
                         {"brute_n", config.limits.brute_n},
                         {"max_comparisons", config.limits.max_comparisons}};
    report_["inputs"] = Json::array();
  }

  // Reads a file and records its digest in the report.
  std::string load(const std::string& role, const std::string& path) {
    if (path.empty()) throw InvalidInput("missing --" + role + " file");
    std::string content = read_file(path);
    report_["inputs"].push_back(
        {{"role", role}, {"path", path}, {"sha256", sha256_hex(content)}});
    return content;
  }

  Json& report() { return report_; }
  const RunConfig& config() const { return config_; }

 private:
  const RunConfig& config_;
  Json report_;
};

Json ids_json(std::span<const ElementId> ids) {
  Json out = Json::array();
  for (ElementId id : ids) out.push_back(id.value);
  return out;
}

std::string ids_lines(std::span<const ElementId> ids) {
  std::string out;
  for (ElementId id : ids) out += to_string(id) + "\n";
  return out;
}

ExactLimits exact_limits(const RunConfig& c) { return {c.limits.exact_n}; }
OracleLimits oracle_limits(const RunConfig& c) { return {c.limits.brute_n}; }

// --- rank / topk ------------------------------------------------------------------

Result run_rank(Session& s, bool topk) {
  const RunConfig& c = s.config();
  const Tournament h = parse_tournament(s.load("input", c.input));
  const std::uint64_t trials = c.trials == 0 ? 1 : c.trials;
  if (topk && (c.k < 1 || c.k > h.size()))
    throw InvalidInput("--k must lie in [1, " + std::to_string(h.size()) + "]");

  RankOptions options;
  options.trace = c.trace;
  options.max_comparisons = c.limits.max_comparisons;
  const RandomSource root(c.seed);
  RankResult first;
  std::vector<std::uint64_t> counts;
  for (std::uint64_t t = 0; t < trials; ++t) {
    RandomSource rng = t == 0 ? root : root.derive(t);
    RankOptions o = options;
    o.trace = options.trace && t == 0;
    RankResult r = topk ? quicksort_topk(h, c.k, rng, c.fallback, o)
                        : quicksort_rank(h, rng, o);
    counts.push_back(r.comparisons);
    if (t == 0) first = std::move(r);
  }

  Result out;
  Json stats;
  stats["n"] = h.size();
  if (topk) {
    stats["k"] = c.k;
    stats["fallback"] = c.fallback;
  }
  stats["seed"] = c.seed;
  stats["comparisons"] = first.comparisons;
  if (trials > 1) {
    std::uint64_t total = 0;
    for (auto x : counts) total += x;
    stats["trials"] = trials;
    stats["mean_comparisons"] = static_cast<double>(total) / static_cast<double>(trials);
    stats["min_comparisons"] = *std::min_element(counts.begin(), counts.end());
    stats["max_comparisons"] = *std::max_element(counts.begin(), counts.end());
  }
  if (c.report_comparisons) stats["comparisons_per_trial"] = counts;
  if (c.trace) {
    Json trace = Json::array();
    for (const auto& e : first.pivot_trace)
      trace.push_back({{"pivot", e.pivot.value}, {"subarray", ids_json(e.subarray)}});
    stats["pivot_trace"] = std::move(trace);
  }
  out.report[topk ? "prefix" : "ranking"] = ids_json(first.prefix);
  for (auto& [key, value] : stats.items()) out.report[key] = value;
  out.human = ids_lines(first.prefix) + "# " + stats.dump() + "\n";
  return out;
}

// --- eval ----------------------------------------------------------------------------

std::string weight_kind_of(const GroundTruth& truth) {
  if (const auto* r = std::get_if<RankingTruth>(&truth)) return to_string(r->weight.kind());
  return "bipartite";
}

Result run_eval(Session& s) {
  const RunConfig& c = s.config();
  if (c.input.empty() == c.ranking.empty())
    throw InvalidInput("eval needs exactly one of --input and --ranking");
  GroundTruth truth = parse_truth(s.load("truth", c.truth));
  if (!c.normalizer.empty()) {
    auto* p = std::get_if<PartitionTruth>(&truth);
    if (!p) throw InvalidInput("--normalizer applies only to partition ground truths");
    p->normalizer = parse_normalizer(c.normalizer);
  }
  std::optional<Tournament> h;
  std::optional<Ranking> sigma;
  if (!c.input.empty()) {
    h = parse_tournament(s.load("input", c.input));
  } else {
    sigma = parse_ranking(s.load("ranking", c.ranking));
  }
  const Rational loss =
      h ? loss_against<Rational>(*h, truth) : loss_against<Rational>(*sigma, truth);

  Result out;
  Json& r = out.report;
  r["subject"] = h ? "tournament" : "ranking";
  r["loss"] = to_string(loss);
  r["loss_value"] = loss.get_d();
  const auto* p = std::get_if<PartitionTruth>(&truth);
  r["normalizer"] = to_string(p ? p->normalizer.kind : Normalizer::kBinomial);
  r["n"] = truth_elements(truth).size();
  r["weight_kind"] = weight_kind_of(truth);
  std::ostringstream human;
  human << "loss: " << to_string(loss) << " (" << loss.get_d() << ")\n"
        << "normalizer: " << r["normalizer"].get<std::string>() << "\n"
        << "n: " << r["n"].get<std::size_t>() << "\n"
        << "weight_kind: " << r["weight_kind"].get<std::string>() << "\n";
  if (sigma && p && p->tau_star.positives() > 0 &&
      p->tau_star.positives() < p->tau_star.size()) {
    const Rational a = auc(*sigma, p->tau_star);
    r["auc"] = to_string(a);
    human << "auc: " << to_string(a) << "\n";
  }
  if (c.expected) {
    if (!h) throw InvalidInput("--expected needs a tournament --input");
    const Rational e = expected_loss_exact(*h, truth, exact_limits(c));
    r["expected_quicksort_loss"] = to_string(e);
    human << "expected_quicksort_loss: " << to_string(e) << "\n";
  }
  if (c.trials > 0) {
    if (!h) throw InvalidInput("--trials needs a tournament --input");
    const LossEstimate est =
        estimate_expected_loss(*h, truth, c.trials, c.seed, c.threads);
    r["estimate"] = {{"mean", est.mean},
                     {"standard_error", est.standard_error},
                     {"trials", est.trials}};
    human << "estimate: " << est.mean << " +- " << est.standard_error << " ("
          << est.trials << " trials)\n";
  }
  out.human = human.str();
  return out;
}

// --- verify --------------------------------------------------------------------------

struct Tally {
  std::size_t instances = 0;
  IdentityReport identities;
};

void check_le(IdentityReport& report, const Rational& lhs, const Rational& rhs,
              const std::string& what) {
  ++report.checked;
  if (lhs > rhs) {
    ++report.violations;
    report.details.push_back(what + ": " + to_string(lhs) + " > " + to_string(rhs));
  }
}

void check_eq(IdentityReport& report, const Rational& lhs, const Rational& rhs,
              const std::string& what) {
  ++report.checked;
  if (lhs != rhs) {
    ++report.violations;
    report.details.push_back(what + ": " + to_string(lhs) + " != " + to_string(rhs));
  }
}

std::string describe(const Tournament& h) {
  std::string bits;
  for (std::size_t i = 0; i < h.size(); ++i)
    for (std::size_t j = i + 1; j < h.size(); ++j) bits += h.prefers(i, j) ? '1' : '0';
  return "h=" + bits;
}

std::vector<WeightFunction> weights_for(std::size_t n, RandomSource& rng, bool all) {
  std::vector<WeightFunction> out{WeightFunction::constant(n)};
  if (all) {
    for (std::size_t k = 1; k < n; ++k) {
      out.push_back(WeightFunction::top_k(n, k));
      out.push_back(WeightFunction::bipartite(n, k));
    }
    out.push_back(random_admissible_weight(n, rng));
    return out;
  }
  switch (rng.uniform_index(4)) {
    case 0: break;
    case 1: out[0] = WeightFunction::top_k(n, 1 + rng.uniform_index(n)); break;
    case 2: out[0] = WeightFunction::bipartite(n, 1 + rng.uniform_index(n)); break;
    default: out[0] = random_admissible_weight(n, rng); break;
  }
  return out;
}

// Runs `check` on one tournament; `exhaustive` selects all ground truths of
// the instance instead of one random draw.
void verify_instance(const std::string& check, const Tournament& h, bool exhaustive,
                     RandomSource& rng, const ExactLimits& limits, Tally& tally) {
  ++tally.instances;
  const std::size_t n = h.size();
  const ElementSet& e = h.elements();
  ExactModel model(h, limits);
  IdentityReport& rep = tally.identities;
  if (check == "thm2-loss") {
    std::vector<Partition> partitions;
    if (exhaustive) {
      for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        std::vector<int> labels(n);
        for (std::size_t i = 0; i < n; ++i) labels[i] = (mask >> i) & 1u;
        partitions.emplace_back(e, labels);
      }
    } else {
      partitions.push_back(random_partition(e, rng));
    }
    for (const Partition& tau : partitions) {
      const Rational lhs = model.expected_loss(PartitionTruth{tau, {}});
      check_eq(rep, lhs, loss_bipartite<Rational>(h, tau).value, describe(h));
    }
  } else if (check == "thm1") {
    const Ranking sigma = exhaustive ? Ranking::identity(e) : random_ranking(e, rng);
    for (const WeightFunction& w : weights_for(n, rng, exhaustive)) {
      const Rational lhs = model.expected_loss(RankingTruth{sigma, w});
      check_le(rep, lhs, 2 * loss_pref<Rational>(h, sigma, w).value,
               describe(h) + " weight=" + to_string(w.kind()));
    }
  } else if (check == "lemma1") {
    PairFunction ones(n, Rational(1)), z(n);
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = u + 1; v < n; ++v) z(u, v) = z(v, u) = static_cast<long>(rng.uniform_index(10));
    rep.merge(check_pair_decomposition(model, ones));
    rep.merge(check_pair_decomposition(model, z));
    const Ranking sigma = random_ranking(e, rng);
    for (const WeightFunction& w : weights_for(n, rng, false))
      rep.merge(check_alpha_decomposition(model, delta(sigma, w)));
    rep.merge(check_decided_once(model));
  } else if (check == "beta-gamma") {
    const Ranking sigma = exhaustive ? Ranking::identity(e) : random_ranking(e, rng);
    for (const WeightFunction& w : weights_for(n, rng, exhaustive))
      rep.merge(check_beta_gamma(h, delta(sigma, w)));
  } else {
    throw InvalidInput("unknown check '" + check +
                       "' (expected thm1, thm2-loss, lemma1 or beta-gamma)");
  }
}

Result run_verify(Session& s) {
  const RunConfig& c = s.config();
  if (c.exhaustive.has_value() == c.random.has_value())
    throw InvalidInput("verify needs exactly one of --exhaustive and --random");
  const ExactLimits limits = exact_limits(c);
  RandomSource rng(c.seed);
  Tally tally;
  std::size_t n = c.exhaustive ? *c.exhaustive : c.n;
  if (n < 2) throw InvalidInput("verify needs n >= 2");
  if (n > limits.max_n)
    throw ResourceLimitExceeded("n=" + std::to_string(n) + " exceeds the exact-mode limit " +
                                std::to_string(limits.max_n));
  if (c.exhaustive) {
    const std::size_t pairs = n * (n - 1) / 2;
    if (pairs > 24)
      throw ResourceLimitExceeded("exhaustive enumeration over 2^" + std::to_string(pairs) +
                                  " tournaments is too large");
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << pairs); ++bits)
      verify_instance(c.check, tournament_from_bits(n, bits), true, rng, limits, tally);
  } else {
    for (std::uint64_t t = 0; t < *c.random; ++t)
      verify_instance(c.check, random_tournament(n, rng), false, rng, limits, tally);
  }
  Result out;
  const IdentityReport& rep = tally.identities;
  out.report["check"] = c.check;
  out.report["n"] = n;
  out.report["instances"] = tally.instances;
  out.report["identities_checked"] = rep.checked;
  out.report["violations"] = rep.violations;
  Json details = Json::array();
  for (std::size_t i = 0; i < std::min<std::size_t>(rep.details.size(), 20); ++i)
    details.push_back(rep.details[i]);
  out.report["violation_details"] = std::move(details);
  out.human = "identities checked: " + std::to_string(rep.checked) +
              ", violations: " + std::to_string(rep.violations) + "\n";
  for (std::size_t i = 0; i < std::min<std::size_t>(rep.details.size(), 20); ++i)
    out.human += "  " + rep.details[i] + "\n";
  out.code = rep.ok() ? kExitOk : kExitIdentity;
  return out;
}

// --- oracle --------------------------------------------------------------------------

Json regret_json(const RegretValue& r) {
  return {{"expected", to_string(r.expected)},
          {"comparator", to_string(r.comparator)},
          {"regret", to_string(r.regret)}};
}

Result run_oracle(Session& s) {
  const RunConfig& c = s.config();
  Result out;
  Json& r = out.report;
  r["mode"] = c.mode;
  std::ostringstream human;
  if (c.mode == "mfas") {
    const Tournament h = parse_tournament(s.load("input", c.input));
    const WeightFunction w = parse_weight_spec(c.weight, h.size());
    const OptimalRanking best = optimal_ranking(h, w, oracle_limits(c));
    const auto ids = best.ranking.ids_in_order();
    r["weight"] = c.weight;
    r["ranking"] = ids_json(ids);
    r["loss"] = to_string(best.loss);
    r["weighted_sum"] = to_string(best.weighted_sum);
    human << ids_lines(ids) << "# loss " << to_string(best.loss) << "\n";
  } else if (c.mode == "regret") {
    const Tournament h = parse_tournament(s.load("input", c.input));
    const GroundTruthDistribution d = parse_distribution(s.load("dist", c.dist));
    const auto alg = quicksort_procedure(exact_limits(c));
    const RegretValue rank = regret_rank(alg, h, d, oracle_limits(c));
    const RegretValue cls = regret_class(h, d);
    const RegretValue rank_p = regret_rank_prime(alg, h, d, oracle_limits(c));
    const RegretValue cls_p = regret_class_prime(h, d);
    r["regret_rank"] = regret_json(rank);
    r["regret_class"] = regret_json(cls);
    r["regret_rank_prime"] = regret_json(rank_p);
    r["regret_class_prime"] = regret_json(cls_p);
    human << "regret_rank: " << to_string(rank.regret) << "\n"
          << "regret_class: " << to_string(cls.regret) << "\n"
          << "regret_rank_prime: " << to_string(rank_p.regret) << "\n"
          << "regret_class_prime: " << to_string(cls_p.regret) << "\n";
    // The bound regret_rank <= regret_class is asserted only where it is
    // proven: fixed subset, bipartite, n choose 2 normalization.
    bool applies = d.fixed_subset() && d.bipartite();
    for (const Outcome& o : d.support())
      if (applies && std::get<PartitionTruth>(o.truth).normalizer.kind != Normalizer::kBinomial)
        applies = false;
    r["bound_checked"] = applies;
    if (applies) {
      const bool holds = rank.regret <= cls.regret;
      r["bound_holds"] = holds;
      human << "bound regret_rank <= regret_class: " << (holds ? "holds" : "VIOLATED") << "\n";
      if (!holds) out.code = kExitIdentity;
    }
  } else if (c.mode == "iia") {
    const GroundTruthDistribution d = parse_distribution(s.load("dist", c.dist));
    const IiaReport rep = check_pairwise_iia(d);
    r["iia"] = rep.ok;
    r["comparisons"] = rep.comparisons;
    Json v = Json::array();
    for (const auto& x : rep.violations)
      v.push_back({{"pair", {x.u.value, x.v.value}},
                   {"first", ids_json(x.first.ids())},
                   {"second", ids_json(x.second.ids())},
                   {"first_value", to_string(x.first_value)},
                   {"second_value", to_string(x.second_value)}});
    r["violations"] = std::move(v);
    human << "pairwise IIA: " << (rep.ok ? "holds" : "violated") << " ("
          << rep.comparisons << " comparisons, " << rep.violations.size()
          << " violations)\n";
    for (const auto& x : rep.violations)
      human << "  pair (" << to_string(x.u) << "," << to_string(x.v) << "): "
            << to_string(x.first_value) << " vs " << to_string(x.second_value) << "\n";
  } else if (c.mode == "fneg") {
    FSampleOptions o;
    o.seed = c.seed;
    if (c.trials > 0) o.float_samples = o.rational_samples = c.trials;
    const FReport rep = f_negativity_sample(o);
    r["samples"] = rep.samples;
    r["evaluations"] = rep.evaluations;
    r["max_f_float"] = rep.max_float;
    r["max_f_exact"] = to_string(rep.max_exact);
    r["float_violations"] = rep.float_violations;
    r["exact_violations"] = rep.exact_violations;
    r["invalid_samples"] = rep.invalid_samples;
    human << "samples: " << rep.samples << ", evaluations: " << rep.evaluations << "\n"
          << "max F (float): " << rep.max_float << "\n"
          << "max F (exact): " << to_string(rep.max_exact) << "\n"
          << "violations: " << rep.float_violations + rep.exact_violations
          << ", invalid samples: " << rep.invalid_samples << "\n";
    if (!rep.ok()) out.code = kExitIdentity;
  } else if (c.mode == "lowerbound") {
    std::function<Ranking(const Tournament&)> alg;
    if (c.algorithm == "identity") {
      alg = [](const Tournament& h) { return Ranking::identity(h.elements()); };
    } else if (c.algorithm == "reverse") {
      alg = [](const Tournament& h) {
        std::vector<std::size_t> order(h.size());
        for (std::size_t i = 0; i < h.size(); ++i) order[i] = h.size() - 1 - i;
        return Ranking::from_indices(h.elements(), order);
      };
    } else {
      throw InvalidInput("unknown --algorithm '" + c.algorithm +
                         "' (expected identity or reverse)");
    }
    const LowerBoundResult lb = lower_bound_adversary(alg);
    r["algorithm"] = c.algorithm;
    r["output"] = ids_json(lb.output.ids_in_order());
    r["labels"] = lb.tau_star.labels();
    r["case"] = lb.adversary_case;
    r["regret_rank"] = to_string(lb.regret_rank);
    r["regret_class"] = to_string(lb.regret_class);
    r["ratio"] = to_string(lb.ratio);
    human << "output:";
    for (ElementId id : lb.output.ids_in_order()) human << " " << to_string(id);
    human << "\ncase: " << lb.adversary_case << "\nregret_rank: " << to_string(lb.regret_rank)
          << "\nregret_class: " << to_string(lb.regret_class)
          << "\nratio: " << to_string(lb.ratio) << "\n";
    if (lb.ratio < 2) out.code = kExitIdentity;
  } else {
    throw InvalidInput("unknown --mode '" + c.mode +
                       "' (expected mfas, regret, iia, fneg or lowerbound)");
  }
  out.human = human.str();
  return out;
}

// --- bench ---------------------------------------------------------------------------

std::vector<ScalingCell> parse_cells(const std::string& text) {
  std::vector<ScalingCell> cells;
  std::stringstream in(text);
  std::string item;
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty() || s[0] == '-')
      throw InvalidInput("bad --cells entry '" + item + "' (expected n or n:k)");
    return static_cast<std::size_t>(v);
  };
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    const auto colon = item.find(':');
    ScalingCell cell;
    cell.n = number(item.substr(0, colon));
    if (colon != std::string::npos) cell.k = number(item.substr(colon + 1));
    cells.push_back(cell);
  }
  if (cells.empty()) throw InvalidInput("--cells lists no cells");
  return cells;
}

Json fit_json(const LinearFit& fit, std::initializer_list<const char*> names) {
  Json j;
  std::size_t i = 0;
  for (const char* name : names) j[name] = fit.coefficients[i++];
  j["residuals"] = fit.residuals;
  j["rms"] = fit.rms;
  return j;
}

Result run_bench(Session& s, Json& footer) {
  const RunConfig& c = s.config();
  ScalingOptions o;
  o.cells = parse_cells(c.cells);
  o.trials = c.trials == 0 ? 30 : c.trials;
  o.seed = c.seed;
  o.kind = parse_tournament_kind(c.kind);
  o.density = c.density;
  o.fallback = c.fallback;
  o.max_comparisons = c.limits.max_comparisons;
  o.threads = c.threads;
  const ScalingReport rep = run_scaling(o);

  Result out;
  Json& r = out.report;
  r["kind"] = c.kind;
  r["density"] = c.density;
  r["trials"] = o.trials;
  r["fallback"] = c.fallback;
  Json rows = Json::array();
  Json times = Json::array();
  std::ostringstream table;
  table << "n\tk\ttrials\tmean\tstddev\tseconds\n";
  for (const ScalingRow& row : rep.rows) {
    Json j{{"n", row.n}, {"k", row.k ? Json(*row.k) : Json(nullptr)},
           {"trials", row.trials}, {"mean", row.mean}, {"stddev", row.stddev}};
    if (o.kind == TournamentKind::kTransitive) j["order_mismatches"] = row.order_mismatches;
    rows.push_back(std::move(j));
    times.push_back(row.seconds);
    table << row.n << "\t" << (row.k ? std::to_string(*row.k) : "-") << "\t" << row.trials
          << "\t" << row.mean << "\t" << row.stddev << "\t" << row.seconds << "\n";
  }
  r["rows"] = std::move(rows);
  r["total_comparisons"] = rep.total_comparisons;
  Json fits = Json::object();
  if (rep.full_fit) {
    fits["full"] = fit_json(*rep.full_fit, {"a_n_ln_n", "b"});
    table << "# fit full: mean ~ " << rep.full_fit->coefficients[0] << " n ln n + "
          << rep.full_fit->coefficients[1] << " (rms " << rep.full_fit->rms << ")\n";
  }
  if (rep.topk_fit) {
    fits["topk"] = fit_json(*rep.topk_fit, {"c1_n", "c2_k_ln_k"});
    table << "# fit top-k: mean ~ " << rep.topk_fit->coefficients[0] << " n + "
          << rep.topk_fit->coefficients[1] << " k ln k (rms " << rep.topk_fit->rms << ")\n";
  }
  r["fits"] = std::move(fits);
  footer["cell_seconds"] = std::move(times);
  out.human = table.str();
  return out;
}

}  // namespace

int dispatch(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  try {
    if (config.limits.exact_n == 0 || config.limits.brute_n == 0)
      throw InvalidInput("limits must be positive");
    Session session(config);
    Json footer;
    Result result;
    if (config.command == "rank") {
      result = run_rank(session, false);
    } else if (config.command == "topk") {
      result = run_rank(session, true);
    } else if (config.command == "eval") {
      result = run_eval(session);
    } else if (config.command == "verify") {
      result = run_verify(session);
    } else if (config.command == "oracle") {
      result = run_oracle(session);
    } else if (config.command == "bench") {
      result = run_bench(session, footer);
    } else {
      throw InvalidInput("unknown subcommand '" + config.command + "'");
    }
    footer["elapsed_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (config.format == OutputFormat::kStructured) {
      Json doc;
      doc["report"] = std::move(session.report());
      for (auto& [key, value] : result.report.items()) doc["report"][key] = value;
      doc["exit_code"] = result.code;
      doc["footer"] = std::move(footer);
      out << doc.dump(2) << "\n";
    } else {
      out << result.human;
    }
    return result.code;
  } catch (const IdentityViolation& e) {
    err << "identity violation: " << e.what() << "\n";
    return kExitIdentity;
  } catch (const ResourceLimitExceeded& e) {
    err << "resource limit: " << e.what() << "\n";
    return kExitResource;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
}

namespace {

template <class T>
void env_default(const char* name, T& target) {
  const char* value = std::getenv(name);
  if (value == nullptr || *value == '\0') return;
  try {
    std::size_t used = 0;
    const unsigned long long parsed = std::stoull(value, &used);
    if (used != std::string(value).size() || value[0] == '-') throw std::invalid_argument(name);
    target = static_cast<T>(parsed);
  } catch (const std::exception&) {
    throw InvalidInput(std::string("environment variable ") + name +
                       " must be a non-negative integer");
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  RunConfig config;
  try {
    env_default("PREFSORT_EXACT_LIMIT", config.limits.exact_n);
    env_default("PREFSORT_BRUTE_LIMIT", config.limits.brute_n);
    env_default("PREFSORT_MAX_COMPARISONS", config.limits.max_comparisons);
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }

  CLI::App app{"Ranking from pairwise preferences with QuickSort"};
  app.require_subcommand(1);
  std::string format = "human";
  app.add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"human", "structured"}));
  app.add_option("--seed", config.seed, "Random seed");
  app.add_option("--threads", config.threads, "Worker thread cap")->check(CLI::PositiveNumber);
  app.add_option("--exact-limit", config.limits.exact_n, "Exact-mode size limit");
  app.add_option("--brute-limit", config.limits.brute_n, "Brute-force size limit");
  app.add_option("--max-comparisons", config.limits.max_comparisons,
                 "Comparison cap, 0 for none");

  auto common = [&](CLI::App* sub) {
    sub->add_option("--format", format)->check(CLI::IsMember({"human", "structured"}));
    sub->add_option("--seed", config.seed, "Random seed");
    sub->add_option("--threads", config.threads)->check(CLI::PositiveNumber);
    sub->add_option("--exact-limit", config.limits.exact_n);
    sub->add_option("--brute-limit", config.limits.brute_n);
    sub->add_option("--max-comparisons", config.limits.max_comparisons);
  };

  std::string report;
  auto rank_options = [&](CLI::App* sub) {
    common(sub);
    sub->add_option("--input", config.input, "Tournament file")->required();
    sub->add_option("--trials", config.trials, "Number of runs");
    sub->add_option("--report", report, "'comparisons' lists the count of every trial")
        ->check(CLI::IsMember({"comparisons"}));
    sub->add_flag("--trace", config.trace, "Include the pivot trace");
  };
  CLI::App* rank = app.add_subcommand("rank", "Rank a tournament with QuickSort");
  rank_options(rank);
  CLI::App* topk = app.add_subcommand("topk", "Top-k prefix with pruned QuickSort");
  rank_options(topk);
  topk->add_option("--k", config.k, "Prefix length")->required();
  topk->add_flag("--fallback", config.fallback, "Sort fully when 8k >= sub-array size");

  CLI::App* eval = app.add_subcommand("eval", "Evaluate a loss");
  common(eval);
  eval->add_option("--input", config.input, "Tournament file");
  eval->add_option("--ranking", config.ranking, "Ranking file");
  eval->add_option("--truth", config.truth, "Ground-truth file")->required();
  eval->add_option("--normalizer", config.normalizer, "binomial, mixed-pairs or a rational");
  eval->add_flag("--expected", config.expected, "Exact expected QuickSort loss");
  eval->add_option("--trials", config.trials, "Monte Carlo trials");

  CLI::App* verify = app.add_subcommand("verify", "Check identities exactly");
  common(verify);
  verify->add_option("--check", config.check, "thm1, thm2-loss, lemma1 or beta-gamma")
      ->required()
      ->check(CLI::IsMember({"thm1", "thm2-loss", "lemma1", "beta-gamma"}));
  verify->add_option("--exhaustive", config.exhaustive, "All tournaments on n elements");
  verify->add_option("--random", config.random, "Number of random instances");
  verify->add_option("--n", config.n, "Instance size for --random");

  CLI::App* oracle = app.add_subcommand("oracle", "Brute-force optima and regret");
  common(oracle);
  oracle->add_option("--mode", config.mode)
      ->required()
      ->check(CLI::IsMember({"mfas", "regret", "iia", "fneg", "lowerbound"}));
  oracle->add_option("--input", config.input, "Tournament file");
  oracle->add_option("--dist", config.dist, "Distribution file");
  oracle->add_option("--weight", config.weight, "constant, top-k:K or bipartite:K");
  oracle->add_option("--trials", config.trials, "Samples per kind (fneg)");
  oracle->add_option("--algorithm", config.algorithm, "identity or reverse (lowerbound)");

  CLI::App* bench = app.add_subcommand("bench", "Comparison-count scaling");
  common(bench);
  bench->add_option("--cells", config.cells, "Comma-separated n or n:k")->required();
  bench->add_option("--trials", config.trials, "Trials per cell");
  bench->add_option("--kind", config.kind, "uniform-random, transitive or planted-cycle");
  bench->add_option("--density", config.density, "Reversal density (planted-cycle)");
  bench->add_flag("--fallback", config.fallback, "Sort fully when 8k >= sub-array size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? kExitOk : kExitInvalid;
  }
  for (CLI::App* sub : app.get_subcommands()) config.command = sub->get_name();
  config.format = format == "structured" ? OutputFormat::kStructured : OutputFormat::kHuman;
  config.report_comparisons = report == "comparisons";
  return dispatch(config, out, err);
}

}  // namespace prefsort
