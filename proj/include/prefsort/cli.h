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

#ifndef PREFSORT_CLI_H_
#define PREFSORT_CLI_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace prefsort {

enum ExitCode : int {
  kExitOk = 0,
  kExitInvalid = 1,    // bad flags, unreadable or invalid input
  kExitIdentity = 2,   // a checked identity or inequality failed
  kExitResource = 3,   // size or comparison limit exceeded
};

enum class OutputFormat { kHuman, kStructured };

struct RunLimits {
  std::size_t exact_n = 8;           // PREFSORT_EXACT_LIMIT
  std::size_t brute_n = 10;          // PREFSORT_BRUTE_LIMIT
  std::uint64_t max_comparisons = 0; // PREFSORT_MAX_COMPARISONS, 0 = none
};

// Parsed command line. Fields not used by a subcommand keep their defaults.
struct RunConfig {
  std::string command;  // rank, topk, eval, verify, oracle, bench
  OutputFormat format = OutputFormat::kHuman;
  std::uint64_t seed = 1;
  RunLimits limits;
  unsigned threads = 1;

  std::string input;    // tournament file
  std::string ranking;  // ranking file (eval)
  std::string truth;    // ground-truth file (eval)
  std::string dist;     // distribution file (oracle)
  std::string weight = "constant";
  std::string normalizer;  // overrides the truth file's normalizer

  std::size_t k = 0;
  bool fallback = false;
  std::uint64_t trials = 0;  // 0: the command's default
  bool report_comparisons = false;
  bool trace = false;
  bool expected = false;  // eval: exact expected QuickSort loss

  std::string check;  // verify
  std::optional<std::size_t> exhaustive;
  std::optional<std::uint64_t> random;
  std::size_t n = 5;

  std::string mode;                  // oracle
  std::string algorithm = "identity";  // oracle lowerbound

  std::string cells;  // bench
  std::string kind = "uniform-random";
  double density = 0.0;
};

// Runs one configured command, writing the report to `out` and diagnostics
// to `err`. Returns an ExitCode.
int dispatch(const RunConfig& config, std::ostream& out, std::ostream& err);

// Parses argv (argv[0] is the program name) and dispatches.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace prefsort

#endif  // PREFSORT_CLI_H_
