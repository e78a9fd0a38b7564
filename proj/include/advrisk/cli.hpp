// Copyright 2026 The advrisk Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ADVRISK_CLI_HPP_
#define ADVRISK_CLI_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "advrisk/dataset.hpp"
#include "advrisk/geometry.hpp"
#include "advrisk/search.hpp"

namespace advrisk {

enum ExitCode : int {
  kExitOk = 0,
  kExitBadArguments = 2,
  kExitDataError = 3,
  kExitLpFailure = 4,
  kExitEnumerationCap = 5,
  kExitInternalError = 6,
};

enum class Command { kGenData, kExhaustive, kGenetic, kGencolW2, kCertify };

struct RunSpec {
  Command command = Command::kExhaustive;

  // Dataset source: exactly one of csv, cifar or synthetic.
  std::optional<std::filesystem::path> csv;
  std::optional<std::filesystem::path> cifar;
  int cifar_classes = 30;
  std::optional<SyntheticSpec> synthetic;
  // gen-data writes this dataset to `out`.
  SyntheticSpec generate;

  Metric metric = Metric::kEuclidean;
  std::vector<double> grid;  // epsilon or tau values

  std::size_t beta = 3;
  std::size_t samples = 0;  // 0: command default
  std::optional<RuleWeights> rule_weights;  // nullopt: command default
  double time_limit = 300.0;
  std::size_t stagnation = 50;
  std::uint64_t seed = 0;
  std::size_t max_configs = 50'000'000;
  std::size_t max_proposals = 0;
  bool stop_at_exhaustive = false;
  bool parallel_grid = false;
  bool export_pool = false;
  bool export_lp = false;

  // Output path prefix (gen-data: the CSV path).
  std::filesystem::path out;
};

// Comma-separated list of positive numbers, e.g. "0.1,0.2,0.5".
std::vector<double> parse_grid(std::string_view text);

// "K:N:SEED" or "K:N:SEED:BOX:SIGMA".
SyntheticSpec parse_synthetic(std::string_view text);

// Throws InvalidArgument on an inconsistent spec.
void validate(const RunSpec& spec);

// Executes a validated spec; errors propagate as exceptions.
void run(const RunSpec& spec, std::ostream& log);

// Parses the command line, runs it, and maps failures onto ExitCode.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace advrisk

#endif  // ADVRISK_CLI_HPP_
