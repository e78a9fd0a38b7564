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

#ifndef ADVRISK_REPORT_HPP_
#define ADVRISK_REPORT_HPP_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace advrisk {

struct TraceRecord {
  double elapsed_s = 0.0;
  std::size_t generation = 0;
  std::size_t pool_size = 0;
  double objective = 0.0;
  double risk = 0.0;
};

// One record per LP solve of a configuration search.
class ConvergenceTrace {
 public:
  void add(const TraceRecord& record) { records_.push_back(record); }
  const std::vector<TraceRecord>& records() const { return records_; }
  bool empty() const { return records_.empty(); }

  // Objective never increases by more than `tol` between records.
  bool objective_nonincreasing(double tol = 1e-9) const;

  // Header elapsed_s,generation,pool_size,objective,risk.
  void write_csv(std::ostream& out) const;
  nlohmann::json to_json() const;

 private:
  std::vector<TraceRecord> records_;
};

// One row of a risk curve: the outcome of a run at budget epsilon or tau.
struct RiskCurveRow {
  double param = 0.0;
  double risk = 0.0;
  double objective = 0.0;
  std::size_t n_configs = 0;
  // counts_by_length[m] = configurations with m points; index 0 unused.
  std::vector<std::size_t> counts_by_length;
  double elapsed_s = 0.0;
  bool converged = true;
};

// Sorts by param; throws InvalidArgument when empty or params repeat.
std::vector<RiskCurveRow> sorted_curve(std::vector<RiskCurveRow> rows);

// "1:1000;2:345;3:12"
std::string format_counts_by_length(const std::vector<std::size_t>& counts);
// Shortest decimal text that parses back to the same double.
std::string format_number(double value);

// Header param,risk,objective,n_configs,n_configs_by_length,elapsed_s,converged.
void write_risk_curve_csv(const std::vector<RiskCurveRow>& rows, std::ostream& out);
nlohmann::json risk_curve_json(const std::vector<RiskCurveRow>& rows);

// Writes <prefix>.csv and <prefix>.json (rows sorted by param).
void emit_risk_curve(std::vector<RiskCurveRow> rows,
                     const std::filesystem::path& prefix);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace advrisk

#endif  // ADVRISK_REPORT_HPP_
