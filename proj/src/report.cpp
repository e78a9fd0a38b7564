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

#include "advrisk/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "advrisk/error.hpp"

namespace advrisk {

bool ConvergenceTrace::objective_nonincreasing(double tol) const {
  for (std::size_t k = 1; k < records_.size(); ++k) {
    if (records_[k].objective > records_[k - 1].objective + tol) return false;
  }
  return true;
}

void ConvergenceTrace::write_csv(std::ostream& out) const {
  out << "elapsed_s,generation,pool_size,objective,risk\n";
  for (const TraceRecord& r : records_) {
    out << format_number(r.elapsed_s) << ',' << r.generation << ','
        << r.pool_size << ',' << format_number(r.objective) << ','
        << format_number(r.risk) << '\n';
  }
}

nlohmann::json ConvergenceTrace::to_json() const {
  nlohmann::json doc = nlohmann::json::array();
  for (const TraceRecord& r : records_) {
    doc.push_back({{"elapsed_s", r.elapsed_s},
                   {"generation", r.generation},
                   {"pool_size", r.pool_size},
                   {"objective", r.objective},
                   {"risk", r.risk}});
  }
  return doc;
}

std::vector<RiskCurveRow> sorted_curve(std::vector<RiskCurveRow> rows) {
  if (rows.empty()) throw InvalidArgument("risk curve: no rows");
  std::stable_sort(rows.begin(), rows.end(),
                   [](const RiskCurveRow& a, const RiskCurveRow& b) {
                     return a.param < b.param;
                   });
  for (std::size_t k = 1; k < rows.size(); ++k) {
    if (!(rows[k].param > rows[k - 1].param)) {
      throw InvalidArgument("risk curve: repeated parameter " +
                            format_number(rows[k].param));
    }
  }
  return rows;
}

std::string format_counts_by_length(const std::vector<std::size_t>& counts) {
  std::string text;
  for (std::size_t m = 1; m < counts.size(); ++m) {
    if (counts[m] == 0) continue;
    if (!text.empty()) text += ';';
    text += std::to_string(m) + ':' + std::to_string(counts[m]);
  }
  return text;
}

std::string format_number(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return {buf, res.ptr};
}

void write_risk_curve_csv(const std::vector<RiskCurveRow>& rows,
                          std::ostream& out) {
  out << "param,risk,objective,n_configs,n_configs_by_length,elapsed_s,converged\n";
  for (const RiskCurveRow& r : rows) {
    out << format_number(r.param) << ',' << format_number(r.risk) << ','
        << format_number(r.objective) << ',' << r.n_configs << ','
        << format_counts_by_length(r.counts_by_length) << ','
        << format_number(r.elapsed_s) << ',' << (r.converged ? "true" : "false")
        << '\n';
  }
}

nlohmann::json risk_curve_json(const std::vector<RiskCurveRow>& rows) {
  nlohmann::json doc = nlohmann::json::array();
  for (const RiskCurveRow& r : rows) {
    nlohmann::json by_length = nlohmann::json::object();
    for (std::size_t m = 1; m < r.counts_by_length.size(); ++m) {
      if (r.counts_by_length[m] > 0) by_length[std::to_string(m)] = r.counts_by_length[m];
    }
    doc.push_back({{"param", r.param},
                   {"risk", r.risk},
                   {"objective", r.objective},
                   {"n_configs", r.n_configs},
                   {"n_configs_by_length", by_length},
                   {"elapsed_s", r.elapsed_s},
                   {"converged", r.converged},
                   {"lower_bound_only", !r.converged}});
  }
  return doc;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

void emit_risk_curve(std::vector<RiskCurveRow> rows,
                     const std::filesystem::path& prefix) {
  rows = sorted_curve(std::move(rows));
  std::ostringstream csv;
  write_risk_curve_csv(rows, csv);
  write_text_file(prefix.string() + ".csv", csv.str());
  write_text_file(prefix.string() + ".json", risk_curve_json(rows).dump(2) + "\n");
}

}  // namespace advrisk
