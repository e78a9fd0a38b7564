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

#include "advrisk/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ostream>
#include <sstream>
#include <string>

#include <Eigen/Core>

#include "CLI11.hpp"
#include "advrisk/error.hpp"
#include "advrisk/gencol.hpp"
#include "advrisk/lp.hpp"
#include "advrisk/parallel.hpp"
#include "advrisk/report.hpp"
#include "json.hpp"

#ifndef ADVRISK_VERSION
#define ADVRISK_VERSION "unknown"
#endif

namespace advrisk {
namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

template <typename T>
T parse_field(std::string_view field, std::string_view what) {
  T value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    throw InvalidArgument("cannot parse " + std::string(what) + " from '" +
                          std::string(field) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t at = text.find(sep, start);
    parts.push_back(text.substr(start, at - start));
    if (at == std::string_view::npos) break;
    start = at + 1;
  }
  return parts;
}

const char* command_name(Command c) {
  switch (c) {
    case Command::kGenData:
      return "gen-data";
    case Command::kExhaustive:
      return "exhaustive";
    case Command::kGenetic:
      return "genetic";
    case Command::kGencolW2:
      return "gencol-w2";
    case Command::kCertify:
      return "certify";
  }
  return "unknown";
}

bool uses_tau(Command c) {
  return c == Command::kGencolW2 || c == Command::kCertify;
}

std::filesystem::path with_suffix(const std::filesystem::path& prefix,
                                  const std::string& suffix) {
  std::filesystem::path p = prefix;
  p += suffix;
  return p;
}

LabeledDataset load_dataset(const RunSpec& spec) {
  if (spec.csv) return load_csv(*spec.csv);
  if (spec.cifar) return load_cifar100_test(*spec.cifar, spec.cifar_classes);
  return generate_synthetic(*spec.synthetic);
}

json dataset_json(const RunSpec& spec, const LabeledDataset& ds) {
  json source;
  if (spec.csv) {
    source = {{"kind", "csv"}, {"path", spec.csv->string()}};
  } else if (spec.cifar) {
    source = {{"kind", "cifar100"},
              {"path", spec.cifar->string()},
              {"classes", spec.cifar_classes}};
  } else {
    const SyntheticSpec& s = *spec.synthetic;
    source = {{"kind", "synthetic"},
              {"classes", s.n_classes},
              {"points", s.n_points},
              {"seed", s.seed},
              {"center_box", s.center_box},
              {"sigma", s.sigma}};
  }
  std::vector<std::size_t> counts(ds.class_counts().begin(), ds.class_counts().end());
  return {{"source", source},
          {"n_points", ds.size()},
          {"dim", ds.dim()},
          {"n_classes", ds.n_classes()},
          {"class_counts", counts}};
}

json params_json(const RunSpec& spec) {
  const RuleWeights weights = spec.rule_weights.value_or(
      uses_tau(spec.command) ? GencolParams{}.rule_weights : GeneticParams{}.rule_weights);
  json p = {{"metric", std::string(metric_name(spec.metric))},
            {"seed", spec.seed}};
  switch (spec.command) {
    case Command::kExhaustive:
      p["max_configs"] = spec.max_configs;
      break;
    case Command::kGenetic:
      p["samples_per_generation"] = spec.samples;
      p["rule_weights"] = {weights.add, weights.swap, weights.drop};
      p["time_limit"] = spec.time_limit;
      p["stagnation_generations"] = spec.stagnation;
      p["max_proposals"] = spec.max_proposals;
      p["stop_at_exhaustive"] = spec.stop_at_exhaustive;
      if (spec.stop_at_exhaustive) p["max_configs"] = spec.max_configs;
      break;
    case Command::kGencolW2:
    case Command::kCertify:
      p["beta"] = spec.beta;
      p["samples_per_generation"] = spec.samples;
      p["rule_weights"] = {weights.add, weights.swap, weights.drop};
      p["time_limit"] = spec.time_limit;
      p["stagnation_generations"] = spec.stagnation;
      break;
    case Command::kGenData:
      break;
  }
  return p;
}

void write_json(const std::filesystem::path& path, const json& value) {
  write_text_file(path, value.dump(2) + "\n");
}

void write_trace(const std::filesystem::path& prefix, const ConvergenceTrace& trace) {
  std::ostringstream csv;
  trace.write_csv(csv);
  write_text_file(with_suffix(prefix, ".csv"), csv.str());
  write_json(with_suffix(prefix, ".json"), trace.to_json());
}

void export_pool_files(const RunSpec& spec, const std::string& tag,
                       const ConfigurationPool& pool, std::size_t n_points) {
  if (spec.export_pool) {
    std::ostringstream out;
    write_pool_snapshot(pool, out);
    write_text_file(with_suffix(spec.out, "_pool_" + tag + ".json"), out.str());
  }
  if (spec.export_lp) {
    std::ostringstream out;
    write_lp_format(ReducedProblem::unit_mass(n_points, pool.columns()), out);
    write_text_file(with_suffix(spec.out, "_lp_" + tag + ".lp"), out.str());
  }
}

RiskCurveRow pool_row(double param, const ConfigurationPool& pool,
                      const LpSolution& solution, std::size_t n_points) {
  RiskCurveRow row;
  row.param = param;
  row.objective = solution.objective;
  row.risk = risk_from_objective(solution.objective, n_points);
  row.n_configs = pool.size();
  row.counts_by_length = pool.counts_by_length();
  return row;
}

struct PointResult {
  RiskCurveRow row;
  std::string log_line;
  json extra;  // certify output
};

PointResult run_exhaustive_point(const RunSpec& spec, const LabeledDataset& ds,
                                 double eps, unsigned threads) {
  const auto start = Clock::now();
  const ConfigurationPool pool =
      exhaustive_search(ds, spec.metric, eps, {spec.max_configs, threads});
  const LpSolution solution = solve_pool(pool, ds.size());
  PointResult r;
  r.row = pool_row(eps, pool, solution, ds.size());
  r.row.elapsed_s = seconds_since(start);
  export_pool_files(spec, format_number(eps), pool, ds.size());
  r.log_line = "eps=" + format_number(eps) + " risk=" + format_number(r.row.risk) +
               " configs=" + std::to_string(pool.size());
  return r;
}

PointResult run_genetic_point(const RunSpec& spec, const LabeledDataset& ds,
                              double eps, unsigned threads) {
  const auto start = Clock::now();
  GeneticParams params;
  params.samples_per_generation = spec.samples;
  if (spec.rule_weights) params.rule_weights = *spec.rule_weights;
  params.time_limit = spec.time_limit;
  params.stagnation_generations = spec.stagnation;
  params.seed = spec.seed;
  params.max_proposals = spec.max_proposals;
  params.threads = threads;
  if (spec.stop_at_exhaustive) {
    const ConfigurationPool full =
        exhaustive_search(ds, spec.metric, eps, {spec.max_configs, threads});
    params.target_objective = solve_pool(full, ds.size()).objective;
  }
  const GeneticResult result = genetic_search(ds, spec.metric, eps, params);
  PointResult r;
  r.row = pool_row(eps, result.pool, result.solution, ds.size());
  r.row.converged = result.converged();
  r.row.elapsed_s = seconds_since(start);
  const std::string tag = format_number(eps);
  write_trace(with_suffix(spec.out, "_trace_" + tag), result.trace);
  export_pool_files(spec, tag, result.pool, ds.size());
  r.log_line = "eps=" + tag + " risk=" + format_number(r.row.risk) +
               " configs=" + std::to_string(result.pool.size()) +
               " stop=" + to_string(result.stop);
  return r;
}

PointResult run_gencol_point(const RunSpec& spec, const LabeledDataset& ds,
                             double tau, unsigned threads) {
  GencolParams params;
  params.tau = tau;
  params.beta = spec.beta;
  params.samples_per_generation = spec.samples;
  if (spec.rule_weights) params.rule_weights = *spec.rule_weights;
  params.time_limit = spec.time_limit;
  params.stagnation_generations = spec.stagnation;
  params.seed = spec.seed;
  params.threads = threads;
  const GencolResult result = gencol_w2(ds, params);
  PointResult r;
  r.row = pool_row(tau, result.pool, result.solution, ds.size());
  r.row.risk = result.report.corrected_risk;
  r.row.converged = result.report.converged;
  r.row.elapsed_s = result.report.elapsed_s;
  const std::string tag = format_number(tau);
  write_trace(with_suffix(spec.out, "_trace_" + tag), result.trace);
  write_json(with_suffix(spec.out, "_w2_" + tag + ".json"), result.report.to_json());
  export_pool_files(spec, tag, result.pool, ds.size());
  r.log_line = "tau=" + tag + " corrected_risk=" +
               format_number(result.report.corrected_risk) +
               " regularized=" + format_number(result.report.regularized_value) +
               " configs=" + std::to_string(result.pool.size()) +
               " stop=" + to_string(result.stop);
  if (spec.command == Command::kCertify) {
    const Certificate cert = certify_optimality(result.solution, ds, tau);
    std::vector<PointIndex> worst(cert.worst.indices().begin(),
                                  cert.worst.indices().end());
    r.extra = {{"tau", tau},
               {"converged", result.report.converged},
               {"is_optimal", cert.is_optimal},
               {"max_violation", cert.max_violation},
               {"solution_dual_violation", cert.solution_dual_violation},
               {"full_objective", cert.full_objective ? json(*cert.full_objective) : json(nullptr)},
               {"worst_configuration", worst},
               {"enumerated", cert.enumerated}};
    r.log_line += std::string(" certified=") + (cert.is_optimal ? "yes" : "no") +
                  " max_violation=" + format_number(cert.max_violation);
  }
  return r;
}

std::vector<PointResult> run_grid(const RunSpec& spec, const LabeledDataset& ds) {
  auto one = [&](double param, unsigned threads) {
    switch (spec.command) {
      case Command::kExhaustive:
        return run_exhaustive_point(spec, ds, param, threads);
      case Command::kGenetic:
        return run_genetic_point(spec, ds, param, threads);
      default:
        return run_gencol_point(spec, ds, param, threads);
    }
  };
  std::vector<PointResult> results(spec.grid.size());
  if (spec.parallel_grid && spec.grid.size() > 1) {
    // Each grid point owns its pool and LP and runs single-threaded.
    parallel_chunks(spec.grid.size(), worker_count(), spec.grid.size(),
                    [&](std::size_t begin, std::size_t end, std::size_t) {
                      for (std::size_t g = begin; g < end; ++g) {
                        results[g] = one(spec.grid[g], 1);
                      }
                    });
  } else {
    for (std::size_t g = 0; g < spec.grid.size(); ++g) {
      results[g] = one(spec.grid[g], 0);
    }
  }
  return results;
}

void check_monotone(const std::vector<RiskCurveRow>& rows) {
  for (std::size_t k = 1; k < rows.size(); ++k) {
    if (rows[k].risk < rows[k - 1].risk - 1e-9) {
      throw InternalError("risk curve decreases between eps=" +
                          format_number(rows[k - 1].param) + " and eps=" +
                          format_number(rows[k].param));
    }
  }
}

}  // namespace

std::vector<double> parse_grid(std::string_view text) {
  std::vector<double> grid;
  for (const std::string_view field : split(text, ',')) {
    const double v = parse_field<double>(field, "grid value");
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw InvalidArgument("grid values must be positive and finite");
    }
    grid.push_back(v);
  }
  return grid;
}

SyntheticSpec parse_synthetic(std::string_view text) {
  const auto fields = split(text, ':');
  if (fields.size() != 3 && fields.size() != 5) {
    throw InvalidArgument("--synthetic expects K:N:SEED or K:N:SEED:BOX:SIGMA");
  }
  SyntheticSpec s;
  s.n_classes = parse_field<int>(fields[0], "class count");
  s.n_points = parse_field<int>(fields[1], "point count");
  s.seed = parse_field<std::uint64_t>(fields[2], "seed");
  if (fields.size() == 5) {
    s.center_box = parse_field<double>(fields[3], "center box");
    s.sigma = parse_field<double>(fields[4], "sigma");
  }
  validate(s);
  return s;
}

void validate(const RunSpec& spec) {
  if (spec.out.empty()) throw InvalidArgument("--out is required");
  if (spec.command == Command::kGenData) {
    validate(spec.generate);
    return;
  }
  const int sources = int{spec.csv.has_value()} + int{spec.cifar.has_value()} +
                      int{spec.synthetic.has_value()};
  if (sources != 1) {
    throw InvalidArgument("give exactly one of --data, --cifar, --synthetic");
  }
  if (spec.grid.empty()) {
    throw InvalidArgument(uses_tau(spec.command) ? "--tau is required"
                                                 : "--eps is required");
  }
  std::vector<double> sorted = spec.grid;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InvalidArgument("grid values must be distinct");
  }
  if (uses_tau(spec.command)) {
    if (spec.metric != Metric::kEuclidean) {
      throw InvalidArgument("the W2 penalty needs --metric l2");
    }
    if (spec.beta < 2) throw InvalidArgument("--beta must be >= 2");
  }
  if (spec.rule_weights) validate(*spec.rule_weights);
  if (!(spec.time_limit > 0.0)) throw InvalidArgument("--time-limit must be > 0");
  if (spec.stagnation == 0) throw InvalidArgument("--stagnation must be >= 1");
}

void run(const RunSpec& spec, std::ostream& log) {
  validate(spec);
  if (spec.command == Command::kGenData) {
    const LabeledDataset ds = generate_synthetic(spec.generate);
    save_csv(ds, spec.out);
    log << "wrote " << ds.size() << " points in " << ds.n_classes()
        << " classes to " << spec.out.string() << "\n";
    return;
  }

  const LabeledDataset ds = load_dataset(spec);
  log << "dataset: N=" << ds.size() << " d=" << ds.dim() << " K=" << ds.n_classes()
      << "\n";
  const std::vector<PointResult> results = run_grid(spec, ds);

  std::vector<RiskCurveRow> rows;
  json certificates = json::array();
  for (const PointResult& r : results) {
    log << r.log_line << "\n";
    rows.push_back(r.row);
    if (!r.extra.is_null()) certificates.push_back(r.extra);
  }
  rows = sorted_curve(std::move(rows));
  emit_risk_curve(rows, with_suffix(spec.out, "_curve"));
  if (spec.command == Command::kCertify) {
    write_json(with_suffix(spec.out, "_certify.json"), certificates);
  }

  json manifest = {{"tool", "advrisk"},
                   {"version", ADVRISK_VERSION},
                   {"command", command_name(spec.command)},
                   {"grid_parameter", uses_tau(spec.command) ? "tau" : "eps"},
                   {"grid", spec.grid},
                   {"params", params_json(spec)},
                   {"dataset", dataset_json(spec, ds)},
                   {"eigen_version", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                         std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                         std::to_string(EIGEN_MINOR_VERSION)}};
  write_json(with_suffix(spec.out, "_manifest.json"), manifest);

  if (spec.command == Command::kExhaustive) check_monotone(rows);
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Minimal adversarial risk via multi-marginal optimal transport",
               "advrisk"};
  app.set_version_flag("--version", ADVRISK_VERSION);
  app.require_subcommand(1);

  RunSpec spec;
  std::string data, cifar, synthetic, metric = "l2", eps, tau, weights,
                                      out_path;
  std::optional<int> classes;
  double time_limit = spec.time_limit;

  auto add_shared = [&](CLI::App* sub) {
    sub->add_option("--out", out_path, "Output path prefix")->required();
    sub->add_option("--seed", spec.seed, "Random seed");
  };
  auto add_solver = [&](CLI::App* sub) {
    add_shared(sub);
    sub->add_option("--data", data, "Labelled CSV (label,x1,...,xd)");
    sub->add_option("--cifar", cifar, "CIFAR-100 binary test file");
    sub->add_option("--classes", classes, "Classes kept from CIFAR-100 (default 30)");
    sub->add_option("--synthetic", synthetic, "Synthetic data K:N:SEED[:BOX:SIGMA]");
    sub->add_option("--metric", metric, "l2 or linf")
        ->check(CLI::IsMember({"l2", "linf"}));
    sub->add_flag("--parallel-grid", spec.parallel_grid,
                  "Run grid points concurrently, one worker each");
    sub->add_flag("--export-pool", spec.export_pool, "Write the final pool per grid point");
    sub->add_flag("--export-lp", spec.export_lp, "Write the reduced LP per grid point");
  };
  auto add_search = [&](CLI::App* sub) {
    sub->add_option("--samples", spec.samples, "Proposals per generation");
    sub->add_option("--rule-weights", weights,
                    "Add:swap:drop weights (default 1:1:0 for genetic, 1:1:1 for W2)");
    sub->add_option("--time-limit", time_limit, "Seconds per grid point");
    sub->add_option("--stagnation", spec.stagnation,
                    "Generations without insertions before stopping");
  };

  CLI::App* gen = app.add_subcommand("gen-data", "Write a synthetic 2-D dataset");
  add_shared(gen);
  gen->add_option("--classes", classes, "Number of classes");
  gen->add_option("--n", spec.generate.n_points, "Number of points");
  gen->add_option("--center-box", spec.generate.center_box, "Side of the center box");
  gen->add_option("--sigma", spec.generate.sigma, "Within-class standard deviation");

  CLI::App* exh = app.add_subcommand("exhaustive", "Exhaustive search over a budget grid");
  add_solver(exh);
  exh->add_option("--eps", eps, "Budgets, comma separated")->required();
  exh->add_option("--max-configs", spec.max_configs, "Abort above this many configurations");

  CLI::App* gen_search = app.add_subcommand("genetic", "Genetic search over a budget grid");
  add_solver(gen_search);
  add_search(gen_search);
  gen_search->add_option("--eps", eps, "Budgets, comma separated")->required();
  gen_search->add_option("--max-proposals", spec.max_proposals, "Proposal budget");
  gen_search->add_flag("--stop-at-exhaustive", spec.stop_at_exhaustive,
                       "Stop once the exhaustive optimum is reached");
  gen_search->add_option("--max-configs", spec.max_configs,
                         "Cap for the exhaustive reference run");

  CLI::App* gencol = app.add_subcommand("gencol-w2", "W2-penalized column generation");
  CLI::App* certify =
      app.add_subcommand("certify", "W2 column generation plus a full dual check");
  for (CLI::App* sub : {gencol, certify}) {
    add_solver(sub);
    add_search(sub);
    sub->add_option("--tau", tau, "Regularization strengths, comma separated")
        ->required();
    sub->add_option("--beta", spec.beta, "Pool cap multiplier");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitBadArguments;
  }

  try {
    if (gen->parsed()) {
      spec.command = Command::kGenData;
      if (classes) spec.generate.n_classes = *classes;
    } else {
      spec.command = exh->parsed()          ? Command::kExhaustive
                     : gen_search->parsed() ? Command::kGenetic
                     : gencol->parsed()     ? Command::kGencolW2
                                            : Command::kCertify;
      if (!data.empty()) spec.csv = data;
      if (!cifar.empty()) spec.cifar = cifar;
      if (classes) {
        if (cifar.empty()) throw InvalidArgument("--classes needs --cifar");
        spec.cifar_classes = *classes;
      }
      if (!synthetic.empty()) spec.synthetic = parse_synthetic(synthetic);
      spec.metric = parse_metric(metric);
      spec.grid = parse_grid(uses_tau(spec.command) ? tau : eps);
      if (!weights.empty()) spec.rule_weights = parse_rule_weights(weights);
      spec.time_limit = time_limit;
    }
    spec.generate.seed = spec.seed;
    spec.out = out_path;
    run(spec, out);
    return kExitOk;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitBadArguments;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitDataError;
  } catch (const LpError& e) {
    err << "LP failure: " << e.what() << "\n";
    return kExitLpFailure;
  } catch (const EnumerationCapExceeded& e) {
    err << "enumeration cap: " << e.what() << "\n";
    return kExitEnumerationCap;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternalError;
  }
}

}  // namespace advrisk
