#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "journeylab/journeylab.hpp"

namespace journeylab::cli {

enum ExitCode : int { kOk = 0, kRuntimeFailure = 1, kInputError = 2 };

// Worker-count hint from JOURNEYLAB_WORKERS; 1 when unset or malformed.
inline unsigned workers_from_env() {
  const char* v = std::getenv("JOURNEYLAB_WORKERS");
  if (!v) return 1;
  try {
    const long n = std::stol(v);
    return n >= 1 ? static_cast<unsigned>(n) : 1u;
  } catch (const std::exception&) {
    return 1;
  }
}

inline nlohmann::json provenance(const std::string& command, const nlohmann::json& config,
                                 std::uint64_t seed) {
  return {{"tool", "journeylab"},   {"version", kVersion}, {"command", command},
          {"config", config},       {"master_seed", seed}, {"rng_algorithm", kRngAlgorithm}};
}

inline void write_provenance(const std::filesystem::path& path, const nlohmann::json& record) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write provenance " + path.string());
  out << record.dump(2) << '\n';
}

inline std::filesystem::path sidecar(const std::filesystem::path& p) {
  return p.string() + ".provenance.json";
}

template <typename T>
T read_json_file(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw ConfigError(std::string("cannot open ") + what + " " + path.string());
  try {
    return nlohmann::json::parse(in).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string(what) + " " + path.string() + ": " + e.what());
  }
}

struct GenArgs {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
};

inline int cmd_gen(const GenArgs& a, std::ostream& out) {
  auto cfg = read_json_file<SyntheticConfig>(a.config, "synthetic config");
  if (a.seed) cfg.seed = *a.seed;
  const auto ds = generate_synthetic(cfg);
  const auto manifest = save_dataset(ds, a.out);
  write_provenance(std::filesystem::path(a.out) / "provenance.json",
                   provenance("gen", nlohmann::json(cfg), cfg.seed));
  out << manifest.string() << '\n';
  return kOk;
}

struct RunArgs {
  std::string manifest;
  std::string planner = "explore_exploit";
  int l_prime = 20;
  std::string mode = "commit";
  std::optional<std::int64_t> budget;
  std::uint64_t seed = 0;
  std::optional<int> window;
  bool strict = false;
  std::string out;
};

inline int cmd_run(const RunArgs& a, std::ostream& out) {
  PlannerConfig cfg;
  cfg.kind = parse_planner_kind(a.planner);
  cfg.explore_budget_per_journey = a.l_prime;
  cfg.exploit_mode = parse_exploit_mode(a.mode);
  cfg.seed = a.seed;
  cfg.strict_paper_semantics = a.strict;
  cfg.validate();

  auto ds = std::make_shared<const JourneyDataset>(load_dataset(a.manifest));
  const int window = a.window.value_or(static_cast<int>(ds->min_length()));
  const std::int64_t budget =
      a.budget.value_or(static_cast<std::int64_t>(ds->n_journeys()) * window);
  const auto trial = sample_trial(ds, window, a.seed);
  const auto trace = run_trial(trial, planner_for_trial(cfg, a.seed), budget, a.seed);

  if (!a.out.empty()) {
    std::ofstream f(a.out, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + a.out + " for writing");
    f << "# t\texecuted_journey\tobservation_index\tcurrent_argmax\tsuccess\n";
    for (const auto& r : trace.records)
      f << r.t << '\t' << r.executed_journey << '\t' << r.observation_index << '\t'
        << (r.current_argmax ? std::to_string(*r.current_argmax) : "NONE") << '\t'
        << (r.success ? 1 : 0) << '\n';
    const nlohmann::json resolved = {{"manifest", a.manifest}, {"planner", cfg},
                                     {"budget", budget},       {"window_length", window},
                                     {"seed", a.seed},         {"target_id", trace.target_id}};
    write_provenance(sidecar(a.out), provenance("run", resolved, a.seed));
  }
  std::string last = "NONE";
  if (!trace.records.empty() && trace.records.back().current_argmax)
    last = std::to_string(*trace.records.back().current_argmax);
  out << "success=" << (trace.final_success() ? "true" : "false")
      << " argmax=" << last << " target=" << trace.target_id
      << " cost=" << trace.records.size() << '\n';
  return kOk;
}

struct SweepArgs {
  std::string config;
  std::string out;
  std::string format = "csv";
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> budget;
  std::optional<int> l_prime;
  std::optional<std::string> planner;
  std::optional<std::int64_t> n_trials;
};

inline int cmd_sweep(const SweepArgs& a, std::ostream& out, unsigned workers) {
  const auto format = parse_report_format(a.format);
  auto spec = load_sweep_spec(a.config);
  if (a.seed) spec.master_seed = *a.seed;
  if (a.budget) spec.budgets = {*a.budget};
  if (a.l_prime) spec.l_prime = {*a.l_prime};
  if (a.n_trials) spec.n_trials = *a.n_trials;
  if (a.planner) {
    PlannerConfig p;
    p.kind = parse_planner_kind(*a.planner);
    spec.planners = {p};
  }
  SweepReport report;
  if (spec.synthetic) {
    if (!spec.dataset.empty()) throw ConfigError("sweep config names both dataset and synthetic");
    report = run_sweep(*spec.synthetic, spec, workers);
  } else {
    if (spec.dataset.empty()) throw ConfigError("sweep config names no dataset");
    auto ds = std::make_shared<const JourneyDataset>(load_dataset(spec.dataset));
    report = run_sweep(ds, spec, workers);
  }
  write_report(report, a.out, format);
  write_provenance(sidecar(a.out), provenance("sweep", nlohmann::json(spec), spec.master_seed));

  char line[160];
  for (const auto& e : report.configurations) {
    const bool ee = e.planner.kind == PlannerKind::explore_exploit;
    std::snprintf(line, sizeof line, "%-16s l_prime=%-4s mode=%-6s budget=%-6lld auc=%.6f final=%.6f\n",
                  to_string(e.planner.kind).c_str(),
                  ee ? std::to_string(e.planner.explore_budget_per_journey).c_str() : "-",
                  ee ? to_string(e.planner.exploit_mode).c_str() : "-",
                  static_cast<long long>(e.budget), e.curve.mean_accuracy(),
                  e.curve.points.empty() ? 0.0 : e.curve.points.back().accuracy);
    out << line;
  }
  return kOk;
}

using Matrix = std::vector<std::vector<double>>;

// Confusability diagnostics of a dataset. Entry [a][b] of
//   query_cosine:        cos(query_a, query_b)
//   query_to_obs:        mean_j cos(query_a, obs_b(j))
//   obs_to_obs:          mean_j cos(obs_a(j), obs_b(j)) over the shorter journey
struct InspectSummary {
  int n_journeys = 0;
  std::size_t dim = 0;
  std::vector<std::size_t> lengths;
  Matrix query_cosine, query_to_obs, obs_to_obs;
};

inline InspectSummary inspect_dataset(const JourneyDataset& ds) {
  const int n = ds.n_journeys();
  InspectSummary s{n, ds.dim(), {}, {}, {}, {}};
  for (const auto& r : ds.records()) s.lengths.push_back(r.observations.size());
  const auto size = static_cast<std::size_t>(n);
  s.query_cosine = s.query_to_obs = s.obs_to_obs = Matrix(size, std::vector<double>(size));
  for (JourneyId a = 1; a <= n; ++a)
    for (JourneyId b = 1; b <= n; ++b) {
      const auto& ra = ds.record(a);
      const auto& rb = ds.record(b);
      const auto i = static_cast<std::size_t>(a - 1), k = static_cast<std::size_t>(b - 1);
      s.query_cosine[i][k] = cosine(ra.query, rb.query);
      double q = 0.0;
      for (const auto& o : rb.observations) q += cosine(ra.query, o);
      s.query_to_obs[i][k] = q / static_cast<double>(rb.observations.size());
      const auto m = std::min(ra.observations.size(), rb.observations.size());
      double o = 0.0;
      for (std::size_t j = 0; j < m; ++j) o += cosine(ra.observations[j], rb.observations[j]);
      s.obs_to_obs[i][k] = o / static_cast<double>(m);
    }
  return s;
}

inline int cmd_inspect(const std::string& manifest, std::ostream& out) {
  const auto s = inspect_dataset(load_dataset(manifest));
  out << "journeys: " << s.n_journeys << "\ndim: " << s.dim << "\nlengths:";
  for (auto len : s.lengths) out << ' ' << len;
  out << '\n';
  char cell[32];
  auto print = [&](const char* title, const Matrix& m) {
    out << '\n' << title << '\n';
    for (const auto& row : m) {
      for (std::size_t b = 0; b < row.size(); ++b) {
        std::snprintf(cell, sizeof cell, "%s%8.4f", b == 0 ? "" : " ", row[b]);
        out << cell;
      }
      out << '\n';
    }
  };
  print("query cosine [a][b] = cos(query_a, query_b):", s.query_cosine);
  print("query-to-observation [a][b] = mean_j cos(query_a, obs_b(j)):", s.query_to_obs);
  print("observation-to-observation [a][b] = mean_j cos(obs_a(j), obs_b(j)):", s.obs_to_obs);
  return kOk;
}

// Entry point shared by the binary and the tests. Exit codes: 0 success,
// 1 runtime failure, 2 configuration or input error.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"journeylab: journey simulator, bandit planner and accuracy-vs-budget evaluator"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "generate a synthetic journey dataset");
  g->add_option("--config", gen.config, "synthetic config JSON")->required();
  g->add_option("--out", gen.out, "output directory")->required();
  g->add_option("--seed", gen.seed, "override config seed");

  RunArgs run_args;
  auto* r = app.add_subcommand("run", "run one trial and write its trace");
  r->add_option("--manifest", run_args.manifest, "dataset.json")->required();
  r->add_option("--planner", run_args.planner, "explore_exploit|random_journey|random_step");
  r->add_option("--l-prime", run_args.l_prime, "explore images per journey");
  r->add_option("--mode", run_args.mode, "commit|greedy");
  r->add_option("--budget", run_args.budget, "acquisition budget (default N*L)");
  r->add_option("--seed", run_args.seed, "trial seed");
  r->add_option("--window", run_args.window, "window length L (default: shortest journey)");
  r->add_flag("--strict", run_args.strict, "only journeys with s[n] < L are selectable");
  r->add_option("--out", run_args.out, "trace file (TSV)");

  SweepArgs sweep;
  auto* s = app.add_subcommand("sweep", "evaluate planner configurations over many trials");
  s->add_option("--config", sweep.config, "sweep config JSON")->required();
  s->add_option("--out", sweep.out, "report path")->required();
  s->add_option("--format", sweep.format, "csv|json");
  s->add_option("--seed", sweep.seed, "override master_seed");
  s->add_option("--budget", sweep.budget, "override budgets with one value");
  s->add_option("--l-prime", sweep.l_prime, "override l_prime with one value");
  s->add_option("--planner", sweep.planner, "override planners with one default kind");
  s->add_option("--n-trials", sweep.n_trials, "override n_trials");

  std::string inspect_manifest;
  auto* i = app.add_subcommand("inspect", "summarize a dataset");
  i->add_option("--manifest", inspect_manifest, "dataset.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    const int rc = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return rc == 0 ? kOk : kInputError;
  }

  try {
    if (*g) return cmd_gen(gen, out);
    if (*r) return cmd_run(run_args, out);
    if (*s) return cmd_sweep(sweep, out, workers_from_env());
    if (*i) return cmd_inspect(inspect_manifest, out);
  } catch (const std::exception& e) {
    const bool input = is_input_error(e);
    err << error_kind(e) << ": " << e.what() << '\n';
    return input ? kInputError : kRuntimeFailure;
  }
  return kInputError;
}

}  // namespace journeylab::cli
