#pragma once

#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "journeylab/evaluator.hpp"
#include "journeylab/rng.hpp"
#include "journeylab/synthetic.hpp"

namespace journeylab {

// Sweep configuration file:
//   {"dataset": path, "planners": [PlannerConfig...], "l_prime": [...],
//    "budgets": [...], "n_trials": int, "master_seed": int,
//    "window_length": int (optional)}
// "synthetic": SyntheticConfig may replace "dataset"; every trial then draws
// a fresh synthetic dataset seeded from its trial seed.
// l_prime overrides explore_budget_per_journey of explore_exploit planners;
// an empty budgets list means one budget of N * window_length.
struct SweepSpec {
  std::string dataset;
  std::vector<PlannerConfig> planners;
  std::vector<int> l_prime;
  std::vector<std::int64_t> budgets;
  std::int64_t n_trials = 100;
  std::uint64_t master_seed = 0;
  std::optional<int> window_length;
  std::optional<SyntheticConfig> synthetic;
};

inline void to_json(nlohmann::json& j, const SweepSpec& s) {
  j = {{"dataset", s.dataset}, {"planners", s.planners}, {"l_prime", s.l_prime},
       {"budgets", s.budgets}, {"n_trials", s.n_trials}, {"master_seed", s.master_seed}};
  if (s.window_length) j["window_length"] = *s.window_length;
  if (s.synthetic) j["synthetic"] = *s.synthetic;
}

inline void from_json(const nlohmann::json& j, SweepSpec& s) {
  if (!j.is_object()) throw ConfigError("sweep config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "dataset") value.get_to(s.dataset);
    else if (key == "planners") value.get_to(s.planners);
    else if (key == "l_prime") value.get_to(s.l_prime);
    else if (key == "budgets") value.get_to(s.budgets);
    else if (key == "n_trials") value.get_to(s.n_trials);
    else if (key == "master_seed") value.get_to(s.master_seed);
    else if (key == "window_length") s.window_length = value.get<int>();
    else if (key == "synthetic") s.synthetic = value.get<SyntheticConfig>();
    else throw ConfigError("unknown sweep config field '" + key + "'");
  }
}

inline SweepSpec load_sweep_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open sweep config " + path.string());
  try {
    auto spec = nlohmann::json::parse(in).get<SweepSpec>();
    // Relative dataset paths resolve against the config file's directory.
    if (!spec.dataset.empty() && std::filesystem::path(spec.dataset).is_relative())
      spec.dataset = (path.parent_path() / spec.dataset).lexically_normal().string();
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("sweep config " + path.string() + ": " + e.what());
  }
}

struct DatasetDescriptor {
  std::string source;
  int n_journeys = 0;
  std::size_t dim = 0;
  int window_length = 0;

  friend bool operator==(const DatasetDescriptor&, const DatasetDescriptor&) = default;
};

struct SweepEntry {
  PlannerConfig planner;
  std::int64_t budget = 0;
  AccuracyCurve curve;

  friend bool operator==(const SweepEntry&, const SweepEntry&) = default;
};

struct SweepReport {
  DatasetDescriptor dataset;
  std::vector<SweepEntry> configurations;
  std::uint64_t master_seed = 0;
  std::vector<std::uint64_t> trial_seeds;
  std::string rng_algorithm = kRngAlgorithm;

  friend bool operator==(const SweepReport&, const SweepReport&) = default;
};

// Seed of trial i; shared by every configuration so comparisons are paired.
inline std::uint64_t trial_seed(std::uint64_t master_seed, std::int64_t index) {
  return derive_seed(master_seed, static_cast<std::uint64_t>(index));
}

// A random planner's per-trial stream, so repeated trials do not reuse draws.
inline PlannerConfig planner_for_trial(PlannerConfig cfg, std::uint64_t trial_seed) {
  if (cfg.kind != PlannerKind::explore_exploit) cfg.seed = derive_seed(cfg.seed, trial_seed);
  return cfg;
}

// Expands planners x l_prime x budgets in file order. Random kinds ignore
// l_prime and appear once per budget.
inline std::vector<std::pair<PlannerConfig, std::int64_t>> expand_configurations(
    const SweepSpec& spec, std::int64_t default_budget) {
  std::vector<PlannerConfig> planners;
  for (const auto& p : spec.planners) {
    p.validate();
    if (p.kind == PlannerKind::explore_exploit && !spec.l_prime.empty()) {
      for (int l : spec.l_prime) {
        PlannerConfig c = p;
        c.explore_budget_per_journey = l;
        c.validate();
        planners.push_back(c);
      }
    } else {
      planners.push_back(p);
    }
  }
  std::vector<std::int64_t> budgets = spec.budgets;
  if (budgets.empty()) budgets.push_back(default_budget);
  std::vector<std::pair<PlannerConfig, std::int64_t>> out;
  for (const auto& p : planners)
    for (auto b : budgets) {
      if (b < 1) throw ConfigError("budget must be >= 1, got " + std::to_string(b));
      out.emplace_back(p, b);
    }
  return out;
}

// Trial i of a synthetic sweep: a fresh dataset drawn with a seed derived
// from the trial seed, windowed over its full length.
inline TrialInstance synthetic_trial(const SyntheticConfig& cfg, std::uint64_t trial_seed) {
  SyntheticConfig c = cfg;
  c.seed = derive_seed(cfg.seed, trial_seed);
  auto ds = std::make_shared<const JourneyDataset>(generate_synthetic(c));
  return sample_trial(std::move(ds), c.length, trial_seed);
}

namespace detail {

// Runs every configuration on the same n_trials trial instances. Trials are
// split across `workers` threads; tallies are integer counts, so the result
// is identical for any worker count.
template <typename MakeTrial>
SweepReport run_sweep_over(const MakeTrial& make_trial, DatasetDescriptor descriptor,
                           const SweepSpec& spec, unsigned workers) {
  if (spec.n_trials < 1) throw ConfigError("n_trials must be >= 1");
  if (spec.planners.empty()) throw ConfigError("sweep lists no planners");
  const auto configs = expand_configurations(
      spec, static_cast<std::int64_t>(descriptor.n_journeys) * descriptor.window_length);

  SweepReport report;
  report.dataset = std::move(descriptor);
  report.master_seed = spec.master_seed;
  for (std::int64_t i = 0; i < spec.n_trials; ++i)
    report.trial_seeds.push_back(trial_seed(spec.master_seed, i));

  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(spec.n_trials)));
  std::vector<std::vector<SuccessTally>> tallies(workers,
                                                 std::vector<SuccessTally>(configs.size()));
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::int64_t> error_trial(workers, -1);

  auto work = [&](unsigned w) {
    for (std::int64_t i = w; i < spec.n_trials; i += workers) {
      std::size_t c = 0;
      try {
        const auto seed = report.trial_seeds[static_cast<std::size_t>(i)];
        const TrialInstance trial = make_trial(seed);
        for (; c < configs.size(); ++c)
          tallies[w][c].add(run_trial(trial, planner_for_trial(configs[c].first, seed),
                                      configs[c].second, seed));
      } catch (const Error&) {
        try {
          std::string where = "trial " + std::to_string(i);
          if (c < configs.size())
            where = "configuration " + std::to_string(c) + " (" +
                    to_string(configs[c].first.kind) + "), " + where;
          rethrow_with_context(where);
        } catch (...) {
          errors[w] = std::current_exception();
          error_trial[w] = i;
        }
        return;
      }
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  // Report the failure with the lowest trial index, as a serial run would.
  std::optional<unsigned> first_err;
  for (unsigned w = 0; w < workers; ++w)
    if (errors[w] && (!first_err || error_trial[w] < error_trial[*first_err])) first_err = w;
  if (first_err) std::rethrow_exception(errors[*first_err]);

  for (std::size_t c = 0; c < configs.size(); ++c) {
    SuccessTally total;
    for (unsigned w = 0; w < workers; ++w) total.merge(tallies[w][c]);
    report.configurations.push_back({configs[c].first, configs[c].second, total.curve()});
  }
  return report;
}

}  // namespace detail

// Sweep over windows of one loaded dataset.
inline SweepReport run_sweep(std::shared_ptr<const JourneyDataset> dataset, const SweepSpec& spec,
                             unsigned workers = 1) {
  if (!dataset) throw ContractError("run_sweep: null dataset");
  const int window = spec.window_length.value_or(static_cast<int>(dataset->min_length()));
  if (window < 1) throw ConfigError("window_length must be >= 1");
  DatasetDescriptor d{spec.dataset, dataset->n_journeys(), dataset->dim(), window};
  return detail::run_sweep_over(
      [&](std::uint64_t seed) { return sample_trial(dataset, window, seed); }, std::move(d), spec,
      workers);
}

// Sweep where each trial draws its own synthetic dataset.
inline SweepReport run_sweep(const SyntheticConfig& synthetic, const SweepSpec& spec,
                             unsigned workers = 1) {
  synthetic.validate();
  if (spec.window_length && *spec.window_length != synthetic.length)
    throw ConfigError("window_length must equal the synthetic length");
  DatasetDescriptor d{"synthetic", synthetic.n_journeys, static_cast<std::size_t>(synthetic.dim),
                      synthetic.length};
  return detail::run_sweep_over(
      [&](std::uint64_t seed) { return synthetic_trial(synthetic, seed); }, std::move(d), spec,
      workers);
}

// ---------------------------------------------------------------------------
// Reports.

enum class ReportFormat { csv, json };

inline ReportFormat parse_report_format(const std::string& s) {
  if (s == "csv") return ReportFormat::csv;
  if (s == "json") return ReportFormat::json;
  throw ConfigError("unknown report format '" + s + "'");
}

inline std::string kind_params(const SweepEntry& e) {
  std::string s = "budget=" + std::to_string(e.budget);
  if (e.planner.kind != PlannerKind::explore_exploit)
    s += ";seed=" + std::to_string(e.planner.seed);
  if (e.planner.strict_paper_semantics) s += ";strict";
  return s;
}

inline std::string format_csv(const SweepReport& report) {
  std::ostringstream out;
  out << "planner,kind_params,l_prime,exploit_mode,t,accuracy,n_trials,master_seed\n";
  char acc[32];
  for (const auto& e : report.configurations) {
    const bool ee = e.planner.kind == PlannerKind::explore_exploit;
    const std::string l_prime = ee ? std::to_string(e.planner.explore_budget_per_journey) : "";
    const std::string mode = ee ? to_string(e.planner.exploit_mode) : "";
    for (const auto& p : e.curve.points) {
      std::snprintf(acc, sizeof acc, "%.8f", p.accuracy);
      out << to_string(e.planner.kind) << ',' << kind_params(e) << ',' << l_prime << ',' << mode
          << ',' << p.t << ',' << acc << ',' << p.n_trials << ',' << report.master_seed << '\n';
    }
  }
  return out.str();
}

inline nlohmann::json report_to_json(const SweepReport& r) {
  nlohmann::json configs = nlohmann::json::array();
  for (const auto& e : r.configurations) {
    nlohmann::json points = nlohmann::json::array();
    for (const auto& p : e.curve.points)
      points.push_back({{"t", p.t}, {"accuracy", p.accuracy}, {"n_trials", p.n_trials}});
    configs.push_back({{"planner", e.planner}, {"budget", e.budget}, {"curve", std::move(points)}});
  }
  return {{"dataset",
           {{"source", r.dataset.source},
            {"n_journeys", r.dataset.n_journeys},
            {"dim", r.dataset.dim},
            {"window_length", r.dataset.window_length}}},
          {"configurations", std::move(configs)},
          {"master_seed", r.master_seed},
          {"trial_seeds", r.trial_seeds},
          {"rng_algorithm", r.rng_algorithm}};
}

inline SweepReport report_from_json(const nlohmann::json& j) {
  SweepReport r;
  try {
    const auto& d = j.at("dataset");
    r.dataset = {d.at("source").get<std::string>(), d.at("n_journeys").get<int>(),
                 d.at("dim").get<std::size_t>(), d.at("window_length").get<int>()};
    for (const auto& c : j.at("configurations")) {
      SweepEntry e{c.at("planner").get<PlannerConfig>(), c.at("budget").get<std::int64_t>(), {}};
      for (const auto& p : c.at("curve"))
        e.curve.points.push_back({p.at("t").get<std::int64_t>(), p.at("accuracy").get<double>(),
                                  p.at("n_trials").get<std::int64_t>()});
      r.configurations.push_back(std::move(e));
    }
    r.master_seed = j.at("master_seed").get<std::uint64_t>();
    r.trial_seeds = j.at("trial_seeds").get<std::vector<std::uint64_t>>();
    r.rng_algorithm = j.at("rng_algorithm").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("report JSON: ") + e.what(), 0);
  }
  return r;
}

inline void write_report(const SweepReport& report, const std::filesystem::path& path,
                         ReportFormat format) {
  if (report.configurations.empty()) throw ContractError("write_report: report is empty");
  const std::string body =
      format == ReportFormat::csv ? format_csv(report) : report_to_json(report).dump(2) + "\n";
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << body;
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace journeylab
