#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "journeylab/planner.hpp"
#include "journeylab/score_table.hpp"
#include "journeylab/simulator.hpp"
#include "journeylab/trial.hpp"

namespace journeylab {

struct TraceRecord {
  std::int64_t t = 0;
  JourneyId executed_journey = 0;
  int observation_index = 0;
  std::optional<JourneyId> current_argmax;
  bool success = false;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

struct TrialTrace {
  std::uint64_t trial_seed = 0;
  PlannerConfig planner;
  std::int64_t budget = 0;
  JourneyId target_id = 0;
  std::vector<TraceRecord> records;

  // Success after the last step; an episode with no steps has no belief.
  bool final_success() const { return !records.empty() && records.back().success; }
};

namespace detail {

// Rethrows the in-flight journeylab error with `context` prepended, keeping
// its type so callers can still classify it.
[[noreturn]] inline void rethrow_with_context(const std::string& context) {
  try {
    throw;
  } catch (const FormatError& e) {
    throw FormatError(context + ": " + e.what(), e.offset());
  }
#define JOURNEYLAB_RETHROW_AS(T) \
  catch (const T& e) { throw T(context + ": " + e.what()); }
  JOURNEYLAB_RETHROW_AS(DimensionError)
  JOURNEYLAB_RETHROW_AS(DegenerateEmbeddingError)
  JOURNEYLAB_RETHROW_AS(IndexError)
  JOURNEYLAB_RETHROW_AS(DatasetError)
  JOURNEYLAB_RETHROW_AS(ConfigError)
  JOURNEYLAB_RETHROW_AS(BudgetExhaustedError)
  JOURNEYLAB_RETHROW_AS(ContractError)
  JOURNEYLAB_RETHROW_AS(IoError)
  JOURNEYLAB_RETHROW_AS(Error)
#undef JOURNEYLAB_RETHROW_AS
}

}  // namespace detail

// Runs one episode to termination. Success at step t means the all-journey
// argmax of the post-update score table is the trial's target.
inline TrialTrace run_trial(const TrialInstance& trial, const PlannerConfig& cfg,
                            std::int64_t budget, std::uint64_t trial_seed = 0) {
  TrialTrace trace{trial_seed, cfg, budget, trial.target_id(), {}};
  auto sim = init_episode(trial, budget, cfg.strict_paper_semantics);
  auto planner = create_planner(cfg, trial.n_journeys(), trial.length());
  ScoreTable scores(trial.n_journeys());
  const Embedding& query = trial.query();
  trace.records.reserve(static_cast<std::size_t>(
      std::min<std::int64_t>(budget, static_cast<std::int64_t>(trial.n_journeys()) * trial.length())));

  while (!is_terminal(sim)) {
    try {
      const auto preference = planner.next_preference(scores, sim);
      auto outcome = request_step(trial, sim, preference);
      if (!outcome) break;
      scores.fold(outcome->executed_journey, cosine(query, outcome->observation.get()));
      planner.notify_outcome(*outcome);
      sim = std::move(outcome->new_state);
      const auto argmax = best_journey(scores);
      TraceRecord rec{sim.t, outcome->executed_journey, outcome->observation_index, std::nullopt,
                      false};
      if (argmax) {
        rec.current_argmax = argmax->journey_id;
        rec.success = argmax->journey_id == trial.target_id();
      }
      trace.records.push_back(rec);
    } catch (const Error&) {
      detail::rethrow_with_context("trial step t=" + std::to_string(sim.t + 1));
    }
  }
  return trace;
}

struct CurvePoint {
  std::int64_t t = 0;
  double accuracy = 0.0;
  std::int64_t n_trials = 0;

  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

struct AccuracyCurve {
  std::vector<CurvePoint> points;

  // Mean accuracy over all points (area under the curve per unit budget).
  double mean_accuracy() const {
    if (points.empty()) return 0.0;
    double s = 0.0;
    for (const auto& p : points) s += p.accuracy;
    return s / static_cast<double>(points.size());
  }

  friend bool operator==(const AccuracyCurve&, const AccuracyCurve&) = default;
};

// Integer success tallies per t, the exact form accumulated before division.
struct SuccessTally {
  std::vector<std::int64_t> successes;  // index t-1
  std::int64_t n_trials = 0;

  // A trace shorter than the tally keeps contributing its final success.
  void add(const TrialTrace& trace) {
    // Every earlier trace is no longer than successes.size(), so each one
    // contributes its frozen final value to the newly opened slots.
    if (trace.records.size() > successes.size()) successes.resize(trace.records.size(), finals_);
    for (std::size_t i = 0; i < successes.size(); ++i) {
      const bool ok = i < trace.records.size() ? trace.records[i].success : trace.final_success();
      successes[i] += ok ? 1 : 0;
    }
    finals_ += trace.final_success() ? 1 : 0;
    ++n_trials;
  }

  void merge(const SuccessTally& other) {
    auto at = [](const SuccessTally& s, std::size_t i) {
      return i < s.successes.size() ? s.successes[i] : s.finals_;
    };
    std::vector<std::int64_t> merged(std::max(successes.size(), other.successes.size()));
    for (std::size_t i = 0; i < merged.size(); ++i) merged[i] = at(*this, i) + at(other, i);
    successes = std::move(merged);
    finals_ += other.finals_;
    n_trials += other.n_trials;
  }

  AccuracyCurve curve() const {
    AccuracyCurve c;
    c.points.reserve(successes.size());
    for (std::size_t i = 0; i < successes.size(); ++i)
      c.points.push_back({static_cast<std::int64_t>(i + 1),
                          static_cast<double>(successes[i]) / static_cast<double>(n_trials),
                          n_trials});
    return c;
  }

private:
  std::int64_t finals_ = 0;
};

inline AccuracyCurve accuracy_curve(const std::vector<TrialTrace>& traces) {
  if (traces.empty()) throw ContractError("accuracy_curve: no traces");
  SuccessTally tally;
  for (const auto& tr : traces) tally.add(tr);
  return tally.curve();
}

}  // namespace journeylab
