#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "journeylab/error.hpp"
#include "journeylab/rng.hpp"
#include "journeylab/score_table.hpp"
#include "journeylab/simulator.hpp"

namespace journeylab {

enum class PlannerKind { explore_exploit, random_journey, random_step };
enum class ExploitMode { commit, greedy };
enum class Phase { explore, exploit };

inline std::string to_string(PlannerKind k) {
  switch (k) {
    case PlannerKind::explore_exploit: return "explore_exploit";
    case PlannerKind::random_journey: return "random_journey";
    case PlannerKind::random_step: return "random_step";
  }
  return "?";
}

inline std::string to_string(ExploitMode m) { return m == ExploitMode::commit ? "commit" : "greedy"; }

inline PlannerKind parse_planner_kind(const std::string& s) {
  if (s == "explore_exploit") return PlannerKind::explore_exploit;
  if (s == "random_journey") return PlannerKind::random_journey;
  if (s == "random_step") return PlannerKind::random_step;
  throw ConfigError("unknown planner kind '" + s + "'");
}

inline ExploitMode parse_exploit_mode(const std::string& s) {
  if (s == "commit") return ExploitMode::commit;
  if (s == "greedy") return ExploitMode::greedy;
  throw ConfigError("unknown exploit mode '" + s + "'");
}

struct PlannerConfig {
  PlannerKind kind = PlannerKind::explore_exploit;
  int explore_budget_per_journey = 20;  // L'; explore_exploit only
  ExploitMode exploit_mode = ExploitMode::commit;
  std::uint64_t seed = 0;  // random kinds only
  bool strict_paper_semantics = false;

  void validate() const {
    if (kind == PlannerKind::explore_exploit && explore_budget_per_journey < 1)
      throw ConfigError("explore_budget_per_journey must be >= 1, got " +
                        std::to_string(explore_budget_per_journey));
  }

  friend bool operator==(const PlannerConfig&, const PlannerConfig&) = default;
};

inline void to_json(nlohmann::json& j, const PlannerConfig& c) {
  j = {{"kind", to_string(c.kind)},
       {"explore_budget_per_journey", c.explore_budget_per_journey},
       {"exploit_mode", to_string(c.exploit_mode)},
       {"seed", c.seed},
       {"strict_paper_semantics", c.strict_paper_semantics}};
}

inline void from_json(const nlohmann::json& j, PlannerConfig& c) {
  if (!j.is_object()) throw ConfigError("planner config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "kind") c.kind = parse_planner_kind(value.get<std::string>());
    else if (key == "explore_budget_per_journey") value.get_to(c.explore_budget_per_journey);
    else if (key == "exploit_mode") c.exploit_mode = parse_exploit_mode(value.get<std::string>());
    else if (key == "seed") value.get_to(c.seed);
    else if (key == "strict_paper_semantics") value.get_to(c.strict_paper_semantics);
    else throw ConfigError("unknown planner config field '" + key + "'");
  }
}

// Per-episode planner. Explore-exploit first acquires L' images from every
// journey breadth-first (round r visits journeys in ascending id), then
// exploits depth-first by similarity score. The random kinds are baselines.
class Planner {
public:
  Planner(const PlannerConfig& cfg, int n_journeys, int length)
      : cfg_(cfg), n_journeys_(n_journeys), length_(length), rng_(cfg.seed) {
    cfg_.validate();
    if (n_journeys < 1) throw ConfigError("planner needs at least one journey");
    if (length < 1) throw ConfigError("planner needs journey length >= 1");
    l_prime_ = std::min(cfg_.explore_budget_per_journey, length_);
    explore_counts_.assign(static_cast<std::size_t>(n_journeys_), 0);
    phase_ = cfg_.kind == PlannerKind::explore_exploit ? Phase::explore : Phase::exploit;
  }

  const PlannerConfig& config() const noexcept { return cfg_; }
  Phase phase() const noexcept { return phase_; }
  int effective_l_prime() const noexcept { return l_prime_; }
  std::optional<JourneyId> committed_journey() const noexcept { return committed_; }
  int explore_count(JourneyId n) const { return explore_counts_.at(static_cast<std::size_t>(n - 1)); }

  // Ranked journeys for the next step; the simulator executes the first
  // selectable one.
  std::vector<JourneyId> next_preference(const ScoreTable& scores, const SimulatorState& sim) {
    check_shape(sim);
    if (scores.n_journeys() != n_journeys_)
      throw ContractError("next_preference: score table has wrong journey count");
    if (is_terminal(sim)) throw ContractError("next_preference called on a terminal episode");

    switch (cfg_.kind) {
      case PlannerKind::explore_exploit:
        if (phase_ == Phase::explore) {
          auto order = explore_order(sim);
          if (!order.empty()) return order;
          phase_ = Phase::exploit;
        }
        return cfg_.exploit_mode == ExploitMode::commit ? commit_order(scores, sim)
                                                        : score_order(scores, std::nullopt);
      case PlannerKind::random_journey:
        if (!committed_ || !selectable(sim, *committed_)) committed_ = draw_selectable(sim);
        return {*committed_};
      case PlannerKind::random_step:
        return {draw_selectable(sim)};
    }
    throw ContractError("unhandled planner kind");
  }

  // Records what the simulator actually executed, which may differ from the
  // top-ranked journey after a fallback.
  void notify_outcome(const StepOutcome& outcome) {
    check_shape(outcome.new_state);
    const JourneyId n = outcome.executed_journey;
    if (n < 1 || n > n_journeys_)
      throw ContractError("notify_outcome: executed journey " + std::to_string(n) + " out of range");
    if (phase_ == Phase::explore) {
      ++explore_counts_[static_cast<std::size_t>(n - 1)];
      if (explore_order(outcome.new_state).empty()) phase_ = Phase::exploit;
    }
  }

private:
  void check_shape(const SimulatorState& sim) const {
    if (sim.n_journeys() != n_journeys_ || sim.length != length_)
      throw ContractError("planner built for N=" + std::to_string(n_journeys_) +
                          ", L=" + std::to_string(length_) + " got N=" +
                          std::to_string(sim.n_journeys()) + ", L=" + std::to_string(sim.length));
  }

  // Journeys still owed exploration, fewest explored first, then by id.
  std::vector<JourneyId> explore_order(const SimulatorState& sim) const {
    std::vector<JourneyId> order;
    for (JourneyId n = 1; n <= n_journeys_; ++n)
      if (explore_count(n) < l_prime_ && selectable(sim, n)) order.push_back(n);
    std::stable_sort(order.begin(), order.end(),
                     [this](JourneyId a, JourneyId b) { return explore_count(a) < explore_count(b); });
    return order;
  }

  // All journeys by descending score, with `first` (if any) moved to the front.
  std::vector<JourneyId> score_order(const ScoreTable& scores, std::optional<JourneyId> first) const {
    std::vector<JourneyId> order;
    for (JourneyId n = 1; n <= n_journeys_; ++n)
      if (n != first) order.push_back(n);
    std::sort(order.begin(), order.end(),
              [&scores](JourneyId a, JourneyId b) { return ranks_before(scores, a, b); });
    if (first) order.insert(order.begin(), *first);
    return order;
  }

  std::vector<JourneyId> commit_order(const ScoreTable& scores, const SimulatorState& sim) {
    if (!committed_ || !selectable(sim, *committed_)) {
      const auto mask = selectable_mask(sim);
      if (const auto best = best_journey(scores, mask)) {
        committed_ = best->journey_id;
      } else {
        // Only unscored journeys remain; take the lowest selectable id.
        committed_ = static_cast<JourneyId>(
            std::find(mask.begin(), mask.end(), true) - mask.begin() + 1);
      }
    }
    return score_order(scores, committed_);
  }

  JourneyId draw_selectable(const SimulatorState& sim) {
    std::vector<JourneyId> open;
    for (JourneyId n = 1; n <= n_journeys_; ++n)
      if (selectable(sim, n)) open.push_back(n);
    return open[static_cast<std::size_t>(rng_.uniform_index(open.size()))];
  }

  PlannerConfig cfg_;
  int n_journeys_;
  int length_;
  int l_prime_ = 0;
  Phase phase_ = Phase::explore;
  std::vector<int> explore_counts_;
  std::optional<JourneyId> committed_;
  Rng rng_;
};

inline Planner create_planner(const PlannerConfig& cfg, int n_journeys, int length) {
  return Planner(cfg, n_journeys, length);
}

}  // namespace journeylab
