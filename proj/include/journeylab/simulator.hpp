#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <span>
#include <string>
#include <vector>

#include "journeylab/error.hpp"
#include "journeylab/score_table.hpp"
#include "journeylab/trial.hpp"

namespace journeylab {

// Episode state: s[n] is the 1-based index of journey n's first unseen image
// (L + 1 once the journey is exhausted) and t counts acquisitions so far.
//
// By default every one of the L images can be requested (s[n] <= L). With
// strict_paper_semantics a journey stops being selectable once s[n] reaches
// L, so its last image is never acquired.
struct SimulatorState {
  std::vector<int> s;
  std::int64_t t = 0;
  std::int64_t budget = 0;
  int length = 0;
  bool strict_paper_semantics = false;

  int n_journeys() const noexcept { return static_cast<int>(s.size()); }
  int next_index(JourneyId n) const { return s.at(static_cast<std::size_t>(n - 1)); }

  friend bool operator==(const SimulatorState&, const SimulatorState&) = default;
};

inline SimulatorState init_episode(const TrialInstance& trial, std::int64_t budget,
                                   bool strict_paper_semantics = false) {
  if (budget < 1) throw ConfigError("budget must be >= 1, got " + std::to_string(budget));
  return SimulatorState{std::vector<int>(static_cast<std::size_t>(trial.n_journeys()), 1), 0,
                        budget, trial.length(), strict_paper_semantics};
}

inline bool selectable(const SimulatorState& state, JourneyId n) {
  if (n < 1 || n > state.n_journeys())
    throw IndexError("journey id " + std::to_string(n) + " outside [1, " +
                     std::to_string(state.n_journeys()) + "]");
  const int next = state.s[static_cast<std::size_t>(n - 1)];
  return state.strict_paper_semantics ? next < state.length : next <= state.length;
}

inline SelectableMask selectable_mask(const SimulatorState& state) {
  SelectableMask mask(static_cast<std::size_t>(state.n_journeys()));
  for (JourneyId n = 1; n <= state.n_journeys(); ++n)
    mask[static_cast<std::size_t>(n - 1)] = selectable(state, n);
  return mask;
}

inline bool any_selectable(const SimulatorState& state) {
  for (JourneyId n = 1; n <= state.n_journeys(); ++n)
    if (selectable(state, n)) return true;
  return false;
}

inline bool is_terminal(const SimulatorState& state) {
  return state.t >= state.budget || !any_selectable(state);
}

struct StepOutcome {
  JourneyId executed_journey = 0;
  int observation_index = 0;
  std::reference_wrapper<const Embedding> observation;
  SimulatorState new_state;
};

// Executes the first selectable journey of preference, returning its next
// image and the advanced state. std::nullopt means nothing listed was
// selectable (terminal). Each acquisition costs exactly one budget unit.
inline std::optional<StepOutcome> request_step(const TrialInstance& trial,
                                               const SimulatorState& state,
                                               std::span<const JourneyId> preference) {
  if (state.t >= state.budget)
    throw BudgetExhaustedError("budget of " + std::to_string(state.budget) + " already spent");
  if (preference.empty()) throw ContractError("request_step: empty preference list");
  if (trial.n_journeys() != state.n_journeys() || trial.length() != state.length)
    throw ContractError("request_step: state does not match trial shape");
  std::vector<bool> seen(static_cast<std::size_t>(state.n_journeys()), false);
  for (JourneyId n : preference) {
    if (n < 1 || n > state.n_journeys())
      throw ContractError("request_step: journey id " + std::to_string(n) + " out of range");
    if (seen[static_cast<std::size_t>(n - 1)])
      throw ContractError("request_step: journey id " + std::to_string(n) + " listed twice");
    seen[static_cast<std::size_t>(n - 1)] = true;
  }
  for (JourneyId n : preference) {
    if (!selectable(state, n)) continue;
    const int j = state.next_index(n);
    SimulatorState next = state;
    ++next.s[static_cast<std::size_t>(n - 1)];
    ++next.t;
    return StepOutcome{n, j, std::cref(trial.image(n, j)), std::move(next)};
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Episode trace log: one "t<TAB>journey<TAB>observation_index" line per step.

struct StepLogEntry {
  std::int64_t t = 0;
  JourneyId journey = 0;
  int observation_index = 0;

  friend bool operator==(const StepLogEntry&, const StepLogEntry&) = default;
};

inline void write_step_log(std::ostream& out, const StepLogEntry& e) {
  out << e.t << '\t' << e.journey << '\t' << e.observation_index << '\n';
}

inline std::vector<StepLogEntry> read_step_log(std::istream& in) {
  std::vector<StepLogEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    StepLogEntry e;
    char tab1 = 0, tab2 = 0;
    std::istringstream row(line);
    row >> e.t >> std::noskipws >> tab1 >> std::skipws >> e.journey >> std::noskipws >> tab2 >>
        std::skipws >> e.observation_index;
    if (!row || tab1 != '\t' || tab2 != '\t')
      throw FormatError("malformed step log line " + std::to_string(line_no), 0);
    entries.push_back(e);
  }
  return entries;
}

}  // namespace journeylab
