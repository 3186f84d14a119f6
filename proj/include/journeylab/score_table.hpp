#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "journeylab/embedding.hpp"
#include "journeylab/error.hpp"

namespace journeylab {

// 1-based journey identifier, as used on every public surface.
using JourneyId = int;

// Per-journey running maximum of query-to-observation cosine. A journey
// with no observations carries no score (std::nullopt), which ranks below
// every real score.
class ScoreTable {
public:
  explicit ScoreTable(int n_journeys) {
    if (n_journeys < 1) throw ConfigError("score table needs at least one journey");
    scores_.resize(static_cast<std::size_t>(n_journeys));
    counts_.resize(static_cast<std::size_t>(n_journeys), 0);
  }

  int n_journeys() const noexcept { return static_cast<int>(scores_.size()); }

  std::optional<double> score(JourneyId n) const { return scores_[index(n)]; }
  std::uint32_t observed_count(JourneyId n) const { return counts_[index(n)]; }

  // Folds one more cosine into journey n. Prefer update_score() unless the
  // caller owns the table exclusively.
  void fold(JourneyId n, double similarity) {
    const auto i = index(n);
    if (!scores_[i] || similarity > *scores_[i]) scores_[i] = similarity;
    ++counts_[i];
  }

  friend bool operator==(const ScoreTable&, const ScoreTable&) = default;

private:
  std::size_t index(JourneyId n) const {
    if (n < 1 || n > n_journeys())
      throw IndexError("journey id " + std::to_string(n) + " outside [1, " +
                       std::to_string(n_journeys()) + "]");
    return static_cast<std::size_t>(n - 1);
  }

  std::vector<std::optional<double>> scores_;
  std::vector<std::uint32_t> counts_;
};

// Returns the table with journey's score raised to include cosine(query, obs).
inline ScoreTable update_score(ScoreTable table, JourneyId journey, const Embedding& query,
                               const Embedding& observation) {
  const double c = cosine(query, observation);
  table.fold(journey, c);
  return table;
}

struct JourneySelection {
  JourneyId journey_id = 0;
  double score = 0.0;

  friend bool operator==(const JourneySelection&, const JourneySelection&) = default;
};

// True when journey a should be ranked ahead of journey b: higher score
// first, unscored last, lower id on ties.
inline bool ranks_before(const ScoreTable& table, JourneyId a, JourneyId b) {
  const auto sa = table.score(a);
  const auto sb = table.score(b);
  if (sa.has_value() != sb.has_value()) return sa.has_value();
  if (sa && *sa != *sb) return *sa > *sb;
  return a < b;
}

// Per-journey eligibility flags, indexed by journey id - 1.
using SelectableMask = std::vector<bool>;

// Argmax over selectable journeys that have a score. Unscored journeys never
// win; ties go to the lowest id.
inline std::optional<JourneySelection> best_journey(const ScoreTable& table,
                                                    const SelectableMask& selectable) {
  if (selectable.size() != static_cast<std::size_t>(table.n_journeys()))
    throw DimensionError("best_journey: mask length " + std::to_string(selectable.size()) +
                         " != " + std::to_string(table.n_journeys()));
  std::optional<JourneySelection> best;
  for (JourneyId n = 1; n <= table.n_journeys(); ++n) {
    if (!selectable[static_cast<std::size_t>(n - 1)]) continue;
    const auto s = table.score(n);
    if (!s) continue;
    if (!best || *s > best->score) best = JourneySelection{n, *s};
  }
  return best;
}

// best_journey with every journey eligible.
inline std::optional<JourneySelection> best_journey(const ScoreTable& table) {
  return best_journey(table, SelectableMask(static_cast<std::size_t>(table.n_journeys()), true));
}

}  // namespace journeylab
