#include <gtest/gtest.h>

#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "test_util.hpp"

using namespace journeylab;
using journeylab::testing::full_trial;
using journeylab::testing::random_dataset;

namespace {

TrialInstance trial_of(int n, int len, std::uint64_t seed = 1) {
  std::mt19937_64 gen(seed);
  return full_trial(random_dataset(gen, n, len, 3), 1);
}

std::int64_t acquired(const SimulatorState& s) {
  std::int64_t sum = 0;
  for (int v : s.s) sum += v - 1;
  return sum;
}

}  // namespace

TEST(InitEpisode, AllOnes) {
  const auto tr = trial_of(10, 100);
  const auto s = init_episode(tr, 1000);
  EXPECT_EQ(s.s, std::vector<int>(10, 1));
  EXPECT_EQ(s.t, 0);
  EXPECT_EQ(init_episode(trial_of(1, 5), 3).s, std::vector<int>{1});
  EXPECT_THROW(init_episode(tr, 0), ConfigError);
}

TEST(Selectable, DefaultAndStrict) {
  const auto tr = trial_of(2, 100);
  auto s = init_episode(tr, 10);
  EXPECT_TRUE(selectable(s, 1));
  s.s[0] = 101;
  EXPECT_FALSE(selectable(s, 1));
  s.s[0] = 100;
  EXPECT_TRUE(selectable(s, 1));
  s.strict_paper_semantics = true;
  EXPECT_FALSE(selectable(s, 1));
  s.s[0] = 99;
  EXPECT_TRUE(selectable(s, 1));
  EXPECT_THROW(selectable(s, 0), IndexError);
  EXPECT_THROW(selectable(s, 3), IndexError);
}

TEST(RequestStep, AdvancesRequestedJourney) {
  const auto tr = trial_of(2, 4);
  const auto s = init_episode(tr, 8);
  const std::vector<JourneyId> pref{1, 2};
  const auto out = request_step(tr, s, pref);
  ASSERT_TRUE(out);
  EXPECT_EQ(out->executed_journey, 1);
  EXPECT_EQ(out->observation_index, 1);
  EXPECT_EQ(&out->observation.get(), &tr.image(1, 1));
  EXPECT_EQ(out->new_state.s, (std::vector<int>{2, 1}));
  EXPECT_EQ(out->new_state.t, 1);
}

TEST(RequestStep, FallsBackToNextPriority) {
  const auto tr = trial_of(2, 4);
  auto s = init_episode(tr, 8);
  s.s = {5, 3};  // journey 1 complete
  s.t = 6;
  const std::vector<JourneyId> pref{1, 2};
  const auto out = request_step(tr, s, pref);
  ASSERT_TRUE(out);
  EXPECT_EQ(out->executed_journey, 2);
  EXPECT_EQ(out->observation_index, 3);
  EXPECT_EQ(out->observation.get(), tr.image(2, 3));
}

TEST(RequestStep, StrictSemanticsFallsBackAtLastIndex) {
  const auto tr = trial_of(2, 4);
  auto s = init_episode(tr, 8, true);
  s.s = {4, 1};
  s.t = 3;
  const std::vector<JourneyId> pref{1, 2};
  EXPECT_EQ(request_step(tr, s, pref)->executed_journey, 2);
}

TEST(RequestStep, TerminalWhenNothingSelectable) {
  const auto tr = trial_of(3, 2);
  auto s = init_episode(tr, 100);
  s.s = {3, 3, 3};
  s.t = 6;
  const std::vector<JourneyId> pref{1, 2, 3};
  EXPECT_FALSE(request_step(tr, s, pref));
  EXPECT_TRUE(is_terminal(s));
}

TEST(RequestStep, Errors) {
  const auto tr = trial_of(2, 3);
  auto s = init_episode(tr, 1);
  EXPECT_THROW(request_step(tr, s, std::vector<JourneyId>{}), ContractError);
  EXPECT_THROW(request_step(tr, s, std::vector<JourneyId>{1, 1}), ContractError);
  EXPECT_THROW(request_step(tr, s, std::vector<JourneyId>{3}), ContractError);
  s.t = 1;
  EXPECT_THROW(request_step(tr, s, std::vector<JourneyId>{1}), BudgetExhaustedError);
}

TEST(IsTerminal, Cases) {
  const auto tr = trial_of(2, 3);
  auto s = init_episode(tr, 2);
  EXPECT_FALSE(is_terminal(s));
  s.t = 2;
  EXPECT_TRUE(is_terminal(s));
  auto all_done = init_episode(tr, 100);
  all_done.s = {4, 4};
  EXPECT_TRUE(is_terminal(all_done));
}

// Random preference lists over random shapes: locality, conservation,
// observation fidelity, bounded length and replay.
TEST(SimulatorProperties, RandomEpisodes) {
  std::mt19937_64 gen(42);
  for (int ep = 0; ep < 300; ++ep) {
    const int n = 1 + static_cast<int>(gen() % 6);
    const int len = 1 + static_cast<int>(gen() % 8);
    const std::int64_t budget = 1 + static_cast<std::int64_t>(gen() % (n * len + 3));
    const bool strict = gen() % 4 == 0;
    const auto tr = trial_of(n, len, gen());
    auto s = init_episode(tr, budget, strict);
    std::set<std::pair<int, int>> seen;
    std::vector<std::vector<JourneyId>> prefs;
    std::vector<StepLogEntry> log;
    std::int64_t steps = 0;
    while (!is_terminal(s)) {
      std::vector<JourneyId> pref(static_cast<std::size_t>(n));
      std::iota(pref.begin(), pref.end(), 1);
      std::shuffle(pref.begin(), pref.end(), gen);
      pref.resize(1 + gen() % static_cast<unsigned>(n));
      prefs.push_back(pref);
      const auto out = request_step(tr, s, pref);
      if (!out) break;
      int changed = 0;
      for (int k = 0; k < n; ++k) {
        const int d = out->new_state.s[static_cast<std::size_t>(k)] - s.s[static_cast<std::size_t>(k)];
        ASSERT_TRUE(d == 0 || d == 1);
        changed += d;
      }
      ASSERT_EQ(changed, 1);
      ASSERT_EQ(acquired(out->new_state), out->new_state.t);
      ASSERT_EQ(out->observation_index, s.next_index(out->executed_journey));
      ASSERT_EQ(out->observation.get(), tr.window(out->executed_journey)[static_cast<std::size_t>(
                                            out->observation_index - 1)]);
      ASSERT_TRUE(seen.insert({out->executed_journey, out->observation_index}).second);
      log.push_back({out->new_state.t, out->executed_journey, out->observation_index});
      s = out->new_state;
      ++steps;
    }
    ASSERT_LE(steps, std::min<std::int64_t>(budget, static_cast<std::int64_t>(n) * len));

    // Replaying the same preferences reproduces the log.
    auto r = init_episode(tr, budget, strict);
    for (std::size_t i = 0; i < log.size(); ++i) {
      const auto out = request_step(tr, r, prefs[i]);
      ASSERT_TRUE(out);
      ASSERT_EQ((StepLogEntry{out->new_state.t, out->executed_journey, out->observation_index}),
                log[i]);
      r = out->new_state;
    }
    EXPECT_EQ(r, s);
  }
}

TEST(StepLog, TabSeparatedRoundTrip) {
  std::ostringstream out;
  const std::vector<StepLogEntry> entries{{1, 3, 1}, {2, 3, 2}, {3, 1, 1}};
  for (const auto& e : entries) write_step_log(out, e);
  EXPECT_EQ(out.str(), "1\t3\t1\n2\t3\t2\n3\t1\t1\n");
  std::istringstream in("# header\n" + out.str());
  EXPECT_EQ(read_step_log(in), entries);
  std::istringstream bad("1 3 1\n");
  EXPECT_THROW(read_step_log(bad), FormatError);
}
