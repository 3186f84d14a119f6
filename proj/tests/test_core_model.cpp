#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_util.hpp"

using namespace journeylab;
using journeylab::testing::random_embedding;
using journeylab::testing::reference_cosine;

TEST(Cosine, ExamplesFromContract) {
  EXPECT_DOUBLE_EQ(cosine({1, 0}, {1, 0}), 1.0);
  EXPECT_DOUBLE_EQ(cosine({1, 0}, {0, 1}), 0.0);
  EXPECT_NEAR(cosine({1, 1}, {1, 0}), 0.70710678, 1e-6);
  EXPECT_THROW(cosine({0, 0}, {1, 0}), DegenerateEmbeddingError);
}

TEST(Cosine, DimensionMismatch) {
  EXPECT_THROW(cosine({1, 0}, {1, 0, 0}), DimensionError);
}

TEST(Cosine, SymmetricScaleInvariantAndClamped) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<float> scale(0.01f, 100.f);
  for (int i = 0; i < 200; ++i) {
    const auto a = random_embedding(gen, 1 + i % 9);
    const auto b = random_embedding(gen, 1 + i % 9);
    const double c = cosine(a, b);
    EXPECT_EQ(c, cosine(b, a));
    EXPECT_GE(c, -1.0);
    EXPECT_LE(c, 1.0);
    std::vector<float> sa(a.values().begin(), a.values().end());
    const float k = scale(gen);
    for (auto& x : sa) x *= k;
    EXPECT_NEAR(cosine(Embedding(sa), b), c, 1e-6);
  }
  // Parallel vectors stay within [-1, 1] despite rounding.
  const Embedding v{0.1f, 0.2f, 0.3f};
  EXPECT_LE(cosine(v, v), 1.0);
  EXPECT_NEAR(cosine(v, v), 1.0, 1e-12);
}

TEST(EmbeddingType, RejectsEmptyAndNonFinite) {
  EXPECT_THROW(Embedding(std::vector<float>{}), DimensionError);
  EXPECT_THROW(Embedding({1.0f, std::nanf("")}), DimensionError);
  EXPECT_THROW(Embedding({INFINITY}), DimensionError);
}

TEST(ScoreTable, FirstObservationSetsScore) {
  // Oracle: with one observed image the max over j in [1, 1] is that one
  // cosine, 0.42 by construction of b.
  const Embedding q{1.0f, 0.0f};
  const Embedding b{0.42f, static_cast<float>(std::sqrt(1.0 - 0.42 * 0.42))};
  const double direct = reference_cosine(q, b);
  ASSERT_NEAR(direct, 0.42, 1e-6);

  ScoreTable t(3);
  EXPECT_FALSE(t.score(2).has_value());
  t = update_score(t, 2, q, b);
  ASSERT_TRUE(t.score(2).has_value());
  EXPECT_NEAR(*t.score(2), direct, 1e-12);
  EXPECT_EQ(t.observed_count(2), 1u);
  EXPECT_FALSE(t.score(1).has_value());
  EXPECT_EQ(t.observed_count(1), 0u);
}

TEST(ScoreTable, RunningMax) {
  ScoreTable t(1);
  t.fold(1, 0.3);
  t.fold(1, 0.5);
  EXPECT_EQ(*t.score(1), 0.5);
  ScoreTable u(1);
  u.fold(1, 0.8);
  u.fold(1, 0.5);
  EXPECT_EQ(*u.score(1), 0.8);
  EXPECT_EQ(u.observed_count(1), 2u);
}

TEST(ScoreTable, OutOfRangeJourney) {
  ScoreTable t(2);
  EXPECT_THROW(update_score(t, 0, {1, 0}, {1, 0}), IndexError);
  EXPECT_THROW(update_score(t, 3, {1, 0}, {1, 0}), IndexError);
  EXPECT_THROW(update_score(t, 1, {1, 0}, {0, 0}), DegenerateEmbeddingError);
  EXPECT_THROW(ScoreTable(0), ConfigError);
}

TEST(ScoreTable, PropertiesOverRandomUpdates) {
  std::mt19937_64 gen(11);
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 1 + rep % 5;
    const std::size_t dim = 1 + rep % 6;
    const auto q = random_embedding(gen, dim);
    ScoreTable t(n);
    std::vector<std::vector<double>> cosines(static_cast<std::size_t>(n));
    for (int step = 0; step < 40; ++step) {
      const JourneyId j = 1 + static_cast<int>(gen() % static_cast<unsigned>(n));
      const auto obs = random_embedding(gen, dim);
      const ScoreTable before = t;
      t = update_score(t, j, q, obs);
      cosines[static_cast<std::size_t>(j - 1)].push_back(reference_cosine(q, obs));
      for (JourneyId k = 1; k <= n; ++k) {
        if (k == j) {
          // Monotone and counted.
          if (before.score(k)) {
            EXPECT_GE(*t.score(k), *before.score(k));
          }
          EXPECT_EQ(t.observed_count(k), before.observed_count(k) + 1);
        } else {
          EXPECT_EQ(t.score(k), before.score(k));
          EXPECT_EQ(t.observed_count(k), before.observed_count(k));
        }
        // Sentinel iff never observed.
        EXPECT_EQ(t.score(k).has_value(), t.observed_count(k) > 0);
        // Batch max equals the incremental value.
        const auto& cs = cosines[static_cast<std::size_t>(k - 1)];
        if (!cs.empty()) {
          EXPECT_NEAR(*t.score(k), *std::max_element(cs.begin(), cs.end()), 1e-12);
          EXPECT_GE(*t.score(k), -1.0 - 1e-6);
          EXPECT_LE(*t.score(k), 1.0 + 1e-6);
        }
      }
    }
  }
}

TEST(BestJourney, TieBreaksToLowestId) {
  ScoreTable t(3);
  t.fold(1, 0.2);
  t.fold(2, 0.9);
  t.fold(3, 0.9);
  const auto sel = best_journey(t);
  ASSERT_TRUE(sel);
  EXPECT_EQ(sel->journey_id, 2);
  EXPECT_EQ(sel->score, 0.9);
}

TEST(BestJourney, RespectsSelectableMask) {
  ScoreTable t(3);
  t.fold(1, 0.9);
  t.fold(2, 0.5);
  t.fold(3, 0.1);
  const auto sel = best_journey(t, {false, true, true});
  ASSERT_TRUE(sel);
  EXPECT_EQ(sel->journey_id, 2);
}

TEST(BestJourney, NoneWhenNothingSelectableOrScored) {
  ScoreTable t(2);
  t.fold(1, 0.4);
  EXPECT_FALSE(best_journey(t, {false, false}));
  EXPECT_FALSE(best_journey(ScoreTable(3)));
  // An unscored journey never beats a scored one, even a negative score.
  ScoreTable u(2);
  u.fold(2, -0.7);
  EXPECT_EQ(best_journey(u)->journey_id, 2);
  EXPECT_THROW(best_journey(t, {true}), DimensionError);
}

TEST(BestJourney, ScaleInvariantUnderPositiveRescaling) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<float> scale(0.001f, 1000.f);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 2 + rep % 4;
    const std::size_t dim = 2 + rep % 3;
    const auto q = random_embedding(gen, dim);
    auto rescale = [&](const Embedding& e) {
      std::vector<float> v(e.values().begin(), e.values().end());
      const float k = scale(gen);
      for (auto& x : v) x *= k;
      return Embedding(v);
    };
    const auto q2 = rescale(q);
    ScoreTable a(n), b(n);
    SelectableMask mask(static_cast<std::size_t>(n));
    for (JourneyId j = 1; j <= n; ++j) {
      mask[static_cast<std::size_t>(j - 1)] = gen() % 3 != 0;
      for (int k = 0; k < 3; ++k) {
        const auto o = random_embedding(gen, dim);
        a = update_score(a, j, q, o);
        b = update_score(b, j, q2, rescale(o));
      }
    }
    const auto sa = best_journey(a, mask);
    const auto sb = best_journey(b, mask);
    ASSERT_EQ(sa.has_value(), sb.has_value());
    if (sa) {
      EXPECT_EQ(sa->journey_id, sb->journey_id);
    }
  }
}

TEST(BestJourney, Deterministic) {
  std::mt19937_64 g1(3), g2(3);
  auto build = [](std::mt19937_64& g) {
    const auto q = random_embedding(g, 4);
    ScoreTable t(4);
    for (int i = 0; i < 20; ++i) t = update_score(t, 1 + i % 4, q, random_embedding(g, 4));
    return t;
  };
  const auto a = build(g1);
  const auto b = build(g2);
  EXPECT_EQ(a, b);
  EXPECT_EQ(best_journey(a), best_journey(b));
}
