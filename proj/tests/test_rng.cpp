#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "tunnelswarm/rng.hpp"

using namespace tunnelswarm;

TEST(Rng, SameSeedSameSequence) {
  RandomStream a(42), b(42);
  for (int i = 0; i < 1000; ++i) {
    ASSERT_EQ(a.uniform(), b.uniform());
    ASSERT_EQ(a.normal(), b.normal());
  }
}

TEST(Rng, UniformInUnitInterval) {
  RandomStream r(3);
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Rng, NormalMoments) {
  RandomStream r(11);
  constexpr int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    sum += z;
    sq += z * z;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  // 5 standard errors.
  EXPECT_NEAR(mean, 0.0, 5.0 / std::sqrt(n));
  EXPECT_NEAR(var, 1.0, 5.0 * std::sqrt(2.0 / n));
}

TEST(Rng, StreamSeedsAreDistinct) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t rep = 0; rep < 10; ++rep) {
    for (int robot = -1; robot < 5; ++robot) {
      for (const char* name : {"injection", "power", "dc", "localization"}) {
        seen.insert(stream_seed(1, rep, robot, name));
      }
    }
  }
  EXPECT_EQ(seen.size(), 10u * 6u * 4u);
}

TEST(Rng, HashNameIsFnv1a) {
  // Offset basis for the empty string; "a" is the published test vector.
  EXPECT_EQ(hash_name(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(hash_name("a"), 0xaf63dc4c8601ec8cULL);
}
