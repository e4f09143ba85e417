#include <gtest/gtest.h>

#include <random>

#include "patchsim/distance.hpp"
#include "support/oracles.hpp"

using namespace patchsim;

namespace {

Spectrum spec(std::vector<std::uint32_t> ids) {
  Spectrum s;
  for (auto i : ids) s.events.push_back({i});
  return s;
}

std::vector<std::uint32_t> raw(const std::vector<StatementId>& v) {
  std::vector<std::uint32_t> out;
  for (auto s : v) out.push_back(s.value);
  return out;
}

}  // namespace

TEST(Lcs, Examples) {
  EXPECT_EQ(lcs_length(spec({1, 2, 3, 4, 5}), spec({1, 3, 5})), 3u);
  EXPECT_EQ(lcs_length(spec({1, 2}), spec({3, 4})), 0u);
  const auto x = spec({4, 4, 1, 9, 4, 2});
  EXPECT_EQ(lcs_length(x, x), x.size());
  EXPECT_EQ(lcs_length(spec({}), spec({1})), 0u);
}

TEST(Lcs, MatchesReferenceOnRandomPairs) {
  std::mt19937_64 rng(2017);
  for (int i = 0; i < 3000; ++i) {
    const std::uint32_t alphabet = 1 + static_cast<std::uint32_t>(rng() % 50);
    const auto a = oracle::random_ids(rng, 200, alphabet);
    const auto b = oracle::random_ids(rng, 200, alphabet);
    ASSERT_EQ((lcs_length<StatementId>(a, b)), oracle::reference_lcs(raw(a), raw(b)));
  }
}

TEST(Lcs, WordBoundaries) {
  // Lengths straddling 64-bit words exercise the carry between words.
  std::mt19937_64 rng(5);
  for (std::size_t n : {63u, 64u, 65u, 127u, 128u, 129u, 300u}) {
    std::vector<StatementId> a(n), b(n + 7);
    for (auto& s : a) s.value = static_cast<std::uint32_t>(rng() % 3);
    for (auto& s : b) s.value = static_cast<std::uint32_t>(rng() % 3);
    EXPECT_EQ((lcs_length<StatementId>(a, b)), oracle::reference_lcs(raw(a), raw(b))) << n;
  }
}

TEST(Distance, Examples) {
  EXPECT_DOUBLE_EQ(distance(spec({1, 2, 3, 4, 5}), spec({1, 3, 5})).value, 1.0 - 3.0 / 5.0);
  EXPECT_EQ(distance(spec({7, 8, 9}), spec({7, 8, 9})).value, 0.0);
  EXPECT_EQ(distance(spec({}), spec({})).value, 0.0);
  EXPECT_EQ(distance(spec({1, 2}), spec({})).value, 1.0);
}

TEST(Distance, Properties) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 2000; ++i) {
    const std::uint32_t alphabet = 1 + static_cast<std::uint32_t>(rng() % 50);
    Spectrum a, b;
    a.events = oracle::random_ids(rng, 200, alphabet);
    b.events = oracle::random_ids(rng, 200, alphabet);
    const double ab = distance(a, b).value;
    ASSERT_EQ(ab, distance(b, a).value);
    ASSERT_GE(ab, 0.0);
    ASSERT_LE(ab, 1.0);
    ASSERT_EQ(distance(a, a).value, 0.0);

    // Drop a random subset of b to get a subsequence of it.
    Spectrum sub;
    for (auto s : b.events)
      if (rng() % 2) sub.events.push_back(s);
    if (!b.empty()) {
      ASSERT_DOUBLE_EQ(distance(sub, b).value,
                       1.0 - static_cast<double>(sub.size()) / static_cast<double>(b.size()));
    }
  }
}

TEST(Preprocess, CollapseRepeats) {
  const std::vector<StatementId> a = {{1}, {1}, {1}, {2}, {2}, {1}};
  const std::vector<StatementId> b = {{1}, {2}, {1}, {1}};
  auto [pa, pb] = preprocess<StatementId>(a, b, {true, 0, OverflowPolicy::subsample});
  EXPECT_EQ(raw(pa), (std::vector<std::uint32_t>{1, 2, 1}));
  EXPECT_EQ(raw(pb), (std::vector<std::uint32_t>{1, 2, 1}));
  EXPECT_EQ(sequence_distance<StatementId>(a, b, {true, 0, OverflowPolicy::subsample}).value, 0.0);
}

TEST(Preprocess, StrideAppliesToBothInputs) {
  std::vector<StatementId> a(10), b(4);
  for (std::uint32_t i = 0; i < 10; ++i) a[i].value = i;
  for (std::uint32_t i = 0; i < 4; ++i) b[i].value = i;
  auto [pa, pb] = preprocess<StatementId>(a, b, {false, 5, OverflowPolicy::subsample});
  EXPECT_EQ(raw(pa), (std::vector<std::uint32_t>{0, 2, 4, 6, 8}));
  EXPECT_EQ(raw(pb), (std::vector<std::uint32_t>{0, 2}));
}

TEST(Preprocess, RejectOnlyWhenBothExceedCap) {
  std::vector<StatementId> a(10), b(4);
  for (std::uint32_t i = 0; i < 10; ++i) a[i].value = i;
  const TracePreprocessing reject{false, 5, OverflowPolicy::reject};
  EXPECT_NO_THROW((preprocess<StatementId>(a, b, reject)));
  EXPECT_THROW((sequence_distance<StatementId>(a, a, reject)), CapacityExceeded);
}

TEST(Preprocess, ExactIsIdentity) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    Spectrum a, b;
    a.events = oracle::random_ids(rng, 50, 5);
    b.events = oracle::random_ids(rng, 50, 5);
    const double expected =
        a.empty() && b.empty()
            ? 0.0
            : 1.0 - static_cast<double>(oracle::reference_lcs(raw(a.events), raw(b.events))) /
                        static_cast<double>(std::max(a.size(), b.size()));
    ASSERT_DOUBLE_EQ(distance(a, b).value, expected);
  }
}
