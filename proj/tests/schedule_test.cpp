#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <vector>

#include "rumor/schedule.hpp"

namespace {

using namespace rumor;

std::vector<NodeId> row(const Schedule& s, NodeId u) { return {s.of(u).begin(), s.of(u).end()}; }

// Independent L1 oracle: enumerate intervals as explicit index/value sets.
double l1_oracle(const std::vector<std::uint32_t>& x) {
  const int m = static_cast<int>(x.size());
  double total = 0.0;
  for (int is = 0; is < m; ++is)
    for (int il = 1; il <= m; ++il)
      for (int js = 0; js < m; ++js)
        for (int jl = 1; jl <= m; ++jl) {
          int hits = 0;
          for (int a = 0; a < il; ++a) {
            const int value = static_cast<int>(x[(is + a) % m]);
            for (int b = 0; b < jl; ++b)
              if ((js + b) % m + 1 == value) ++hits;
          }
          total += std::abs(hits - double(il) * jl / m);
        }
  return total;
}

std::vector<std::uint32_t> rotate_positions(std::vector<std::uint32_t> x, std::size_t k) {
  std::rotate(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(k % x.size()), x.end());
  return x;
}

std::vector<std::uint32_t> shift_values(std::vector<std::uint32_t> x, std::uint32_t c) {
  const auto m = static_cast<std::uint32_t>(x.size());
  for (auto& v : x) v = (v - 1 + c) % m + 1;
  return x;
}

std::vector<std::uint32_t> random_perm(std::uint32_t m, RandomSource& rng) {
  std::vector<std::uint32_t> x(m);
  std::iota(x.begin(), x.end(), 1u);
  for (std::size_t i = m; i > 1; --i) std::swap(x[i - 1], x[rng.uniform_index(i)]);
  return x;
}

TEST(CanonicSchedule, EqualsAdjacency) {
  const Graph k4 = gen_complete(4);
  EXPECT_EQ(row(canonic_schedule(k4), 2), (std::vector<NodeId>{0, 1, 3}));
  const Graph h3 = gen_hypercube(3);
  EXPECT_EQ(row(canonic_schedule(h3), 0), (std::vector<NodeId>{1, 2, 4}));
  const Graph t = gen_torus(5);
  const auto first = row(canonic_schedule(t), 12);
  // (2,2): directions (1,0), (1,1), (0,1) lead to (3,2), (3,3), (2,3).
  EXPECT_EQ(first[0], torus_id(5, 3, 2));
  EXPECT_EQ(first[1], torus_id(5, 3, 3));
  EXPECT_EQ(first[2], torus_id(5, 2, 3));
}

TEST(Schedules, EveryPolicyPermutesTheAdjacency) {
  RandomSource rng(9);
  const std::vector<Graph> graphs{gen_complete(9), gen_hypercube(5), gen_torus(6)};
  for (const auto& g : graphs) {
    EXPECT_TRUE(canonic_schedule(g).matches(g));
    EXPECT_TRUE(random_schedule(g, rng).matches(g));
    if (direction_count(g) > 0) {
      EXPECT_TRUE(build_schedule(g, lists::LowDiscrepancy{}, rng).matches(g));
      EXPECT_TRUE(permuted_direction_schedule(g, random_perm(direction_count(g), rng)).matches(g));
    }
  }
}

TEST(RandomSchedule, AllOrderingsEquallyLikely) {
  // Node 0 of K_4 has 3 neighbors, so 6 orderings.
  const Graph g = gen_complete(4);
  RandomSource rng(77);
  constexpr int draws = 100000;
  std::map<std::vector<NodeId>, int> counts;
  for (int i = 0; i < draws; ++i) ++counts[row(random_schedule(g, rng), 0)];
  ASSERT_EQ(counts.size(), 6u);
  const double p = 1.0 / 6.0;
  for (const auto& [order, c] : counts) EXPECT_NEAR(c / double(draws), p, 4 * std::sqrt(p * (1 - p) / draws));
}

TEST(VanDerCorput, KnownSequences) {
  EXPECT_EQ(van_der_corput_direction_sequence(12, 16),
            (DirectionPermutation{1, 9, 5, 3, 11, 7, 2, 10, 6, 4, 12, 8}));
  EXPECT_EQ(van_der_corput_direction_sequence(8, 8), (DirectionPermutation{1, 5, 3, 7, 2, 6, 4, 8}));
  EXPECT_EQ(van_der_corput_direction_sequence(2, 2), (DirectionPermutation{1, 2}));
  EXPECT_EQ(van_der_corput_direction_sequence(1, 1), (DirectionPermutation{1}));
}

TEST(VanDerCorput, RejectsBadLengths) {
  EXPECT_THROW(van_der_corput_direction_sequence(12, 12), std::invalid_argument);
  EXPECT_THROW(van_der_corput_direction_sequence(12, 8), std::invalid_argument);
  EXPECT_THROW(van_der_corput_direction_sequence(0, 8), std::invalid_argument);
}

TEST(VanDerCorput, IsAlwaysAPermutation) {
  for (std::uint32_t m = 1; m <= 40; ++m) {
    const auto x = van_der_corput_direction_sequence(m, std::bit_ceil(m));
    EXPECT_EQ(x.size(), m);
    EXPECT_TRUE(is_permutation_of_1_to_m(x));
  }
}

TEST(LowDiscrepancyLists, HypercubeUsesTheSequenceDirectly) {
  const Graph h = gen_hypercube(12);
  EXPECT_EQ(low_discrepancy_permutation(h), van_der_corput_direction_sequence(12, 16));
  RandomSource rng(1);
  const Schedule s = build_schedule(h, lists::LowDiscrepancy{}, rng);
  // Node 0: entry i flips bit x_i - 1.
  const auto x = van_der_corput_direction_sequence(12, 16);
  for (std::size_t i = 0; i < 12; ++i) EXPECT_EQ(s.of(0)[i], NodeId{1} << (x[i] - 1));
}

TEST(LowDiscrepancyLists, TorusOrderIsAPermutationOfEight) {
  const auto x = low_discrepancy_permutation(gen_torus(8));
  EXPECT_TRUE(is_permutation_of_1_to_m(x));
  EXPECT_EQ(x.size(), 8u);
}

TEST(ExplicitLists, TorusFirstEntryFollowsPermutation) {
  const Graph t = gen_torus(3);
  const Schedule s = permuted_direction_schedule(t, DirectionPermutation{3, 1, 2, 4, 5, 6, 7, 8});
  EXPECT_EQ(s.of(torus_id(3, 0, 0))[0], torus_id(3, 0, 1));
  const DirectionPermutation identity{1, 2, 3, 4, 5, 6, 7, 8};
  EXPECT_EQ(permuted_direction_schedule(t, identity), canonic_schedule(t));
}

TEST(ExplicitLists, RejectNonPermutationsAndWrongFamilies) {
  const Graph t = gen_torus(4);
  EXPECT_THROW(permuted_direction_schedule(t, DirectionPermutation{1, 2, 3}), std::invalid_argument);
  EXPECT_THROW(permuted_direction_schedule(t, DirectionPermutation{1, 1, 3, 4, 5, 6, 7, 8}), std::invalid_argument);
  EXPECT_THROW(permuted_direction_schedule(gen_complete(5), DirectionPermutation{1, 2, 3, 4}),
               std::invalid_argument);
}

TEST(IntervalDiscrepancy, WorkedExamples) {
  const DirectionPermutation identity{1, 2, 3, 4, 5, 6, 7, 8};
  EXPECT_DOUBLE_EQ(interval_discrepancy(identity, {0, 8}, {0, 8}), 0.0);
  EXPECT_DOUBLE_EQ(interval_discrepancy(identity, {0, 1}, {0, 1}), 7.0 / 8.0);
  const DirectionPermutation vdc{1, 5, 3, 7, 2, 6, 4, 8};
  EXPECT_DOUBLE_EQ(interval_discrepancy(vdc, {0, 2}, {0, 2}), 0.5);
}

TEST(IntervalDiscrepancy, BoundedBySmallerInterval) {
  RandomSource rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::uint32_t m = 2 + static_cast<std::uint32_t>(rng.uniform_index(11));
    const auto x = random_perm(m, rng);
    for (std::uint32_t is = 0; is < m; ++is)
      for (std::uint32_t il = 1; il <= m; ++il)
        for (std::uint32_t js = 0; js < m; ++js)
          for (std::uint32_t jl = 1; jl <= m; ++jl)
            ASSERT_LE(interval_discrepancy(x, {is, il}, {js, jl}), double(std::min(il, jl)));
  }
}

TEST(LpDiscrepancy, L1IsTheSumOfIntervalDiscrepancies) {
  RandomSource rng(6);
  for (std::uint32_t m : {3u, 5u, 8u}) {
    const auto x = random_perm(m, rng);
    double sum = 0.0;
    for (std::uint32_t is = 0; is < m; ++is)
      for (std::uint32_t il = 1; il <= m; ++il)
        for (std::uint32_t js = 0; js < m; ++js)
          for (std::uint32_t jl = 1; jl <= m; ++jl) sum += interval_discrepancy(x, {is, il}, {js, jl});
    EXPECT_NEAR(lp_discrepancy(x, 1.0), sum, 1e-9 * sum);
  }
}

TEST(LpDiscrepancy, InvariantUnderRotationValueShiftAndReversal) {
  RandomSource rng(12);
  for (int trial = 0; trial < 40; ++trial) {
    const std::uint32_t m = 2 + static_cast<std::uint32_t>(rng.uniform_index(11));
    const auto x = random_perm(m, rng);
    for (double p : {1.0, 2.0, 0.5}) {
      const double base = lp_discrepancy(x, p);
      const double tol = 1e-9 * std::max(1.0, base);
      for (std::size_t k = 1; k < m; ++k) ASSERT_NEAR(lp_discrepancy(rotate_positions(x, k), p), base, tol);
      for (std::uint32_t c = 1; c < m; ++c) ASSERT_NEAR(lp_discrepancy(shift_values(x, c), p), base, tol);
      auto reversed = x;
      std::reverse(reversed.begin(), reversed.end());
      ASSERT_NEAR(lp_discrepancy(reversed, p), base, tol);
    }
  }
}

TEST(LpDiscrepancy, RankingOfAllEightPermutationsMatchesOracle) {
  DirectionPermutation x{1, 2, 3, 4, 5, 6, 7, 8};
  std::vector<std::pair<double, DirectionPermutation>> fast, slow;
  do {
    fast.emplace_back(lp_discrepancy(x, 1.0), x);
    slow.emplace_back(l1_oracle(x), x);
  } while (std::next_permutation(x.begin(), x.end()));
  ASSERT_EQ(fast.size(), 40320u);
  for (std::size_t i = 0; i < fast.size(); ++i) ASSERT_NEAR(fast[i].first, slow[i].first, 1e-6);
  std::stable_sort(fast.begin(), fast.end(), [](auto& a, auto& b) { return a.first < b.first; });
  std::stable_sort(slow.begin(), slow.end(), [](auto& a, auto& b) { return a.first < b.first; });
  for (std::size_t i = 0; i < fast.size(); ++i) ASSERT_EQ(fast[i].second, slow[i].second);
}

TEST(LpDiscrepancy, VanDerCorputBeatsIdentity) {
  const DirectionPermutation identity{1, 2, 3, 4, 5, 6, 7, 8};
  const auto vdc = van_der_corput_direction_sequence(8, 8);
  EXPECT_LT(lp_discrepancy(vdc, 1.0), lp_discrepancy(identity, 1.0));
  EXPECT_LT(lp_discrepancy(vdc, 2.0), lp_discrepancy(identity, 2.0));
}

TEST(ListPolicyText, RoundTrips) {
  for (const char* text : {"canonic", "random", "lowdisc", "explicit:3,1,2,4,5,6,7,8"})
    EXPECT_EQ(to_string(parse_list_policy(text)), text);
  EXPECT_THROW(parse_list_policy("explicit:1,1"), std::invalid_argument);
  EXPECT_THROW(parse_list_policy("sorted"), std::invalid_argument);
}

}  // namespace
