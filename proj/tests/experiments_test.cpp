#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <set>
#include <vector>

#include "rumor/experiments.hpp"

namespace {

using namespace rumor;

const ProtocolConfig kRandom{Model::FullyRandom};
const ProtocolConfig kQuasi{Model::Quasirandom};

ExperimentConfig config(GraphSpec graph, std::vector<ProtocolConfig> protocols, std::uint64_t reps,
                        std::uint64_t seed = 1) {
  ExperimentConfig cfg;
  cfg.graph = graph;
  cfg.protocols = std::move(protocols);
  cfg.reps = reps;
  cfg.master_seed = seed;
  return cfg;
}

double variance(const std::vector<double>& xs) {
  double m = 0;
  for (double x : xs) m += x;
  m /= xs.size();
  double ss = 0;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss / (xs.size() - 1);
}

TEST(EstimateBroadcast, SingleRepetition) {
  const auto est = estimate_broadcast(config(spec::Hypercube{5}, {kRandom}, 1));
  const auto& s = est.protocols[0].stats;
  EXPECT_EQ(s.count(), 1u);
  EXPECT_EQ(s.mean, s.min);
  EXPECT_EQ(s.mean, s.max);
  EXPECT_EQ(s.std_dev, 0.0);
}

TEST(EstimateBroadcast, TwoNodesAlwaysTakeOneRound) {
  const auto est = estimate_broadcast(config(spec::Complete{2}, {kRandom, kQuasi}, 50));
  for (const auto& p : est.protocols) {
    EXPECT_EQ(p.stats.mean, 1.0);
    EXPECT_EQ(p.stats.std_dev, 0.0);
  }
}

TEST(EstimateBroadcast, ResultsDoNotDependOnThreadCount) {
  for (bool async : {false, true}) {
    auto cfg = config(make_gnp(256, spec::Density::LnN), {kRandom, ProtocolConfig{Model::Quasirandom, lists::RandomPerm{}}},
                      300, 99);
    cfg.resample_every = 70;
    cfg.async = async;
    cfg.threads = 1;
    const auto one = estimate_broadcast(cfg);
    cfg.threads = 4;
    const auto four = estimate_broadcast(cfg);
    for (std::size_t j = 0; j < 2; ++j) EXPECT_EQ(one.protocols[j].times, four.protocols[j].times);
  }
}

TEST(EstimateBroadcast, DifferentSeedsDiffer) {
  const auto a = estimate_broadcast(config(spec::Torus{9}, {kRandom}, 50, 1));
  const auto b = estimate_broadcast(config(spec::Torus{9}, {kRandom}, 50, 2));
  EXPECT_NE(a.protocols[0].times, b.protocols[0].times);
}

TEST(ForEachRun, PairedProtocolsShareGraphAndStart) {
  auto cfg = config(make_gnp(128, spec::Density::TwoLnN), {kRandom, kQuasi}, 60);
  cfg.resample_every = 10;
  std::mutex mutex;
  std::vector<std::array<std::pair<NodeId, std::size_t>, 2>> seen(cfg.reps);
  for_each_run(cfg, [&](const RunInfo& info, const auto&) {
    std::lock_guard lock(mutex);
    seen[info.run][info.protocol] = {info.start, info.graph.edge_count()};
  });
  std::set<std::size_t> edge_counts_per_block[6];
  for (std::uint64_t run = 0; run < cfg.reps; ++run) {
    EXPECT_EQ(seen[run][0], seen[run][1]);
    edge_counts_per_block[run / 10].insert(seen[run][0].second);
  }
  std::set<std::size_t> distinct;
  for (const auto& block : edge_counts_per_block) {
    EXPECT_EQ(block.size(), 1u) << "graph changed inside a block";
    distinct.insert(*block.begin());
  }
  EXPECT_GT(distinct.size(), 1u) << "graph never resampled";
}

TEST(EstimateBroadcast, PairingReducesVarianceOfDifferences) {
  auto cfg = config(make_gnp(512, spec::Density::LnN), {kRandom, kQuasi}, 2000, 5);
  cfg.resample_every = 20;
  const auto paired = estimate_broadcast(cfg);
  auto solo_random = cfg;
  solo_random.protocols = {kRandom};
  auto solo_quasi = cfg;
  solo_quasi.protocols = {kQuasi};
  solo_quasi.master_seed = 6;
  const auto r = estimate_broadcast(solo_random);
  const auto q = estimate_broadcast(solo_quasi);
  std::vector<double> paired_diff, independent_diff;
  for (std::size_t i = 0; i < cfg.reps; ++i) {
    paired_diff.push_back(paired.protocols[0].times[i] - paired.protocols[1].times[i]);
    independent_diff.push_back(r.protocols[0].times[i] - q.protocols[0].times[i]);
  }
  EXPECT_LT(variance(paired_diff), variance(independent_diff));
}

TEST(SizeSweep, CompleteGraphMeansGrowWithSize) {
  std::vector<GraphSpec> specs;
  for (NodeId e = 1; e <= 9; ++e) specs.push_back(spec::Complete{NodeId{1} << e});
  auto base = config(spec::Complete{2}, {kRandom, kQuasi}, 400);
  const auto rows = size_sweep(specs, base);
  ASSERT_EQ(rows.size(), 18u);
  EXPECT_EQ(rows[0].mean, 1.0);
  EXPECT_EQ(rows[1].mean, 1.0);
  for (std::size_t k = 2; k < rows.size(); k += 2) EXPECT_GT(rows[k].mean, rows[k - 2].mean);
}

TEST(SizeSweep, HypercubeGapGrowsWithDimension) {
  const std::vector<GraphSpec> specs{spec::Hypercube{6}, spec::Hypercube{12}};
  const auto rows = size_sweep(specs, config(spec::Complete{2}, {kRandom, kQuasi}, 2000));
  const double gap6 = rows[0].mean - rows[1].mean;
  const double gap12 = rows[2].mean - rows[3].mean;
  EXPECT_GT(gap6, 0.0);
  EXPECT_GT(gap12, gap6);
}

TEST(UninformedCurve, StartsAtNMinusOneAndNeverIncreases) {
  auto cfg = config(make_gnp(300, spec::Density::LnN), {kRandom, kQuasi}, 200);
  cfg.resample_every = 50;
  const auto curves = uninformed_curve(cfg);
  for (const auto& curve : curves) {
    ASSERT_FALSE(curve.empty());
    EXPECT_EQ(curve[0], 299.0);
    for (std::size_t t = 1; t < curve.size(); ++t) EXPECT_LE(curve[t], curve[t - 1]);
  }
  EXPECT_EQ(curves[0].back() == 0.0 || curves[1].back() == 0.0, true);
}

TEST(UninformedCurve, MaxRoundFixesLengthAndPadsWithZero) {
  const auto cfg = config(spec::Complete{16}, {kQuasi}, 20);
  const auto curves = uninformed_curve(cfg, 40);
  ASSERT_EQ(curves[0].size(), 41u);
  EXPECT_EQ(curves[0][40], 0.0);
}

TEST(UninformedCurve, NinetyPercentInformedRoundOnSparseRandomGraph) {
  auto cfg = config(make_gnp(4096, spec::Density::LnN), {kRandom, kQuasi}, 1000, 42);
  cfg.resample_every = 100;
  const auto curves = uninformed_curve(cfg);
  auto first_below = [](const std::vector<double>& curve, double level) {
    for (std::size_t t = 0; t < curve.size(); ++t)
      if (curve[t] < level) return static_cast<int>(t);
    return -1;
  };
  EXPECT_NEAR(first_below(curves[0], 409.6), 18, 1);
  EXPECT_NEAR(first_below(curves[1], 409.6), 16, 1);
  // Curves share one length; the quasirandom one is zero well before the end.
  EXPECT_LT(first_below(curves[1], 1e-12), 46);
}

TEST(TorusGeometry, DistanceWrapsAround) {
  EXPECT_DOUBLE_EQ(torus_distance(63, torus_id(63, 0, 0), torus_id(63, 62, 0)), 1.0);
  EXPECT_DOUBLE_EQ(torus_distance(63, torus_id(63, 0, 0), torus_id(63, 3, 4)), 5.0);
  EXPECT_DOUBLE_EQ(torus_distance(10, torus_id(10, 0, 0), torus_id(10, 5, 5)), std::hypot(5.0, 5.0));
}

TEST(TorusGeometry, HandWorkedSnapshots) {
  const std::uint32_t side = 5;
  const NodeId c = torus_center(side);
  std::vector<std::uint8_t> informed(25, 0);
  informed[c] = 1;
  auto geo = spread_geometry(side, c, informed);
  EXPECT_EQ(geo.informed_count, 1u);
  EXPECT_EQ(geo.radius_out, 0.0);
  EXPECT_EQ(geo.radius_in, 0.0);

  // Plus shape: axis neighbors informed, diagonals (distance sqrt 2) not.
  for (auto [a, b] : {std::pair{3, 2}, {1, 2}, {2, 3}, {2, 1}}) informed[torus_id(side, a, b)] = 1;
  geo = spread_geometry(side, c, informed);
  EXPECT_EQ(geo.informed_count, 5u);
  EXPECT_DOUBLE_EQ(geo.radius_out, 1.0);
  EXPECT_DOUBLE_EQ(geo.radius_in, 1.0);
  EXPECT_DOUBLE_EQ(geo.radius_diff, 0.0);

  // A single axis neighbor: its twin at distance 1 is uninformed.
  std::fill(informed.begin(), informed.end(), 0);
  informed[c] = 1;
  informed[torus_id(side, 3, 2)] = 1;
  geo = spread_geometry(side, c, informed);
  EXPECT_DOUBLE_EQ(geo.radius_out, 1.0);
  EXPECT_DOUBLE_EQ(geo.radius_in, 0.0);
  EXPECT_DOUBLE_EQ(geo.normalized_diff, 1.0 / std::sqrt(2.0));
}

TEST(TorusSpread, ZeroStepsLeavesOnlyTheCenter) {
  const auto s = torus_spread(15, kRandom, 0, 10, 3);
  EXPECT_EQ(s.informed_count.mean, 1.0);
  EXPECT_EQ(s.radius_out.mean, 0.0);
  ASSERT_EQ(s.first_snapshot.size(), 1u);
  EXPECT_EQ(s.first_snapshot[0], (std::pair<std::uint32_t, std::uint32_t>{7, 7}));
}

TEST(TorusSpread, PerRunInvariants) {
  const auto s = torus_spread(21, ProtocolConfig{Model::Quasirandom, lists::LowDiscrepancy{}}, 8, 200, 4);
  ASSERT_EQ(s.runs.size(), 200u);
  for (const auto& g : s.runs) {
    EXPECT_LE(g.radius_in, g.radius_out);
    EXPECT_GE(g.informed_count, 1u);
    EXPECT_LE(g.informed_count, 1u << 8);
    EXPECT_NEAR(g.normalized_diff, g.radius_diff / std::sqrt(double(g.informed_count)), 1e-12);
  }
  EXPECT_EQ(s.first_snapshot.size(), s.runs[0].informed_count);
}

TEST(Permutations, EnumerationAndSampling) {
  const auto all = all_permutations(4);
  EXPECT_EQ(all.size(), 24u);
  EXPECT_EQ(std::set<DirectionPermutation>(all.begin(), all.end()).size(), 24u);
  RandomSource rng(1);
  const auto some = sample_permutations(8, 50, rng);
  EXPECT_EQ(std::set<DirectionPermutation>(some.begin(), some.end()).size(), 50u);
  for (const auto& x : some) EXPECT_TRUE(is_permutation_of_1_to_m(x));
  EXPECT_THROW(sample_permutations(3, 7, rng), std::invalid_argument);
}

TEST(DiscrepancySweep, RotationsShareDiscrepancyAndR2IsAProbability) {
  const std::vector<DirectionPermutation> perms{
      {1, 2, 3, 4, 5, 6, 7, 8}, {2, 3, 4, 5, 6, 7, 8, 1}, {5, 6, 7, 8, 1, 2, 3, 4}, {1, 5, 3, 7, 2, 6, 4, 8}};
  const auto sweep = discrepancy_sweep(9, perms, 30, 8);
  ASSERT_EQ(sweep.rows.size(), 4u);
  EXPECT_DOUBLE_EQ(sweep.rows[0].disc1, sweep.rows[1].disc1);
  EXPECT_DOUBLE_EQ(sweep.rows[0].disc2, sweep.rows[2].disc2);
  EXPECT_LT(sweep.rows[3].disc1, sweep.rows[0].disc1);
  for (double r2 : {sweep.r2_l1, sweep.r2_l2}) {
    EXPECT_GE(r2, 0.0);
    EXPECT_LE(r2, 1.0);
  }
}

TEST(ExperimentConfig, Validation) {
  auto cfg = config(spec::Complete{4}, {kRandom}, 0);
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg.reps = 1;
  cfg.resample_every = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg.resample_every = 1;
  cfg.protocols = {};
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg.protocols = {ProtocolConfig{Model::FullyRandom, lists::Canonic{}, 1.5}};
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  EXPECT_DOUBLE_EQ(ExperimentConfig{}.effective_bin_width(), 1.0);
  ExperimentConfig async;
  async.async = true;
  EXPECT_DOUBLE_EQ(async.effective_bin_width(), 0.2);
}

}  // namespace
