// Copyright 2026 The hubplan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hubplan/ingest.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

namespace hubplan {
namespace {

MeasurementRecord rec(UnixSeconds t, const char* metro, const char* pop, double rtt) {
  return {t, metro, "as1", pop, rtt};
}

TEST(NearestRank, Ladder) {
  std::vector<double> v;
  for (int i = 1; i <= 100; ++i) v.push_back(i);
  EXPECT_EQ(nearest_rank(v, 0.5), 50.0);
  EXPECT_EQ(nearest_rank(v, 0.9), 90.0);
  EXPECT_EQ(nearest_rank(v, 0.95), 95.0);
  std::vector<double> one{7};
  EXPECT_EQ(nearest_rank(one, 0.9), 7.0);
}

TEST(Aggregate, SingleSample) {
  std::vector<MeasurementRecord> r{rec(1000, "m", "p", 10)};
  auto out = aggregate_windows(r).stats;
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].median, 10.0);
  EXPECT_EQ(out[0].p90, 10.0);
  EXPECT_EQ(out[0].p95, 10.0);
  EXPECT_EQ(out[0].min_rtt, 10.0);
  EXPECT_EQ(out[0].sample_count, 1);
}

TEST(Aggregate, UniformLadder) {
  std::vector<MeasurementRecord> r;
  for (int i = 100; i >= 1; --i) r.push_back(rec(6000 + i, "m", "p", i));
  auto out = aggregate_windows(r).stats;
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].median, 50.0);
  EXPECT_EQ(out[0].p90, 90.0);
  EXPECT_EQ(out[0].p95, 95.0);
  EXPECT_EQ(out[0].min_rtt, 1.0);
}

TEST(Aggregate, TwentyFiveMinutesSpanThreeWindows) {
  std::vector<MeasurementRecord> r;
  for (UnixSeconds t = 0; t <= 25 * 60; t += 60) r.push_back(rec(1'633'046'400 + t, "m", "p", 5));
  auto out = aggregate_windows(r).stats;
  std::set<UnixSeconds> starts;
  for (const auto& s : out) {
    starts.insert(s.window_start);
    EXPECT_EQ(s.window_start % 600, 0);
  }
  EXPECT_EQ(starts.size(), 3u);
}

TEST(Aggregate, RejectsNonPositiveRows) {
  std::vector<MeasurementRecord> r{rec(0, "m", "p", 5), rec(1, "m", "p", 0), rec(2, "m", "p", -3)};
  auto out = aggregate_windows(r);
  ASSERT_EQ(out.rejected.size(), 2u);
  EXPECT_EQ(out.rejected[0].row, 1u);
  EXPECT_EQ(out.stats.at(0).sample_count, 1);
}

TEST(Aggregate, PermutationInvariant) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> rtt(1, 200);
  std::uniform_int_distribution<UnixSeconds> ts(0, 7200);
  std::vector<MeasurementRecord> r;
  const char* metros[] = {"a", "b", "c"};
  const char* pops[] = {"x", "y"};
  for (int i = 0; i < 2000; ++i) r.push_back(rec(ts(rng), metros[i % 3], pops[i % 2], rtt(rng)));
  auto base = aggregate_windows(r).stats;
  for (int k = 0; k < 5; ++k) {
    std::shuffle(r.begin(), r.end(), rng);
    auto again = aggregate_windows(r).stats;
    ASSERT_EQ(again.size(), base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
      EXPECT_EQ(again[i].window_start, base[i].window_start);
      EXPECT_EQ(again[i].p90, base[i].p90);
      EXPECT_EQ(again[i].median, base[i].median);
      EXPECT_EQ(again[i].sample_count, base[i].sample_count);
    }
  }
}

TEST(Aggregate, PercentilesOrderedAndDuplicationInvariant) {
  std::mt19937_64 rng(4);
  std::lognormal_distribution<double> rtt(3.0, 0.5);
  std::vector<MeasurementRecord> r;
  for (int i = 0; i < 500; ++i) r.push_back(rec(i * 7, "a", "x", rtt(rng)));
  auto base = aggregate_windows(r).stats;
  auto doubled = r;
  doubled.insert(doubled.end(), r.begin(), r.end());
  auto twice = aggregate_windows(doubled).stats;
  ASSERT_EQ(base.size(), twice.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    EXPECT_LE(base[i].min_rtt, base[i].median);
    EXPECT_LE(base[i].median, base[i].p90);
    EXPECT_LE(base[i].p90, base[i].p95);
    EXPECT_EQ(base[i].p90, twice[i].p90);
    EXPECT_EQ(base[i].median, twice[i].median);
    EXPECT_EQ(twice[i].sample_count, 2 * base[i].sample_count);
  }
}

TEST(Coarsen, HourBucketsMergeCounts) {
  std::vector<MeasurementRecord> r;
  for (int i = 0; i < 60; ++i) r.push_back(rec(3600 + i * 60, "a", "x", 10 + i % 6));
  auto fine = aggregate_windows(r).stats;
  ASSERT_EQ(fine.size(), 6u);
  auto coarse = coarsen(fine, 3600);
  ASSERT_EQ(coarse.size(), 1u);
  EXPECT_EQ(coarse[0].sample_count, 60);
  EXPECT_EQ(coarse[0].window_start, 3600);
  EXPECT_EQ(coarse[0].min_rtt, 10.0);
  auto same = coarsen(fine, 600);
  EXPECT_EQ(same.size(), fine.size());
  EXPECT_EQ(same[0].p90, fine[0].p90);
}

TEST(AnycastDefault, Majority) {
  std::vector<MeasurementRecord> r;
  for (int i = 0; i < 900; ++i) r.push_back(rec(i, "X", "dal", 1));
  for (int i = 0; i < 100; ++i) r.push_back(rec(i, "X", "lax", 1));
  for (int i = 0; i < 50; ++i) r.push_back(rec(i, "Y", "bbb", 1));
  for (int i = 0; i < 50; ++i) r.push_back(rec(i, "Y", "aaa", 1));
  auto d = infer_anycast_default(r);
  EXPECT_EQ(d.at("X"), "dal");
  EXPECT_EQ(d.at("Y"), "aaa");
  EXPECT_TRUE(infer_anycast_default(std::span<const MeasurementRecord>{}).empty());
  auto from_stats = infer_anycast_default(aggregate_windows(r).stats);
  EXPECT_EQ(from_stats, d);
}

TEST(GeoDefault, Examples) {
  PopCatalog pops({{"a", {0, 1}}, {"b", {0, 2}}, {"c", {40, -100}}});
  std::map<MetroId, GeoPoint> coords{{"origin", {0, 0}}, {"atc", {40, -100}}};
  auto g = compute_geo_default(coords, pops);
  EXPECT_EQ(g.nearest.at("origin"), "a");
  EXPECT_EQ(g.nearest.at("atc"), "c");

  PopCatalog tie({{"zz", {0, 90}}, {"aa", {0, -90}}});
  auto t = compute_geo_default({{"m", {0, 0}}}, tie);
  EXPECT_EQ(t.nearest.at("m"), "aa");

  std::vector<MetroId> wanted{"origin", "nowhere"};
  auto u = compute_geo_default(coords, pops, wanted);
  EXPECT_EQ(u.unresolved, std::vector<MetroId>{"nowhere"});
  EXPECT_FALSE(u.nearest.count("nowhere"));
}

WindowStat stat(UnixSeconds w, const char* metro, const char* pop, std::int64_t n, double p90) {
  WindowStat s;
  s.window_start = w;
  s.metro = metro;
  s.pop = pop;
  s.network = "as1";
  s.sample_count = n;
  s.median = s.min_rtt = p90 / 2;
  s.p90 = s.p95 = p90;
  return s;
}

TEST(LatencyMatrixBuild, Examples) {
  std::vector<WindowStat> s{stat(0, "a", "x", 19, 10), stat(0, "b", "x", 10, 40), stat(600, "b", "x", 10, 40),
                            stat(0, "c", "x", 10, 30), stat(600, "c", "x", 10, 50)};
  auto r = build_latency_matrix(s, {});
  EXPECT_FALSE(r.matrix.at("a", "x").has_value());
  EXPECT_EQ(r.dropped_metros, std::vector<MetroId>{"a"});
  EXPECT_EQ(*r.matrix.at("b", "x"), 40.0);
  EXPECT_EQ(*r.matrix.at("c", "x"), 40.0);
}

TEST(LatencyMatrixBuild, RangeAndPercentileSelection) {
  std::vector<WindowStat> s{stat(0, "a", "x", 30, 10), stat(600, "a", "x", 30, 90)};
  MatrixBuildOptions o;
  o.range = {600, 1200};
  EXPECT_EQ(*build_latency_matrix(s, o).matrix.at("a", "x"), 90.0);
  o.range = {};
  o.percentile = Percentile::median;
  EXPECT_EQ(*build_latency_matrix(s, o).matrix.at("a", "x"), 25.0);
}

TEST(LatencyMatrixBuild, RawPercentile) {
  std::vector<MeasurementRecord> r;
  for (int i = 1; i <= 100; ++i) r.push_back(rec(i * 30, "a", "x", i));
  MatrixBuildOptions o;
  EXPECT_EQ(*build_latency_matrix_raw(r, o).matrix.at("a", "x"), 90.0);
}

TEST(Percentile, Parse) {
  EXPECT_EQ(parse_percentile("p90"), Percentile::p90);
  EXPECT_EQ(parse_percentile("median"), Percentile::median);
  EXPECT_EQ(parse_percentile("p50"), Percentile::median);
  EXPECT_THROW(parse_percentile("p99"), ValidationError);
}

}  // namespace
}  // namespace hubplan
