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

#include "hubplan/synthgen.hpp"

#include "hubplan/geo.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

namespace hubplan {
namespace {

double band_mass(double rate) { return std::exp(-100.0 * rate) - std::exp(-10000.0 * rate); }

TEST(Calibration, BothRootsSolveTheBandEquation) {
  const double upper = calibrate_exponential_rate();
  const double lower = calibrate_exponential_rate(100, 10000, 0.9, RateBranch::lower);
  EXPECT_LT(std::abs(band_mass(upper) - 0.9), 1e-6);
  EXPECT_LT(std::abs(band_mass(lower) - 0.9), 1e-6);
  EXPECT_NEAR(lower, 2.6e-4, 0.05e-4);
  EXPECT_NEAR(upper, 1.053e-3, 0.005e-3);
  EXPECT_LT(lower, upper);
}

TEST(Calibration, MonteCarloBandFraction) {
  for (auto branch : {RateBranch::lower, RateBranch::upper}) {
    const double rate = calibrate_exponential_rate(100, 10000, 0.9, branch);
    std::mt19937_64 rng(12345);
    std::exponential_distribution<double> draw(rate);
    int inside = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      const double x = draw(rng);
      inside += (x >= 100.0 && x <= 10000.0) ? 1 : 0;
    }
    EXPECT_NEAR(inside / double(n), 0.90, 0.02);
  }
}

TEST(Calibration, UnreachableMassRejected) {
  EXPECT_THROW(calibrate_exponential_rate(100, 10000, 0.999), ValidationError);
  EXPECT_THROW(calibrate_exponential_rate(100, 50, 0.5), ValidationError);
}

TEST(Connections, MeanNearInverseRate) {
  const double rate = calibrate_exponential_rate();
  std::mt19937_64 rng(8);
  double sum = 0.0;
  std::int64_t smallest = 1 << 30;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    auto c = draw_connections(rng, rate);
    sum += double(c);
    smallest = std::min(smallest, c);
  }
  EXPECT_GE(smallest, 1);
  EXPECT_NEAR(sum / n, 1.0 / rate, 0.02 / rate);
}

std::vector<MetroId> pool(std::size_t n) {
  std::vector<MetroId> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("m" + std::to_string(100 + i));
  return out;
}

TEST(Topologies, DeterministicAndWellFormed) {
  TopologySpec spec;
  spec.size = 10;
  spec.count = 20;
  spec.metro_pool = pool(60);
  spec.seed = 9;
  auto a = gen_topologies(spec);
  auto b = gen_topologies(spec);
  ASSERT_EQ(a.size(), 20u);
  for (std::size_t t = 0; t < a.size(); ++t) {
    ASSERT_EQ(a[t].size(), 10u);
    std::set<MetroId> seen;
    for (std::size_t k = 0; k < a[t].size(); ++k) {
      EXPECT_EQ(a[t].offices()[k].metro, b[t].offices()[k].metro);
      EXPECT_EQ(a[t].offices()[k].connections, b[t].offices()[k].connections);
      seen.insert(a[t].offices()[k].metro);
    }
    EXPECT_EQ(seen.size(), 10u);
  }
  spec.seed = 10;
  auto c = gen_topologies(spec);
  bool differs = false;
  for (std::size_t t = 0; t < a.size(); ++t) differs |= a[t].total_connections() != c[t].total_connections();
  EXPECT_TRUE(differs);
}

TEST(Topologies, SizeAbovePoolRejected) {
  TopologySpec spec;
  spec.size = 5;
  spec.metro_pool = pool(4);
  EXPECT_THROW(gen_topologies(spec), ValidationError);
}

CorpusSpec small_spec(std::size_t metros, std::uint64_t seed) {
  CorpusSpec spec;
  spec.pops = default_pop_catalog();
  spec.metros = default_metro_coords(metros, seed);
  spec.days = 1;
  spec.rate_per_hour = 30;
  spec.seed = seed;
  return spec;
}

TEST(Corpus, Deterministic) {
  auto spec = small_spec(12, 3);
  auto a = gen_corpus(spec).records;
  auto b = gen_corpus(spec).records;
  ASSERT_EQ(a.size(), b.size());
  ASSERT_EQ(a.size(), 12u * 24u * 30u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].timestamp, b[i].timestamp);
    EXPECT_EQ(a[i].pop, b[i].pop);
    EXPECT_EQ(a[i].rtt_ms, b[i].rtt_ms);
  }
}

TEST(Corpus, AnycastInferenceMatchesRoutedPop) {
  auto spec = small_spec(60, 21);
  auto corpus = gen_corpus(spec);
  auto anycast = infer_anycast_default(corpus.records);
  ASSERT_EQ(anycast.size(), 60u);
  for (const auto& [metro, truth] : corpus.truth.metros) EXPECT_EQ(anycast.at(metro), truth.routed_pop) << metro;
}

TEST(Corpus, GeoPopIsNearestPop) {
  auto spec = small_spec(40, 5);
  auto truth = corpus_truth(spec);
  auto geo = compute_geo_default(spec.metros, spec.pops).nearest;
  for (const auto& [metro, t] : truth.metros) EXPECT_EQ(t.geo_pop, geo.at(metro));
}

TEST(Corpus, AnomalyCountFollowsFraction) {
  auto spec = small_spec(100, 17);
  auto truth = corpus_truth(spec);
  std::size_t anomalous = 0;
  for (const auto& [m, t] : truth.metros) anomalous += t.anomalous ? 1 : 0;
  EXPECT_EQ(anomalous, std::min<std::size_t>(20, truth.eligible_for_anomaly));
  EXPECT_GE(truth.eligible_for_anomaly, 20u);
}

TEST(Corpus, NoAnomalyZeroJitterGeoIsFastest) {
  auto spec = small_spec(30, 8);
  spec.anomaly_fraction = 0.0;
  spec.jitter_sigma = 0.0;
  auto corpus = gen_corpus(spec);
  std::map<std::pair<MetroId, PopId>, double> best;
  for (const auto& r : corpus.records) {
    auto [it, fresh] = best.emplace(std::make_pair(r.metro, r.pop), r.rtt_ms);
    if (!fresh) it->second = std::min(it->second, r.rtt_ms);
  }
  for (const auto& [metro, t] : corpus.truth.metros) {
    const double geo = best.at({metro, t.geo_pop});
    for (const auto& pop : t.measured) EXPECT_LE(geo, best.at({metro, pop})) << metro << " " << pop;
    EXPECT_EQ(t.fastest_pop, t.geo_pop);
  }
}

TEST(Corpus, AnomalousMetrosHaveFasterAlternative) {
  auto spec = small_spec(50, 13);
  auto truth = corpus_truth(spec);
  for (const auto& [metro, t] : truth.metros) {
    if (!t.anomalous) continue;
    const auto at = spec.start + 3600;
    EXPECT_LT(corpus_base_latency(spec, truth, metro, t.fastest_pop, at),
              corpus_base_latency(spec, truth, metro, t.geo_pop, at));
  }
}

TEST(Corpus, OnsetDelaysInflation) {
  auto spec = small_spec(50, 13);
  spec.days = 4;
  spec.anomaly_onset_day = 2;
  auto truth = corpus_truth(spec);
  for (const auto& [metro, t] : truth.metros) {
    if (!t.anomalous) continue;
    const double before = corpus_base_latency(spec, truth, metro, t.geo_pop, spec.start);
    const double after = corpus_base_latency(spec, truth, metro, t.geo_pop, spec.start + 2 * 86400);
    EXPECT_DOUBLE_EQ(after, before * spec.anomaly_inflation);
  }
}

TEST(Corpus, NeedsTwoPops) {
  CorpusSpec spec;
  spec.pops = PopCatalog({{"x", {0, 0}}});
  spec.metros = {{"m", {1, 1}}};
  EXPECT_THROW(corpus_truth(spec), ValidationError);
}

TEST(DeriveSeed, DistinctStreams) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 1000; ++s) seen.insert(derive_seed(42, s));
  EXPECT_EQ(seen.size(), 1000u);
}

}  // namespace
}  // namespace hubplan
