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

#pragma once

#include "hubplan/core.hpp"
#include "hubplan/ingest.hpp"

#include <functional>
#include <random>

namespace hubplan {

/// splitmix64 step, used to derive independent per-stream seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// P(lo <= X <= hi) for X ~ Exponential(rate).
double exponential_band_mass(double rate, double lo, double hi);

/// The band mass is unimodal in the rate, so a target mass below the peak
/// is hit by two rates.
enum class RateBranch { lower, upper };

RateBranch parse_rate_branch(const std::string& text);
std::string to_string(RateBranch branch);

/// Rate with exponential_band_mass(rate, lo, hi) == mass, by bisection on
/// the requested branch.
double calibrate_exponential_rate(double lo = 100.0, double hi = 10000.0, double mass = 0.9,
                                  RateBranch branch = RateBranch::upper);

/// One connection count: exponential draw rounded to nearest, floor 1.
std::int64_t draw_connections(std::mt19937_64& rng, double rate);

struct TopologySpec {
  std::size_t size = 10;
  std::size_t count = 100;
  std::vector<MetroId> metro_pool;
  std::uint64_t seed = 1;
  double rate = 0.0;  // 0 selects calibrate_exponential_rate()
};

std::vector<EnterpriseTopology> gen_topologies(const TopologySpec& spec);

/// Seventeen PoPs with real-world coordinates.
PopCatalog default_pop_catalog();

/// `count` metros named metro-000.. scattered around the default PoPs.
std::map<MetroId, GeoPoint> default_metro_coords(std::size_t count, std::uint64_t seed);

enum class DetourPolicy { fastest_alternate, slowest_alternate };

DetourPolicy parse_detour_policy(const std::string& text);
std::string to_string(DetourPolicy policy);

struct CorpusSpec {
  PopCatalog pops;
  std::map<MetroId, GeoPoint> metros;
  UnixSeconds start = 1633046400;  // 2021-10-01T00:00:00Z
  std::size_t days = 2;
  std::size_t rate_per_hour = 60;
  double anomaly_fraction = 0.20;
  double anomaly_inflation = 2.0;
  /// A metro may be made anomalous only if its second-nearest PoP is below
  /// anomaly_margin * anomaly_inflation times its geo-default latency.
  double anomaly_margin = 0.7;
  std::size_t anomaly_onset_day = 0;  // inflation active from this day on
  double detour_fraction = 0.5;       // share of anomalous metros routed away from geo
  DetourPolicy detour_policy = DetourPolicy::fastest_alternate;
  double jitter_sigma = 0.1;
  double routed_share = 0.8;
  std::size_t alternates = 3;
  double ms_per_km = 0.03;
  double base_ms = 5.0;
  std::uint64_t seed = 1;
};

struct MetroTruth {
  PopId routed_pop;
  PopId geo_pop;
  bool anomalous = false;
  bool detoured = false;
  PopId fastest_pop;              // true-latency argmin once anomalies are active
  std::vector<PopId> measured;    // routed first, then alternates by distance
};

struct CorpusTruth {
  std::map<MetroId, MetroTruth> metros;
  std::size_t eligible_for_anomaly = 0;
};

/// Noise-free latency the generator uses for (metro, pop) at time `t`.
Millis corpus_base_latency(const CorpusSpec& spec, const CorpusTruth& truth, const MetroId& metro,
                           const PopId& pop, UnixSeconds t);

/// Ground truth only, without generating records.
CorpusTruth corpus_truth(const CorpusSpec& spec);

/// Streams records hour by hour (metros in id order within an hour).
CorpusTruth gen_corpus(const CorpusSpec& spec, const std::function<void(const MeasurementRecord&)>& sink);

struct Corpus {
  std::vector<MeasurementRecord> records;
  CorpusTruth truth;
};

Corpus gen_corpus(const CorpusSpec& spec);

}  // namespace hubplan
