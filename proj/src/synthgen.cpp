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

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace hubplan {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double exponential_band_mass(double rate, double lo, double hi) {
  return std::exp(-lo * rate) - std::exp(-hi * rate);
}

RateBranch parse_rate_branch(const std::string& text) {
  if (text == "lower") return RateBranch::lower;
  if (text == "upper") return RateBranch::upper;
  throw ValidationError("rate branch must be lower or upper, got '" + text + "'");
}

std::string to_string(RateBranch branch) { return branch == RateBranch::lower ? "lower" : "upper"; }

double calibrate_exponential_rate(double lo, double hi, double mass, RateBranch branch) {
  if (!(lo > 0.0 && hi > lo)) throw ValidationError("band must satisfy 0 < lo < hi");
  const double peak_rate = std::log(hi / lo) / (hi - lo);
  const double peak_mass = exponential_band_mass(peak_rate, lo, hi);
  if (!(mass > 0.0 && mass <= peak_mass))
    throw ValidationError("no exponential rate puts that much mass in the band");
  // Mass rises on (0, peak_rate] and falls on [peak_rate, inf).
  double a = branch == RateBranch::lower ? 0.0 : peak_rate;
  double b = peak_rate;
  if (branch == RateBranch::upper)
    while (exponential_band_mass(b, lo, hi) > mass) b *= 2.0;
  const bool rising = branch == RateBranch::lower;
  for (int iter = 0; iter < 200 && b - a > 0.0; ++iter) {
    const double mid = 0.5 * (a + b);
    if (mid == a || mid == b) break;
    const bool below = exponential_band_mass(mid, lo, hi) < mass;
    if (below == rising)
      a = mid;
    else
      b = mid;
  }
  return 0.5 * (a + b);
}

std::int64_t draw_connections(std::mt19937_64& rng, double rate) {
  std::exponential_distribution<double> dist(rate);
  return std::max<std::int64_t>(1, std::llround(dist(rng)));
}

std::vector<EnterpriseTopology> gen_topologies(const TopologySpec& spec) {
  if (spec.size == 0) throw ValidationError("topology size must be >= 1");
  if (spec.size > spec.metro_pool.size())
    throw ValidationError("topology size " + std::to_string(spec.size) + " exceeds metro pool of " +
                          std::to_string(spec.metro_pool.size()));
  const double rate = spec.rate > 0.0 ? spec.rate : calibrate_exponential_rate();
  std::vector<EnterpriseTopology> out;
  out.reserve(spec.count);
  for (std::size_t t = 0; t < spec.count; ++t) {
    std::mt19937_64 rng(derive_seed(spec.seed, t));
    std::vector<MetroId> pool = spec.metro_pool;
    std::vector<BranchOffice> offices;
    for (std::size_t k = 0; k < spec.size; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, pool.size() - 1);
      std::swap(pool[k], pool[pick(rng)]);
      offices.push_back({pool[k], draw_connections(rng, rate)});
    }
    std::sort(offices.begin(), offices.end(),
              [](const BranchOffice& a, const BranchOffice& b) { return a.metro < b.metro; });
    out.emplace_back(std::move(offices));
  }
  return out;
}

PopCatalog default_pop_catalog() {
  return PopCatalog({
      {"atl", {33.749, -84.388}},  {"chi", {41.878, -87.630}},  {"dal", {32.777, -96.797}},
      {"den", {39.739, -104.990}}, {"lax", {34.052, -118.244}}, {"mia", {25.762, -80.192}},
      {"nyc", {40.713, -74.006}},  {"phx", {33.448, -112.074}}, {"sea", {47.606, -122.332}},
      {"sjc", {37.339, -121.895}}, {"was", {38.907, -77.037}},  {"ams", {52.368, 4.904}},
      {"fra", {50.110, 8.682}},    {"lon", {51.507, -0.128}},   {"par", {48.857, 2.352}},
      {"sin", {1.352, 103.820}},   {"tyo", {35.676, 139.650}},
  });
}

std::map<MetroId, GeoPoint> default_metro_coords(std::size_t count, std::uint64_t seed) {
  const auto pops = default_pop_catalog();
  std::mt19937_64 rng(derive_seed(seed, 0xC00D));
  std::uniform_int_distribution<std::size_t> anchor(0, pops.size() - 1);
  std::uniform_real_distribution<double> dlat(-5.0, 5.0);
  std::uniform_real_distribution<double> dlon(-7.0, 7.0);
  std::map<MetroId, GeoPoint> out;
  for (std::size_t k = 0; k < count; ++k) {
    const auto& site = pops.sites()[anchor(rng)];
    GeoPoint p{std::clamp(site.location.lat + dlat(rng), -89.0, 89.0), site.location.lon + dlon(rng)};
    if (p.lon > 180.0) p.lon -= 360.0;
    if (p.lon < -180.0) p.lon += 360.0;
    char name[32];
    std::snprintf(name, sizeof(name), "metro-%03zu", k);
    out.emplace(name, p);
  }
  return out;
}

DetourPolicy parse_detour_policy(const std::string& text) {
  if (text == "fastest_alternate") return DetourPolicy::fastest_alternate;
  if (text == "slowest_alternate") return DetourPolicy::slowest_alternate;
  throw ValidationError("detour policy must be fastest_alternate or slowest_alternate");
}

std::string to_string(DetourPolicy policy) {
  return policy == DetourPolicy::fastest_alternate ? "fastest_alternate" : "slowest_alternate";
}

namespace {

void check_spec(const CorpusSpec& spec) {
  if (spec.pops.size() < 2) throw ValidationError("corpus needs at least 2 PoPs");
  if (spec.metros.empty()) throw ValidationError("corpus needs at least one metro");
  if (spec.days == 0) throw ValidationError("corpus needs at least one day");
  if (spec.rate_per_hour == 0) throw ValidationError("rate must be >= 1 per hour");
  if (!(spec.anomaly_fraction >= 0.0 && spec.anomaly_fraction <= 1.0))
    throw ValidationError("anomaly fraction must lie in [0, 1]");
  if (!(spec.anomaly_inflation >= 1.0)) throw ValidationError("anomaly inflation must be >= 1");
  if (!(spec.anomaly_margin > 0.0 && spec.anomaly_margin <= 1.0))
    throw ValidationError("anomaly margin must lie in (0, 1]");
  if (!(spec.detour_fraction >= 0.0 && spec.detour_fraction <= 1.0))
    throw ValidationError("detour fraction must lie in [0, 1]");
  if (!(spec.routed_share > 0.5 && spec.routed_share <= 1.0))
    throw ValidationError("routed share must lie in (0.5, 1]");
  if (!(spec.jitter_sigma >= 0.0)) throw ValidationError("jitter sigma must be >= 0");
  if (spec.alternates == 0) throw ValidationError("at least one alternate PoP is required");
}

Millis distance_latency(const CorpusSpec& spec, const GeoPoint& metro, const GeoPoint& pop) {
  return spec.base_ms + spec.ms_per_km * haversine_km(metro, pop);
}

}  // namespace

CorpusTruth corpus_truth(const CorpusSpec& spec) {
  check_spec(spec);
  CorpusTruth truth;
  std::vector<MetroId> eligible;
  std::map<MetroId, std::vector<PopId>> ranked;
  for (const auto& [metro, point] : spec.metros) {
    ranked[metro] = pops_by_distance(point, spec.pops);
    const auto& order = ranked[metro];
    const double geo = distance_latency(spec, point, spec.pops.at(order[0]).location);
    const double second = distance_latency(spec, point, spec.pops.at(order[1]).location);
    if (second < spec.anomaly_margin * spec.anomaly_inflation * geo) eligible.push_back(metro);
  }
  truth.eligible_for_anomaly = eligible.size();

  std::mt19937_64 rng(derive_seed(spec.seed, 0xA11));
  std::shuffle(eligible.begin(), eligible.end(), rng);
  const auto wanted = static_cast<std::size_t>(
      std::llround(spec.anomaly_fraction * static_cast<double>(spec.metros.size())));
  eligible.resize(std::min(wanted, eligible.size()));
  const auto detoured = static_cast<std::size_t>(
      std::llround(spec.detour_fraction * static_cast<double>(eligible.size())));

  const std::size_t measured_count = std::min(spec.alternates + 1, spec.pops.size());
  for (const auto& [metro, point] : spec.metros) {
    const auto& order = ranked[metro];
    MetroTruth t;
    t.geo_pop = order[0];
    auto pos = std::find(eligible.begin(), eligible.end(), metro);
    t.anomalous = pos != eligible.end();
    t.detoured = t.anomalous && static_cast<std::size_t>(pos - eligible.begin()) < detoured;
    t.routed_pop = order[0];
    if (t.detoured) {
      const std::size_t slot =
          spec.detour_policy == DetourPolicy::fastest_alternate ? 1 : measured_count - 1;
      t.routed_pop = order[std::max<std::size_t>(1, slot)];
    }
    t.measured.push_back(t.routed_pop);
    for (const auto& pop : order) {
      if (t.measured.size() >= measured_count) break;
      if (pop != t.routed_pop) t.measured.push_back(pop);
    }
    t.fastest_pop = t.anomalous ? order[1] : order[0];
    truth.metros.emplace(metro, std::move(t));
  }
  return truth;
}

Millis corpus_base_latency(const CorpusSpec& spec, const CorpusTruth& truth, const MetroId& metro,
                           const PopId& pop, UnixSeconds t) {
  const auto& mt = truth.metros.at(metro);
  double ms = distance_latency(spec, spec.metros.at(metro), spec.pops.at(pop).location);
  const UnixSeconds onset = spec.start + static_cast<UnixSeconds>(spec.anomaly_onset_day) * 86400;
  if (mt.anomalous && pop == mt.geo_pop && t >= onset) ms *= spec.anomaly_inflation;
  return ms;
}

CorpusTruth gen_corpus(const CorpusSpec& spec, const std::function<void(const MeasurementRecord&)>& sink) {
  CorpusTruth truth = corpus_truth(spec);
  std::vector<std::mt19937_64> streams;
  std::vector<const MetroId*> metros;
  std::uint64_t index = 0;
  for (const auto& [metro, point] : spec.metros) {
    streams.emplace_back(derive_seed(spec.seed, 0x5EED0000ULL + index++));
    metros.push_back(&metro);
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // One normal per stream: the distribution caches its second variate.
  std::vector<std::normal_distribution<double>> normals(metros.size());
  std::vector<MeasurementRecord> block;
  const std::size_t hours = spec.days * 24;
  for (std::size_t h = 0; h < hours; ++h) {
    const UnixSeconds hour_start = spec.start + static_cast<UnixSeconds>(h) * 3600;
    for (std::size_t k = 0; k < metros.size(); ++k) {
      auto& rng = streams[k];
      const auto& metro = *metros[k];
      const auto& mt = truth.metros.at(metro);
      const std::size_t alternates = mt.measured.size() - 1;
      block.clear();
      for (std::size_t n = 0; n < spec.rate_per_hour; ++n) {
        MeasurementRecord r;
        r.timestamp = hour_start + static_cast<UnixSeconds>(unit(rng) * 3600.0);
        r.metro = metro;
        r.network = "as" + std::to_string(64512 + k % 1000);
        const double u = unit(rng);
        std::size_t slot = 0;
        if (u >= spec.routed_share && alternates > 0)
          slot = 1 + std::min(alternates - 1, static_cast<std::size_t>(
                                                  (u - spec.routed_share) / (1.0 - spec.routed_share) *
                                                  static_cast<double>(alternates)));
        r.pop = mt.measured[slot];
        const double base = corpus_base_latency(spec, truth, metro, r.pop, r.timestamp);
        const double z = normals[k](rng);
        r.rtt_ms = std::round(base * std::exp(spec.jitter_sigma * z) * 1000.0) / 1000.0;
        r.rtt_ms = std::max(r.rtt_ms, 0.001);
        block.push_back(std::move(r));
      }
      std::stable_sort(block.begin(), block.end(), [](const MeasurementRecord& a, const MeasurementRecord& b) {
        return a.timestamp < b.timestamp;
      });
      for (const auto& r : block) sink(r);
    }
  }
  return truth;
}

Corpus gen_corpus(const CorpusSpec& spec) {
  Corpus corpus;
  corpus.truth = gen_corpus(spec, [&](const MeasurementRecord& r) { corpus.records.push_back(r); });
  return corpus;
}

}  // namespace hubplan
