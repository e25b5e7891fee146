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

#include "hubplan/geo.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace hubplan {

Percentile parse_percentile(const std::string& text) {
  if (text == "median" || text == "p50") return Percentile::median;
  if (text == "p90") return Percentile::p90;
  if (text == "p95") return Percentile::p95;
  throw ValidationError("percentile must be median, p90 or p95, got '" + text + "'");
}

std::string to_string(Percentile p) {
  switch (p) {
    case Percentile::median: return "median";
    case Percentile::p90: return "p90";
    case Percentile::p95: return "p95";
  }
  return "p90";
}

double quantile_of(Percentile p) {
  switch (p) {
    case Percentile::median: return 0.5;
    case Percentile::p90: return 0.9;
    case Percentile::p95: return 0.95;
  }
  return 0.9;
}

double nearest_rank(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw ContractViolation("nearest_rank on empty sample");
  const auto n = static_cast<double>(sorted.size());
  // Integer ceil of q*n guarded against 0.9*100 = 90.00000000000001.
  double rank = std::ceil(q * n - 1e-9);
  rank = std::clamp(rank, 1.0, n);
  return sorted[static_cast<std::size_t>(rank) - 1];
}

Millis WindowStat::value(Percentile p) const {
  switch (p) {
    case Percentile::median: return median;
    case Percentile::p90: return p90;
    case Percentile::p95: return p95;
  }
  return p90;
}

UnixSeconds window_start_of(UnixSeconds t, UnixSeconds window_len) {
  auto r = t % window_len;
  if (r < 0) r += window_len;
  return t - r;
}

WindowAggregator::WindowAggregator(UnixSeconds window_len) : window_len_(window_len) {
  if (window_len_ <= 0) throw ValidationError("window length must be > 0");
}

void WindowAggregator::add(const MeasurementRecord& record) {
  const auto row = rows_seen_++;
  if (!std::isfinite(record.rtt_ms) || record.rtt_ms <= 0.0) {
    diagnostics_.push_back({row, "rtt must be finite and > 0"});
    return;
  }
  if (record.metro.empty() || record.pop.empty()) {
    diagnostics_.push_back({row, "empty metro or pop"});
    return;
  }
  auto& bucket = samples_[{record.metro, record.pop, window_start_of(record.timestamp, window_len_)}];
  if (bucket.rtts.empty()) {
    bucket.network = record.network;
  } else if (bucket.network != record.network) {
    bucket.network = kMixedNetworks;
  }
  bucket.rtts.push_back(record.rtt_ms);
}

std::vector<WindowStat> WindowAggregator::finish() {
  std::vector<WindowStat> out;
  out.reserve(samples_.size());
  for (auto& [key, bucket] : samples_) {
    auto& values = bucket.rtts;
    std::sort(values.begin(), values.end());
    WindowStat s;
    s.network = bucket.network;
    s.window_start = key.window_start;
    s.metro = key.metro;
    s.pop = key.pop;
    s.sample_count = static_cast<std::int64_t>(values.size());
    s.median = nearest_rank(values, 0.5);
    s.p90 = nearest_rank(values, 0.9);
    s.p95 = nearest_rank(values, 0.95);
    s.min_rtt = values.front();
    out.push_back(std::move(s));
  }
  samples_.clear();
  return out;
}

AggregateResult aggregate_windows(std::span<const MeasurementRecord> records, UnixSeconds window_len) {
  WindowAggregator agg(window_len);
  for (const auto& r : records) agg.add(r);
  AggregateResult out;
  out.rejected = agg.diagnostics();
  out.stats = agg.finish();
  return out;
}

std::vector<WindowStat> coarsen(std::span<const WindowStat> stats, UnixSeconds horizon) {
  if (horizon <= 0) throw ValidationError("horizon must be > 0");
  struct Acc {
    std::int64_t n = 0;
    double median = 0, p90 = 0, p95 = 0;
    double min_rtt = std::numeric_limits<double>::infinity();
    std::string network;
    const WindowStat* only = nullptr;
    std::size_t windows = 0;
  };
  std::map<std::tuple<MetroId, PopId, UnixSeconds>, Acc> acc;
  for (const auto& s : stats) {
    auto& a = acc[{s.metro, s.pop, window_start_of(s.window_start, horizon)}];
    const auto w = static_cast<double>(s.sample_count);
    a.n += s.sample_count;
    a.median += w * s.median;
    a.p90 += w * s.p90;
    a.p95 += w * s.p95;
    a.min_rtt = std::min(a.min_rtt, s.min_rtt);
    if (a.windows == 0) {
      a.network = s.network;
    } else if (a.network != s.network) {
      a.network = kMixedNetworks;
    }
    if (a.windows++ == 0) a.only = &s;
  }
  std::vector<WindowStat> out;
  out.reserve(acc.size());
  for (const auto& [key, a] : acc) {
    WindowStat s;
    if (a.windows == 1) {
      s = *a.only;
      s.window_start = std::get<2>(key);
      out.push_back(std::move(s));
      continue;
    }
    std::tie(s.metro, s.pop, s.window_start) = key;
    s.network = a.network;
    s.sample_count = a.n;
    const auto n = static_cast<double>(a.n);
    s.median = a.median / n;
    s.p90 = a.p90 / n;
    s.p95 = a.p95 / n;
    s.min_rtt = a.min_rtt;
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

std::map<MetroId, PopId> argmax_counts(const std::map<MetroId, std::map<PopId, std::int64_t>>& counts) {
  std::map<MetroId, PopId> out;
  for (const auto& [metro, per_pop] : counts) {
    const PopId* best = nullptr;
    std::int64_t best_count = -1;
    // per_pop iterates in ascending id order, so strict > keeps the smallest id on ties.
    for (const auto& [pop, n] : per_pop) {
      if (n > best_count) {
        best_count = n;
        best = &pop;
      }
    }
    if (best) out.emplace(metro, *best);
  }
  return out;
}

}  // namespace

std::map<MetroId, PopId> infer_anycast_default(std::span<const MeasurementRecord> records) {
  std::map<MetroId, std::map<PopId, std::int64_t>> counts;
  for (const auto& r : records) ++counts[r.metro][r.pop];
  return argmax_counts(counts);
}

std::map<MetroId, PopId> infer_anycast_default(std::span<const WindowStat> stats) {
  std::map<MetroId, std::map<PopId, std::int64_t>> counts;
  for (const auto& s : stats) counts[s.metro][s.pop] += s.sample_count;
  return argmax_counts(counts);
}

GeoDefaults compute_geo_default(const std::map<MetroId, GeoPoint>& coords, const PopCatalog& pops,
                                std::span<const MetroId> metros) {
  GeoDefaults out;
  auto resolve = [&](const MetroId& metro, const GeoPoint& point) {
    if (!(point.lat >= -90.0 && point.lat <= 90.0 && point.lon >= -180.0 && point.lon <= 180.0)) {
      out.unresolved.push_back(metro);
      return;
    }
    out.nearest.emplace(metro, pops_by_distance(point, pops).front());
  };
  if (metros.empty()) {
    for (const auto& [metro, point] : coords) resolve(metro, point);
  } else {
    for (const auto& metro : std::set<MetroId>(metros.begin(), metros.end())) {
      auto it = coords.find(metro);
      if (it == coords.end())
        out.unresolved.push_back(metro);
      else
        resolve(metro, it->second);
    }
  }
  return out;
}

DefaultsTable make_defaults_table(const std::map<MetroId, PopId>& anycast,
                                  const std::map<MetroId, PopId>& geo, const PopCatalog& pops) {
  DefaultsTable out;
  for (const auto& [metro, any_pop] : anycast) {
    auto it = geo.find(metro);
    if (it == geo.end()) continue;
    if (!pops.contains(any_pop) || !pops.contains(it->second))
      throw ValidationError("defaults for " + metro + " reference a PoP outside the catalog");
    out.emplace(metro, Defaults{any_pop, it->second});
  }
  return out;
}

RangeAggregation parse_range_aggregation(const std::string& text) {
  if (text == "mean-of-windows") return RangeAggregation::mean_of_windows;
  if (text == "raw-percentile") return RangeAggregation::raw_percentile;
  throw ValidationError("aggregation must be mean-of-windows or raw-percentile, got '" + text + "'");
}

namespace {

void check_options(const MatrixBuildOptions& options) {
  if (options.min_samples < 1) throw ValidationError("min_samples must be >= 1");
  if (options.range.begin >= options.range.end) throw ValidationError("empty time range");
}

MatrixBuildResult finish_matrix(std::vector<LatencyEntry> entries, const std::set<MetroId>& seen) {
  MatrixBuildResult out;
  std::set<MetroId> kept;
  for (const auto& e : entries) kept.insert(e.metro);
  for (const auto& metro : seen)
    if (!kept.count(metro)) out.dropped_metros.push_back(metro);
  out.matrix = LatencyMatrix::from_entries(std::move(entries));
  return out;
}

}  // namespace

MatrixBuildResult build_latency_matrix(std::span<const WindowStat> stats,
                                       const MatrixBuildOptions& options) {
  check_options(options);
  struct Acc {
    std::int64_t samples = 0;
    double sum = 0.0;
    std::int64_t windows = 0;
  };
  std::map<std::pair<MetroId, PopId>, Acc> acc;
  std::set<MetroId> seen;
  for (const auto& s : stats) {
    if (!options.range.contains(s.window_start)) continue;
    seen.insert(s.metro);
    auto& a = acc[{s.metro, s.pop}];
    a.samples += s.sample_count;
    a.sum += s.value(options.percentile);
    ++a.windows;
  }
  std::vector<LatencyEntry> entries;
  for (const auto& [key, a] : acc)
    if (a.samples >= options.min_samples)
      entries.push_back({key.first, key.second, a.sum / static_cast<double>(a.windows)});
  return finish_matrix(std::move(entries), seen);
}

MatrixBuildResult build_latency_matrix_raw(std::span<const MeasurementRecord> records,
                                           const MatrixBuildOptions& options) {
  check_options(options);
  std::map<std::pair<MetroId, PopId>, std::vector<double>> samples;
  std::set<MetroId> seen;
  for (const auto& r : records) {
    if (!options.range.contains(r.timestamp)) continue;
    if (!std::isfinite(r.rtt_ms) || r.rtt_ms <= 0.0) continue;
    seen.insert(r.metro);
    samples[{r.metro, r.pop}].push_back(r.rtt_ms);
  }
  std::vector<LatencyEntry> entries;
  for (auto& [key, values] : samples) {
    if (static_cast<std::int64_t>(values.size()) < options.min_samples) continue;
    std::sort(values.begin(), values.end());
    entries.push_back({key.first, key.second, nearest_rank(values, quantile_of(options.percentile))});
  }
  return finish_matrix(std::move(entries), seen);
}

}  // namespace hubplan
