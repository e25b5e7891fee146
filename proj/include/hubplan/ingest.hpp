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

#include <functional>
#include <limits>
#include <map>
#include <span>

namespace hubplan {

using UnixSeconds = std::int64_t;

inline constexpr UnixSeconds kTenMinutes = 600;

/// Network label of a window whose samples came from more than one network.
inline constexpr const char* kMixedNetworks = "*";

struct MeasurementRecord {
  UnixSeconds timestamp = 0;
  MetroId metro;
  std::string network;  // preserved, never used in computations
  PopId pop;
  Millis rtt_ms = 0.0;
};

/// Which per-window statistic a consumer reads.
enum class Percentile { median, p90, p95 };

Percentile parse_percentile(const std::string& text);
std::string to_string(Percentile p);
double quantile_of(Percentile p);

/// Nearest-rank quantile: the value at 1-based index ceil(q * n) of the
/// sorted samples. `sorted` must be non-empty and ascending.
double nearest_rank(std::span<const double> sorted, double q);

struct WindowStat {
  UnixSeconds window_start = 0;
  MetroId metro;
  std::string network;
  PopId pop;
  std::int64_t sample_count = 0;
  Millis median = 0.0;
  Millis p90 = 0.0;
  Millis p95 = 0.0;
  Millis min_rtt = 0.0;

  Millis value(Percentile p) const;
};

/// Window start for `t`, aligned to epoch multiples of `window_len`.
UnixSeconds window_start_of(UnixSeconds t, UnixSeconds window_len);

struct RowDiagnostic {
  std::size_t row = 0;  // 0-based position in the input stream
  std::string message;
};

/// Streaming per-(metro, pop, window) aggregator. Records may arrive in
/// any order; `finish()` sorts output by (metro, pop, window_start).
class WindowAggregator {
 public:
  explicit WindowAggregator(UnixSeconds window_len = kTenMinutes);

  void add(const MeasurementRecord& record);
  std::vector<WindowStat> finish();
  const std::vector<RowDiagnostic>& diagnostics() const { return diagnostics_; }

 private:
  struct Key {
    MetroId metro;
    PopId pop;
    UnixSeconds window_start;
    auto operator<=>(const Key&) const = default;
  };
  UnixSeconds window_len_;
  std::size_t rows_seen_ = 0;
  struct Bucket {
    std::vector<double> rtts;
    std::string network;
  };
  std::map<Key, Bucket> samples_;
  std::vector<RowDiagnostic> diagnostics_;
};

struct AggregateResult {
  std::vector<WindowStat> stats;
  std::vector<RowDiagnostic> rejected;
};

AggregateResult aggregate_windows(std::span<const MeasurementRecord> records,
                                  UnixSeconds window_len = kTenMinutes);

/// Merges windows into coarser buckets of `horizon` seconds: counts are
/// summed, minima take the minimum, percentiles the sample-weighted mean.
std::vector<WindowStat> coarsen(std::span<const WindowStat> stats, UnixSeconds horizon);

/// PoP with the most records per metro; ties go to the smallest PoP id.
std::map<MetroId, PopId> infer_anycast_default(std::span<const MeasurementRecord> records);

/// Same rule applied to aggregated rows, counting `sample_count`.
std::map<MetroId, PopId> infer_anycast_default(std::span<const WindowStat> stats);

struct GeoDefaults {
  std::map<MetroId, PopId> nearest;
  std::vector<MetroId> unresolved;
};

/// Nearest PoP by haversine distance for each metro in `metros`. Metros
/// lacking coordinates are reported in `unresolved`.
GeoDefaults compute_geo_default(const std::map<MetroId, GeoPoint>& coords, const PopCatalog& pops,
                                std::span<const MetroId> metros = {});

struct Defaults {
  PopId anycast;
  PopId geo;
};

using DefaultsTable = std::map<MetroId, Defaults>;

/// Joins both default maps over metros present in each.
DefaultsTable make_defaults_table(const std::map<MetroId, PopId>& anycast,
                                  const std::map<MetroId, PopId>& geo, const PopCatalog& pops);

struct TimeRange {
  UnixSeconds begin = std::numeric_limits<UnixSeconds>::min();
  UnixSeconds end = std::numeric_limits<UnixSeconds>::max();  // exclusive

  bool contains(UnixSeconds t) const { return t >= begin && t < end; }
};

enum class RangeAggregation { mean_of_windows, raw_percentile };

RangeAggregation parse_range_aggregation(const std::string& text);

struct MatrixBuildOptions {
  TimeRange range;
  Percentile percentile = Percentile::p90;
  std::int64_t min_samples = 20;
};

struct MatrixBuildResult {
  LatencyMatrix matrix;
  std::vector<MetroId> dropped_metros;  // metros with no surviving entry
};

/// Entry (metro, pop) is present iff its sample total within the range
/// reaches `min_samples`; the value is the mean of per-window percentiles.
MatrixBuildResult build_latency_matrix(std::span<const WindowStat> stats,
                                       const MatrixBuildOptions& options);

/// Percentile over every raw sample in the range.
MatrixBuildResult build_latency_matrix_raw(std::span<const MeasurementRecord> records,
                                           const MatrixBuildOptions& options);

}  // namespace hubplan
