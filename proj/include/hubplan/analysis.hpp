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

namespace hubplan {

/// Per-window statistic read by the measurement analyses. `min` is the
/// window's minimum rtt.
enum class WindowMetric { min, median, p90, p95 };

WindowMetric parse_window_metric(const std::string& text);
std::string to_string(WindowMetric metric);
Millis metric_value(const WindowStat& stat, WindowMetric metric);

struct SamplingOptions {
  WindowMetric metric = WindowMetric::min;
  std::size_t samples_per_metro = 50;
  UnixSeconds horizon = kTenMinutes;
  std::uint64_t seed = 1;
};

struct OpportunitySample {
  MetroId metro;
  UnixSeconds window_start = 0;
  UnixSeconds horizon = kTenMinutes;
  double log2_ratio = 0.0;  // log2(geo-default / fastest non-default)
  WindowMetric metric = WindowMetric::min;
};

struct OpportunityResult {
  std::vector<OpportunitySample> samples;  // sorted by (metro, window_start)
  std::vector<MetroId> discarded;          // too few eligible windows
};

/// For each metro, samples `samples_per_metro` windows that measured both
/// the geo-default and at least one other PoP, and reports the log2 ratio
/// of the geo-default's statistic to the best other PoP's.
OpportunityResult opportunity_analysis(std::span<const WindowStat> stats,
                                       const std::map<MetroId, PopId>& geo_default,
                                       const SamplingOptions& options = {});

/// Number of sampled windows (out of samples_per_metro) in which some
/// non-default PoP strictly beat the geo-default.
std::map<MetroId, std::size_t> faster_pop_counts(std::span<const WindowStat> stats,
                                                 const std::map<MetroId, PopId>& geo_default,
                                                 const SamplingOptions& options = {});

/// Restricted to metros whose anycast-default differs from the
/// geo-default: sampled windows in which the anycast-default was fastest.
std::map<MetroId, std::size_t> anycast_fastest_counts(std::span<const WindowStat> stats,
                                                      const DefaultsTable& defaults,
                                                      const SamplingOptions& options = {});

struct DecisionOptions {
  std::vector<std::size_t> sample_sizes = {10, 20, 30, 40, 50};
  std::size_t repeats = 10;
  UnixSeconds range = 2 * 86400;
  std::uint64_t seed = 1;
};

struct DecisionQuality {
  double match_pct = 0.0;
  double no_match_pct = 0.0;
  /// match / (match + no_match), ignoring groups without enough samples.
  double conditional_match_pct = 0.0;
};

/// Compares the PoP with the lowest mean over n sampled rtts against the
/// PoP with the lowest mean over every rtt in the same range group.
/// Groups where some PoP has fewer than n samples count as neither.
std::map<std::size_t, DecisionQuality> decision_quality(std::span<const MeasurementRecord> records,
                                                        const DecisionOptions& options = {});

enum class SmoothingForm { recursive, literal };

SmoothingForm parse_smoothing_form(const std::string& text);
std::string to_string(SmoothingForm form);

/// gamma * current + (1 - gamma) * previous, as an expression.
template <typename CurrentDerived, typename PreviousDerived>
auto ewma_step(typename CurrentDerived::Scalar gamma, const Eigen::ArrayBase<CurrentDerived>& current,
               const Eigen::ArrayBase<PreviousDerived>& previous) {
  return gamma * current.derived() + (typename CurrentDerived::Scalar(1) - gamma) * previous.derived();
}

/// Raw and smoothed (metro x pop) series over a shared label set.
struct SmoothedMatrixSeries {
  std::vector<MetroId> metros;
  std::vector<PopId> pops;
  double gamma = 1.0;
  SmoothingForm form = SmoothingForm::recursive;
  std::vector<MatrixX> raw;
  std::vector<MaskX> present;    // raw data exists in window w
  std::vector<MatrixX> smoothed; // NaN where !present
  std::vector<MatrixX> carried;  // latest smoothed value per cell, carried across gaps
  std::vector<MaskX> seen;       // cell observed at or before window w

  std::size_t windows() const { return raw.size(); }
  LatencyMatrix smoothed_matrix(std::size_t w) const;
};

SmoothedMatrixSeries smooth(std::span<const LatencyMatrix> series, double gamma,
                            SmoothingForm form = SmoothingForm::recursive);

}  // namespace hubplan
