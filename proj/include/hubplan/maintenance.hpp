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

#include "hubplan/analysis.hpp"
#include "hubplan/optimizer.hpp"

namespace hubplan {

/// Whether a window's placement is scored on the following window or on
/// the window it was computed from.
enum class EvalOffset { next, same };

EvalOffset parse_eval_offset(const std::string& text);
std::string to_string(EvalOffset offset);

struct MaintenanceOptions {
  std::size_t window_days = 4;
  std::vector<double> gammas = {1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1};
  std::vector<Mode> modes = {Mode::l_optimal, Mode::k_optimal, Mode::mean_k};
  std::int64_t min_samples = 20;  // per-metro filter over the whole range
  Percentile percentile = Percentile::p90;
  SmoothingForm smoothing = SmoothingForm::recursive;
  EvalOffset offset = EvalOffset::next;
  /// Only windows starting at or after this time are scored.
  std::optional<UnixSeconds> evaluate_from;
  std::vector<std::size_t> topology_sizes = {5, 10, 25, 35, 45};
  std::size_t topologies_per_size = 10;
  std::int64_t beta = kDefaultBeta;
  std::uint64_t seed = 1;
};

struct MaintenanceRow {
  std::optional<double> gamma;  // nullopt for the static reference
  std::size_t window_days = 0;
  Mode mode = Mode::l_optimal;
  double latency_pct_change = 0.0;  // vs geo placement on the same windows
  double hub_pct_change = 0.0;      // vs baseline-1
  std::size_t evaluations = 0;
  std::size_t flagged = 0;  // metro evaluations that fell back to a last-known latency
};

struct MaintenanceReport {
  std::vector<MaintenanceRow> rows;
  std::vector<MetroId> metros;  // metros that passed the sample filter
  std::size_t windows = 0;
  std::size_t topologies = 0;
};

/// Splits the range into non-overlapping windows, re-plans every window
/// from smoothed latencies and scores each placement against realized
/// latencies, relative to the geo-default placement.
MaintenanceReport maintenance_sim(std::span<const WindowStat> stats, const PopCatalog& pops,
                                  const std::map<MetroId, GeoPoint>& metro_coords,
                                  const MaintenanceOptions& options = {},
                                  std::vector<EnterpriseTopology> topologies = {});

}  // namespace hubplan
