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

#include "hubplan/maintenance.hpp"

#include "hubplan/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace hubplan {

EvalOffset parse_eval_offset(const std::string& text) {
  if (text == "next") return EvalOffset::next;
  if (text == "same") return EvalOffset::same;
  throw ValidationError("evaluation offset must be next or same, got '" + text + "'");
}

std::string to_string(EvalOffset offset) { return offset == EvalOffset::next ? "next" : "same"; }

namespace {

constexpr UnixSeconds kDay = 86400;

struct Accumulator {
  double latency_pct = 0.0;
  double hub_pct = 0.0;
  std::size_t evaluations = 0;
  std::size_t flagged = 0;
};

/// Row-major lookup into a SmoothedMatrixSeries' label space.
struct Labels {
  const std::vector<MetroId>* metros;
  const std::vector<PopId>* pops;

  Eigen::Index row(const MetroId& id) const {
    auto it = std::lower_bound(metros->begin(), metros->end(), id);
    return it != metros->end() && *it == id ? it - metros->begin() : -1;
  }
  Eigen::Index col(const PopId& id) const {
    auto it = std::lower_bound(pops->begin(), pops->end(), id);
    return it != pops->end() && *it == id ? it - pops->begin() : -1;
  }
};

/// Planning matrix for the topology's metros: current smoothed entries,
/// or the carried values for metros unmeasured in this window.
std::optional<LatencyMatrix> planning_matrix(const SmoothedMatrixSeries& series, std::size_t w,
                                             const EnterpriseTopology& topology) {
  const Labels labels{&series.metros, &series.pops};
  std::vector<LatencyEntry> entries;
  for (const auto& office : topology.offices()) {
    const auto r = labels.row(office.metro);
    if (r < 0) return std::nullopt;
    const bool current = series.present[w].row(r).any();
    const auto& mask = current ? series.present[w] : series.seen[w];
    const auto& values = current ? series.smoothed[w] : series.carried[w];
    bool any = false;
    for (Eigen::Index c = 0; c < mask.cols(); ++c) {
      if (!mask(r, c)) continue;
      entries.push_back({office.metro, series.pops[static_cast<std::size_t>(c)], values(r, c)});
      any = true;
    }
    if (!any) return std::nullopt;
  }
  return LatencyMatrix::from_entries(std::move(entries));
}

std::optional<LatencyMatrix> restrict_matrix(const LatencyMatrix& full, const EnterpriseTopology& topology) {
  std::vector<LatencyEntry> entries;
  for (const auto& office : topology.offices()) {
    auto j = full.metro_index(office.metro);
    if (!j) return std::nullopt;
    bool any = false;
    for (std::size_t i = 0; i < full.pops().size(); ++i) {
      const auto r = static_cast<Eigen::Index>(*j);
      const auto c = static_cast<Eigen::Index>(i);
      if (!full.present()(r, c)) continue;
      entries.push_back({office.metro, full.pops()[i], full.values()(r, c)});
      any = true;
    }
    if (!any) return std::nullopt;
  }
  return LatencyMatrix::from_entries(std::move(entries));
}

std::map<Mode, PlacementSolution> plan(const PlacementProblem& problem, const std::vector<Mode>& modes) {
  std::map<Mode, PlacementSolution> out;
  std::optional<std::size_t> k_min, k_max;
  auto lopt = l_optimal(problem);
  const auto& l = std::get<ModeResult>(lopt);
  k_max = l.k_max;
  auto need_k_min = [&] {
    if (!k_min) k_min = std::get<std::size_t>(find_k_min(problem));
    return *k_min;
  };
  for (auto mode : modes) {
    switch (mode) {
      case Mode::l_optimal: out[mode] = l.solution; break;
      case Mode::k_optimal:
        out[mode] = std::get<PlacementSolution>(solve(problem, {need_k_min(), std::nullopt}));
        break;
      case Mode::mean_k:
        out[mode] = std::get<PlacementSolution>(solve(problem, {mean_k_of(need_k_min(), *k_max), std::nullopt}));
        break;
      default: throw ValidationError("maintenance supports l_optimal, k_optimal and mean_k only");
    }
  }
  return out;
}

/// Scores an assignment on window `e`. Pairs unmeasured in `e` fall back to
/// their last realized value, then to the planning latency; each fallback
/// is counted in `flagged`.
double realized_latency(const PlacementSolution& solution, const PlacementProblem& problem,
                        const SmoothedMatrixSeries& history, std::size_t e, std::size_t& flagged) {
  const Labels labels{&history.metros, &history.pops};
  ArrayX latency(static_cast<Eigen::Index>(problem.metro_count()));
  for (std::size_t j = 0; j < problem.metro_count(); ++j) {
    const auto& a = solution.assignments[j];
    const auto r = labels.row(a.metro);
    const auto c = labels.col(a.pop);
    double value = a.latency_ms;
    if (r >= 0 && c >= 0 && history.present[e](r, c)) {
      value = history.raw[e](r, c);
    } else {
      ++flagged;
      if (r >= 0 && c >= 0 && history.seen[e](r, c)) value = history.carried[e](r, c);
    }
    latency(static_cast<Eigen::Index>(j)) = value;
  }
  return weighted_mean(problem.connections(), latency);
}

}  // namespace

MaintenanceReport maintenance_sim(std::span<const WindowStat> stats, const PopCatalog& pops,
                                  const std::map<MetroId, GeoPoint>& metro_coords,
                                  const MaintenanceOptions& options,
                                  std::vector<EnterpriseTopology> topologies) {
  if (options.window_days == 0) throw ValidationError("window_days must be >= 1");
  if (options.gammas.empty()) throw ValidationError("at least one gamma is required");
  if (options.min_samples < 1) throw ValidationError("min_samples must be >= 1");
  if (stats.empty()) throw ValidationError("maintenance needs window statistics");

  std::map<MetroId, std::int64_t> samples;
  for (const auto& s : stats) samples[s.metro] += s.sample_count;
  MaintenanceReport report;
  for (const auto& [metro, n] : samples)
    if (n >= options.min_samples && metro_coords.count(metro)) report.metros.push_back(metro);
  if (report.metros.empty()) throw ValidationError("no metro passes the sample filter");
  const std::set<MetroId> kept(report.metros.begin(), report.metros.end());

  std::vector<WindowStat> filtered;
  UnixSeconds first = std::numeric_limits<UnixSeconds>::max(), last = std::numeric_limits<UnixSeconds>::min();
  for (const auto& s : stats) {
    if (!kept.count(s.metro) || !pops.contains(s.pop)) continue;
    filtered.push_back(s);
    first = std::min(first, s.window_start);
    last = std::max(last, s.window_start);
  }
  const UnixSeconds origin = window_start_of(first, kDay);
  const UnixSeconds span = static_cast<UnixSeconds>(options.window_days) * kDay;
  const auto windows = static_cast<std::size_t>((last - origin) / span + 1);
  if (windows < 3)
    throw ValidationError("maintenance needs at least 3 windows, got " + std::to_string(windows));
  report.windows = windows;

  std::vector<LatencyMatrix> alpha;
  for (std::size_t w = 0; w < windows; ++w) {
    MatrixBuildOptions mb;
    mb.range = {origin + static_cast<UnixSeconds>(w) * span, origin + static_cast<UnixSeconds>(w + 1) * span};
    mb.percentile = options.percentile;
    mb.min_samples = 1;
    alpha.push_back(build_latency_matrix(filtered, mb).matrix);
  }
  MatrixBuildOptions whole;
  whole.percentile = options.percentile;
  whole.min_samples = 1;
  const LatencyMatrix static_matrix = build_latency_matrix(filtered, whole).matrix;
  // gamma = 1 carries the last realized value forward, which is exactly the
  // fallback the evaluation needs.
  const SmoothedMatrixSeries history = smooth(alpha, 1.0, SmoothingForm::recursive);

  const auto geo = compute_geo_default(metro_coords, pops, report.metros).nearest;
  DefaultsTable geo_table;
  for (const auto& [metro, pop] : geo) geo_table.emplace(metro, Defaults{pop, pop});

  if (topologies.empty()) {
    for (auto size : options.topology_sizes) {
      TopologySpec spec;
      spec.size = std::min(size, report.metros.size());
      spec.count = options.topologies_per_size;
      spec.metro_pool = report.metros;
      spec.seed = derive_seed(options.seed, size);
      for (auto& t : gen_topologies(spec)) topologies.push_back(std::move(t));
    }
  }
  report.topologies = topologies.size();

  std::vector<std::size_t> eval_windows;
  for (std::size_t e = options.offset == EvalOffset::next ? 1 : 0; e < windows; ++e)
    if (!options.evaluate_from || origin + static_cast<UnixSeconds>(e) * span >= *options.evaluate_from)
      eval_windows.push_back(e);
  if (eval_windows.empty()) throw ValidationError("no window left to evaluate");
  auto plan_window = [&](std::size_t e) { return options.offset == EvalOffset::next ? e - 1 : e; };

  auto score = [&](Accumulator& acc, const PlacementSolution& solution, const PlacementSolution& geo_solution,
                   const PlacementProblem& problem, std::size_t e) {
    const double lat = realized_latency(solution, problem, history, e, acc.flagged);
    std::size_t ignored = 0;
    const double geo_lat = realized_latency(geo_solution, problem, history, e, ignored);
    const auto b1 = baseline_hub_counts(problem, solution.assignment()).baseline1;
    acc.latency_pct += 100.0 * (lat - geo_lat) / geo_lat;
    acc.hub_pct += 100.0 * static_cast<double>(solution.total_hubs - b1) / static_cast<double>(b1);
    ++acc.evaluations;
  };

  std::map<Mode, std::vector<Accumulator>> acc;
  for (auto mode : options.modes) acc[mode].assign(options.gammas.size() + 1, {});

  for (std::size_t g = 0; g < options.gammas.size(); ++g) {
    const auto series = smooth(alpha, options.gammas[g], options.smoothing);
    for (const auto& topology : topologies) {
      for (auto e : eval_windows) {
        auto matrix = planning_matrix(series, plan_window(e), topology);
        if (!matrix) continue;
        const PlacementProblem problem(pops, topology, std::move(*matrix), options.beta);
        const auto placements = plan(problem, options.modes);
        const auto geo_solution = baseline_placement(problem, geo_table, BaselineKind::geo).solution;
        for (const auto& [mode, solution] : placements) score(acc[mode][g], solution, geo_solution, problem, e);
      }
    }
  }

  const std::size_t static_slot = options.gammas.size();
  for (const auto& topology : topologies) {
    auto matrix = restrict_matrix(static_matrix, topology);
    if (!matrix) continue;
    const PlacementProblem problem(pops, topology, std::move(*matrix), options.beta);
    const auto placements = plan(problem, options.modes);
    const auto geo_solution = baseline_placement(problem, geo_table, BaselineKind::geo).solution;
    for (auto e : eval_windows)
      for (const auto& [mode, solution] : placements) score(acc[mode][static_slot], solution, geo_solution, problem, e);
  }

  for (auto mode : options.modes) {
    for (std::size_t g = 0; g <= options.gammas.size(); ++g) {
      const auto& a = acc[mode][g];
      MaintenanceRow row;
      if (g < options.gammas.size()) row.gamma = options.gammas[g];
      row.window_days = options.window_days;
      row.mode = mode;
      row.evaluations = a.evaluations;
      row.flagged = a.flagged;
      if (a.evaluations > 0) {
        row.latency_pct_change = a.latency_pct / static_cast<double>(a.evaluations);
        row.hub_pct_change = a.hub_pct / static_cast<double>(a.evaluations);
      }
      report.rows.push_back(row);
    }
  }
  return report;
}

}  // namespace hubplan
