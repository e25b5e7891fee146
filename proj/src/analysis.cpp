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

#include "hubplan/analysis.hpp"

#include "hubplan/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

namespace hubplan {

WindowMetric parse_window_metric(const std::string& text) {
  if (text == "min") return WindowMetric::min;
  if (text == "median") return WindowMetric::median;
  if (text == "p90") return WindowMetric::p90;
  if (text == "p95") return WindowMetric::p95;
  throw ValidationError("metric must be min, median, p90 or p95, got '" + text + "'");
}

std::string to_string(WindowMetric metric) {
  switch (metric) {
    case WindowMetric::min: return "min";
    case WindowMetric::median: return "median";
    case WindowMetric::p90: return "p90";
    case WindowMetric::p95: return "p95";
  }
  return "min";
}

Millis metric_value(const WindowStat& stat, WindowMetric metric) {
  switch (metric) {
    case WindowMetric::min: return stat.min_rtt;
    case WindowMetric::median: return stat.median;
    case WindowMetric::p90: return stat.p90;
    case WindowMetric::p95: return stat.p95;
  }
  return stat.min_rtt;
}

namespace {

std::uint64_t stream_of(const std::string& key) { return std::hash<std::string>{}(key); }

/// `count` distinct indices from [0, n), in ascending order.
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t count, std::mt19937_64& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  count = std::min(count, n);
  for (std::size_t k = 0; k < count; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, n - 1);
    std::swap(idx[k], idx[pick(rng)]);
  }
  idx.resize(count);
  std::sort(idx.begin(), idx.end());
  return idx;
}

using PopValues = std::map<PopId, Millis>;
using MetroWindows = std::map<MetroId, std::map<UnixSeconds, PopValues>>;

MetroWindows group_windows(std::span<const WindowStat> stats, const SamplingOptions& options) {
  if (options.horizon <= 0) throw ValidationError("horizon must be > 0");
  std::vector<WindowStat> coarse;
  if (options.horizon > kTenMinutes) {
    coarse = coarsen(stats, options.horizon);
    stats = coarse;
  }
  MetroWindows out;
  for (const auto& s : stats) out[s.metro][s.window_start][s.pop] = metric_value(s, options.metric);
  return out;
}

struct SampledWindow {
  UnixSeconds start = 0;
  const PopValues* values = nullptr;
};

/// Windows of `metro` that measured `focus` and at least one other PoP,
/// down-sampled to samples_per_metro; empty when there are too few.
std::vector<SampledWindow> sample_eligible(const MetroId& metro, const std::map<UnixSeconds, PopValues>& windows,
                                           const PopId& focus, const SamplingOptions& options) {
  std::vector<SampledWindow> eligible;
  for (const auto& [start, values] : windows)
    if (values.count(focus) && values.size() >= 2) eligible.push_back({start, &values});
  if (eligible.size() < options.samples_per_metro || options.samples_per_metro == 0) return {};
  std::mt19937_64 rng(derive_seed(options.seed, stream_of(metro)));
  std::vector<SampledWindow> out;
  for (auto k : sample_indices(eligible.size(), options.samples_per_metro, rng)) out.push_back(eligible[k]);
  return out;
}

Millis best_other(const PopValues& values, const PopId& focus) {
  Millis best = std::numeric_limits<double>::infinity();
  for (const auto& [pop, v] : values)
    if (pop != focus) best = std::min(best, v);
  return best;
}

}  // namespace

OpportunityResult opportunity_analysis(std::span<const WindowStat> stats,
                                       const std::map<MetroId, PopId>& geo_default,
                                       const SamplingOptions& options) {
  OpportunityResult out;
  const auto grouped = group_windows(stats, options);
  for (const auto& [metro, windows] : grouped) {
    auto geo = geo_default.find(metro);
    if (geo == geo_default.end()) continue;
    auto sampled = sample_eligible(metro, windows, geo->second, options);
    if (sampled.empty()) {
      out.discarded.push_back(metro);
      continue;
    }
    for (const auto& w : sampled) {
      const Millis own = w.values->at(geo->second);
      out.samples.push_back(
          {metro, w.start, options.horizon, std::log2(own / best_other(*w.values, geo->second)), options.metric});
    }
  }
  return out;
}

std::map<MetroId, std::size_t> faster_pop_counts(std::span<const WindowStat> stats,
                                                 const std::map<MetroId, PopId>& geo_default,
                                                 const SamplingOptions& options) {
  std::map<MetroId, std::size_t> out;
  for (const auto& s : opportunity_analysis(stats, geo_default, options).samples) {
    auto& count = out[s.metro];
    if (s.log2_ratio > 0.0) ++count;
  }
  return out;
}

std::map<MetroId, std::size_t> anycast_fastest_counts(std::span<const WindowStat> stats,
                                                      const DefaultsTable& defaults,
                                                      const SamplingOptions& options) {
  std::map<MetroId, std::size_t> out;
  const auto grouped = group_windows(stats, options);
  for (const auto& [metro, windows] : grouped) {
    auto d = defaults.find(metro);
    if (d == defaults.end() || d->second.anycast == d->second.geo) continue;
    auto sampled = sample_eligible(metro, windows, d->second.anycast, options);
    if (sampled.empty()) continue;
    auto& count = out[metro];
    for (const auto& w : sampled)
      if (w.values->at(d->second.anycast) <= best_other(*w.values, d->second.anycast)) ++count;
  }
  return out;
}

std::map<std::size_t, DecisionQuality> decision_quality(std::span<const MeasurementRecord> records,
                                                        const DecisionOptions& options) {
  if (options.range <= 0) throw ValidationError("decision range must be > 0");
  if (options.repeats == 0) throw ValidationError("decision repeats must be >= 1");
  // metro -> range group -> pop -> rtts
  std::map<MetroId, std::map<UnixSeconds, std::map<PopId, std::vector<double>>>> groups;
  // Ranges start at the UTC midnight of the earliest record, so a corpus
  // of exactly `range` length forms one group.
  UnixSeconds first = std::numeric_limits<UnixSeconds>::max();
  for (const auto& r : records) first = std::min(first, r.timestamp);
  const UnixSeconds origin = records.empty() ? 0 : window_start_of(first, 86400);
  for (const auto& r : records) {
    if (!(r.rtt_ms > 0.0) || !std::isfinite(r.rtt_ms)) continue;
    groups[r.metro][origin + window_start_of(r.timestamp - origin, options.range)][r.pop].push_back(r.rtt_ms);
  }
  auto argmin_mean = [](const std::map<PopId, double>& means) {
    const PopId* best = nullptr;
    double best_value = std::numeric_limits<double>::infinity();
    for (const auto& [pop, v] : means)
      if (v < best_value) {
        best_value = v;
        best = &pop;
      }
    return *best;
  };

  std::map<std::size_t, DecisionQuality> out;
  for (const auto n : options.sample_sizes) {
    if (n == 0) throw ValidationError("sample sizes must be >= 1");
    double match_sum = 0.0, no_match_sum = 0.0, cond_sum = 0.0;
    std::size_t cells = 0, cond_cells = 0;
    for (const auto& [metro, per_group] : groups) {
      for (std::size_t rep = 0; rep < options.repeats; ++rep) {
        std::mt19937_64 rng(derive_seed(derive_seed(options.seed, stream_of(metro)), n * 1000003ULL + rep));
        std::size_t match = 0, no_match = 0;
        for (const auto& [start, per_pop] : per_group) {
          bool usable = true;
          for (const auto& [pop, rtts] : per_pop) usable = usable && rtts.size() >= n;
          if (!usable) continue;
          std::map<PopId, double> full, sampled;
          for (const auto& [pop, rtts] : per_pop) {
            full[pop] = std::accumulate(rtts.begin(), rtts.end(), 0.0) / static_cast<double>(rtts.size());
            double sum = 0.0;
            for (auto k : sample_indices(rtts.size(), n, rng)) sum += rtts[k];
            sampled[pop] = sum / static_cast<double>(n);
          }
          if (argmin_mean(full) == argmin_mean(sampled))
            ++match;
          else
            ++no_match;
        }
        const auto total = static_cast<double>(per_group.size());
        match_sum += 100.0 * static_cast<double>(match) / total;
        no_match_sum += 100.0 * static_cast<double>(no_match) / total;
        ++cells;
        if (match + no_match > 0) {
          cond_sum += 100.0 * static_cast<double>(match) / static_cast<double>(match + no_match);
          ++cond_cells;
        }
      }
    }
    DecisionQuality q;
    if (cells > 0) {
      q.match_pct = match_sum / static_cast<double>(cells);
      q.no_match_pct = no_match_sum / static_cast<double>(cells);
    }
    if (cond_cells > 0) q.conditional_match_pct = cond_sum / static_cast<double>(cond_cells);
    out[n] = q;
  }
  return out;
}

SmoothingForm parse_smoothing_form(const std::string& text) {
  if (text == "recursive") return SmoothingForm::recursive;
  if (text == "literal") return SmoothingForm::literal;
  throw ValidationError("smoothing form must be recursive or literal, got '" + text + "'");
}

std::string to_string(SmoothingForm form) { return form == SmoothingForm::recursive ? "recursive" : "literal"; }

LatencyMatrix SmoothedMatrixSeries::smoothed_matrix(std::size_t w) const {
  std::vector<LatencyEntry> entries;
  const auto& values = smoothed.at(w);
  const auto& mask = present.at(w);
  for (Eigen::Index j = 0; j < values.rows(); ++j)
    for (Eigen::Index i = 0; i < values.cols(); ++i)
      if (mask(j, i))
        entries.push_back({metros[static_cast<std::size_t>(j)], pops[static_cast<std::size_t>(i)], values(j, i)});
  return LatencyMatrix::from_entries(std::move(entries));
}

SmoothedMatrixSeries smooth(std::span<const LatencyMatrix> series, double gamma, SmoothingForm form) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ValidationError("gamma must lie in (0, 1]");
  SmoothedMatrixSeries out;
  out.gamma = gamma;
  out.form = form;
  std::set<MetroId> metros;
  std::set<PopId> pops;
  for (const auto& m : series) {
    metros.insert(m.metros().begin(), m.metros().end());
    pops.insert(m.pops().begin(), m.pops().end());
  }
  out.metros.assign(metros.begin(), metros.end());
  out.pops.assign(pops.begin(), pops.end());
  const auto rows = static_cast<Eigen::Index>(out.metros.size());
  const auto cols = static_cast<Eigen::Index>(out.pops.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();

  using ArrayXX = Eigen::ArrayXXd;
  ArrayXX carried = ArrayXX::Constant(rows, cols, nan);
  ArrayXX last_raw = ArrayXX::Constant(rows, cols, nan);
  MaskX seen = MaskX::Constant(rows, cols, false);

  for (const auto& m : series) {
    ArrayXX raw = ArrayXX::Constant(rows, cols, nan);
    MaskX present = MaskX::Constant(rows, cols, false);
    for (std::size_t j = 0; j < m.metros().size(); ++j) {
      const auto r = static_cast<Eigen::Index>(
          std::lower_bound(out.metros.begin(), out.metros.end(), m.metros()[j]) - out.metros.begin());
      for (std::size_t i = 0; i < m.pops().size(); ++i) {
        const auto c = static_cast<Eigen::Index>(
            std::lower_bound(out.pops.begin(), out.pops.end(), m.pops()[i]) - out.pops.begin());
        if (m.present()(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i))) {
          present(r, c) = true;
          raw(r, c) = m.values()(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
        }
      }
    }
    const MaskX blend = present && seen;
    const ArrayX::Scalar g = gamma;
    ArrayXX next;
    if (form == SmoothingForm::recursive)
      next = blend.select(ewma_step(g, raw, carried), present.select(raw, carried));
    else
      next = blend.select(ewma_step(g, raw, last_raw), present.select(raw, carried));
    carried = next;
    last_raw = present.select(raw, last_raw);
    seen = seen || present;

    out.raw.push_back(raw.matrix());
    out.present.push_back(present);
    out.smoothed.push_back(present.select(next, ArrayXX::Constant(rows, cols, nan)).matrix());
    out.carried.push_back(carried.matrix());
    out.seen.push_back(seen);
  }
  return out;
}

}  // namespace hubplan
