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
#include "hubplan/core.hpp"
#include "hubplan/ingest.hpp"
#include "hubplan/maintenance.hpp"
#include "hubplan/optimizer.hpp"
#include "hubplan/synthgen.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>

namespace hubplan::io {

using nlohmann::json;

/// Shortest decimal text that round-trips the value.
std::string format_number(double value);

/// Splits one CSV line on commas; no quoting is supported or needed.
std::vector<std::string> split_csv_line(const std::string& line);

/// Reads a whole CSV file, checking the header, and hands each data row
/// (with its 1-based line number) to `row`.
void read_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
              const std::function<void(const std::vector<std::string>&, std::size_t)>& row);

double parse_double(const std::string& text, const std::string& what);
std::int64_t parse_int(const std::string& text, const std::string& what);

PopCatalog read_pop_catalog(const std::filesystem::path& path);
void write_pop_catalog(std::ostream& out, const PopCatalog& pops);

EnterpriseTopology read_topology(const std::filesystem::path& path);
void write_topology(std::ostream& out, const EnterpriseTopology& topology);

std::map<MetroId, GeoPoint> read_metro_coords(const std::filesystem::path& path);
void write_metro_coords(std::ostream& out, const std::map<MetroId, GeoPoint>& coords);

/// Latency matrix CSV: metro,pop,latency_ms.
LatencyMatrix read_latency_matrix(const std::filesystem::path& path);
void write_latency_matrix(std::ostream& out, const LatencyMatrix& matrix);

inline const std::vector<std::string> kRawHeader = {"timestamp", "metro", "network", "pop", "rtt_ms"};
inline const std::vector<std::string> kAggregatedHeader = {
    "window_start", "metro", "network", "pop", "sample_count", "median_ms", "p90_ms", "p95_ms", "min_ms"};

/// Streams raw rows. Unparseable rows land in `rejected`; rows with a
/// non-positive rtt are forwarded so the aggregator can report them.
void for_each_raw_record(const std::filesystem::path& path,
                         const std::function<void(const MeasurementRecord&)>& sink,
                         std::vector<RowDiagnostic>& rejected);
std::vector<MeasurementRecord> read_raw_records(const std::filesystem::path& path,
                                                std::vector<RowDiagnostic>& rejected);

void write_raw_header(std::ostream& out);
void write_raw_record(std::ostream& out, const MeasurementRecord& record);

std::vector<WindowStat> read_window_stats(const std::filesystem::path& path);
void write_window_stats(std::ostream& out, std::span<const WindowStat> stats);

json to_json(const PlacementSolution& solution, const std::string& mode);
json to_json(const ModeResult& result);
json to_json(const Infeasible& infeasible);
json to_json(const CorpusTruth& truth);
CorpusTruth truth_from_json(const json& doc);

/// Frontier CSV: K,weighted_latency_ms,total_hubs.
void write_frontier_csv(std::ostream& out, const ParetoFrontier& frontier);

SloMap read_slo(const std::filesystem::path& path);

/// Writes `text` to `path`, creating parent directories.
/// `metro,anycast_pop,geo_pop`
DefaultsTable read_defaults(const std::filesystem::path& path);
void write_defaults(std::ostream& out, const DefaultsTable& defaults);

void write_slo(std::ostream& out, const SloMap& slo);

void write_opportunity_csv(std::ostream& out, const OpportunityResult& result);
void write_counts_csv(std::ostream& out, const std::map<MetroId, std::size_t>& counts);
void write_decision_csv(std::ostream& out, const std::map<std::size_t, DecisionQuality>& quality);
void write_maintenance_csv(std::ostream& out, const MaintenanceReport& report);

void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace hubplan::io
