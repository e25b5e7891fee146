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

#include "hubplan/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace hubplan::io {

std::string format_number(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw std::runtime_error("cannot format number");
  return std::string(buf, end);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  for (char c : line) {
    if (c == ',') {
      out.push_back(std::move(cell));
      cell.clear();
    } else if (c != '\r') {
      cell.push_back(c);
    }
  }
  out.push_back(std::move(cell));
  return out;
}

void read_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
              const std::function<void(const std::vector<std::string>&, std::size_t)>& row) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(path.string() + ": empty file");
  if (split_csv_line(line) != header) {
    std::string expected;
    for (const auto& h : header) expected += (expected.empty() ? "" : ",") + h;
    throw ValidationError(path.string() + ": expected header '" + expected + "'");
  }
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty() || line == "\r") continue;
    auto cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw ValidationError(path.string() + ":" + std::to_string(number) + ": expected " +
                            std::to_string(header.size()) + " fields");
    row(cells, number);
  }
}

double parse_double(const std::string& text, const std::string& what) {
  double value = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size())
    throw ValidationError("invalid number '" + text + "' for " + what);
  return value;
}

std::int64_t parse_int(const std::string& text, const std::string& what) {
  std::int64_t value = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size())
    throw ValidationError("invalid integer '" + text + "' for " + what);
  return value;
}

PopCatalog read_pop_catalog(const std::filesystem::path& path) {
  std::vector<PopSite> sites;
  read_csv(path, {"pop_id", "lat", "lon"}, [&](const auto& c, std::size_t) {
    sites.push_back({c[0], {parse_double(c[1], "lat"), parse_double(c[2], "lon")}});
  });
  return PopCatalog(std::move(sites));
}

void write_pop_catalog(std::ostream& out, const PopCatalog& pops) {
  out << "pop_id,lat,lon\n";
  for (const auto& s : pops.sites())
    out << s.id << ',' << format_number(s.location.lat) << ',' << format_number(s.location.lon) << '\n';
}

EnterpriseTopology read_topology(const std::filesystem::path& path) {
  std::vector<BranchOffice> offices;
  read_csv(path, {"metro", "connections"}, [&](const auto& c, std::size_t) {
    offices.push_back({c[0], parse_int(c[1], "connections")});
  });
  return EnterpriseTopology(std::move(offices));
}

void write_topology(std::ostream& out, const EnterpriseTopology& topology) {
  out << "metro,connections\n";
  for (const auto& o : topology.offices()) out << o.metro << ',' << o.connections << '\n';
}

std::map<MetroId, GeoPoint> read_metro_coords(const std::filesystem::path& path) {
  std::map<MetroId, GeoPoint> out;
  read_csv(path, {"metro", "lat", "lon"}, [&](const auto& c, std::size_t line) {
    if (!out.emplace(c[0], GeoPoint{parse_double(c[1], "lat"), parse_double(c[2], "lon")}).second)
      throw ValidationError(path.string() + ":" + std::to_string(line) + ": duplicate metro " + c[0]);
  });
  return out;
}

void write_metro_coords(std::ostream& out, const std::map<MetroId, GeoPoint>& coords) {
  out << "metro,lat,lon\n";
  for (const auto& [metro, p] : coords)
    out << metro << ',' << format_number(p.lat) << ',' << format_number(p.lon) << '\n';
}

LatencyMatrix read_latency_matrix(const std::filesystem::path& path) {
  std::vector<LatencyEntry> entries;
  read_csv(path, {"metro", "pop", "latency_ms"}, [&](const auto& c, std::size_t) {
    entries.push_back({c[0], c[1], parse_double(c[2], "latency_ms")});
  });
  return LatencyMatrix::from_entries(std::move(entries));
}

void write_latency_matrix(std::ostream& out, const LatencyMatrix& matrix) {
  out << "metro,pop,latency_ms\n";
  for (const auto& e : matrix.entries()) out << e.metro << ',' << e.pop << ',' << format_number(e.ms) << '\n';
}

void for_each_raw_record(const std::filesystem::path& path,
                         const std::function<void(const MeasurementRecord&)>& sink,
                         std::vector<RowDiagnostic>& rejected) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || split_csv_line(line) != kRawHeader)
    throw ValidationError(path.string() + ": expected header 'timestamp,metro,network,pop,rtt_ms'");
  std::size_t row = 0;
  MeasurementRecord r;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    auto c = split_csv_line(line);
    const auto index = row++;
    try {
      if (c.size() != kRawHeader.size()) throw ValidationError("expected 5 fields");
      r.timestamp = parse_int(c[0], "timestamp");
      r.metro = std::move(c[1]);
      r.network = std::move(c[2]);
      r.pop = std::move(c[3]);
      r.rtt_ms = parse_double(c[4], "rtt_ms");
    } catch (const ValidationError& e) {
      rejected.push_back({index, e.what()});
      continue;
    }
    sink(r);
  }
}

std::vector<MeasurementRecord> read_raw_records(const std::filesystem::path& path,
                                                std::vector<RowDiagnostic>& rejected) {
  std::vector<MeasurementRecord> out;
  for_each_raw_record(path, [&](const MeasurementRecord& r) { out.push_back(r); }, rejected);
  return out;
}

void write_raw_header(std::ostream& out) { out << "timestamp,metro,network,pop,rtt_ms\n"; }

void write_raw_record(std::ostream& out, const MeasurementRecord& r) {
  out << r.timestamp << ',' << r.metro << ',' << r.network << ',' << r.pop << ','
      << format_number(r.rtt_ms) << '\n';
}

std::vector<WindowStat> read_window_stats(const std::filesystem::path& path) {
  std::vector<WindowStat> out;
  read_csv(path, kAggregatedHeader, [&](const auto& c, std::size_t line) {
    WindowStat s;
    s.window_start = parse_int(c[0], "window_start");
    s.metro = c[1];
    s.network = c[2];
    s.pop = c[3];
    s.sample_count = parse_int(c[4], "sample_count");
    s.median = parse_double(c[5], "median_ms");
    s.p90 = parse_double(c[6], "p90_ms");
    s.p95 = parse_double(c[7], "p95_ms");
    s.min_rtt = parse_double(c[8], "min_ms");
    if (s.sample_count < 1 || !(s.min_rtt > 0.0) || !(s.min_rtt <= s.median) || !(s.median <= s.p90) ||
        !(s.p90 <= s.p95))
      throw ValidationError(path.string() + ":" + std::to_string(line) +
                            ": window row violates 0 < min <= median <= p90 <= p95 or count >= 1");
    out.push_back(std::move(s));
  });
  return out;
}

void write_window_stats(std::ostream& out, std::span<const WindowStat> stats) {
  out << "window_start,metro,network,pop,sample_count,median_ms,p90_ms,p95_ms,min_ms\n";
  for (const auto& s : stats)
    out << s.window_start << ',' << s.metro << ',' << s.network << ',' << s.pop << ',' << s.sample_count << ','
        << format_number(s.median) << ',' << format_number(s.p90) << ',' << format_number(s.p95) << ','
        << format_number(s.min_rtt) << '\n';
}

json to_json(const PlacementSolution& solution, const std::string& mode) {
  json assignments = json::array();
  for (const auto& a : solution.assignments)
    assignments.push_back({{"metro", a.metro}, {"pop", a.pop}, {"latency_ms", a.latency_ms}});
  json hubs = json::array();
  for (const auto& h : solution.hubs) hubs.push_back({{"pop", h.pop}, {"count", h.count}});
  return json{{"mode", mode},
              {"k", solution.k},
              {"weighted_latency_ms", solution.weighted_latency},
              {"assignments", std::move(assignments)},
              {"hubs", std::move(hubs)},
              {"total_hubs", solution.total_hubs}};
}

json to_json(const ModeResult& result) {
  json out = to_json(result.solution, to_string(result.mode));
  out["k_min"] = result.k_min ? json(*result.k_min) : json(nullptr);
  out["k_max"] = result.k_max ? json(*result.k_max) : json(nullptr);
  if (!result.fallback_metros.empty()) out["fallback_metros"] = result.fallback_metros;
  return out;
}

json to_json(const Infeasible& infeasible) {
  return json{{"infeasible", true},
              {"cause", to_string(infeasible.cause)},
              {"witnesses", infeasible.witnesses},
              {"detail", infeasible.detail}};
}

json to_json(const CorpusTruth& truth) {
  json out = json::object();
  for (const auto& [metro, t] : truth.metros)
    out[metro] = {{"routed_pop", t.routed_pop},
                  {"geo_pop", t.geo_pop},
                  {"anomalous", t.anomalous},
                  {"detoured", t.detoured},
                  {"fastest_pop", t.fastest_pop},
                  {"measured_pops", t.measured}};
  return out;
}

CorpusTruth truth_from_json(const json& doc) {
  CorpusTruth truth;
  for (const auto& [metro, t] : doc.items()) {
    MetroTruth m;
    m.routed_pop = t.at("routed_pop").get<std::string>();
    m.geo_pop = t.at("geo_pop").get<std::string>();
    m.anomalous = t.at("anomalous").get<bool>();
    m.detoured = t.value("detoured", false);
    m.fastest_pop = t.value("fastest_pop", m.geo_pop);
    m.measured = t.value("measured_pops", std::vector<std::string>{});
    truth.metros.emplace(metro, std::move(m));
  }
  return truth;
}

void write_frontier_csv(std::ostream& out, const ParetoFrontier& frontier) {
  out << "K,weighted_latency_ms,total_hubs\n";
  for (const auto& p : frontier.points)
    out << p.k_cap << ',' << format_number(p.solution.weighted_latency) << ',' << p.solution.total_hubs << '\n';
}

SloMap read_slo(const std::filesystem::path& path) {
  SloMap slo;
  read_csv(path, {"metro", "slo_ms"}, [&](const auto& c, std::size_t) {
    slo[c[0]] = parse_double(c[1], "slo_ms");
  });
  return slo;
}

DefaultsTable read_defaults(const std::filesystem::path& path) {
  DefaultsTable out;
  read_csv(path, {"metro", "anycast_pop", "geo_pop"}, [&](const auto& c, std::size_t line) {
    if (!out.emplace(c[0], Defaults{c[1], c[2]}).second)
      throw ValidationError(path.string() + ":" + std::to_string(line) + ": duplicate metro " + c[0]);
  });
  return out;
}

void write_defaults(std::ostream& out, const DefaultsTable& defaults) {
  out << "metro,anycast_pop,geo_pop\n";
  for (const auto& [metro, d] : defaults) out << metro << ',' << d.anycast << ',' << d.geo << '\n';
}

void write_slo(std::ostream& out, const SloMap& slo) {
  out << "metro,slo_ms\n";
  for (const auto& [metro, ms] : slo) out << metro << ',' << format_number(ms) << '\n';
}

void write_opportunity_csv(std::ostream& out, const OpportunityResult& result) {
  out << "metro,window_start,horizon_s,metric,log2_ratio\n";
  for (const auto& s : result.samples)
    out << s.metro << ',' << s.window_start << ',' << s.horizon << ',' << to_string(s.metric) << ','
        << format_number(s.log2_ratio) << '\n';
}

void write_counts_csv(std::ostream& out, const std::map<MetroId, std::size_t>& counts) {
  out << "metro,count\n";
  for (const auto& [metro, n] : counts) out << metro << ',' << n << '\n';
}

void write_decision_csv(std::ostream& out, const std::map<std::size_t, DecisionQuality>& quality) {
  out << "samples,match_pct,no_match_pct,conditional_match_pct\n";
  for (const auto& [n, q] : quality)
    out << n << ',' << format_number(q.match_pct) << ',' << format_number(q.no_match_pct) << ','
        << format_number(q.conditional_match_pct) << '\n';
}

void write_maintenance_csv(std::ostream& out, const MaintenanceReport& report) {
  out << "gamma,window_days,mode,latency_pct_change,hub_pct_change,evaluations,flagged\n";
  for (const auto& r : report.rows)
    out << (r.gamma ? format_number(*r.gamma) : std::string("static")) << ',' << r.window_days << ','
        << to_string(r.mode) << ',' << format_number(r.latency_pct_change) << ','
        << format_number(r.hub_pct_change) << ',' << r.evaluations << ',' << r.flagged << '\n';
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << text;
}

}  // namespace hubplan::io
