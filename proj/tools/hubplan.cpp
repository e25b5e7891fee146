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

// hubplan: command-line entry point. Parses flags, loads inputs, calls the
// library and writes artifacts; every artifact carries the resolved config.

#include "hubplan/analysis.hpp"
#include "hubplan/io.hpp"
#include "hubplan/maintenance.hpp"
#include "hubplan/optimizer.hpp"
#include "hubplan/synthgen.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace hubplan;
using io::json;
namespace fs = std::filesystem;

constexpr int kOk = 0;
constexpr int kInfeasible = 1;
constexpr int kInvalid = 2;

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<double> parse_doubles(const std::string& text, const std::string& what) {
  std::vector<double> out;
  for (const auto& s : split_list(text)) out.push_back(io::parse_double(s, what));
  return out;
}

std::vector<std::size_t> parse_sizes(const std::string& text, const std::string& what) {
  std::vector<std::size_t> out;
  for (const auto& s : split_list(text)) {
    const auto v = io::parse_int(s, what);
    if (v < 1) throw ValidationError(what + " entries must be >= 1");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

/// Resolved options of the invoked subcommand, defaults included, plus the
/// argument vector that reproduces the run.
json resolved_config(const std::vector<const CLI::App*>& path) {
  json options = json::object();
  json argv = json::array();
  for (const auto* app : path) {
    if (app->get_parent()) argv.push_back(app->get_name());
    for (const CLI::Option* opt : app->get_options()) {
      if (opt->get_lnames().empty()) continue;
      const auto& name = opt->get_lnames().front();
      if (name == "help") continue;
      std::string value;
      if (opt->count() > 0) {
        for (const auto& r : opt->results()) value += (value.empty() ? "" : ",") + r;
      } else {
        value = opt->get_default_str();
      }
      if (value.empty()) continue;
      options[name] = value;
      argv.push_back("--" + name);
      argv.push_back(value);
    }
  }
  std::string command;
  for (const auto* app : path)
    if (app->get_parent()) command += (command.empty() ? "" : " ") + app->get_name();
  std::uint64_t seed = 0;
  if (options.contains("seed")) seed = std::stoull(options["seed"].get<std::string>());
  return {{"tool", "hubplan"}, {"command", command}, {"options", options}, {"seed", seed}, {"argv", argv}};
}

void write_json(const fs::path& path, const json& doc) { io::write_file(path, doc.dump(2) + "\n"); }

void write_text(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  std::ostringstream out;
  body(out);
  io::write_file(path, out.str());
}

/// CSV artifacts get a sibling `<file>.config.json`.
void write_sidecar(const fs::path& artifact, const json& config) {
  write_json(artifact.string() + ".config.json", {{"config", config}, {"artifact", artifact.filename().string()}});
}

struct ProblemInputs {
  std::string pops;
  std::string topology;
  std::string latency;
  std::string windows;
  std::string percentile = "p90";
  std::int64_t min_samples = 20;
  std::int64_t beta = kDefaultBeta;
  std::string missing = "forbid";
  std::string constraint4 = "linked";

  void add(CLI::App* app) {
    app->add_option("--pops", pops, "PoP catalog CSV (pop_id,lat,lon)")->required()->check(CLI::ExistingFile);
    app->add_option("--topology", topology, "enterprise topology CSV (metro,connections)")
        ->required()
        ->check(CLI::ExistingFile);
    auto* lat = app->add_option("--latency", latency, "latency matrix CSV (metro,pop,latency_ms)")
                    ->check(CLI::ExistingFile);
    auto* win = app->add_option("--windows", windows, "aggregated window statistics CSV")->check(CLI::ExistingFile);
    lat->excludes(win);
    app->add_option("--percentile", percentile, "median|p90|p95 (with --windows)");
    app->add_option("--min-samples", min_samples, "minimum samples per entry (with --windows)");
    app->add_option("--beta", beta, "connections per hub");
    app->add_option("--missing", missing, "forbid|big-m:<ms>");
    app->add_option("--constraint4", constraint4, "linked|literal");
  }

  PlacementProblem load() const {
    if (latency.empty() == windows.empty()) throw ValidationError("exactly one of --latency or --windows is required");
    LatencyMatrix matrix;
    if (!latency.empty()) {
      matrix = io::read_latency_matrix(latency);
    } else {
      MatrixBuildOptions mb;
      mb.percentile = parse_percentile(percentile);
      mb.min_samples = min_samples;
      matrix = build_latency_matrix(io::read_window_stats(windows), mb).matrix;
    }
    return PlacementProblem(io::read_pop_catalog(pops), io::read_topology(topology), std::move(matrix), beta,
                            MissingPolicy::parse(missing));
  }

  LinkingForm linking() const { return parse_linking_form(constraint4); }
};

json infeasible_doc(const json& config, const Infeasible& inf) {
  return {{"config", config}, {"result", io::to_json(inf)}};
}

int report_infeasible(const json& config, const Infeasible& inf, const std::string& out) {
  auto doc = infeasible_doc(config, inf);
  if (!out.empty()) write_json(out, doc);
  std::cout << doc.dump(2) << "\n";
  return kInfeasible;
}

json with_baselines(json result, const PlacementProblem& problem, const PlacementSolution& solution) {
  const auto b = baseline_hub_counts(problem, solution.assignment());
  result["baseline_hubs"] = {{"baseline1", b.baseline1}, {"baseline2", b.baseline2}, {"baseline3", b.baseline3}};
  return result;
}

// ---------------------------------------------------------------- synth

struct SynthPops {
  std::string out;
  std::uint64_t seed = 1;
  void add(CLI::App* app) {
    app->add_option("--out", out, "output CSV")->required();
    app->add_option("--seed", seed, "recorded for provenance; the catalog is fixed");
  }
  int run(const json& config) const {
    write_text(out, [](std::ostream& o) { io::write_pop_catalog(o, default_pop_catalog()); });
    write_sidecar(out, config);
    return kOk;
  }
};

struct SynthMetros {
  std::string out;
  std::size_t count = 75;
  std::uint64_t seed = 1;
  void add(CLI::App* app) {
    app->add_option("--out", out, "output CSV")->required();
    app->add_option("--count", count, "number of metros")->check(CLI::PositiveNumber);
    app->add_option("--seed", seed, "RNG seed");
  }
  int run(const json& config) const {
    write_text(out, [&](std::ostream& o) { io::write_metro_coords(o, default_metro_coords(count, seed)); });
    write_sidecar(out, config);
    return kOk;
  }
};

struct SynthTopo {
  std::string metros;
  std::string out_dir;
  std::string sizes = "5,10,25,50,75";
  std::size_t count = 100;
  double rate = 0.0;
  std::string rate_branch = "upper";
  std::uint64_t seed = 1;
  void add(CLI::App* app) {
    app->add_option("--metros", metros, "metro pool CSV (metro,lat,lon)")->required()->check(CLI::ExistingFile);
    app->add_option("--out-dir", out_dir, "output directory")->required();
    app->add_option("--sizes", sizes, "comma-separated topology sizes");
    app->add_option("--count", count, "topologies per size")->check(CLI::PositiveNumber);
    app->add_option("--rate", rate, "exponential rate for connections; 0 calibrates");
    app->add_option("--rate-branch", rate_branch, "upper|lower calibration root");
    app->add_option("--seed", seed, "RNG seed");
  }
  int run(const json& config) const {
    std::vector<MetroId> pool;
    for (const auto& [m, p] : io::read_metro_coords(metros)) pool.push_back(m);
    const double resolved_rate = rate > 0.0 ? rate : calibrate_exponential_rate(100, 10000, 0.9, parse_rate_branch(rate_branch));
    json manifest = {{"config", config}, {"rate", resolved_rate}, {"files", json::array()}};
    for (auto size : parse_sizes(sizes, "sizes")) {
      TopologySpec spec;
      spec.size = size;
      spec.count = count;
      spec.metro_pool = pool;
      spec.seed = derive_seed(seed, size);
      spec.rate = resolved_rate;
      const auto topologies = gen_topologies(spec);
      for (std::size_t t = 0; t < topologies.size(); ++t) {
        char name[64];
        std::snprintf(name, sizeof name, "size%03zu-%03zu.csv", size, t);
        write_text(fs::path(out_dir) / name, [&](std::ostream& o) { io::write_topology(o, topologies[t]); });
        manifest["files"].push_back({{"file", name}, {"size", size}, {"total_connections", topologies[t].total_connections()}});
      }
    }
    write_json(fs::path(out_dir) / "manifest.json", manifest);
    return kOk;
  }
};

struct SynthCorpus {
  std::string pops, metros, out, truth;
  CorpusSpec spec;
  std::string detour_policy = "fastest_alternate";
  void add(CLI::App* app) {
    app->add_option("--pops", pops, "PoP catalog CSV")->required()->check(CLI::ExistingFile);
    app->add_option("--metros", metros, "metro coordinates CSV")->required()->check(CLI::ExistingFile);
    app->add_option("--out", out, "raw measurement CSV")->required();
    app->add_option("--truth", truth, "ground-truth JSON")->required();
    app->add_option("--start", spec.start, "first timestamp (UTC seconds)");
    app->add_option("--days", spec.days, "days of measurements")->check(CLI::PositiveNumber);
    app->add_option("--rate-per-hour", spec.rate_per_hour, "measurements per metro per hour")
        ->check(CLI::PositiveNumber);
    app->add_option("--anomaly-fraction", spec.anomaly_fraction, "share of metros with an inflated geo-default");
    app->add_option("--anomaly-inflation", spec.anomaly_inflation, "inflation factor");
    app->add_option("--anomaly-margin", spec.anomaly_margin, "eligibility margin");
    app->add_option("--anomaly-onset-day", spec.anomaly_onset_day, "day the inflation starts");
    app->add_option("--detour-fraction", spec.detour_fraction, "share of anomalous metros routed away");
    app->add_option("--detour-policy", detour_policy, "fastest_alternate|slowest_alternate");
    app->add_option("--jitter", spec.jitter_sigma, "log-normal jitter sigma");
    app->add_option("--routed-share", spec.routed_share, "share of measurements on the routed PoP");
    app->add_option("--alternates", spec.alternates, "measured alternate PoPs per metro");
    app->add_option("--ms-per-km", spec.ms_per_km, "latency slope");
    app->add_option("--base-ms", spec.base_ms, "latency intercept");
    app->add_option("--seed", spec.seed, "RNG seed");
  }
  int run(const json& config) {
    spec.pops = io::read_pop_catalog(pops);
    spec.metros = io::read_metro_coords(metros);
    spec.detour_policy = parse_detour_policy(detour_policy);
    if (fs::path(out).has_parent_path()) fs::create_directories(fs::path(out).parent_path());
    std::ofstream raw(out, std::ios::binary);
    if (!raw) throw ValidationError("cannot write " + out);
    io::write_raw_header(raw);
    std::size_t rows = 0;
    const auto t = gen_corpus(spec, [&](const MeasurementRecord& r) {
      io::write_raw_record(raw, r);
      ++rows;
    });
    raw.close();
    write_json(truth, {{"config", config}, {"records", rows}, {"eligible_for_anomaly", t.eligible_for_anomaly},
                       {"metros", io::to_json(t)}});
    write_sidecar(out, config);
    return kOk;
  }
};

// ---------------------------------------------------------------- ingest

struct Ingest {
  std::string raw, out_windows, out_matrix, out_defaults, metros, pops, summary;
  std::int64_t window = kTenMinutes;
  std::string percentile = "p90";
  std::string aggregation = "mean-of-windows";
  std::int64_t min_samples = 20;
  std::int64_t range_begin = std::numeric_limits<std::int64_t>::min();
  std::int64_t range_end = std::numeric_limits<std::int64_t>::max();
  std::uint64_t seed = 1;
  void add(CLI::App* app) {
    app->add_option("--raw", raw, "raw measurement CSV")->required()->check(CLI::ExistingFile);
    app->add_option("--out-windows", out_windows, "aggregated window statistics CSV")->required();
    app->add_option("--out-matrix", out_matrix, "latency matrix CSV");
    app->add_option("--out-defaults", out_defaults, "defaults CSV (needs --metros and --pops)");
    app->add_option("--metros", metros, "metro coordinates CSV")->check(CLI::ExistingFile);
    app->add_option("--pops", pops, "PoP catalog CSV")->check(CLI::ExistingFile);
    app->add_option("--summary", summary, "summary JSON");
    app->add_option("--window", window, "window length in seconds")->check(CLI::PositiveNumber);
    app->add_option("--percentile", percentile, "median|p90|p95");
    app->add_option("--aggregation", aggregation, "mean-of-windows|raw-percentile");
    app->add_option("--min-samples", min_samples, "minimum samples per matrix entry");
    app->add_option("--range-begin", range_begin, "first timestamp included in the matrix");
    app->add_option("--range-end", range_end, "first timestamp excluded from the matrix");
    app->add_option("--seed", seed, "recorded for provenance");
  }
  int run(const json& config) const {
    std::vector<RowDiagnostic> rejected;
    WindowAggregator agg(window);
    const bool raw_matrix = !out_matrix.empty() && parse_range_aggregation(aggregation) == RangeAggregation::raw_percentile;
    std::vector<MeasurementRecord> kept;
    io::for_each_raw_record(
        raw,
        [&](const MeasurementRecord& r) {
          agg.add(r);
          if (raw_matrix) kept.push_back(r);
        },
        rejected);
    const auto stats = agg.finish();
    for (const auto& d : agg.diagnostics()) rejected.push_back(d);
    write_text(out_windows, [&](std::ostream& o) { io::write_window_stats(o, stats); });
    write_sidecar(out_windows, config);

    json doc = {{"config", config}, {"windows", stats.size()}, {"rejected_rows", rejected.size()}};
    json examples = json::array();
    for (std::size_t i = 0; i < rejected.size() && i < 20; ++i)
      examples.push_back({{"row", rejected[i].row}, {"message", rejected[i].message}});
    doc["rejected_examples"] = examples;

    if (!out_matrix.empty()) {
      MatrixBuildOptions mb;
      mb.range = {range_begin, range_end};
      mb.percentile = parse_percentile(percentile);
      mb.min_samples = min_samples;
      const auto built = raw_matrix ? build_latency_matrix_raw(kept, mb) : build_latency_matrix(stats, mb);
      write_text(out_matrix, [&](std::ostream& o) { io::write_latency_matrix(o, built.matrix); });
      write_sidecar(out_matrix, config);
      doc["matrix_entries"] = built.matrix.entry_count();
      doc["dropped_metros"] = built.dropped_metros;
    }
    if (!out_defaults.empty()) {
      if (metros.empty() || pops.empty()) throw ValidationError("--out-defaults needs --metros and --pops");
      const auto catalog = io::read_pop_catalog(pops);
      const auto anycast = infer_anycast_default(stats);
      std::vector<MetroId> wanted;
      for (const auto& [m, a] : anycast) wanted.push_back(m);
      const auto geo = compute_geo_default(io::read_metro_coords(metros), catalog, wanted);
      write_text(out_defaults,
                 [&](std::ostream& o) { io::write_defaults(o, make_defaults_table(anycast, geo.nearest, catalog)); });
      write_sidecar(out_defaults, config);
      doc["unresolved_metros"] = geo.unresolved;
    }
    if (!summary.empty()) write_json(summary, doc);
    std::cout << doc.dump(2) << "\n";
    return kOk;
  }
};

// ---------------------------------------------------------------- plan

struct Plan {
  ProblemInputs inputs;
  std::string mode = "l_optimal";
  std::string slo = "none";
  std::string defaults;
  std::string out;
  std::size_t k_cap = 0;
  std::uint64_t seed = 1;
  void add(CLI::App* app) {
    inputs.add(app);
    app->add_option("--mode", mode, "l_optimal|k_optimal|mean_k|slo_optimal|geo|anycast|solve|all");
    app->add_option("--k-cap", k_cap, "PoP cap for --mode solve (0 = uncapped)");
    app->add_option("--slo", slo, "none|anycast|<metro,slo_ms CSV>");
    app->add_option("--defaults", defaults, "defaults CSV (metro,anycast_pop,geo_pop)")->check(CLI::ExistingFile);
    app->add_option("--out", out, "output JSON")->required();
    app->add_option("--seed", seed, "recorded for provenance");
  }

  std::optional<SloMap> resolve_slo(const PlacementProblem& problem, const std::optional<DefaultsTable>& table) const {
    if (slo == "none") return std::nullopt;
    if (slo == "anycast") {
      if (!table) throw ValidationError("--slo anycast needs --defaults");
      return anycast_slo(problem, *table);
    }
    if (!fs::exists(slo)) throw ValidationError("SLO file not found: " + slo);
    return io::read_slo(slo);
  }

  int run(const json& config) const {
    const auto problem = inputs.load();
    const auto linking = inputs.linking();
    std::optional<DefaultsTable> table;
    if (!defaults.empty()) table = io::read_defaults(defaults);
    const auto slo_map = resolve_slo(problem, table);

    auto need_table = [&]() -> const DefaultsTable& {
      if (!table) throw ValidationError("baseline modes need --defaults");
      return *table;
    };
    auto run_mode = [&](const std::string& name) -> Outcome<json> {
      if (name == "solve") {
        SolveRequest req{k_cap > 0 ? std::optional<std::size_t>(k_cap) : std::nullopt, slo_map, linking};
        auto s = solve(problem, req);
        if (!is_feasible(s)) return std::get<Infeasible>(s);
        const auto& sol = std::get<PlacementSolution>(s);
        return with_baselines(io::to_json(sol, "solve"), problem, sol);
      }
      const Mode m = parse_mode(name);
      Outcome<ModeResult> r = Infeasible{};
      switch (m) {
        case Mode::l_optimal: r = l_optimal(problem, linking); break;
        case Mode::k_optimal: r = k_optimal(problem, linking); break;
        case Mode::mean_k: r = mean_k(problem, linking); break;
        case Mode::slo_optimal: {
          SloMap caps = slo_map ? *slo_map : anycast_slo(problem, need_table());
          r = slo_optimal(problem, caps, linking);
          break;
        }
        case Mode::geo: r = baseline_placement(problem, need_table(), BaselineKind::geo); break;
        case Mode::anycast: r = baseline_placement(problem, need_table(), BaselineKind::anycast); break;
      }
      if (!is_feasible(r)) return std::get<Infeasible>(r);
      const auto& res = std::get<ModeResult>(r);
      return with_baselines(io::to_json(res), problem, res.solution);
    };

    if (mode == "all") {
      std::vector<std::string> modes{"geo", "anycast", "l_optimal", "k_optimal", "mean_k"};
      if (slo_map) modes.push_back("slo_optimal");
      json results = json::array();
      for (const auto& name : modes) {
        auto r = run_mode(name);
        if (!is_feasible(r)) return report_infeasible(config, std::get<Infeasible>(r), out);
        results.push_back(std::get<json>(r));
      }
      write_json(out, {{"config", config}, {"results", results}});
      return kOk;
    }
    auto r = run_mode(mode);
    if (!is_feasible(r)) return report_infeasible(config, std::get<Infeasible>(r), out);
    write_json(out, {{"config", config}, {"result", std::get<json>(r)}});
    return kOk;
  }
};

struct Pareto {
  ProblemInputs inputs;
  std::string slo;
  std::string out;
  std::uint64_t seed = 1;
  void add(CLI::App* app) {
    inputs.add(app);
    app->add_option("--slo", slo, "optional metro,slo_ms CSV")->check(CLI::ExistingFile);
    app->add_option("--out", out, "frontier CSV (K,weighted_latency_ms,total_hubs)")->required();
    app->add_option("--seed", seed, "recorded for provenance");
  }
  int run(const json& config) const {
    const auto problem = inputs.load();
    std::optional<SloMap> caps;
    if (!slo.empty()) caps = io::read_slo(slo);
    auto f = pareto_sweep(problem, caps, inputs.linking());
    if (!is_feasible(f)) return report_infeasible(config, std::get<Infeasible>(f), "");
    write_text(out, [&](std::ostream& o) { io::write_frontier_csv(o, std::get<ParetoFrontier>(f)); });
    write_sidecar(out, config);
    return kOk;
  }
};

// ---------------------------------------------------------------- analyze

struct AnalyzeWindows {
  std::string windows, defaults, out;
  std::string metric = "min";
  std::size_t samples = 50;
  std::int64_t horizon = kTenMinutes;
  std::uint64_t seed = 1;
  void add(CLI::App* app) {
    app->add_option("--windows", windows, "aggregated window statistics CSV")->required()->check(CLI::ExistingFile);
    app->add_option("--defaults", defaults, "defaults CSV")->required()->check(CLI::ExistingFile);
    app->add_option("--out", out, "output CSV")->required();
    app->add_option("--metric", metric, "min|median|p90|p95");
    app->add_option("--samples", samples, "sampled windows per metro")->check(CLI::PositiveNumber);
    app->add_option("--horizon", horizon, "window horizon in seconds (multiple of 600)");
    app->add_option("--seed", seed, "RNG seed");
  }
  SamplingOptions options() const {
    if (horizon <= 0 || horizon % kTenMinutes != 0) throw ValidationError("--horizon must be a positive multiple of 600");
    return {parse_window_metric(metric), samples, horizon, seed};
  }
  std::map<MetroId, PopId> geo(const DefaultsTable& table) const {
    std::map<MetroId, PopId> out;
    for (const auto& [m, d] : table) out[m] = d.geo;
    return out;
  }
};

struct Analyze {
  AnalyzeWindows opportunity, faster, anycast;
  std::string raw, out, sample_sizes = "10,20,30,40,50";
  std::size_t repeats = 10;
  double range_days = 2.0;
  std::uint64_t seed = 1;
  void add_decision(CLI::App* app) {
    app->add_option("--raw", raw, "raw measurement CSV")->required()->check(CLI::ExistingFile);
    app->add_option("--out", out, "output CSV")->required();
    app->add_option("--sample-sizes", sample_sizes, "comma-separated sample sizes");
    app->add_option("--repeats", repeats, "repetitions per metro")->check(CLI::PositiveNumber);
    app->add_option("--range-days", range_days, "length of each comparison range in days");
    app->add_option("--seed", seed, "RNG seed");
  }
  int run_opportunity(const json& config) const {
    const auto& a = opportunity;
    const auto stats = io::read_window_stats(a.windows);
    const auto r = opportunity_analysis(stats, a.geo(io::read_defaults(a.defaults)), a.options());
    write_text(a.out, [&](std::ostream& o) { io::write_opportunity_csv(o, r); });
    write_sidecar(a.out, config);
    std::cout << json{{"samples", r.samples.size()}, {"discarded_metros", r.discarded}}.dump(2) << "\n";
    return kOk;
  }
  int run_faster(const json& config) const {
    const auto& a = faster;
    const auto counts = faster_pop_counts(io::read_window_stats(a.windows), a.geo(io::read_defaults(a.defaults)),
                                          a.options());
    write_text(a.out, [&](std::ostream& o) { io::write_counts_csv(o, counts); });
    write_sidecar(a.out, config);
    return kOk;
  }
  int run_anycast(const json& config) const {
    const auto& a = anycast;
    const auto counts = anycast_fastest_counts(io::read_window_stats(a.windows), io::read_defaults(a.defaults),
                                               a.options());
    write_text(a.out, [&](std::ostream& o) { io::write_counts_csv(o, counts); });
    write_sidecar(a.out, config);
    return kOk;
  }
  int run_decision(const json& config) const {
    DecisionOptions o;
    o.sample_sizes = parse_sizes(sample_sizes, "sample-sizes");
    o.repeats = repeats;
    if (!(range_days > 0.0)) throw ValidationError("--range-days must be > 0");
    o.range = static_cast<UnixSeconds>(std::llround(range_days * 86400.0));
    o.seed = seed;
    std::vector<RowDiagnostic> rejected;
    const auto q = decision_quality(io::read_raw_records(raw, rejected), o);
    write_text(out, [&](std::ostream& os) { io::write_decision_csv(os, q); });
    write_sidecar(out, config);
    return kOk;
  }
};

// ---------------------------------------------------------------- maintain

struct Maintain {
  std::string windows, pops, metros, out, topologies_dir;
  std::size_t window_days = 4;
  std::string gammas = "1,0.9,0.8,0.7,0.6,0.5,0.4,0.3,0.2,0.1";
  std::string modes = "l_optimal,k_optimal,mean_k";
  std::string eq7 = "recursive";
  std::string eval_offset = "next";
  std::string percentile = "p90";
  std::int64_t min_samples = 20;
  std::int64_t beta = kDefaultBeta;
  std::string topology_sizes = "5,10,25,35,45";
  std::size_t topologies_per_size = 10;
  std::uint64_t seed = 1;
  void add(CLI::App* app) {
    app->add_option("--windows", windows, "aggregated window statistics CSV")->required()->check(CLI::ExistingFile);
    app->add_option("--pops", pops, "PoP catalog CSV")->required()->check(CLI::ExistingFile);
    app->add_option("--metros", metros, "metro coordinates CSV")->required()->check(CLI::ExistingFile);
    app->add_option("--out", out, "result CSV")->required();
    app->add_option("--topologies-dir", topologies_dir, "directory of topology CSVs to use instead of generating")
        ->check(CLI::ExistingDirectory);
    app->add_option("--window-days", window_days, "re-planning period in days")->check(CLI::IsMember({1, 2, 4}));
    app->add_option("--gamma", gammas, "comma-separated smoothing factors");
    app->add_option("--modes", modes, "comma-separated modes");
    app->add_option("--eq7", eq7, "recursive|literal");
    app->add_option("--eval-offset", eval_offset, "next|same");
    app->add_option("--percentile", percentile, "median|p90|p95");
    app->add_option("--min-samples", min_samples, "minimum samples per metro over the range");
    app->add_option("--beta", beta, "connections per hub");
    app->add_option("--topology-sizes", topology_sizes, "comma-separated generated topology sizes");
    app->add_option("--topologies-per-size", topologies_per_size, "generated topologies per size");
    app->add_option("--seed", seed, "RNG seed");
  }
  int run(const json& config) const {
    MaintenanceOptions o;
    o.window_days = window_days;
    o.gammas = parse_doubles(gammas, "gamma");
    o.modes.clear();
    for (const auto& m : split_list(modes)) o.modes.push_back(parse_mode(m));
    o.smoothing = parse_smoothing_form(eq7);
    o.offset = parse_eval_offset(eval_offset);
    o.percentile = parse_percentile(percentile);
    o.min_samples = min_samples;
    o.beta = beta;
    o.topology_sizes = parse_sizes(topology_sizes, "topology-sizes");
    o.topologies_per_size = topologies_per_size;
    o.seed = seed;
    std::vector<EnterpriseTopology> given;
    if (!topologies_dir.empty()) {
      std::vector<fs::path> files;
      for (const auto& e : fs::directory_iterator(topologies_dir))
        if (e.path().extension() == ".csv") files.push_back(e.path());
      std::sort(files.begin(), files.end());
      for (const auto& f : files) given.push_back(io::read_topology(f));
    }
    const auto report = maintenance_sim(io::read_window_stats(windows), io::read_pop_catalog(pops),
                                        io::read_metro_coords(metros), o, std::move(given));
    write_text(out, [&](std::ostream& os) { io::write_maintenance_csv(os, report); });
    write_sidecar(out, config);
    std::cout << json{{"metros", report.metros.size()}, {"windows", report.windows}, {"topologies", report.topologies}}
                     .dump(2)
              << "\n";
    return kOk;
  }
};

int dispatch(std::vector<std::string> args);

struct Replay {
  std::string config;
  void add(CLI::App* app) {
    app->add_option("config", config, "artifact JSON or .config.json sidecar")->required()->check(CLI::ExistingFile);
  }
  int run() const {
    std::ifstream in(config);
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw ValidationError("not JSON: " + config);
    const json& c = doc.contains("config") ? doc["config"] : doc;
    if (!c.contains("argv")) throw ValidationError("no recorded argv in " + config);
    return dispatch(c["argv"].get<std::vector<std::string>>());
  }
};

int dispatch(std::vector<std::string> args) {
  CLI::App app{"Cloud WAN hub placement planner"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  auto* synth = app.add_subcommand("synth", "generate synthetic inputs")->require_subcommand(1);
  SynthPops pops;
  SynthMetros metros;
  SynthTopo topo;
  SynthCorpus corpus;
  auto* s_pops = synth->add_subcommand("pops", "write the built-in PoP catalog");
  pops.add(s_pops);
  auto* s_metros = synth->add_subcommand("metros", "write synthetic metro coordinates");
  metros.add(s_metros);
  auto* s_topo = synth->add_subcommand("topo", "generate enterprise topologies");
  topo.add(s_topo);
  auto* s_corpus = synth->add_subcommand("corpus", "generate a raw measurement corpus with ground truth");
  corpus.add(s_corpus);

  Ingest ingest;
  auto* c_ingest = app.add_subcommand("ingest", "aggregate raw measurements into windows, matrix and defaults");
  ingest.add(c_ingest);

  Plan plan;
  auto* c_plan = app.add_subcommand("plan", "compute a placement");
  plan.add(c_plan);

  Pareto pareto;
  auto* c_pareto = app.add_subcommand("pareto", "sweep K from k_min to k_max");
  pareto.add(c_pareto);

  Analyze analyze;
  auto* c_analyze = app.add_subcommand("analyze", "measurement analyses")->require_subcommand(1);
  auto* a_opp = c_analyze->add_subcommand("opportunity", "log2 ratios of geo-default vs fastest alternative");
  analyze.opportunity.add(a_opp);
  auto* a_fast = c_analyze->add_subcommand("faster", "per-metro count of windows with a faster PoP");
  analyze.faster.add(a_fast);
  auto* a_any = c_analyze->add_subcommand("anycast", "per-metro count of windows where anycast was fastest");
  analyze.anycast.add(a_any);
  auto* a_dec = c_analyze->add_subcommand("decision", "decision quality versus sample size");
  analyze.add_decision(a_dec);

  Maintain maintain;
  auto* c_maintain = app.add_subcommand("maintain", "predictive topology maintenance simulation");
  maintain.add(c_maintain);

  Replay replay;
  auto* c_replay = app.add_subcommand("replay", "re-run the command recorded in an artifact");
  replay.add(c_replay);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalid;
  }

  auto config_of = [&](std::initializer_list<const CLI::App*> path) {
    std::vector<const CLI::App*> chain{&app};
    chain.insert(chain.end(), path.begin(), path.end());
    return resolved_config(chain);
  };
  if (s_pops->parsed()) return pops.run(config_of({synth, s_pops}));
  if (s_metros->parsed()) return metros.run(config_of({synth, s_metros}));
  if (s_topo->parsed()) return topo.run(config_of({synth, s_topo}));
  if (s_corpus->parsed()) return corpus.run(config_of({synth, s_corpus}));
  if (c_ingest->parsed()) return ingest.run(config_of({c_ingest}));
  if (c_plan->parsed()) return plan.run(config_of({c_plan}));
  if (c_pareto->parsed()) return pareto.run(config_of({c_pareto}));
  if (a_opp->parsed()) return analyze.run_opportunity(config_of({c_analyze, a_opp}));
  if (a_fast->parsed()) return analyze.run_faster(config_of({c_analyze, a_fast}));
  if (a_any->parsed()) return analyze.run_anycast(config_of({c_analyze, a_any}));
  if (a_dec->parsed()) return analyze.run_decision(config_of({c_analyze, a_dec}));
  if (c_maintain->parsed()) return maintain.run(config_of({c_maintain}));
  if (c_replay->parsed()) return replay.run();
  return kInvalid;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(std::vector<std::string>(argv + 1, argv + argc));
  } catch (const hubplan::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  }
}
