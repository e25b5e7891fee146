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

#include "hubplan/synthgen.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

namespace hubplan {
namespace {

namespace fs = std::filesystem;

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("hubplan_io_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path put(const std::string& name, const std::string& text) {
    io::write_file(dir_ / name, text);
    return dir_ / name;
  }

  fs::path dir_;
};

TEST(FormatNumber, ShortestRoundTrip) {
  EXPECT_EQ(io::format_number(31), "31");
  EXPECT_EQ(io::format_number(0.1), "0.1");
  EXPECT_EQ(io::format_number(27.5), "27.5");
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> v(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double x = v(rng);
    EXPECT_EQ(std::stod(io::format_number(x)), x);
  }
}

TEST(SplitCsv, Fields) {
  EXPECT_EQ(io::split_csv_line("a,b,,c"), (std::vector<std::string>{"a", "b", "", "c"}));
  EXPECT_EQ(io::split_csv_line("a,b\r"), (std::vector<std::string>{"a", "b"}));
}

TEST_F(TempDir, PopCatalogRoundTrip) {
  auto pops = default_pop_catalog();
  std::ostringstream out;
  io::write_pop_catalog(out, pops);
  auto back = io::read_pop_catalog(put("pops.csv", out.str()));
  ASSERT_EQ(back.size(), pops.size());
  for (const auto& s : pops.sites()) {
    EXPECT_EQ(back.at(s.id).location.lat, s.location.lat);
    EXPECT_EQ(back.at(s.id).location.lon, s.location.lon);
  }
}

TEST_F(TempDir, HeaderAndFieldErrors) {
  EXPECT_THROW(io::read_pop_catalog(put("a.csv", "id,lat,lon\nx,1,2\n")), ValidationError);
  EXPECT_THROW(io::read_pop_catalog(put("b.csv", "pop_id,lat,lon\nx,1\n")), ValidationError);
  EXPECT_THROW(io::read_pop_catalog(put("c.csv", "pop_id,lat,lon\nx,north,2\n")), ValidationError);
  EXPECT_THROW(io::read_topology(put("d.csv", "metro,connections\nm,0\n")), ValidationError);
  EXPECT_THROW(io::read_topology(put("e.csv", "metro,connections\nm,1.5\n")), ValidationError);
  EXPECT_THROW(io::read_pop_catalog(dir_ / "missing.csv"), ValidationError);
}

TEST_F(TempDir, LatencyMatrixRoundTrip) {
  auto m = LatencyMatrix::from_entries({{"a", "x", 10.25}, {"b", "y", 3}, {"b", "x", 7.125}});
  std::ostringstream out;
  io::write_latency_matrix(out, m);
  auto back = io::read_latency_matrix(put("lat.csv", out.str()));
  EXPECT_EQ(back.entry_count(), 3u);
  EXPECT_EQ(*back.at("a", "x"), 10.25);
  EXPECT_EQ(*back.at("b", "x"), 7.125);
}

TEST_F(TempDir, RawRecordsRejectBadRows) {
  auto path = put("raw.csv",
                  "timestamp,metro,network,pop,rtt_ms\n"
                  "100,m,as1,x,10.5\n"
                  "101,m,as1,x,-2\n"
                  "oops,m,as1,x,1\n"
                  "102,m,as1,y,4\n");
  std::vector<RowDiagnostic> rejected;
  auto records = io::read_raw_records(path, rejected);
  // Non-positive rtts parse; the aggregator reports them.
  ASSERT_EQ(records.size(), 3u);
  EXPECT_EQ(records[2].pop, "y");
  ASSERT_EQ(rejected.size(), 1u);
  EXPECT_EQ(aggregate_windows(records).rejected.size(), 1u);
}

TEST_F(TempDir, RawAndWindowStatsRoundTrip) {
  CorpusSpec spec;
  spec.pops = default_pop_catalog();
  spec.metros = default_metro_coords(5, 2);
  spec.days = 1;
  spec.rate_per_hour = 20;
  auto corpus = gen_corpus(spec);
  std::ostringstream raw;
  io::write_raw_header(raw);
  for (const auto& r : corpus.records) io::write_raw_record(raw, r);
  std::vector<RowDiagnostic> rejected;
  auto back = io::read_raw_records(put("raw.csv", raw.str()), rejected);
  ASSERT_EQ(back.size(), corpus.records.size());
  EXPECT_TRUE(rejected.empty());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].rtt_ms, corpus.records[i].rtt_ms);
    EXPECT_EQ(back[i].timestamp, corpus.records[i].timestamp);
  }

  auto stats = aggregate_windows(back).stats;
  std::ostringstream agg;
  io::write_window_stats(agg, stats);
  auto again = io::read_window_stats(put("agg.csv", agg.str()));
  ASSERT_EQ(again.size(), stats.size());
  for (std::size_t i = 0; i < stats.size(); ++i) {
    EXPECT_EQ(again[i].p90, stats[i].p90);
    EXPECT_EQ(again[i].sample_count, stats[i].sample_count);
  }
}

TEST_F(TempDir, WindowStatsInvariantChecked) {
  EXPECT_THROW(io::read_window_stats(put("bad.csv",
                                         "window_start,metro,network,pop,sample_count,median_ms,p90_ms,p95_ms,min_ms\n"
                                         "0,m,as1,x,3,10,5,12,1\n")),
               ValidationError);
}

TEST(Json, SolutionAndInfeasible) {
  std::vector<PopSite> sites{{"dal", {32.8, -96.8}}};
  PlacementProblem p(PopCatalog(sites), EnterpriseTopology({{"Louisiana", 825}}),
                     LatencyMatrix::from_entries({{"Louisiana", "dal", 31}}));
  auto j = io::to_json(make_solution(Assignment{{"Louisiana", "dal"}}, p), "l_optimal");
  EXPECT_EQ(j["k"], 1);
  EXPECT_EQ(j["weighted_latency_ms"], 31.0);
  EXPECT_EQ(j["assignments"][0]["pop"], "dal");
  EXPECT_EQ(j["total_hubs"], 1);

  Infeasible inf{Infeasible::Cause::slo, {"m"}, "too tight"};
  auto k = io::to_json(inf);
  EXPECT_EQ(k["cause"], "slo");
  EXPECT_EQ(k["witnesses"][0], "m");
}

TEST(Json, TruthRoundTrip) {
  CorpusSpec spec;
  spec.pops = default_pop_catalog();
  spec.metros = default_metro_coords(20, 4);
  auto truth = corpus_truth(spec);
  auto back = io::truth_from_json(io::to_json(truth));
  ASSERT_EQ(back.metros.size(), truth.metros.size());
  for (const auto& [m, t] : truth.metros) {
    EXPECT_EQ(back.metros.at(m).routed_pop, t.routed_pop);
    EXPECT_EQ(back.metros.at(m).anomalous, t.anomalous);
    EXPECT_EQ(back.metros.at(m).measured, t.measured);
  }
}

}  // namespace
}  // namespace hubplan
