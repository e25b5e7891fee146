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

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace hubplan {

using PopId = std::string;
using MetroId = std::string;

/// Latency in milliseconds.
using Millis = double;

using MatrixX = Eigen::MatrixXd;
using VectorX = Eigen::VectorXd;
using ArrayX = Eigen::ArrayXd;
using MaskX = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Raised when an input violates a documented invariant.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an operation is handed data that breaks its precondition
/// (for example an assignment onto an unmeasured pair).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;
};

struct PopSite {
  PopId id;
  GeoPoint location;
};

class PopCatalog {
 public:
  PopCatalog() = default;
  explicit PopCatalog(std::vector<PopSite> sites);

  const std::vector<PopSite>& sites() const { return sites_; }
  std::size_t size() const { return sites_.size(); }
  bool contains(const PopId& id) const { return index_.count(id) != 0; }
  const PopSite& at(const PopId& id) const;

 private:
  std::vector<PopSite> sites_;
  std::unordered_map<PopId, std::size_t> index_;
};

struct BranchOffice {
  MetroId metro;
  std::int64_t connections = 1;
};

class EnterpriseTopology {
 public:
  EnterpriseTopology() = default;
  explicit EnterpriseTopology(std::vector<BranchOffice> offices);

  const std::vector<BranchOffice>& offices() const { return offices_; }
  std::size_t size() const { return offices_.size(); }
  std::int64_t total_connections() const;

 private:
  std::vector<BranchOffice> offices_;
};

struct LatencyEntry {
  MetroId metro;
  PopId pop;
  Millis ms = 0.0;
};

/// Dense (metro x pop) latency table with an explicit presence mask.
/// Rows and columns are sorted by identifier; absent cells hold NaN.
class LatencyMatrix {
 public:
  LatencyMatrix() = default;
  static LatencyMatrix from_entries(std::vector<LatencyEntry> entries);

  const std::vector<MetroId>& metros() const { return metros_; }
  const std::vector<PopId>& pops() const { return pops_; }
  const MatrixX& values() const { return values_; }
  const MaskX& present() const { return present_; }

  std::optional<Millis> at(const MetroId& metro, const PopId& pop) const;
  std::optional<std::size_t> metro_index(const MetroId& metro) const;
  std::optional<std::size_t> pop_index(const PopId& pop) const;
  std::size_t entry_count() const { return static_cast<std::size_t>(present_.count()); }
  std::vector<LatencyEntry> entries() const;

 private:
  std::vector<MetroId> metros_;
  std::vector<PopId> pops_;
  std::unordered_map<MetroId, std::size_t> metro_index_;
  std::unordered_map<PopId, std::size_t> pop_index_;
  MatrixX values_;
  MaskX present_;
};

/// How (metro, pop) pairs without a measurement are treated.
struct MissingPolicy {
  enum class Kind { forbid, big_m };
  Kind kind = Kind::forbid;
  Millis big_m = 0.0;

  static MissingPolicy forbid() { return {}; }
  static MissingPolicy big_m_value(Millis value) { return {Kind::big_m, value}; }
  static MissingPolicy parse(const std::string& text);
  std::string to_string() const;
};

inline constexpr std::int64_t kDefaultBeta = 1000;

/// Validated optimizer input. Metros and PoPs are indexed in sorted-id
/// order; `latency()` is m x p and `admissible()` marks usable pairs.
class PlacementProblem {
 public:
  PlacementProblem(PopCatalog pops, EnterpriseTopology topology, LatencyMatrix latency,
                   std::int64_t beta = kDefaultBeta,
                   MissingPolicy missing = MissingPolicy::forbid());

  const PopCatalog& catalog() const { return catalog_; }
  const EnterpriseTopology& topology() const { return topology_; }
  const LatencyMatrix& measurements() const { return measurements_; }
  std::int64_t beta() const { return beta_; }
  const MissingPolicy& missing_policy() const { return missing_; }

  std::size_t metro_count() const { return metros_.size(); }
  std::size_t pop_count() const { return pops_.size(); }
  const MetroId& metro_id(std::size_t j) const { return metros_[j]; }
  const PopId& pop_id(std::size_t i) const { return pops_[i]; }
  const std::vector<MetroId>& metro_ids() const { return metros_; }
  const std::vector<PopId>& pop_ids() const { return pops_; }
  std::optional<std::size_t> metro_index(const MetroId& id) const;
  std::optional<std::size_t> pop_index(const PopId& id) const;

  const MatrixX& latency() const { return latency_; }
  const MaskX& admissible() const { return admissible_; }
  const MaskX& measured() const { return measured_; }
  const ArrayX& connections() const { return connections_; }
  std::int64_t connections(std::size_t j) const { return raw_connections_[j]; }
  double total_connections() const { return connections_.sum(); }

 private:
  PopCatalog catalog_;
  EnterpriseTopology topology_;
  LatencyMatrix measurements_;
  std::int64_t beta_;
  MissingPolicy missing_;
  std::vector<MetroId> metros_;
  std::vector<PopId> pops_;
  std::unordered_map<MetroId, std::size_t> metro_index_;
  std::unordered_map<PopId, std::size_t> pop_index_;
  MatrixX latency_;
  MaskX admissible_;
  MaskX measured_;
  ArrayX connections_;
  std::vector<std::int64_t> raw_connections_;
};

/// One PoP per metro, keyed by metro id.
using Assignment = std::map<MetroId, PopId>;

struct AssignedMetro {
  MetroId metro;
  PopId pop;
  Millis latency_ms = 0.0;
  bool operator==(const AssignedMetro&) const = default;
};

struct HubCount {
  PopId pop;
  std::int64_t count = 0;
  bool operator==(const HubCount&) const = default;
};

struct HubTally {
  std::vector<HubCount> per_pop;
  std::int64_t total = 0;
};

struct PlacementSolution {
  std::vector<AssignedMetro> assignments;  // sorted by metro
  std::vector<PopId> open_pops;            // sorted
  std::size_t k = 0;
  Millis weighted_latency = 0.0;
  std::vector<HubCount> hubs;  // sorted by pop
  std::int64_t total_hubs = 0;

  Assignment assignment() const;
  std::optional<PopId> pop_for(const MetroId& metro) const;
  bool operator==(const PlacementSolution&) const = default;
};

struct ParetoPoint {
  std::size_t k_cap = 0;
  PlacementSolution solution;
};

struct ParetoFrontier {
  std::size_t k_min = 0;
  std::size_t k_max = 0;
  std::vector<ParetoPoint> points;
};

/// Connection-weighted mean of `values`. Both operands are array
/// expressions of equal length.
template <typename WeightsDerived, typename ValuesDerived>
typename ValuesDerived::Scalar weighted_mean(const Eigen::ArrayBase<WeightsDerived>& weights,
                                             const Eigen::ArrayBase<ValuesDerived>& values) {
  return (weights * values).sum() / weights.sum();
}

/// ceil(numerator / denominator) for positive integers.
constexpr std::int64_t ceil_div(std::int64_t numerator, std::int64_t denominator) {
  return (numerator + denominator - 1) / denominator;
}

/// Per-metro latencies of an assignment, in the problem's metro order.
/// Throws ContractViolation when the assignment is partial or uses an
/// inadmissible pair.
ArrayX assigned_latencies(const Assignment& assignment, const PlacementProblem& problem);

Millis weighted_latency(const Assignment& assignment, const PlacementProblem& problem);

HubTally hub_counts(const Assignment& assignment, const PlacementProblem& problem);

/// Builds a fully-populated solution, enforcing every PlacementSolution
/// invariant.
PlacementSolution make_solution(const Assignment& assignment, const PlacementProblem& problem);

/// Index form used by the optimizer: pop index per metro index.
PlacementSolution make_solution(const std::vector<std::size_t>& pop_of_metro,
                                const PlacementProblem& problem);

}  // namespace hubplan
