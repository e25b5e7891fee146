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

#include "hubplan/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace hubplan {

PopCatalog::PopCatalog(std::vector<PopSite> sites) : sites_(std::move(sites)) {
  if (sites_.empty()) throw ValidationError("PoP catalog is empty");
  for (std::size_t i = 0; i < sites_.size(); ++i) {
    const auto& site = sites_[i];
    if (site.id.empty()) throw ValidationError("PoP id must be non-empty");
    if (!(site.location.lat >= -90.0 && site.location.lat <= 90.0))
      throw ValidationError("PoP " + site.id + ": latitude out of range");
    if (!(site.location.lon >= -180.0 && site.location.lon <= 180.0))
      throw ValidationError("PoP " + site.id + ": longitude out of range");
    if (!index_.emplace(site.id, i).second)
      throw ValidationError("duplicate PoP id " + site.id);
  }
}

const PopSite& PopCatalog::at(const PopId& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw ValidationError("unknown PoP " + id);
  return sites_[it->second];
}

EnterpriseTopology::EnterpriseTopology(std::vector<BranchOffice> offices)
    : offices_(std::move(offices)) {
  std::set<MetroId> seen;
  for (const auto& office : offices_) {
    if (office.metro.empty()) throw ValidationError("metro id must be non-empty");
    if (office.connections < 1)
      throw ValidationError("metro " + office.metro + ": connections must be >= 1");
    if (!seen.insert(office.metro).second)
      throw ValidationError("duplicate metro " + office.metro);
  }
}

std::int64_t EnterpriseTopology::total_connections() const {
  std::int64_t total = 0;
  for (const auto& office : offices_) total += office.connections;
  return total;
}

LatencyMatrix LatencyMatrix::from_entries(std::vector<LatencyEntry> entries) {
  LatencyMatrix matrix;
  std::set<MetroId> metros;
  std::set<PopId> pops;
  for (const auto& e : entries) {
    if (e.metro.empty() || e.pop.empty()) throw ValidationError("latency entry with empty id");
    if (!std::isfinite(e.ms) || e.ms <= 0.0)
      throw ValidationError("latency " + e.metro + "->" + e.pop + " must be finite and > 0");
    metros.insert(e.metro);
    pops.insert(e.pop);
  }
  matrix.metros_.assign(metros.begin(), metros.end());
  matrix.pops_.assign(pops.begin(), pops.end());
  for (std::size_t j = 0; j < matrix.metros_.size(); ++j) matrix.metro_index_[matrix.metros_[j]] = j;
  for (std::size_t i = 0; i < matrix.pops_.size(); ++i) matrix.pop_index_[matrix.pops_[i]] = i;

  const auto m = static_cast<Eigen::Index>(matrix.metros_.size());
  const auto p = static_cast<Eigen::Index>(matrix.pops_.size());
  matrix.values_ = MatrixX::Constant(m, p, std::numeric_limits<double>::quiet_NaN());
  matrix.present_ = MaskX::Constant(m, p, false);
  for (const auto& e : entries) {
    const auto j = static_cast<Eigen::Index>(matrix.metro_index_.at(e.metro));
    const auto i = static_cast<Eigen::Index>(matrix.pop_index_.at(e.pop));
    if (matrix.present_(j, i)) throw ValidationError("duplicate latency entry " + e.metro + "->" + e.pop);
    matrix.present_(j, i) = true;
    matrix.values_(j, i) = e.ms;
  }
  return matrix;
}

std::optional<std::size_t> LatencyMatrix::metro_index(const MetroId& metro) const {
  auto it = metro_index_.find(metro);
  if (it == metro_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> LatencyMatrix::pop_index(const PopId& pop) const {
  auto it = pop_index_.find(pop);
  if (it == pop_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<Millis> LatencyMatrix::at(const MetroId& metro, const PopId& pop) const {
  auto j = metro_index(metro);
  auto i = pop_index(pop);
  if (!j || !i) return std::nullopt;
  const auto r = static_cast<Eigen::Index>(*j);
  const auto c = static_cast<Eigen::Index>(*i);
  if (!present_(r, c)) return std::nullopt;
  return values_(r, c);
}

std::vector<LatencyEntry> LatencyMatrix::entries() const {
  std::vector<LatencyEntry> out;
  out.reserve(entry_count());
  for (Eigen::Index j = 0; j < values_.rows(); ++j)
    for (Eigen::Index i = 0; i < values_.cols(); ++i)
      if (present_(j, i))
        out.push_back({metros_[static_cast<std::size_t>(j)], pops_[static_cast<std::size_t>(i)],
                       values_(j, i)});
  return out;
}

MissingPolicy MissingPolicy::parse(const std::string& text) {
  if (text == "forbid") return forbid();
  const std::string prefix = "big-m:";
  if (text.rfind(prefix, 0) == 0) {
    const std::string number = text.substr(prefix.size());
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(number, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != number.size() || number.empty() || !std::isfinite(value) || value <= 0.0)
      throw ValidationError("invalid big-M latency in '" + text + "'");
    return big_m_value(value);
  }
  throw ValidationError("missing-pair policy must be 'forbid' or 'big-m:<ms>', got '" + text + "'");
}

std::string MissingPolicy::to_string() const {
  if (kind == Kind::forbid) return "forbid";
  std::string number = std::to_string(big_m);
  number.erase(number.find_last_not_of('0') + 1);
  if (!number.empty() && number.back() == '.') number.pop_back();
  return "big-m:" + number;
}

PlacementProblem::PlacementProblem(PopCatalog pops, EnterpriseTopology topology,
                                   LatencyMatrix latency, std::int64_t beta, MissingPolicy missing)
    : catalog_(std::move(pops)),
      topology_(std::move(topology)),
      measurements_(std::move(latency)),
      beta_(beta),
      missing_(missing) {
  if (beta_ < 1) throw ValidationError("beta must be >= 1");
  if (topology_.size() == 0) throw ValidationError("enterprise topology has no metros");
  if (missing_.kind == MissingPolicy::Kind::big_m && !(missing_.big_m > 0.0))
    throw ValidationError("big-M latency must be > 0");

  for (const auto& pop : measurements_.pops())
    if (!catalog_.contains(pop)) throw ValidationError("latency matrix references unknown PoP " + pop);

  for (const auto& site : catalog_.sites()) pops_.push_back(site.id);
  std::sort(pops_.begin(), pops_.end());
  std::vector<const BranchOffice*> offices;
  for (const auto& office : topology_.offices()) offices.push_back(&office);
  std::sort(offices.begin(), offices.end(),
            [](const BranchOffice* a, const BranchOffice* b) { return a->metro < b->metro; });
  for (const auto* office : offices) {
    metros_.push_back(office->metro);
    raw_connections_.push_back(office->connections);
  }
  for (std::size_t j = 0; j < metros_.size(); ++j) metro_index_[metros_[j]] = j;
  for (std::size_t i = 0; i < pops_.size(); ++i) pop_index_[pops_[i]] = i;

  const auto m = static_cast<Eigen::Index>(metros_.size());
  const auto p = static_cast<Eigen::Index>(pops_.size());
  latency_ = MatrixX::Constant(m, p, std::numeric_limits<double>::quiet_NaN());
  measured_ = MaskX::Constant(m, p, false);
  connections_.resize(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const auto& metro = metros_[static_cast<std::size_t>(j)];
    connections_(j) = static_cast<double>(raw_connections_[static_cast<std::size_t>(j)]);
    for (Eigen::Index i = 0; i < p; ++i) {
      if (auto value = measurements_.at(metro, pops_[static_cast<std::size_t>(i)])) {
        latency_(j, i) = *value;
        measured_(j, i) = true;
      }
    }
    if (!measured_.row(j).any())
      throw ValidationError("metro " + metro + " has no latency measurement to any PoP");
  }
  if (missing_.kind == MissingPolicy::Kind::big_m) {
    latency_ = measured_.select(latency_, MatrixX::Constant(m, p, missing_.big_m));
    admissible_ = MaskX::Constant(m, p, true);
  } else {
    admissible_ = measured_;
  }
}

std::optional<std::size_t> PlacementProblem::metro_index(const MetroId& id) const {
  auto it = metro_index_.find(id);
  if (it == metro_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> PlacementProblem::pop_index(const PopId& id) const {
  auto it = pop_index_.find(id);
  if (it == pop_index_.end()) return std::nullopt;
  return it->second;
}

Assignment PlacementSolution::assignment() const {
  Assignment out;
  for (const auto& a : assignments) out.emplace(a.metro, a.pop);
  return out;
}

std::optional<PopId> PlacementSolution::pop_for(const MetroId& metro) const {
  auto it = std::lower_bound(assignments.begin(), assignments.end(), metro,
                             [](const AssignedMetro& a, const MetroId& id) { return a.metro < id; });
  if (it == assignments.end() || it->metro != metro) return std::nullopt;
  return it->pop;
}

namespace {

std::vector<std::size_t> to_indices(const Assignment& assignment, const PlacementProblem& problem) {
  if (assignment.size() != problem.metro_count())
    throw ContractViolation("assignment must cover every metro exactly once");
  std::vector<std::size_t> pop_of_metro(problem.metro_count());
  for (const auto& [metro, pop] : assignment) {
    auto j = problem.metro_index(metro);
    if (!j) throw ContractViolation("assignment names unknown metro " + metro);
    auto i = problem.pop_index(pop);
    if (!i) throw ContractViolation("assignment names unknown PoP " + pop);
    pop_of_metro[*j] = *i;
  }
  return pop_of_metro;
}

void check_admissible(const std::vector<std::size_t>& pop_of_metro, const PlacementProblem& problem) {
  if (pop_of_metro.size() != problem.metro_count())
    throw ContractViolation("assignment must cover every metro exactly once");
  for (std::size_t j = 0; j < pop_of_metro.size(); ++j) {
    const auto i = pop_of_metro[j];
    if (i >= problem.pop_count()) throw ContractViolation("assignment PoP index out of range");
    if (!problem.admissible()(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)))
      throw ContractViolation("no latency entry for " + problem.metro_id(j) + " -> " +
                              problem.pop_id(i));
  }
}

ArrayX latencies_of(const std::vector<std::size_t>& pop_of_metro, const PlacementProblem& problem) {
  ArrayX out(static_cast<Eigen::Index>(pop_of_metro.size()));
  for (std::size_t j = 0; j < pop_of_metro.size(); ++j)
    out(static_cast<Eigen::Index>(j)) =
        problem.latency()(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(pop_of_metro[j]));
  return out;
}

HubTally tally(const std::vector<std::size_t>& pop_of_metro, const PlacementProblem& problem) {
  std::vector<std::int64_t> per_pop(problem.pop_count(), 0);
  for (std::size_t j = 0; j < pop_of_metro.size(); ++j) per_pop[pop_of_metro[j]] += problem.connections(j);
  HubTally out;
  for (std::size_t i = 0; i < per_pop.size(); ++i) {
    if (per_pop[i] == 0) continue;
    const auto hubs = ceil_div(per_pop[i], problem.beta());
    out.per_pop.push_back({problem.pop_id(i), hubs});
    out.total += hubs;
  }
  return out;
}

}  // namespace

ArrayX assigned_latencies(const Assignment& assignment, const PlacementProblem& problem) {
  auto idx = to_indices(assignment, problem);
  check_admissible(idx, problem);
  return latencies_of(idx, problem);
}

Millis weighted_latency(const Assignment& assignment, const PlacementProblem& problem) {
  return weighted_mean(problem.connections(), assigned_latencies(assignment, problem));
}

HubTally hub_counts(const Assignment& assignment, const PlacementProblem& problem) {
  auto idx = to_indices(assignment, problem);
  check_admissible(idx, problem);
  return tally(idx, problem);
}

PlacementSolution make_solution(const Assignment& assignment, const PlacementProblem& problem) {
  return make_solution(to_indices(assignment, problem), problem);
}

PlacementSolution make_solution(const std::vector<std::size_t>& pop_of_metro,
                                const PlacementProblem& problem) {
  check_admissible(pop_of_metro, problem);
  PlacementSolution s;
  const ArrayX lat = latencies_of(pop_of_metro, problem);
  for (std::size_t j = 0; j < pop_of_metro.size(); ++j)
    s.assignments.push_back(
        {problem.metro_id(j), problem.pop_id(pop_of_metro[j]), lat(static_cast<Eigen::Index>(j))});
  std::set<PopId> open;
  for (auto i : pop_of_metro) open.insert(problem.pop_id(i));
  s.open_pops.assign(open.begin(), open.end());
  s.k = s.open_pops.size();
  s.weighted_latency = weighted_mean(problem.connections(), lat);
  auto hubs = tally(pop_of_metro, problem);
  s.hubs = std::move(hubs.per_pop);
  s.total_hubs = hubs.total;
  return s;
}

}  // namespace hubplan
