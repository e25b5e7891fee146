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

#include <variant>

namespace hubplan {

/// Per-metro latency caps. Metros absent from the map are uncapped.
using SloMap = std::map<MetroId, Millis>;

/// How open PoPs are linked to metro assignments.
///  linked:  u_i >= U_ji for every metro j (PoPs may be shared).
///  literal: u_i - sum_j U_ji >= 0 with binary u_i, i.e. each PoP serves
///           at most one metro.
enum class LinkingForm { linked, literal };

LinkingForm parse_linking_form(const std::string& text);
std::string to_string(LinkingForm form);

struct SolveRequest {
  std::optional<std::size_t> k_cap;
  std::optional<SloMap> slo;
  LinkingForm linking = LinkingForm::linked;
};

struct Infeasible {
  enum class Cause { coverage, k_cap, slo, linking };
  Cause cause = Cause::coverage;
  std::vector<MetroId> witnesses;
  std::string detail;
};

std::string to_string(Infeasible::Cause cause);

template <typename T>
using Outcome = std::variant<T, Infeasible>;

template <typename T>
bool is_feasible(const Outcome<T>& outcome) {
  return std::holds_alternative<T>(outcome);
}

/// Provably optimal assignment for the request. Among equal objectives the
/// result has the fewest open PoPs, then the lexicographically smallest
/// sorted open-PoP set, then the lexicographically smallest assignment.
Outcome<PlacementSolution> solve(const PlacementProblem& problem, const SolveRequest& request = {});

/// Smallest K admitting a total assignment (exact minimum set cover).
Outcome<std::size_t> find_k_min(const PlacementProblem& problem, const std::optional<SloMap>& slo = {},
                                LinkingForm linking = LinkingForm::linked);

enum class Mode { l_optimal, k_optimal, mean_k, slo_optimal, geo, anycast };

Mode parse_mode(const std::string& text);
std::string to_string(Mode mode);

struct ModeResult {
  Mode mode = Mode::l_optimal;
  PlacementSolution solution;
  std::optional<std::size_t> k_min;
  std::optional<std::size_t> k_max;
  /// Baselines only: metros whose default PoP was unusable and that fell
  /// back to their minimum-latency measured PoP.
  std::vector<MetroId> fallback_metros;
};

/// round((k_min + k_max) / 2), halves rounded up.
constexpr std::size_t mean_k_of(std::size_t k_min, std::size_t k_max) {
  return (k_min + k_max + 1) / 2;
}

Outcome<ModeResult> l_optimal(const PlacementProblem& problem, LinkingForm linking = LinkingForm::linked);
Outcome<ModeResult> k_optimal(const PlacementProblem& problem, LinkingForm linking = LinkingForm::linked);
Outcome<ModeResult> mean_k(const PlacementProblem& problem, LinkingForm linking = LinkingForm::linked);
Outcome<ModeResult> slo_optimal(const PlacementProblem& problem, const SloMap& slo,
                                LinkingForm linking = LinkingForm::linked);

Outcome<ParetoFrontier> pareto_sweep(const PlacementProblem& problem,
                                     const std::optional<SloMap>& slo = {},
                                     LinkingForm linking = LinkingForm::linked);

enum class BaselineKind { geo, anycast };

ModeResult baseline_placement(const PlacementProblem& problem, const DefaultsTable& defaults,
                              BaselineKind kind);

struct BaselineHubs {
  std::int64_t baseline1 = 0;  // every metro has its own hubs
  std::int64_t baseline2 = 0;  // metros on the same PoP share hubs
  std::int64_t baseline3 = 0;  // all connections pooled
};

BaselineHubs baseline_hub_counts(const PlacementProblem& problem, const Assignment& assignment);

/// Per-metro SLO equal to the latency of the metro's anycast-default PoP.
/// Metros whose anycast default is unmeasured are left uncapped.
SloMap anycast_slo(const PlacementProblem& problem, const DefaultsTable& defaults);

}  // namespace hubplan
