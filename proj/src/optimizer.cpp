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

#include "hubplan/optimizer.hpp"

#include <boost/dynamic_bitset.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace hubplan {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using ArrayXX = Eigen::ArrayXXd;

/// Dense view of a problem after SLO filtering: inadmissible cells are +inf.
struct Instance {
  const PlacementProblem* problem = nullptr;
  ArrayXX cost;  // m x p latency, +inf where not admissible
  ArrayX weights;
  std::size_t m = 0;
  std::size_t p = 0;

  bool allowed(std::size_t j, std::size_t i) const {
    return std::isfinite(cost(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)));
  }
};

Outcome<Instance> make_instance(const PlacementProblem& problem, const std::optional<SloMap>& slo) {
  Instance in;
  in.problem = &problem;
  in.m = problem.metro_count();
  in.p = problem.pop_count();
  in.weights = problem.connections();
  in.cost = problem.admissible().select(problem.latency().array(), ArrayXX::Constant(
                                                                       static_cast<Eigen::Index>(in.m),
                                                                       static_cast<Eigen::Index>(in.p), kInf));
  if (slo) {
    for (const auto& [metro, cap] : *slo) {
      if (std::isnan(cap) || cap <= 0.0) throw ValidationError("SLO for " + metro + " must be > 0");
      auto j = problem.metro_index(metro);
      if (!j) throw ValidationError("SLO names metro " + metro + " outside the topology");
      auto row = in.cost.row(static_cast<Eigen::Index>(*j));
      row = (row <= cap).select(row, kInf);
    }
  }
  Infeasible gap{Infeasible::Cause::coverage, {}, {}};
  Infeasible slo_gap{Infeasible::Cause::slo, {}, {}};
  for (std::size_t j = 0; j < in.m; ++j) {
    if (in.cost.row(static_cast<Eigen::Index>(j)).isFinite().any()) continue;
    if (problem.admissible().row(static_cast<Eigen::Index>(j)).any())
      slo_gap.witnesses.push_back(problem.metro_id(j));
    else
      gap.witnesses.push_back(problem.metro_id(j));
  }
  if (!gap.witnesses.empty()) {
    gap.detail = "metros without any admissible PoP";
    return gap;
  }
  if (!slo_gap.witnesses.empty()) {
    slo_gap.detail = "no measured PoP meets the SLO of these metros";
    return slo_gap;
  }
  return in;
}

/// Per-metro argmin over `open`, smallest index on ties.
std::vector<std::size_t> assign_within(const Instance& in, const std::vector<std::size_t>& open) {
  std::vector<std::size_t> out(in.m);
  for (std::size_t j = 0; j < in.m; ++j) {
    double best = kInf;
    std::size_t arg = in.p;
    for (auto i : open) {
      const double c = in.cost(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
      if (c < best || (c == best && i < arg)) {
        best = c;
        arg = i;
      }
    }
    out[j] = arg;
  }
  return out;
}

/// Exact minimiser of sum_j w_j * min_{i in S} cost(j, i) over subsets S with
/// |S| <= cap, ordered by (objective, |S|, sorted S).
class SubsetSearch {
 public:
  SubsetSearch(const Instance& in, std::size_t cap) : in_(in), cap_(std::min(cap, in.p)) {
    order_.resize(in_.p);
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::vector<std::pair<Eigen::Index, double>> score(in_.p);
    for (std::size_t i = 0; i < in_.p; ++i) {
      const auto col = in_.cost.col(static_cast<Eigen::Index>(i));
      const auto covered = col.isFinite();
      score[i] = {covered.count(),
                  (covered.select(col, 0.0) * in_.weights).sum()};
    }
    std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
      if (score[a].first != score[b].first) return score[a].first > score[b].first;
      return score[a].second < score[b].second;
    });
    const auto m = static_cast<Eigen::Index>(in_.m);
    suffix_min_.assign(in_.p + 1, ArrayX::Constant(m, kInf));
    for (std::size_t t = in_.p; t-- > 0;)
      suffix_min_[t] = suffix_min_[t + 1].min(in_.cost.col(static_cast<Eigen::Index>(order_[t])));
  }

  std::optional<std::vector<std::size_t>> run() {
    seed_greedy();
    std::vector<std::size_t> chosen;
    dfs(0, chosen, ArrayX::Constant(static_cast<Eigen::Index>(in_.m), kInf), kInf);
    if (!std::isfinite(best_cost_)) return std::nullopt;
    return best_set_;
  }

 private:
  void consider(double cost, std::vector<std::size_t> set) {
    if (!std::isfinite(cost)) return;
    std::sort(set.begin(), set.end());
    if (cost < best_cost_ || (cost == best_cost_ && set.size() < best_set_.size()) ||
        (cost == best_cost_ && set.size() == best_set_.size() && set < best_set_)) {
      best_cost_ = cost;
      best_set_ = std::move(set);
    }
  }

  double objective(const ArrayX& per_metro) const { return (in_.weights * per_metro).sum(); }

  void seed_greedy() {
    std::vector<std::size_t> chosen;
    std::vector<bool> used(in_.p, false);
    ArrayX cur = ArrayX::Constant(static_cast<Eigen::Index>(in_.m), kInf);
    while (chosen.size() < cap_) {
      std::size_t pick = in_.p;
      Eigen::Index pick_uncovered = 0;
      double pick_cost = kInf;
      for (std::size_t i = 0; i < in_.p; ++i) {
        if (used[i]) continue;
        const ArrayX next = cur.min(in_.cost.col(static_cast<Eigen::Index>(i)));
        const auto finite = next.isFinite();
        const Eigen::Index uncovered = static_cast<Eigen::Index>(in_.m) - finite.count();
        const double c = (finite.select(next, 0.0) * in_.weights).sum();
        if (pick == in_.p || uncovered < pick_uncovered ||
            (uncovered == pick_uncovered && c < pick_cost)) {
          pick = i;
          pick_uncovered = uncovered;
          pick_cost = c;
        }
      }
      if (pick == in_.p) break;
      const bool covered_before = cur.isFinite().all();
      if (covered_before && !(pick_cost < objective(cur))) break;
      used[pick] = true;
      chosen.push_back(pick);
      cur = cur.min(in_.cost.col(static_cast<Eigen::Index>(pick)));
    }
    if (cur.isFinite().all()) consider(objective(cur), chosen);
  }

  void dfs(std::size_t t, std::vector<std::size_t>& chosen, const ArrayX& current, double current_cost) {
    if (chosen.size() >= cap_ || t >= in_.p) return;

    // Any strict superset draws its extra PoPs from order_[t..].
    const ArrayX reachable = current.min(suffix_min_[t]);
    if (!reachable.isFinite().all()) return;
    const double bound = objective(reachable);
    if (bound > best_cost_) return;
    if (bound == best_cost_ && chosen.size() + 1 > best_set_.size()) return;

    if (std::isfinite(current_cost)) {
      // Savings are subadditive, so the best `slots` single-PoP savings
      // bound what any completion can still gain.
      const std::size_t slots = cap_ - chosen.size();
      std::vector<double> savings;
      savings.reserve(in_.p - t);
      for (std::size_t r = t; r < in_.p; ++r) {
        const auto col = in_.cost.col(static_cast<Eigen::Index>(order_[r]));
        savings.push_back((in_.weights * (current - col).max(0.0)).sum());
      }
      if (slots < savings.size()) {
        std::nth_element(savings.begin(), savings.begin() + static_cast<std::ptrdiff_t>(slots),
                         savings.end(), std::greater<>());
        savings.resize(slots);
      }
      const double gain = std::accumulate(savings.begin(), savings.end(), 0.0);
      const double tol = 1e-9 * std::max(1.0, std::abs(best_cost_));
      if (std::isfinite(best_cost_) && current_cost - gain > best_cost_ + tol) return;
    }

    for (std::size_t r = t; r < in_.p; ++r) {
      const std::size_t i = order_[r];
      const ArrayX next = current.min(in_.cost.col(static_cast<Eigen::Index>(i)));
      chosen.push_back(i);
      double next_cost = kInf;
      if (next.isFinite().all()) {
        next_cost = objective(next);
        consider(next_cost, chosen);
      }
      dfs(r + 1, chosen, next, next_cost);
      chosen.pop_back();
    }
  }

  const Instance& in_;
  std::size_t cap_;
  std::vector<std::size_t> order_;
  std::vector<ArrayX> suffix_min_;
  double best_cost_ = kInf;
  std::vector<std::size_t> best_set_;
};

/// Minimum-cost injective assignment of metros (rows) to PoPs (columns),
/// Hungarian method with potentials. Returns nullopt when no finite
/// matching exists.
std::optional<std::vector<std::size_t>> injective_assignment(const Instance& in) {
  const std::size_t n = in.m;
  const std::size_t k = in.p;
  if (n > k) return std::nullopt;
  double finite_total = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < k; ++i)
      if (in.allowed(j, i))
        finite_total += in.weights(static_cast<Eigen::Index>(j)) *
                        in.cost(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
  const double forbidden = 4.0 * (finite_total + 1.0);
  auto cell = [&](std::size_t j, std::size_t i) {
    if (!in.allowed(j, i)) return forbidden;
    return in.weights(static_cast<Eigen::Index>(j)) *
           in.cost(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
  };
  // 1-based arrays as in the classical formulation.
  std::vector<double> u(n + 1, 0.0), v(k + 1, 0.0);
  std::vector<std::size_t> match(k + 1, 0), way(k + 1, 0);
  for (std::size_t row = 1; row <= n; ++row) {
    match[0] = row;
    std::size_t col0 = 0;
    std::vector<double> minv(k + 1, kInf);
    std::vector<bool> used(k + 1, false);
    do {
      used[col0] = true;
      const std::size_t r0 = match[col0];
      double delta = kInf;
      std::size_t col1 = 0;
      for (std::size_t c = 1; c <= k; ++c) {
        if (used[c]) continue;
        const double cur = cell(r0 - 1, c - 1) - u[r0] - v[c];
        if (cur < minv[c]) {
          minv[c] = cur;
          way[c] = col0;
        }
        if (minv[c] < delta) {
          delta = minv[c];
          col1 = c;
        }
      }
      for (std::size_t c = 0; c <= k; ++c) {
        if (used[c]) {
          u[match[c]] += delta;
          v[c] -= delta;
        } else {
          minv[c] -= delta;
        }
      }
      col0 = col1;
    } while (match[col0] != 0);
    do {
      const std::size_t col1 = way[col0];
      match[col0] = match[col1];
      col0 = col1;
    } while (col0 != 0);
  }
  std::vector<std::size_t> out(n, k);
  for (std::size_t c = 1; c <= k; ++c)
    if (match[c] != 0) out[match[c] - 1] = c - 1;
  for (std::size_t j = 0; j < n; ++j)
    if (out[j] >= k || !in.allowed(j, out[j])) return std::nullopt;
  return out;
}

/// Per-metro argmin; ties prefer a PoP an earlier metro already opened,
/// then the smallest id.
std::vector<std::size_t> greedy_latency_optimal(const Instance& in) {
  std::vector<bool> open(in.p, false);
  std::vector<std::size_t> out(in.m);
  for (std::size_t j = 0; j < in.m; ++j) {
    const auto row = in.cost.row(static_cast<Eigen::Index>(j));
    const double best = row.minCoeff();
    std::size_t fresh = in.p, shared = in.p;
    for (std::size_t i = 0; i < in.p; ++i) {
      if (row(static_cast<Eigen::Index>(i)) != best) continue;
      if (open[i] && shared == in.p) shared = i;
      if (fresh == in.p) fresh = i;
    }
    out[j] = shared != in.p ? shared : fresh;
    open[out[j]] = true;
  }
  return out;
}

class SetCover {
 public:
  explicit SetCover(const Instance& in) : in_(in), covers_(in.p, boost::dynamic_bitset<>(in.m)) {
    for (std::size_t i = 0; i < in.p; ++i)
      for (std::size_t j = 0; j < in.m; ++j)
        if (in.allowed(j, i)) covers_[i].set(j);
  }

  bool coverable_with(std::size_t k) const {
    boost::dynamic_bitset<> uncovered(in_.m);
    uncovered.set();
    return search(uncovered, k);
  }

 private:
  bool search(const boost::dynamic_bitset<>& uncovered, std::size_t left) const {
    if (uncovered.none()) return true;
    if (left == 0) return false;
    std::size_t max_gain = 0;
    for (const auto& c : covers_) max_gain = std::max(max_gain, (c & uncovered).count());
    if (uncovered.count() > left * max_gain) return false;

    // Branch on the uncovered metro with the fewest options.
    std::size_t pivot = uncovered.size();
    std::size_t pivot_options = in_.p + 1;
    for (auto j = uncovered.find_first(); j != boost::dynamic_bitset<>::npos; j = uncovered.find_next(j)) {
      std::size_t options = 0;
      for (const auto& c : covers_) options += c.test(j) ? 1 : 0;
      if (options < pivot_options) {
        pivot_options = options;
        pivot = j;
      }
    }
    std::vector<std::pair<std::size_t, std::size_t>> branches;
    for (std::size_t i = 0; i < in_.p; ++i)
      if (covers_[i].test(pivot)) branches.emplace_back((covers_[i] & uncovered).count(), i);
    std::sort(branches.begin(), branches.end(), std::greater<>());
    for (const auto& [gain, i] : branches)
      if (search(uncovered - covers_[i], left - 1)) return true;
    return false;
  }

  const Instance& in_;
  std::vector<boost::dynamic_bitset<>> covers_;
};

Outcome<std::size_t> k_min_of(const Instance& in, LinkingForm linking) {
  if (linking == LinkingForm::literal) {
    if (!injective_assignment(in))
      return Infeasible{Infeasible::Cause::linking, {},
                        "no assignment gives every metro its own PoP"};
    return in.m;
  }
  SetCover cover(in);
  for (std::size_t k = 1; k <= in.p; ++k)
    if (cover.coverable_with(k)) return k;
  return Infeasible{Infeasible::Cause::coverage, {}, "metros cannot be covered"};
}

Outcome<PlacementSolution> solve_instance(const Instance& in, const SolveRequest& request) {
  const auto& problem = *in.problem;
  if (request.k_cap && *request.k_cap < 1) throw ValidationError("k_cap must be >= 1");
  const std::size_t cap = request.k_cap.value_or(in.p);
  if (request.linking == LinkingForm::literal) {
    if (request.k_cap && cap < in.m)
      return Infeasible{Infeasible::Cause::k_cap, {},
                        "one PoP per metro needs K >= " + std::to_string(in.m)};
    auto assignment = injective_assignment(in);
    if (!assignment)
      return Infeasible{Infeasible::Cause::linking, {},
                        "no assignment gives every metro its own PoP"};
    return make_solution(*assignment, problem);
  }
  SubsetSearch search(in, cap);
  auto open = search.run();
  if (!open)
    return Infeasible{Infeasible::Cause::k_cap, {},
                      "no assignment with at most " + std::to_string(cap) + " open PoPs"};
  return make_solution(assign_within(in, *open), problem);
}

template <typename T>
Infeasible take_infeasible(const Outcome<T>& o) {
  return std::get<Infeasible>(o);
}

Outcome<ModeResult> solve_mode(const Instance& in, Mode mode, std::size_t cap, std::size_t k_min,
                               std::size_t k_max, const std::optional<SloMap>& slo, LinkingForm linking) {
  auto solution = solve_instance(in, SolveRequest{cap, slo, linking});
  if (!is_feasible(solution)) return take_infeasible(solution);
  return ModeResult{mode, std::get<PlacementSolution>(std::move(solution)), k_min, k_max, {}};
}

std::size_t k_max_of(const Instance& in, LinkingForm linking) {
  if (linking == LinkingForm::literal) return in.m;
  std::vector<bool> open(in.p, false);
  for (auto i : greedy_latency_optimal(in)) open[i] = true;
  return static_cast<std::size_t>(std::count(open.begin(), open.end(), true));
}

}  // namespace

LinkingForm parse_linking_form(const std::string& text) {
  if (text == "linked") return LinkingForm::linked;
  if (text == "literal") return LinkingForm::literal;
  throw ValidationError("constraint4 must be linked or literal, got '" + text + "'");
}

std::string to_string(LinkingForm form) { return form == LinkingForm::linked ? "linked" : "literal"; }

std::string to_string(Infeasible::Cause cause) {
  switch (cause) {
    case Infeasible::Cause::coverage: return "coverage";
    case Infeasible::Cause::k_cap: return "k_cap";
    case Infeasible::Cause::slo: return "slo";
    case Infeasible::Cause::linking: return "linking";
  }
  return "coverage";
}

Mode parse_mode(const std::string& text) {
  if (text == "l_optimal") return Mode::l_optimal;
  if (text == "k_optimal") return Mode::k_optimal;
  if (text == "mean_k") return Mode::mean_k;
  if (text == "slo_optimal") return Mode::slo_optimal;
  if (text == "geo") return Mode::geo;
  if (text == "anycast") return Mode::anycast;
  throw ValidationError("unknown mode '" + text + "'");
}

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::l_optimal: return "l_optimal";
    case Mode::k_optimal: return "k_optimal";
    case Mode::mean_k: return "mean_k";
    case Mode::slo_optimal: return "slo_optimal";
    case Mode::geo: return "geo";
    case Mode::anycast: return "anycast";
  }
  return "l_optimal";
}

Outcome<PlacementSolution> solve(const PlacementProblem& problem, const SolveRequest& request) {
  auto in = make_instance(problem, request.slo);
  if (!is_feasible(in)) return take_infeasible(in);
  return solve_instance(std::get<Instance>(in), request);
}

Outcome<std::size_t> find_k_min(const PlacementProblem& problem, const std::optional<SloMap>& slo,
                                LinkingForm linking) {
  auto in = make_instance(problem, slo);
  if (!is_feasible(in)) return take_infeasible(in);
  return k_min_of(std::get<Instance>(in), linking);
}

Outcome<ModeResult> l_optimal(const PlacementProblem& problem, LinkingForm linking) {
  auto made = make_instance(problem, std::nullopt);
  if (!is_feasible(made)) return take_infeasible(made);
  const auto& in = std::get<Instance>(made);
  if (linking == LinkingForm::literal) {
    auto k_min = k_min_of(in, linking);
    if (!is_feasible(k_min)) return take_infeasible(k_min);
    return solve_mode(in, Mode::l_optimal, in.m, in.m, in.m, std::nullopt, linking);
  }
  auto solution = make_solution(greedy_latency_optimal(in), problem);
  const auto k_max = solution.k;
  return ModeResult{Mode::l_optimal, std::move(solution), std::nullopt, k_max, {}};
}

Outcome<ModeResult> k_optimal(const PlacementProblem& problem, LinkingForm linking) {
  auto made = make_instance(problem, std::nullopt);
  if (!is_feasible(made)) return take_infeasible(made);
  const auto& in = std::get<Instance>(made);
  auto k_min = k_min_of(in, linking);
  if (!is_feasible(k_min)) return take_infeasible(k_min);
  const auto kmin = std::get<std::size_t>(k_min);
  return solve_mode(in, Mode::k_optimal, kmin, kmin, k_max_of(in, linking), std::nullopt, linking);
}

Outcome<ModeResult> mean_k(const PlacementProblem& problem, LinkingForm linking) {
  auto made = make_instance(problem, std::nullopt);
  if (!is_feasible(made)) return take_infeasible(made);
  const auto& in = std::get<Instance>(made);
  auto k_min = k_min_of(in, linking);
  if (!is_feasible(k_min)) return take_infeasible(k_min);
  const auto kmin = std::get<std::size_t>(k_min);
  const auto kmax = k_max_of(in, linking);
  return solve_mode(in, Mode::mean_k, mean_k_of(kmin, kmax), kmin, kmax, std::nullopt, linking);
}

Outcome<ModeResult> slo_optimal(const PlacementProblem& problem, const SloMap& slo, LinkingForm linking) {
  auto made = make_instance(problem, slo);
  if (!is_feasible(made)) return take_infeasible(made);
  const auto& in = std::get<Instance>(made);
  auto k_min = k_min_of(in, linking);
  if (!is_feasible(k_min)) return take_infeasible(k_min);
  const auto kmin = std::get<std::size_t>(k_min);
  return solve_mode(in, Mode::slo_optimal, kmin, kmin, k_max_of(in, linking), slo, linking);
}

Outcome<ParetoFrontier> pareto_sweep(const PlacementProblem& problem, const std::optional<SloMap>& slo,
                                     LinkingForm linking) {
  auto made = make_instance(problem, slo);
  if (!is_feasible(made)) return take_infeasible(made);
  const auto& in = std::get<Instance>(made);
  auto k_min = k_min_of(in, linking);
  if (!is_feasible(k_min)) return take_infeasible(k_min);
  ParetoFrontier frontier;
  frontier.k_min = std::get<std::size_t>(k_min);
  frontier.k_max = k_max_of(in, linking);
  for (std::size_t k = frontier.k_min; k <= frontier.k_max; ++k) {
    auto point = solve_instance(in, SolveRequest{k, slo, linking});
    if (is_feasible(point))
      frontier.points.push_back({k, std::get<PlacementSolution>(std::move(point))});
  }
  return frontier;
}

ModeResult baseline_placement(const PlacementProblem& problem, const DefaultsTable& defaults,
                              BaselineKind kind) {
  ModeResult out;
  out.mode = kind == BaselineKind::geo ? Mode::geo : Mode::anycast;
  std::vector<std::size_t> pop_of_metro(problem.metro_count());
  for (std::size_t j = 0; j < problem.metro_count(); ++j) {
    const auto& metro = problem.metro_id(j);
    const auto row = static_cast<Eigen::Index>(j);
    std::optional<std::size_t> chosen;
    if (auto it = defaults.find(metro); it != defaults.end()) {
      const auto& pop = kind == BaselineKind::geo ? it->second.geo : it->second.anycast;
      if (auto i = problem.pop_index(pop); i && problem.admissible()(row, static_cast<Eigen::Index>(*i)))
        chosen = *i;
    }
    if (!chosen) {
      out.fallback_metros.push_back(metro);
      double best = kInf;
      for (std::size_t i = 0; i < problem.pop_count(); ++i) {
        const auto col = static_cast<Eigen::Index>(i);
        if (problem.admissible()(row, col) && problem.latency()(row, col) < best) {
          best = problem.latency()(row, col);
          chosen = i;
        }
      }
    }
    pop_of_metro[j] = *chosen;
  }
  out.solution = make_solution(pop_of_metro, problem);
  return out;
}

BaselineHubs baseline_hub_counts(const PlacementProblem& problem, const Assignment& assignment) {
  BaselineHubs out;
  out.baseline2 = hub_counts(assignment, problem).total;
  std::int64_t total = 0;
  for (std::size_t j = 0; j < problem.metro_count(); ++j) {
    out.baseline1 += ceil_div(problem.connections(j), problem.beta());
    total += problem.connections(j);
  }
  out.baseline3 = ceil_div(total, problem.beta());
  return out;
}

SloMap anycast_slo(const PlacementProblem& problem, const DefaultsTable& defaults) {
  SloMap slo;
  for (std::size_t j = 0; j < problem.metro_count(); ++j) {
    const auto& metro = problem.metro_id(j);
    auto it = defaults.find(metro);
    if (it == defaults.end()) continue;
    if (auto ms = problem.measurements().at(metro, it->second.anycast)) slo.emplace(metro, *ms);
  }
  return slo;
}

}  // namespace hubplan
