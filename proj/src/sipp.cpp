#include "ccbs/sipp.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>
#include <stdexcept>

namespace ccbs {

bool satisfies(const Plan& p, const Constraint& c) {
  if (c.sign == ConstraintSign::Positive) {
    for (const TimedAction& ta : p.actions)
      if (ta.action.is_move() && ta.action.from == c.action.from &&
          ta.action.to == c.action.to && c.interval.contains(ta.start))
        return true;
    return false;
  }
  if (c.action.is_move()) {
    for (const TimedAction& ta : p.actions)
      if (ta.action.is_move() && ta.action.from == c.action.from &&
          ta.action.to == c.action.to && c.interval.contains(ta.start))
        return false;
    return true;
  }
  // negative wait: no presence at the vertex during the interval; presence is
  // the closed span [arrival, departure] around consecutive stays
  const int v = c.action.from;
  double at = 0.0;
  int cur = p.start_vertex;
  auto presence_violates = [&](double arr, double dep) {
    return arr < c.interval.hi && dep >= c.interval.lo;
  };
  for (const TimedAction& ta : p.actions) {
    if (ta.action.is_move()) {
      if (cur == v && presence_violates(at, ta.start)) return false;
      cur = ta.action.to;
      at = ta.end();
    }
    // waits extend the presence span; nothing to do until the next move
  }
  if (cur == v && presence_violates(at, INF)) return false;
  return true;
}

std::vector<Interval> merge_intervals(std::vector<Interval> blocked) {
  std::erase_if(blocked, [](const Interval& iv) { return iv.empty(); });
  std::sort(blocked.begin(), blocked.end(),
            [](const Interval& a, const Interval& b) {
              return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi);
            });
  std::vector<Interval> out;
  for (const Interval& iv : blocked) {
    if (!out.empty() && iv.lo <= out.back().hi + EPS_GEO)
      out.back().hi = std::max(out.back().hi, iv.hi);
    else
      out.push_back(iv);
  }
  return out;
}

std::vector<Interval> compute_safe_intervals(const std::vector<Interval>& blocked) {
  const auto merged = merge_intervals(blocked);
  std::vector<Interval> safe;
  double lo = 0.0;
  for (const Interval& b : merged) {
    if (b.lo > lo) safe.push_back({lo, b.lo});
    lo = std::max(lo, b.hi);
    if (std::isinf(lo)) return safe;
  }
  safe.push_back({lo, INF});
  return safe;
}

std::optional<double> constrained_departure(double arrive,
                                            const Interval& current,
                                            const std::vector<Interval>& forbidden) {
  double t = arrive;
  for (const Interval& b : forbidden) {
    if (t < b.lo) break;
    if (t < b.hi) t = b.hi;
  }
  if (t >= current.hi) return std::nullopt;
  return t;
}

namespace {

int64_t edge_key(int u, int v) { return (static_cast<int64_t>(u) << 32) | static_cast<uint32_t>(v); }

}  // namespace

ConstraintTable::ConstraintTable(const std::vector<Constraint>& constraints) {
  default_intervals_ = {Interval{0.0, INF}};
  std::unordered_map<int64_t, std::vector<Interval>> move_blocks;
  for (const Constraint& c : constraints) {
    if (c.sign == ConstraintSign::Positive) {
      if (!c.action.is_move())
        throw std::runtime_error("positive constraints must be move landmarks");
      landmarks_.push_back(c);
      continue;
    }
    if (c.action.is_move())
      move_blocks[edge_key(c.action.from, c.action.to)].push_back(c.interval);
    else
      vertex_blocks_[c.action.from].push_back(c.interval);
  }
  for (auto& [v, blocks] : vertex_blocks_) {
    blocks = merge_intervals(blocks);
    vertex_intervals_[v] = compute_safe_intervals(blocks);
  }
  for (auto& [e, blocks] : move_blocks) edge_blocks_[e] = merge_intervals(blocks);
  std::sort(landmarks_.begin(), landmarks_.end(),
            [](const Constraint& a, const Constraint& b) {
              if (a.interval.lo != b.interval.lo) return a.interval.lo < b.interval.lo;
              if (a.interval.hi != b.interval.hi) return a.interval.hi < b.interval.hi;
              if (a.action.from != b.action.from) return a.action.from < b.action.from;
              return a.action.to < b.action.to;
            });
  // duplicate landmarks would demand separate crossings; one serves both
  landmarks_.erase(
      std::unique(landmarks_.begin(), landmarks_.end(),
                  [](const Constraint& a, const Constraint& b) {
                    return a.action.from == b.action.from &&
                           a.action.to == b.action.to &&
                           a.interval.lo == b.interval.lo &&
                           a.interval.hi == b.interval.hi;
                  }),
      landmarks_.end());
}

ConstraintTable::ConstraintTable(const ConstraintTable& base,
                                 const Constraint& extra) {
  *this = base;
  if (extra.sign == ConstraintSign::Positive) {
    if (!extra.action.is_move())
      throw std::runtime_error("positive constraints must be move landmarks");
    landmarks_.push_back(extra);
    std::sort(landmarks_.begin(), landmarks_.end(),
              [](const Constraint& a, const Constraint& b) {
                return a.interval.lo < b.interval.lo;
              });
  } else if (extra.action.is_move()) {
    auto& blocks = edge_blocks_[edge_key(extra.action.from, extra.action.to)];
    blocks.push_back(extra.interval);
    blocks = merge_intervals(blocks);
  } else {
    auto& blocks = vertex_blocks_[extra.action.from];
    blocks.push_back(extra.interval);
    blocks = merge_intervals(blocks);
    vertex_intervals_[extra.action.from] = compute_safe_intervals(blocks);
  }
}

const std::vector<Interval>& ConstraintTable::safe_intervals(int v) const {
  const auto it = vertex_intervals_.find(v);
  return it == vertex_intervals_.end() ? default_intervals_ : it->second;
}

const std::vector<Interval>& ConstraintTable::move_blocks(int u, int v) const {
  const auto it = edge_blocks_.find(edge_key(u, v));
  return it == edge_blocks_.end() ? no_blocks_ : it->second;
}

int ConstraintTable::interval_index_at(int v, double t) const {
  const auto& ivs = safe_intervals(v);
  for (size_t i = 0; i < ivs.size(); ++i)
    if (ivs[i].contains(t)) return static_cast<int>(i);
  return -1;
}

namespace {

struct Node {
  int vertex;
  int ividx;
  double g;
  double f;
  int parent;    // node arena index, -1 for a start
  int start_id;  // which GsippStart this chain began from
};

struct QEntry {
  double f;
  double g;
  int vertex;
  int ividx;
  int node;

  bool operator>(const QEntry& o) const {
    if (f != o.f) return f > o.f;
    if (g != o.g) return g < o.g;  // larger g first
    if (vertex != o.vertex) return vertex > o.vertex;
    if (ividx != o.ividx) return ividx > o.ividx;
    return node > o.node;
  }
};

int64_t state_key(int vertex, int ividx) {
  return (static_cast<int64_t>(vertex) << 24) | ividx;
}

// earliest departure d in [lo, hi) avoiding the merged blocks, or none
std::optional<double> earliest_departure(double lo, double hi,
                                         const std::vector<Interval>& blocks) {
  double d = lo;
  // first block that could cover d (blocks are disjoint and sorted)
  auto it = std::upper_bound(
      blocks.begin(), blocks.end(), d,
      [](double t, const Interval& b) { return t < b.lo; });
  if (it != blocks.begin()) {
    auto prev = std::prev(it);
    if (d < prev->hi) d = prev->hi;
  }
  for (; it != blocks.end(); ++it) {
    if (d < it->lo) break;
    if (d < it->hi) d = it->hi;
  }
  if (d >= hi) return std::nullopt;
  return d;
}

Plan reconstruct(const Graph& g, const std::deque<Node>& arena, int node_idx,
                 const std::vector<GsippStart>& starts) {
  std::vector<int> chain;
  for (int i = node_idx; i >= 0; i = arena[i].parent) chain.push_back(i);
  std::reverse(chain.begin(), chain.end());

  const GsippStart& origin = starts[arena[chain.front()].start_id];
  Plan plan = origin.prefix;
  plan.goal_vertex = arena[node_idx].vertex;
  for (size_t i = 1; i < chain.size(); ++i) {
    const Node& from = arena[chain[i - 1]];
    const Node& to = arena[chain[i]];
    const double w = g.edge_weight(from.vertex, to.vertex);
    const double depart = to.g - w;
    if (depart > from.g + EPS_GEO)
      plan.actions.push_back(
          {Action::wait(from.vertex, depart - from.g), from.g});
    plan.actions.push_back({Action::move(from.vertex, to.vertex, w), depart});
  }
  plan.cost = arena[node_idx].g;
  return plan;
}

}  // namespace

std::vector<std::optional<Plan>> gsipp(const Graph& g,
                                       const ConstraintTable& ct,
                                       const std::vector<GsippStart>& starts,
                                       const std::vector<GsippGoal>& goals,
                                       const HeuristicFn& h,
                                       SippStats* stats) {
  std::vector<std::optional<Plan>> result(goals.size());
  if (starts.empty()) return result;

  // resolve goal states to (vertex, interval index)
  std::unordered_map<int64_t, std::vector<int>> goal_of_state;
  for (size_t gi = 0; gi < goals.size(); ++gi) {
    const int idx = ct.interval_index_at(goals[gi].vertex, goals[gi].interval.lo);
    if (idx < 0) continue;  // not a safe interval: unreachable goal
    goal_of_state[state_key(goals[gi].vertex, idx)].push_back(static_cast<int>(gi));
  }
  size_t remaining = 0;
  for (const auto& [k, v] : goal_of_state) remaining += v.size();
  if (remaining == 0) return result;

  std::deque<Node> arena;
  std::unordered_map<int64_t, double> best;
  std::priority_queue<QEntry, std::vector<QEntry>, std::greater<>> open;

  for (size_t s = 0; s < starts.size(); ++s) {
    const GsippStart& st = starts[s];
    int idx = ct.interval_index_at(st.vertex, st.arrival);
    double g0 = st.arrival;
    if (idx < 0) {
      // arrivals computed as (lo - w) + w can round one ulp below lo
      const auto& ivs = ct.safe_intervals(st.vertex);
      for (size_t i = 0; i < ivs.size(); ++i)
        if (st.arrival >= ivs[i].lo - EPS_GEO && st.arrival < ivs[i].hi) {
          idx = static_cast<int>(i);
          g0 = std::max(g0, ivs[i].lo);
          break;
        }
    }
    if (idx < 0) throw std::runtime_error("gsipp start outside a safe interval");
    const double hv = h(st.vertex);
    if (std::isinf(hv)) continue;
    const int64_t key = state_key(st.vertex, idx);
    const auto it = best.find(key);
    if (it != best.end() && it->second <= g0) continue;
    best[key] = g0;
    arena.push_back({st.vertex, idx, g0, g0 + hv, -1, static_cast<int>(s)});
    open.push({arena.back().f, g0, st.vertex, idx,
               static_cast<int>(arena.size()) - 1});
  }

  double last_f = -INF;
  while (!open.empty() && remaining > 0) {
    const QEntry top = open.top();
    open.pop();
    const Node node = arena[top.node];
    const int64_t key = state_key(node.vertex, node.ividx);
    if (node.g > best[key]) continue;  // stale
    if (stats) {
      ++stats->expanded;
      if (top.f < last_f - 1e-9) stats->f_monotone = false;
    }
    last_f = std::max(last_f, top.f);

    if (const auto git = goal_of_state.find(key); git != goal_of_state.end()) {
      for (int gi : git->second)
        result[gi] = reconstruct(g, arena, top.node, starts);
      remaining -= git->second.size();
      goal_of_state.erase(git);
      if (remaining == 0) break;
    }

    const Interval& cur = ct.safe_intervals(node.vertex)[node.ividx];
    for (const Edge& e : g.neighbors(node.vertex)) {
      const auto& blocks = ct.move_blocks(node.vertex, e.to);
      const auto& targets = ct.safe_intervals(e.to);
      // earliest target interval still reachable: hi > g + weight
      size_t ti = std::upper_bound(targets.begin(), targets.end(),
                                   node.g + e.weight,
                                   [](double t, const Interval& iv) {
                                     return t < iv.hi;
                                   }) -
                  targets.begin();
      for (; ti < targets.size(); ++ti) {
        const Interval& tgt = targets[ti];
        if (tgt.lo - e.weight >= cur.hi) break;  // departures past the stay
        const double lo = std::max(node.g, tgt.lo - e.weight);
        const double hi = std::min(cur.hi, tgt.hi - e.weight);
        if (!(lo < hi)) continue;
        const auto d = earliest_departure(lo, hi, blocks);
        if (!d) continue;
        const double arrival = std::max(*d + e.weight, tgt.lo);
        const int64_t tkey = state_key(e.to, static_cast<int>(ti));
        const auto it = best.find(tkey);
        if (it != best.end() && it->second <= arrival) continue;
        const double hv = h(e.to);
        if (std::isinf(hv)) continue;
        best[tkey] = arrival;
        arena.push_back({e.to, static_cast<int>(ti), arrival, arrival + hv,
                         top.node, node.start_id});
        open.push({arena.back().f, arrival, e.to, static_cast<int>(ti),
                   static_cast<int>(arena.size()) - 1});
        if (stats) ++stats->generated;
      }
    }
  }
  return result;
}

std::optional<Plan> sipp_plan(const Graph& g, const ConstraintTable& ct,
                              const std::vector<GsippStart>& starts, int goal,
                              const HeuristicFn& h, SippStats* stats) {
  const auto& ivs = ct.safe_intervals(goal);
  const Interval last = ivs.back();
  if (!std::isinf(last.hi)) return std::nullopt;  // cannot stay forever
  auto plans = gsipp(g, ct, starts, {{goal, last}}, h, stats);
  return plans[0];
}

std::optional<Plan> low_level_ds(const Graph& g, int agent, int start,
                                 int goal,
                                 const std::vector<Constraint>& constraints,
                                 const HeuristicTables& tables,
                                 const LowLevelOptions& opt,
                                 SippStats* stats) {
  const ConstraintTable ct(constraints);
  return low_level_ds(g, agent, start, goal, ct, tables, opt, stats);
}

std::optional<Plan> low_level_ds(const Graph& g, int agent, int start,
                                 int goal, const ConstraintTable& ct,
                                 const HeuristicTables& tables,
                                 const LowLevelOptions& opt,
                                 SippStats* stats) {
  const int start_idx = ct.interval_index_at(start, 0.0);
  if (start_idx < 0) return std::nullopt;  // start vertex blocked at t=0
  Plan seed;
  seed.agent = agent;
  seed.start_vertex = start;
  seed.goal_vertex = start;
  seed.cost = 0.0;
  std::vector<GsippStart> starts{{start, 0.0, seed}};

  for (const Constraint& lm : ct.landmarks()) {
    const int A = lm.action.from, B = lm.action.to;
    const Interval window = lm.interval;
    const double w = g.edge_weight(A, B);
    if (std::isinf(w)) return std::nullopt;  // landmark edge missing

    // goal states: safe intervals of A overlapping the landmark window
    std::vector<GsippGoal> stage_goals;
    for (const Interval& iv : ct.safe_intervals(A))
      if (iv.lo < window.hi && window.lo < iv.hi) {
        stage_goals.push_back({A, iv});
        if (opt.earliest_landmark_only) break;
      }
    if (stage_goals.empty()) return std::nullopt;

    HeuristicFn stage_h = [&](int v) { return dh_estimate(tables, v, A); };
    auto plans = gsipp(g, ct, starts, stage_goals, stage_h, stats);

    // perform the landmark from every reached interval; keep per safe
    // interval of B only the earliest-arriving continuation
    const auto& blocks = ct.move_blocks(A, B);
    const auto& b_ivs = ct.safe_intervals(B);
    std::map<int, GsippStart> next;  // B interval index -> best start
    for (size_t pi = 0; pi < plans.size(); ++pi) {
      if (!plans[pi]) continue;
      const Plan& reached = *plans[pi];
      const double arr = reached.cost;
      const double dep_lo = std::max(arr, window.lo);
      const double dep_hi = std::min(stage_goals[pi].interval.hi, window.hi);
      if (!(dep_lo < dep_hi)) continue;
      for (size_t bi = 0; bi < b_ivs.size(); ++bi) {
        if (b_ivs[bi].lo - w >= dep_hi) break;
        const double lo = std::max(dep_lo, b_ivs[bi].lo - w);
        const double hi = std::min(dep_hi, b_ivs[bi].hi - w);
        if (!(lo < hi)) continue;
        const auto d = earliest_departure(lo, hi, blocks);
        if (!d) continue;
        const double arrival = std::max(*d + w, b_ivs[bi].lo);
        const auto it = next.find(static_cast<int>(bi));
        if (it != next.end() && it->second.arrival <= arrival) continue;
        GsippStart ns;
        ns.vertex = B;
        ns.arrival = arrival;
        ns.prefix = reached;
        if (*d > arr + EPS_GEO)
          ns.prefix.actions.push_back({Action::wait(A, *d - arr), arr});
        ns.prefix.actions.push_back({Action::move(A, B, w), *d});
        ns.prefix.goal_vertex = B;
        ns.prefix.cost = arrival;
        next[static_cast<int>(bi)] = std::move(ns);
      }
    }
    if (next.empty()) return std::nullopt;

    starts.clear();
    if (opt.earliest_landmark_only) {
      auto best = next.begin();
      for (auto it = std::next(next.begin()); it != next.end(); ++it)
        if (it->second.arrival < best->second.arrival) best = it;
      starts.push_back(std::move(best->second));
    } else {
      for (auto& [bi, st] : next) starts.push_back(std::move(st));
    }
  }

  const int col = tables.column_of(goal);
  HeuristicFn final_h =
      col >= 0 ? HeuristicFn([&tables, col](int v) { return tables.h[col][v]; })
               : HeuristicFn([&tables, goal](int v) {
                   return dh_estimate(tables, v, goal);
                 });
  auto plan = sipp_plan(g, ct, starts, goal, final_h, stats);
  if (plan) plan->agent = agent;
  return plan;
}

}  // namespace ccbs
