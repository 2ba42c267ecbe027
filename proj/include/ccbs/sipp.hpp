/*
 * safe-interval path planning: constraint tables, GSIPP over multiple start
 * and goal states, and the landmark-driven low-level search
 */
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <unordered_map>

#include "ccbs/constraints.hpp"
#include "ccbs/graph.hpp"

namespace ccbs {

struct SafeInterval {
  int vertex;
  Interval interval;
};

// One agent's negative constraints preprocessed for SIPP: per-vertex safe
// intervals (complement of wait blocks) and per-directed-edge move blocks,
// plus the sorted landmark list from positive constraints.
class ConstraintTable {
 public:
  explicit ConstraintTable(const std::vector<Constraint>& constraints);
  // base table plus one extra constraint; only the touched entry is rebuilt
  ConstraintTable(const ConstraintTable& base, const Constraint& extra);

  // sorted, disjoint; unconstrained vertices have the single interval [0,inf)
  const std::vector<Interval>& safe_intervals(int v) const;
  // merged forbidden start intervals of the directed move u->v
  const std::vector<Interval>& move_blocks(int u, int v) const;
  // positive constraints sorted by interval start time
  const std::vector<Constraint>& landmarks() const { return landmarks_; }

  // index of the safe interval containing t, -1 if t falls in a block
  int interval_index_at(int v, double t) const;

 private:
  std::vector<Interval> default_intervals_;
  std::vector<Interval> no_blocks_;
  std::unordered_map<int, std::vector<Interval>> vertex_intervals_;
  std::unordered_map<int64_t, std::vector<Interval>> edge_blocks_;
  std::unordered_map<int, std::vector<Interval>> vertex_blocks_;  // pre-merge
  std::vector<Constraint> landmarks_;
};

using HeuristicFn = std::function<double(int vertex)>;

// A start state of GSIPP: the agent is at `vertex` from time `arrival`
// (inside one of its safe intervals), having performed `prefix` to get there.
struct GsippStart {
  int vertex;
  double arrival;
  Plan prefix;
};

// A goal state: reach `vertex` within the given safe interval (one of the
// vertex's intervals, matched by its start time).
struct GsippGoal {
  int vertex;
  Interval interval;
};

struct SippStats {
  uint64_t expanded = 0;
  uint64_t generated = 0;
  bool f_monotone = true;  // popped f-values never decreased
};

// Best-first search over (vertex, safe interval) states seeded with all
// starts; stops when every goal state was expanded or the open list is
// exhausted. Returns one minimal-arrival plan per goal, in goal order.
std::vector<std::optional<Plan>> gsipp(const Graph& g,
                                       const ConstraintTable& ct,
                                       const std::vector<GsippStart>& starts,
                                       const std::vector<GsippGoal>& goals,
                                       const HeuristicFn& h,
                                       SippStats* stats = nullptr);

// Plain SIPP: minimal-arrival plan from the starts to `goal` that can stay
// there forever (the goal's last safe interval must extend to INF).
std::optional<Plan> sipp_plan(const Graph& g, const ConstraintTable& ct,
                              const std::vector<GsippStart>& starts, int goal,
                              const HeuristicFn& h, SippStats* stats = nullptr);

struct LowLevelOptions {
  // keep only the earliest landmark execution instead of one start per safe
  // interval of the landmark target (reference baseline, not optimal)
  bool earliest_landmark_only = false;
};

// Landmark-driven low-level search: plans through the positive constraints in
// time order, carrying one start per reachable safe interval of each landmark
// target, then finishes with plain SIPP to the goal. Negative constraints are
// honored throughout. Returns none when no landmark-consistent plan exists.
std::optional<Plan> low_level_ds(const Graph& g, int agent, int start,
                                 int goal,
                                 const std::vector<Constraint>& constraints,
                                 const HeuristicTables& tables,
                                 const LowLevelOptions& opt = {},
                                 SippStats* stats = nullptr);

std::optional<Plan> low_level_ds(const Graph& g, int agent, int start,
                                 int goal, const ConstraintTable& ct,
                                 const HeuristicTables& tables,
                                 const LowLevelOptions& opt = {},
                                 SippStats* stats = nullptr);

}  // namespace ccbs
