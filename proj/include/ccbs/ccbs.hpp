/*
 * high-level constraint-tree search: conflicts, splitting strategies, cost
 * impacts, the H2 heuristic and the solver driver
 */
#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <unordered_set>

#include "ccbs/sipp.hpp"

namespace ccbs {

struct Instance {
  const Graph* graph = nullptr;
  std::vector<int> starts;
  std::vector<int> goals;
  std::vector<double> radii;

  int num_agents() const { return static_cast<int>(starts.size()); }
  void validate() const;  // throws on malformed input
};

constexpr double DEFAULT_RADIUS = 0.35355339059327373;  // sqrt(2)/4

enum class Splitting { Vanilla, Disjoint };
enum class ConflictChoice { First, CostImpact };
enum class Aggregate { Min, Max, Sum };

struct SolverConfig {
  Splitting splitting = Splitting::Disjoint;
  ConflictChoice conflict_choice = ConflictChoice::CostImpact;
  Aggregate cost_impact_aggregate = Aggregate::Min;
  bool use_heuristic = true;
  double time_limit = 30.0;
  uint64_t seed = 0;
};

// vanilla | pc | ds | ds+pc | ds+pc+h
SolverConfig variant_config(const std::string& name);
std::vector<std::string> variant_names();

using PlanPtr = std::shared_ptr<const Plan>;

// One side of a conflict plus the memoized outcome of resolving it: the
// replanned plan under the side's negative constraint and its cost increase.
// The memo is keyed by the agent's constraint version so inherited conflicts
// reuse it only while the constraint set is unchanged.
struct ConflictSide {
  int agent;
  TimedAction ta;
  Interval unsafe;

  double delta = -1.0;  // -1 = not computed, INF = replan infeasible
  PlanPtr replan;
  uint64_t memo_version = static_cast<uint64_t>(-1);

  bool memo_valid(uint64_t version) const {
    return delta >= 0 && memo_version == version;
  }
};

struct Conflict {
  ConflictSide a, b;  // a.agent < b.agent

  double min_start() const { return std::min(a.ta.start, b.ta.start); }
  bool involves(int agent) const { return a.agent == agent || b.agent == agent; }
};

using ConflictPtr = std::shared_ptr<Conflict>;

struct ConstraintListNode {
  Constraint c;
  std::shared_ptr<const ConstraintListNode> next;
};
using ConstraintList = std::shared_ptr<const ConstraintListNode>;

std::vector<Constraint> materialize(const ConstraintList& head);

struct CTNode {
  uint64_t id = 0;
  uint64_t seq = 0;  // insertion order
  int depth = 0;
  std::vector<PlanPtr> plans;
  double cost = 0;
  double h = 0;
  double key = 0;  // max over ancestors of cost+h, the best-first priority
  std::vector<ConflictPtr> conflicts;
  std::vector<ConstraintList> constraints;        // per agent
  std::vector<uint64_t> constraint_version;       // id of the last change
  // order-independent 128-bit fingerprint of the whole constraint set; two
  // nodes with equal sets root identical subtrees, so children arriving at an
  // already-seen set are dropped
  uint64_t set_hash[2] = {0, 0};
};
using CTNodePtr = std::shared_ptr<CTNode>;

// All pairwise colliding timed-action pairs, terminal waits included.
std::vector<ConflictPtr> detect_conflicts(const Instance& inst,
                                          const std::vector<PlanPtr>& plans);

// Parent conflicts with the replanned agent's entries replaced by fresh
// detection against the new plan; equals detect_conflicts on the child plans.
std::vector<ConflictPtr> update_conflicts(const Instance& inst,
                                          const std::vector<ConflictPtr>& parent,
                                          int replanned,
                                          const std::vector<PlanPtr>& plans);

struct SolveResult;

// Thrown when the cost-impact machinery runs past the solver deadline.
struct SolveTimeout {};

// Search-wide context shared by node construction and the cost-impact
// machinery.
struct SolverContext {
  const Instance* inst;
  const HeuristicTables* tables;
  SolveResult* stats;
  std::chrono::steady_clock::time_point deadline =
      std::chrono::steady_clock::time_point::max();
  uint64_t next_id = 1;
  uint64_t next_seq = 1;
  // constraint tables per (agent, constraint version): replans down a subtree
  // reuse them instead of rebuilding from ever-deeper constraint lists
  std::unordered_map<uint64_t, std::shared_ptr<const ConstraintTable>> table_cache;
  // constraint-set fingerprints already generated (duplicate detection)
  std::unordered_map<uint64_t, uint64_t> seen_sets;
};

// Ensure both side memos of the conflict are valid for `node`, replanning as
// needed, and return (delta_a, delta_b, aggregated cost impact).
struct CostImpact {
  double delta_a, delta_b, aggregate;
};
CostImpact cost_impact(SolverContext& ctx, CTNode& node, Conflict& con,
                       Aggregate aggregate);

// First strategy: earliest conflict; cost-impact strategy: largest aggregate
// impact, ties broken by time then agent ids. Index into node.conflicts.
int choose_conflict(SolverContext& ctx, CTNode& node, const SolverConfig& cfg);

// Greedy admissible heuristic: pick conflicts in descending cost impact,
// dropping conflicts that share an agent with a pick; sum of picked impacts.
double h2_greedy(SolverContext& ctx, CTNode& node, Aggregate aggregate);

// Root CT node from unconstrained low-level plans with full conflict
// detection; null when some agent cannot reach its goal at all.
CTNodePtr make_root(SolverContext& ctx, const SolverConfig& cfg);

// Split `node` on conflicts[conflict_index] (vanilla or disjoint per config)
// and return the feasible children, fully formed. An empty result closes the
// node. The disjoint split falls back to vanilla on wait-wait conflicts.
std::vector<CTNodePtr> expand_node(SolverContext& ctx, CTNode& node,
                                   int conflict_index, const SolverConfig& cfg);

enum class SolveStatus { Solved, Timeout, Infeasible };

struct SolveResult {
  SolveStatus status = SolveStatus::Infeasible;
  std::vector<Plan> plans;
  double soc = 0;
  uint64_t expanded = 0;   // CT nodes split
  uint64_t generated = 0;  // CT nodes pushed
  double runtime = 0;      // solve() wall clock, seconds
  double precompute = 0;   // heuristic table construction, seconds
  uint64_t low_level_calls = 0;
  uint64_t low_level_expanded = 0;
  bool keys_monotone = true;
  double max_cost_plus_h = 0;  // max over popped nodes of raw cost+h
};

HeuristicTables precompute_tables(const Instance& inst);

SolveResult solve(const Instance& inst, const SolverConfig& cfg,
                  const HeuristicTables* tables = nullptr);

}  // namespace ccbs
