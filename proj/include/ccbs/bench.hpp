/*
 * the incremental-agent benchmark protocol and expansion-ratio tables
 */
#pragma once

#include "ccbs/io.hpp"

namespace ccbs {

// One scenario: an ordered start/goal pair list over a shared graph.
struct BenchTask {
  std::string map_id;
  std::string scen_id;
  const Graph* graph = nullptr;
  std::vector<std::pair<int, int>> pairs;  // (start vertex, goal vertex)
};

struct BenchOptions {
  std::vector<std::string> variants{"ds+pc+h"};
  double time_limit = 30.0;
  double radius = DEFAULT_RADIUS;
  bool zero_timing = false;  // report 0 runtime/precompute for reproducible CSVs
};

// For every scenario and variant: solve with the first n = 2.. pairs,
// growing n by one until the variant fails (timeout/infeasible); every
// attempt becomes a record. Failures never abort the sweep.
std::vector<BenchRecord> run_bench(const std::vector<BenchTask>& tasks,
                                   const BenchOptions& opt);

struct RatioRow {
  std::string map_id;
  int n = 0;
  double median_percent = 0;  // median of per-instance expansions_b/expansions_a
  int common = 0;             // commonly solved instances behind the median
};

// Per (map, n) median expansion ratio over instances solved in both record
// sets; instances with zero baseline expansions are skipped.
std::vector<RatioRow> expansion_ratio(const std::vector<BenchRecord>& a,
                                      const std::vector<BenchRecord>& b);

std::string ratio_table(const std::vector<RatioRow>& rows);

// Instance over the first n pairs of a task.
Instance make_instance(const BenchTask& task, int n, double radius);

// Deterministic scenario generation for a grid graph: unique start and goal
// cells drawn uniformly from the passable cells.
std::string generate_scen(const GridMap& map, int n_pairs, uint64_t seed);

}  // namespace ccbs
