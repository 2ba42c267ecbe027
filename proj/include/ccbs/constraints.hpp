/*
 * CCBS constraints: forbidden start-time intervals and action landmarks
 */
#pragma once

#include <vector>

#include "ccbs/motion.hpp"

namespace ccbs {

enum class ConstraintSign { Negative, Positive };

// Negative: the agent must not perform `action` with a start time in
// `interval`; for wait actions this forbids presence at the vertex over the
// interval. Positive: the agent must start `action` (a move) at some time in
// `interval` — an action landmark.
struct Constraint {
  int agent;
  Action action;
  Interval interval;
  ConstraintSign sign = ConstraintSign::Negative;

  static Constraint negative(int agent, const Action& a, const Interval& iv) {
    return {agent, a, iv, ConstraintSign::Negative};
  }
  static Constraint positive(int agent, const Action& a, const Interval& iv) {
    return {agent, a, iv, ConstraintSign::Positive};
  }
};

// Whether a plan honors one constraint (used by tests and debug checks).
bool satisfies(const Plan& p, const Constraint& c);

// Merge overlapping/touching forbidden intervals into a sorted disjoint list.
std::vector<Interval> merge_intervals(std::vector<Interval> blocked);

// Complement of the merged forbidden intervals within [0, INF).
std::vector<Interval> compute_safe_intervals(const std::vector<Interval>& blocked);

// Smallest departure t >= arrive with t outside every forbidden interval and
// still inside the current safe interval; none when the constraints push the
// departure past the interval end. `forbidden` must be merged and sorted.
std::optional<double> constrained_departure(double arrive,
                                            const Interval& current,
                                            const std::vector<Interval>& forbidden);

}  // namespace ccbs
