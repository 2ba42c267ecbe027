/*
 * timed actions, plans and the collision geometry of constant-velocity disks
 */
#pragma once

#include <optional>
#include <vector>

#include "ccbs/graph.hpp"

namespace ccbs {

// Geometric comparison tolerance; also the penetration band of the collision
// predicate, so that unsafe-interval endpoints are reproducible.
constexpr double EPS_GEO = 1e-9;

// Half-open time interval [lo, hi), hi may be INF.
struct Interval {
  double lo = 0;
  double hi = INF;

  bool contains(double t) const { return t >= lo && t < hi; }
  bool empty() const { return !(lo < hi); }
};

enum class ActionKind { Move, Wait };

// A move traverses an edge at unit speed (duration = edge weight); a wait
// stays at a vertex for any positive duration, INF for the terminal wait.
struct Action {
  ActionKind kind;
  int from;
  int to;
  double duration;

  static Action move(int from, int to, double duration) {
    return {ActionKind::Move, from, to, duration};
  }
  static Action wait(int at, double duration) {
    return {ActionKind::Wait, at, at, duration};
  }
  bool is_move() const { return kind == ActionKind::Move; }
};

struct TimedAction {
  Action action;
  double start;

  double end() const { return start + action.duration; }
};

// Timed-action sequence of one agent, contiguous from t=0, ending at the goal
// vertex; an implicit infinite wait at the goal follows and costs nothing.
struct Plan {
  int agent = 0;
  int start_vertex = 0;
  int goal_vertex = 0;
  std::vector<TimedAction> actions;
  double cost = 0;

  TimedAction terminal_wait() const {
    return {Action::wait(goal_vertex, INF), cost};
  }
};

// Explicit actions plus the terminal wait, in time order.
std::vector<TimedAction> timed_actions_with_terminal(const Plan& p);

// Position while performing `ta` at time t; throws if t is outside the span.
Point position_at(const TimedAction& ta, const Graph& g, double t);

// Position of the whole plan at time t >= 0 (goal position after the plan).
Point plan_position(const Plan& p, const Graph& g, double t);

// Whether the two disks penetrate (distance < r_i + r_j, beyond EPS_GEO) at
// some instant of the actions' span overlap. Tangency is not a collision.
bool collides(const TimedAction& ta_i, const TimedAction& ta_j, double r_i,
              double r_j, const Graph& g);

// Maximal interval [t_i, t_i^u) of start times of a_i that collide with
// ta_j; none when a_i at t_i does not collide. hi is INF when no delayed
// start is safe. Closed-form piecewise-quadratic analysis with a bisection
// fallback per piece.
std::optional<Interval> unsafe_interval(const Action& a_i, double t_i,
                                        const TimedAction& ta_j, double r_i,
                                        double r_j, const Graph& g);

// The window of instants during ta_j's span in which a disk parked at
// `vertex` penetrates ta_j's disk. This is the presence interval a wait
// constraint forbids: anchoring it at the wait's own start time instead
// would spill over provably safe presence and cut feasible solutions out of
// both children of a split. None when the sweep never penetrates.
std::optional<Interval> wait_danger_window(int vertex, const TimedAction& ta_j,
                                           double r_i, double r_j,
                                           const Graph& g);

// Sum of explicit action durations; equals the goal arrival time.
double plan_cost(const Plan& p);

}  // namespace ccbs
