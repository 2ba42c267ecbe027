/*
 * independent test oracles: dense sampling, a standalone reference SIPP,
 * event-lattice plan enumeration and an exact LP solver for the H1 bound
 */
#pragma once

#include <optional>
#include <vector>

#include "ccbs/ccbs.hpp"

namespace oracle {

using namespace ccbs;

// dense time-sampling collision check over the span overlap
bool sampled_collides(const TimedAction& a, const TimedAction& b, double r_a,
                      double r_b, const Graph& g, double dt);

// minimal center distance over the span overlap by sampling
double sampled_min_dist(const TimedAction& a, const TimedAction& b,
                        const Graph& g, double dt);

// first safe start delay found by stepping + bisection over the analytic
// collision predicate (independent route to the unsafe-interval end)
double stepped_unsafe_end(const Action& a_i, double t_i, const TimedAction& ta_j,
                          double r_i, double r_j, const Graph& g);

// textbook single-start single-goal SIPP written independently of the gsipp
// engine; returns the optimal cost and a witness plan
std::optional<Plan> reference_sipp(const Graph& g, int agent, int start,
                                   int goal,
                                   const std::vector<Constraint>& constraints,
                                   const std::vector<double>& h_to_goal);

// Optimal plan cost over event-lattice timed plans (steps of dt) satisfying
// the constraint semantics: presence forbidden in negative wait intervals,
// move starts forbidden in negative move intervals, every positive landmark
// performed within its window, and the goal parked forever. Edge weights must
// be lattice multiples.
std::optional<double> lattice_optimal_cost(const Graph& g, int start, int goal,
                                           const std::vector<Constraint>& cons,
                                           double dt, double horizon);

// all constraint-satisfying complete lattice plans up to the horizon
std::vector<Plan> enumerate_lattice_plans(const Graph& g, int agent, int start,
                                          int goal,
                                          const std::vector<Constraint>& cons,
                                          double dt, double horizon);

// whether a plan satisfies a whole constraint set
bool satisfies_all(const Plan& p, const std::vector<Constraint>& cons);

// exact LP value of min sum(x) s.t. x_i + x_j >= w_ij, x >= 0 (the H1 bound)
double lp_h1(int n_agents,
             const std::vector<std::tuple<int, int, double>>& conflicts);

}  // namespace oracle
