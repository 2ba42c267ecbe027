/*
 * independent solution verification and the small-instance optimality oracle
 */
#pragma once

#include <optional>
#include <string>

#include "ccbs/ccbs.hpp"

namespace ccbs {

enum class ViolationKind { Collision, Discontinuity, WrongEndpoint, BadDuration };

struct Violation {
  ViolationKind kind;
  int agent_a = -1;
  int agent_b = -1;
  double time = 0;
  std::string detail;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Violation> violations;

  std::string to_text() const;  // one line per violation, for CI logs
};

// Per-plan checks (start/goal endpoints, contiguity, durations vs edge
// weights) plus pairwise analytic collision checks over every timed-action
// pair including terminal waits, cross-checked by dense sampling at dt=1e-3
// over [0, max cost + 1]. A sampling hit the analytic pass missed is reported
// as a distinct violation: that is a geometry bug, not a plan defect.
ValidationReport validate_solution(const Instance& inst,
                                   const std::vector<Plan>& plans);

// Optimal SOC by joint-state A* over discrete unit time steps with vertex and
// swap conflicts. Supported regime: <=3 agents, <=40 vertices, 4-connected
// unit-weight grid graph, radius sqrt(2)/4. Discrete plans are always
// continuous-feasible there, so this upper-bounds the continuous optimum;
// equality holds unless the optimum needs a collinear convoy, where a
// follower tails a moving leader at the exact tangency gap sqrt(2)/2 and
// beats the lattice by 1 - sqrt(2)/2 per squeeze. Returns none when no
// solution exists; throws outside the regime.
std::optional<double> brute_force_soc(const Instance& inst);

}  // namespace ccbs
