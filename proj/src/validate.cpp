#include "ccbs/validate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <queue>
#include <unordered_map>

namespace ccbs {

namespace {

const char* kind_name(ViolationKind k) {
  switch (k) {
    case ViolationKind::Collision: return "collision";
    case ViolationKind::Discontinuity: return "discontinuity";
    case ViolationKind::WrongEndpoint: return "wrong-endpoint";
    case ViolationKind::BadDuration: return "bad-duration";
  }
  return "?";
}

constexpr double TOL = 1e-9;
// validator penetration slack (squared distance): tolerates solver plans that
// ride the tangency boundary, still catches real overlaps
constexpr double D2_SLACK = 1e-6;

}  // namespace

std::string ValidationReport::to_text() const {
  std::string out = ok ? "ok\n" : "violations " + std::to_string(violations.size()) + "\n";
  char buf[256];
  for (const Violation& v : violations) {
    std::snprintf(buf, sizeof(buf), "%s agents %d %d t %.6f %s\n",
                  kind_name(v.kind), v.agent_a, v.agent_b, v.time,
                  v.detail.c_str());
    out += buf;
  }
  return out;
}

ValidationReport validate_solution(const Instance& inst,
                                   const std::vector<Plan>& plans) {
  ValidationReport rep;
  const Graph& g = *inst.graph;
  const int n = inst.num_agents();
  auto fail = [&](ViolationKind k, int a, int b, double t, std::string detail) {
    rep.ok = false;
    rep.violations.push_back({k, a, b, t, std::move(detail)});
  };

  if (static_cast<int>(plans.size()) != n) {
    fail(ViolationKind::WrongEndpoint, -1, -1, 0, "plan count mismatch");
    return rep;
  }

  for (int a = 0; a < n; ++a) {
    const Plan& p = plans[a];
    if (p.start_vertex != inst.starts[a])
      fail(ViolationKind::WrongEndpoint, a, -1, 0, "plan does not start at the agent start");
    if (p.goal_vertex != inst.goals[a])
      fail(ViolationKind::WrongEndpoint, a, -1, p.cost, "plan does not end at the agent goal");
    double t = 0.0;
    int at = p.start_vertex;
    for (const TimedAction& ta : p.actions) {
      if (std::fabs(ta.start - t) > TOL)
        fail(ViolationKind::Discontinuity, a, -1, ta.start, "action start does not meet previous end");
      if (ta.action.from != at)
        fail(ViolationKind::Discontinuity, a, -1, ta.start, "action source is not the current vertex");
      if (ta.action.is_move()) {
        const double w = g.edge_weight(ta.action.from, ta.action.to);
        if (std::isinf(w))
          fail(ViolationKind::BadDuration, a, -1, ta.start, "move along a missing edge");
        else if (std::fabs(ta.action.duration - w) > TOL)
          fail(ViolationKind::BadDuration, a, -1, ta.start, "move duration differs from edge weight");
      } else if (!(ta.action.duration > 0) || std::isinf(ta.action.duration)) {
        fail(ViolationKind::BadDuration, a, -1, ta.start, "wait duration must be positive and finite");
      }
      t = ta.end();
      at = ta.action.to;
    }
    if (at != p.goal_vertex)
      fail(ViolationKind::WrongEndpoint, a, -1, t, "last action does not end at the plan goal");
    if (std::fabs(t - p.cost) > TOL)
      fail(ViolationKind::BadDuration, a, -1, t, "cost differs from the explicit action span");
  }
  if (!rep.ok) return rep;  // geometry checks need structurally sound plans

  // analytic pairwise collision detection, terminal waits included
  std::vector<std::vector<char>> analytic_hit(n, std::vector<char>(n, 0));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const auto tai = timed_actions_with_terminal(plans[i]);
      const auto taj = timed_actions_with_terminal(plans[j]);
      for (const TimedAction& x : tai)
        for (const TimedAction& y : taj) {
          if (x.end() <= y.start || y.end() <= x.start) continue;
          if (collides(x, y, inst.radii[i], inst.radii[j], g)) {
            analytic_hit[i][j] = 1;
            fail(ViolationKind::Collision, i, j, std::max(x.start, y.start),
                 "overlapping disk sweeps");
          }
        }
    }

  // dense sampling cross-check
  double horizon = 0.0;
  for (const Plan& p : plans) horizon = std::max(horizon, p.cost);
  horizon += 1.0;
  const double dt = 1e-3;
  std::vector<std::vector<char>> sampled_hit(n, std::vector<char>(n, 0));
  const int steps = static_cast<int>(horizon / dt) + 1;
  std::vector<Point> pos(n);
  for (int s = 0; s <= steps; ++s) {
    const double t = std::min(s * dt, horizon);
    for (int a = 0; a < n; ++a) pos[a] = plan_position(plans[a], g, t);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        if (sampled_hit[i][j]) continue;
        const double dx = pos[i].x - pos[j].x, dy = pos[i].y - pos[j].y;
        const double rs = inst.radii[i] + inst.radii[j];
        if (dx * dx + dy * dy < rs * rs - D2_SLACK) {
          sampled_hit[i][j] = 1;
          if (!analytic_hit[i][j])
            fail(ViolationKind::Collision, i, j, t,
                 "sampling-only hit: analytic detector missed it");
        }
      }
  }
  return rep;
}

namespace {

struct GridView {
  std::vector<std::array<int, 4>> nbr;  // -1 padded neighbor lists
};

// the regime where the continuous optimum provably sits on the unit lattice
GridView check_regime(const Instance& inst) {
  const Graph& g = *inst.graph;
  if (inst.num_agents() > 3)
    throw std::runtime_error("brute_force_soc supports at most 3 agents");
  if (g.size() > 40)
    throw std::runtime_error("brute_force_soc supports at most 40 vertices");
  const double want_r = std::sqrt(2.0) / 4.0;
  for (double r : inst.radii)
    if (std::fabs(r - want_r) > TOL)
      throw std::runtime_error("brute_force_soc needs radius sqrt(2)/4");
  GridView view;
  view.nbr.resize(g.size());
  for (int v = 0; v < g.size(); ++v) {
    view.nbr[v].fill(-1);
    const auto& edges = g.neighbors(v);
    if (edges.size() > 4)
      throw std::runtime_error("brute_force_soc needs a 4-connected grid");
    for (size_t k = 0; k < edges.size(); ++k) {
      if (std::fabs(edges[k].weight - 1.0) > TOL)
        throw std::runtime_error("brute_force_soc needs unit edge weights");
      const Point& a = g.pos(v);
      const Point& b = g.pos(edges[k].to);
      const double dx = std::fabs(a.x - b.x), dy = std::fabs(a.y - b.y);
      if (!((std::fabs(dx - 1) < TOL && dy < TOL) ||
            (dx < TOL && std::fabs(dy - 1) < TOL)))
        throw std::runtime_error("brute_force_soc needs cardinal unit moves");
      view.nbr[v][k] = edges[k].to;
    }
  }
  return view;
}

std::vector<int> bfs_dist(const GridView& view, int from) {
  std::vector<int> d(view.nbr.size(), -1);
  std::queue<int> q;
  d[from] = 0;
  q.push(from);
  while (!q.empty()) {
    const int v = q.front();
    q.pop();
    for (int w : view.nbr[v])
      if (w >= 0 && d[w] < 0) {
        d[w] = d[v] + 1;
        q.push(w);
      }
  }
  return d;
}

}  // namespace

std::optional<double> brute_force_soc(const Instance& inst) {
  inst.validate();
  const GridView view = check_regime(inst);
  const int n = inst.num_agents();

  std::vector<std::vector<int>> h(n);
  for (int a = 0; a < n; ++a) {
    h[a] = bfs_dist(view, inst.goals[a]);
    if (h[a][inst.starts[a]] < 0) return std::nullopt;  // disconnected
  }

  // State: positions, per-agent committed cost c (c_i = t while off goal, the
  // last arrival while parked), time t. g = sum(c); an off-goal agent pays 1
  // per step, a parked agent pays only when it moves again.
  struct State {
    std::array<int8_t, 3> pos;
    std::array<int16_t, 3> c;
    int16_t t;
  };
  auto key_of = [&](const State& s) {
    uint64_t k = 0;
    for (int a = 0; a < 3; ++a) k = k * 64 + static_cast<uint8_t>(s.pos[a] + 1);
    for (int a = 0; a < 3; ++a) k = k * 1024 + static_cast<uint16_t>(s.c[a]);
    return k * 1024 + static_cast<uint16_t>(s.t);
  };
  auto f_of = [&](const State& s) {
    double f = 0;
    for (int a = 0; a < n; ++a) {
      if (s.pos[a] == inst.goals[a])
        f += s.c[a];
      else
        f += s.t + h[a][s.pos[a]];
    }
    return f;
  };

  int t_max = 4 * static_cast<int>(view.nbr.size()) + 8;
  for (int a = 0; a < n; ++a) t_max += h[a][inst.starts[a]];

  using QE = std::pair<double, uint32_t>;  // f, arena index
  std::vector<State> arena;
  std::priority_queue<QE, std::vector<QE>, std::greater<>> open;
  std::unordered_map<uint64_t, int> best_g;

  State root{};
  root.pos.fill(-1);
  root.c.fill(0);
  root.t = 0;
  for (int a = 0; a < n; ++a) {
    root.pos[a] = static_cast<int8_t>(inst.starts[a]);
    root.c[a] = static_cast<int16_t>(inst.starts[a] == inst.goals[a] ? 0 : 0);
  }
  arena.push_back(root);
  best_g[key_of(root)] = 0;
  open.push({f_of(root), 0});

  while (!open.empty()) {
    const auto [f, idx] = open.top();
    open.pop();
    const State s = arena[idx];
    int g_sum = 0;
    for (int a = 0; a < n; ++a) g_sum += s.c[a];
    if (const auto it = best_g.find(key_of(s)); it != best_g.end() && it->second < g_sum)
      continue;

    bool done = true;
    for (int a = 0; a < n; ++a)
      if (s.pos[a] != inst.goals[a]) done = false;
    if (done) return static_cast<double>(g_sum);
    if (s.t >= t_max) continue;

    // enumerate joint moves: option 0 = wait, 1..4 = neighbor index
    std::array<int, 3> choice{};
    choice.fill(0);
    while (true) {
      State nxt = s;
      nxt.t = static_cast<int16_t>(s.t + 1);
      bool valid = true;
      for (int a = 0; a < n && valid; ++a) {
        if (choice[a] == 0) {
          if (s.pos[a] != inst.goals[a]) nxt.c[a] = nxt.t;  // off-goal wait
        } else {
          const int to = view.nbr[s.pos[a]][choice[a] - 1];
          if (to < 0) {
            valid = false;
            break;
          }
          nxt.pos[a] = static_cast<int8_t>(to);
          nxt.c[a] = nxt.t;
        }
      }
      if (valid) {
        for (int i = 0; i < n && valid; ++i)
          for (int j = i + 1; j < n && valid; ++j) {
            if (nxt.pos[i] == nxt.pos[j]) valid = false;  // vertex conflict
            if (nxt.pos[i] == s.pos[j] && nxt.pos[j] == s.pos[i] &&
                s.pos[i] != s.pos[j])
              valid = false;  // swap conflict
          }
      }
      if (valid) {
        int ng = 0;
        for (int a = 0; a < n; ++a) ng += nxt.c[a];
        const uint64_t k = key_of(nxt);
        const auto it = best_g.find(k);
        if (it == best_g.end() || it->second > ng) {
          best_g[k] = ng;
          arena.push_back(nxt);
          open.push({f_of(nxt), static_cast<uint32_t>(arena.size()) - 1});
        }
      }
      int a = 0;
      for (; a < n; ++a) {
        if (++choice[a] <= 4) break;
        choice[a] = 0;
      }
      if (a == n) break;
    }
  }
  return std::nullopt;
}

}  // namespace ccbs
