#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>

namespace oracle {

namespace {

Point action_pos(const TimedAction& ta, const Graph& g, double t) {
  if (!ta.action.is_move()) return g.pos(ta.action.from);
  const Point& a = g.pos(ta.action.from);
  const Point& b = g.pos(ta.action.to);
  const double f = std::clamp((t - ta.start) / ta.action.duration, 0.0, 1.0);
  return {a.x + (b.x - a.x) * f, a.y + (b.y - a.y) * f};
}

double dist(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

std::pair<double, double> overlap_window(const TimedAction& a,
                                         const TimedAction& b) {
  const double lo = std::max(a.start, b.start);
  double hi = std::min(a.end(), b.end());
  if (std::isinf(hi)) hi = lo;  // both parked: constant distance
  return {lo, hi};
}

}  // namespace

bool sampled_collides(const TimedAction& a, const TimedAction& b, double r_a,
                      double r_b, const Graph& g, double dt) {
  if (a.end() <= b.start || b.end() <= a.start) return false;
  const auto [lo, hi] = overlap_window(a, b);
  const double r = r_a + r_b;
  for (double t = lo;; t += dt) {
    const double tt = std::min(t, hi);
    if (dist(action_pos(a, g, tt), action_pos(b, g, tt)) < r) return true;
    if (tt >= hi) break;
  }
  return false;
}

double sampled_min_dist(const TimedAction& a, const TimedAction& b,
                        const Graph& g, double dt) {
  if (a.end() <= b.start || b.end() <= a.start) return INF;
  const auto [lo, hi] = overlap_window(a, b);
  double best = INF;
  for (double t = lo;; t += dt) {
    const double tt = std::min(t, hi);
    best = std::min(best, dist(action_pos(a, g, tt), action_pos(b, g, tt)));
    if (tt >= hi) break;
  }
  return best;
}

double stepped_unsafe_end(const Action& a_i, double t_i, const TimedAction& ta_j,
                          double r_i, double r_j, const Graph& g) {
  auto unsafe = [&](double delta) {
    return collides(TimedAction{a_i, t_i + delta}, ta_j, r_i, r_j, g);
  };
  if (!unsafe(0.0)) return 0.0;
  const double step = 1e-3;
  double lo = 0.0, hi = step;
  const double cap = 1e4;
  while (unsafe(hi)) {
    lo = hi;
    hi += step;
    if (hi > cap) return INF;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (unsafe(mid))
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

std::optional<Plan> reference_sipp(const Graph& g, int agent, int start,
                                   int goal,
                                   const std::vector<Constraint>& constraints,
                                   const std::vector<double>& h_to_goal) {
  // per-vertex wait blocks and per-edge move blocks, merged independently
  std::map<int, std::vector<Interval>> wait_blocks;
  std::map<std::pair<int, int>, std::vector<Interval>> move_blocks;
  for (const Constraint& c : constraints) {
    if (c.sign == ConstraintSign::Positive)
      throw std::runtime_error("reference_sipp handles negative constraints only");
    if (c.action.is_move())
      move_blocks[{c.action.from, c.action.to}].push_back(c.interval);
    else
      wait_blocks[c.action.from].push_back(c.interval);
  }
  auto merged = [](std::vector<Interval> v) {
    std::sort(v.begin(), v.end(), [](const Interval& a, const Interval& b) {
      return a.lo < b.lo;
    });
    std::vector<Interval> out;
    for (const Interval& iv : v) {
      if (iv.empty()) continue;
      if (!out.empty() && iv.lo <= out.back().hi)
        out.back().hi = std::max(out.back().hi, iv.hi);
      else
        out.push_back(iv);
    }
    return out;
  };
  auto intervals_of = [&](int v) {
    std::vector<Interval> safe;
    double lo = 0;
    const auto it = wait_blocks.find(v);
    if (it != wait_blocks.end())
      for (const Interval& b : merged(it->second)) {
        if (b.lo > lo) safe.push_back({lo, b.lo});
        lo = std::max(lo, b.hi);
        if (std::isinf(lo)) return safe;
      }
    safe.push_back({lo, INF});
    return safe;
  };

  struct St {
    int v;
    int idx;
    double t;
    int parent;
  };
  std::vector<St> arena;
  std::map<std::pair<int, int>, double> best;
  using QE = std::pair<double, int>;
  std::priority_queue<QE, std::vector<QE>, std::greater<>> open;

  const auto start_ivs = intervals_of(start);
  int sidx = -1;
  for (size_t i = 0; i < start_ivs.size(); ++i)
    if (start_ivs[i].contains(0.0)) sidx = static_cast<int>(i);
  if (sidx < 0) return std::nullopt;
  arena.push_back({start, sidx, 0.0, -1});
  best[{start, sidx}] = 0.0;
  open.push({h_to_goal[start], 0});

  const auto goal_ivs = intervals_of(goal);
  if (!std::isinf(goal_ivs.back().hi)) return std::nullopt;
  const int goal_idx = static_cast<int>(goal_ivs.size()) - 1;

  while (!open.empty()) {
    const auto [f, id] = open.top();
    open.pop();
    const St s = arena[id];
    if (best[{s.v, s.idx}] < s.t) continue;
    if (s.v == goal && s.idx == goal_idx) {
      std::vector<int> chain;
      for (int i = id; i >= 0; i = arena[i].parent) chain.push_back(i);
      std::reverse(chain.begin(), chain.end());
      Plan p;
      p.agent = agent;
      p.start_vertex = start;
      p.goal_vertex = goal;
      for (size_t i = 1; i < chain.size(); ++i) {
        const St& a = arena[chain[i - 1]];
        const St& b = arena[chain[i]];
        const double w = g.edge_weight(a.v, b.v);
        const double dep = b.t - w;
        if (dep > a.t + 1e-12)
          p.actions.push_back({Action::wait(a.v, dep - a.t), a.t});
        p.actions.push_back({Action::move(a.v, b.v, w), dep});
      }
      p.cost = s.t;
      return p;
    }
    const Interval cur = intervals_of(s.v)[s.idx];
    for (const Edge& e : g.neighbors(s.v)) {
      std::vector<Interval> mb;
      if (const auto it = move_blocks.find({s.v, e.to}); it != move_blocks.end())
        mb = merged(it->second);
      const auto tgt = intervals_of(e.to);
      for (size_t ti = 0; ti < tgt.size(); ++ti) {
        double d = std::max(s.t, tgt[ti].lo - e.weight);
        const double dhi = std::min(cur.hi, tgt[ti].hi - e.weight);
        for (const Interval& b : mb) {
          if (d < b.lo) break;
          if (d < b.hi) d = b.hi;
        }
        if (!(d < dhi)) continue;
        const double arr = d + e.weight;
        const auto key = std::make_pair(e.to, static_cast<int>(ti));
        if (const auto it = best.find(key); it != best.end() && it->second <= arr)
          continue;
        best[key] = arr;
        arena.push_back({e.to, static_cast<int>(ti), arr, id});
        open.push({arr + h_to_goal[e.to], static_cast<int>(arena.size()) - 1});
      }
    }
  }
  return std::nullopt;
}

namespace {

struct LatticeCtx {
  const Graph& g;
  double dt;
  double horizon;
  std::vector<const Constraint*> neg;
  std::vector<const Constraint*> pos;

  bool wait_ok(int v, double from, double to) const {  // presence [from, to]
    for (const Constraint* c : neg) {
      if (c->action.is_move() || c->action.from != v) continue;
      if (from < c->interval.hi && to >= c->interval.lo) return false;
    }
    return true;
  }
  bool instant_ok(int v, double t) const { return wait_ok(v, t, t); }
  bool move_ok(int u, int v, double t) const {
    for (const Constraint* c : neg) {
      if (!c->action.is_move()) continue;
      if (c->action.from == u && c->action.to == v && c->interval.contains(t))
        return false;
    }
    return true;
  }
  bool park_ok(int v, double t) const {
    for (const Constraint* c : neg) {
      if (c->action.is_move() || c->action.from != v) continue;
      if (c->interval.hi > t) return false;  // a block still ahead (or around)
    }
    return true;
  }
};

LatticeCtx make_ctx(const Graph& g, const std::vector<Constraint>& cons,
                    double dt, double horizon) {
  LatticeCtx ctx{g, dt, horizon, {}, {}};
  for (const Constraint& c : cons) {
    if (c.sign == ConstraintSign::Positive)
      ctx.pos.push_back(&c);
    else
      ctx.neg.push_back(&c);
  }
  if (ctx.pos.size() > 8) throw std::runtime_error("too many landmarks for the oracle");
  return ctx;
}

long lat(double t, double dt) { return std::lround(t / dt); }

}  // namespace

std::optional<double> lattice_optimal_cost(const Graph& g, int start, int goal,
                                           const std::vector<Constraint>& cons,
                                           double dt, double horizon) {
  const LatticeCtx ctx = make_ctx(g, cons, dt, horizon);
  for (int v = 0; v < g.size(); ++v)
    for (const Edge& e : g.neighbors(v)) {
      const double steps = e.weight / dt;
      if (std::fabs(steps - std::lround(steps)) > 1e-6)
        throw std::runtime_error("edge weight off the oracle lattice");
    }

  struct Key {
    int v;
    long t;
    unsigned mask;
    bool operator<(const Key& o) const {
      return std::tie(v, t, mask) < std::tie(o.v, o.t, o.mask);
    }
  };
  const unsigned full = (1u << ctx.pos.size()) - 1;
  std::set<Key> seen;
  using QE = std::pair<double, Key>;
  std::priority_queue<QE, std::vector<QE>, std::greater<>> open;

  if (!ctx.instant_ok(start, 0.0)) return std::nullopt;
  open.push({0.0, {start, 0, 0}});
  double best = INF;
  while (!open.empty()) {
    const auto [t, key] = open.top();
    open.pop();
    if (seen.count(key)) continue;
    seen.insert(key);
    if (key.v == goal && key.mask == full && ctx.park_ok(goal, t))
      best = std::min(best, t);
    if (t >= best) break;  // Dijkstra order: done
    if (t + ctx.dt <= ctx.horizon && ctx.wait_ok(key.v, t, t + ctx.dt)) {
      const Key nk{key.v, key.t + 1, key.mask};
      if (!seen.count(nk)) open.push({t + ctx.dt, nk});
    }
    for (const Edge& e : g.neighbors(key.v)) {
      const double arr = t + e.weight;
      if (arr > ctx.horizon) continue;
      if (!ctx.move_ok(key.v, e.to, t)) continue;
      if (!ctx.instant_ok(e.to, arr)) continue;
      unsigned mask = key.mask;
      for (size_t p = 0; p < ctx.pos.size(); ++p)
        if (ctx.pos[p]->action.from == key.v && ctx.pos[p]->action.to == e.to &&
            ctx.pos[p]->interval.contains(t))
          mask |= 1u << p;
      const Key nk{e.to, key.t + lat(e.weight, ctx.dt), mask};
      if (!seen.count(nk)) open.push({arr, nk});
    }
  }
  if (std::isinf(best)) return std::nullopt;
  return best;
}

std::vector<Plan> enumerate_lattice_plans(const Graph& g, int agent, int start,
                                          int goal,
                                          const std::vector<Constraint>& cons,
                                          double dt, double horizon) {
  const LatticeCtx ctx = make_ctx(g, cons, dt, horizon);
  std::vector<Plan> out;
  Plan cur;
  cur.agent = agent;
  cur.start_vertex = start;
  cur.goal_vertex = goal;

  // depth-first over lattice timed actions; a plan completes whenever the
  // agent stands on the goal with every landmark done and can park forever
  std::function<void(int, double)> dfs = [&](int v, double t) {
    if (out.size() > 20000) return;  // instance too large for enumeration
    if (v == goal && ctx.park_ok(v, t)) {
      Plan done = cur;
      done.cost = t;
      bool all = true;
      for (const Constraint* p : ctx.pos)
        if (!satisfies(done, *p)) all = false;
      if (all) out.push_back(done);
    }
    if (t + dt <= horizon + 1e-9 && ctx.wait_ok(v, t, t + dt)) {
      cur.actions.push_back({Action::wait(v, dt), t});
      dfs(v, t + dt);
      cur.actions.pop_back();
    }
    for (const Edge& e : g.neighbors(v)) {
      const double arr = t + e.weight;
      if (arr > horizon + 1e-9) continue;
      if (!ctx.move_ok(v, e.to, t)) continue;
      if (!ctx.instant_ok(e.to, arr)) continue;
      cur.actions.push_back({Action::move(v, e.to, e.weight), t});
      dfs(e.to, arr);
      cur.actions.pop_back();
    }
  };
  if (ctx.instant_ok(start, 0.0)) dfs(start, 0.0);

  // merge consecutive waits so plans are well-formed
  for (Plan& p : out) {
    std::vector<TimedAction> merged;
    for (const TimedAction& ta : p.actions) {
      if (!merged.empty() && !ta.action.is_move() &&
          !merged.back().action.is_move() &&
          merged.back().action.from == ta.action.from)
        merged.back().action.duration += ta.action.duration;
      else
        merged.push_back(ta);
    }
    p.actions = std::move(merged);
  }
  return out;
}

bool satisfies_all(const Plan& p, const std::vector<Constraint>& cons) {
  for (const Constraint& c : cons)
    if (!satisfies(p, c)) return false;
  return true;
}

double lp_h1(int n_agents,
             const std::vector<std::tuple<int, int, double>>& conflicts) {
  // min sum(x) s.t. x_i + x_j >= w, x >= 0 — two-phase tableau simplex with
  // Bland's rule; sizes are tiny (n <= 12, m <= 66)
  const int n = n_agents;
  const int m = static_cast<int>(conflicts.size());
  if (m == 0) return 0.0;
  const int cols = n + m + m;  // x, surplus, artificial
  std::vector<std::vector<double>> T(m + 1, std::vector<double>(cols + 1, 0.0));
  std::vector<int> basis(m);
  for (int r = 0; r < m; ++r) {
    const auto& [i, j, w] = conflicts[r];
    T[r][i] += 1.0;
    T[r][j] += 1.0;
    T[r][n + r] = -1.0;      // surplus
    T[r][n + m + r] = 1.0;   // artificial
    T[r][cols] = w;
    basis[r] = n + m + r;
  }

  auto pivot = [&](int pr, int pc) {
    const double pv = T[pr][pc];
    for (double& x : T[pr]) x /= pv;
    for (int r = 0; r <= m; ++r) {
      if (r == pr) continue;
      const double f = T[r][pc];
      if (f == 0.0) continue;
      for (int c = 0; c <= cols; ++c) T[r][c] -= f * T[pr][c];
    }
    basis[pr] = pc;
  };

  auto run = [&](int limit_cols) {
    while (true) {
      int pc = -1;
      for (int c = 0; c < limit_cols; ++c)  // Bland: first improving column
        if (T[m][c] < -1e-9) {
          pc = c;
          break;
        }
      if (pc < 0) return;
      int pr = -1;
      double best = INF;
      for (int r = 0; r < m; ++r)
        if (T[r][pc] > 1e-9) {
          const double ratio = T[r][cols] / T[r][pc];
          if (ratio < best - 1e-12 ||
              (ratio < best + 1e-12 && (pr < 0 || basis[r] < basis[pr]))) {
            best = ratio;
            pr = r;
          }
        }
      if (pr < 0) throw std::runtime_error("unbounded LP");
      pivot(pr, pc);
    }
  };

  // phase 1: minimize the artificial sum
  for (int c = 0; c <= cols; ++c) {
    double s = 0;
    for (int r = 0; r < m; ++r) s += T[r][c];
    T[m][c] = -s;
  }
  for (int r = 0; r < m; ++r) T[m][n + m + r] = 0.0;
  run(cols);

  // phase 2: minimize sum(x); artificials stay out (their columns dropped)
  for (int c = 0; c <= cols; ++c) T[m][c] = 0.0;
  for (int c = 0; c < n; ++c) T[m][c] = 1.0;
  for (int r = 0; r < m; ++r)
    if (basis[r] < n) {
      const double f = T[m][basis[r]];
      if (f != 0.0)
        for (int c = 0; c <= cols; ++c) T[m][c] -= f * T[r][c];
    }
  run(n + m);

  double value = 0;
  for (int r = 0; r < m; ++r)
    if (basis[r] < n) value += T[r][cols];
  return value;
}

}  // namespace oracle
