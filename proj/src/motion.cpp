#include "ccbs/motion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ccbs {

namespace {

struct Vec {
  double x = 0, y = 0;
};

Vec operator-(const Vec& a, const Vec& b) { return {a.x - b.x, a.y - b.y}; }
Vec operator+(const Vec& a, const Vec& b) { return {a.x + b.x, a.y + b.y}; }
Vec operator*(const Vec& a, double s) { return {a.x * s, a.y * s}; }
double dot(const Vec& a, const Vec& b) { return a.x * b.x + a.y * b.y; }

// Constant-velocity motion over a half-open time span.
struct Motion {
  Vec at0;  // position extrapolated to t=0: pos(t) = at0 + vel*t
  Vec vel;
  double t0;
  double t1;  // may be INF
};

Motion make_motion(const TimedAction& ta, const Graph& g) {
  const Point& a = g.pos(ta.action.from);
  Motion m;
  m.t0 = ta.start;
  m.t1 = ta.end();
  if (ta.action.is_move()) {
    const Point& b = g.pos(ta.action.to);
    const double d = ta.action.duration;
    m.vel = {(b.x - a.x) / d, (b.y - a.y) / d};
  } else {
    m.vel = {0, 0};
  }
  m.at0 = Vec{a.x, a.y} - m.vel * ta.start;
  return m;
}

// min over s in [lo,hi] of |rel0 + relv*s|^2, hi may be INF
double min_dist2_window(const Vec& rel0, const Vec& relv, double lo,
                        double hi) {
  const double v2 = dot(relv, relv);
  double s = lo;
  if (v2 > 0) {
    const double sstar = -dot(rel0, relv) / v2;
    s = std::isinf(hi) ? std::max(lo, sstar) : std::clamp(sstar, lo, hi);
  }
  const Vec r = rel0 + relv * s;
  return dot(r, r);
}

double min_dist2(const Motion& mi, const Motion& mj) {
  const double lo = std::max(mi.t0, mj.t0);
  const double hi = std::min(mi.t1, mj.t1);
  if (!(lo < hi)) return INF;  // disjoint spans
  return min_dist2_window(mi.at0 - mj.at0, mi.vel - mj.vel, lo, hi);
}

bool penetrates(double d2, double r_sum) { return d2 < r_sum * r_sum - EPS_GEO; }

// minimal squared distance between action i delayed by `delta` and action j
double min_dist2_shifted(const Motion& mi, const Motion& mj, double delta) {
  Motion m = mi;
  m.t0 += delta;
  m.t1 += delta;
  m.at0 = m.at0 - m.vel * delta;
  return min_dist2(m, mj);
}

// first delta in [a,b] with dist2 >= threshold, given unsafe at a, safe at b
double bisect_first_safe(const Motion& mi, const Motion& mj, double a,
                         double b, double thr2) {
  for (int it = 0; it < 200 && b - a > 1e-13; ++it) {
    const double mid = 0.5 * (a + b);
    if (min_dist2_shifted(mi, mj, mid) >= thr2)
      b = mid;
    else
      a = mid;
  }
  return b;
}

}  // namespace

std::vector<TimedAction> timed_actions_with_terminal(const Plan& p) {
  std::vector<TimedAction> out = p.actions;
  out.push_back(p.terminal_wait());
  return out;
}

Point position_at(const TimedAction& ta, const Graph& g, double t) {
  if (t < ta.start - EPS_GEO || t > ta.end() + EPS_GEO)
    throw std::runtime_error("time outside the action span");
  if (!ta.action.is_move()) return g.pos(ta.action.from);
  const Point& a = g.pos(ta.action.from);
  const Point& b = g.pos(ta.action.to);
  const double f = std::clamp((t - ta.start) / ta.action.duration, 0.0, 1.0);
  return {a.x + (b.x - a.x) * f, a.y + (b.y - a.y) * f};
}

Point plan_position(const Plan& p, const Graph& g, double t) {
  if (t < -EPS_GEO) throw std::runtime_error("time before the plan start");
  for (const TimedAction& ta : p.actions)
    if (t <= ta.end()) return position_at(ta, g, std::max(t, ta.start));
  return g.pos(p.goal_vertex);
}

bool collides(const TimedAction& ta_i, const TimedAction& ta_j, double r_i,
              double r_j, const Graph& g) {
  const double d2 = min_dist2(make_motion(ta_i, g), make_motion(ta_j, g));
  return penetrates(d2, r_i + r_j);
}

std::optional<Interval> unsafe_interval(const Action& a_i, double t_i,
                                        const TimedAction& ta_j, double r_i,
                                        double r_j, const Graph& g) {
  const Motion mi = make_motion(TimedAction{a_i, t_i}, g);
  const Motion mj = make_motion(ta_j, g);
  const double r_sum = r_i + r_j;
  const double thr2 = r_sum * r_sum - EPS_GEO;

  if (min_dist2(mi, mj) >= thr2) return std::nullopt;  // no conflict at t_i

  // The public predicate rebuilds the motion from the shifted start time,
  // which rounds differently from the internal delay shift; nudge the
  // endpoint until both routes agree that it is safe.
  const auto finalize = [&](double end) -> Interval {
    if (!std::isinf(end)) {
      double pad = 0.0;
      while (pad < 1e-7 &&
             collides(TimedAction{a_i, t_i + end + pad}, ta_j, r_i, r_j, g))
        pad = pad == 0.0 ? 1e-13 : pad * 4.0;
      end += pad;
    }
    return Interval{t_i, t_i + end};
  };

  const double d_i = a_i.duration;
  const double t_j = ta_j.start, d_j = ta_j.action.duration;

  // A span-unbounded j is a wait; beyond the last breakpoint the overlap
  // window is i-limited on both sides and the minimum no longer depends on
  // the delay, so the tail piece is constant.
  const bool j_unbounded = std::isinf(d_j);
  const double delta_empty = j_unbounded ? INF : std::max(0.0, t_j + d_j - t_i);

  // Relative motion of the delayed action: rel(s; delta) = C - u_i*delta + v*s.
  const Vec C = mi.at0 - mj.at0;
  const Vec v = mi.vel - mj.vel;
  const double v2 = dot(v, v);

  std::vector<double> breaks;
  auto add_break = [&](double d) {
    if (d > 1e-12 && d < delta_empty && std::isfinite(d)) breaks.push_back(d);
  };
  add_break(t_j - t_i);  // window lower end switches j-limited -> i-limited
  if (!j_unbounded && std::isfinite(d_i))
    add_break(t_j + d_j - t_i - d_i);  // upper end switches
  if (v2 > 0) {
    // interior minimizer s*(delta) = s0 + m*delta crossing a window endpoint
    const double s0 = -dot(C, v) / v2;
    const double m = dot(v, mi.vel) / v2;
    if (std::fabs(m) > 1e-15) {
      add_break((t_j - s0) / m);
      if (!j_unbounded) add_break((t_j + d_j - s0) / m);
    }
    if (std::fabs(m - 1.0) > 1e-15) {
      add_break((t_i - s0) / (m - 1.0));
      if (std::isfinite(d_i)) add_break((t_i + d_i - s0) / (m - 1.0));
    }
  }
  std::sort(breaks.begin(), breaks.end());

  std::vector<double> bounds{0.0};
  for (double b : breaks)
    if (b > bounds.back() + 1e-12) bounds.push_back(b);
  const bool tail_unbounded = std::isinf(delta_empty);
  if (!tail_unbounded) bounds.push_back(delta_empty);

  for (size_t k = 0; k < bounds.size(); ++k) {
    const double a = bounds[k];
    const bool last = (k + 1 == bounds.size());
    if (last && !tail_unbounded) break;  // window is empty from delta_empty on

    if (min_dist2_shifted(mi, mj, a) >= thr2) return finalize(a);
    if (last) return Interval{t_i, INF};  // constant unsafe tail

    const double b = bounds[k + 1];
    // On each piece the minimum is a convex quadratic |P + Q*delta|^2; fit it
    // exactly through three evaluations (Lagrange on x in [0, h]).
    const double h = b - a;
    const double qa = min_dist2_shifted(mi, mj, a);
    const double qm = min_dist2_shifted(mi, mj, a + 0.5 * h);
    const double qb = min_dist2_shifted(mi, mj, b);
    const double A = 2.0 * (qa - 2.0 * qm + qb) / (h * h);
    const double B = (-3.0 * qa + 4.0 * qm - qb) / h;

    double first_safe = INF;
    if (std::fabs(A) < 1e-15) {
      if (B > 1e-15) {
        const double x = (thr2 - qa) / B;
        if (x >= 0 && x <= h) first_safe = a + x;
      }
    } else {
      const double disc = B * B - 4.0 * A * (qa - thr2);
      if (disc >= 0) {
        const double sq = std::sqrt(disc);
        // convex piece: q >= thr2 holds from the larger root on
        const double x = std::max((-B - sq) / (2.0 * A), (-B + sq) / (2.0 * A));
        if (x >= 0 && x <= h + 1e-12) first_safe = a + std::min(x, h);
      }
    }

    if (std::isfinite(first_safe) &&
        min_dist2_shifted(mi, mj, first_safe) >= thr2) {
      return finalize(first_safe);
    }
    // fitted root missing or rejected by the predicate: bisect if the piece
    // end is safe, otherwise the whole piece is unsafe
    if (min_dist2_shifted(mi, mj, b) >= thr2)
      return finalize(bisect_first_safe(mi, mj, a, b, thr2));
  }
  // unsafe all the way to the window's end, which is the first safe start
  return finalize(delta_empty);
}

std::optional<Interval> wait_danger_window(int vertex, const TimedAction& ta_j,
                                           double r_i, double r_j,
                                           const Graph& g) {
  const Motion mj = make_motion(ta_j, g);
  const Point& pv = g.pos(vertex);
  const Vec rel0 = Vec{pv.x, pv.y} - mj.at0;  // rel(s) = rel0 - vel*s
  const double r_sum = r_i + r_j;
  const double thr2 = r_sum * r_sum - EPS_GEO;

  const double a = dot(mj.vel, mj.vel);
  double lo, hi;
  if (a == 0.0) {
    if (dot(rel0, rel0) >= thr2) return std::nullopt;
    lo = mj.t0;
    hi = mj.t1;
  } else {
    const double b = -2.0 * dot(rel0, mj.vel);
    const double c = dot(rel0, rel0) - thr2;
    const double disc = b * b - 4.0 * a * c;
    if (disc <= 0) return std::nullopt;
    const double sq = std::sqrt(disc);
    lo = std::max((-b - sq) / (2.0 * a), mj.t0);
    hi = std::min((-b + sq) / (2.0 * a), mj.t1);
  }
  if (!(lo < hi)) return std::nullopt;
  return Interval{lo, hi};
}

double plan_cost(const Plan& p) {
  double c = 0;
  for (const TimedAction& ta : p.actions) c += ta.action.duration;
  return c;
}

}  // namespace ccbs
