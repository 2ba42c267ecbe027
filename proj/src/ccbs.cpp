#include "ccbs/ccbs.hpp"

#include <algorithm>
#include <cassert>
#include <cstring>
#include <chrono>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <unordered_set>

namespace ccbs {

void Instance::validate() const {
  if (!graph) throw std::runtime_error("instance has no graph");
  const int n = num_agents();
  if (n < 1) throw std::runtime_error("instance has no agents");
  if (static_cast<int>(goals.size()) != n || static_cast<int>(radii.size()) != n)
    throw std::runtime_error("instance field sizes disagree");
  for (int i = 0; i < n; ++i) {
    if (starts[i] < 0 || starts[i] >= graph->size() || goals[i] < 0 ||
        goals[i] >= graph->size())
      throw std::runtime_error("start/goal vertex out of range");
    if (!(radii[i] > 0)) throw std::runtime_error("agent radius must be positive");
    for (int j = i + 1; j < n; ++j) {
      if (starts[i] == starts[j]) throw std::runtime_error("agents share a start vertex");
      if (goals[i] == goals[j]) throw std::runtime_error("agents share a goal vertex");
    }
  }
}

SolverConfig variant_config(const std::string& name) {
  SolverConfig c;
  c.use_heuristic = false;
  if (name == "vanilla") {
    c.splitting = Splitting::Vanilla;
    c.conflict_choice = ConflictChoice::First;
  } else if (name == "pc") {
    c.splitting = Splitting::Vanilla;
    c.conflict_choice = ConflictChoice::CostImpact;
  } else if (name == "ds") {
    c.splitting = Splitting::Disjoint;
    c.conflict_choice = ConflictChoice::First;
  } else if (name == "ds+pc") {
    c.splitting = Splitting::Disjoint;
    c.conflict_choice = ConflictChoice::CostImpact;
  } else if (name == "ds+pc+h") {
    c.splitting = Splitting::Disjoint;
    c.conflict_choice = ConflictChoice::CostImpact;
    c.use_heuristic = true;
  } else {
    throw std::runtime_error("unknown variant: " + name);
  }
  return c;
}

std::vector<std::string> variant_names() {
  return {"vanilla", "pc", "ds", "ds+pc", "ds+pc+h"};
}

std::vector<Constraint> materialize(const ConstraintList& head) {
  size_t count = 0;
  for (const ConstraintListNode* n = head.get(); n; n = n->next.get()) ++count;
  std::vector<Constraint> out;
  out.reserve(count);
  for (const ConstraintListNode* n = head.get(); n; n = n->next.get())
    out.push_back(n->c);
  return out;
}

namespace {

ConstraintList cons(const Constraint& c, const ConstraintList& tail) {
  return std::make_shared<const ConstraintListNode>(ConstraintListNode{c, tail});
}

// Constraint interval of one conflict side: move actions get the window of
// forbidden start times; wait actions get the geometric presence window, the
// interval the low level actually carves out of the vertex's safe intervals.
std::optional<Interval> side_interval(const TimedAction& own,
                                      const TimedAction& other, double r_own,
                                      double r_other, const Graph& g) {
  if (own.action.is_move())
    return unsafe_interval(own.action, own.start, other, r_own, r_other, g);
  return wait_danger_window(own.action.from, other, r_own, r_other, g);
}

void detect_pair(const Instance& inst, int i, int j, const Plan& pi,
                 const Plan& pj, std::vector<ConflictPtr>& out) {
  const Graph& g = *inst.graph;
  const double ri = inst.radii[i], rj = inst.radii[j];
  const auto tai = timed_actions_with_terminal(pi);
  const auto taj = timed_actions_with_terminal(pj);
  for (const TimedAction& a : tai)
    for (const TimedAction& b : taj) {
      if (a.end() <= b.start || b.end() <= a.start) continue;
      if (!collides(a, b, ri, rj, g)) continue;
      const auto ua = side_interval(a, b, ri, rj, g);
      const auto ub = side_interval(b, a, rj, ri, g);
      if (!ua || !ub) continue;  // borderline contact, not an actionable conflict
      auto con = std::make_shared<Conflict>();
      con->a = ConflictSide{i, a, *ua, -1.0, nullptr, static_cast<uint64_t>(-1)};
      con->b = ConflictSide{j, b, *ub, -1.0, nullptr, static_cast<uint64_t>(-1)};
      out.push_back(std::move(con));
    }
}

}  // namespace

std::vector<ConflictPtr> detect_conflicts(const Instance& inst,
                                          const std::vector<PlanPtr>& plans) {
  std::vector<ConflictPtr> out;
  const int n = inst.num_agents();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      detect_pair(inst, i, j, *plans[i], *plans[j], out);
  return out;
}

std::vector<ConflictPtr> update_conflicts(const Instance& inst,
                                          const std::vector<ConflictPtr>& parent,
                                          int replanned,
                                          const std::vector<PlanPtr>& plans) {
  std::vector<ConflictPtr> out;
  // copy retained conflicts: the delta memos stay lineage-local instead of
  // being overwritten back and forth by sibling subtrees
  for (const ConflictPtr& c : parent)
    if (!c->involves(replanned)) out.push_back(std::make_shared<Conflict>(*c));
  const int n = inst.num_agents();
  for (int other = 0; other < n; ++other) {
    if (other == replanned) continue;
    const int i = std::min(replanned, other), j = std::max(replanned, other);
    detect_pair(inst, i, j, *plans[i], *plans[j], out);
  }
  return out;
}

namespace {

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t bits_of(double d) {
  uint64_t u;
  static_assert(sizeof(u) == sizeof(d));
  std::memcpy(&u, &d, sizeof(u));
  return u;
}

// order-independent constraint fingerprint stream (0 or 1)
uint64_t constraint_hash(int agent, const Constraint& c, int stream) {
  uint64_t h = stream ? 0x8397ab1ce7ff11d3ULL : 0x51d2c4b7a9e8f605ULL;
  h = splitmix64(h ^ static_cast<uint64_t>(agent));
  h = splitmix64(h ^ static_cast<uint64_t>(c.sign == ConstraintSign::Positive));
  h = splitmix64(h ^ static_cast<uint64_t>(c.action.is_move()));
  h = splitmix64(h ^ static_cast<uint64_t>(static_cast<uint32_t>(c.action.from)));
  h = splitmix64(h ^ static_cast<uint64_t>(static_cast<uint32_t>(c.action.to)));
  h = splitmix64(h ^ bits_of(c.interval.lo));
  h = splitmix64(h ^ bits_of(c.interval.hi));
  return h;
}

void ensure_side_memo(SolverContext& ctx, CTNode& node, ConflictSide& side) {
  const uint64_t version = node.constraint_version[side.agent];
  if (side.memo_valid(version)) return;
  if (std::chrono::steady_clock::now() > ctx.deadline) throw SolveTimeout{};
  const Instance& inst = *ctx.inst;

  const uint64_t cache_key = (static_cast<uint64_t>(side.agent) << 56) | version;
  auto it = ctx.table_cache.find(cache_key);
  if (it == ctx.table_cache.end()) {
    if (ctx.table_cache.size() > 200000) ctx.table_cache.clear();
    it = ctx.table_cache
             .emplace(cache_key, std::make_shared<const ConstraintTable>(
                                     materialize(node.constraints[side.agent])))
             .first;
  }
  const ConstraintTable replan_ct(
      *it->second, Constraint::negative(side.agent, side.ta.action, side.unsafe));
  SippStats ls;
  auto plan = low_level_ds(*inst.graph, side.agent, inst.starts[side.agent],
                           inst.goals[side.agent], replan_ct, *ctx.tables,
                           {}, &ls);
  ++ctx.stats->low_level_calls;
  ctx.stats->low_level_expanded += ls.expanded;
  if (plan) {
    side.delta = std::max(0.0, plan->cost - node.plans[side.agent]->cost);
    side.replan = std::make_shared<const Plan>(std::move(*plan));
  } else {
    side.delta = INF;
    side.replan = nullptr;
  }
  side.memo_version = version;
}

double aggregate_delta(double da, double db, Aggregate agg) {
  switch (agg) {
    case Aggregate::Min: return std::min(da, db);
    case Aggregate::Max: return std::max(da, db);
    case Aggregate::Sum: return da + db;
  }
  return std::min(da, db);
}

// deterministic conflict ordering: earliest action start, then identity
bool conflict_before(const Conflict& x, const Conflict& y) {
  const auto key = [](const Conflict& c) {
    return std::make_tuple(c.min_start(), c.a.ta.start, c.b.ta.start, c.a.agent,
                           c.b.agent, c.a.ta.action.from, c.a.ta.action.to,
                           c.b.ta.action.from, c.b.ta.action.to);
  };
  return key(x) < key(y);
}

}  // namespace

CostImpact cost_impact(SolverContext& ctx, CTNode& node, Conflict& con,
                       Aggregate aggregate) {
  ensure_side_memo(ctx, node, con.a);
  ensure_side_memo(ctx, node, con.b);
  return {con.a.delta, con.b.delta,
          aggregate_delta(con.a.delta, con.b.delta, aggregate)};
}

int choose_conflict(SolverContext& ctx, CTNode& node, const SolverConfig& cfg) {
  if (node.conflicts.empty())
    throw std::runtime_error("choose_conflict on a conflict-free node");
  int best = 0;
  if (cfg.conflict_choice == ConflictChoice::First) {
    for (size_t i = 1; i < node.conflicts.size(); ++i)
      if (conflict_before(*node.conflicts[i], *node.conflicts[best]))
        best = static_cast<int>(i);
    return best;
  }
  double best_impact = -1.0;
  for (size_t i = 0; i < node.conflicts.size(); ++i) {
    const double impact =
        cost_impact(ctx, node, *node.conflicts[i], cfg.cost_impact_aggregate)
            .aggregate;
    const double cur = best_impact;
    if (impact > cur ||
        (impact == cur &&
         conflict_before(*node.conflicts[i], *node.conflicts[best]))) {
      best = static_cast<int>(i);
      best_impact = impact;
    }
  }
  return best;
}

double h2_greedy(SolverContext& ctx, CTNode& node, Aggregate aggregate) {
  if (node.conflicts.empty()) return 0.0;
  std::vector<std::pair<double, int>> order;
  order.reserve(node.conflicts.size());
  for (size_t i = 0; i < node.conflicts.size(); ++i) {
    const double impact =
        cost_impact(ctx, node, *node.conflicts[i], aggregate).aggregate;
    order.emplace_back(impact, static_cast<int>(i));
  }
  std::sort(order.begin(), order.end(), [&](const auto& x, const auto& y) {
    if (x.first != y.first) return x.first > y.first;  // descending impact
    return conflict_before(*node.conflicts[x.second], *node.conflicts[y.second]);
  });
  std::unordered_set<int> used;
  double h = 0.0;
  for (const auto& [impact, idx] : order) {
    const Conflict& c = *node.conflicts[idx];
    if (used.count(c.a.agent) || used.count(c.b.agent)) continue;
    used.insert(c.a.agent);
    used.insert(c.b.agent);
    if (std::isfinite(impact)) h += impact;
  }
  return h;
}

HeuristicTables precompute_tables(const Instance& inst) {
  HeuristicTables t;
  for (int goal : inst.goals) t.add_goal(*inst.graph, goal);
  return t;
}

namespace {

struct OpenEntry {
  double key;
  size_t conflicts;
  int depth;
  uint64_t seq;
  CTNodePtr node;

  bool operator>(const OpenEntry& o) const {
    if (key != o.key) return key > o.key;
    if (conflicts != o.conflicts) return conflicts > o.conflicts;
    if (depth != o.depth) return depth < o.depth;  // deeper first
    return seq > o.seq;
  }
};

struct ChildSpec {
  int replanned;                        // agent whose plan changes
  PlanPtr new_plan;                     // must be non-null
  std::vector<std::pair<int, Constraint>> added;  // (agent, constraint)
};

}  // namespace

CTNodePtr make_root(SolverContext& ctx, const SolverConfig& cfg) {
  const Instance& inst = *ctx.inst;
  const int n = inst.num_agents();
  auto root = std::make_shared<CTNode>();
  root->id = 0;
  root->seq = 0;
  root->constraints.resize(n);
  root->constraint_version.assign(n, 0);
  for (int a = 0; a < n; ++a) {
    SippStats ls;
    auto plan = low_level_ds(*inst.graph, a, inst.starts[a], inst.goals[a], {},
                             *ctx.tables, {}, &ls);
    ++ctx.stats->low_level_calls;
    ctx.stats->low_level_expanded += ls.expanded;
    if (!plan) return nullptr;
    root->plans.push_back(std::make_shared<const Plan>(std::move(*plan)));
    root->cost += root->plans.back()->cost;
  }
  root->conflicts = detect_conflicts(inst, root->plans);
  if (cfg.use_heuristic)
    root->h = h2_greedy(ctx, *root, cfg.cost_impact_aggregate);
  root->key = root->cost + root->h;
  return root;
}

std::vector<CTNodePtr> expand_node(SolverContext& ctx, CTNode& node,
                                   int conflict_index,
                                   const SolverConfig& cfg) {
  const Instance& inst = *ctx.inst;
  Conflict& con = *node.conflicts[conflict_index];
  const auto impact = cost_impact(ctx, node, con, cfg.cost_impact_aggregate);

  std::vector<CTNodePtr> children;
  if (std::isinf(impact.delta_a) && std::isinf(impact.delta_b))
    return children;  // neither agent can resolve it: dead end

  std::vector<ChildSpec> specs;
  // Disjoint splitting only on move-move conflicts: the landmark child adds
  // the other side's negative constraint, which loses no conflict-free
  // solution only when both unsafe windows anchor fixed-duration actions.
  // Wait-involving conflicts fall back to the vanilla split.
  const bool disjoint = cfg.splitting == Splitting::Disjoint &&
                        con.a.ta.action.is_move() && con.b.ta.action.is_move();
  if (disjoint) {
    // split on the agent with the larger cost increase
    const ConflictSide* chosen;
    if (con.a.delta != con.b.delta)
      chosen = con.a.delta > con.b.delta ? &con.a : &con.b;
    else
      chosen = &con.a;  // tie: lower agent id
    const ConflictSide& other = chosen == &con.a ? con.b : con.a;

    // A repeated split on the same pinned move would stack a second landmark
    // on the edge; the sequential landmark stages would then demand two
    // crossings. Keep only the first landmark per edge window.
    bool landmark_known = false;
    for (const Constraint& c : materialize(node.constraints[chosen->agent]))
      if (c.sign == ConstraintSign::Positive &&
          c.action.from == chosen->ta.action.from &&
          c.action.to == chosen->ta.action.to &&
          c.interval.lo < chosen->unsafe.hi &&
          chosen->unsafe.lo < c.interval.hi)
        landmark_known = true;

    if (chosen->replan)
      specs.push_back({chosen->agent, chosen->replan,
                       {{chosen->agent,
                         Constraint::negative(chosen->agent, chosen->ta.action,
                                              chosen->unsafe)}}});
    if (other.replan) {
      ChildSpec pos{other.agent,
                    other.replan,
                    {{other.agent, Constraint::negative(other.agent,
                                                        other.ta.action,
                                                        other.unsafe)}}};
      if (!landmark_known)
        pos.added.insert(pos.added.begin(),
                         {chosen->agent,
                          Constraint::positive(chosen->agent, chosen->ta.action,
                                               chosen->unsafe)});
      specs.push_back(std::move(pos));
    }
  } else {
    for (const ConflictSide* side : {&con.a, &con.b})
      if (side->replan)
        specs.push_back({side->agent, side->replan,
                         {{side->agent,
                           Constraint::negative(side->agent, side->ta.action,
                                                side->unsafe)}}});
  }

  for (const ChildSpec& spec : specs) {
    // drop children whose constraint set was already generated elsewhere in
    // the tree: same set, same plans, same subtree
    uint64_t h0 = node.set_hash[0], h1 = node.set_hash[1];
    for (const auto& [agent, constraint] : spec.added) {
      h0 += constraint_hash(agent, constraint, 0);
      h1 += constraint_hash(agent, constraint, 1);
    }
    const auto [it, fresh] = ctx.seen_sets.emplace(h0, h1);
    if (!fresh && it->second == h1) continue;

    auto child = std::make_shared<CTNode>();
    child->id = ctx.next_id++;
    child->seq = ctx.next_seq++;
    child->depth = node.depth + 1;
    child->set_hash[0] = h0;
    child->set_hash[1] = h1;
    child->plans = node.plans;
    child->plans[spec.replanned] = spec.new_plan;
    child->cost =
        node.cost - node.plans[spec.replanned]->cost + spec.new_plan->cost;
    child->constraints = node.constraints;
    child->constraint_version = node.constraint_version;
    for (const auto& [agent, constraint] : spec.added) {
      child->constraints[agent] = cons(constraint, child->constraints[agent]);
      child->constraint_version[agent] = child->id;
    }
    child->conflicts =
        update_conflicts(inst, node.conflicts, spec.replanned, child->plans);
    if (cfg.use_heuristic)
      child->h = h2_greedy(ctx, *child, cfg.cost_impact_aggregate);
    child->key = std::max(node.key, child->cost + child->h);
    children.push_back(std::move(child));
  }
  return children;
}

SolveResult solve(const Instance& inst, const SolverConfig& cfg,
                  const HeuristicTables* tables_in) {
  inst.validate();
  SolveResult res;

  HeuristicTables local_tables;
  const HeuristicTables* tables = tables_in;
  if (!tables) {
    const auto t0 = std::chrono::steady_clock::now();
    local_tables = precompute_tables(inst);
    res.precompute =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    tables = &local_tables;
  }

  const auto search_start = std::chrono::steady_clock::now();
  const auto deadline =
      search_start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                         std::chrono::duration<double>(cfg.time_limit));
  const auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         search_start)
        .count();
  };
  SolverContext ctx{&inst, tables, &res, deadline, 1, 1};
  const int n = inst.num_agents();

  std::priority_queue<OpenEntry, std::vector<OpenEntry>, std::greater<>> open;
  try {
    CTNodePtr root = make_root(ctx, cfg);
    if (!root) {
      res.status = SolveStatus::Infeasible;
      res.runtime = elapsed();
      return res;
    }
    open.push({root->key, root->conflicts.size(), 0, root->seq, root});
    res.generated = 1;

    double last_key = -INF;
    while (!open.empty()) {
      if (std::chrono::steady_clock::now() > deadline) throw SolveTimeout{};
      CTNodePtr node = open.top().node;
      open.pop();

      res.max_cost_plus_h = std::max(res.max_cost_plus_h, node->cost + node->h);
      if (node->key < last_key - 1e-9) res.keys_monotone = false;
      last_key = std::max(last_key, node->key);

      if (node->conflicts.empty()) {
        res.status = SolveStatus::Solved;
        res.soc = node->cost;
        for (int a = 0; a < n; ++a) res.plans.push_back(*node->plans[a]);
        res.runtime = elapsed();
        return res;
      }

      ++res.expanded;
      const int ci = choose_conflict(ctx, *node, cfg);
      for (CTNodePtr& child : expand_node(ctx, *node, ci, cfg)) {
        open.push({child->key, child->conflicts.size(), child->depth,
                   child->seq, child});
        ++res.generated;
      }
    }
    res.status = SolveStatus::Infeasible;  // constraint tree exhausted
  } catch (const SolveTimeout&) {
    res.status = SolveStatus::Timeout;
  }
  res.runtime = elapsed();
  return res;
}

}  // namespace ccbs
