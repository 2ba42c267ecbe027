#include "ccbs/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <queue>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace ccbs {

namespace {

double euclid(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

[[noreturn]] void parse_fail(const char* what, int line) {
  throw std::runtime_error(std::string(what) + " at line " +
                           std::to_string(line));
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      if (!cur.empty() && cur.back() == '\r') cur.pop_back();
      lines.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) {
    if (cur.back() == '\r') cur.pop_back();
    lines.push_back(cur);
  }
  return lines;
}

}  // namespace

int Graph::add_vertex(double x, double y) {
  verts_.push_back({x, y});
  adj_.emplace_back();
  return static_cast<int>(verts_.size()) - 1;
}

void Graph::add_edge(int u, int v) {
  if (u < 0 || v < 0 || u >= size() || v >= size())
    throw std::runtime_error("edge endpoint out of range");
  if (u == v) throw std::runtime_error("self-loop edge");
  if (has_edge(u, v)) return;
  const double w = euclid(verts_[u], verts_[v]);
  adj_[u].push_back({v, w});
  adj_[v].push_back({u, w});
}

bool Graph::has_edge(int u, int v) const {
  for (const Edge& e : adj_[u])
    if (e.to == v) return true;
  return false;
}

double Graph::edge_weight(int u, int v) const {
  for (const Edge& e : adj_[u])
    if (e.to == v) return e.weight;
  return INF;
}

std::size_t Graph::edge_count() const {
  std::size_t directed = 0;
  for (const auto& a : adj_) directed += a.size();
  return directed / 2;
}

void Graph::sort_adjacency() {
  for (auto& a : adj_)
    std::sort(a.begin(), a.end(),
              [](const Edge& l, const Edge& r) { return l.to < r.to; });
}

GridMap load_movingai_map(const std::string& text) {
  const auto lines = split_lines(text);
  if (lines.size() < 4) parse_fail("truncated map header", 1);
  if (lines[0].rfind("type", 0) != 0) parse_fail("expected `type` header", 1);
  int height = 0, width = 0;
  if (std::sscanf(lines[1].c_str(), "height %d", &height) != 1 || height <= 0)
    parse_fail("expected `height H`", 2);
  if (std::sscanf(lines[2].c_str(), "width %d", &width) != 1 || width <= 0)
    parse_fail("expected `width W`", 3);
  if (lines[3] != "map") parse_fail("expected `map`", 4);
  if (static_cast<int>(lines.size()) < 4 + height)
    parse_fail("missing map rows", static_cast<int>(lines.size()));

  GridMap map;
  map.width = width;
  map.height = height;
  map.blocked.assign(static_cast<size_t>(width) * height, 0);
  for (int y = 0; y < height; ++y) {
    const std::string& row = lines[4 + y];
    const int lineno = 5 + y;
    if (static_cast<int>(row.size()) != width)
      parse_fail("row length does not match width", lineno);
    for (int x = 0; x < width; ++x) {
      switch (row[x]) {
        case '.':
        case 'G':
          break;
        case '@':
        case 'O':
        case 'T':
        case 'W':
          map.blocked[y * width + x] = 1;
          break;
        default:
          parse_fail("unknown map character", lineno);
      }
    }
  }
  return map;
}

std::vector<std::pair<int, int>> neighborhood_moves(int k) {
  if (k < 2 || k > 5) throw std::runtime_error("neighborhood exponent k out of range [2,5]");
  std::vector<std::pair<int, int>> moves = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (int round = 2; round < k; ++round) {
    std::vector<std::pair<int, int>> next;
    next.reserve(moves.size() * 2);
    for (size_t i = 0; i < moves.size(); ++i) {
      const auto& a = moves[i];
      const auto& b = moves[(i + 1) % moves.size()];
      int sx = a.first + b.first, sy = a.second + b.second;
      const int g = std::gcd(std::abs(sx), std::abs(sy));
      if (g > 1) { sx /= g; sy /= g; }
      next.push_back(a);
      next.push_back({sx, sy});
    }
    moves = std::move(next);
  }
  return moves;
}

// Exact segment/cell-square overlap test in doubled integer coordinates:
// cell (cx,cy) becomes the closed square [2cx-1,2cx+1]x[2cy-1,2cy+1].
static bool segment_hits_square(long px0, long py0, long px1, long py1,
                                long cx, long cy) {
  const long lx = 2 * cx - 1, hx = 2 * cx + 1;
  const long ly = 2 * cy - 1, hy = 2 * cy + 1;
  if (std::max(px0, px1) < lx || std::min(px0, px1) > hx) return false;
  if (std::max(py0, py1) < ly || std::min(py0, py1) > hy) return false;
  const long dx = px1 - px0, dy = py1 - py0;
  auto side = [&](long x, long y) {
    const long c = dx * (y - py0) - dy * (x - px0);
    return (c > 0) - (c < 0);
  };
  const int s1 = side(lx, ly), s2 = side(hx, ly);
  const int s3 = side(lx, hy), s4 = side(hx, hy);
  if (s1 > 0 && s2 > 0 && s3 > 0 && s4 > 0) return false;
  if (s1 < 0 && s2 < 0 && s3 < 0 && s4 < 0) return false;
  return true;
}

bool line_of_sight(const GridMap& map, int x0, int y0, int x1, int y1) {
  const int bx0 = std::min(x0, x1), bx1 = std::max(x0, x1);
  const int by0 = std::min(y0, y1), by1 = std::max(y0, y1);
  for (int cy = by0; cy <= by1; ++cy)
    for (int cx = bx0; cx <= bx1; ++cx) {
      if (!map.is_blocked(cx, cy)) continue;
      if (segment_hits_square(2L * x0, 2L * y0, 2L * x1, 2L * y1, cx, cy))
        return false;
    }
  return true;
}

Graph build_grid_graph(const GridMap& map, int k, double radius,
                       std::vector<int>* cell_to_vertex) {
  if (k < 2 || k > 5) throw std::runtime_error("neighborhood exponent k out of range [2,5]");
  if (!(radius < 0.5 * std::sqrt(2.0)))
    throw std::runtime_error("agent radius does not fit a grid cell");
  const auto moves = neighborhood_moves(k);

  Graph g;
  std::vector<int> id(static_cast<size_t>(map.width) * map.height, -1);
  for (int y = 0; y < map.height; ++y)
    for (int x = 0; x < map.width; ++x)
      if (!map.is_blocked(x, y)) id[y * map.width + x] = g.add_vertex(x, y);

  for (int y = 0; y < map.height; ++y)
    for (int x = 0; x < map.width; ++x) {
      const int u = id[y * map.width + x];
      if (u < 0) continue;
      for (const auto& [dx, dy] : moves) {
        const int nx = x + dx, ny = y + dy;
        if (!map.in_bounds(nx, ny)) continue;
        const int v = id[ny * map.width + nx];
        if (v <= u) continue;  // both directions come from the symmetric move set
        if (line_of_sight(map, x, y, nx, ny)) g.add_edge(u, v);
      }
    }
  g.sort_adjacency();
  if (cell_to_vertex) *cell_to_vertex = std::move(id);
  return g;
}

std::vector<ScenEntry> load_scen(const std::string& text) {
  const auto lines = split_lines(text);
  if (lines.empty() || lines[0].rfind("version", 0) != 0)
    parse_fail("missing scen `version` header", 1);
  std::vector<ScenEntry> out;
  for (size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    std::istringstream ss(lines[i]);
    std::string field;
    std::vector<std::string> fields;
    while (ss >> field) fields.push_back(field);
    const int lineno = static_cast<int>(i) + 1;
    if (fields.size() != 9) parse_fail("scen line needs 9 fields", lineno);
    ScenEntry e{};
    int width = 0, height = 0;
    try {
      width = std::stoi(fields[2]);
      height = std::stoi(fields[3]);
      e.start_x = std::stoi(fields[4]);
      e.start_y = std::stoi(fields[5]);
      e.goal_x = std::stoi(fields[6]);
      e.goal_y = std::stoi(fields[7]);
    } catch (const std::exception&) {
      parse_fail("non-numeric scen field", lineno);
    }
    if (e.start_x < 0 || e.start_x >= width || e.start_y < 0 ||
        e.start_y >= height || e.goal_x < 0 || e.goal_x >= width ||
        e.goal_y < 0 || e.goal_y >= height)
      parse_fail("scen coordinates outside map", lineno);
    out.push_back(e);
  }
  return out;
}

Graph load_roadmap(const std::string& text) {
  const auto lines = split_lines(text);
  struct VRec { int id; double x, y; };
  std::vector<VRec> vrecs;
  std::vector<std::pair<int, int>> erecs;
  for (size_t i = 0; i < lines.size(); ++i) {
    const std::string& ln = lines[i];
    const int lineno = static_cast<int>(i) + 1;
    if (ln.empty() || ln[0] == '#') continue;
    std::istringstream ss(ln);
    std::string tag;
    ss >> tag;
    if (tag == "v") {
      VRec r{};
      if (!(ss >> r.id >> r.x >> r.y)) parse_fail("bad vertex record", lineno);
      vrecs.push_back(r);
    } else if (tag == "e") {
      int u, v;
      if (!(ss >> u >> v)) parse_fail("bad edge record", lineno);
      erecs.emplace_back(u, v);
    } else {
      parse_fail("unknown roadmap record", lineno);
    }
  }
  const int n = static_cast<int>(vrecs.size());
  std::vector<char> seen(n, 0);
  Graph g;
  std::vector<Point> pts(n);
  for (const VRec& r : vrecs) {
    if (r.id < 0 || r.id >= n) throw std::runtime_error("vertex ids must be dense 0..n-1");
    if (seen[r.id]) throw std::runtime_error("duplicate vertex id " + std::to_string(r.id));
    seen[r.id] = 1;
    pts[r.id] = {r.x, r.y};
  }
  for (int i = 0; i < n; ++i) g.add_vertex(pts[i].x, pts[i].y);
  for (const auto& [u, v] : erecs) {
    if (u < 0 || u >= n || v < 0 || v >= n)
      throw std::runtime_error("edge references unknown vertex");
    g.add_edge(u, v);
  }
  g.sort_adjacency();
  return g;
}

std::string serialize_roadmap(const Graph& g) {
  std::string out;
  char buf[128];
  for (int v = 0; v < g.size(); ++v) {
    std::snprintf(buf, sizeof(buf), "v %d %.17g %.17g\n", v, g.pos(v).x,
                  g.pos(v).y);
    out += buf;
  }
  for (int u = 0; u < g.size(); ++u)
    for (const Edge& e : g.neighbors(u))
      if (u < e.to) {
        std::snprintf(buf, sizeof(buf), "e %d %d\n", u, e.to);
        out += buf;
      }
  return out;
}

namespace {

double point_segment_dist(const Point& p, const Point& a, const Point& b) {
  const double vx = b.x - a.x, vy = b.y - a.y;
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0 ? ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * vx), p.y - (a.y + t * vy));
}

bool segments_intersect(const Point& a, const Point& b, const Point& c,
                        const Point& d) {
  auto orient = [](const Point& p, const Point& q, const Point& r) {
    const double v = (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
    return (v > 0) - (v < 0);
  };
  const int o1 = orient(a, b, c), o2 = orient(a, b, d);
  const int o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  return false;
}

double segment_segment_dist(const Point& a, const Point& b, const Point& c,
                            const Point& d) {
  if (segments_intersect(a, b, c, d)) return 0.0;
  return std::min({point_segment_dist(a, c, d), point_segment_dist(b, c, d),
                   point_segment_dist(c, a, b), point_segment_dist(d, a, b)});
}

// Distance from segment to the unit square of a blocked cell.
double segment_cell_dist(const Point& a, const Point& b, int cx, int cy) {
  const Point c0{cx - 0.5, cy - 0.5}, c1{cx + 0.5, cy - 0.5};
  const Point c2{cx + 0.5, cy + 0.5}, c3{cx - 0.5, cy + 0.5};
  // inside test for either endpoint
  auto inside = [&](const Point& p) {
    return p.x >= c0.x && p.x <= c2.x && p.y >= c0.y && p.y <= c2.y;
  };
  if (inside(a) || inside(b)) return 0.0;
  return std::min({segment_segment_dist(a, b, c0, c1),
                   segment_segment_dist(a, b, c1, c2),
                   segment_segment_dist(a, b, c2, c3),
                   segment_segment_dist(a, b, c3, c0)});
}

bool segment_clear(const Point& a, const Point& b, const GridMap* map,
                   double radius) {
  if (!map) return true;
  const int x0 = std::max(0, static_cast<int>(std::floor(std::min(a.x, b.x) - radius - 1)));
  const int x1 = std::min(map->width - 1, static_cast<int>(std::ceil(std::max(a.x, b.x) + radius + 1)));
  const int y0 = std::max(0, static_cast<int>(std::floor(std::min(a.y, b.y) - radius - 1)));
  const int y1 = std::min(map->height - 1, static_cast<int>(std::ceil(std::max(a.y, b.y) + radius + 1)));
  for (int cy = y0; cy <= y1; ++cy)
    for (int cx = x0; cx <= x1; ++cx)
      if (map->is_blocked(cx, cy) &&
          segment_cell_dist(a, b, cx, cy) < radius)
        return false;
  return true;
}

}  // namespace

Graph generate_roadmap(double width, double height, int n_nodes,
                       double connect_radius, uint64_t seed,
                       const GridMap* map, double radius) {
  if (n_nodes < 2) throw std::runtime_error("roadmap needs at least 2 nodes");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(0.0, width), uy(0.0, height);

  std::vector<Point> pts;
  int attempts = 0;
  const int max_attempts = 200 * n_nodes + 1000;
  while (static_cast<int>(pts.size()) < n_nodes && attempts < max_attempts) {
    ++attempts;
    Point p{ux(rng), uy(rng)};
    if (map && !segment_clear(p, p, map, radius)) continue;
    pts.push_back(p);
  }
  if (pts.empty()) throw std::runtime_error("roadmap sampling produced no free nodes");

  const int n = static_cast<int>(pts.size());
  std::vector<std::vector<int>> adj(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (euclid(pts[i], pts[j]) > connect_radius) continue;
      if (!segment_clear(pts[i], pts[j], map, radius)) continue;
      adj[i].push_back(j);
      adj[j].push_back(i);
    }

  // largest connected component, order-preserving reindex
  std::vector<int> comp(n, -1);
  int best_comp = -1, best_size = 0, n_comp = 0;
  for (int s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    int sz = 0;
    std::vector<int> stack{s};
    comp[s] = n_comp;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      ++sz;
      for (int w : adj[v])
        if (comp[w] < 0) {
          comp[w] = n_comp;
          stack.push_back(w);
        }
    }
    if (sz > best_size) {
      best_size = sz;
      best_comp = n_comp;
    }
    ++n_comp;
  }
  if (best_size == 0) throw std::runtime_error("roadmap has an empty component");

  Graph g;
  std::vector<int> newid(n, -1);
  for (int i = 0; i < n; ++i)
    if (comp[i] == best_comp) newid[i] = g.add_vertex(pts[i].x, pts[i].y);
  for (int i = 0; i < n; ++i) {
    if (newid[i] < 0) continue;
    for (int j : adj[i])
      if (newid[j] > newid[i]) g.add_edge(newid[i], newid[j]);
  }
  g.sort_adjacency();
  return g;
}

std::vector<double> dijkstra_heuristic(const Graph& g, int goal) {
  if (goal < 0 || goal >= g.size()) throw std::runtime_error("goal not in graph");
  std::vector<double> dist(g.size(), INF);
  using QE = std::pair<double, int>;
  std::priority_queue<QE, std::vector<QE>, std::greater<>> q;
  dist[goal] = 0.0;
  q.push({0.0, goal});
  while (!q.empty()) {
    const auto [d, v] = q.top();
    q.pop();
    if (d > dist[v]) continue;
    for (const Edge& e : g.neighbors(v)) {
      const double nd = d + e.weight;
      if (nd < dist[e.to]) {
        dist[e.to] = nd;
        q.push({nd, e.to});
      }
    }
  }
  return dist;
}

void HeuristicTables::add_goal(const Graph& g, int goal) {
  goals.push_back(goal);
  h.push_back(dijkstra_heuristic(g, goal));
}

int HeuristicTables::column_of(int goal) const {
  for (size_t i = 0; i < goals.size(); ++i)
    if (goals[i] == goal) return static_cast<int>(i);
  return -1;
}

double dh_estimate(const HeuristicTables& tables, int v, int target) {
  double best = 0.0;
  for (const auto& col : tables.h) {
    const double a = col[v], b = col[target];
    if (std::isinf(a) && std::isinf(b)) continue;  // same unreachable side
    const double d = std::fabs(a - b);
    if (d > best) best = d;
  }
  return best;
}

}  // namespace ccbs
