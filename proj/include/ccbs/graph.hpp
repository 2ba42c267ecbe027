/*
 * geometric graph, grid/roadmap construction and distance heuristics
 */
#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace ccbs {

constexpr double INF = std::numeric_limits<double>::infinity();

struct Point {
  double x = 0;
  double y = 0;
};

struct Edge {
  int to;
  double weight;
};

// Undirected geometric graph. Vertex ids are dense 0..|V|-1, every edge is
// stored in both directions and weighs the Euclidean distance of its
// endpoints (agents move at unit speed, so weight = duration).
class Graph {
 public:
  int add_vertex(double x, double y);
  void add_edge(int u, int v);

  int size() const { return static_cast<int>(verts_.size()); }
  const Point& pos(int v) const { return verts_[v]; }
  const std::vector<Edge>& neighbors(int v) const { return adj_[v]; }
  bool has_edge(int u, int v) const;
  double edge_weight(int u, int v) const;  // INF if absent
  std::size_t edge_count() const;          // undirected count

  void sort_adjacency();  // by target id, for deterministic expansion order

 private:
  std::vector<Point> verts_;
  std::vector<std::vector<Edge>> adj_;
};

struct GridMap {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> blocked;  // width*height, row-major

  bool is_blocked(int x, int y) const { return blocked[y * width + x]; }
  bool in_bounds(int x, int y) const {
    return x >= 0 && x < width && y >= 0 && y < height;
  }
};

// MovingAI .map text -> GridMap. Throws std::runtime_error naming the
// offending line on malformed input.
GridMap load_movingai_map(const std::string& text);

// One vertex per passable cell at (col,row); cell index col + row*width maps
// to the vertex id table returned through `cell_to_vertex` (-1 = blocked).
// Moves are the 2^k neighborhood; an edge needs line-of-sight between cell
// centers (supercover, corner touch blocks).
Graph build_grid_graph(const GridMap& map, int k, double radius,
                       std::vector<int>* cell_to_vertex = nullptr);

// The 2^k move set: k-2 doubling rounds over the cardinal vectors, sums of
// angular neighbors reduced to coprime components.
std::vector<std::pair<int, int>> neighborhood_moves(int k);

// True when the straight segment between cell centers crosses only passable
// cells. Cells touched at a single corner point count as crossed.
bool line_of_sight(const GridMap& map, int x0, int y0, int x1, int y1);

struct ScenEntry {
  int start_x, start_y;
  int goal_x, goal_y;
};

// MovingAI scen v1 text -> ordered start/goal list (file order is the
// benchmark protocol order).
std::vector<ScenEntry> load_scen(const std::string& text);

// Roadmap text format: `v id x y` records, then `e u v` records, `#` comments.
Graph load_roadmap(const std::string& text);
std::string serialize_roadmap(const Graph& g);

// PRM-lite roadmap: n uniform random free points, edges between pairs within
// connect_radius with segment clearance >= radius from blocked cells; the
// largest connected component is returned with dense ids.
Graph generate_roadmap(double width, double height, int n_nodes,
                       double connect_radius, uint64_t seed,
                       const GridMap* map = nullptr, double radius = 0.0);

// Exact cost-to-go to `goal` for every vertex, INF where unreachable.
std::vector<double> dijkstra_heuristic(const Graph& g, int goal);

// Per-goal Dijkstra columns; the goals double as differential-heuristic
// pivots for landmark searches.
struct HeuristicTables {
  std::vector<int> goals;
  std::vector<std::vector<double>> h;  // h[i][v] = dist(v, goals[i])

  void add_goal(const Graph& g, int goal);
  int column_of(int goal) const;  // -1 if absent
};

// max over pivots of |h_i(v) - h_i(target)|; admissible and consistent.
double dh_estimate(const HeuristicTables& tables, int v, int target);

}  // namespace ccbs
