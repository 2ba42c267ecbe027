#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "ccbs/bench.hpp"
#include "ccbs/validate.hpp"

namespace fs = std::filesystem;
using namespace ccbs;

namespace {

constexpr int EXIT_SOLVED = 0;
constexpr int EXIT_ERROR = 1;
constexpr int EXIT_TIMEOUT = 2;
constexpr int EXIT_INFEASIBLE = 3;

struct LoadedWorld {
  Graph graph;
  std::vector<int> cell_to_vertex;  // grids only
  GridMap map;                      // grids only
  bool is_grid = false;
};

LoadedWorld load_world(const std::string& map_path,
                       const std::string& roadmap_path, int k, double radius) {
  LoadedWorld w;
  if (!map_path.empty()) {
    w.map = load_movingai_map(read_file(map_path));
    w.graph = build_grid_graph(w.map, k, radius, &w.cell_to_vertex);
    w.is_grid = true;
  } else if (!roadmap_path.empty()) {
    w.graph = load_roadmap(read_file(roadmap_path));
  } else {
    throw std::runtime_error("need --map or --roadmap");
  }
  return w;
}

std::vector<std::pair<int, int>> load_pairs(const LoadedWorld& w,
                                            const std::string& scen_path,
                                            const std::string& task_path) {
  std::vector<std::pair<int, int>> pairs;
  if (!scen_path.empty()) {
    if (!w.is_grid) throw std::runtime_error("--scen needs a grid --map");
    for (const ScenEntry& e : load_scen(read_file(scen_path))) {
      if (e.start_x >= w.map.width || e.start_y >= w.map.height ||
          e.goal_x >= w.map.width || e.goal_y >= w.map.height)
        throw std::runtime_error("scen entry outside the map");
      const int s = w.cell_to_vertex[e.start_y * w.map.width + e.start_x];
      const int g = w.cell_to_vertex[e.goal_y * w.map.width + e.goal_x];
      if (s < 0 || g < 0) throw std::runtime_error("scen entry on a blocked cell");
      pairs.emplace_back(s, g);
    }
  } else if (!task_path.empty()) {
    std::istringstream in(read_file(task_path));
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ss(line);
      int s, g;
      if (!(ss >> s >> g)) throw std::runtime_error("bad task line: " + line);
      pairs.emplace_back(s, g);
    }
  } else {
    throw std::runtime_error("need --scen or --task");
  }
  return pairs;
}

int cmd_solve(const std::string& map_path, const std::string& roadmap_path,
              const std::string& scen_path, const std::string& task_path,
              int agents, const std::string& variant, double time_limit, int k,
              double radius, const std::string& out) {
  const LoadedWorld w = load_world(map_path, roadmap_path, k, radius);
  const auto pairs = load_pairs(w, scen_path, task_path);
  if (agents > static_cast<int>(pairs.size()))
    throw std::runtime_error("scenario has fewer start-goal pairs than --agents");

  BenchTask task;
  task.map_id = !map_path.empty() ? fs::path(map_path).stem().string()
                                  : fs::path(roadmap_path).stem().string();
  task.scen_id = !scen_path.empty() ? fs::path(scen_path).stem().string()
                                    : fs::path(task_path).stem().string();
  task.graph = &w.graph;
  task.pairs = pairs;

  const Instance inst = make_instance(task, agents, radius);
  SolverConfig cfg = variant_config(variant);
  cfg.time_limit = time_limit;
  const SolveResult res = solve(inst, cfg);

  BenchRecord rec;
  rec.map_id = task.map_id;
  rec.scen_id = task.scen_id;
  rec.variant = variant;
  rec.n = agents;
  rec.solved = res.status == SolveStatus::Solved;
  rec.soc = res.soc;
  rec.expansions = res.expanded;
  rec.runtime = res.runtime;
  rec.precompute = res.precompute;
  std::cout << csv_line(rec) << "\n";

  if (res.status == SolveStatus::Solved) {
    if (!out.empty()) write_file(out, serialize_solution(res.plans));
    const ValidationReport rep = validate_solution(inst, res.plans);
    if (!rep.ok) {
      std::cerr << "solution failed validation:\n" << rep.to_text();
      return EXIT_ERROR;
    }
    return EXIT_SOLVED;
  }
  return res.status == SolveStatus::Timeout ? EXIT_TIMEOUT : EXIT_INFEASIBLE;
}

int cmd_bench(const std::string& map_path, std::vector<std::string> scens,
              const std::string& variants_arg, double time_limit, int k,
              double radius, const std::string& out, bool no_timing) {
  const LoadedWorld w = load_world(map_path, "", k, radius);

  // expand directories into their .scen files, sorted for determinism
  std::vector<std::string> scen_files;
  for (const std::string& s : scens) {
    if (fs::is_directory(s)) {
      std::vector<std::string> found;
      for (const auto& e : fs::directory_iterator(s))
        if (e.path().extension() == ".scen") found.push_back(e.path().string());
      std::sort(found.begin(), found.end());
      scen_files.insert(scen_files.end(), found.begin(), found.end());
    } else {
      scen_files.push_back(s);
    }
  }
  if (scen_files.empty()) throw std::runtime_error("no scenario files");

  std::vector<BenchTask> tasks;
  for (const std::string& path : scen_files) {
    BenchTask t;
    t.map_id = fs::path(map_path).stem().string();
    t.scen_id = fs::path(path).stem().string();
    t.graph = &w.graph;
    t.pairs = load_pairs(w, path, "");
    tasks.push_back(std::move(t));
  }

  BenchOptions opt;
  opt.variants.clear();
  std::istringstream vs(variants_arg);
  std::string v;
  while (std::getline(vs, v, ','))
    if (!v.empty()) opt.variants.push_back(v);
  opt.time_limit = time_limit;
  opt.radius = radius;
  opt.zero_timing = no_timing;

  const auto records = run_bench(tasks, opt);
  std::string csv = csv_header() + "\n";
  for (const BenchRecord& r : records) csv += csv_line(r) + "\n";
  if (out.empty())
    std::cout << csv;
  else
    write_file(out, csv);
  return 0;
}

int cmd_gen_roadmap(double width, double height, int nodes,
                    double connect_radius, uint64_t seed,
                    const std::string& map_path, double agent_radius,
                    const std::string& out) {
  GridMap map;
  const GridMap* map_ptr = nullptr;
  if (!map_path.empty()) {
    map = load_movingai_map(read_file(map_path));
    map_ptr = &map;
    width = map.width;
    height = map.height;
  }
  const Graph g = generate_roadmap(width, height, nodes, connect_radius, seed,
                                   map_ptr, agent_radius);
  const std::string text = serialize_roadmap(g);
  if (out.empty())
    std::cout << text;
  else
    write_file(out, text);
  return 0;
}

int cmd_render(const std::string& solution_path, const std::string& map_path,
               const std::string& roadmap_path, int k, double radius,
               const std::string& out) {
  const LoadedWorld w = load_world(map_path, roadmap_path, k, radius);
  const auto plans = parse_solution(read_file(solution_path));
  const std::string svg = render_svg(w.graph, plans, radius);
  write_file(out, svg);
  return 0;
}

int cmd_ratio(const std::string& csv_a, const std::string& csv_b) {
  const auto a = parse_csv(read_file(csv_a));
  const auto b = parse_csv(read_file(csv_b));
  std::cout << ratio_table(expansion_ratio(a, b));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"continuous-time multi-agent pathfinding solver"};
  app.require_subcommand(1);

  std::string map_path, roadmap_path, scen_path, task_path, out, variant =
      "ds+pc+h";
  std::string variants = "ds+pc+h";
  std::vector<std::string> scens;
  int agents = 2, k = 3, nodes = 100;
  double time_limit = 30.0, radius = DEFAULT_RADIUS, width = 16, height = 16,
         connect_radius = 4.0;
  uint64_t seed = 0;
  bool no_timing = false;
  std::string csv_a, csv_b, solution_path;

  auto* s = app.add_subcommand("solve", "solve one instance");
  s->add_option("--map", map_path, "MovingAI .map file");
  s->add_option("--roadmap", roadmap_path, "roadmap file");
  s->add_option("--scen", scen_path, "MovingAI .scen file");
  s->add_option("--task", task_path, "roadmap task file (start goal per line)");
  s->add_option("--agents", agents, "number of agents")->required();
  s->add_option("--variant", variant, "vanilla|pc|ds|ds+pc|ds+pc+h");
  s->add_option("--time-limit", time_limit, "seconds");
  s->add_option("--k", k, "grid neighborhood exponent (2..5)");
  s->add_option("--radius", radius, "agent disk radius");
  s->add_option("--seed", seed, "rng seed (reserved)");
  s->add_option("--out", out, "write the solution file here");

  auto* b = app.add_subcommand("bench", "incremental-agent benchmark sweep");
  b->add_option("--map", map_path, "MovingAI .map file")->required();
  b->add_option("--scen", scens, "scen files or directories")->required();
  b->add_option("--variants", variants, "comma-separated variant list");
  b->add_option("--time-limit", time_limit, "seconds");
  b->add_option("--k", k, "grid neighborhood exponent (2..5)");
  b->add_option("--radius", radius, "agent disk radius");
  b->add_option("--out", out, "CSV output path (default stdout)");
  b->add_flag("--no-timing", no_timing, "zero out timing columns");

  auto* gr = app.add_subcommand("gen-roadmap", "generate a PRM-lite roadmap");
  gr->add_option("--width", width, "sampling area width");
  gr->add_option("--height", height, "sampling area height");
  gr->add_option("--nodes", nodes, "number of sampled nodes");
  gr->add_option("--connect-radius", connect_radius, "edge connection radius");
  gr->add_option("--seed", seed, "rng seed");
  gr->add_option("--map", map_path, "optional grid map for obstacles");
  gr->add_option("--radius", radius, "agent radius for clearance");
  gr->add_option("--out", out, "roadmap output path (default stdout)");

  auto* r = app.add_subcommand("render", "render a solution to SVG");
  r->add_option("--solution", solution_path, "solution file")->required();
  r->add_option("--map", map_path, "MovingAI .map file");
  r->add_option("--roadmap", roadmap_path, "roadmap file");
  r->add_option("--k", k, "grid neighborhood exponent");
  r->add_option("--radius", radius, "agent disk radius");
  r->add_option("--out", out, "SVG output path")->required();

  auto* rt = app.add_subcommand("ratio", "median expansion ratios of two CSVs");
  rt->add_option("csv_a", csv_a, "baseline bench CSV")->required();
  rt->add_option("csv_b", csv_b, "comparison bench CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (s->parsed())
      return cmd_solve(map_path, roadmap_path, scen_path, task_path, agents,
                       variant, time_limit, k, radius, out);
    if (b->parsed())
      return cmd_bench(map_path, scens, variants, time_limit, k, radius, out,
                       no_timing);
    if (gr->parsed())
      return cmd_gen_roadmap(width, height, nodes, connect_radius, seed,
                             map_path, radius, out);
    if (r->parsed())
      return cmd_render(solution_path, map_path, roadmap_path, k, radius, out);
    if (rt->parsed()) return cmd_ratio(csv_a, csv_b);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return EXIT_ERROR;
  }
  return EXIT_ERROR;
}
