#include "ccbs/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <stdexcept>

namespace ccbs {

Instance make_instance(const BenchTask& task, int n, double radius) {
  Instance inst;
  inst.graph = task.graph;
  for (int i = 0; i < n; ++i) {
    inst.starts.push_back(task.pairs[i].first);
    inst.goals.push_back(task.pairs[i].second);
    inst.radii.push_back(radius);
  }
  return inst;
}

std::vector<BenchRecord> run_bench(const std::vector<BenchTask>& tasks,
                                   const BenchOptions& opt) {
  std::vector<BenchRecord> records;
  for (const BenchTask& task : tasks) {
    for (const std::string& variant : opt.variants) {
      SolverConfig cfg = variant_config(variant);
      cfg.time_limit = opt.time_limit;
      for (int n = 2; n <= static_cast<int>(task.pairs.size()); ++n) {
        BenchRecord rec;
        rec.map_id = task.map_id;
        rec.scen_id = task.scen_id;
        rec.variant = variant;
        rec.n = n;
        bool stop = false;
        try {
          const Instance inst = make_instance(task, n, opt.radius);
          const SolveResult res = solve(inst, cfg);
          rec.solved = res.status == SolveStatus::Solved;
          rec.soc = res.soc;
          rec.expansions = res.expanded;
          rec.runtime = opt.zero_timing ? 0.0 : res.runtime;
          rec.precompute = opt.zero_timing ? 0.0 : res.precompute;
          stop = !rec.solved;
        } catch (const std::exception&) {
          rec.solved = false;  // malformed instance (e.g. repeated scen cells)
          stop = true;
        }
        records.push_back(rec);
        if (stop) break;
      }
    }
  }
  return records;
}

std::vector<RatioRow> expansion_ratio(const std::vector<BenchRecord>& a,
                                      const std::vector<BenchRecord>& b) {
  using Key = std::tuple<std::string, std::string, int>;  // map, scen, n
  std::map<Key, const BenchRecord*> index_a;
  for (const BenchRecord& r : a)
    if (r.solved) index_a[{r.map_id, r.scen_id, r.n}] = &r;

  std::map<std::pair<std::string, int>, std::vector<double>> ratios;
  for (const BenchRecord& r : b) {
    if (!r.solved) continue;
    const auto it = index_a.find({r.map_id, r.scen_id, r.n});
    if (it == index_a.end()) continue;
    if (it->second->expansions == 0) continue;
    ratios[{r.map_id, r.n}].push_back(static_cast<double>(r.expansions) /
                                      static_cast<double>(it->second->expansions));
  }

  std::vector<RatioRow> rows;
  for (auto& [key, vals] : ratios) {
    std::sort(vals.begin(), vals.end());
    const size_t m = vals.size();
    const double median =
        m % 2 ? vals[m / 2] : 0.5 * (vals[m / 2 - 1] + vals[m / 2]);
    rows.push_back({key.first, key.second, 100.0 * median,
                    static_cast<int>(m)});
  }
  return rows;
}

std::string ratio_table(const std::vector<RatioRow>& rows) {
  std::string out = "map,n,median_ratio_percent,common\n";
  char buf[256];
  for (const RatioRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%d,%.2f,%d\n", r.map_id.c_str(), r.n,
                  r.median_percent, r.common);
    out += buf;
  }
  return out;
}

std::string generate_scen(const GridMap& map, int n_pairs, uint64_t seed) {
  std::vector<std::pair<int, int>> free_cells;
  for (int y = 0; y < map.height; ++y)
    for (int x = 0; x < map.width; ++x)
      if (!map.is_blocked(x, y)) free_cells.emplace_back(x, y);
  if (static_cast<int>(free_cells.size()) < n_pairs)
    throw std::runtime_error("not enough passable cells for the scenario");

  std::mt19937_64 rng(seed);
  auto draw_unique = [&](int count) {
    std::vector<std::pair<int, int>> cells = free_cells;
    for (int i = 0; i < count; ++i) {
      std::uniform_int_distribution<size_t> pick(i, cells.size() - 1);
      std::swap(cells[i], cells[pick(rng)]);
    }
    cells.resize(count);
    return cells;
  };
  const auto starts = draw_unique(n_pairs);
  const auto goals = draw_unique(n_pairs);

  std::string out = "version 1\n";
  char buf[256];
  for (int i = 0; i < n_pairs; ++i) {
    const double opt = std::hypot(starts[i].first - goals[i].first,
                                  starts[i].second - goals[i].second);
    std::snprintf(buf, sizeof(buf), "%d\tgrid\t%d\t%d\t%d\t%d\t%d\t%d\t%.8f\n",
                  i, map.width, map.height, starts[i].first, starts[i].second,
                  goals[i].first, goals[i].second, opt);
    out += buf;
  }
  return out;
}

}  // namespace ccbs
