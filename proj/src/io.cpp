#include "ccbs/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ccbs {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::string serialize_solution(const std::vector<Plan>& plans) {
  std::string out;
  char buf[256];
  for (const Plan& p : plans) {
    std::snprintf(buf, sizeof(buf), "agent %d\n", p.agent);
    out += buf;
    if (p.actions.empty()) {
      // start = goal: record the vertex through a zero-length stay marker
      std::snprintf(buf, sizeof(buf), "at %d\n", p.start_vertex);
      out += buf;
    }
    for (const TimedAction& ta : p.actions) {
      std::snprintf(buf, sizeof(buf), "%s %.17g %.17g %d %d\n",
                    ta.action.is_move() ? "move" : "wait", ta.start,
                    ta.action.duration, ta.action.from, ta.action.to);
      out += buf;
    }
  }
  return out;
}

std::vector<Plan> parse_solution(const std::string& text) {
  std::vector<Plan> plans;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  Plan* cur = nullptr;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag == "agent") {
      int id;
      if (!(ss >> id))
        throw std::runtime_error("bad agent line " + std::to_string(lineno));
      plans.emplace_back();
      cur = &plans.back();
      cur->agent = id;
      cur->start_vertex = cur->goal_vertex = -1;
    } else if (tag == "at") {
      int v;
      if (!cur || !(ss >> v))
        throw std::runtime_error("bad at line " + std::to_string(lineno));
      cur->start_vertex = cur->goal_vertex = v;
    } else if (tag == "move" || tag == "wait") {
      double start, duration;
      int from, to;
      if (!cur || !(ss >> start >> duration >> from >> to))
        throw std::runtime_error("bad action line " + std::to_string(lineno));
      const Action a = tag == "move" ? Action::move(from, to, duration)
                                     : Action::wait(from, duration);
      if (cur->actions.empty()) cur->start_vertex = from;
      cur->actions.push_back({a, start});
      cur->goal_vertex = to;
      cur->cost = start + duration;
    } else {
      throw std::runtime_error("unknown record at line " + std::to_string(lineno));
    }
  }
  return plans;
}

std::string csv_header() {
  return "map,scen,variant,n,solved,soc,expansions,runtime,precompute";
}

std::string csv_line(const BenchRecord& r) {
  char buf[512];
  if (r.solved)
    std::snprintf(buf, sizeof(buf), "%s,%s,%s,%d,1,%.6f,%llu,%.3f,%.3f",
                  r.map_id.c_str(), r.scen_id.c_str(), r.variant.c_str(), r.n,
                  r.soc, static_cast<unsigned long long>(r.expansions),
                  r.runtime, r.precompute);
  else
    std::snprintf(buf, sizeof(buf), "%s,%s,%s,%d,0,,%llu,%.3f,%.3f",
                  r.map_id.c_str(), r.scen_id.c_str(), r.variant.c_str(), r.n,
                  static_cast<unsigned long long>(r.expansions), r.runtime,
                  r.precompute);
  return buf;
}

std::vector<BenchRecord> parse_csv(const std::string& text) {
  std::vector<BenchRecord> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (lineno == 1 && line.rfind("map,", 0) == 0) continue;  // header
    std::vector<std::string> f;
    std::string cur;
    for (char c : line) {
      if (c == ',') {
        f.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    f.push_back(cur);
    if (f.size() != 9)
      throw std::runtime_error("csv line " + std::to_string(lineno) +
                               " needs 9 fields");
    BenchRecord r;
    r.map_id = f[0];
    r.scen_id = f[1];
    r.variant = f[2];
    r.n = std::stoi(f[3]);
    r.solved = f[4] == "1";
    r.soc = f[5].empty() ? 0.0 : std::stod(f[5]);
    r.expansions = std::stoull(f[6]);
    r.runtime = std::stod(f[7]);
    r.precompute = std::stod(f[8]);
    out.push_back(std::move(r));
  }
  return out;
}

namespace {

const char* kPalette[] = {"#d62728", "#1f77b4", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#e377c2", "#17becf"};

}  // namespace

std::string render_svg(const Graph& g, const std::vector<Plan>& plans,
                       double radius) {
  double min_x = 0, min_y = 0, max_x = 1, max_y = 1;
  for (int v = 0; v < g.size(); ++v) {
    min_x = std::min(min_x, g.pos(v).x);
    min_y = std::min(min_y, g.pos(v).y);
    max_x = std::max(max_x, g.pos(v).x);
    max_y = std::max(max_y, g.pos(v).y);
  }
  const double scale = 40.0, pad = 1.5;
  auto X = [&](double x) { return (x - min_x + pad) * scale; };
  auto Y = [&](double y) { return (y - min_y + pad) * scale; };

  char buf[512];
  std::string svg;
  std::snprintf(buf, sizeof(buf),
                "<svg xmlns='http://www.w3.org/2000/svg' width='%.0f' "
                "height='%.0f'>\n<rect width='100%%' height='100%%' "
                "fill='white'/>\n",
                X(max_x) + pad * scale, Y(max_y) + pad * scale);
  svg += buf;

  for (int u = 0; u < g.size(); ++u)
    for (const Edge& e : g.neighbors(u))
      if (u < e.to) {
        std::snprintf(buf, sizeof(buf),
                      "<line x1='%.1f' y1='%.1f' x2='%.1f' y2='%.1f' "
                      "stroke='#dddddd' stroke-width='1'/>\n",
                      X(g.pos(u).x), Y(g.pos(u).y), X(g.pos(e.to).x),
                      Y(g.pos(e.to).y));
        svg += buf;
      }
  for (int v = 0; v < g.size(); ++v) {
    std::snprintf(buf, sizeof(buf),
                  "<circle cx='%.1f' cy='%.1f' r='1.5' fill='#bbbbbb'/>\n",
                  X(g.pos(v).x), Y(g.pos(v).y));
    svg += buf;
  }

  for (size_t a = 0; a < plans.size(); ++a) {
    const Plan& p = plans[a];
    const char* color = kPalette[a % (sizeof(kPalette) / sizeof(kPalette[0]))];
    auto check = [&](int v) {
      if (v < 0 || v >= g.size())
        throw std::runtime_error("plan references unknown vertex " +
                                 std::to_string(v));
    };
    check(p.start_vertex);
    check(p.goal_vertex);
    std::string pts;
    auto add_pt = [&](int v) {
      std::snprintf(buf, sizeof(buf), "%.1f,%.1f ", X(g.pos(v).x), Y(g.pos(v).y));
      pts += buf;
    };
    add_pt(p.start_vertex);
    for (const TimedAction& ta : p.actions) {
      check(ta.action.to);
      if (ta.action.is_move()) add_pt(ta.action.to);
    }
    std::snprintf(buf, sizeof(buf),
                  "<polyline points='%s' fill='none' stroke='%s' "
                  "stroke-width='2' opacity='0.8'/>\n",
                  pts.c_str(), color);
    svg += buf;
    std::snprintf(buf, sizeof(buf),
                  "<circle cx='%.1f' cy='%.1f' r='%.1f' fill='%s' "
                  "opacity='0.5'/>\n",
                  X(g.pos(p.start_vertex).x), Y(g.pos(p.start_vertex).y),
                  radius * scale, color);
    svg += buf;
    std::snprintf(buf, sizeof(buf),
                  "<circle cx='%.1f' cy='%.1f' r='%.1f' fill='none' "
                  "stroke='%s' stroke-width='2'/>\n",
                  X(g.pos(p.goal_vertex).x), Y(g.pos(p.goal_vertex).y),
                  radius * scale, color);
    svg += buf;
  }

  std::snprintf(buf, sizeof(buf),
                "<circle cx='%.1f' cy='%.1f' r='%.1f' fill='none' "
                "stroke='black'/><text x='%.1f' y='%.1f' "
                "font-size='12'>agent radius %.4f</text>\n",
                scale, scale * 0.5, radius * scale, scale * 1.8, scale * 0.6,
                radius);
  svg += buf;
  svg += "</svg>\n";
  return svg;
}

}  // namespace ccbs
