/*
 * solution files, bench CSV records and SVG trajectory rendering
 */
#pragma once

#include <string>

#include "ccbs/ccbs.hpp"

namespace ccbs {

// Solution file: per agent a line `agent k`, then one line per action:
// `action start duration from to` (action = move|wait).
std::string serialize_solution(const std::vector<Plan>& plans);
std::vector<Plan> parse_solution(const std::string& text);

struct BenchRecord {
  std::string map_id;
  std::string scen_id;
  std::string variant;
  int n = 0;
  bool solved = false;
  double soc = 0;  // meaningful only when solved
  uint64_t expansions = 0;
  double runtime = 0;
  double precompute = 0;
};

std::string csv_header();
std::string csv_line(const BenchRecord& r);
std::vector<BenchRecord> parse_csv(const std::string& text);

// Static SVG: graph, start/goal markers, one trajectory polyline per agent
// and a disk-radius legend.
std::string render_svg(const Graph& g, const std::vector<Plan>& plans,
                       double radius);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace ccbs
