#include "cheeger/serialize.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cheeger::io {

std::vector<std::pair<int, int>> run_lengths(std::vector<int> cells) {
  std::sort(cells.begin(), cells.end());
  std::vector<std::pair<int, int>> runs;
  for (int c : cells) {
    if (!runs.empty() && runs.back().first + runs.back().second == c) ++runs.back().second;
    else runs.emplace_back(c, 1);
  }
  return runs;
}

std::vector<int> from_run_lengths(const std::vector<std::pair<int, int>>& runs) {
  std::vector<int> cells;
  for (const auto& [start, len] : runs)
    for (int i = 0; i < len; ++i) cells.push_back(start + i);
  return cells;
}

namespace {

json runs_json(const std::vector<int>& cells) {
  json out = json::array();
  for (const auto& [start, len] : run_lengths(cells)) out.push_back({start, len});
  return out;
}

json shape_json(const Shape& shape) {
  json out;
  out["name"] = shape_name(shape);
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, shapes::Disc>) {
          out["radius"] = s.radius;
        } else if constexpr (std::is_same_v<T, shapes::Polygon>) {
          json v = json::array();
          for (const auto& p : s.vertices) v.push_back({p.x, p.y});
          out["vertices"] = v;
        } else {
          out["R"] = s.R;
        }
      },
      shape);
  return out;
}

}  // namespace

json to_json(const GridDomain& domain) {
  return {{"shape", shape_json(domain.shape())},
          {"resolution", domain.resolution()},
          {"width", domain.width()},
          {"height", domain.height()},
          {"cell", domain.cell()},
          {"origin", {domain.origin().x, domain.origin().y}},
          {"stencil", to_string(domain.stencil().kind())},
          {"cell_count", domain.cell_count()},
          {"mask_runs", runs_json(domain.cells())}};
}

json to_json(const CellSet& set) {
  return {{"size", set.size()},
          {"area", set.area},
          {"perimeter", set.perimeter},
          {"ratio", set.empty() ? 0.0 : set.ratio()},
          {"cell_runs", runs_json(set.cells)}};
}

json to_json(const CheegerResult& result) {
  return {{"h", result.h},
          {"iterations", result.iterations},
          {"certificate", result.certificate},
          {"raw_disconnected", result.raw_disconnected},
          {"lambdas", result.lambdas},
          {"set", to_json(result.set)}};
}

json to_json(const KTupleState& state) {
  json parts = json::array();
  for (const auto& p : state.parts) parts.push_back(to_json(p));
  json history = json::array();
  for (const auto& s : state.history)
    history.push_back({{"step", s.step},
                       {"replaced_index", s.replaced_index},
                       {"old_ratio", s.old_ratio},
                       {"new_ratio", s.new_ratio},
                       {"objective", s.objective},
                       {"reason", s.reason}});
  return {{"k", state.k()},
          {"objective", to_string(state.objective)},
          {"value", state.value},
          {"ratios", state.ratios},
          {"adjustment_level", state.adjustment_level},
          {"exact", state.exact},
          {"parts", parts},
          {"history", history}};
}

json to_json(const AdjustmentReport& report) {
  json checks = json::array();
  for (const auto& c : report.checks)
    checks.push_back({{"indices", c.indices},
                      {"level", c.level},
                      {"residual_value", c.residual_value},
                      {"max_ratio", c.max_ratio},
                      {"margin", c.margin},
                      {"exact", c.exact},
                      {"pass", c.pass}});
  return {{"level", report.level},
          {"pass", report.pass},
          {"worst_margin", report.worst_margin},
          {"exact", report.exact},
          {"checks", checks}};
}

json to_json(const closed_form::ClosedFormCheeger& value) {
  return {{"kind", std::string(closed_form::to_string(value.kind))}, {"r0", value.r0}, {"h", value.h}};
}

json to_json(const closed_form::RingBoundsReport& report) {
  auto check = [](const closed_form::InequalityCheck& c) {
    return json{{"name", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"holds", c.holds}, {"margin", c.margin()}};
  };
  return {{"R", report.R}, {"ring_contr0", check(report.contr0)}, {"ring_contr1", check(report.contr1)}};
}

json to_json(const InequalityRow& row) {
  return {{"p", row.p},     {"lambda", row.lambda}, {"h1", row.h1},
          {"bound", row.bound}, {"slack", row.slack}, {"holds", row.holds}};
}

json to_json(const LimitScan& scan) {
  json rows = json::array();
  for (const auto& r : scan.rows) rows.push_back({{"p", r.p}, {"value", r.value}, {"lambdas", r.lambdas}});
  json parts = json::array();
  for (const auto& p : scan.last.parts) parts.push_back(to_json(p));
  return {{"rows", rows},
          {"extrapolated", scan.extrapolated},
          {"monotone", scan.monotone},
          {"final_partition", parts},
          {"log", scan.last.log}};
}

std::string history_csv(const KTupleState& state) {
  std::ostringstream out;
  out.precision(17);
  out << "step,replaced_index,old_ratio,new_ratio,objective,reason\n";
  for (const auto& s : state.history)
    out << s.step << ',' << s.replaced_index << ',' << s.old_ratio << ',' << s.new_ratio << ','
        << s.objective << ',' << s.reason << '\n';
  return out.str();
}

std::string limit_scan_csv(const LimitScan& scan) {
  std::ostringstream out;
  out.precision(17);
  std::size_t k = 0;
  for (const auto& r : scan.rows) k = std::max(k, r.lambdas.size());
  out << "p,value";
  for (std::size_t i = 0; i < k; ++i) out << ",lambda_" << i + 1;
  out << '\n';
  for (const auto& r : scan.rows) {
    out << r.p << ',' << r.value;
    for (double l : r.lambdas) out << ',' << l;
    out << '\n';
  }
  return out.str();
}

namespace {

// Row runs of a cell list as an SVG path of rectangles (y up -> y down).
std::string cells_path(const GridDomain& domain, const std::vector<int>& cells) {
  std::ostringstream d;
  for (const auto& [start, len] : run_lengths(cells)) {
    // Runs can wrap across rows; split them.
    int c = start;
    int left = len;
    while (left > 0) {
      const int x = domain.x_of(c);
      const int n = std::min(left, domain.width() - x);
      const int top = domain.height() - 1 - domain.y_of(c);
      d << 'M' << x << ' ' << top << 'h' << n << "v1h" << -n << 'z';
      c += n;
      left -= n;
    }
  }
  return d.str();
}

}  // namespace

std::string render_svg(const GridDomain& domain, const std::vector<CellSet>& sets) {
  static constexpr std::array<const char*, 8> kColors{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                      "#9467bd", "#8c564b", "#e377c2", "#17becf"};
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << domain.width() << ' '
      << domain.height() << "\" width=\"" << 4 * domain.width() << "\" height=\"" << 4 * domain.height()
      << "\" shape-rendering=\"crispEdges\">\n";
  out << "<path fill=\"#dddddd\" d=\"" << cells_path(domain, domain.cells()) << "\"/>\n";
  for (std::size_t i = 0; i < sets.size(); ++i)
    out << "<path fill=\"" << kColors[i % kColors.size()] << "\" fill-opacity=\"0.85\" d=\""
        << cells_path(domain, sets[i].cells) << "\"/>\n";
  out << "</svg>\n";
  return out.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("io: cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw std::runtime_error("io: failed writing '" + path + "'");
}

std::string dump(const json& value) { return value.dump(2) + "\n"; }

}  // namespace cheeger::io
