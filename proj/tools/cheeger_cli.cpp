#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "cheeger/adjusted_tuples.h"
#include "cheeger/cheeger_solver.h"
#include "cheeger/closed_form.h"
#include "cheeger/grid.h"
#include "cheeger/plap_spectrum.h"
#include "cheeger/serialize.h"

using namespace cheeger;
using io::json;

namespace {

struct RunConfig {
  std::string shape = "annulus";
  double R = 0.5;
  double radius = 1.0;
  int resolution = 64;
  std::string stencil = "sixteen";
  int k = 2;
  int n = 1;
  std::string objective = "max";
  std::string mode = "automatic";
  std::string start = "heuristic";
  std::vector<double> ps{2.0, 1.5, 1.2, 1.1, 1.05};
  int restarts = 8;
  std::uint64_t seed = 0;
  double tol = 1e-6;
  bool h2 = false;
  std::string out;
  std::string svg;
  std::string csv;
};

// Raised for invariant violations: output is still written, exit status 2.
struct Violation {
  std::string what;
};

Shape make_shape(const RunConfig& c) {
  if (c.shape == "disc") return shapes::Disc{c.radius};
  if (c.shape == "annulus") return shapes::Annulus{c.R};
  if (c.shape == "half_ring" || c.shape == "half-ring") return shapes::HalfRing{c.R};
  if (c.shape == "square") return unit_square();
  throw CLI::ValidationError("--shape", "expected disc, annulus, half_ring or square");
}

GridDomain make_domain(const RunConfig& c) {
  return rasterize(make_shape(c), c.resolution, stencil_kind_from_string(c.stencil));
}

// Closed-form reference for h_k of the shape, when one is known.
std::optional<double> reference(const RunConfig& c, int k) {
  if (c.shape == "disc" && k == 1) return closed_form::h1_disc(c.radius).h;
  if (c.shape == "disc" && k == 2 && c.radius == 1.0) return closed_form::h2_disc().h;
  if (c.shape == "annulus" && k == 1) return closed_form::h1_annulus(c.R);
  if (c.shape == "annulus" && k == 2) return closed_form::h2_annulus(c.R).h;
  if (c.shape == "square" && k == 1) return closed_form::unit_square_cheeger_convex();
  return std::nullopt;
}

json config_json(const std::string& command, const RunConfig& c) {
  json j{{"command", command}, {"seed", c.seed}, {"tol", c.tol}};
  if (command == "annulus" || command == "verify-bounds") {
    j["R"] = c.R;
    return j;
  }
  if (command == "disc") {
    j["radius"] = c.radius;
    j["h2"] = c.h2;
    return j;
  }
  j["shape"] = c.shape;
  if (c.shape == "annulus" || c.shape == "half_ring") j["R"] = c.R;
  if (c.shape == "disc") j["radius"] = c.radius;
  j["resolution"] = c.resolution;
  j["stencil"] = c.stencil;
  if (command != "grid-cheeger") j["k"] = c.k;
  if (command == "grid-hk" || command == "adjust") {
    j["objective"] = c.objective;
    j["restarts"] = c.restarts;
  }
  if (command == "adjust") {
    j["n"] = c.n;
    j["mode"] = c.mode;
    j["start"] = c.start;
  }
  if (command == "plap-limit") {
    j["p"] = c.ps;
    j["restarts"] = c.restarts;
  }
  return j;
}

json run_annulus(const RunConfig& c, std::string& summary) {
  const auto h2 = closed_form::h2_annulus(c.R);
  const auto bounds = closed_form::verify_ring_bounds(c.R);
  const double stationarity = std::abs(h2.h - 1.0 / h2.r0) / h2.h;
  json r{{"R", c.R},
         {"r0", h2.r0},
         {"h2", h2.h},
         {"h1_ring", closed_form::h1_annulus(c.R)},
         {"stationarity_residual", stationarity},
         {"local_minima", closed_form::count_local_minima(c.R, 20001)},
         {"checks", io::to_json(bounds)}};
  summary = "h2 = " + std::to_string(h2.h) + ", r0 = " + std::to_string(h2.r0);
  if (!bounds.all_hold()) throw Violation{"ring inequalities fail"};
  return r;
}

json run_disc(const RunConfig& c, std::string& summary) {
  json r{{"radius", c.radius}, {"h1_disc", closed_form::h1_disc(c.radius).h}};
  summary = "h1 = " + std::to_string(closed_form::h1_disc(c.radius).h);
  if (c.h2) {
    const auto h2 = closed_form::h2_disc();
    const double oracle = closed_form::half_disc_cheeger_convex();
    r["h2_disc"] = h2.h;
    r["r0"] = h2.r0;
    r["oracle"] = {{"method", "convex inner-parallel set"}, {"value", oracle}};
    r["agreement"] = std::abs(h2.h - oracle) / oracle;
    summary += ", h2 = " + std::to_string(h2.h);
  }
  return r;
}

json with_reference(json r, const RunConfig& c, int k, double value) {
  if (const auto ref = reference(c, k)) {
    r["reference"] = *ref;
    r["relative_error"] = (value - *ref) / *ref;
  }
  return r;
}

json run_grid_cheeger(const RunConfig& c, std::string& summary, std::vector<CellSet>& drawn) {
  const GridDomain dom = make_domain(c);
  const CheegerResult res = cheeger::cheeger(dom, dom.mask());
  drawn = {res.set};
  summary = "h = " + std::to_string(res.h);
  return with_reference({{"domain", io::to_json(dom)}, {"cheeger", io::to_json(res)}}, c, 1, res.h);
}

HeuristicOptions heuristic_options(const RunConfig& c) {
  HeuristicOptions h;
  h.restarts = c.restarts;
  h.seed = c.seed;
  h.tol = c.tol;
  return h;
}

json run_grid_hk(const RunConfig& c, std::string& summary, std::vector<CellSet>& drawn) {
  const GridDomain dom = make_domain(c);
  const Objective obj = objective_from_string(c.objective);
  const HeuristicRun run = hk_heuristic_runs(dom, dom.mask(), c.k, obj, heuristic_options(c));
  drawn = run.best.parts;
  summary = "h_" + std::to_string(c.k) + " <= " + std::to_string(run.best.value);
  json r{{"domain", io::to_json(dom)}, {"state", io::to_json(run.best)}, {"restart_values", run.restart_values}};
  return obj == Objective::max ? with_reference(r, c, c.k, run.best.value) : r;
}

json run_adjust(const RunConfig& c, std::string& summary, std::vector<CellSet>& drawn, std::string& csv) {
  const GridDomain dom = make_domain(c);
  if (c.n < 1 || c.n > c.k) throw CLI::ValidationError("--n", "must satisfy 1 <= n <= k");
  AdjustOptions opt;
  opt.tol = c.tol;
  opt.mode = oracle_mode_from_string(c.mode);
  opt.restarts = c.restarts;
  opt.seed = c.seed;
  KTupleState start;
  if (c.start == "heuristic") {
    start = hk_heuristic(dom, dom.mask(), c.k, Objective::max, heuristic_options(c));
    start.history.clear();
    start.adjustment_level = 0;
  } else if (c.start == "greedy") {
    std::vector<CellSet> parts;
    Membership free = dom.mask();
    for (int i = 0; i < c.k; ++i) {
      const auto res = cheeger::cheeger(dom, free);
      for (int cell : res.set.cells) free[static_cast<std::size_t>(cell)] = 0;
      parts.push_back(res.set);
    }
    start = make_state(std::move(parts));
  } else {
    throw CLI::ValidationError("--start", "expected heuristic or greedy");
  }
  const KTupleState out = adjust_n(dom, start, c.n, opt);
  const AdjustmentReport report = verify_adjustment(dom, out, c.n, opt);
  drawn = out.parts;
  csv = io::history_csv(out);
  summary = "value = " + std::to_string(out.value) + ", level " + std::to_string(out.adjustment_level) +
            (report.pass ? " verified" : " NOT verified") + (report.exact ? " (exact)" : " (heuristic oracles)");
  json r = with_reference({{"domain", io::to_json(dom)},
                           {"start_value", start.value},
                           {"state", io::to_json(out)},
                           {"verification", io::to_json(report)}},
                          c, c.k, out.value);
  if (!report.pass) throw Violation{"adjusted tuple fails verification"};
  return r;
}

json run_plap(const RunConfig& c, std::string& summary, std::vector<CellSet>& drawn, std::string& csv) {
  const GridDomain dom = make_domain(c);
  const LimitScan scan = limit_scan({}, dom, c.k, c.ps, c.restarts, c.seed);
  drawn = scan.last.parts;
  csv = io::limit_scan_csv(scan);
  summary = "L_" + std::to_string(c.k) + "(p -> 1) ~ " + std::to_string(scan.extrapolated);
  return with_reference({{"domain", io::to_json(dom)}, {"scan", io::to_json(scan)}}, c, c.k, scan.extrapolated);
}

json run_verify_bounds(std::string& summary) {
  json rows = json::array();
  bool all = true;
  for (int i = 1; i <= 99; ++i) {
    const auto b = closed_form::verify_ring_bounds(i / 100.0);
    all = all && b.all_hold();
    rows.push_back(io::to_json(b));
  }
  json stationarity = json::array();
  for (double R : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const auto m = closed_form::minimize_F(R);
    const double resid = std::abs(m.h - 1.0 / m.r0) / m.h;
    const bool interior = m.r0 > 0.0 && m.r0 < 0.5 * (1.0 - R);
    all = all && interior && resid <= 1e-8;
    stationarity.push_back({{"R", R}, {"r0", m.r0}, {"h", m.h}, {"residual", resid}, {"interior", interior}});
  }
  summary = all ? "all bounds hold" : "some bounds FAIL";
  json r{{"ring_bounds", rows}, {"stationarity", stationarity}, {"all_hold", all}};
  if (!all) throw Violation{"closed-form bounds fail"};
  return r;
}

void add_grid_options(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--shape", c.shape, "disc, annulus, half_ring or square")->capture_default_str();
  cmd->add_option("--R", c.R, "inner radius")->capture_default_str();
  cmd->add_option("--radius", c.radius, "disc radius")->capture_default_str();
  cmd->add_option("--resolution", c.resolution, "cells per unit length")->capture_default_str();
  cmd->add_option("--stencil", c.stencil, "four or sixteen")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cheeger constants of planar domains"};
  app.set_config("--config", "", "key = value file; flags override it");
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig c;
  app.add_option("--seed", c.seed, "random seed")->capture_default_str();
  app.add_option("--tol", c.tol, "relative tolerance")->capture_default_str();
  app.add_option("--out", c.out, "JSON output file (default: stdout)");
  app.add_option("--svg", c.svg, "SVG rendering of the computed sets");
  app.add_option("--csv", c.csv, "CSV table (history or p-scan)");

  auto* annulus = app.add_subcommand("annulus", "closed-form h2 of the ring B1 \\ B_R");
  annulus->add_option("--R", c.R, "inner radius")->capture_default_str();
  auto* disc = app.add_subcommand("disc", "closed-form Cheeger constants of a disc");
  disc->add_option("--radius", c.radius, "radius")->capture_default_str();
  disc->add_flag("--h2", c.h2, "also compute h2 of the unit disc");
  auto* grid_cheeger = app.add_subcommand("grid-cheeger", "exact grid Cheeger set");
  add_grid_options(grid_cheeger, c);
  auto* grid_hk = app.add_subcommand("grid-hk", "multistart search for h_k on the grid");
  add_grid_options(grid_hk, c);
  grid_hk->add_option("--k", c.k)->capture_default_str();
  grid_hk->add_option("--objective", c.objective, "max or sum")->capture_default_str();
  grid_hk->add_option("--restarts", c.restarts)->capture_default_str();
  auto* adjust = app.add_subcommand("adjust", "n-adjusted Cheeger k-tuple");
  add_grid_options(adjust, c);
  adjust->add_option("--k", c.k)->capture_default_str();
  adjust->add_option("--n", c.n, "adjustment level")->capture_default_str();
  adjust->add_option("--mode", c.mode, "oracle mode: exact, heuristic or automatic")->capture_default_str();
  adjust->add_option("--start", c.start, "starting tuple: heuristic or greedy")->capture_default_str();
  adjust->add_option("--restarts", c.restarts)->capture_default_str();
  auto* plap = app.add_subcommand("plap-limit", "p-Laplacian spectral partitions as p -> 1");
  add_grid_options(plap, c);
  plap->add_option("--k", c.k)->capture_default_str();
  plap->add_option("--p", c.ps, "decreasing exponents in (1, 3]")->delimiter(',');
  plap->add_option("--restarts", c.restarts)->capture_default_str();
  app.add_subcommand("verify-bounds", "closed-form inequality and stationarity checks");

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  const auto t0 = std::chrono::steady_clock::now();
  std::string summary;
  std::string csv;
  std::vector<CellSet> drawn;
  std::optional<GridDomain> domain;
  int status = 0;
  json result;
  try {
    try {
      if (command == "annulus") result = run_annulus(c, summary);
      else if (command == "disc") result = run_disc(c, summary);
      else if (command == "grid-cheeger") result = run_grid_cheeger(c, summary, drawn);
      else if (command == "grid-hk") result = run_grid_hk(c, summary, drawn);
      else if (command == "adjust") result = run_adjust(c, summary, drawn, csv);
      else if (command == "plap-limit") result = run_plap(c, summary, drawn, csv);
      else result = run_verify_bounds(summary);
    } catch (const Violation& v) {
      std::cerr << "invariant violation: " << v.what << '\n';
      status = 2;
    }
    if (result.is_null()) return status;
    const json doc{{"schema_version", io::kSchemaVersion},
                   {"command", command},
                   {"config", config_json(command, c)},
                   {"result", result}};
    if (c.out.empty()) std::cout << io::dump(doc);
    else io::write_file(c.out, io::dump(doc));
    if (!c.svg.empty()) {
      if (command == "annulus" || command == "disc" || command == "verify-bounds")
        throw CLI::ValidationError("--svg", "no grid sets to draw for this command");
      io::write_file(c.svg, io::render_svg(make_domain(c), drawn));
    }
    if (!c.csv.empty()) io::write_file(c.csv, csv);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << command << ": " << e.what() << '\n';
    return 1;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cerr << command << ": " << summary << " [" << secs << " s]\n";
  return status;
}
