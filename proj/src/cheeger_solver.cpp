#include "cheeger/cheeger_solver.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "cheeger/adjusted_tuples.h"
#include "cheeger/max_flow.h"
#include "cheeger/parallel.h"

namespace cheeger {

namespace {

std::vector<int> feasible_cells(const GridDomain& domain, const Membership& feasible) {
  if (feasible.size() != static_cast<std::size_t>(domain.size()))
    throw std::invalid_argument("cheeger_solver: feasible region has the wrong size");
  std::vector<int> cells;
  for (int i = 0; i < domain.size(); ++i) {
    if (!feasible[static_cast<std::size_t>(i)]) continue;
    if (!domain.inside(i))
      throw std::invalid_argument("cheeger_solver: feasible region leaves the domain mask");
    cells.push_back(i);
  }
  return cells;
}

// Pairwise weights and full outward weight of a small feasible set, used by
// the enumeration oracles.
struct SmallGraph {
  std::vector<int> cells;
  std::vector<double> degree;
  std::vector<std::vector<double>> w;
  // perimeter and cell count of every subset mask
  std::vector<double> perimeter;
  std::vector<int> count;
};

SmallGraph small_graph(const GridDomain& domain, const Membership& feasible, int limit,
                       const char* who) {
  SmallGraph g;
  g.cells = feasible_cells(domain, feasible);
  const int n = static_cast<int>(g.cells.size());
  if (n == 0) throw std::invalid_argument(std::string("cheeger_solver: ") + who + ": empty feasible region");
  if (n > limit)
    throw std::invalid_argument(std::string("cheeger_solver: ") + who + ": " + std::to_string(n) +
                                " feasible cells exceed the limit of " + std::to_string(limit));
  std::vector<int> local(static_cast<std::size_t>(domain.size()), -1);
  for (int i = 0; i < n; ++i) local[static_cast<std::size_t>(g.cells[static_cast<std::size_t>(i)])] = i;
  g.degree.assign(static_cast<std::size_t>(n), 0.0);
  g.w.assign(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), 0.0));
  for (int i = 0; i < n; ++i) {
    for (const auto& e : domain.stencil().entries()) {
      const double wt = domain.weight(e);
      g.degree[static_cast<std::size_t>(i)] += wt;
      const int j = domain.neighbor(g.cells[static_cast<std::size_t>(i)], e.dx, e.dy);
      if (j >= 0 && local[static_cast<std::size_t>(j)] >= 0)
        g.w[static_cast<std::size_t>(i)][static_cast<std::size_t>(local[static_cast<std::size_t>(j)])] += wt;
    }
  }
  const std::size_t subsets = std::size_t{1} << n;
  g.perimeter.assign(subsets, 0.0);
  g.count.assign(subsets, 0);
  for (std::size_t mask = 1; mask < subsets; ++mask) {
    const int low = std::countr_zero(mask);
    const std::size_t rest = mask & (mask - 1);
    double shared = 0.0;
    for (std::size_t r = rest; r; r &= r - 1) shared += g.w[static_cast<std::size_t>(low)][static_cast<std::size_t>(std::countr_zero(r))];
    g.perimeter[mask] = g.perimeter[rest] + g.degree[static_cast<std::size_t>(low)] - 2.0 * shared;
    g.count[mask] = g.count[rest] + 1;
  }
  return g;
}

std::vector<int> mask_cells(const SmallGraph& g, std::size_t mask) {
  std::vector<int> out;
  for (std::size_t m = mask; m; m &= m - 1) out.push_back(g.cells[static_cast<std::size_t>(std::countr_zero(m))]);
  return out;
}

// True when the ascending local-index list of a precedes that of b.
bool lex_less(std::size_t a, std::size_t b) {
  while (a && b) {
    const int la = std::countr_zero(a);
    const int lb = std::countr_zero(b);
    if (la != lb) return la < lb;
    a &= a - 1;
    b &= b - 1;
  }
  return !a && b;
}

}  // namespace

ParametricCut parametric_min_cut(const GridDomain& domain, const Membership& feasible,
                                 double lambda) {
  const std::vector<int> cells = feasible_cells(domain, feasible);
  const int n = static_cast<int>(cells.size());
  std::vector<int> local(static_cast<std::size_t>(domain.size()), -1);
  for (int i = 0; i < n; ++i) local[static_cast<std::size_t>(cells[static_cast<std::size_t>(i)])] = i;

  const auto entries = domain.stencil().entries();
  MaxFlow graph(n, n * static_cast<int>(entries.size()) / 2);
  const double unit_area = domain.cell_area();
  for (int li = 0; li < n; ++li) {
    const int i = cells[static_cast<std::size_t>(li)];
    double outward = 0.0;
    for (const auto& e : entries) {
      const double wt = domain.weight(e);
      const int j = domain.neighbor(i, e.dx, e.dy);
      if (j < 0 || !feasible[static_cast<std::size_t>(j)]) {
        outward += wt;
      } else if (j > i) {
        graph.add_edge(li, local[static_cast<std::size_t>(j)], wt, wt);
      }
    }
    const double unary = outward - lambda * unit_area;
    if (unary > 0.0) {
      graph.add_terminal(li, 0.0, unary);
    } else {
      graph.add_terminal(li, -unary, 0.0);
    }
  }
  graph.solve();
  const auto side = graph.source_side_maximal();

  ParametricCut out;
  for (int li = 0; li < n; ++li)
    if (side[static_cast<std::size_t>(li)]) out.cells.push_back(cells[static_cast<std::size_t>(li)]);
  if (!out.cells.empty()) {
    const Membership members = to_membership(domain, out.cells);
    out.value = perimeter_of(domain, members, out.cells) -
                lambda * static_cast<double>(out.cells.size()) * unit_area;
  }
  return out;
}

CheegerResult cheeger(const GridDomain& domain, const Membership& feasible,
                      const CheegerOptions& options) {
  const std::vector<int> cells = feasible_cells(domain, feasible);
  if (cells.empty()) throw std::invalid_argument("cheeger_solver: empty feasible region");

  CellSet current;
  if (options.initial_set && !options.initial_set->empty()) {
    for (int c : options.initial_set->cells)
      if (!feasible[static_cast<std::size_t>(c)])
        throw std::invalid_argument("cheeger_solver: initial set leaves the feasible region");
    current = *options.initial_set;
  } else {
    current = measure(domain, cells);
  }

  CheegerResult result;
  double lambda = current.ratio();
  result.lambdas.push_back(lambda);
  bool converged = false;
  for (int it = 0; it < options.max_iterations; ++it) {
    ParametricCut cut = parametric_min_cut(domain, feasible, lambda);
    ++result.iterations;
    const double threshold = -options.tol * std::max(current.perimeter, 1e-300);
    if (!cut.cells.empty() && cut.value < threshold) {
      CellSet next = measure(domain, std::move(cut.cells));
      const double next_lambda = next.ratio();
      if (!(next_lambda < lambda)) {
        throw std::runtime_error("cheeger_solver: Dinkelbach parameter failed to decrease");
      }
      current = std::move(next);
      lambda = next_lambda;
      result.lambdas.push_back(lambda);
      continue;
    }
    result.certificate = cut.cells.empty() ? 0.0 : cut.value;
    if (!cut.cells.empty()) {
      // The largest minimizer at the final parameter; it has the same ratio.
      CellSet widest = measure(domain, std::move(cut.cells));
      if (widest.ratio() <= lambda * (1.0 + 1e-12)) current = std::move(widest);
    }
    converged = true;
    break;
  }
  if (!converged)
    throw std::runtime_error("cheeger_solver: no convergence after " +
                             std::to_string(options.max_iterations) + " iterations");

  if (options.best_component) {
    auto comps = stencil_components(domain, current.cells);
    if (comps.size() > 1) {
      result.raw_disconnected = true;
      std::size_t best = 0;
      for (std::size_t c = 1; c < comps.size(); ++c) {
        const double rc = comps[c].ratio();
        const double rb = comps[best].ratio();
        if (rc < rb * (1.0 - 1e-12) || (rc <= rb * (1.0 + 1e-12) && comps[c].area > comps[best].area))
          best = c;
      }
      current = std::move(comps[best]);
    }
  }
  result.h = current.ratio();
  result.set = std::move(current);
  return result;
}

CheegerResult cheeger_excluding(const GridDomain& domain, std::span<const int> forbidden,
                                const CheegerOptions& options) {
  Membership feasible = domain.mask();
  for (int c : forbidden) {
    if (c < 0 || c >= domain.size()) throw std::invalid_argument("cheeger_solver: forbidden cell out of range");
    feasible[static_cast<std::size_t>(c)] = 0;
  }
  return cheeger(domain, feasible, options);
}

CheegerResult brute_force_cheeger(const GridDomain& domain, const Membership& feasible) {
  const SmallGraph g = small_graph(domain, feasible, kBruteForceCheegerLimit, "brute_force_cheeger");
  const double unit_area = domain.cell_area();
  std::size_t best = 0;
  double best_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t mask = 1; mask < g.perimeter.size(); ++mask) {
    const double r = g.perimeter[mask] / (g.count[mask] * unit_area);
    if (best == 0 || r < best_ratio * (1.0 - 1e-12)) {
      best = mask;
      best_ratio = r;
    } else if (r <= best_ratio * (1.0 + 1e-12)) {
      if (g.count[mask] > g.count[best] || (g.count[mask] == g.count[best] && lex_less(mask, best))) {
        best = mask;
        best_ratio = std::min(best_ratio, r);
      }
    }
  }
  CheegerResult out;
  out.set = measure(domain, mask_cells(g, best));
  out.h = out.set.ratio();
  return out;
}

KTupleState hk_bruteforce(const GridDomain& domain, const Membership& feasible, int k,
                          Objective objective) {
  if (k < 1 || k > 3) throw std::invalid_argument("cheeger_solver: hk_bruteforce supports 1 <= k <= 3");
  const SmallGraph g = small_graph(domain, feasible, kBruteForceTupleLimit, "hk_bruteforce");
  const int n = static_cast<int>(g.cells.size());
  if (k > n) throw std::invalid_argument("cheeger_solver: k exceeds the number of cells");
  const double unit_area = domain.cell_area();
  const std::size_t full = (std::size_t{1} << n) - 1;
  std::vector<double> ratio(g.perimeter.size(), 0.0);
  for (std::size_t m = 1; m <= full; ++m) ratio[m] = g.perimeter[m] / (g.count[m] * unit_area);

  auto combine = [objective](double acc, double r) {
    return objective == Objective::max ? std::max(acc, r) : acc + r;
  };
  double best_value = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> best_parts;
  std::vector<std::size_t> parts(static_cast<std::size_t>(k), 0);

  // Depth-first over nonempty disjoint submasks; partial values only grow.
  auto recurse = [&](auto&& self, int depth, std::size_t used, double acc) -> void {
    if (acc >= best_value) return;
    if (depth == k) {
      best_value = acc;
      best_parts = parts;
      return;
    }
    const std::size_t free = full & ~used;
    for (std::size_t sub = free; sub; sub = (sub - 1) & free) {
      parts[static_cast<std::size_t>(depth)] = sub;
      self(self, depth + 1, used | sub, combine(acc, ratio[sub]));
    }
  };
  recurse(recurse, 0, 0, objective == Objective::max ? 0.0 : 0.0);

  std::vector<CellSet> sets;
  for (std::size_t m : best_parts) sets.push_back(measure(domain, mask_cells(g, m)));
  std::sort(sets.begin(), sets.end(),
            [](const CellSet& a, const CellSet& b) { return a.cells.front() < b.cells.front(); });
  KTupleState state = make_state(std::move(sets), objective);
  return state;
}

namespace {

// Seed tuple for one restart. Restart 0 is plain sequential extraction.
// Odd restarts confine each extraction but the last to a random half-plane
// holding a share of the remaining cells; even restarts extract one Cheeger
// set from each cell of a random Voronoi partition.
std::optional<KTupleState> seed_tuple(const GridDomain& domain, const Membership& feasible, int k,
                                      Objective objective, std::uint64_t seed, int restart) {
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(restart));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<CellSet> parts;
  if (restart > 0 && restart % 2 == 0 && k > 1) {
    const std::vector<int> cells = cells_of(feasible);
    for (const Membership& region : voronoi_regions(domain, cells, k, rng)) {
      if (std::find(region.begin(), region.end(), std::uint8_t{1}) == region.end()) return std::nullopt;
      parts.push_back(cheeger(domain, region).set);
    }
    return make_state(std::move(parts), objective);
  }
  Membership residual = feasible;
  for (int j = 0; j < k; ++j) {
    std::vector<int> cells = cells_of(residual);
    if (cells.empty()) return std::nullopt;
    Membership allowed = residual;
    if (restart > 0 && j < k - 1) {
      const double angle = 2.0 * std::numbers::pi * unit(rng);
      const double remaining = k - j;
      double share = restart == 1 ? 1.0 / remaining : (0.5 + unit(rng)) / remaining;
      share = std::clamp(share, 0.05, 0.95);
      std::vector<std::pair<double, int>> proj;
      proj.reserve(cells.size());
      for (int c : cells) {
        const Point p = domain.center(c);
        proj.emplace_back(p.x * std::cos(angle) + p.y * std::sin(angle), c);
      }
      std::sort(proj.begin(), proj.end());
      const std::size_t keep =
          std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(share * static_cast<double>(proj.size()))));
      for (std::size_t t = keep; t < proj.size(); ++t) allowed[static_cast<std::size_t>(proj[t].second)] = 0;
    }
    CheegerResult res = cheeger(domain, allowed);
    for (int c : res.set.cells) residual[static_cast<std::size_t>(c)] = 0;
    parts.push_back(std::move(res.set));
  }
  return make_state(std::move(parts), objective);
}

std::vector<int> contact_cells(const GridDomain& domain, const CellSet& from, const Membership& other) {
  std::vector<int> out;
  for (int c : from.cells) {
    for (const auto& e : domain.stencil().entries()) {
      const int n = domain.neighbor(c, e.dx, e.dy);
      if (n >= 0 && other[static_cast<std::size_t>(n)]) {
        out.push_back(c);
        break;
      }
    }
  }
  return out;
}

// Local moves around a max part i and a neighbouring part j, each followed
// by adjust_1 and accepted only when the objective strictly drops:
//  - yield: j gives up a cell touching i, keeps the Cheeger set of the rest
//    (still below the max) and i is re-extracted with the extra room;
//  - transfer: one contact cell changes sides between i and j.
KTupleState polish(const GridDomain& domain, const Membership& feasible, KTupleState state,
                   const HeuristicOptions& options, const AdjustOptions& adjust) {
  const int k = state.k();
  const auto budget = static_cast<std::size_t>(std::max(1, options.polish_budget));
  auto accept = [&](KTupleState trial) {
    trial.refresh();
    trial = adjust_1(domain, feasible, std::move(trial), adjust);
    if (trial.value < (1.0 - options.tol) * state.value) {
      state = std::move(trial);
      return true;
    }
    return false;
  };
  auto sample = [budget](const std::vector<int>& v, std::size_t t) {
    const std::size_t n = std::min(v.size(), budget);
    return v[t * v.size() / n];
  };

  bool improved = true;
  while (improved) {
    improved = false;
    const double top = state.max_ratio();
    for (int i = 0; i < k && !improved; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      if (state.ratios[ui] < (1.0 - options.tol) * top) continue;
      for (int j = 0; j < k && !improved; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        if (j == i) continue;
        const CellSet& part_i = state.parts[ui];
        const CellSet& part_j = state.parts[uj];
        const std::vector<int> j_side = contact_cells(domain, part_j, to_membership(domain, part_i.cells));
        if (j_side.empty()) continue;
        const std::vector<int> i_side = contact_cells(domain, part_i, to_membership(domain, part_j.cells));

        if (state.ratios[uj] < (1.0 - options.tol) * top && part_j.size() > 1) {
          for (std::size_t t = 0; t < std::min(j_side.size(), budget) && !improved; ++t) {
            Membership rest = to_membership(domain, part_j.cells);
            rest[static_cast<std::size_t>(sample(j_side, t))] = 0;
            CellSet shrunk = cheeger(domain, rest).set;
            if (shrunk.ratio() >= (1.0 - options.tol) * top) continue;
            KTupleState trial = state;
            trial.parts[uj] = std::move(shrunk);
            trial.refresh();
            std::vector<int> others;
            for (int o = 0; o < k; ++o)
              if (o != i) others.push_back(o);
            CheegerOptions co;
            co.initial_set = trial.parts[ui];
            CheegerResult grown = cheeger(domain, residual_region(feasible, trial, others), co);
            if (!(grown.h < (1.0 - options.tol) * trial.ratios[ui])) continue;
            trial.parts[ui] = std::move(grown.set);
            improved = accept(std::move(trial));
          }
        }
        for (std::size_t t = 0; t < std::min(j_side.size(), budget) && !improved; ++t) {
          const int c = sample(j_side, t);
          if (part_j.size() < 2) break;
          KTupleState trial = state;
          std::vector<int> a = part_i.cells;
          a.push_back(c);
          std::vector<int> b;
          for (int x : part_j.cells)
            if (x != c) b.push_back(x);
          trial.parts[ui] = measure(domain, std::move(a));
          trial.parts[uj] = measure(domain, std::move(b));
          improved = accept(std::move(trial));
        }
        for (std::size_t t = 0; t < std::min(i_side.size(), budget) && !improved; ++t) {
          const int c = sample(i_side, t);
          if (part_i.size() < 2) break;
          KTupleState trial = state;
          std::vector<int> a;
          for (int x : part_i.cells)
            if (x != c) a.push_back(x);
          std::vector<int> b = part_j.cells;
          b.push_back(c);
          trial.parts[ui] = measure(domain, std::move(a));
          trial.parts[uj] = measure(domain, std::move(b));
          improved = accept(std::move(trial));
        }
        // swap: one contact cell each way
        const std::size_t swaps = std::min<std::size_t>(budget, 8);
        for (std::size_t t = 0; t < std::min(j_side.size(), swaps) && !improved; ++t) {
          for (std::size_t u = 0; u < std::min(i_side.size(), swaps) && !improved; ++u) {
            const int c = j_side[t * j_side.size() / std::min(j_side.size(), swaps)];
            const int d = i_side[u * i_side.size() / std::min(i_side.size(), swaps)];
            if (part_i.size() < 2 && part_j.size() < 2) continue;
            std::vector<int> a{c};
            for (int x : part_i.cells)
              if (x != d) a.push_back(x);
            std::vector<int> b{d};
            for (int x : part_j.cells)
              if (x != c) b.push_back(x);
            KTupleState trial = state;
            trial.parts[ui] = measure(domain, std::move(a));
            trial.parts[uj] = measure(domain, std::move(b));
            improved = accept(std::move(trial));
          }
        }
      }
    }
  }
  return state;
}

}  // namespace

HeuristicRun hk_heuristic_runs(const GridDomain& domain, const Membership& feasible, int k,
                               Objective objective, const HeuristicOptions& options) {
  const std::vector<int> cells = feasible_cells(domain, feasible);
  if (k < 1) throw std::invalid_argument("cheeger_solver: k must be >= 1");
  if (k > static_cast<int>(cells.size()))
    throw std::invalid_argument("cheeger_solver: k exceeds the number of cells");
  const int restarts = std::max(1, options.restarts);

  std::vector<std::optional<KTupleState>> results(static_cast<std::size_t>(restarts));
  AdjustOptions adjust;
  adjust.tol = options.tol;
  parallel_for(static_cast<std::size_t>(restarts), [&](std::size_t r) {
    auto seeded = seed_tuple(domain, feasible, k, objective, options.seed, static_cast<int>(r));
    if (!seeded) return;
    KTupleState state = adjust_1(domain, feasible, std::move(*seeded), adjust);
    if (static_cast<int>(cells.size()) <= options.polish_limit)
      state = polish(domain, feasible, std::move(state), options, adjust);
    results[r] = std::move(state);
  });

  HeuristicRun run;
  std::optional<std::size_t> best;
  for (std::size_t r = 0; r < results.size(); ++r) {
    if (!results[r]) {
      run.restart_values.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    run.restart_values.push_back(results[r]->value);
    if (!best || results[r]->value < results[*best]->value) best = r;
  }
  if (!best) {
    // Every seed ran out of cells; fall back to a forced extraction where
    // each earlier part is limited to a single cell's neighbourhood.
    throw std::runtime_error("cheeger_solver: no restart produced a k-tuple");
  }
  run.best = std::move(*results[*best]);
  return run;
}

KTupleState hk_heuristic(const GridDomain& domain, const Membership& feasible, int k,
                         Objective objective, const HeuristicOptions& options) {
  return hk_heuristic_runs(domain, feasible, k, objective, options).best;
}

}  // namespace cheeger
