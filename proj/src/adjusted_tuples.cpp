#include "cheeger/adjusted_tuples.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "cheeger/cheeger_solver.h"
#include "cheeger/parallel.h"

namespace cheeger {

std::string to_string(OracleMode mode) {
  switch (mode) {
    case OracleMode::exact:
      return "exact";
    case OracleMode::heuristic:
      return "heuristic";
    default:
      return "automatic";
  }
}

OracleMode oracle_mode_from_string(const std::string& name) {
  if (name == "exact") return OracleMode::exact;
  if (name == "heuristic") return OracleMode::heuristic;
  if (name == "automatic" || name == "auto") return OracleMode::automatic;
  throw std::invalid_argument("adjusted_tuples: unknown oracle mode '" + name + "'");
}

namespace {

void check_inside(const Membership& region, const KTupleState& state) {
  check_disjoint(state);
  for (std::size_t i = 0; i < state.parts.size(); ++i)
    for (int c : state.parts[i].cells)
      if (!region.at(static_cast<std::size_t>(c)))
        throw std::logic_error("adjusted_tuples: part " + std::to_string(i) + " leaves the region");
}

std::vector<int> others(int k, const std::vector<int>& chosen) {
  std::vector<int> out;
  for (int i = 0; i < k; ++i)
    if (std::find(chosen.begin(), chosen.end(), i) == chosen.end()) out.push_back(i);
  return out;
}

// All size-l index combinations of 0..k-1 in lexicographic order.
std::vector<std::vector<int>> combinations(int k, int l) {
  std::vector<std::vector<int>> out;
  std::vector<int> c(static_cast<std::size_t>(l));
  std::iota(c.begin(), c.end(), 0);
  while (true) {
    out.push_back(c);
    int i = l - 1;
    while (i >= 0 && c[static_cast<std::size_t>(i)] == k - l + i) --i;
    if (i < 0) break;
    ++c[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < l; ++j) c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

struct OracleTuple {
  KTupleState state;
  bool exact = true;
};

// Optimal (or best found) l-tuple for the max objective on a residual region.
OracleTuple oracle_tuple(const GridDomain& domain, const Membership& residual, int l,
                         const AdjustOptions& options) {
  const auto count = static_cast<int>(std::count_if(residual.begin(), residual.end(),
                                                    [](std::uint8_t v) { return v != 0; }));
  if (count < l)
    throw std::logic_error("adjusted_tuples: residual region has fewer cells than parts");
  const bool small = count <= kBruteForceTupleLimit && l <= 3;
  if (options.mode != OracleMode::heuristic && small)
    return {hk_bruteforce(domain, residual, l, Objective::max), true};
  if (options.mode == OracleMode::exact)
    throw OracleModeError("adjusted_tuples: no exact oracle for h_" + std::to_string(l) + " on " +
                          std::to_string(count) + " cells; use heuristic or automatic mode");
  HeuristicOptions h;
  h.restarts = options.restarts;
  h.seed = options.seed;
  h.tol = options.tol;
  return {hk_heuristic(domain, residual, l, Objective::max, h), false};
}

SubtupleCheck run_check(const GridDomain& domain, const Membership& region,
                        const KTupleState& state, const std::vector<int>& indices,
                        const AdjustOptions& options) {
  SubtupleCheck check;
  check.indices = indices;
  check.level = static_cast<int>(indices.size());
  for (int i : indices)
    check.max_ratio = std::max(check.max_ratio, state.ratios[static_cast<std::size_t>(i)]);
  const Membership residual = residual_region(region, state, others(state.k(), indices));
  if (check.level == 1) {
    CheegerOptions co;
    co.initial_set = state.parts[static_cast<std::size_t>(indices.front())];
    check.residual_value = cheeger(domain, residual, co).h;
  } else {
    OracleTuple o = oracle_tuple(domain, residual, check.level, options);
    check.residual_value = o.state.value;
    check.exact = o.exact;
  }
  check.margin = (std::min(check.residual_value, check.max_ratio) - check.max_ratio) / check.max_ratio;
  check.pass = check.margin >= -options.tol;
  return check;
}

void record(KTupleState& state, int index, CellSet replacement, const char* reason) {
  ReplacementStep step;
  step.step = static_cast<int>(state.history.size()) + 1;
  step.replaced_index = index;
  step.old_ratio = state.ratios[static_cast<std::size_t>(index)];
  step.new_ratio = replacement.ratio();
  step.reason = reason;
  state.parts[static_cast<std::size_t>(index)] = std::move(replacement);
  state.refresh();
  step.objective = state.value;
  state.history.push_back(std::move(step));
}

}  // namespace

AdjustmentReport verify_adjustment(const GridDomain& domain, const Membership& region,
                                   const KTupleState& state, int n, const AdjustOptions& options) {
  if (n < 1 || n > state.k())
    throw std::invalid_argument("adjusted_tuples: level must satisfy 1 <= n <= k");
  check_inside(region, state);
  KTupleState fresh = state;
  fresh.refresh();

  std::vector<std::vector<int>> subsets;
  for (int l = 1; l <= n; ++l)
    for (auto& c : combinations(fresh.k(), l)) subsets.push_back(std::move(c));

  AdjustmentReport report;
  report.checks.resize(subsets.size());
  parallel_for(subsets.size(), [&](std::size_t s) {
    report.checks[s] = run_check(domain, region, fresh, subsets[s], options);
  });

  report.pass = true;
  report.level = n;
  report.worst_margin = std::numeric_limits<double>::infinity();
  for (const auto& c : report.checks) {
    report.worst_margin = std::min(report.worst_margin, c.margin);
    report.exact = report.exact && c.exact;
    if (!c.pass) {
      report.pass = false;
      report.level = std::min(report.level, c.level - 1);
    }
  }
  return report;
}

AdjustmentReport verify_adjustment(const GridDomain& domain, const KTupleState& state, int n,
                                   const AdjustOptions& options) {
  return verify_adjustment(domain, domain.mask(), state, n, options);
}

KTupleState adjust_1(const GridDomain& domain, const Membership& region, KTupleState state,
                     const AdjustOptions& options) {
  check_inside(region, state);
  state.refresh();
  const int k = state.k();
  int stalled = 0;
  double best_seen = std::numeric_limits<double>::infinity();
  bool changed = false;

  while (true) {
    const double top = state.max_ratio();
    std::vector<int> at_max;
    std::vector<int> below;
    for (int i = 0; i < k; ++i)
      (state.ratios[static_cast<std::size_t>(i)] >= (1.0 - options.tol) * top ? at_max : below).push_back(i);

    // Parts below the max are adjusted among themselves in what the top
    // parts leave free; this cannot raise the max.
    if (!below.empty()) {
      const Membership sub_region = residual_region(region, state, at_max);
      std::vector<CellSet> sub_parts;
      for (int i : below) sub_parts.push_back(state.parts[static_cast<std::size_t>(i)]);
      KTupleState sub = adjust_1(domain, sub_region, make_state(std::move(sub_parts)), options);
      for (std::size_t t = 0; t < below.size(); ++t) {
        if (sub.parts[t] == state.parts[static_cast<std::size_t>(below[t])]) continue;
        record(state, below[t], std::move(sub.parts[t]), "below_max");
        changed = true;
      }
    }

    bool replaced = false;
    for (int i : at_max) {
      std::vector<int> rest = others(k, {i});
      const Membership residual = residual_region(region, state, rest);
      CheegerOptions co;
      co.initial_set = state.parts[static_cast<std::size_t>(i)];
      CheegerResult res = cheeger(domain, residual, co);
      if (res.h < (1.0 - options.tol) * state.ratios[static_cast<std::size_t>(i)]) {
        record(state, i, std::move(res.set), "max_part");
        changed = true;
        replaced = true;
        break;
      }
    }
    if (!replaced) break;
    check_disjoint(state);

    if (state.max_ratio() < best_seen * (1.0 - options.tol)) {
      best_seen = state.max_ratio();
      stalled = 0;
    } else if (++stalled > options.oscillation_limit) {
      throw OscillationError("adjusted_tuples: replacements cycle without decreasing the max ratio");
    }
  }
  if (changed || state.adjustment_level < 1) state.adjustment_level = 1;
  return state;
}

KTupleState adjust_1(const GridDomain& domain, KTupleState state, const AdjustOptions& options) {
  return adjust_1(domain, domain.mask(), std::move(state), options);
}

KTupleState adjust_n(const GridDomain& domain, const Membership& region, KTupleState state, int n,
                     const AdjustOptions& options) {
  if (n < 1 || n > state.k())
    throw std::invalid_argument("adjusted_tuples: level must satisfy 1 <= n <= k");
  if (n == 1) return adjust_1(domain, region, std::move(state), options);
  state = adjust_n(domain, region, std::move(state), n - 1, options);

  bool exact = state.exact;
  int rounds = 0;
  while (true) {
    bool replaced = false;
    for (const auto& subset : combinations(state.k(), n)) {
      double top = 0.0;
      for (int i : subset) top = std::max(top, state.ratios[static_cast<std::size_t>(i)]);
      const Membership residual = residual_region(region, state, others(state.k(), subset));
      OracleTuple o = oracle_tuple(domain, residual, n, options);
      exact = exact && o.exact;
      if (!(o.state.value < (1.0 - options.tol) * top)) continue;

      KTupleState better = adjust_n(domain, residual, std::move(o.state), n - 1, options);
      for (std::size_t t = 0; t < subset.size(); ++t)
        record(state, subset[t], std::move(better.parts[t]), "subtuple");
      check_disjoint(state);
      state = adjust_n(domain, region, std::move(state), n - 1, options);
      replaced = true;
      break;
    }
    if (!replaced) break;
    if (++rounds > options.oscillation_limit)
      throw OscillationError("adjusted_tuples: subtuple replacements do not settle");
  }
  state.exact = exact;
  state.adjustment_level = n;
  return state;
}

KTupleState adjust_n(const GridDomain& domain, KTupleState state, int n,
                     const AdjustOptions& options) {
  return adjust_n(domain, domain.mask(), std::move(state), n, options);
}

}  // namespace cheeger
