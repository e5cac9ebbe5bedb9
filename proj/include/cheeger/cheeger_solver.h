#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cheeger/grid.h"
#include "cheeger/ktuple.h"

namespace cheeger {

struct CheegerResult {
  CellSet set;
  double h = 0.0;
  /// Number of parametric min-cut solves.
  int iterations = 0;
  /// Optimal value of min_E P(E) - h |E| at termination (>= -tol * P).
  double certificate = 0.0;
  /// The raw minimizer had several components; `set` is the best one.
  bool raw_disconnected = false;
  /// Dinkelbach parameter sequence, strictly decreasing.
  std::vector<double> lambdas;
};

struct CheegerOptions {
  /// Relative tolerance on the subproblem value.
  double tol = 1e-9;
  int max_iterations = 100;
  /// Start the iteration from this set's ratio instead of the whole region.
  std::optional<CellSet> initial_set;
  bool best_component = true;
};

/// Exact minimizer of P(E)/|E| over nonempty E within `feasible` (a subset of
/// the mask) by Dinkelbach iteration over exact minimum s-t cuts. Ties at the
/// optimum go to the largest minimizer, then to its best component.
CheegerResult cheeger(const GridDomain& domain, const Membership& feasible,
                      const CheegerOptions& options = {});

/// Same as cheeger() over mask \ forbidden.
CheegerResult cheeger_excluding(const GridDomain& domain, std::span<const int> forbidden,
                                const CheegerOptions& options = {});

/// Value of min_E P(E) - lambda |E| over subsets of `feasible` together with
/// the largest minimizer.
struct ParametricCut {
  double value = 0.0;
  std::vector<int> cells;
};
ParametricCut parametric_min_cut(const GridDomain& domain, const Membership& feasible,
                                 double lambda);

inline constexpr int kBruteForceCheegerLimit = 20;
inline constexpr int kBruteForceTupleLimit = 12;

/// Exhaustive enumeration over nonempty subsets (at most 20 feasible cells).
/// Ties go to larger area, then to the lexicographically smaller cell list.
CheegerResult brute_force_cheeger(const GridDomain& domain, const Membership& feasible);

/// Exhaustive search over assignments of at most 12 feasible cells to
/// {unused, 1..k}, all parts nonempty, 1 <= k <= 3.
KTupleState hk_bruteforce(const GridDomain& domain, const Membership& feasible, int k,
                          Objective objective = Objective::max);

struct HeuristicOptions {
  int restarts = 8;
  std::uint64_t seed = 0;
  double tol = 1e-6;
  /// Boundary-yield polishing runs on regions with at most this many cells,
  /// trying at most polish_budget contact cells per pair of parts.
  int polish_limit = 256;
  int polish_budget = 24;
};

/// Multistart search for h_k / H_k: greedy sequential extraction,
/// half-plane-restricted extractions and Voronoi seeds, each refined by
/// adjust_1 and, on small regions, by boundary-yield moves.
/// Deterministic for a fixed seed; restarts may run concurrently.
KTupleState hk_heuristic(const GridDomain& domain, const Membership& feasible, int k,
                         Objective objective, const HeuristicOptions& options);

/// Per-restart values of the last hk_heuristic call pattern, for dispersion
/// reporting.
struct HeuristicRun {
  KTupleState best;
  std::vector<double> restart_values;  // NaN for restarts without a seed tuple
};
HeuristicRun hk_heuristic_runs(const GridDomain& domain, const Membership& feasible, int k,
                               Objective objective, const HeuristicOptions& options);

}  // namespace cheeger
