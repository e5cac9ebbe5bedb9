#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cheeger/grid.h"

namespace cheeger {

/// Settings for the discrete first p-Laplacian eigenvalue.
struct PLapConfig {
  double p = 2.0;
  int max_iters = 3000;
  /// Stop once the relative decrease per iteration stays below this.
  double grad_tol = 1e-7;
  /// Smallest accepted exponent; the energy degenerates as p -> 1.
  double p_floor = 1.02;
};

/// Discrete p-energy of u (zero outside the support) in the domain's
/// stencil metric:
///   s_p * cell^(2-p) * sum over neighbor pairs of w |u_i - u_j|^p,
/// where pairs leaving the support see u = 0. s_p = 1 for the four-neighbor
/// stencil; for Cauchy-Crofton weights s_p rescales the orientation-averaged
/// energy of a linear function to |grad u|^p, so s_1 = 1 and the p = 1
/// energy of an indicator is the stencil perimeter.
double plap_scale(const Stencil& stencil, double p);

struct EigenResult {
  double lambda = 0.0;
  /// Full-lattice vector, zero outside E, nonnegative, sum |u|^p cell^2 = 1.
  std::vector<double> u;
  /// Relative decrease of the last accepted step.
  double residual = 0.0;
  int iterations = 0;
};

/// Minimizes the Rayleigh quotient energy(u) / (sum |u|^p cell^2) over u
/// supported on E. Starts from the p = 2 ground state (or from `initial`
/// restricted to E) and descends with L-BFGS and Armijo backtracking. The
/// value is an upper bound on the discrete infimum that never increases with
/// max_iters.
EigenResult lambda1(const PLapConfig& config, const GridDomain& domain, const CellSet& E,
                    std::span<const double> initial = {});

struct InequalityRow {
  double p = 0.0;
  double lambda = 0.0;
  double h1 = 0.0;
  double bound = 0.0;  // (h1 / p)^p
  double slack = 0.0;  // (lambda - bound) / bound
  bool holds = false;  // slack >= -0.05
};

/// Compares lambda1(p; E) with (h1(E) / p)^p, h1 taken over subsets of E.
std::vector<InequalityRow> cheeger_inequality_check(const PLapConfig& config,
                                                    const GridDomain& domain, const CellSet& E,
                                                    const std::vector<double>& ps);

struct SpectralPartition {
  std::vector<CellSet> parts;
  std::vector<double> lambdas;
  std::vector<std::vector<double>> eigenfunctions;
  double value = 0.0;  // max of lambdas
  int iterations = 0;
  std::vector<double> restart_values;
  /// Empty-part restarts and similar events.
  std::vector<std::string> log;
};

/// Alternating minimization for L_k(p): solve each part's eigenproblem, give
/// every cell to the part whose eigenfunction is largest there (ties to the
/// lower index), repeat until the assignment is stable or the max eigenvalue
/// stops decreasing. Restarts start from random Voronoi partitions; a
/// nonempty `initial` partition replaces restart 0's seed.
SpectralPartition spectral_partition(const PLapConfig& config, const GridDomain& domain, int k,
                                     int restarts, std::uint64_t seed,
                                     const std::vector<CellSet>& initial = {},
                                     const std::vector<std::vector<double>>& warm = {});

struct LimitRow {
  double p = 0.0;
  double value = 0.0;
  std::vector<double> lambdas;
};

struct LimitScan {
  std::vector<LimitRow> rows;
  /// Quadratic extrapolation in (p - 1) through the three smallest p.
  double extrapolated = 0.0;
  /// Values decrease along the decreasing p sequence.
  bool monotone = false;
  SpectralPartition last;
};

/// spectral_partition for each p (strictly decreasing, within (1, 3]), each
/// run warm-started from the previous partition, plus the p = 1 estimate.
LimitScan limit_scan(const PLapConfig& config, const GridDomain& domain, int k,
                     const std::vector<double>& ps, int restarts, std::uint64_t seed);

/// Value at x = 0 of the polynomial through the given points (Neville).
double extrapolate_to_zero(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace cheeger
