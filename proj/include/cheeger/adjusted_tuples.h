#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cheeger/grid.h"
#include "cheeger/ktuple.h"

namespace cheeger {

/// How h_l (l >= 2) is evaluated on residual domains. h_1 is always exact
/// (parametric min-cut).
///  - exact: enumeration only; larger residuals raise OracleModeError.
///  - heuristic: hk_heuristic everywhere for l >= 2 (results flagged inexact).
///  - automatic: enumeration when the residual is small enough, heuristic
///    otherwise.
enum class OracleMode { exact, heuristic, automatic };

std::string to_string(OracleMode mode);
OracleMode oracle_mode_from_string(const std::string& name);

class OracleModeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when replacements keep cycling without decreasing the tuple.
class OscillationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AdjustOptions {
  /// Relative tolerance for "at the max ratio" and for the residual tests.
  double tol = 1e-6;
  OracleMode mode = OracleMode::exact;
  /// Settings for heuristic sub-oracles.
  int restarts = 8;
  std::uint64_t seed = 0;
  /// Replacement passes allowed without a strict decrease.
  int oscillation_limit = 1000;
};

struct SubtupleCheck {
  std::vector<int> indices;
  int level = 0;
  double residual_value = 0.0;  // h_l of the residual domain (oracle value)
  double max_ratio = 0.0;       // max ratio over the subtuple
  double margin = 0.0;          // (min(residual_value, max_ratio) - max_ratio) / max_ratio
  bool exact = true;
  bool pass = false;
};

struct AdjustmentReport {
  int level = 0;
  bool pass = false;
  double worst_margin = 0.0;
  bool exact = true;
  std::vector<SubtupleCheck> checks;
};

/// Checks, for every l <= n and every l-subtuple, that h_l of
/// region \ (other parts) is at least (1 - tol) times the subtuple's max
/// ratio.
AdjustmentReport verify_adjustment(const GridDomain& domain, const Membership& region,
                                   const KTupleState& state, int n, const AdjustOptions& options);
AdjustmentReport verify_adjustment(const GridDomain& domain, const KTupleState& state, int n,
                                   const AdjustOptions& options);

/// Replacement loop producing a tuple whose parts are each a Cheeger set of
/// their residual domain. The max ratio never increases.
KTupleState adjust_1(const GridDomain& domain, const Membership& region, KTupleState state,
                     const AdjustOptions& options);
KTupleState adjust_1(const GridDomain& domain, KTupleState state, const AdjustOptions& options);

/// Level-n version: ensures level n-1, then replaces every failing
/// n-subtuple by a level-(n-1) adjusted optimizer of its residual.
KTupleState adjust_n(const GridDomain& domain, const Membership& region, KTupleState state, int n,
                     const AdjustOptions& options);
KTupleState adjust_n(const GridDomain& domain, KTupleState state, int n,
                     const AdjustOptions& options);

}  // namespace cheeger
