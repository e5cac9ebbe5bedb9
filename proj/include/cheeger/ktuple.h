#pragma once

#include <string>
#include <vector>

#include "cheeger/grid.h"

namespace cheeger {

/// max houses h_k; sum houses H_k.
enum class Objective { max, sum };

std::string to_string(Objective objective);
Objective objective_from_string(const std::string& name);

/// One accepted replacement made while adjusting a tuple.
struct ReplacementStep {
  int step = 0;
  int replaced_index = 0;
  double old_ratio = 0.0;
  double new_ratio = 0.0;
  double objective = 0.0;  // tuple value after the replacement
  std::string reason;      // "max_part", "below_max", "subtuple"
};

/// k mutually disjoint cell sets with their ratios J(E) = P(E)/|E|.
struct KTupleState {
  std::vector<CellSet> parts;
  std::vector<double> ratios;
  Objective objective = Objective::max;
  double value = 0.0;
  int adjustment_level = 0;
  /// False once any certificate relied on a heuristic sub-oracle.
  bool exact = true;
  std::vector<ReplacementStep> history;

  [[nodiscard]] int k() const { return static_cast<int>(parts.size()); }
  [[nodiscard]] double max_ratio() const;
  /// Recomputes ratios and value from the parts.
  void refresh();
};

KTupleState make_state(std::vector<CellSet> parts, Objective objective = Objective::max);

double objective_value(const std::vector<double>& ratios, Objective objective);

/// Throws std::logic_error when two parts share a cell or a part is empty.
void check_disjoint(const KTupleState& state);

/// Cells of `region` not covered by the listed parts.
Membership residual_region(const Membership& region, const KTupleState& state,
                           const std::vector<int>& excluded_parts);

}  // namespace cheeger
