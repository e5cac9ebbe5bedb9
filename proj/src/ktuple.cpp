#include "cheeger/ktuple.h"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace cheeger {

std::string to_string(Objective objective) { return objective == Objective::max ? "max" : "sum"; }

Objective objective_from_string(const std::string& name) {
  if (name == "max") return Objective::max;
  if (name == "sum") return Objective::sum;
  throw std::invalid_argument("unknown objective '" + name + "'");
}

double objective_value(const std::vector<double>& ratios, Objective objective) {
  if (ratios.empty()) return 0.0;
  if (objective == Objective::max) return *std::max_element(ratios.begin(), ratios.end());
  return std::accumulate(ratios.begin(), ratios.end(), 0.0);
}

double KTupleState::max_ratio() const {
  return ratios.empty() ? 0.0 : *std::max_element(ratios.begin(), ratios.end());
}

void KTupleState::refresh() {
  ratios.resize(parts.size());
  for (std::size_t i = 0; i < parts.size(); ++i) ratios[i] = parts[i].ratio();
  value = objective_value(ratios, objective);
}

KTupleState make_state(std::vector<CellSet> parts, Objective objective) {
  KTupleState s;
  s.parts = std::move(parts);
  s.objective = objective;
  s.refresh();
  check_disjoint(s);
  return s;
}

void check_disjoint(const KTupleState& state) {
  std::unordered_set<int> seen;
  for (std::size_t i = 0; i < state.parts.size(); ++i) {
    if (state.parts[i].empty())
      throw std::logic_error("ktuple: part " + std::to_string(i) + " is empty");
    for (int c : state.parts[i].cells) {
      if (!seen.insert(c).second)
        throw std::logic_error("ktuple: cell " + std::to_string(c) + " belongs to two parts");
    }
  }
}

Membership residual_region(const Membership& region, const KTupleState& state,
                           const std::vector<int>& excluded_parts) {
  Membership out = region;
  for (int p : excluded_parts)
    for (int c : state.parts.at(static_cast<std::size_t>(p)).cells) out[static_cast<std::size_t>(c)] = 0;
  return out;
}

}  // namespace cheeger
