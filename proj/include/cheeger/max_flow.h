#pragma once

#include <cstdint>
#include <vector>

namespace cheeger {

/// s-t max-flow on a sparse graph with real capacities: highest-label
/// push-relabel with periodic global relabeling. Excess left on nodes that
/// cannot reach the sink counts as unused source capacity, so the final
/// state is a maximum flow. Residuals at or below `eps` (relative to the
/// largest capacity) are treated as saturated.
class MaxFlow {
 public:
  explicit MaxFlow(int node_count, int edge_hint = 0);

  /// Capacity from the source to `node` and from `node` to the sink.
  void add_terminal(int node, double cap_source, double cap_sink);
  /// Arc node_a -> node_b with `cap`, and node_b -> node_a with `rev_cap`.
  void add_edge(int node_a, int node_b, double cap, double rev_cap);

  double solve();

  [[nodiscard]] double flow() const { return flow_; }
  [[nodiscard]] int node_count() const { return static_cast<int>(nodes_.size()); }

  /// Largest source side of a minimum cut: nodes that cannot reach the sink
  /// in the residual graph. Valid after solve().
  [[nodiscard]] std::vector<std::uint8_t> source_side_maximal() const;
  /// Smallest source side: nodes reachable from the source.
  [[nodiscard]] std::vector<std::uint8_t> source_side_minimal() const;

 private:
  struct Node {
    double tr_cap = 0.0;  // > 0: excess or residual from source, < 0: to sink
    int label = 0;
    int current = 0;  // next arc to scan
    int next = -1;    // bucket list link
  };
  // Arcs are stored per tail node (compressed rows) once solve() starts.
  struct Arc {
    int head = 0;
    int sister = 0;
    double r_cap = 0.0;
  };
  struct PendingEdge {
    int a = 0;
    int b = 0;
    double cap = 0.0;
    double rev_cap = 0.0;
  };

  [[nodiscard]] int sister(int a) const { return arcs_[static_cast<std::size_t>(a)].sister; }
  void build_arcs();
  void global_relabel();
  void activate(int i);
  void discharge(int i);

  std::vector<Node> nodes_;
  std::vector<int> first_;  // node_count + 1 offsets into arcs_
  std::vector<Arc> arcs_;
  std::vector<PendingEdge> pending_;
  std::vector<int> bucket_;  // head of the active list per label
  int max_active_ = 0;
  long long work_ = 0;
  double flow_ = 0.0;
  double eps_ = 0.0;
  bool solved_ = false;
};

}  // namespace cheeger
