#include "cheeger/max_flow.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cheeger {

MaxFlow::MaxFlow(int node_count, int edge_hint) {
  if (node_count < 0) throw std::invalid_argument("max_flow: negative node count");
  nodes_.resize(static_cast<std::size_t>(node_count));
  if (edge_hint > 0) pending_.reserve(static_cast<std::size_t>(edge_hint));
}

void MaxFlow::add_terminal(int node, double cap_source, double cap_sink) {
  if (solved_) throw std::logic_error("max_flow: graph is frozen after solve()");
  if (cap_source < 0.0 || cap_sink < 0.0)
    throw std::invalid_argument("max_flow: negative terminal capacity");
  Node& n = nodes_.at(static_cast<std::size_t>(node));
  flow_ += std::min(cap_source, cap_sink);
  n.tr_cap += cap_source - cap_sink;
}

void MaxFlow::add_edge(int node_a, int node_b, double cap, double rev_cap) {
  if (solved_) throw std::logic_error("max_flow: graph is frozen after solve()");
  if (cap < 0.0 || rev_cap < 0.0) throw std::invalid_argument("max_flow: negative capacity");
  const auto n = static_cast<int>(nodes_.size());
  if (node_a < 0 || node_b < 0 || node_a >= n || node_b >= n)
    throw std::out_of_range("max_flow: node index out of range");
  if (node_a == node_b) return;
  pending_.push_back({node_a, node_b, cap, rev_cap});
}

void MaxFlow::build_arcs() {
  const std::size_t n = nodes_.size();
  first_.assign(n + 1, 0);
  for (const auto& e : pending_) {
    ++first_[static_cast<std::size_t>(e.a) + 1];
    ++first_[static_cast<std::size_t>(e.b) + 1];
  }
  for (std::size_t i = 0; i < n; ++i) first_[i + 1] += first_[i];
  std::vector<int> fill(first_.begin(), first_.end() - 1);
  arcs_.assign(2 * pending_.size(), Arc{});
  for (const auto& e : pending_) {
    const int ab = fill[static_cast<std::size_t>(e.a)]++;
    const int ba = fill[static_cast<std::size_t>(e.b)]++;
    arcs_[static_cast<std::size_t>(ab)] = {e.b, ba, e.cap};
    arcs_[static_cast<std::size_t>(ba)] = {e.a, ab, e.rev_cap};
  }
  pending_.clear();
  pending_.shrink_to_fit();
}

void MaxFlow::activate(int i) {
  Node& n = nodes_[static_cast<std::size_t>(i)];
  n.next = bucket_[static_cast<std::size_t>(n.label)];
  bucket_[static_cast<std::size_t>(n.label)] = i;
  max_active_ = std::max(max_active_, n.label);
}

// Exact residual distances to the sink by reverse breadth-first search;
// nodes that cannot reach it get label n + 1 and are never processed again.
void MaxFlow::global_relabel() {
  const int count = static_cast<int>(nodes_.size());
  const int n = count + 1;
  std::vector<int> queue;
  queue.reserve(nodes_.size());
  for (int i = 0; i < count; ++i) {
    Node& node = nodes_[static_cast<std::size_t>(i)];
    node.current = first_[static_cast<std::size_t>(i)];
    node.label = node.tr_cap < -eps_ ? 1 : n;
    if (node.label == 1) queue.push_back(i);
  }
  for (std::size_t q = 0; q < queue.size(); ++q) {
    const int w = queue[q];
    const int next_label = nodes_[static_cast<std::size_t>(w)].label + 1;
    for (int a = first_[static_cast<std::size_t>(w)]; a < first_[static_cast<std::size_t>(w) + 1]; ++a) {
      const int u = arcs_[static_cast<std::size_t>(a)].head;
      Node& nu = nodes_[static_cast<std::size_t>(u)];
      if (nu.label == n && arcs_[static_cast<std::size_t>(sister(a))].r_cap > eps_) {
        nu.label = next_label;
        queue.push_back(u);
      }
    }
  }
  std::fill(bucket_.begin(), bucket_.end(), -1);
  max_active_ = 0;
  for (int i = 0; i < count; ++i) {
    const Node& node = nodes_[static_cast<std::size_t>(i)];
    if (node.tr_cap > eps_ && node.label < n) activate(i);
  }
  work_ = 0;
}

void MaxFlow::discharge(int i) {
  const int n = static_cast<int>(nodes_.size()) + 1;
  Node& v = nodes_[static_cast<std::size_t>(i)];
  const int end = first_[static_cast<std::size_t>(i) + 1];
  while (v.tr_cap > eps_) {
    for (; v.current < end; ++v.current) {
      Arc& arc = arcs_[static_cast<std::size_t>(v.current)];
      if (arc.r_cap <= eps_) continue;
      Node& w = nodes_[static_cast<std::size_t>(arc.head)];
      if (v.label != w.label + 1) continue;
      const double delta = std::min(v.tr_cap, arc.r_cap);
      arc.r_cap -= delta;
      arcs_[static_cast<std::size_t>(arc.sister)].r_cap += delta;
      v.tr_cap -= delta;
      const double before = w.tr_cap;
      w.tr_cap += delta;
      if (before < 0.0) flow_ += std::min(delta, -before);
      if (before <= eps_ && w.tr_cap > eps_ && w.label < n) activate(arc.head);
      if (v.tr_cap <= eps_) break;
    }
    if (v.tr_cap <= eps_) break;
    // No admissible arc left: relabel.
    int lowest = n;
    const int begin = first_[static_cast<std::size_t>(i)];
    for (int a = begin; a < end; ++a) {
      const Arc& arc = arcs_[static_cast<std::size_t>(a)];
      if (arc.r_cap > eps_) lowest = std::min(lowest, nodes_[static_cast<std::size_t>(arc.head)].label + 1);
    }
    work_ += 12 + (end - begin);
    v.label = lowest;
    v.current = begin;
    if (v.label >= n) break;
  }
}

double MaxFlow::solve() {
  if (solved_) throw std::logic_error("max_flow: solve() called twice");
  build_arcs();
  solved_ = true;

  double scale = 0.0;
  for (const auto& n : nodes_) scale = std::max(scale, std::abs(n.tr_cap));
  for (const auto& a : arcs_) scale = std::max(scale, a.r_cap);
  eps_ = 1e-13 * scale;
  for (auto& n : nodes_)
    if (std::abs(n.tr_cap) <= eps_) n.tr_cap = 0.0;

  const auto n = static_cast<long long>(nodes_.size()) + 1;
  const long long relabel_period = 6 * n + static_cast<long long>(arcs_.size()) / 2;
  bucket_.assign(nodes_.size() + 2, -1);
  global_relabel();
  while (max_active_ > 0) {
    const int i = bucket_[static_cast<std::size_t>(max_active_)];
    if (i < 0) {
      --max_active_;
      continue;
    }
    bucket_[static_cast<std::size_t>(max_active_)] = nodes_[static_cast<std::size_t>(i)].next;
    discharge(i);
    const Node& v = nodes_[static_cast<std::size_t>(i)];
    if (v.tr_cap > eps_ && v.label < n) activate(i);
    if (work_ > relabel_period) global_relabel();
  }
  return flow_;
}

std::vector<std::uint8_t> MaxFlow::source_side_maximal() const {
  if (!solved_) throw std::logic_error("max_flow: solve() has not run");
  const std::size_t n = nodes_.size();
  std::vector<std::uint8_t> reaches_sink(n, 0);
  std::vector<int> stack;
  for (std::size_t k = 0; k < n; ++k) {
    if (nodes_[k].tr_cap < -eps_) {
      reaches_sink[k] = 1;
      stack.push_back(static_cast<int>(k));
    }
  }
  // v reaches the sink through u when the arc u -> v has residual capacity.
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int a = first_[static_cast<std::size_t>(v)]; a < first_[static_cast<std::size_t>(v) + 1]; ++a) {
      const int u = arcs_[static_cast<std::size_t>(a)].head;
      if (!reaches_sink[static_cast<std::size_t>(u)] && arcs_[static_cast<std::size_t>(sister(a))].r_cap > eps_) {
        reaches_sink[static_cast<std::size_t>(u)] = 1;
        stack.push_back(u);
      }
    }
  }
  std::vector<std::uint8_t> source(n);
  for (std::size_t k = 0; k < n; ++k) source[k] = reaches_sink[k] ? 0 : 1;
  return source;
}

std::vector<std::uint8_t> MaxFlow::source_side_minimal() const {
  if (!solved_) throw std::logic_error("max_flow: solve() has not run");
  const std::size_t n = nodes_.size();
  std::vector<std::uint8_t> reached(n, 0);
  std::vector<int> stack;
  for (std::size_t k = 0; k < n; ++k) {
    if (nodes_[k].tr_cap > eps_) {
      reached[k] = 1;
      stack.push_back(static_cast<int>(k));
    }
  }
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int a = first_[static_cast<std::size_t>(v)]; a < first_[static_cast<std::size_t>(v) + 1]; ++a) {
      const int u = arcs_[static_cast<std::size_t>(a)].head;
      if (!reached[static_cast<std::size_t>(u)] && arcs_[static_cast<std::size_t>(a)].r_cap > eps_) {
        reached[static_cast<std::size_t>(u)] = 1;
        stack.push_back(u);
      }
    }
  }
  return reached;
}

}  // namespace cheeger
