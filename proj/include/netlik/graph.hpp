// Copyright 2026 The netlik Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NETLIK_GRAPH_HPP_
#define NETLIK_GRAPH_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace netlik {

// Dense node index, assigned consecutively from 0 in arrival order.
using NodeId = std::uint32_t;

struct Edge {
  NodeId u = 0;
  NodeId v = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

class GraphError : public std::runtime_error {
 public:
  enum class Kind { kSelfLoop, kDuplicateEdge, kUnknownNode };

  GraphError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

// A growing simple undirected graph. Besides adjacency it keeps per-node
// degree, the number of triangles through each node, and the history of
// inner-model selections, all updated incrementally on every mutation.
//
// Mutations are single-writer. Const queries on a graph that is not being
// mutated may run from any number of threads.
class EvolvingGraph {
 public:
  using Neighbors = std::unordered_set<NodeId>;

  EvolvingGraph() = default;

  NodeId add_node() {
    const auto id = static_cast<NodeId>(adjacency_.size());
    adjacency_.emplace_back();
    triangles_.push_back(0);
    last_selected_.push_back(0);
    return id;
  }

  // Adds nodes until node_count() > id.
  void ensure_node(NodeId id) {
    while (adjacency_.size() <= id) add_node();
  }

  void add_edge(NodeId u, NodeId v) {
    check_node(u);
    check_node(v);
    if (u == v) {
      throw GraphError(GraphError::Kind::kSelfLoop,
                       "self-loop on node " + std::to_string(u));
    }
    if (adjacency_[u].contains(v)) {
      throw GraphError(GraphError::Kind::kDuplicateEdge,
                       "duplicate edge " + std::to_string(u) + "-" +
                           std::to_string(v));
    }
    // Every common neighbour closes exactly one new triangle.
    const Neighbors* small = &adjacency_[u];
    const Neighbors* large = &adjacency_[v];
    if (small->size() > large->size()) std::swap(small, large);
    std::uint64_t closed = 0;
    for (NodeId w : *small) {
      if (large->contains(w)) {
        ++triangles_[w];
        ++closed;
      }
    }
    triangles_[u] += closed;
    triangles_[v] += closed;
    adjacency_[u].insert(v);
    adjacency_[v].insert(u);
    ++edge_count_;
  }

  void record_selection(NodeId i) {
    check_node(i);
    history_.push_back(i);
    last_selected_[i] = history_.size();
  }

  // Distinct nodes among the last min(n, history length) selections,
  // sorted by id.
  std::vector<NodeId> recent_set(std::size_t n) const {
    const std::size_t take = std::min(n, history_.size());
    std::vector<NodeId> out(history_.end() - static_cast<std::ptrdiff_t>(take),
                            history_.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  // O(1) membership test equivalent to contains(recent_set(n), i).
  bool selected_within(NodeId i, std::size_t n) const {
    const std::size_t pos = last_selected_[i];
    return pos != 0 && pos + n > history_.size();
  }

  std::size_t node_count() const noexcept { return adjacency_.size(); }
  std::size_t edge_count() const noexcept { return edge_count_; }
  bool has_node(NodeId i) const noexcept { return i < adjacency_.size(); }

  std::size_t degree(NodeId i) const { return adjacency_[i].size(); }
  std::uint64_t triangles(NodeId i) const { return triangles_[i]; }
  const Neighbors& neighbors(NodeId i) const { return adjacency_[i]; }

  bool has_edge(NodeId u, NodeId v) const {
    return has_node(u) && has_node(v) && adjacency_[u].contains(v);
  }

  // Number of distinct triangles in the graph.
  std::uint64_t triangle_total() const {
    std::uint64_t sum = 0;
    for (auto t : triangles_) sum += t;
    return sum / 3;
  }

  const std::vector<NodeId>& selection_history() const noexcept {
    return history_;
  }

  // The node created by the latest new-node event; none while the graph
  // holds only seed nodes.
  std::optional<NodeId> newest_node() const noexcept { return newest_; }
  void set_newest(NodeId i) {
    check_node(i);
    newest_ = i;
  }

 private:
  void check_node(NodeId i) const {
    if (i >= adjacency_.size()) {
      throw GraphError(GraphError::Kind::kUnknownNode,
                       "unknown node " + std::to_string(i));
    }
  }

  std::vector<Neighbors> adjacency_;
  std::vector<std::uint64_t> triangles_;
  // 1-based position in history_ of the latest selection; 0 = never.
  std::vector<std::size_t> last_selected_;
  std::vector<NodeId> history_;
  std::size_t edge_count_ = 0;
  std::optional<NodeId> newest_;
};

}  // namespace netlik

#endif  // NETLIK_GRAPH_HPP_
