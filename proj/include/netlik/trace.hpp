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

// Growth traces: a seed graph followed by arrival-ordered edges, each edge
// classified as one of three outer-model operations.
//
// Text format:
//
//   # comment
//   SEED
//   a b
//   b c
//   EVENTS
//   d a
//   d b
//
// Labels are arbitrary non-whitespace tokens and are mapped to dense node ids
// in order of first appearance.

#ifndef NETLIK_TRACE_HPP_
#define NETLIK_TRACE_HPP_

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "netlik/graph.hpp"

namespace netlik {

enum class EventKind : std::uint8_t {
  kNewNode,     // a brand-new node attaches to an existing node
  kNewestNode,  // the most recently added node gains another edge
  kInnerEdge,   // an edge between two existing nodes
};

inline std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kNewNode:
      return "new-node";
    case EventKind::kNewestNode:
      return "newest-node";
    case EventKind::kInnerEdge:
      return "inner-edge";
  }
  return "?";
}

// For kNewNode the source is the new node; for kNewestNode the source is the
// newest node. The target is the node picked by the inner model.
struct OuterEvent {
  EventKind kind = EventKind::kNewNode;
  NodeId source = 0;
  NodeId target = 0;

  friend bool operator==(const OuterEvent&, const OuterEvent&) = default;
};

class TraceError : public std::runtime_error {
 public:
  enum class Kind {
    kSyntax,
    kDuplicateEdge,
    kSelfLoop,
    kDisconnectedNewNode,  // both endpoints of an event edge are unseen
  };

  TraceError(Kind kind, std::size_t line, const std::string& what)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what
                                : what),
        kind_(kind),
        line_(line) {}

  Kind kind() const noexcept { return kind_; }
  // 1-based line number in the source file, 0 when not parsing a file.
  std::size_t line() const noexcept { return line_; }

 private:
  Kind kind_;
  std::size_t line_;
};

class LabelMap {
 public:
  NodeId intern(std::string_view label) {
    auto it = ids_.find(std::string(label));
    if (it != ids_.end()) return it->second;
    const auto id = static_cast<NodeId>(labels_.size());
    labels_.emplace_back(label);
    ids_.emplace(labels_.back(), id);
    return id;
  }

  std::optional<NodeId> find(std::string_view label) const {
    auto it = ids_.find(std::string(label));
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }

  const std::string& label(NodeId id) const { return labels_.at(id); }
  std::size_t size() const noexcept { return labels_.size(); }

  friend bool operator==(const LabelMap& a, const LabelMap& b) {
    return a.labels_ == b.labels_;
  }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, NodeId> ids_;
};

struct GrowthTrace {
  std::vector<Edge> seed_edges;
  std::vector<OuterEvent> events;
  LabelMap labels;

  std::size_t node_count() const noexcept { return labels.size(); }

  friend bool operator==(const GrowthTrace&, const GrowthTrace&) = default;
};

// Incrementally assembles a GrowthTrace from labelled edges, classifying
// event edges and rejecting anything that would break the simple-graph
// growth invariants. Errors carry line 0; parse_trace adds line numbers.
class TraceBuilder {
 public:
  void add_seed_edge(std::string_view a, std::string_view b) {
    if (!trace_.events.empty()) {
      throw TraceError(TraceError::Kind::kSyntax, 0,
                       "seed edge after the first event");
    }
    if (a == b) {
      throw TraceError(TraceError::Kind::kSelfLoop, 0,
                       "self-loop on '" + std::string(a) + "'");
    }
    const NodeId u = intern(a);
    const NodeId v = intern(b);
    insert(u, v);
    trace_.seed_edges.push_back({u, v});
  }

  // Classifies the edge as an outer operation and appends it:
  //  - one endpoint unseen            -> kNewNode (unseen endpoint is source)
  //  - one endpoint is the newest     -> kNewestNode (newest is source)
  // The newest node is the source of the latest kNewNode event; seed nodes
  // never count as newest.
  //  - otherwise                      -> kInnerEdge
  OuterEvent add_event_edge(std::string_view a, std::string_view b) {
    if (a == b) {
      throw TraceError(TraceError::Kind::kSelfLoop, 0,
                       "self-loop on '" + std::string(a) + "'");
    }
    const auto ia = trace_.labels.find(a);
    const auto ib = trace_.labels.find(b);
    OuterEvent ev;
    if (!ia && !ib) {
      throw TraceError(TraceError::Kind::kDisconnectedNewNode, 0,
                       "both endpoints '" + std::string(a) + "' and '" +
                           std::string(b) + "' are new");
    } else if (!ia || !ib) {
      ev.kind = EventKind::kNewNode;
      ev.target = ia ? *ia : *ib;
      ev.source = intern(ia ? b : a);
      graph_.set_newest(ev.source);
    } else {
      const auto newest = graph_.newest_node();
      if (newest && (*ia == *newest || *ib == *newest)) {
        ev.kind = EventKind::kNewestNode;
        ev.source = *newest;
        ev.target = *ia == *newest ? *ib : *ia;
      } else {
        ev.kind = EventKind::kInnerEdge;
        ev.source = *ia;
        ev.target = *ib;
      }
    }
    insert(ev.source, ev.target);
    trace_.events.push_back(ev);
    return ev;
  }

  const EvolvingGraph& graph() const noexcept { return graph_; }
  GrowthTrace finish() && { return std::move(trace_); }

 private:
  NodeId intern(std::string_view label) {
    const NodeId id = trace_.labels.intern(label);
    graph_.ensure_node(id);
    return id;
  }

  void insert(NodeId u, NodeId v) {
    if (graph_.has_edge(u, v)) {
      throw TraceError(TraceError::Kind::kDuplicateEdge, 0,
                       "duplicate edge '" + trace_.labels.label(u) + "' '" +
                           trace_.labels.label(v) + "'");
    }
    graph_.add_edge(u, v);
  }

  GrowthTrace trace_;
  EvolvingGraph graph_;
};

using LabelledEdge = std::pair<std::string, std::string>;

// Classifies arrival-ordered edges following the given seed.
inline std::vector<OuterEvent> infer_events(
    const std::vector<LabelledEdge>& seed,
    const std::vector<LabelledEdge>& edges) {
  TraceBuilder builder;
  for (const auto& [a, b] : seed) builder.add_seed_edge(a, b);
  std::vector<OuterEvent> out;
  out.reserve(edges.size());
  for (const auto& [a, b] : edges) out.push_back(builder.add_event_edge(a, b));
  return out;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace detail

inline GrowthTrace parse_trace(std::istream& in) {
  enum class Section { kNone, kSeed, kEvents } section = Section::kNone;
  TraceBuilder builder;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line == "SEED") {
      if (section != Section::kNone) {
        throw TraceError(TraceError::Kind::kSyntax, line_no,
                         "unexpected SEED marker");
      }
      section = Section::kSeed;
      continue;
    }
    if (line == "EVENTS") {
      if (section != Section::kSeed) {
        throw TraceError(TraceError::Kind::kSyntax, line_no,
                         "EVENTS must follow the SEED section");
      }
      section = Section::kEvents;
      continue;
    }
    if (section == Section::kNone) {
      throw TraceError(TraceError::Kind::kSyntax, line_no,
                       "edge before SEED marker");
    }
    const auto tokens = detail::split_ws(line);
    if (tokens.size() != 2) {
      throw TraceError(TraceError::Kind::kSyntax, line_no,
                       "expected two labels, got " +
                           std::to_string(tokens.size()) + " tokens");
    }
    try {
      if (section == Section::kSeed) {
        builder.add_seed_edge(tokens[0], tokens[1]);
      } else {
        builder.add_event_edge(tokens[0], tokens[1]);
      }
    } catch (const TraceError& e) {
      throw TraceError(e.kind(), line_no, e.what());
    }
  }
  if (in.bad()) {
    throw std::runtime_error("read error after line " + std::to_string(line_no));
  }
  if (section == Section::kNone) {
    throw TraceError(TraceError::Kind::kSyntax, line_no, "missing SEED section");
  }
  return std::move(builder).finish();
}

inline GrowthTrace parse_trace(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_trace(in);
}

// Canonical form: optional '#' header lines, SEED, seed edges, then EVENTS
// and event edges as "source target" (omitted when there are no events).
inline void write_trace(const GrowthTrace& trace, std::ostream& out,
                        const std::vector<std::string>& header = {}) {
  for (const auto& h : header) out << "# " << h << '\n';
  out << "SEED\n";
  for (const auto& e : trace.seed_edges) {
    out << trace.labels.label(e.u) << ' ' << trace.labels.label(e.v) << '\n';
  }
  if (!trace.events.empty()) {
    out << "EVENTS\n";
    for (const auto& ev : trace.events) {
      out << trace.labels.label(ev.source) << ' '
          << trace.labels.label(ev.target) << '\n';
    }
  }
  if (!out) throw std::runtime_error("failed writing trace");
}

inline std::string write_trace(const GrowthTrace& trace) {
  std::ostringstream out;
  write_trace(trace, out);
  return out.str();
}

}  // namespace netlik

#endif  // NETLIK_TRACE_HPP_
