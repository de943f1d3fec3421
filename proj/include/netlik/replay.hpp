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

#ifndef NETLIK_REPLAY_HPP_
#define NETLIK_REPLAY_HPP_

#include <algorithm>
#include <cstddef>

#include "netlik/graph.hpp"
#include "netlik/model.hpp"
#include "netlik/trace.hpp"

namespace netlik {

struct ReplayOptions {
  ChoiceSetMode choice_set = ChoiceSetMode::kSimple;
  // Seed edges normally leave the selection history empty. When set, both
  // endpoints of each seed edge are recorded in file order.
  bool seed_selections = false;
};

// Steps through a trace one event at a time. The seed is applied on
// construction; next() is the event about to happen on graph().
class Replayer {
 public:
  Replayer(const GrowthTrace& trace, const ReplayOptions& options = {})
      : trace_(trace) {
    for (const auto& e : trace.seed_edges) {
      graph_.ensure_node(std::max(e.u, e.v));
      graph_.add_edge(e.u, e.v);
      if (options.seed_selections) {
        graph_.record_selection(e.u);
        graph_.record_selection(e.v);
      }
    }
  }

  const EvolvingGraph& graph() const noexcept { return graph_; }
  bool done() const noexcept { return position_ >= trace_.events.size(); }
  std::size_t position() const noexcept { return position_; }
  const OuterEvent& next() const { return trace_.events.at(position_); }

  void apply() {
    const OuterEvent& ev = next();
    switch (ev.kind) {
      case EventKind::kNewNode:
        graph_.ensure_node(ev.source);
        graph_.set_newest(ev.source);
        graph_.record_selection(ev.target);
        break;
      case EventKind::kNewestNode:
        graph_.record_selection(ev.target);
        break;
      case EventKind::kInnerEdge:
        graph_.record_selection(ev.source);
        graph_.record_selection(ev.target);
        break;
    }
    graph_.add_edge(ev.source, ev.target);
    ++position_;
  }

 private:
  const GrowthTrace& trace_;
  EvolvingGraph graph_;
  std::size_t position_ = 0;
};

}  // namespace netlik

#endif  // NETLIK_REPLAY_HPP_
