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

#ifndef NETLIK_GENERATOR_HPP_
#define NETLIK_GENERATOR_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "netlik/graph.hpp"
#include "netlik/likelihood.hpp"
#include "netlik/model.hpp"
#include "netlik/replay.hpp"
#include "netlik/trace.hpp"

namespace netlik {

class GenerationError : public std::runtime_error {
 public:
  enum class Kind { kExhaustedChoiceSet, kDegenerateDistribution, kBadConfig };

  GenerationError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

// All randomness comes from one seeded 64-bit Mersenne twister. The
// conversions below are spelled out so results do not depend on the
// standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform in [0, n), n > 0.
  std::uint64_t index(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(engine_()) * n) >> 64);
  }

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
};

// Draws position j with probability probs[j] by inverting the cumulative sum.
inline std::size_t weighted_sample_index(std::span<const double> probs,
                                         Rng& rng) {
  if (probs.empty()) {
    throw GenerationError(GenerationError::Kind::kDegenerateDistribution,
                          "empty distribution");
  }
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw GenerationError(GenerationError::Kind::kDegenerateDistribution,
                            "negative or non-finite probability");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kWeightSumTolerance) {
    throw GenerationError(GenerationError::Kind::kDegenerateDistribution,
                          "probabilities sum to " + detail::format_double(sum));
  }
  const double u = rng.uniform() * sum;
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t j = 0; j < probs.size(); ++j) {
    if (probs[j] <= 0.0) continue;
    cumulative += probs[j];
    last_positive = j;
    if (u < cumulative) return j;
  }
  return last_positive;
}

inline NodeId weighted_sample(std::span<const NodeProbability> probs,
                              Rng& rng) {
  std::vector<double> p;
  p.reserve(probs.size());
  for (const auto& np : probs) p.push_back(np.probability);
  return probs[weighted_sample_index(p, rng)].node;
}

// Outer-model drivers.

// Each new node arrives with k edges, k uniform in [min_edges, max_edges]:
// one new-node attachment followed by k-1 newest-node attachments.
struct AttachDriver {
  std::uint32_t min_edges = 1;
  std::uint32_t max_edges = 1;
};

// Every event independently picks an operation with these relative weights.
// An operation with no legal choice is redrawn.
struct MixedDriver {
  double new_node = 1.0;
  double newest_node = 0.0;
  double inner_edge = 0.0;
};

// Replays an observed sequence of operation kinds.
struct ReplayDriver {
  std::vector<EventKind> kinds;

  static ReplayDriver of(const GrowthTrace& trace) {
    ReplayDriver d;
    for (const auto& ev : trace.events) d.kinds.push_back(ev.kind);
    return d;
  }
};

using OuterDriver = std::variant<AttachDriver, MixedDriver, ReplayDriver>;

// Seed graph: clique on n nodes labelled 0..n-1.
inline GrowthTrace clique_seed(std::size_t n) {
  TraceBuilder b;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      b.add_seed_edge(std::to_string(i), std::to_string(j));
    }
  }
  return std::move(b).finish();
}

struct GrowConfig {
  GrowthTrace seed = clique_seed(3);  // only the seed section is used
  OuterDriver driver = AttachDriver{};
  InnerModel node_model;  // new-node and newest-node attachments
  InnerModel edge_model;  // both ends of inner edges
  std::size_t target_edges = 0;  // events to generate; 0 = replay length
  std::uint64_t rng_seed = 0;
  bool seed_selections = false;
};

struct Preset {
  std::string name;
  InnerModel node_model;
  InnerModel edge_model;
  OuterDriver driver;
};

inline std::vector<Preset> presets() {
  const InnerModel theta1 = parse_model("0.5*pfp(0.05),0.5*triangle");
  const InnerModel theta2 =
      parse_model("0.25*null,0.25*triangle,0.25*singleton,0.25*doubleton");
  return {
      {"paper-theta1", theta1, theta1, AttachDriver{3, 3}},
      {"paper-theta2", theta2, theta2, AttachDriver{1, 2}},
  };
}

inline std::optional<Preset> find_preset(std::string_view name) {
  for (auto& p : presets()) {
    if (p.name == name) return p;
  }
  return std::nullopt;
}

class Grower {
 public:
  explicit Grower(const GrowConfig& config)
      : config_(config),
        rng_(config.rng_seed),
        node_eval_(config.node_model),
        edge_eval_(config.edge_model) {
    require_valid(config.node_model);
    require_valid(config.edge_model);
    if (!config.seed.events.empty() || config.seed.seed_edges.empty()) {
      throw GenerationError(GenerationError::Kind::kBadConfig,
                            "seed must be a non-empty seed-only trace");
    }
    trace_.seed_edges = config.seed.seed_edges;
    trace_.labels = config.seed.labels;
    ReplayOptions opt;
    opt.seed_selections = config.seed_selections;
    Replayer seed(trace_, opt);
    graph_ = seed.graph();
  }

  GrowthTrace run() && {
    std::visit([this](const auto& d) { drive(d); }, config_.driver);
    return std::move(trace_);
  }

 private:
  std::size_t target() const { return config_.target_edges; }
  std::size_t emitted() const { return trace_.events.size(); }

  void drive(const AttachDriver& d) {
    if (d.min_edges < 1 || d.max_edges < d.min_edges) {
      throw GenerationError(GenerationError::Kind::kBadConfig,
                            "attach driver needs 1 <= min <= max");
    }
    while (emitted() < target()) {
      const std::uint32_t k =
          d.min_edges +
          static_cast<std::uint32_t>(rng_.index(d.max_edges - d.min_edges + 1));
      attach_new();
      for (std::uint32_t j = 1; j < k && emitted() < target(); ++j) {
        if (!attach_newest()) exhausted("newest-node");
      }
    }
  }

  void drive(const MixedDriver& d) {
    const double w[3] = {d.new_node, d.newest_node, d.inner_edge};
    double total = 0.0;
    for (double x : w) {
      if (!(x >= 0.0) || !std::isfinite(x)) {
        throw GenerationError(GenerationError::Kind::kBadConfig,
                              "mixed driver weights must be non-negative");
      }
      total += x;
    }
    if (!(total > 0.0)) {
      throw GenerationError(GenerationError::Kind::kBadConfig,
                            "mixed driver weights sum to zero");
    }
    while (emitted() < target()) {
      bool failed[3] = {false, false, false};
      for (;;) {
        double avail = 0.0;
        for (int i = 0; i < 3; ++i) avail += failed[i] ? 0.0 : w[i];
        if (!(avail > 0.0)) exhausted("any");
        double u = rng_.uniform() * avail;
        int op = -1;
        for (int i = 0; i < 3; ++i) {
          if (failed[i] || w[i] <= 0.0) continue;
          op = i;
          if (u < w[i]) break;
          u -= w[i];
        }
        if (apply(static_cast<EventKind>(op))) break;
        failed[op] = true;
      }
    }
  }

  void drive(const ReplayDriver& d) {
    if (d.kinds.empty()) {
      throw GenerationError(GenerationError::Kind::kBadConfig,
                            "replay driver has no events");
    }
    const std::size_t n = target() ? target() : d.kinds.size();
    if (n > d.kinds.size()) {
      throw GenerationError(GenerationError::Kind::kBadConfig,
                            "replay driver has only " +
                                std::to_string(d.kinds.size()) + " events");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!apply(d.kinds[i])) exhausted(std::string(to_string(d.kinds[i])));
    }
  }

  [[noreturn]] void exhausted(const std::string& op) {
    throw GenerationError(GenerationError::Kind::kExhaustedChoiceSet,
                          "no legal choice for " + op + " operation after " +
                              std::to_string(emitted()) + " events");
  }

  bool apply(EventKind kind) {
    switch (kind) {
      case EventKind::kNewNode:
        return attach_new();
      case EventKind::kNewestNode:
        return attach_newest();
      case EventKind::kInnerEdge:
        return inner_edge();
    }
    return false;
  }

  NodeId draw(ModelEvaluator& eval, const std::vector<NodeId>& cand) {
    eval.probabilities(graph_, cand, probs_);
    return cand[weighted_sample_index(probs_, rng_)];
  }

  bool attach_new() {
    builder_.attachment(graph_, std::nullopt, cand_);
    if (cand_.empty()) return false;
    const NodeId target = draw(node_eval_, cand_);
    const NodeId source = graph_.add_node();
    graph_.set_newest(source);
    trace_.labels.intern(fresh_label(source));
    graph_.record_selection(target);
    graph_.add_edge(source, target);
    trace_.events.push_back({EventKind::kNewNode, source, target});
    return true;
  }

  bool attach_newest() {
    const auto newest = graph_.newest_node();
    if (!newest) return false;
    const NodeId source = *newest;
    builder_.attachment(graph_, source, cand_);
    if (cand_.empty()) return false;
    const NodeId target = draw(node_eval_, cand_);
    graph_.record_selection(target);
    graph_.add_edge(source, target);
    trace_.events.push_back({EventKind::kNewestNode, source, target});
    return true;
  }

  bool inner_edge() {
    builder_.edge_start(graph_, cand_);
    if (cand_.empty()) return false;
    const NodeId x = draw(edge_eval_, cand_);
    builder_.edge_end(graph_, x, cand_);
    const NodeId y = draw(edge_eval_, cand_);
    graph_.record_selection(x);
    graph_.record_selection(y);
    graph_.add_edge(x, y);
    trace_.events.push_back({EventKind::kInnerEdge, x, y});
    return true;
  }

  std::string fresh_label(NodeId id) const {
    std::string label = std::to_string(id);
    while (trace_.labels.find(label)) label = "n" + label;
    return label;
  }

  const GrowConfig& config_;
  Rng rng_;
  ModelEvaluator node_eval_;
  ModelEvaluator edge_eval_;
  ChoiceSetBuilder builder_;
  GrowthTrace trace_;
  EvolvingGraph graph_;
  std::vector<NodeId> cand_;
  std::vector<double> probs_;
};

// Grows a synthetic trace. Node choices are drawn over the same choice sets
// the likelihood replay uses, so the generating model never assigns zero
// probability to its own output.
inline GrowthTrace grow(const GrowConfig& config) {
  return Grower(config).run();
}

}  // namespace netlik

#endif  // NETLIK_GENERATOR_HPP_
