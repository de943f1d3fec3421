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

// Exact log-likelihood of an observed growth trace under an inner model.
//
// The likelihood of a trace is the product over node choices of the
// probability the model gave the node actually chosen. Everything here is
// accumulated as natural logs. An inner edge (x,y) is a start choice followed
// by an end choice, and since the order is not observed both orders are
// summed: p(x|S1) p(y|S2(x)) + p(y|S1) p(x|S2(y)). It counts as two choices.

#ifndef NETLIK_LIKELIHOOD_HPP_
#define NETLIK_LIKELIHOOD_HPP_

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "netlik/graph.hpp"
#include "netlik/model.hpp"
#include "netlik/replay.hpp"
#include "netlik/trace.hpp"

namespace netlik {

class LikelihoodError : public std::runtime_error {
 public:
  enum class Kind { kChosenNotInChoiceSet, kMismatchedTraces, kZeroProbability };

  LikelihoodError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

// Separate inner models per outer operation. New-node and newest-node
// attachments usually share one model.
struct ModelSet {
  InnerModel new_node;
  InnerModel newest_node;
  InnerModel inner_edge;

  static ModelSet uniform(const InnerModel& m) { return {m, m, m}; }
  static ModelSet split(const InnerModel& node, const InnerModel& edge) {
    return {node, node, edge};
  }
};

struct LikelihoodReport {
  double log_likelihood = 0.0;       // l, natural log
  std::size_t choices = 0;           // t
  double deviance = 0.0;             // D = -2 l
  double null_log_likelihood = 0.0;  // l0 under the uniform model
  double null_deviance = 0.0;        // D0 = -2 (l - l0)
  double c0 = 1.0;                   // exp((l - l0) / t)
  std::size_t zero_probability_choices = 0;
  // Choices where some component had no support and fell back to uniform.
  std::size_t fallback_choices = 0;
};

// Per-choice likelihood ratio exp((l - l_A) / t) of `report` against `rival`.
inline double per_choice_ratio(const LikelihoodReport& report,
                               const LikelihoodReport& rival) {
  if (report.choices != rival.choices) {
    throw LikelihoodError(LikelihoodError::Kind::kMismatchedTraces,
                          "reports cover different numbers of choices");
  }
  if (report.zero_probability_choices || rival.zero_probability_choices) {
    throw LikelihoodError(LikelihoodError::Kind::kZeroProbability,
                          "ratio undefined with zero-probability choices");
  }
  if (report.choices == 0) return 1.0;
  return std::exp((report.log_likelihood - rival.log_likelihood) /
                  static_cast<double>(report.choices));
}

// ln p(chosen | m) over candidate set s, or nullopt when the model gives the
// chosen node zero probability.
inline std::optional<double> choice_log_likelihood(const InnerModel& m,
                                                   NodeId chosen,
                                                   std::span<const NodeId> s,
                                                   const EvolvingGraph& g) {
  for (const auto& np : probability_vector(m, s, g)) {
    if (np.node == chosen) {
      if (np.probability <= 0.0) return std::nullopt;
      return std::log(np.probability);
    }
  }
  throw LikelihoodError(LikelihoodError::Kind::kChosenNotInChoiceSet,
                        "node " + std::to_string(chosen) +
                            " is not in the choice set");
}

namespace detail {

inline double probability_of(const std::vector<NodeProbability>& probs,
                             NodeId node) {
  for (const auto& np : probs) {
    if (np.node == node) return np.probability;
  }
  throw LikelihoodError(LikelihoodError::Kind::kChosenNotInChoiceSet,
                        "node " + std::to_string(node) +
                            " is not in the choice set");
}

}  // namespace detail

// ln of the probability that an inner edge {x,y} is added to g, with start
// nodes drawn by m_src and end nodes by m_dst; nullopt for probability zero.
inline std::optional<double> edge_log_likelihood(
    const InnerModel& m_src, const InnerModel& m_dst, Edge edge,
    const EvolvingGraph& g, ChoiceSetMode mode = ChoiceSetMode::kSimple) {
  ChoiceSetBuilder builder(mode);
  std::vector<NodeId> start, end_x, end_y;
  builder.edge_start(g, start);
  builder.edge_end(g, edge.u, end_x);
  builder.edge_end(g, edge.v, end_y);
  if (start.empty() || end_x.empty() || end_y.empty()) {
    throw ModelError(ModelError::Kind::kEmptyChoiceSet,
                     "no legal inner edge choice");
  }
  const auto p_start = probability_vector(m_src, start, g);
  const double p =
      detail::probability_of(p_start, edge.u) *
          detail::probability_of(probability_vector(m_dst, end_x, g), edge.v) +
      detail::probability_of(p_start, edge.v) *
          detail::probability_of(probability_vector(m_dst, end_y, g), edge.u);
  if (p <= 0.0) return std::nullopt;
  return std::log(p);
}

// ---------------------------------------------------------------------------
// Replay with per-component probabilities.
//
// A mixture's probability for an observed choice is linear in the weights,
// so one replay that records every component's normalised probability of
// each observed choice is enough to evaluate any weighting of those
// components. trace_log_likelihood and the grid sweep both go through this.

struct ComponentStructure {
  std::vector<Component> new_node;
  std::vector<Component> newest_node;
  std::vector<Component> inner_edge;

  static ComponentStructure of(const ModelSet& m) {
    return {m.new_node.components(), m.newest_node.components(),
            m.inner_edge.components()};
  }

  friend bool operator==(const ComponentStructure&,
                         const ComponentStructure&) = default;
};

// Per event, the stored block is
//   attachments: [q_1..q_k, null]
//   inner edges: [q(x|S1) | q(y|S1) | q(y|S2(x)) | q(x|S2(y))], each block
//                k values followed by the null probability.
struct ComponentLikelihoods {
  ComponentStructure structure;
  std::vector<EventKind> kinds;
  std::vector<std::size_t> offsets;
  std::vector<double> values;
  std::size_t fallback_choices = 0;
};

inline ComponentLikelihoods evaluate_components(
    const GrowthTrace& trace, const ComponentStructure& structure,
    const ReplayOptions& options = {}) {
  ComponentLikelihoods out;
  out.structure = structure;
  out.kinds.reserve(trace.events.size());
  out.offsets.reserve(trace.events.size());

  ComponentEvaluator new_eval(structure.new_node);
  ComponentEvaluator newest_eval(structure.newest_node);
  ComponentEvaluator edge_eval(structure.inner_edge);
  ChoiceSetBuilder builder(options.choice_set);
  std::vector<NodeId> cand, cand_y;

  auto push_block = [&](ComponentEvaluator& eval, const EvolvingGraph& g,
                        NodeId chosen, std::size_t set_size) {
    for (std::size_t k = 0; k < eval.size(); ++k) {
      out.values.push_back(eval.normalized(k, g, chosen));
    }
    out.values.push_back(1.0 / static_cast<double>(set_size));
  };
  auto require = [](const std::vector<NodeId>& s) {
    if (s.empty()) {
      throw ModelError(ModelError::Kind::kEmptyChoiceSet,
                       "empty choice set during replay");
    }
  };

  Replayer replay(trace, options);
  while (!replay.done()) {
    const EvolvingGraph& g = replay.graph();
    const OuterEvent& ev = replay.next();
    out.kinds.push_back(ev.kind);
    out.offsets.push_back(out.values.size());
    std::size_t fallback = 0;
    switch (ev.kind) {
      case EventKind::kNewNode:
      case EventKind::kNewestNode: {
        const bool fresh = ev.kind == EventKind::kNewNode;
        builder.attachment(g, fresh ? std::nullopt : std::optional(ev.source),
                           cand);
        require(cand);
        auto& eval = fresh ? new_eval : newest_eval;
        eval.prepare(g, cand);
        fallback += eval.fallbacks();
        push_block(eval, g, ev.target, cand.size());
        break;
      }
      case EventKind::kInnerEdge: {
        builder.edge_start(g, cand);
        require(cand);
        edge_eval.prepare(g, cand);
        fallback += edge_eval.fallbacks();
        push_block(edge_eval, g, ev.source, cand.size());
        push_block(edge_eval, g, ev.target, cand.size());
        builder.edge_end(g, ev.source, cand);
        builder.edge_end(g, ev.target, cand_y);
        require(cand);
        require(cand_y);
        edge_eval.prepare(g, cand);
        fallback += edge_eval.fallbacks();
        push_block(edge_eval, g, ev.target, cand.size());
        edge_eval.prepare(g, cand_y);
        fallback += edge_eval.fallbacks();
        push_block(edge_eval, g, ev.source, cand_y.size());
        break;
      }
    }
    if (fallback) ++out.fallback_choices;
    replay.apply();
  }
  return out;
}

struct ModelWeights {
  std::vector<double> new_node;
  std::vector<double> newest_node;
  std::vector<double> inner_edge;

  static ModelWeights of(const ModelSet& m) {
    return {m.new_node.weights(), m.newest_node.weights(),
            m.inner_edge.weights()};
  }
};

inline LikelihoodReport combine(const ComponentLikelihoods& rec,
                                const ModelWeights& w) {
  LikelihoodReport r;
  double l = 0.0;
  double l0 = 0.0;
  static constexpr double kOne[] = {1.0};
  for (std::size_t e = 0; e < rec.kinds.size(); ++e) {
    const double* block = rec.values.data() + rec.offsets[e];
    switch (rec.kinds[e]) {
      case EventKind::kNewNode:
      case EventKind::kNewestNode: {
        const auto& wk =
            rec.kinds[e] == EventKind::kNewNode ? w.new_node : w.newest_node;
        const std::size_t k = wk.size();
        const double p = mix(wk, {block, k});
        const double p0 = mix(kOne, {block + k, 1});
        if (p > 0.0) {
          l += std::log(p);
        } else {
          ++r.zero_probability_choices;
        }
        l0 += std::log(p0);
        r.choices += 1;
        break;
      }
      case EventKind::kInnerEdge: {
        const auto& wk = w.inner_edge;
        const std::size_t k = wk.size();
        const std::size_t stride = k + 1;
        auto pair_prob = [&](std::span<const double> weights, std::size_t off) {
          const std::size_t n = weights.size();
          return mix(weights, {block + off, n}) *
                     mix(weights, {block + 2 * stride + off, n}) +
                 mix(weights, {block + stride + off, n}) *
                     mix(weights, {block + 3 * stride + off, n});
        };
        const double p = pair_prob(wk, 0);
        const double p0 = pair_prob(kOne, k);
        if (p > 0.0) {
          l += std::log(p);
        } else {
          ++r.zero_probability_choices;
        }
        l0 += std::log(p0);
        r.choices += 2;
        break;
      }
    }
  }
  if (r.zero_probability_choices) l = -std::numeric_limits<double>::infinity();
  r.log_likelihood = l;
  r.null_log_likelihood = l0;
  r.deviance = -2.0 * l + 0.0;  // + 0.0 turns -0 into 0
  r.null_deviance = -2.0 * (l - l0) + 0.0;
  r.c0 = r.choices ? std::exp((l - l0) / static_cast<double>(r.choices)) : 1.0;
  r.fallback_choices = rec.fallback_choices;
  return r;
}

struct LikelihoodOptions {
  ReplayOptions replay;
  // When positive every model is smoothed to (1-e) m + e null first.
  double epsilon = 0.0;
  // Evaluate models that fail validate(), e.g. raw regression output.
  bool allow_invalid = false;
};

inline ModelSet prepare_models(const ModelSet& models,
                               const LikelihoodOptions& options) {
  ModelSet m{with_epsilon(models.new_node, options.epsilon),
             with_epsilon(models.newest_node, options.epsilon),
             with_epsilon(models.inner_edge, options.epsilon)};
  if (!options.allow_invalid) {
    require_valid(m.new_node);
    require_valid(m.newest_node);
    require_valid(m.inner_edge);
  }
  return m;
}

inline LikelihoodReport trace_log_likelihood(
    const ModelSet& models, const GrowthTrace& trace,
    const LikelihoodOptions& options = {}) {
  const ModelSet m = prepare_models(models, options);
  const auto rec =
      evaluate_components(trace, ComponentStructure::of(m), options.replay);
  return combine(rec, ModelWeights::of(m));
}

inline LikelihoodReport trace_log_likelihood(
    const InnerModel& model, const GrowthTrace& trace,
    const LikelihoodOptions& options = {}) {
  return trace_log_likelihood(ModelSet::uniform(model), trace, options);
}

}  // namespace netlik

#endif  // NETLIK_LIKELIHOOD_HPP_
