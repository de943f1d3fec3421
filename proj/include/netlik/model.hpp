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

// Inner models: weighted linear mixtures of node-choice components, and the
// choice sets they are normalised over.

#ifndef NETLIK_MODEL_HPP_
#define NETLIK_MODEL_HPP_

#include <charconv>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "netlik/graph.hpp"
#include "netlik/trace.hpp"

namespace netlik {

class ModelError : public std::runtime_error {
 public:
  enum class Kind { kParse, kInvalidModel, kEmptyChoiceSet };

  ModelError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

namespace detail {

// Shortest decimal form that round-trips.
inline std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty()) {
    return std::nullopt;
  }
  return v;
}

}  // namespace detail

enum class ComponentKind {
  kNull,
  kDegree,
  kTriangle,
  kSingleton,
  kDoubleton,
  kRecent,
  kPfp,
};

struct Component {
  ComponentKind kind = ComponentKind::kNull;
  std::size_t window = 1;  // kRecent only
  double delta = 0.0;      // kPfp only

  static Component null() { return {ComponentKind::kNull}; }
  static Component degree() { return {ComponentKind::kDegree}; }
  static Component triangle() { return {ComponentKind::kTriangle}; }
  static Component singleton() { return {ComponentKind::kSingleton}; }
  static Component doubleton() { return {ComponentKind::kDoubleton}; }
  static Component recent(std::size_t n) { return {ComponentKind::kRecent, n}; }
  static Component pfp(double delta) {
    return {ComponentKind::kPfp, 1, delta};
  }

  friend bool operator==(const Component& a, const Component& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == ComponentKind::kRecent) return a.window == b.window;
    if (a.kind == ComponentKind::kPfp) return a.delta == b.delta;
    return true;
  }
};

inline std::string to_string(const Component& c) {
  switch (c.kind) {
    case ComponentKind::kNull:
      return "null";
    case ComponentKind::kDegree:
      return "degree";
    case ComponentKind::kTriangle:
      return "triangle";
    case ComponentKind::kSingleton:
      return "singleton";
    case ComponentKind::kDoubleton:
      return "doubleton";
    case ComponentKind::kRecent:
      return "recent(" + std::to_string(c.window) + ")";
    case ComponentKind::kPfp:
      return "pfp(" + detail::format_double(c.delta) + ")";
  }
  return "?";
}

// d^(1 + delta * log10 d), with 0 at d = 0.
inline double pfp_weight(std::size_t degree, double delta) {
  if (degree == 0) return 0.0;
  const double d = static_cast<double>(degree);
  return std::pow(d, 1.0 + delta * std::log10(d));
}

// Unnormalised affinity of component c for node i.
inline double raw_weight(const Component& c, NodeId i, const EvolvingGraph& g) {
  if (!g.has_node(i)) {
    throw GraphError(GraphError::Kind::kUnknownNode,
                     "unknown node " + std::to_string(i));
  }
  const std::size_t d = g.degree(i);
  switch (c.kind) {
    case ComponentKind::kNull:
      return 1.0;
    case ComponentKind::kDegree:
      return static_cast<double>(d);
    case ComponentKind::kTriangle:
      return static_cast<double>(g.triangles(i));
    case ComponentKind::kSingleton:
      return d == 1 ? 1.0 : 0.0;
    case ComponentKind::kDoubleton:
      return d == 2 ? 1.0 : 0.0;
    case ComponentKind::kRecent:
      return g.selected_within(i, c.window) ? 1.0 : 0.0;
    case ComponentKind::kPfp:
      return pfp_weight(d, c.delta);
  }
  return 0.0;
}

struct Term {
  double weight = 0.0;
  Component component;

  friend bool operator==(const Term&, const Term&) = default;
};

struct InnerModel {
  std::vector<Term> terms;

  std::vector<Component> components() const {
    std::vector<Component> out;
    out.reserve(terms.size());
    for (const auto& t : terms) out.push_back(t.component);
    return out;
  }

  std::vector<double> weights() const {
    std::vector<double> out;
    out.reserve(terms.size());
    for (const auto& t : terms) out.push_back(t.weight);
    return out;
  }

  friend bool operator==(const InnerModel&, const InnerModel&) = default;
};

inline constexpr double kWeightSumTolerance = 1e-9;

struct ValidityReport {
  bool valid = true;
  double weight_sum = 0.0;
  std::vector<std::size_t> out_of_range;  // term indices with weight outside (0,1]
  std::vector<std::size_t> duplicates;    // term indices repeating an earlier component
  std::vector<std::size_t> bad_params;    // recent(0) or non-finite pfp delta
  bool empty = false;

  std::string message() const {
    if (valid) return "valid";
    std::string msg;
    auto add = [&](const std::string& s) {
      if (!msg.empty()) msg += "; ";
      msg += s;
    };
    if (empty) add("model has no terms");
    if (std::abs(weight_sum - 1.0) > kWeightSumTolerance) {
      add("weights sum to " + detail::format_double(weight_sum) +
          ", expected 1");
    }
    if (!out_of_range.empty()) add("weights outside (0,1]");
    if (!duplicates.empty()) add("duplicate components");
    if (!bad_params.empty()) add("invalid component parameter");
    return msg;
  }
};

// A single-term model carries weight 1, so the accepted range is (0,1].
inline ValidityReport validate(const InnerModel& m) {
  ValidityReport r;
  r.empty = m.terms.empty();
  for (std::size_t k = 0; k < m.terms.size(); ++k) {
    const auto& t = m.terms[k];
    r.weight_sum += t.weight;
    if (!(t.weight > 0.0 && t.weight <= 1.0)) r.out_of_range.push_back(k);
    for (std::size_t j = 0; j < k; ++j) {
      if (m.terms[j].component == t.component) {
        r.duplicates.push_back(k);
        break;
      }
    }
    const auto& c = t.component;
    if ((c.kind == ComponentKind::kRecent && c.window < 1) ||
        (c.kind == ComponentKind::kPfp && !std::isfinite(c.delta))) {
      r.bad_params.push_back(k);
    }
  }
  r.valid = !r.empty && r.out_of_range.empty() && r.duplicates.empty() &&
            r.bad_params.empty() &&
            std::abs(r.weight_sum - 1.0) <= kWeightSumTolerance;
  return r;
}

inline void require_valid(const InnerModel& m) {
  const auto r = validate(m);
  if (!r.valid) throw ModelError(ModelError::Kind::kInvalidModel, r.message());
}

// (1 - epsilon) * m + epsilon * null, merging into an existing null term.
inline InnerModel with_epsilon(const InnerModel& m, double epsilon) {
  if (!(epsilon >= 0.0 && epsilon < 1.0)) {
    throw ModelError(ModelError::Kind::kInvalidModel,
                     "epsilon must lie in [0,1)");
  }
  if (epsilon == 0.0) return m;
  InnerModel out;
  bool merged = false;
  for (const auto& t : m.terms) {
    Term scaled{t.weight * (1.0 - epsilon), t.component};
    if (t.component.kind == ComponentKind::kNull) {
      scaled.weight += epsilon;
      merged = true;
    }
    out.terms.push_back(scaled);
  }
  if (!merged) out.terms.push_back({epsilon, Component::null()});
  return out;
}

// ---------------------------------------------------------------------------
// Model description strings: comma-separated "weight*component" terms, e.g.
// "0.5*pfp(0.05), 0.5*triangle". A bare component has weight 1.

namespace detail {

inline Component parse_component(std::string_view s) {
  s = trim(s);
  std::string_view name = s;
  std::optional<std::string_view> arg;
  if (const auto open = s.find('('); open != std::string_view::npos) {
    if (s.back() != ')') {
      throw ModelError(ModelError::Kind::kParse,
                       "missing ')' in '" + std::string(s) + "'");
    }
    name = trim(s.substr(0, open));
    arg = trim(s.substr(open + 1, s.size() - open - 2));
  }
  auto no_arg = [&](Component c) {
    if (arg) {
      throw ModelError(ModelError::Kind::kParse,
                       "component '" + std::string(name) +
                           "' takes no parameter");
    }
    return c;
  };
  if (name == "null") return no_arg(Component::null());
  if (name == "degree") return no_arg(Component::degree());
  if (name == "triangle") return no_arg(Component::triangle());
  if (name == "singleton") return no_arg(Component::singleton());
  if (name == "doubleton") return no_arg(Component::doubleton());
  if (name == "recent" || name == "pfp") {
    if (!arg) {
      throw ModelError(ModelError::Kind::kParse,
                       "component '" + std::string(name) +
                           "' needs a parameter");
    }
    const auto v = parse_double(*arg);
    if (!v) {
      throw ModelError(ModelError::Kind::kParse,
                       "bad parameter '" + std::string(*arg) + "'");
    }
    if (name == "pfp") return Component::pfp(*v);
    if (*v < 1 || *v != std::floor(*v)) {
      throw ModelError(ModelError::Kind::kParse,
                       "recent window must be a positive integer");
    }
    return Component::recent(static_cast<std::size_t>(*v));
  }
  throw ModelError(ModelError::Kind::kParse,
                   "unknown component '" + std::string(name) + "'");
}

inline std::vector<std::string_view> split_terms(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == ',') {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

}  // namespace detail

inline Component parse_component(std::string_view s) {
  return detail::parse_component(s);
}

// Parses a model string. Syntax errors throw; validity is left to validate().
inline InnerModel parse_model(std::string_view spec) {
  InnerModel m;
  for (auto term : detail::split_terms(spec)) {
    if (term.empty()) {
      throw ModelError(ModelError::Kind::kParse,
                       "empty term in '" + std::string(spec) + "'");
    }
    double weight = 1.0;
    std::string_view comp = term;
    if (const auto star = term.find('*'); star != std::string_view::npos) {
      const auto w = detail::parse_double(term.substr(0, star));
      if (!w) {
        throw ModelError(ModelError::Kind::kParse,
                         "bad weight in '" + std::string(term) + "'");
      }
      weight = *w;
      comp = term.substr(star + 1);
    }
    m.terms.push_back({weight, detail::parse_component(comp)});
  }
  return m;
}

inline std::string to_string(const InnerModel& m) {
  std::string out;
  for (const auto& t : m.terms) {
    if (!out.empty()) out += ',';
    out += detail::format_double(t.weight) + "*" + to_string(t.component);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Choice sets. Every consumer (likelihood replay, generator, design builder)
// goes through ChoiceSetBuilder so they agree on what was choosable.

enum class ChoiceSetMode {
  kSimple,  // exclude choices that would create a self-loop or parallel edge
  kAll,     // every node other than the source itself
};

class ChoiceSetBuilder {
 public:
  explicit ChoiceSetBuilder(ChoiceSetMode mode = ChoiceSetMode::kSimple)
      : mode_(mode) {}

  ChoiceSetMode mode() const noexcept { return mode_; }

  // Targets for an edge from `source`. An empty source means a node that is
  // not yet part of g, so every existing node qualifies.
  void attachment(const EvolvingGraph& g, std::optional<NodeId> source,
                  std::vector<NodeId>& out) {
    out.clear();
    const auto n = static_cast<NodeId>(g.node_count());
    if (!source) {
      out.resize(n);
      for (NodeId i = 0; i < n; ++i) out[i] = i;
      return;
    }
    begin(g);
    mark(*source);
    if (mode_ == ChoiceSetMode::kSimple) {
      for (NodeId w : g.neighbors(*source)) mark(w);
    }
    collect(n, out);
  }

  // Start nodes for an inner edge: every node other than the newest that
  // still has at least one eligible end node.
  void edge_start(const EvolvingGraph& g, std::vector<NodeId>& out) {
    out.clear();
    const auto n = static_cast<NodeId>(g.node_count());
    const auto newest = g.newest_node();
    begin(g);
    if (newest) mark(*newest);
    if (mode_ == ChoiceSetMode::kAll) {
      // Some other non-newest node must exist.
      if (n < (newest ? 3u : 2u)) return;
      collect(n, out);
      return;
    }
    // Eligible end nodes of x: the `pool` non-newest nodes minus x and its
    // non-newest neighbours.
    const std::size_t pool = newest ? n - 1 : n;
    for (NodeId i = 0; i < n; ++i) {
      if (marked(i)) continue;
      std::size_t inner_degree = g.degree(i);
      if (newest && g.has_edge(i, *newest)) --inner_degree;
      if (inner_degree + 1 < pool) out.push_back(i);
    }
  }

  // End nodes for an inner edge started at x.
  void edge_end(const EvolvingGraph& g, NodeId x, std::vector<NodeId>& out) {
    out.clear();
    const auto n = static_cast<NodeId>(g.node_count());
    if (n == 0) return;
    begin(g);
    mark(x);
    if (const auto newest = g.newest_node()) mark(*newest);
    if (mode_ == ChoiceSetMode::kSimple) {
      for (NodeId w : g.neighbors(x)) mark(w);
    }
    collect(n, out);
  }

 private:
  void begin(const EvolvingGraph& g) {
    if (stamp_.size() < g.node_count()) stamp_.resize(g.node_count(), 0);
    if (++epoch_ == 0) {
      std::fill(stamp_.begin(), stamp_.end(), 0);
      epoch_ = 1;
    }
  }
  void mark(NodeId i) { stamp_[i] = epoch_; }
  bool marked(NodeId i) const { return stamp_[i] == epoch_; }
  void collect(NodeId n, std::vector<NodeId>& out) const {
    for (NodeId i = 0; i < n; ++i) {
      if (!marked(i)) out.push_back(i);
    }
  }

  ChoiceSetMode mode_;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t epoch_ = 0;
};

// ---------------------------------------------------------------------------
// Evaluation.
//
// ComponentEvaluator normalises each component separately over a candidate
// set. A component whose raw weights are all zero on the set contributes the
// uniform distribution instead. It caches pfp weights by degree, so one
// instance must not be shared between threads.
class ComponentEvaluator {
 public:
  explicit ComponentEvaluator(std::vector<Component> components)
      : components_(std::move(components)),
        totals_(components_.size(), 0.0),
        pfp_cache_(components_.size()) {}

  const std::vector<Component>& components() const noexcept {
    return components_;
  }
  std::size_t size() const noexcept { return components_.size(); }

  // Computes normalisers over the candidate set. Must precede normalized().
  void prepare(const EvolvingGraph& g, std::span<const NodeId> candidates) {
    set_size_ = candidates.size();
    fallbacks_ = 0;
    for (std::size_t k = 0; k < components_.size(); ++k) {
      const Component& c = components_[k];
      double sum = 0.0;
      switch (c.kind) {
        case ComponentKind::kNull:
          sum = static_cast<double>(candidates.size());
          break;
        case ComponentKind::kDegree:
          for (NodeId i : candidates) sum += static_cast<double>(g.degree(i));
          break;
        case ComponentKind::kTriangle:
          for (NodeId i : candidates) sum += static_cast<double>(g.triangles(i));
          break;
        case ComponentKind::kSingleton:
          for (NodeId i : candidates) sum += g.degree(i) == 1 ? 1.0 : 0.0;
          break;
        case ComponentKind::kDoubleton:
          for (NodeId i : candidates) sum += g.degree(i) == 2 ? 1.0 : 0.0;
          break;
        case ComponentKind::kRecent:
          for (NodeId i : candidates) {
            sum += g.selected_within(i, c.window) ? 1.0 : 0.0;
          }
          break;
        case ComponentKind::kPfp:
          for (NodeId i : candidates) sum += pfp(k, g.degree(i));
          break;
      }
      totals_[k] = sum;
      if (sum <= 0.0) ++fallbacks_;
    }
  }

  double raw(std::size_t k, const EvolvingGraph& g, NodeId i) {
    const Component& c = components_[k];
    if (c.kind == ComponentKind::kPfp) return pfp(k, g.degree(i));
    return raw_weight(c, i, g);
  }

  // p_k(i) over the prepared candidate set; i is assumed to be a member.
  double normalized(std::size_t k, const EvolvingGraph& g, NodeId i) {
    if (totals_[k] <= 0.0) return 1.0 / static_cast<double>(set_size_);
    return raw(k, g, i) / totals_[k];
  }

  void normalized_all(const EvolvingGraph& g, NodeId i, std::span<double> out) {
    for (std::size_t k = 0; k < components_.size(); ++k) {
      out[k] = normalized(k, g, i);
    }
  }

  // Number of components that fell back to uniform in the last prepare().
  std::size_t fallbacks() const noexcept { return fallbacks_; }

 private:
  double pfp(std::size_t k, std::size_t degree) {
    auto& cache = pfp_cache_[k];
    if (degree >= cache.size()) {
      const std::size_t from = cache.size();
      cache.resize(degree + 1);
      for (std::size_t d = from; d <= degree; ++d) {
        cache[d] = pfp_weight(d, components_[k].delta);
      }
    }
    return cache[degree];
  }

  std::vector<Component> components_;
  std::vector<double> totals_;
  std::vector<std::vector<double>> pfp_cache_;
  std::size_t set_size_ = 0;
  std::size_t fallbacks_ = 0;
};

// Mixture probability sum_k beta_k * p_k, accumulated in term order.
inline double mix(std::span<const double> weights,
                  std::span<const double> component_probs) {
  double p = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    p += weights[k] * component_probs[k];
  }
  return p;
}

// Evaluates a model over candidate sets; owns its scratch buffers.
class ModelEvaluator {
 public:
  explicit ModelEvaluator(const InnerModel& m)
      : weights_(m.weights()),
        components_(m.components()),
        scratch_(m.terms.size()) {}

  // Probability of each candidate, aligned with `candidates`.
  void probabilities(const EvolvingGraph& g, std::span<const NodeId> candidates,
                     std::vector<double>& out) {
    if (candidates.empty()) {
      throw ModelError(ModelError::Kind::kEmptyChoiceSet, "empty choice set");
    }
    components_.prepare(g, candidates);
    out.resize(candidates.size());
    for (std::size_t j = 0; j < candidates.size(); ++j) {
      components_.normalized_all(g, candidates[j], scratch_);
      out[j] = mix(weights_, scratch_);
    }
  }

  std::size_t fallbacks() const noexcept { return components_.fallbacks(); }

 private:
  std::vector<double> weights_;
  ComponentEvaluator components_;
  std::vector<double> scratch_;
};

struct NodeProbability {
  NodeId node;
  double probability;
};

// Normalised choice probabilities of m over the candidate set s.
inline std::vector<NodeProbability> probability_vector(
    const InnerModel& m, std::span<const NodeId> s, const EvolvingGraph& g,
    bool allow_invalid = false) {
  if (!allow_invalid) require_valid(m);
  for (NodeId i : s) {
    if (!g.has_node(i)) {
      throw GraphError(GraphError::Kind::kUnknownNode,
                       "unknown node " + std::to_string(i));
    }
  }
  ModelEvaluator eval(m);
  std::vector<double> probs;
  eval.probabilities(g, s, probs);
  std::vector<NodeProbability> out;
  out.reserve(s.size());
  for (std::size_t j = 0; j < s.size(); ++j) out.push_back({s[j], probs[j]});
  return out;
}

}  // namespace netlik

#endif  // NETLIK_MODEL_HPP_
