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

// Fitting mixture weights by regression.
//
// Every (choice j, candidate i) pair is one observation: the response is 1
// if i was the node chosen at j and 0 otherwise, and the regressors are the
// normalised component probabilities p_k(i) at that choice. Under a mixture
// model E[response] = sum_k beta_k p_k(i), so the weights are estimated by
// weighted least squares with identity link and no intercept.
//
// Exhaustive designs have one row per candidate per choice. Sampled designs
// keep the chosen row and m uniformly drawn non-chosen candidates, each
// weighted (|s|-1)/m so weighted moments match the exhaustive design.

#ifndef NETLIK_GLM_HPP_
#define NETLIK_GLM_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "netlik/generator.hpp"
#include "netlik/model.hpp"
#include "netlik/replay.hpp"
#include "netlik/trace.hpp"

namespace netlik {

class FitError : public std::runtime_error {
 public:
  enum class Kind {
    kRankDeficient,
    kInsufficientRows,
    kBadComponents,
    kAllNonPositive,
  };

  FitError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

struct DesignRow {
  std::uint32_t choice = 0;
  NodeId node = 0;
  bool indicator = false;
  double weight = 1.0;
  std::span<const double> probs;  // one per component
};

// Rows stored flat: component probabilities live in one contiguous array.
class Design {
 public:
  explicit Design(std::vector<Component> components)
      : components_(std::move(components)) {}

  const std::vector<Component>& components() const noexcept {
    return components_;
  }
  std::size_t size() const noexcept { return meta_.size(); }
  std::size_t choices() const noexcept { return choices_; }

  DesignRow row(std::size_t r) const {
    const Meta& m = meta_[r];
    const std::size_t k = components_.size();
    return {m.choice, m.node, m.indicator, m.weight,
            std::span<const double>(probs_.data() + r * k, k)};
  }

  void add(std::uint32_t choice, NodeId node, bool indicator, double weight,
           std::span<const double> probs) {
    meta_.push_back({choice, node, indicator, weight});
    probs_.insert(probs_.end(), probs.begin(), probs.end());
    if (indicator) ++choices_;
  }

  void reserve(std::size_t rows) {
    meta_.reserve(rows);
    probs_.reserve(rows * components_.size());
  }

 private:
  struct Meta {
    std::uint32_t choice;
    NodeId node;
    bool indicator;
    double weight;
  };

  std::vector<Component> components_;
  std::vector<Meta> meta_;
  std::vector<double> probs_;
  std::size_t choices_ = 0;
};

struct SamplingSpec {
  // Non-chosen candidates kept per choice; nullopt keeps all of them.
  std::optional<std::size_t> negatives = 10;
  std::uint64_t rng_seed = 0;

  static SamplingSpec exhaustive() { return {std::nullopt, 0}; }
};

enum class DesignScope {
  kNodeAttachment,  // new-node and newest-node attachments
  kInnerEdge,       // inner edges as a start choice then an end choice
};

struct DesignOptions {
  DesignScope scope = DesignScope::kNodeAttachment;
  ReplayOptions replay;
};

inline Design build_design(const GrowthTrace& trace,
                           std::vector<Component> components,
                           const SamplingSpec& sampling,
                           const DesignOptions& options = {}) {
  if (sampling.negatives && *sampling.negatives < 1) {
    throw std::invalid_argument("negatives per choice must be at least 1");
  }
  Design design(components);
  ComponentEvaluator eval(std::move(components));
  ChoiceSetBuilder builder(options.replay.choice_set);
  Rng rng(sampling.rng_seed);
  std::vector<NodeId> cand;
  std::vector<std::size_t> others;
  std::vector<double> probs(eval.size());
  std::uint32_t choice = 0;

  auto emit = [&](const EvolvingGraph& g, NodeId chosen) {
    if (cand.empty()) {
      throw ModelError(ModelError::Kind::kEmptyChoiceSet,
                       "empty choice set while building design");
    }
    eval.prepare(g, cand);
    others.clear();
    bool found = false;
    for (std::size_t j = 0; j < cand.size(); ++j) {
      if (cand[j] == chosen) {
        found = true;
      } else {
        others.push_back(j);
      }
    }
    if (!found) {
      throw ModelError(ModelError::Kind::kEmptyChoiceSet,
                       "chosen node missing from its choice set");
    }
    eval.normalized_all(g, chosen, probs);
    design.add(choice, chosen, true, 1.0, probs);
    std::size_t keep = others.size();
    double weight = 1.0;
    if (sampling.negatives && *sampling.negatives < others.size()) {
      keep = *sampling.negatives;
      weight = static_cast<double>(others.size()) / static_cast<double>(keep);
      // Partial Fisher-Yates: the first `keep` slots become the sample.
      for (std::size_t j = 0; j < keep; ++j) {
        const std::size_t pick = j + rng.index(others.size() - j);
        std::swap(others[j], others[pick]);
      }
    }
    for (std::size_t j = 0; j < keep; ++j) {
      const NodeId node = cand[others[j]];
      eval.normalized_all(g, node, probs);
      design.add(choice, node, false, weight, probs);
    }
    ++choice;
  };

  Replayer replay(trace, options.replay);
  while (!replay.done()) {
    const EvolvingGraph& g = replay.graph();
    const OuterEvent& ev = replay.next();
    if (options.scope == DesignScope::kNodeAttachment) {
      if (ev.kind == EventKind::kNewNode) {
        builder.attachment(g, std::nullopt, cand);
        emit(g, ev.target);
      } else if (ev.kind == EventKind::kNewestNode) {
        builder.attachment(g, ev.source, cand);
        emit(g, ev.target);
      }
    } else if (ev.kind == EventKind::kInnerEdge) {
      builder.edge_start(g, cand);
      emit(g, ev.source);
      builder.edge_end(g, ev.source, cand);
      emit(g, ev.target);
    }
    replay.apply();
  }
  return design;
}

// Columns: j,i,indicator,weight,p_1..p_k.
inline void write_design_csv(const Design& design, std::ostream& out) {
  out << "j,i,indicator,weight";
  for (std::size_t k = 0; k < design.components().size(); ++k) {
    out << ",p_" << (k + 1);
  }
  out << '\n';
  for (std::size_t r = 0; r < design.size(); ++r) {
    const DesignRow row = design.row(r);
    out << row.choice << ',' << row.node << ',' << (row.indicator ? 1 : 0)
        << ',' << detail::format_double(row.weight);
    for (double p : row.probs) out << ',' << detail::format_double(p);
    out << '\n';
  }
}

// ---------------------------------------------------------------------------

enum class Significance { kNone, k10, k5, k1, k01 };

inline std::string_view to_string(Significance s) {
  switch (s) {
    case Significance::kNone:
      return "none";
    case Significance::k10:
      return "10%";
    case Significance::k5:
      return "5%";
    case Significance::k1:
      return "1%";
    case Significance::k01:
      return "0.1%";
  }
  return "?";
}

// Two-sided normal thresholds.
inline Significance significance_of(double t) {
  const double a = std::abs(t);
  if (std::isnan(a)) return Significance::kNone;
  if (a >= 3.291) return Significance::k01;
  if (a >= 2.576) return Significance::k1;
  if (a >= 1.960) return Significance::k5;
  if (a >= 1.645) return Significance::k10;
  return Significance::kNone;
}

struct NormalizedModel {
  InnerModel model;
  std::vector<std::size_t> dropped;  // component indices with estimate <= 0
};

// Clips non-positive estimates to zero (dropping those components) and
// rescales the rest to sum to one.
inline NormalizedModel normalize_to_model(
    const std::vector<Component>& components,
    const std::vector<double>& estimates) {
  NormalizedModel out;
  double sum = 0.0;
  for (std::size_t k = 0; k < estimates.size(); ++k) {
    if (estimates[k] > 0.0) {
      sum += estimates[k];
    } else {
      out.dropped.push_back(k);
    }
  }
  if (!(sum > 0.0)) {
    throw FitError(FitError::Kind::kAllNonPositive,
                   "no positive estimates to normalise");
  }
  for (std::size_t k = 0; k < estimates.size(); ++k) {
    if (estimates[k] > 0.0) {
      out.model.terms.push_back({estimates[k] / sum, components[k]});
    }
  }
  return out;
}

struct Estimate {
  Component component;
  double value = 0.0;
  double std_error = 0.0;
  double t_value = 0.0;
  Significance significance = Significance::kNone;
};

struct FitReport {
  std::vector<Estimate> estimates;
  double residual_variance = 0.0;
  std::size_t rows = 0;
  std::optional<NormalizedModel> normalized;  // empty if all estimates <= 0

  std::vector<double> values() const {
    std::vector<double> v;
    for (const auto& e : estimates) v.push_back(e.value);
    return v;
  }
};

// Weighted least squares via a streaming Givens QR of [sqrt(w) X | sqrt(w) y].
// Only the (k+1)x(k+1) triangular factor is kept, so memory does not grow
// with the number of rows; its last diagonal entry is sqrt(RSS).
class LeastSquares {
 public:
  explicit LeastSquares(std::size_t k)
      : k_(k), r_((k + 1) * (k + 1), 0.0), col_sq_(k, 0.0), row_(k + 1) {}

  void add(std::span<const double> x, double y, double w) {
    const double s = std::sqrt(w);
    for (std::size_t i = 0; i < k_; ++i) {
      row_[i] = s * x[i];
      col_sq_[i] += row_[i] * row_[i];
    }
    row_[k_] = s * y;
    for (std::size_t i = 0; i <= k_; ++i) {
      const double b = row_[i];
      if (b == 0.0) continue;
      const double a = at(i, i);
      const double h = std::hypot(a, b);
      const double c = a / h;
      const double sn = b / h;
      at(i, i) = h;
      for (std::size_t j = i + 1; j <= k_; ++j) {
        const double rij = at(i, j);
        at(i, j) = c * rij + sn * row_[j];
        row_[j] = -sn * rij + c * row_[j];
      }
    }
    ++n_;
  }

  std::size_t rows() const noexcept { return n_; }

  // Column i is numerically dependent on the earlier ones.
  bool deficient(std::size_t i) const {
    return !(at(i, i) > 1e-9 * std::sqrt(col_sq_[i]));
  }

  std::vector<double> solve() const {
    std::vector<double> beta(k_);
    for (std::size_t i = k_; i-- > 0;) {
      double v = at(i, k_);
      for (std::size_t j = i + 1; j < k_; ++j) v -= at(i, j) * beta[j];
      beta[i] = v / at(i, i);
    }
    return beta;
  }

  double rss() const { return at(k_, k_) * at(k_, k_); }

  // Diagonal of (X'WX)^-1 = R^-1 R^-T.
  std::vector<double> inverse_diagonal() const {
    std::vector<double> inv(k_ * k_, 0.0);  // R^-1, upper triangular
    for (std::size_t j = 0; j < k_; ++j) {
      inv[j * k_ + j] = 1.0 / at(j, j);
      for (std::size_t i = j; i-- > 0;) {
        double v = 0.0;
        for (std::size_t m = i + 1; m <= j; ++m) v += at(i, m) * inv[m * k_ + j];
        inv[i * k_ + j] = -v / at(i, i);
      }
    }
    std::vector<double> diag(k_, 0.0);
    for (std::size_t i = 0; i < k_; ++i) {
      for (std::size_t j = i; j < k_; ++j) diag[i] += inv[i * k_ + j] * inv[i * k_ + j];
    }
    return diag;
  }

 private:
  double& at(std::size_t i, std::size_t j) { return r_[i * (k_ + 1) + j]; }
  double at(std::size_t i, std::size_t j) const { return r_[i * (k_ + 1) + j]; }

  std::size_t k_;
  std::vector<double> r_;
  std::vector<double> col_sq_;
  std::vector<double> row_;
  std::size_t n_ = 0;
};

inline FitReport fit(const Design& design) {
  const auto& comps = design.components();
  const std::size_t k = comps.size();
  if (k < 2) {
    throw FitError(FitError::Kind::kBadComponents,
                   "fitting needs at least two components");
  }
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < a; ++b) {
      if (comps[a] == comps[b]) {
        throw FitError(FitError::Kind::kBadComponents,
                       "duplicate component " + to_string(comps[a]));
      }
    }
  }
  if (design.size() <= k) {
    throw FitError(FitError::Kind::kInsufficientRows,
                   "need more rows than components, got " +
                       std::to_string(design.size()));
  }
  LeastSquares ls(k);
  for (std::size_t r = 0; r < design.size(); ++r) {
    const DesignRow row = design.row(r);
    ls.add(row.probs, row.indicator ? 1.0 : 0.0, row.weight);
  }
  for (std::size_t i = 0; i < k; ++i) {
    if (ls.deficient(i)) {
      throw FitError(FitError::Kind::kRankDeficient,
                     "component " + to_string(comps[i]) +
                         " is collinear with earlier components");
    }
  }
  FitReport report;
  report.rows = design.size();
  const auto beta = ls.solve();
  report.residual_variance = ls.rss() / static_cast<double>(design.size() - k);
  const auto diag = ls.inverse_diagonal();
  for (std::size_t i = 0; i < k; ++i) {
    Estimate e;
    e.component = comps[i];
    e.value = beta[i];
    e.std_error = std::sqrt(report.residual_variance * diag[i]);
    if (e.std_error > 0.0) {
      e.t_value = e.value / e.std_error;
    } else {
      e.t_value = e.value == 0.0 ? 0.0
                                 : std::copysign(
                                       std::numeric_limits<double>::infinity(),
                                       e.value);
    }
    e.significance = significance_of(e.t_value);
    report.estimates.push_back(e);
  }
  try {
    report.normalized = normalize_to_model(comps, beta);
  } catch (const FitError&) {
    report.normalized.reset();
  }
  return report;
}

inline void write_fit_table(const FitReport& report, std::ostream& out) {
  std::size_t width = 9;
  for (const auto& e : report.estimates) {
    width = std::max(width, to_string(e.component).size());
  }
  auto num = [](double v) {
    std::ostringstream s;
    s << std::setprecision(4) << std::fixed << v;
    return s.str();
  };
  out << std::left << std::setw(static_cast<int>(width)) << "component"
      << std::right << std::setw(11) << "estimate" << std::setw(11)
      << "std.err" << std::setw(11) << "t" << std::setw(8) << "signif"
      << '\n';
  for (const auto& e : report.estimates) {
    out << std::left << std::setw(static_cast<int>(width))
        << to_string(e.component) << std::right << std::setw(11)
        << num(e.value) << std::setw(11) << num(e.std_error) << std::setw(11)
        << num(e.t_value) << std::setw(8) << to_string(e.significance) << '\n';
  }
  out << "rows: " << report.rows
      << "  residual variance: " << detail::format_double(report.residual_variance)
      << '\n';
  if (report.normalized) {
    out << "normalized model: " << to_string(report.normalized->model) << '\n';
    for (std::size_t k : report.normalized->dropped) {
      out << "dropped: " << to_string(report.estimates[k].component) << '\n';
    }
  } else {
    out << "normalized model: none (no positive estimates)\n";
  }
}

// Columns: component,estimate,std_error,t_value,significance.
inline void write_fit_csv(const FitReport& report, std::ostream& out) {
  out << "component,estimate,std_error,t_value,significance\n";
  for (const auto& e : report.estimates) {
    out << '"' << to_string(e.component) << "\","
        << detail::format_double(e.value) << ','
        << detail::format_double(e.std_error) << ','
        << detail::format_double(e.t_value) << ',' << to_string(e.significance)
        << '\n';
  }
}

}  // namespace netlik

#endif  // NETLIK_GLM_HPP_
