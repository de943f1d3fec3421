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

// Grid sweeps of the likelihood over free model parameters.
//
// A model template is a model string whose numbers may be replaced by
// variables: "$name" anywhere a number goes, or the weight "rest" meaning
// one minus the other weights. For example
//
//   rest*pfp($delta), $bt*triangle
//
// swept over the axes "bt=0.1:0.9:0.05" and "delta=0.01:0.09:0.0025".

#ifndef NETLIK_SWEEP_HPP_
#define NETLIK_SWEEP_HPP_

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "netlik/likelihood.hpp"
#include "netlik/model.hpp"
#include "netlik/trace.hpp"

namespace netlik {

class SweepError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GridAxis {
  std::string name;
  std::vector<double> values;
};

// "name=start:stop:step" (inclusive), "name=v1,v2,..." or "name=v".
inline GridAxis parse_axis(std::string_view spec) {
  const auto eq = spec.find('=');
  if (eq == std::string_view::npos) {
    throw SweepError("axis '" + std::string(spec) + "' lacks '='");
  }
  GridAxis axis;
  axis.name = std::string(detail::trim(spec.substr(0, eq)));
  if (axis.name.empty()) throw SweepError("axis with empty name");
  const std::string_view body = detail::trim(spec.substr(eq + 1));
  auto num = [&](std::string_view s) {
    const auto v = detail::parse_double(s);
    if (!v) throw SweepError("bad number '" + std::string(s) + "' in axis");
    return *v;
  };
  if (body.find(':') != std::string_view::npos) {
    const auto c1 = body.find(':');
    const auto c2 = body.find(':', c1 + 1);
    if (c2 == std::string_view::npos) {
      throw SweepError("range axis needs start:stop:step");
    }
    const double start = num(body.substr(0, c1));
    const double stop = num(body.substr(c1 + 1, c2 - c1 - 1));
    const double step = num(body.substr(c2 + 1));
    if (!(step > 0.0) || stop < start) {
      throw SweepError("range axis needs step > 0 and stop >= start");
    }
    // Count from the rounded span so 0.1:0.9:0.05 gives 17 points, not 16.
    const auto count =
        static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) {
      axis.values.push_back(start + static_cast<double>(i) * step);
    }
  } else {
    for (auto part : detail::split_terms(body)) axis.values.push_back(num(part));
  }
  return axis;
}

class ModelTemplate {
 public:
  static ModelTemplate parse(std::string_view spec) {
    ModelTemplate t;
    for (auto term : detail::split_terms(spec)) {
      if (term.empty()) throw SweepError("empty term in template");
      TermTemplate tt;
      std::string_view comp = term;
      if (const auto star = term.find('*'); star != std::string_view::npos) {
        tt.weight = parse_slot(detail::trim(term.substr(0, star)), true);
        comp = detail::trim(term.substr(star + 1));
      } else {
        tt.weight = Slot{Slot::kFixed, 1.0, {}};
      }
      if (const auto open = comp.find('('); open != std::string_view::npos &&
                                            comp.back() == ')') {
        tt.name = std::string(detail::trim(comp.substr(0, open)));
        tt.param = parse_slot(
            detail::trim(comp.substr(open + 1, comp.size() - open - 2)), false);
      } else {
        tt.name = std::string(comp);
      }
      t.terms_.push_back(std::move(tt));
    }
    if (std::count_if(t.terms_.begin(), t.terms_.end(), [](const auto& x) {
          return x.weight.kind == Slot::kRest;
        }) > 1) {
      throw SweepError("at most one 'rest' weight per template");
    }
    // A trial instantiation rejects unknown component names early.
    std::map<std::string, double> probe;
    for (const auto& v : t.variables()) probe[v] = 1.0;
    (void)t.instantiate(probe);
    return t;
  }

  std::vector<std::string> variables() const {
    std::vector<std::string> out;
    auto add = [&](const std::optional<Slot>& s) {
      if (s && s->kind == Slot::kVariable &&
          std::find(out.begin(), out.end(), s->variable) == out.end()) {
        out.push_back(s->variable);
      }
    };
    for (const auto& t : terms_) {
      add(t.weight);
      add(t.param);
    }
    return out;
  }

  InnerModel instantiate(const std::map<std::string, double>& values) const {
    auto value = [&](const Slot& s) {
      if (s.kind == Slot::kFixed) return s.value;
      auto it = values.find(s.variable);
      if (it == values.end()) {
        throw SweepError("no value for variable '" + s.variable + "'");
      }
      return it->second;
    };
    std::string spec;
    double fixed_sum = 0.0;
    for (const auto& t : terms_) {
      if (t.weight.kind != Slot::kRest) fixed_sum += value(t.weight);
    }
    for (const auto& t : terms_) {
      if (!spec.empty()) spec += ',';
      const double w =
          t.weight.kind == Slot::kRest ? 1.0 - fixed_sum : value(t.weight);
      spec += detail::format_double(w) + "*" + t.name;
      if (t.param) spec += "(" + detail::format_double(value(*t.param)) + ")";
    }
    return parse_model(spec);
  }

 private:
  struct Slot {
    enum Kind { kFixed, kVariable, kRest } kind = kFixed;
    double value = 0.0;
    std::string variable;
  };
  struct TermTemplate {
    Slot weight;
    std::string name;
    std::optional<Slot> param;
  };

  static Slot parse_slot(std::string_view s, bool weight) {
    if (weight && s == "rest") return {Slot::kRest, 0.0, {}};
    if (!s.empty() && s.front() == '$') {
      if (s.size() == 1) throw SweepError("empty variable name");
      return {Slot::kVariable, 0.0, std::string(s.substr(1))};
    }
    const auto v = detail::parse_double(s);
    if (!v) throw SweepError("bad number '" + std::string(s) + "' in template");
    return {Slot::kFixed, *v, {}};
  }

  std::vector<TermTemplate> terms_;
};

struct SweepTemplates {
  ModelTemplate node;
  std::optional<ModelTemplate> newest;  // defaults to node
  std::optional<ModelTemplate> edge;    // defaults to node
};

struct SweepRow {
  std::vector<double> point;  // one value per axis
  LikelihoodReport report;
};

struct SweepResult {
  std::vector<std::string> names;
  std::vector<SweepRow> rows;  // row-major grid order, first axis outermost
  std::size_t argmax = 0;
};

// Evaluates every grid point. Points that share component parameters (only
// weights differ) share one replay; replays run on up to `jobs` threads.
inline SweepResult sweep(const GrowthTrace& trace,
                         const SweepTemplates& templates,
                         const std::vector<GridAxis>& axes,
                         const LikelihoodOptions& options = {},
                         unsigned jobs = 1) {
  SweepResult result;
  std::vector<std::string> used;
  for (const auto* t : {&templates.node,
                        templates.newest ? &*templates.newest : nullptr,
                        templates.edge ? &*templates.edge : nullptr}) {
    if (!t) continue;
    for (auto& v : t->variables()) {
      if (std::find(used.begin(), used.end(), v) == used.end()) used.push_back(v);
    }
  }
  for (const auto& a : axes) {
    if (a.values.empty()) throw SweepError("axis '" + a.name + "' is empty");
    if (std::find(used.begin(), used.end(), a.name) == used.end()) {
      throw SweepError("axis '" + a.name + "' is not used by the template");
    }
    result.names.push_back(a.name);
  }
  for (const auto& v : used) {
    if (std::find(result.names.begin(), result.names.end(), v) ==
        result.names.end()) {
      throw SweepError("variable '" + v + "' has no axis");
    }
  }

  // Enumerate points and validate all of them before any replay.
  std::size_t total = 1;
  for (const auto& a : axes) total *= a.values.size();
  std::vector<ModelSet> models;
  models.reserve(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::vector<double> point(axes.size());
    std::map<std::string, double> values;
    std::size_t rem = idx;
    for (std::size_t a = axes.size(); a-- > 0;) {
      point[a] = axes[a].values[rem % axes[a].values.size()];
      rem /= axes[a].values.size();
      values[axes[a].name] = point[a];
    }
    const InnerModel node = templates.node.instantiate(values);
    ModelSet set{node,
                 templates.newest ? templates.newest->instantiate(values) : node,
                 templates.edge ? templates.edge->instantiate(values) : node};
    try {
      set = prepare_models(set, options);
    } catch (const ModelError& e) {
      std::string where;
      for (std::size_t a = 0; a < axes.size(); ++a) {
        where += (a ? " " : "") + axes[a].name + "=" +
                 detail::format_double(point[a]);
      }
      throw SweepError("invalid grid point " + where + ": " + e.what());
    }
    models.push_back(std::move(set));
    result.rows.push_back({std::move(point), {}});
  }

  // Group points by component structure.
  std::vector<ComponentStructure> groups;
  std::vector<std::size_t> group_of(total);
  for (std::size_t i = 0; i < total; ++i) {
    const auto s = ComponentStructure::of(models[i]);
    auto it = std::find(groups.begin(), groups.end(), s);
    group_of[i] = static_cast<std::size_t>(it - groups.begin());
    if (it == groups.end()) groups.push_back(s);
  }

  std::vector<std::vector<std::size_t>> members(groups.size());
  for (std::size_t i = 0; i < total; ++i) members[group_of[i]].push_back(i);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t gi = next++; gi < groups.size(); gi = next++) {
      try {
        const auto rec = evaluate_components(trace, groups[gi], options.replay);
        for (std::size_t i : members[gi]) {
          result.rows[i].report = combine(rec, ModelWeights::of(models[i]));
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned threads =
      std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(groups.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  for (std::size_t i = 1; i < total; ++i) {
    if (result.rows[i].report.c0 > result.rows[result.argmax].report.c0) {
      result.argmax = i;
    }
  }
  return result;
}

// Columns: one per axis, then log_likelihood,t,c0,argmax (1 on the best row).
inline void write_sweep_csv(const SweepResult& result, std::ostream& out) {
  for (const auto& n : result.names) out << n << ',';
  out << "log_likelihood,t,c0,argmax\n";
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    const auto& row = result.rows[i];
    for (double v : row.point) out << detail::format_double(v) << ',';
    out << detail::format_double(row.report.log_likelihood) << ','
        << row.report.choices << ',' << detail::format_double(row.report.c0)
        << ',' << (i == result.argmax ? 1 : 0) << '\n';
  }
}

}  // namespace netlik

#endif  // NETLIK_SWEEP_HPP_
