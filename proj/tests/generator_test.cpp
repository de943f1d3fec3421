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

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "netlik/generator.hpp"
#include "netlik/likelihood.hpp"
#include "netlik/replay.hpp"

namespace netlik {
namespace {

GrowConfig attach_config(const char* model, std::uint32_t m, std::size_t edges,
                         std::uint64_t seed) {
  GrowConfig c;
  c.node_model = parse_model(model);
  c.edge_model = c.node_model;
  c.driver = AttachDriver{m, m};
  c.target_edges = edges;
  c.rng_seed = seed;
  return c;
}

TEST(WeightedSample, DegenerateInputs) {
  Rng rng(1);
  const NodeProbability one[] = {{7, 1.0}};
  EXPECT_EQ(weighted_sample(one, rng), 7u);
  const NodeProbability pair[] = {{3, 1.0}, {4, 0.0}};
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(weighted_sample(pair, rng), 3u);
  const NodeProbability zero_first[] = {{3, 0.0}, {4, 1.0}};
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(weighted_sample(zero_first, rng), 4u);
}

TEST(WeightedSample, Errors) {
  Rng rng(1);
  const double bad_sum[] = {0.5, 0.4};
  const double negative[] = {1.5, -0.5};
  try {
    weighted_sample_index(bad_sum, rng);
    FAIL();
  } catch (const GenerationError& e) {
    EXPECT_EQ(e.kind(), GenerationError::Kind::kDegenerateDistribution);
  }
  EXPECT_THROW(weighted_sample_index(negative, rng), GenerationError);
  EXPECT_THROW(weighted_sample_index(std::span<const double>{}, rng), GenerationError);
}

TEST(WeightedSample, EvenSplitFrequency) {
  Rng rng(2026);
  const NodeProbability half[] = {{0, 0.5}, {1, 0.5}};
  int a = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) a += weighted_sample(half, rng) == 0;
  const double f = static_cast<double>(a) / n;
  EXPECT_GE(f, 0.49);
  EXPECT_LE(f, 0.51);
}

TEST(WeightedSample, MatchesDistribution) {
  Rng rng(5);
  const double p[] = {0.1, 0.2, 0.3, 0.4};
  std::vector<int> counts(4, 0);
  const int n = 200000;
  for (int i = 0; i < n; ++i) ++counts[weighted_sample_index(p, rng)];
  for (int j = 0; j < 4; ++j) {
    const double sd = std::sqrt(p[j] * (1 - p[j]) / n);
    EXPECT_NEAR(static_cast<double>(counts[j]) / n, p[j], 4 * sd);
  }
}

TEST(Rng, IndexInRangeAndDeterministic) {
  Rng a(9), b(9);
  for (int i = 0; i < 1000; ++i) {
    const auto x = a.index(7);
    EXPECT_LT(x, 7u);
    EXPECT_EQ(x, b.index(7));
    const double u = a.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_EQ(u, b.uniform());
  }
}

TEST(Grow, DeterministicGivenSeed) {
  const auto p = *find_preset("paper-theta1");
  GrowConfig c;
  c.node_model = p.node_model;
  c.edge_model = p.edge_model;
  c.driver = p.driver;
  c.target_edges = 2000;
  c.rng_seed = 42;
  const std::string a = write_trace(grow(c));
  const std::string b = write_trace(grow(c));
  EXPECT_EQ(a, b);
  c.rng_seed = 43;
  EXPECT_NE(a, write_trace(grow(c)));
}

TEST(Grow, AttachDriverShape) {
  const GrowthTrace t = grow(attach_config("degree", 3, 30, 1));
  ASSERT_EQ(t.events.size(), 30u);
  for (std::size_t i = 0; i < t.events.size(); ++i) {
    EXPECT_EQ(t.events[i].kind,
              i % 3 == 0 ? EventKind::kNewNode : EventKind::kNewestNode);
  }
  EXPECT_EQ(t.seed_edges.size(), 3u);
}

TEST(Grow, RangeDriverDrawsBothSizes) {
  GrowConfig c = attach_config("null", 1, 3000, 3);
  c.driver = AttachDriver{1, 2};
  const GrowthTrace t = grow(c);
  std::size_t new_nodes = 0;
  for (const auto& ev : t.events) new_nodes += ev.kind == EventKind::kNewNode;
  // Mean edges per node is 1.5.
  EXPECT_NEAR(static_cast<double>(t.events.size()) / new_nodes, 1.5, 0.05);
}

TEST(Grow, GeneratedTraceHasPositiveLikelihood) {
  const ModelSet models{parse_model("0.5*degree,0.5*singleton"),
                        parse_model("0.5*degree,0.5*singleton"),
                        parse_model("recent(5)")};
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    GrowConfig c;
    c.node_model = models.new_node;
    c.edge_model = models.inner_edge;
    c.driver = MixedDriver{0.5, 0.2, 0.3};
    c.target_edges = 500;
    c.rng_seed = seed;
    const GrowthTrace t = grow(c);
    const auto r = trace_log_likelihood(models, t);
    EXPECT_EQ(r.zero_probability_choices, 0u);
    EXPECT_GT(r.c0, 1.0);
  }
}

TEST(Grow, ReplayDriverCopiesKinds) {
  GrowConfig src = attach_config("degree", 2, 200, 1);
  src.driver = MixedDriver{0.5, 0.2, 0.3};
  const GrowthTrace observed = grow(src);
  GrowConfig c;
  c.node_model = parse_model("null");
  c.edge_model = parse_model("triangle");
  c.driver = ReplayDriver::of(observed);
  c.rng_seed = 77;
  const GrowthTrace t = grow(c);
  ASSERT_EQ(t.events.size(), observed.events.size());
  for (std::size_t i = 0; i < t.events.size(); ++i) {
    EXPECT_EQ(t.events[i].kind, observed.events[i].kind);
  }
}

TEST(Grow, CustomSeedAndLabels) {
  GrowConfig c = attach_config("degree", 2, 100, 4);
  c.seed = clique_seed(5);
  const GrowthTrace t = grow(c);
  EXPECT_EQ(t.seed_edges.size(), 10u);
  // Labels stay unique even when seed labels look like generated ones.
  c.seed = parse_trace("SEED\n5 6\n6 7\n");
  const GrowthTrace u = grow(c);
  EXPECT_EQ(parse_trace(write_trace(u)), u);
}

TEST(Grow, ExhaustedChoiceSet) {
  // Attaching 4 edges per node to a 3-node seed runs out of targets.
  try {
    grow(attach_config("degree", 4, 10, 1));
    FAIL();
  } catch (const GenerationError& e) {
    EXPECT_EQ(e.kind(), GenerationError::Kind::kExhaustedChoiceSet);
  }
  GrowConfig bad = attach_config("degree", 1, 10, 1);
  bad.driver = AttachDriver{2, 1};
  EXPECT_THROW(grow(bad), GenerationError);
  bad.driver = MixedDriver{0, 0, 0};
  EXPECT_THROW(grow(bad), GenerationError);
  bad = attach_config("0.5*degree", 1, 10, 1);
  EXPECT_THROW(grow(bad), ModelError);
}

// Least-squares slope of the log complementary cumulative degree
// distribution over its tail; the density exponent is 1 - slope.
double tail_exponent(const EvolvingGraph& g, std::size_t min_degree) {
  std::map<std::size_t, std::size_t> counts;
  for (NodeId i = 0; i < g.node_count(); ++i) ++counts[g.degree(i)];
  const double n = static_cast<double>(g.node_count());
  std::vector<double> xs, ys;
  double above = n;
  for (auto [d, c] : counts) {
    if (d >= min_degree && above >= 5) {
      xs.push_back(std::log(static_cast<double>(d)));
      ys.push_back(std::log(above / n));
    }
    above -= static_cast<double>(c);
  }
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return 1.0 - sxy / sxx;
}

TEST(Grow, PreferentialAttachmentTail) {
  std::vector<double> exponents;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const GrowthTrace t = grow(attach_config("degree", 3, 10000, seed));
    Replayer r(t);
    while (!r.done()) r.apply();
    exponents.push_back(tail_exponent(r.graph(), 3));
  }
  std::sort(exponents.begin(), exponents.end());
  EXPECT_GE(exponents[1], 2.5);
  EXPECT_LE(exponents[1], 3.5);
}

}  // namespace
}  // namespace netlik
