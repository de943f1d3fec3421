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

#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "netlik/generator.hpp"
#include "netlik/glm.hpp"
#include "netlik/likelihood.hpp"
#include "test_support.hpp"

namespace netlik {
namespace {

GrowthTrace theta_trace(const char* preset, std::size_t edges, std::uint64_t seed) {
  const auto p = find_preset(preset);
  GrowConfig config;
  config.node_model = p->node_model;
  config.edge_model = p->edge_model;
  config.driver = p->driver;
  config.target_edges = edges;
  config.rng_seed = seed;
  return grow(config);
}

std::vector<Component> comps(const char* spec) {
  return parse_model(spec).components();
}

// Flattens a design into the oracle's dense inputs.
void dense(const Design& d, std::vector<std::vector<double>>& x,
           std::vector<double>& y, std::vector<double>& w) {
  for (std::size_t r = 0; r < d.size(); ++r) {
    const auto row = d.row(r);
    x.emplace_back(row.probs.begin(), row.probs.end());
    y.push_back(row.indicator ? 1.0 : 0.0);
    w.push_back(row.weight);
  }
}

TEST(BuildDesign, ExhaustiveRowCountIsSumOfChoiceSets) {
  const GrowthTrace t = parse_trace("SEED\na b\nb c\na c\nEVENTS\nd a\nd b\ne a\ne c\n");
  const Design d = build_design(t, comps("degree,triangle"), SamplingSpec::exhaustive());
  // choice sets: 3, 2 (d's non-neighbours), 4, 3
  EXPECT_EQ(d.size(), 3u + 2u + 4u + 3u);
  EXPECT_EQ(d.choices(), 4u);
  for (std::size_t r = 0; r < 3; ++r) {
    EXPECT_EQ(d.row(r).weight, 1.0);
    EXPECT_EQ(d.row(r).choice, 0u);
  }
  EXPECT_TRUE(d.row(0).indicator);
  EXPECT_EQ(d.row(0).node, 0u);
}

TEST(BuildDesign, SampledWeightsAndCounts) {
  const GrowthTrace t = theta_trace("paper-theta1", 300, 1);
  SamplingSpec s;
  s.negatives = 5;
  s.rng_seed = 9;
  const Design d = build_design(t, comps("pfp(0.05),triangle"), s);
  std::size_t r = 0;
  while (r < d.size()) {
    const auto first = d.row(r);
    ASSERT_TRUE(first.indicator);
    std::size_t negs = 0;
    ++r;
    while (r < d.size() && !d.row(r).indicator) {
      EXPECT_GE(d.row(r).weight, 1.0);
      ++negs;
      ++r;
    }
    EXPECT_LE(negs, 5u);
  }
  EXPECT_EQ(d.choices(), 300u);
  EXPECT_THROW(build_design(t, comps("null,degree"), SamplingSpec{0, 1}),
               std::invalid_argument);
}

TEST(BuildDesign, InnerEdgeScope) {
  const GrowthTrace t = parse_trace("SEED\n0 1\n1 2\n2 3\nEVENTS\n0 2\n");
  DesignOptions opt;
  opt.scope = DesignScope::kInnerEdge;
  const Design d = build_design(t, comps("null,degree"), SamplingSpec::exhaustive(), opt);
  // S1 = {0,1,2,3} (every node has a non-neighbour), S2(0) = {2,3}.
  EXPECT_EQ(d.size(), 6u);
  EXPECT_EQ(d.choices(), 2u);
}

TEST(BuildDesign, CsvLayout) {
  const GrowthTrace t = parse_trace("SEED\na b\nEVENTS\nc a\n");
  std::ostringstream out;
  write_design_csv(build_design(t, comps("null,degree"), SamplingSpec::exhaustive()), out);
  EXPECT_EQ(out.str(), "j,i,indicator,weight,p_1,p_2\n0,0,1,1,0.5,0.5\n0,1,0,1,0.5,0.5\n");
}

TEST(Fit, MatchesNormalEquationsOracle) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    GrowConfig config;
    config.node_model = parse_model("0.4*degree,0.3*triangle,0.3*null");
    config.edge_model = config.node_model;
    config.driver = MixedDriver{0.7, 0.3, 0.0};
    config.target_edges = 30;
    config.rng_seed = seed;
    const GrowthTrace t = grow(config);
    for (const char* spec : {"null,triangle", "degree,triangle,singleton",
                             "pfp(0.3),null,doubleton"}) {
      const Design d = build_design(t, comps(spec), SamplingSpec::exhaustive());
      ASSERT_LE(d.size(), 500u);
      std::vector<std::vector<double>> x;
      std::vector<double> y, w;
      dense(d, x, y, w);
      const auto oracle = testing::normal_equations(x, y, w);
      const FitReport r = fit(d);
      const double s2 = oracle.rss / static_cast<double>(d.size() - x[0].size());
      EXPECT_NEAR(r.residual_variance, s2, 1e-8);
      for (std::size_t k = 0; k < r.estimates.size(); ++k) {
        EXPECT_NEAR(r.estimates[k].value, oracle.beta[k], 1e-8) << spec;
        EXPECT_NEAR(r.estimates[k].std_error,
                    std::sqrt(s2 * oracle.inverse_diagonal[k]), 1e-8)
            << spec;
      }
    }
  }
}

TEST(Fit, WeightedRowsMatchOracle) {
  const GrowthTrace t = theta_trace("paper-theta2", 80, 4);
  SamplingSpec s;
  s.negatives = 3;
  s.rng_seed = 2;
  const Design d = build_design(t, comps("null,triangle,singleton,doubleton"), s);
  std::vector<std::vector<double>> x;
  std::vector<double> y, w;
  dense(d, x, y, w);
  const auto oracle = testing::normal_equations(x, y, w);
  const FitReport r = fit(d);
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_NEAR(r.estimates[k].value, oracle.beta[k], 1e-8);
  }
}

TEST(Fit, ExactFit) {
  Design d(comps("null,degree"));
  // Component 2 reproduces the indicator exactly.
  const double rows[][3] = {{1, 0.2, 1}, {0, 0.5, 0}, {0, 0.3, 0},
                            {1, 0.25, 1}, {0, 0.25, 0}, {0, 0.5, 0}};
  for (std::uint32_t r = 0; r < 6; ++r) {
    const double p[2] = {rows[r][1], rows[r][2]};
    d.add(r / 3, r, rows[r][0] == 1, 1.0, p);
  }
  const FitReport f = fit(d);
  EXPECT_NEAR(f.estimates[1].value, 1.0, 1e-12);
  EXPECT_NEAR(f.estimates[0].value, 0.0, 1e-12);
  EXPECT_NEAR(f.residual_variance, 0.0, 1e-20);
}

TEST(Fit, Errors) {
  const GrowthTrace t = theta_trace("paper-theta1", 100, 3);
  auto kind_of = [&](const char* spec) {
    try {
      fit(build_design(t, comps(spec), SamplingSpec::exhaustive()));
    } catch (const FitError& e) {
      return e.kind();
    }
    ADD_FAILURE() << spec;
    return FitError::Kind::kAllNonPositive;
  };
  EXPECT_EQ(kind_of("degree,pfp(0)"), FitError::Kind::kRankDeficient);
  EXPECT_EQ(kind_of("degree"), FitError::Kind::kBadComponents);
  EXPECT_EQ(kind_of("degree,triangle,degree"), FitError::Kind::kBadComponents);
  Design tiny(comps("null,degree"));
  const double p[2] = {0.5, 0.5};
  tiny.add(0, 0, true, 1.0, p);
  tiny.add(0, 1, false, 1.0, p);
  try {
    fit(tiny);
    FAIL();
  } catch (const FitError& e) {
    EXPECT_EQ(e.kind(), FitError::Kind::kInsufficientRows);
  }
}

TEST(NormalizeToModel, Examples) {
  const auto c5 = comps("null,triangle,singleton,doubleton,degree");
  const auto n = normalize_to_model(c5, {0.33, 0.29, 0.24, 0.23, -0.089});
  EXPECT_EQ(n.dropped, std::vector<std::size_t>{4});
  ASSERT_EQ(n.model.terms.size(), 4u);
  EXPECT_TRUE(validate(n.model).valid);
  EXPECT_NEAR(n.model.terms[0].weight, 0.33 / 1.09, 1e-15);
  const auto same = normalize_to_model(comps("null,degree"), {0.5, 0.5});
  EXPECT_EQ(to_string(same.model), "0.5*null,0.5*degree");
  const auto one = normalize_to_model(comps("triangle"), {2.0});
  EXPECT_EQ(one.model.terms[0].weight, 1.0);
  try {
    normalize_to_model(comps("null,degree"), {-1.0, 0.0});
    FAIL();
  } catch (const FitError& e) {
    EXPECT_EQ(e.kind(), FitError::Kind::kAllNonPositive);
  }
}

TEST(Significance, Thresholds) {
  EXPECT_EQ(significance_of(1.6), Significance::kNone);
  EXPECT_EQ(significance_of(1.645), Significance::k10);
  EXPECT_EQ(significance_of(-1.97), Significance::k5);
  EXPECT_EQ(significance_of(2.6), Significance::k1);
  EXPECT_EQ(significance_of(3.3), Significance::k01);
  EXPECT_EQ(significance_of(std::nan("")), Significance::kNone);
  EXPECT_EQ(to_string(Significance::k01), "0.1%");
}

TEST(Fit, SamplingIsUnbiased) {
  const GrowthTrace t = theta_trace("paper-theta1", 500, 8);
  const auto c = comps("pfp(0.05),triangle");
  const FitReport full = fit(build_design(t, c, SamplingSpec::exhaustive()));
  const int kSeeds = 50;
  std::vector<std::vector<double>> est(2);
  for (int s = 0; s < kSeeds; ++s) {
    SamplingSpec spec;
    spec.negatives = 10;
    spec.rng_seed = 1000 + static_cast<std::uint64_t>(s);
    const auto v = fit(build_design(t, c, spec)).values();
    for (std::size_t k = 0; k < 2; ++k) est[k].push_back(v[k]);
  }
  for (std::size_t k = 0; k < 2; ++k) {
    const double mean = std::accumulate(est[k].begin(), est[k].end(), 0.0) / kSeeds;
    double var = 0.0;
    for (double v : est[k]) var += (v - mean) * (v - mean);
    var /= kSeeds - 1;
    const double combined =
        std::sqrt(var / kSeeds + full.estimates[k].std_error * full.estimates[k].std_error);
    EXPECT_LT(std::abs(mean - full.estimates[k].value), 2.0 * combined)
        << "component " << k << " mean " << mean << " exhaustive "
        << full.estimates[k].value;
  }
}

TEST(Fit, NormalizedTrueComponentsNearlyMatchTrueLikelihood) {
  const GrowthTrace t = theta_trace("paper-theta1", 3000, 21);
  SamplingSpec s;
  s.negatives = 100;
  s.rng_seed = 5;
  const FitReport r = fit(build_design(t, comps("pfp(0.05),triangle"), s));
  ASSERT_TRUE(r.normalized);
  const auto truth = trace_log_likelihood(find_preset("paper-theta1")->node_model, t);
  const auto fitted = trace_log_likelihood(r.normalized->model, t);
  EXPECT_NEAR(fitted.c0 / truth.c0, 1.0, 0.02);
}

TEST(Fit, ReportWriters) {
  const GrowthTrace t = theta_trace("paper-theta2", 400, 2);
  const FitReport r =
      fit(build_design(t, comps("null,triangle,singleton,doubleton"), {20, 1}));
  std::ostringstream table, csv;
  write_fit_table(r, table);
  write_fit_csv(r, csv);
  EXPECT_NE(table.str().find("normalized model:"), std::string::npos);
  const std::string text = csv.str();
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "component,estimate,std_error,t_value,significance");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 5);
}

}  // namespace
}  // namespace netlik
