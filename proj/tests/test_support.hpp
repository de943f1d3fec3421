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

// Independent reference implementations used as test oracles. Nothing here
// calls into the library's own algorithms.

#ifndef NETLIK_TESTS_TEST_SUPPORT_HPP_
#define NETLIK_TESTS_TEST_SUPPORT_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "netlik/graph.hpp"

namespace netlik::testing {

using AdjMatrix = std::vector<std::vector<bool>>;

inline AdjMatrix adjacency_matrix(const EvolvingGraph& g) {
  const std::size_t n = g.node_count();
  AdjMatrix a(n, std::vector<bool>(n, false));
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j : g.neighbors(i)) a[i][j] = true;
  }
  return a;
}

// Triangles through each node by enumerating all unordered node triples.
inline std::vector<std::uint64_t> brute_triangles(const AdjMatrix& a) {
  const std::size_t n = a.size();
  std::vector<std::uint64_t> t(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!a[i][j]) continue;
      for (std::size_t k = j + 1; k < n; ++k) {
        if (a[i][k] && a[j][k]) {
          ++t[i];
          ++t[j];
          ++t[k];
        }
      }
    }
  }
  return t;
}

// Random simple graph as an edge sequence on n nodes.
inline std::vector<std::pair<NodeId, NodeId>> random_edges(std::size_t n,
                                                           double density,
                                                           std::mt19937_64& rng) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::bernoulli_distribution keep(density);
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      if (keep(rng)) edges.emplace_back(i, j);
    }
  }
  std::shuffle(edges.begin(), edges.end(), rng);
  return edges;
}

inline EvolvingGraph build_graph(std::size_t n,
                                 const std::vector<std::pair<NodeId, NodeId>>& edges) {
  EvolvingGraph g;
  for (std::size_t i = 0; i < n; ++i) g.add_node();
  for (auto [u, v] : edges) g.add_edge(u, v);
  return g;
}

struct NormalEquations {
  std::vector<double> beta;
  std::vector<double> inverse_diagonal;  // diag((X'WX)^-1)
  double rss = 0.0;
};

// Weighted least squares by forming X'WX and X'Wy and inverting with
// Gauss-Jordan elimination (partial pivoting).
inline NormalEquations normal_equations(const std::vector<std::vector<double>>& x,
                                        const std::vector<double>& y,
                                        const std::vector<double>& w) {
  const std::size_t k = x.front().size();
  std::vector<std::vector<double>> a(k, std::vector<double>(2 * k, 0.0));
  std::vector<double> b(k, 0.0);
  for (std::size_t r = 0; r < x.size(); ++r) {
    for (std::size_t i = 0; i < k; ++i) {
      b[i] += w[r] * x[r][i] * y[r];
      for (std::size_t j = 0; j < k; ++j) a[i][j] += w[r] * x[r][i] * x[r][j];
    }
  }
  for (std::size_t i = 0; i < k; ++i) a[i][k + i] = 1.0;
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < k; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    }
    if (std::abs(a[piv][c]) < 1e-300) throw std::runtime_error("singular");
    std::swap(a[c], a[piv]);
    const double d = a[c][c];
    for (auto& v : a[c]) v /= d;
    for (std::size_t r = 0; r < k; ++r) {
      if (r == c) continue;
      const double f = a[r][c];
      for (std::size_t j = 0; j < 2 * k; ++j) a[r][j] -= f * a[c][j];
    }
  }
  NormalEquations out;
  out.beta.assign(k, 0.0);
  out.inverse_diagonal.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) out.beta[i] += a[i][k + j] * b[j];
    out.inverse_diagonal[i] = a[i][k + i];
  }
  for (std::size_t r = 0; r < x.size(); ++r) {
    double fit = 0.0;
    for (std::size_t i = 0; i < k; ++i) fit += x[r][i] * out.beta[i];
    out.rss += w[r] * (y[r] - fit) * (y[r] - fit);
  }
  return out;
}

}  // namespace netlik::testing

#endif  // NETLIK_TESTS_TEST_SUPPORT_HPP_
