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

#ifndef NETLIK_STATS_HPP_
#define NETLIK_STATS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "netlik/graph.hpp"
#include "netlik/model.hpp"
#include "netlik/replay.hpp"
#include "netlik/trace.hpp"

namespace netlik {

enum class ClusteringMode {
  kTransitivity,  // 3 * triangles / connected triples
  kLocalMean,     // mean local clustering, nodes of degree < 2 count as 0
};

struct SnapshotStats {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  double d1 = 0.0;  // fraction of nodes with degree 1
  double d2 = 0.0;  // fraction of nodes with degree 2
  std::size_t max_degree = 0;
  double mean_degree = 0.0;
  double mean_square_degree = 0.0;
  double assortativity = 0.0;  // NaN when every edge joins equal degrees
  double clustering = 0.0;
};

inline SnapshotStats snapshot(const EvolvingGraph& g,
                              ClusteringMode mode = ClusteringMode::kTransitivity) {
  if (g.edge_count() == 0) {
    throw std::invalid_argument("statistics need at least one edge");
  }
  SnapshotStats s;
  s.nodes = g.node_count();
  s.edges = g.edge_count();
  const auto n = static_cast<NodeId>(s.nodes);
  std::size_t ones = 0, twos = 0;
  double sum_d = 0.0, sum_d2 = 0.0;
  double triples = 0.0, tri_sum = 0.0, local_sum = 0.0;
  // Degree correlation over both orientations of every edge.
  double sxy = 0.0, sx = 0.0, sx2 = 0.0;
  for (NodeId i = 0; i < n; ++i) {
    const std::size_t d = g.degree(i);
    const double dd = static_cast<double>(d);
    ones += d == 1;
    twos += d == 2;
    s.max_degree = std::max(s.max_degree, d);
    sum_d += dd;
    sum_d2 += dd * dd;
    const double pairs = dd * (dd - 1.0) / 2.0;
    triples += pairs;
    tri_sum += static_cast<double>(g.triangles(i));
    if (d >= 2) local_sum += static_cast<double>(g.triangles(i)) / pairs;
    // Node i is an endpoint of d orientations as x, and as y.
    sx += dd * dd;
    sx2 += dd * dd * dd;
    for (NodeId j : g.neighbors(i)) sxy += dd * static_cast<double>(g.degree(j));
  }
  const double nn = static_cast<double>(s.nodes);
  s.d1 = static_cast<double>(ones) / nn;
  s.d2 = static_cast<double>(twos) / nn;
  s.mean_degree = sum_d / nn;
  s.mean_square_degree = sum_d2 / nn;

  const double m2 = 2.0 * static_cast<double>(s.edges);
  const double mean = sx / m2;
  const double var = sx2 / m2 - mean * mean;
  const double cov = sxy / m2 - mean * mean;
  // Relative tolerance: an exactly regular graph can leave rounding residue.
  if (var <= 1e-12 * std::max(1.0, sx2 / m2)) {
    s.assortativity = std::numeric_limits<double>::quiet_NaN();
  } else {
    s.assortativity = std::clamp(cov / var, -1.0, 1.0);
  }

  if (mode == ClusteringMode::kTransitivity) {
    s.clustering = triples > 0.0 ? tri_sum / triples : 0.0;
  } else {
    s.clustering = local_sum / nn;
  }
  return s;
}

struct TrajectoryPoint {
  std::size_t events = 0;  // events applied so far
  SnapshotStats stats;
};

// Snapshots at the end of the seed, after every `every` events, and at the
// final state.
inline std::vector<TrajectoryPoint> trajectory(
    const GrowthTrace& trace, std::size_t every,
    ClusteringMode mode = ClusteringMode::kTransitivity,
    const ReplayOptions& options = {}) {
  if (every < 1) throw std::invalid_argument("sample interval must be >= 1");
  std::vector<TrajectoryPoint> out;
  Replayer replay(trace, options);
  auto take = [&] {
    if (replay.graph().edge_count() == 0) return;
    out.push_back({replay.position(), snapshot(replay.graph(), mode)});
  };
  take();
  while (!replay.done()) {
    replay.apply();
    if (replay.position() % every == 0 || replay.done()) take();
  }
  return out;
}

namespace detail {

inline std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  return format_double(v);
}

}  // namespace detail

// Columns: edges,nodes,d1,d2,max_degree,mean_degree,mean_square_degree,
// assortativity,clustering.
inline void write_trajectory_csv(const std::vector<TrajectoryPoint>& points,
                                 std::ostream& out) {
  out << "edges,nodes,d1,d2,max_degree,mean_degree,mean_square_degree,"
         "assortativity,clustering\n";
  for (const auto& p : points) {
    const auto& s = p.stats;
    out << s.edges << ',' << s.nodes << ',' << detail::csv_number(s.d1) << ','
        << detail::csv_number(s.d2) << ',' << s.max_degree << ','
        << detail::csv_number(s.mean_degree) << ','
        << detail::csv_number(s.mean_square_degree) << ','
        << detail::csv_number(s.assortativity) << ','
        << detail::csv_number(s.clustering) << '\n';
  }
}

}  // namespace netlik

#endif  // NETLIK_STATS_HPP_
