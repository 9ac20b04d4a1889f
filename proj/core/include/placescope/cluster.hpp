// Copyright 2026 The Placescope Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "placescope/geometry.hpp"

namespace placescope::cluster {

inline constexpr int kNoise = -1;

enum class Method { Dbscan, Dmdbscan, Ward };

std::string_view to_string(Method m);
std::optional<Method> parse_method(std::string_view s);

struct ClusterParams {
  std::vector<double> eps;  // ascending; density methods only
  std::size_t min_pts = 0;  // density methods only
  std::size_t k = 0;        // Ward only
};

struct ClusterResult {
  std::vector<int> labels;  // cluster id in [0, k) or kNoise
  std::size_t k = 0;
  Method method = Method::Dbscan;
  ClusterParams params;

  std::size_t noise_count() const;
};

/// Density clustering. A point is core when at least min_pts points
/// (itself included) lie within eps. Cores that reach each other share a
/// cluster; a border point joins the cluster of its nearest core, ties going
/// to the core with the lexicographically smallest (x, y). Clusters are
/// numbered by their lexicographically smallest core, so labels do not
/// depend on input order.
ClusterResult dbscan(std::span<const PlanarPoint> points, double eps,
                     std::size_t min_pts);

/// Sorted distances from each point to its min_pts-th nearest other point.
std::vector<double> k_distance_curve(std::span<const PlanarPoint> points,
                                     std::size_t min_pts);

/// Eps levels at the knees of the k-distance curve, ascending.
///
/// Works on L = ln(k-dist). With h = max(1, ceil(n / 10)), a knee region is
/// a run of indices where L[i+h] - 2 L[i] + L[i-h] exceeds
/// max(3 * median |second difference|, ln 1.5); the knee itself is the
/// largest single-step rise of L within the run (extended by h). The curve
/// maximum is appended when the last knee lies more than h points from the
/// end. Without knees the curve median is the single level.
std::vector<double> dmdbscan_eps_levels(std::span<const PlanarPoint> points,
                                        std::size_t min_pts);

/// Runs dbscan on the still-unlabeled points at each eps level in turn.
ClusterResult dmdbscan(std::span<const PlanarPoint> points,
                       std::size_t min_pts);

/// Same as dmdbscan with explicit levels.
ClusterResult dmdbscan_with_levels(std::span<const PlanarPoint> points,
                                   std::size_t min_pts,
                                   std::vector<double> levels);

/// Ward agglomeration (Lance-Williams on squared Euclidean distances) down
/// to k clusters. Equal merge costs go to the pair with the smallest
/// (lowest point index, lowest point index). Clusters are numbered by their
/// lowest point index.
ClusterResult ward_cluster(std::span<const PlanarPoint> points, std::size_t k);

/// Sum over clusters of squared distances to the cluster mean; noise points
/// are ignored.
double within_cluster_ss(const ClusterResult& result,
                         std::span<const PlanarPoint> points);

/// Members of the most populous cluster (lowest id on ties), in input order.
std::vector<PlanarPoint> largest_cluster(const ClusterResult& result,
                                         std::span<const PlanarPoint> points);

/// CSV with header point_index,x,y,label; noise is labeled -1.
std::string to_csv(const ClusterResult& result,
                   std::span<const PlanarPoint> points);

// ---------------------------------------------------------------------------
// Hulls

enum class HullKind { Convex, Concave };

std::string_view to_string(HullKind k);

struct Hull {
  HullKind kind = HullKind::Convex;
  Ring ring;             // counter-clockwise, first vertex not repeated
  std::size_t k_used = 0;  // concave only
};

/// Monotone chain; collinear boundary points are dropped.
Hull convex_hull(std::span<const PlanarPoint> points);

/// k-nearest-neighbour gift wrapping. Starting from k0, k grows until the
/// ring is simple and encloses every point; once k reaches the number of
/// distinct points the convex hull is returned.
Hull concave_hull(std::span<const PlanarPoint> points, std::size_t k0 = 3);

}  // namespace placescope::cluster
