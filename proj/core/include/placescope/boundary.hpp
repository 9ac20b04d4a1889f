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

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "placescope/geometry.hpp"
#include "placescope/ingest.hpp"
#include "placescope/kde.hpp"

namespace placescope::boundary {

/// Union of simple closed rings (counter-clockwise, first vertex not
/// repeated). Nested rings are all exteriors; membership is even-odd.
struct BoundarySet {
  std::vector<Ring> polygons;
  double level = 0.0;
  kde::GridGeometry source_grid;

  bool empty() const { return polygons.empty(); }
};

/// Marching-squares rings around the cells whose value exceeds `level`.
///
/// Samples are cell centers. The raster is padded by replicating its border
/// samples out to the raster extent, then by a ring of below-level samples
/// at the same positions, so regions touching the border are clamped to the
/// extent. Crossings are linearly interpolated; saddle cells are joined when
/// the mean of their four corners exceeds the level.
BoundarySet contour(const kde::Raster& raster, double level);

bool contains(const BoundarySet& bset, const PlanarPoint& p);

/// Sum of absolute shoelace areas of all rings.
double area(const BoundarySet& bset);

struct CorpusSplit {
  std::vector<ingest::GeoPost> in_posts;
  std::vector<ingest::GeoPost> out_posts;
};

CorpusSplit split_corpus(std::span<const ingest::GeoPost> posts,
                         const BoundarySet& bset,
                         const kde::LocalProjection& projection);

/// GeoJSON Feature with a MultiPolygon geometry in lon/lat (7 decimals) and
/// properties {"level", "ring_count"}.
std::string to_geojson(const BoundarySet& bset,
                       const kde::LocalProjection& projection);

/// Rings of a MultiPolygon / Polygon GeoJSON document (Feature or bare
/// geometry) projected back to planar coordinates.
std::vector<Ring> rings_from_geojson(std::string_view text,
                                     const kde::LocalProjection& projection);

/// Polygon Feature for a single ring, used for hulls and truth regions.
std::string ring_to_geojson(const Ring& ring,
                            const kde::LocalProjection& projection,
                            std::string_view properties_json = "{}");

}  // namespace placescope::boundary
