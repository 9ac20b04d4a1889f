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

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "placescope/boundary.hpp"
#include "placescope/cluster.hpp"
#include "placescope/geometry.hpp"
#include "placescope/ingest.hpp"
#include "placescope/kde.hpp"
#include "placescope/semantic.hpp"

namespace placescope::ontology {

enum class FeatureCategory { Polyline, NonPolyline };

std::string_view to_string(FeatureCategory c);

struct RegionProfile {
  std::string name;
  LonLatBox bbox;
  double polyline_threshold = 10000.0;  // meters
  double default_cell_size = 100.0;     // meters
  semantic::TokenizeMode text_mode = semantic::TokenizeMode::Latin;
};

/// "san-diego" or "beijing".
std::optional<RegionProfile> region_preset(std::string_view name);
std::vector<std::string> region_preset_names();

/// Polyline iff the radius exceeds the region's threshold.
FeatureCategory classify_feature(double default_radius,
                                 const RegionProfile& region);

/// Places with fewer keyword posts get no boundary and no hulls.
inline constexpr std::size_t kMinBoundaryPosts = 10;

struct OntologyConfig {
  double cell_size = 0.0;  // 0 selects the region default
  std::optional<double> radius_override;
  double contour_level = 0.0;
  std::size_t min_pts = 4;
  std::size_t concave_k0 = 3;
  std::size_t top_k = 50;
  semantic::Stopwords stopwords;
  std::optional<semantic::TokenizeMode> text_mode;  // region default if unset
  unsigned threads = 1;
  /// Upper bound on grid cells; larger grids are rejected.
  std::size_t max_cells = 50'000'000;
};

struct HullSummary {
  cluster::ClusterResult clustering;
  std::size_t cluster_size = 0;
  std::optional<cluster::Hull> convex;
  std::optional<cluster::Hull> concave;
  std::string note;  // why hulls are missing, if they are
};

struct PlaceOntology {
  ingest::PlaceQuery query{"?"};
  RegionProfile region;
  kde::LocalProjection projection{0.0, 0.0};
  FeatureCategory feature_category = FeatureCategory::NonPolyline;
  kde::RadiusChoice default_radius;
  std::size_t post_count = 0;
  std::size_t all_post_count = 0;

  std::optional<kde::Raster> normalized;  // grid and normalized difference
  std::optional<boundary::BoundarySet> boundary;
  std::optional<HullSummary> hulls;

  std::array<semantic::TermTable, 3> term_tables;  // full, in, out
  double seasonal_radius = 0.0;
  std::vector<kde::SeasonalChange> seasonal_changes;
};

/// Full pipeline for one place. `corpus` holds the posts naming the place,
/// `all_posts` the whole noise-filtered collection it was drawn from. Term
/// tables are computed over `all_posts` and its split by the boundary.
/// Failures are reported as StageError naming the stage.
PlaceOntology build_place_ontology(const ingest::PlaceQuery& query,
                                   std::span<const ingest::GeoPost> corpus,
                                   std::span<const ingest::GeoPost> all_posts,
                                   const RegionProfile& region,
                                   const OntologyConfig& config = {});

/// Radius for seasonal change rasters: the default radius of the Spring
/// keyword points, or `fallback` when Spring has too few distinct points.
double seasonal_radius(const kde::SeasonPoints& keyword_by_season,
                       double fallback);

/// Points of each season, pooled across years.
kde::SeasonPoints points_by_season(std::span<const ingest::GeoPost> posts,
                                   const kde::LocalProjection& projection);

/// Raster artifacts of an ontology with their file names under `stem`
/// (stem.normalized.asc, stem.spring-summer.asc, ...).
std::vector<std::pair<std::string, const kde::Raster*>> raster_artifacts(
    const PlaceOntology& onto, const std::string& stem);

/// The "placescope/1" JSON document; rasters are referenced by the names
/// raster_artifacts gives for the same stem.
std::string to_json(const PlaceOntology& onto, const std::string& stem);

}  // namespace placescope::ontology
