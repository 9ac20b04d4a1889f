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
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "placescope/geometry.hpp"
#include "placescope/ingest.hpp"

namespace placescope::kde {

/// Mean Earth radius (IUGG), meters.
inline constexpr double kEarthRadius = 6371008.8;

/// Widest lon or lat span, in degrees, accepted by LocalProjection.
inline constexpr double kMaxProjectionSpan = 5.0;

struct LonLat {
  double lon = 0.0;
  double lat = 0.0;
};

/// Local equirectangular projection about an origin:
///   x = R * (lon - lon0) * cos(lat0),  y = R * (lat - lat0)
class LocalProjection {
 public:
  LocalProjection(double origin_lon, double origin_lat);

  /// Projection centered on the box; throws when the box spans more than
  /// kMaxProjectionSpan degrees on either axis.
  static LocalProjection for_extent(const LonLatBox& box);

  PlanarPoint forward(double lon, double lat) const;
  LonLat inverse(const PlanarPoint& p) const;

  double origin_lon() const { return origin_lon_; }
  double origin_lat() const { return origin_lat_; }

 private:
  double origin_lon_;
  double origin_lat_;
  double cos_lat0_;
};

PlanarPoint project(double lon, double lat, double origin_lon,
                    double origin_lat);

std::vector<PlanarPoint> project_posts(std::span<const ingest::GeoPost> posts,
                                       const LocalProjection& projection);

// ---------------------------------------------------------------------------
// Rasters

/// Lower-left anchored grid; row 0 is the southernmost row.
struct GridGeometry {
  double origin_x = 0.0;
  double origin_y = 0.0;
  double cell_size = 1.0;
  std::size_t n_cols = 0;
  std::size_t n_rows = 0;

  std::size_t cell_count() const { return n_cols * n_rows; }
  PlanarPoint cell_center(std::size_t col, std::size_t row) const {
    return {origin_x + (static_cast<double>(col) + 0.5) * cell_size,
            origin_y + (static_cast<double>(row) + 0.5) * cell_size};
  }
  PlanarBox extent() const {
    return {origin_x, origin_y,
            origin_x + static_cast<double>(n_cols) * cell_size,
            origin_y + static_cast<double>(n_rows) * cell_size};
  }
  /// Cell containing p, if any.
  std::optional<std::pair<std::size_t, std::size_t>> locate(
      const PlanarPoint& p) const;

  friend bool operator==(const GridGeometry&, const GridGeometry&) = default;
};

/// Immutable grid of finite values with a cached maximum.
class Raster {
 public:
  Raster(GridGeometry geometry, std::vector<double> values);

  static Raster zeros(const GridGeometry& geometry);

  const GridGeometry& geometry() const { return geometry_; }
  std::span<const double> values() const { return values_; }
  double at(std::size_t col, std::size_t row) const {
    return values_[row * geometry_.n_cols + col];
  }
  double max_value() const { return max_value_; }
  double min_value() const { return min_value_; }

  friend bool operator==(const Raster& a, const Raster& b) {
    return a.geometry_ == b.geometry_ && a.values_ == b.values_;
  }

 private:
  GridGeometry geometry_;
  std::vector<double> values_;
  double max_value_ = 0.0;
  double min_value_ = 0.0;
};

/// Zero-filled grid covering box with ceil(width / cell_size) columns and
/// ceil(height / cell_size) rows.
Raster make_grid(const PlanarBox& box, double cell_size);

/// Grid covering `box` grown by `pad` on every side, with its origin
/// snapped down to a multiple of cell_size. Throws when the grid would
/// exceed max_cells.
Raster covering_grid(const PlanarBox& box, double pad, double cell_size,
                     std::size_t max_cells = 50'000'000);

/// Cell-wise a - b on identical geometry.
Raster subtract(const Raster& a, const Raster& b);

// ---------------------------------------------------------------------------
// Density estimation

/// Default bandwidth: 0.9 * min(SD, sqrt(1/ln 2) * Dm) * n^-0.2, with SD the
/// standard distance and Dm the median distance to the mean center. Returns
/// 0 when more than half the points sit on the mean center.
double default_search_radius(std::span<const PlanarPoint> points);

struct RadiusChoice {
  double meters = 0.0;
  /// Set when the default came out as 0 and cell_size was substituted.
  bool fell_back = false;
};

/// Applies an explicit override, otherwise the default rule with the
/// one-cell fallback.
RadiusChoice resolve_search_radius(std::span<const PlanarPoint> points,
                                   double cell_size,
                                   std::optional<double> override_radius = {});

/// Quartic kernel value for squared distance d2; zero at and beyond radius.
double quartic_kernel(double d2, double radius);

/// Quartic-kernel density evaluated at every cell center of `grid`
/// (values of the template are ignored). Each cell sums its contributions
/// in point order in extended precision, so the result does not depend on
/// `threads`.
Raster kde(std::span<const PlanarPoint> points, const Raster& grid,
           double radius, unsigned threads = 1);

/// a / max(a) - b / max(b), cell by cell.
Raster normalize_diff(const Raster& a, const Raster& b);

// ---------------------------------------------------------------------------
// Seasonal change

enum class ChangeMode { Absolute, Normalized };

std::string_view to_string(ChangeMode m);
std::optional<ChangeMode> parse_change_mode(std::string_view s);

struct SeasonalChange {
  ingest::Season from_season = ingest::Season::Spring;
  ingest::Season to_season = ingest::Season::Summer;
  ChangeMode mode = ChangeMode::Normalized;
  Raster raster;
};

using SeasonPoints = std::map<ingest::Season, std::vector<PlanarPoint>>;

/// Absolute: kde(keyword, to) - kde(keyword, from).
/// Normalized: normalize_diff(kde(keyword, to), kde(all, to))
///           - normalize_diff(kde(keyword, from), kde(all, from)).
/// Positive cells mark a relative increase. `to` must follow `from` in the
/// Spring, Summer, Fall, Winter cycle.
SeasonalChange seasonal_change(const SeasonPoints& keyword_by_season,
                               const SeasonPoints& all_by_season,
                               ingest::Season from, ingest::Season to,
                               ChangeMode mode, const Raster& grid,
                               double radius, unsigned threads = 1);

}  // namespace placescope::kde
