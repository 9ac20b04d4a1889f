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

#include "placescope/kde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <thread>

#include "placescope/error.hpp"

namespace placescope::kde {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

bool valid_lon_lat(double lon, double lat) {
  return std::isfinite(lon) && std::isfinite(lat) && lon >= -180.0 &&
         lon <= 180.0 && lat >= -90.0 && lat <= 90.0;
}

}  // namespace

LocalProjection::LocalProjection(double origin_lon, double origin_lat)
    : origin_lon_(origin_lon),
      origin_lat_(origin_lat),
      cos_lat0_(std::cos(origin_lat * kDegToRad)) {
  if (!valid_lon_lat(origin_lon, origin_lat) || std::abs(origin_lat) >= 90.0) {
    throw InvalidArgument("projection origin out of range");
  }
}

LocalProjection LocalProjection::for_extent(const LonLatBox& box) {
  if (box.degenerate()) throw InvalidArgument("study area box is degenerate");
  if (!valid_lon_lat(box.min_lon, box.min_lat) ||
      !valid_lon_lat(box.max_lon, box.max_lat)) {
    throw InvalidArgument("study area box out of range");
  }
  if (box.max_lon - box.min_lon > kMaxProjectionSpan ||
      box.max_lat - box.min_lat > kMaxProjectionSpan) {
    throw InvalidArgument("study area spans more than 5 degrees");
  }
  return LocalProjection(box.center_lon(), box.center_lat());
}

PlanarPoint LocalProjection::forward(double lon, double lat) const {
  if (!valid_lon_lat(lon, lat)) {
    throw InvalidArgument("coordinate out of range");
  }
  return {kEarthRadius * (lon - origin_lon_) * kDegToRad * cos_lat0_,
          kEarthRadius * (lat - origin_lat_) * kDegToRad};
}

LonLat LocalProjection::inverse(const PlanarPoint& p) const {
  return {origin_lon_ + p.x / (kEarthRadius * cos_lat0_ * kDegToRad),
          origin_lat_ + p.y / (kEarthRadius * kDegToRad)};
}

PlanarPoint project(double lon, double lat, double origin_lon,
                    double origin_lat) {
  return LocalProjection(origin_lon, origin_lat).forward(lon, lat);
}

std::vector<PlanarPoint> project_posts(std::span<const ingest::GeoPost> posts,
                                       const LocalProjection& projection) {
  std::vector<PlanarPoint> out;
  out.reserve(posts.size());
  for (const auto& p : posts) out.push_back(projection.forward(p.lon, p.lat));
  return out;
}

// ---------------------------------------------------------------------------

std::optional<std::pair<std::size_t, std::size_t>> GridGeometry::locate(
    const PlanarPoint& p) const {
  const double fx = std::floor((p.x - origin_x) / cell_size);
  const double fy = std::floor((p.y - origin_y) / cell_size);
  if (fx < 0.0 || fy < 0.0 || fx >= static_cast<double>(n_cols) ||
      fy >= static_cast<double>(n_rows)) {
    return std::nullopt;
  }
  return std::make_pair(static_cast<std::size_t>(fx),
                        static_cast<std::size_t>(fy));
}

Raster::Raster(GridGeometry geometry, std::vector<double> values)
    : geometry_(geometry), values_(std::move(values)) {
  if (!(geometry_.cell_size > 0.0) || !std::isfinite(geometry_.cell_size)) {
    throw InvalidArgument("raster cell size must be positive");
  }
  if (geometry_.n_cols == 0 || geometry_.n_rows == 0) {
    throw InvalidArgument("raster must have at least one cell");
  }
  if (values_.size() != geometry_.cell_count()) {
    throw InvalidArgument("raster value count does not match its geometry");
  }
  max_value_ = values_.front();
  min_value_ = values_.front();
  for (double v : values_) {
    if (!std::isfinite(v)) throw InvalidArgument("raster values must be finite");
    max_value_ = std::max(max_value_, v);
    min_value_ = std::min(min_value_, v);
  }
}

Raster Raster::zeros(const GridGeometry& geometry) {
  return Raster(geometry, std::vector<double>(geometry.cell_count(), 0.0));
}

Raster make_grid(const PlanarBox& box, double cell_size) {
  if (!(cell_size > 0.0) || !std::isfinite(cell_size)) {
    throw InvalidArgument("cell size must be positive");
  }
  if (box.degenerate()) throw InvalidArgument("grid box is degenerate");
  GridGeometry g;
  g.origin_x = box.min_x;
  g.origin_y = box.min_y;
  g.cell_size = cell_size;
  g.n_cols = static_cast<std::size_t>(std::ceil(box.width() / cell_size));
  g.n_rows = static_cast<std::size_t>(std::ceil(box.height() / cell_size));
  return Raster::zeros(g);
}

Raster covering_grid(const PlanarBox& box, double pad, double cell_size,
                     std::size_t max_cells) {
  if (!(cell_size > 0.0) || !std::isfinite(cell_size)) {
    throw InvalidArgument("cell size must be positive");
  }
  if (!(pad >= 0.0) || !std::isfinite(pad)) {
    throw InvalidArgument("grid padding must be non-negative");
  }
  if (!(box.min_x <= box.max_x && box.min_y <= box.max_y)) {
    throw InvalidArgument("grid box is empty");
  }
  PlanarBox grown{std::floor((box.min_x - pad) / cell_size) * cell_size,
                  std::floor((box.min_y - pad) / cell_size) * cell_size,
                  box.max_x + pad, box.max_y + pad};
  // A single point with no padding still gets one cell.
  if (!(grown.max_x > grown.min_x)) grown.max_x = grown.min_x + cell_size;
  if (!(grown.max_y > grown.min_y)) grown.max_y = grown.min_y + cell_size;
  const double cols = std::ceil(grown.width() / cell_size);
  const double rows = std::ceil(grown.height() / cell_size);
  if (cols * rows > static_cast<double>(max_cells)) {
    throw InvalidArgument(
        "grid of " + std::to_string(static_cast<long long>(cols)) + " x " +
        std::to_string(static_cast<long long>(rows)) +
        " cells is too large; raise the cell size");
  }
  return make_grid(grown, cell_size);
}

Raster subtract(const Raster& a, const Raster& b) {
  if (!(a.geometry() == b.geometry())) {
    throw InvalidArgument("raster geometries differ");
  }
  std::vector<double> out(a.values().size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = a.values()[i] - b.values()[i];
  }
  return Raster(a.geometry(), std::move(out));
}

// ---------------------------------------------------------------------------

double default_search_radius(std::span<const PlanarPoint> points) {
  const std::size_t n = points.size();
  if (n < 2) throw DegenerateInput("default radius needs at least 2 points");
  if (std::all_of(points.begin(), points.end(),
                  [&](const PlanarPoint& p) { return p == points.front(); })) {
    throw DegenerateInput("default radius undefined for coincident points");
  }
  long double sx = 0.0L, sy = 0.0L;
  for (const auto& p : points) {
    sx += p.x;
    sy += p.y;
  }
  const PlanarPoint center{static_cast<double>(sx / n),
                           static_cast<double>(sy / n)};
  std::vector<double> dist(n);
  long double sum_sq = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    dist[i] = distance(points[i], center);
    sum_sq += static_cast<long double>(squared_distance(points[i], center));
  }
  const double standard_distance = std::sqrt(static_cast<double>(sum_sq / n));

  std::sort(dist.begin(), dist.end());
  const double median = (n % 2 == 1)
                            ? dist[n / 2]
                            : 0.5 * (dist[n / 2 - 1] + dist[n / 2]);

  const double spread =
      std::min(standard_distance, std::sqrt(1.0 / std::numbers::ln2) * median);
  return 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
}

RadiusChoice resolve_search_radius(std::span<const PlanarPoint> points,
                                   double cell_size,
                                   std::optional<double> override_radius) {
  if (override_radius) {
    if (!(*override_radius > 0.0) || !std::isfinite(*override_radius)) {
      throw InvalidArgument("search radius must be positive");
    }
    return {*override_radius, false};
  }
  const double r = default_search_radius(points);
  if (r > 0.0) return {r, false};
  return {cell_size, true};
}

double quartic_kernel(double d2, double radius) {
  const double r2 = radius * radius;
  if (!(d2 < r2)) return 0.0;
  const double u = 1.0 - d2 / r2;
  return 3.0 / (std::numbers::pi * r2) * u * u;
}

namespace {

// Accumulates all points into rows [row_begin, row_end).
void kde_rows(std::span<const PlanarPoint> points, const GridGeometry& g,
              double radius, std::size_t row_begin, std::size_t row_end,
              std::vector<long double>& acc) {
  const double r2 = radius * radius;
  const double cs = g.cell_size;
  const auto clamp_index = [](double v, std::size_t hi) -> std::ptrdiff_t {
    if (v < 0.0) return 0;
    if (v > static_cast<double>(hi)) return static_cast<std::ptrdiff_t>(hi);
    return static_cast<std::ptrdiff_t>(v);
  };
  for (const auto& p : points) {
    // Candidate window padded by one cell; the exact d2 < r2 test decides.
    const double col_lo = std::floor((p.x - radius - g.origin_x) / cs - 0.5) - 1;
    const double col_hi = std::ceil((p.x + radius - g.origin_x) / cs - 0.5) + 1;
    const double row_lo = std::floor((p.y - radius - g.origin_y) / cs - 0.5) - 1;
    const double row_hi = std::ceil((p.y + radius - g.origin_y) / cs - 0.5) + 1;
    if (col_hi < 0.0 || row_hi < 0.0) continue;
    const auto c0 = clamp_index(col_lo, g.n_cols);
    const auto c1 = clamp_index(col_hi + 1, g.n_cols);
    auto r0 = clamp_index(row_lo, g.n_rows);
    auto r1 = clamp_index(row_hi + 1, g.n_rows);
    r0 = std::max<std::ptrdiff_t>(r0, static_cast<std::ptrdiff_t>(row_begin));
    r1 = std::min<std::ptrdiff_t>(r1, static_cast<std::ptrdiff_t>(row_end));
    for (auto row = r0; row < r1; ++row) {
      for (auto col = c0; col < c1; ++col) {
        const PlanarPoint c = g.cell_center(static_cast<std::size_t>(col),
                                            static_cast<std::size_t>(row));
        const double dx = c.x - p.x;
        const double dy = c.y - p.y;
        const double d2 = dx * dx + dy * dy;
        if (d2 < r2) {
          acc[static_cast<std::size_t>(row) * g.n_cols +
              static_cast<std::size_t>(col)] += quartic_kernel(d2, radius);
        }
      }
    }
  }
}

}  // namespace

Raster kde(std::span<const PlanarPoint> points, const Raster& grid,
           double radius, unsigned threads) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw InvalidArgument("search radius must be positive");
  }
  const GridGeometry& g = grid.geometry();
  std::vector<long double> acc(g.cell_count(), 0.0L);

  const std::size_t workers =
      std::clamp<std::size_t>(threads == 0 ? 1 : threads, 1, g.n_rows);
  if (workers == 1) {
    kde_rows(points, g, radius, 0, g.n_rows, acc);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = g.n_rows * w / workers;
      const std::size_t end = g.n_rows * (w + 1) / workers;
      pool.emplace_back([&, begin, end] {
        kde_rows(points, g, radius, begin, end, acc);
      });
    }
  }

  std::vector<double> values(acc.size());
  std::transform(acc.begin(), acc.end(), values.begin(),
                 [](long double v) { return static_cast<double>(v); });
  return Raster(g, std::move(values));
}

Raster normalize_diff(const Raster& a, const Raster& b) {
  if (!(a.geometry() == b.geometry())) {
    throw InvalidArgument("raster geometries differ");
  }
  if (!(a.max_value() > 0.0) || !(b.max_value() > 0.0)) {
    throw DegenerateInput("normalization needs rasters with a positive maximum");
  }
  const double ma = a.max_value();
  const double mb = b.max_value();
  std::vector<double> out(a.values().size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = a.values()[i] / ma - b.values()[i] / mb;
  }
  return Raster(a.geometry(), std::move(out));
}

// ---------------------------------------------------------------------------

std::string_view to_string(ChangeMode m) {
  return m == ChangeMode::Absolute ? "Absolute" : "Normalized";
}

std::optional<ChangeMode> parse_change_mode(std::string_view s) {
  const std::string f = ingest::fold_ascii(s);
  if (f == "absolute") return ChangeMode::Absolute;
  if (f == "normalized") return ChangeMode::Normalized;
  return std::nullopt;
}

namespace {

const std::vector<PlanarPoint>& season_points(const SeasonPoints& by_season,
                                              ingest::Season s,
                                              const char* what) {
  auto it = by_season.find(s);
  if (it == by_season.end()) {
    throw InvalidArgument(std::string("no ") + what + " data for " +
                          std::string(ingest::to_string(s)));
  }
  if (it->second.empty()) {
    throw DegenerateInput(std::string("empty ") + what + " point set for " +
                          std::string(ingest::to_string(s)));
  }
  return it->second;
}

}  // namespace

SeasonalChange seasonal_change(const SeasonPoints& keyword_by_season,
                               const SeasonPoints& all_by_season,
                               ingest::Season from, ingest::Season to,
                               ChangeMode mode, const Raster& grid,
                               double radius, unsigned threads) {
  if (ingest::next_season(from) != to) {
    throw InvalidArgument("seasons must be consecutive");
  }
  const auto& kw_from = season_points(keyword_by_season, from, "keyword");
  const auto& kw_to = season_points(keyword_by_season, to, "keyword");
  const Raster k_from = kde(kw_from, grid, radius, threads);
  const Raster k_to = kde(kw_to, grid, radius, threads);

  if (mode == ChangeMode::Absolute) {
    return {from, to, mode, subtract(k_to, k_from)};
  }
  const auto& all_from = season_points(all_by_season, from, "population");
  const auto& all_to = season_points(all_by_season, to, "population");
  const Raster n_from =
      normalize_diff(k_from, kde(all_from, grid, radius, threads));
  const Raster n_to = normalize_diff(k_to, kde(all_to, grid, radius, threads));
  return {from, to, mode, subtract(n_to, n_from)};
}

}  // namespace placescope::kde
