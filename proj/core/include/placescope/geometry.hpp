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

#include <cmath>
#include <span>
#include <vector>

namespace placescope {

/// Projected coordinates in meters east/north of a projection origin.
struct PlanarPoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const PlanarPoint&, const PlanarPoint&) = default;
};

inline double distance(const PlanarPoint& a, const PlanarPoint& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

inline double squared_distance(const PlanarPoint& a, const PlanarPoint& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

/// z-component of (b - a) x (c - a); positive when a, b, c turn left.
inline double cross(const PlanarPoint& a, const PlanarPoint& b,
                    const PlanarPoint& c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

struct PlanarBox {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  double width() const { return max_x - min_x; }
  double height() const { return max_y - min_y; }
  bool degenerate() const { return !(min_x < max_x && min_y < max_y); }
  bool contains(const PlanarPoint& p) const {
    return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y;
  }

  friend bool operator==(const PlanarBox&, const PlanarBox&) = default;
};

/// Longitude/latitude rectangle in degrees.
struct LonLatBox {
  double min_lon = 0.0;
  double min_lat = 0.0;
  double max_lon = 0.0;
  double max_lat = 0.0;

  bool degenerate() const { return !(min_lon < max_lon && min_lat < max_lat); }
  bool contains(double lon, double lat) const {
    return lon >= min_lon && lon <= max_lon && lat >= min_lat && lat <= max_lat;
  }
  double center_lon() const { return 0.5 * (min_lon + max_lon); }
  double center_lat() const { return 0.5 * (min_lat + max_lat); }

  friend bool operator==(const LonLatBox&, const LonLatBox&) = default;
};

/// Closed ring stored without repeating the first vertex.
using Ring = std::vector<PlanarPoint>;

/// Signed shoelace area; positive for counter-clockwise rings.
inline double signed_area(std::span<const PlanarPoint> ring) {
  const std::size_t n = ring.size();
  if (n < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    twice += ring[j].x * ring[i].y - ring[i].x * ring[j].y;
  }
  return 0.5 * twice;
}

PlanarBox bounding_box(std::span<const PlanarPoint> points);

/// Even-odd membership over one ring; points on an edge count as inside.
bool ring_contains(std::span<const PlanarPoint> ring, const PlanarPoint& p);

/// True when p lies on the closed segment [a, b].
bool on_segment(const PlanarPoint& a, const PlanarPoint& b,
                const PlanarPoint& p);

/// Closed-segment intersection test (touching counts).
bool segments_intersect(const PlanarPoint& p1, const PlanarPoint& p2,
                        const PlanarPoint& q1, const PlanarPoint& q2);

/// No two non-adjacent edges touch and no adjacent edges overlap.
bool ring_is_simple(std::span<const PlanarPoint> ring);

}  // namespace placescope
