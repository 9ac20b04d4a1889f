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

#include "placescope/geometry.hpp"

#include <algorithm>
#include <limits>

namespace placescope {

PlanarBox bounding_box(std::span<const PlanarPoint> points) {
  PlanarBox box{std::numeric_limits<double>::infinity(),
                std::numeric_limits<double>::infinity(),
                -std::numeric_limits<double>::infinity(),
                -std::numeric_limits<double>::infinity()};
  for (const auto& p : points) {
    box.min_x = std::min(box.min_x, p.x);
    box.min_y = std::min(box.min_y, p.y);
    box.max_x = std::max(box.max_x, p.x);
    box.max_y = std::max(box.max_y, p.y);
  }
  return box;
}

bool on_segment(const PlanarPoint& a, const PlanarPoint& b,
                const PlanarPoint& p) {
  if (cross(a, b, p) != 0.0) return false;
  return p.x >= std::min(a.x, b.x) && p.x <= std::max(a.x, b.x) &&
         p.y >= std::min(a.y, b.y) && p.y <= std::max(a.y, b.y);
}

bool ring_contains(std::span<const PlanarPoint> ring, const PlanarPoint& p) {
  const std::size_t n = ring.size();
  if (n < 3) return false;
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto& a = ring[j];
    const auto& b = ring[i];
    if (on_segment(a, b, p)) return true;
    if ((b.y > p.y) != (a.y > p.y)) {
      const double x_cross = b.x + (p.y - b.y) * (a.x - b.x) / (a.y - b.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

namespace {

int orientation(const PlanarPoint& a, const PlanarPoint& b,
                const PlanarPoint& c) {
  const double v = cross(a, b, c);
  return (v > 0.0) - (v < 0.0);
}

}  // namespace

bool segments_intersect(const PlanarPoint& p1, const PlanarPoint& p2,
                        const PlanarPoint& q1, const PlanarPoint& q2) {
  const int o1 = orientation(p1, p2, q1);
  const int o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1);
  const int o4 = orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1, p2, q1)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1)) return true;
  if (o4 == 0 && on_segment(q1, q2, p2)) return true;
  return false;
}

bool ring_is_simple(std::span<const PlanarPoint> ring) {
  const std::size_t n = ring.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (ring[i] == ring[j]) return false;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a1 = ring[i];
    const auto& a2 = ring[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto& b1 = ring[j];
      const auto& b2 = ring[(j + 1) % n];
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) {
        // Shared vertex is fine; folding back along the same line is not.
        const PlanarPoint& shared = (j == i + 1) ? a2 : a1;
        const PlanarPoint& a_other = (j == i + 1) ? a1 : a2;
        const PlanarPoint& b_other = (j == i + 1) ? b2 : b1;
        if (on_segment(shared, a_other, b_other) ||
            on_segment(shared, b_other, a_other)) {
          return false;
        }
        continue;
      }
      if (segments_intersect(a1, a2, b1, b2)) return false;
    }
  }
  return true;
}

}  // namespace placescope
