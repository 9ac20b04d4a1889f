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

// Synthetic corpora with known ground truth.
//
// Random numbers come from std::mt19937_64. A uniform draw is
// (x >> 11) * 2^-53 for the next 64-bit output x; a normal draw is
// sqrt(-2 ln(1 - u1)) * cos(2 pi u2) from two uniform draws (the sine
// partner is discarded).

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "placescope/boundary.hpp"
#include "placescope/geometry.hpp"
#include "placescope/ingest.hpp"
#include "placescope/kde.hpp"

namespace placescope::synth {

class Random {
 public:
  explicit Random(std::uint64_t seed) : engine_(seed) {}

  double uniform();  // [0, 1)
  double normal();   // mean 0, sd 1
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

struct VocabTerm {
  std::string term;
  double probability = 0.5;
};

enum class TruthKind { Disk, Polyline };

struct TruthSpec {
  TruthKind kind = TruthKind::Disk;
  /// lon/lat of the planar origin; all planar geometry is relative to it.
  double origin_lon = 0.0;
  double origin_lat = 0.0;
  PlanarPoint center;                 // Disk
  std::vector<PlanarPoint> vertices;  // Polyline
  double sigma = 400.0;               // blob spread or line jitter, meters
  std::map<ingest::Season, double> season_weights = {
      {ingest::Season::Spring, 1.0}, {ingest::Season::Summer, 1.0},
      {ingest::Season::Fall, 1.0}, {ingest::Season::Winter, 1.0}};
  std::string place_name = "place";
  std::vector<VocabTerm> vocab;
  std::uint64_t seed = 1;
  int year = 2015;

  kde::LocalProjection projection() const { return {origin_lon, origin_lat}; }

  /// Disk of radius 2 sigma, or the polyline buffered by 2 sigma.
  bool truth_contains(const PlanarPoint& p) const;
  PlanarBox truth_box() const;
  /// Polygon approximating the truth region (disk only: 256-gon).
  Ring truth_ring(std::size_t segments = 256) const;
};

/// Throws InvalidArgument for a spec that breaks its invariants.
void validate(const TruthSpec& spec);

/// Offsets drawn from N(center, sigma^2 I); text always names the place.
std::vector<ingest::GeoPost> gen_blob(const TruthSpec& spec, std::size_t n);

/// Uniform over the lon/lat box with neutral text that never names a place.
std::vector<ingest::GeoPost> gen_uniform(const LonLatBox& bbox, std::size_t n,
                                         std::uint64_t seed, int year = 2015);

/// Uniform by arc length along the polyline with Gaussian jitter across it.
std::vector<ingest::GeoPost> gen_polyline(const TruthSpec& spec, std::size_t n);

/// Intersection over union of two regions given as membership tests,
/// sampled at the cell centers of a 512 x 512 grid over the union of their
/// boxes. Two empty regions give 0.
template <typename InA, typename InB>
double iou_sampled(const PlanarBox& box_a, InA&& in_a, const PlanarBox& box_b,
                   InB&& in_b, std::size_t resolution = 512);

double iou(const boundary::BoundarySet& bset, const TruthSpec& truth);
double iou(const boundary::BoundarySet& bset, std::span<const PlanarPoint> ring);
double iou(std::span<const PlanarPoint> a, std::span<const PlanarPoint> b);

// ---------------------------------------------------------------------------

template <typename InA, typename InB>
double iou_sampled(const PlanarBox& box_a, InA&& in_a, const PlanarBox& box_b,
                   InB&& in_b, std::size_t resolution) {
  const bool a_ok = box_a.min_x <= box_a.max_x && box_a.min_y <= box_a.max_y;
  const bool b_ok = box_b.min_x <= box_b.max_x && box_b.min_y <= box_b.max_y;
  if (!a_ok && !b_ok) return 0.0;
  PlanarBox box = a_ok ? box_a : box_b;
  if (a_ok && b_ok) {
    box.min_x = std::min(box_a.min_x, box_b.min_x);
    box.min_y = std::min(box_a.min_y, box_b.min_y);
    box.max_x = std::max(box_a.max_x, box_b.max_x);
    box.max_y = std::max(box_a.max_y, box_b.max_y);
  }
  const double dx = box.width() / static_cast<double>(resolution);
  const double dy = box.height() / static_cast<double>(resolution);
  std::size_t inter = 0, uni = 0;
  for (std::size_t r = 0; r < resolution; ++r) {
    const double y = box.min_y + (static_cast<double>(r) + 0.5) * dy;
    for (std::size_t c = 0; c < resolution; ++c) {
      const PlanarPoint p{box.min_x + (static_cast<double>(c) + 0.5) * dx, y};
      const bool a = a_ok && in_a(p);
      const bool b = b_ok && in_b(p);
      inter += (a && b) ? 1 : 0;
      uni += (a || b) ? 1 : 0;
    }
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace placescope::synth
