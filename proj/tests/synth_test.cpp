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

#include "placescope/synth.hpp"

#include <cmath>
#include <map>
#include <vector>

#include "doctest.h"
#include "placescope/error.hpp"

using namespace placescope;
using namespace placescope::synth;

namespace {

TruthSpec disk_spec(std::uint64_t seed) {
  TruthSpec s;
  s.origin_lon = -117.07;
  s.origin_lat = 32.77;
  s.sigma = 400;
  s.seed = seed;
  s.place_name = "SDSU";
  s.vocab = {{"aztecs", 0.5}, {"campus", 0.2}};
  return s;
}

Ring square(double x0, double y0, double side) {
  return {{x0, y0}, {x0 + side, y0}, {x0 + side, y0 + side}, {x0, y0 + side}};
}

}  // namespace

TEST_CASE("random source") {
  Random a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    const double u = a.uniform();
    CHECK(u == b.uniform());
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  // First uniform draw is the top 53 bits of the first engine output.
  std::mt19937_64 engine(7);
  Random c(7);
  CHECK(c.uniform() == static_cast<double>(engine() >> 11) * 0x1.0p-53);
}

TEST_CASE("gen_blob") {
  const auto spec = disk_spec(3);
  const auto posts = gen_blob(spec, 500);
  CHECK(posts.size() == 500);
  CHECK(posts == gen_blob(spec, 500));
  CHECK(posts != gen_blob(disk_spec(4), 500));

  const auto proj = spec.projection();
  double mx = 0, my = 0;
  for (const auto& p : posts) {
    CHECK(ingest::PlaceQuery("SDSU").matches(p.text));
    const auto xy = proj.forward(p.lon, p.lat);
    mx += xy.x;
    my += xy.y;
    CHECK(ingest::assign_season(p.timestamp) == ingest::season_key(p.timestamp).season);
    auto parsed = ingest::parse_post(ingest::to_record_line(p));
    REQUIRE(parsed);
  }
  mx /= 500;
  my /= 500;
  const double bound = 5 * spec.sigma / std::sqrt(500.0);
  CHECK(std::abs(mx) < bound);
  CHECK(std::abs(my) < bound);

  auto bad = spec;
  bad.sigma = 0;
  CHECK_THROWS_AS(gen_blob(bad, 10), InvalidArgument);
  bad = spec;
  bad.vocab = {{"x", 1.5}};
  CHECK_THROWS_AS(gen_blob(bad, 10), InvalidArgument);
  CHECK_THROWS_AS(gen_blob(spec, 0), InvalidArgument);
}

TEST_CASE("season weights") {
  auto spec = disk_spec(5);
  spec.season_weights = {{ingest::Season::Spring, 1.0}, {ingest::Season::Summer, 0.0},
                         {ingest::Season::Fall, 1.0}, {ingest::Season::Winter, 0.0}};
  std::map<ingest::Season, int> counts;
  for (const auto& p : gen_blob(spec, 2000)) ++counts[ingest::assign_season(p.timestamp)];
  CHECK(counts[ingest::Season::Summer] == 0);
  CHECK(counts[ingest::Season::Winter] == 0);
  CHECK(std::abs(counts[ingest::Season::Spring] - 1000) < 4 * std::sqrt(500.0));
}

TEST_CASE("gen_uniform") {
  const LonLatBox box{-117.2, 32.7, -117.1, 32.8};
  CHECK(gen_uniform(box, 0, 1).empty());
  const auto posts = gen_uniform(box, 10000, 1);
  CHECK(posts.size() == 10000);
  int q[4] = {0, 0, 0, 0};
  for (const auto& p : posts) {
    CHECK(box.contains(p.lon, p.lat));
    CHECK_FALSE(p.text.empty());
    q[(p.lon >= box.center_lon() ? 1 : 0) + (p.lat >= box.center_lat() ? 2 : 0)]++;
  }
  const double sd = std::sqrt(10000 * 0.25 * 0.75);
  for (int c : q) CHECK(std::abs(c - 2500) <= 4 * sd);
  CHECK_THROWS_AS(gen_uniform(LonLatBox{0, 0, 0, 1}, 5, 1), InvalidArgument);
}

TEST_CASE("gen_polyline") {
  TruthSpec spec;
  spec.kind = TruthKind::Polyline;
  spec.origin_lon = -117.15;
  spec.origin_lat = 32.8;
  spec.vertices = {{-5000, 0}, {0, 0}, {3000, 4000}};
  spec.sigma = 0;
  const auto flat = gen_polyline(spec, 300);
  CHECK(flat.size() == 300);
  const auto proj = spec.projection();
  for (const auto& p : flat) {
    const auto xy = proj.forward(p.lon, p.lat);
    const bool on = on_segment(spec.vertices[0], spec.vertices[1], xy) ||
                    on_segment(spec.vertices[1], spec.vertices[2], xy);
    const double d = std::min(std::abs(xy.y), std::abs(4.0 * xy.x - 3.0 * xy.y) / 5.0);
    CHECK((on || d < 1e-6));
  }

  spec.vertices = {{-5000, 0}, {5000, 0}};
  spec.sigma = 200;
  const auto jittered = gen_polyline(spec, 2000);
  double mean = 0;
  for (const auto& p : jittered) mean += proj.forward(p.lon, p.lat).y;
  mean /= 2000;
  CHECK(std::abs(mean) < 5 * 200 / std::sqrt(2000.0));
  CHECK(spec.truth_contains({0, 399}));
  CHECK_FALSE(spec.truth_contains({0, 401}));
  CHECK(spec.truth_contains({5300, 0}));

  spec.vertices = {{0, 0}};
  CHECK_THROWS_AS(gen_polyline(spec, 5), InvalidArgument);
}

TEST_CASE("iou") {
  const auto a = square(0, 0, 1);
  CHECK(iou(a, a) == 1.0);
  CHECK(iou(a, square(5, 5, 1)) == 0.0);
  const Ring half = {{0.5, 0}, {1.5, 0}, {1.5, 1}, {0.5, 1}};
  CHECK(iou(a, half) == doctest::Approx(1.0 / 3.0).epsilon(0.01));
  CHECK(iou(half, a) == iou(a, half));

  boundary::BoundarySet empty;
  CHECK(iou(empty, std::span<const PlanarPoint>{}) == 0.0);

  auto spec = disk_spec(1);
  boundary::BoundarySet exact;
  exact.polygons = {spec.truth_ring(1024)};
  CHECK(iou(exact, spec) > 0.99);
}
