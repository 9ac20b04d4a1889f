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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "placescope/error.hpp"

namespace placescope::synth {

double Random::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Random::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(1.0 - u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

namespace {

double segment_distance(const PlanarPoint& a, const PlanarPoint& b,
                        const PlanarPoint& p) {
  const double vx = b.x - a.x, vy = b.y - a.y;
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0.0 ? ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return distance(p, {a.x + t * vx, a.y + t * vy});
}

const std::vector<std::string>& neutral_words() {
  static const std::vector<std::string> words = {
      "coffee", "traffic", "sunny", "weekend", "lunch", "music",
      "friends", "work", "game", "dinner", "morning", "happy"};
  return words;
}

ingest::Timestamp draw_time(Random& rng, ingest::Season season, int year) {
  using namespace std::chrono;
  const unsigned start_month[] = {3, 6, 9, 12};
  const auto idx = static_cast<int>(season);
  const sys_days begin = year_month_day{std::chrono::year{year},
                                        month{start_month[idx]}, day{1}};
  const sys_days end = season == ingest::Season::Winter
                           ? sys_days{year_month_day{std::chrono::year{year + 1},
                                                     month{3}, day{1}}}
                           : sys_days{year_month_day{std::chrono::year{year},
                                                     month{start_month[idx] + 3},
                                                     day{1}}};
  const auto span = duration_cast<seconds>(end - begin).count();
  const auto offset = static_cast<long long>(rng.uniform() * static_cast<double>(span));
  return time_point_cast<seconds>(sys_seconds{begin} + seconds{offset});
}

ingest::Season draw_season(Random& rng,
                           const std::map<ingest::Season, double>& weights) {
  double total = 0.0;
  for (auto s : ingest::kSeasons) {
    auto it = weights.find(s);
    total += it == weights.end() ? 0.0 : it->second;
  }
  double u = rng.uniform() * total;
  ingest::Season last = ingest::Season::Spring;
  for (auto s : ingest::kSeasons) {
    auto it = weights.find(s);
    const double w = it == weights.end() ? 0.0 : it->second;
    if (w <= 0.0) continue;
    last = s;
    if (u < w) return s;
    u -= w;
  }
  return last;
}

std::string make_id(const char* prefix, std::uint64_t seed, std::size_t i) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s-%llu-%06zu", prefix,
                static_cast<unsigned long long>(seed), i);
  return buf;
}

std::string place_text(Random& rng, const TruthSpec& spec) {
  std::string text = spec.place_name;
  for (const auto& v : spec.vocab) {
    if (rng.uniform() < v.probability) text += " " + v.term;
  }
  return text;
}

ingest::GeoPost make_post(std::string id, const PlanarPoint& p,
                          const kde::LocalProjection& proj,
                          ingest::Timestamp t, std::string text) {
  const kde::LonLat ll = proj.inverse(p);
  ingest::GeoPost post;
  post.id = std::move(id);
  post.timestamp = t;
  post.lon = ll.lon;
  post.lat = ll.lat;
  post.text = std::move(text);
  post.source = "synth";
  post.platform = ingest::Platform::Twitter;
  return post;
}

}  // namespace

bool TruthSpec::truth_contains(const PlanarPoint& p) const {
  const double r = 2.0 * sigma;
  if (kind == TruthKind::Disk) return squared_distance(p, center) <= r * r;
  for (std::size_t i = 0; i + 1 < vertices.size(); ++i) {
    if (segment_distance(vertices[i], vertices[i + 1], p) <= r) return true;
  }
  return false;
}

PlanarBox TruthSpec::truth_box() const {
  const double r = 2.0 * sigma;
  if (kind == TruthKind::Disk) {
    return {center.x - r, center.y - r, center.x + r, center.y + r};
  }
  PlanarBox box = bounding_box(vertices);
  return {box.min_x - r, box.min_y - r, box.max_x + r, box.max_y + r};
}

Ring TruthSpec::truth_ring(std::size_t segments) const {
  if (kind != TruthKind::Disk) {
    throw InvalidArgument("truth ring is only defined for disk specs");
  }
  Ring ring;
  const double r = 2.0 * sigma;
  for (std::size_t i = 0; i < segments; ++i) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(i) /
                     static_cast<double>(segments);
    ring.push_back({center.x + r * std::cos(a), center.y + r * std::sin(a)});
  }
  return ring;
}

void validate(const TruthSpec& spec) {
  // A polyline may have zero jitter; a blob needs a spread.
  const bool sigma_ok = spec.kind == TruthKind::Polyline ? spec.sigma >= 0.0
                                                         : spec.sigma > 0.0;
  if (!sigma_ok || !std::isfinite(spec.sigma)) {
    throw InvalidArgument("sigma out of range");
  }
  double total = 0.0;
  for (const auto& [s, w] : spec.season_weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw InvalidArgument("season weights must be non-negative");
    }
    total += w;
  }
  if (!(total > 0.0)) throw InvalidArgument("season weights sum to zero");
  for (const auto& v : spec.vocab) {
    if (!(v.probability >= 0.0 && v.probability <= 1.0)) {
      throw InvalidArgument("vocabulary probabilities must lie in [0, 1]");
    }
  }
  if (spec.place_name.empty()) throw InvalidArgument("place name is empty");
  if (spec.kind == TruthKind::Polyline && spec.vertices.size() < 2) {
    throw InvalidArgument("polyline needs at least 2 vertices");
  }
}

std::vector<ingest::GeoPost> gen_blob(const TruthSpec& spec, std::size_t n) {
  validate(spec);
  if (spec.kind != TruthKind::Disk) throw InvalidArgument("gen_blob needs a disk spec");
  if (n < 1) throw InvalidArgument("gen_blob needs n >= 1");
  Random rng(spec.seed);
  const auto proj = spec.projection();
  std::vector<ingest::GeoPost> posts;
  posts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = rng.normal() * spec.sigma;
    const double dy = rng.normal() * spec.sigma;
    const ingest::Season s = draw_season(rng, spec.season_weights);
    const auto t = draw_time(rng, s, spec.year);
    posts.push_back(make_post(make_id("blob", spec.seed, i),
                              {spec.center.x + dx, spec.center.y + dy}, proj, t,
                              place_text(rng, spec)));
  }
  return posts;
}

std::vector<ingest::GeoPost> gen_uniform(const LonLatBox& bbox, std::size_t n,
                                         std::uint64_t seed, int year) {
  if (bbox.degenerate()) throw InvalidArgument("uniform bbox is degenerate");
  Random rng(seed);
  const auto& words = neutral_words();
  std::vector<ingest::GeoPost> posts;
  posts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    ingest::GeoPost post;
    post.id = make_id("bg", seed, i);
    post.lon = bbox.min_lon + rng.uniform() * (bbox.max_lon - bbox.min_lon);
    post.lat = bbox.min_lat + rng.uniform() * (bbox.max_lat - bbox.min_lat);
    const auto season = ingest::kSeasons[rng.next() % 4];
    post.timestamp = draw_time(rng, season, year);
    for (const auto& w : words) {
      if (rng.uniform() < 0.25) post.text += (post.text.empty() ? "" : " ") + w;
    }
    if (post.text.empty()) post.text = words[rng.next() % words.size()];
    post.source = "synth";
    post.platform = ingest::Platform::Twitter;
    posts.push_back(std::move(post));
  }
  return posts;
}

std::vector<ingest::GeoPost> gen_polyline(const TruthSpec& spec, std::size_t n) {
  validate(spec);
  if (spec.kind != TruthKind::Polyline) {
    throw InvalidArgument("gen_polyline needs a polyline spec");
  }
  std::vector<double> cumulative{0.0};
  for (std::size_t i = 0; i + 1 < spec.vertices.size(); ++i) {
    cumulative.push_back(cumulative.back() +
                         distance(spec.vertices[i], spec.vertices[i + 1]));
  }
  const double total = cumulative.back();
  if (!(total > 0.0)) throw InvalidArgument("polyline has zero length");

  Random rng(spec.seed);
  const auto proj = spec.projection();
  std::vector<ingest::GeoPost> posts;
  posts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = rng.uniform() * total;
    std::size_t seg = static_cast<std::size_t>(
        std::upper_bound(cumulative.begin(), cumulative.end(), s) - cumulative.begin());
    seg = std::clamp<std::size_t>(seg, 1, cumulative.size() - 1) - 1;
    const auto& a = spec.vertices[seg];
    const auto& b = spec.vertices[seg + 1];
    const double len = cumulative[seg + 1] - cumulative[seg];
    const double t = len > 0.0 ? (s - cumulative[seg]) / len : 0.0;
    const double ux = len > 0.0 ? (b.x - a.x) / len : 0.0;
    const double uy = len > 0.0 ? (b.y - a.y) / len : 0.0;
    const double off = rng.normal() * spec.sigma;
    const PlanarPoint p{a.x + t * (b.x - a.x) - uy * off,
                        a.y + t * (b.y - a.y) + ux * off};
    const ingest::Season season = draw_season(rng, spec.season_weights);
    const auto ts = draw_time(rng, season, spec.year);
    posts.push_back(make_post(make_id("line", spec.seed, i), p, proj, ts,
                              place_text(rng, spec)));
  }
  return posts;
}

namespace {

PlanarBox rings_box(const std::vector<Ring>& rings) {
  PlanarBox box = bounding_box({});
  for (const auto& r : rings) {
    const PlanarBox b = bounding_box(r);
    box.min_x = std::min(box.min_x, b.min_x);
    box.min_y = std::min(box.min_y, b.min_y);
    box.max_x = std::max(box.max_x, b.max_x);
    box.max_y = std::max(box.max_y, b.max_y);
  }
  return box;
}

}  // namespace

double iou(const boundary::BoundarySet& bset, const TruthSpec& truth) {
  return iou_sampled(
      rings_box(bset.polygons),
      [&](const PlanarPoint& p) { return boundary::contains(bset, p); },
      truth.truth_box(),
      [&](const PlanarPoint& p) { return truth.truth_contains(p); });
}

double iou(const boundary::BoundarySet& bset, std::span<const PlanarPoint> ring) {
  const PlanarBox ring_box = ring.size() >= 3 ? bounding_box(ring) : bounding_box({});
  return iou_sampled(
      rings_box(bset.polygons),
      [&](const PlanarPoint& p) { return boundary::contains(bset, p); }, ring_box,
      [&](const PlanarPoint& p) { return ring_contains(ring, p); });
}

double iou(std::span<const PlanarPoint> a, std::span<const PlanarPoint> b) {
  boundary::BoundarySet set;
  if (a.size() >= 3) set.polygons.emplace_back(a.begin(), a.end());
  return iou(set, b);
}

}  // namespace placescope::synth
