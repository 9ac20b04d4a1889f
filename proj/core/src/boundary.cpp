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

#include "placescope/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <unordered_map>

#include "json.hpp"
#include "placescope/error.hpp"

namespace placescope::boundary {

namespace {

// Padded sample lattice over a raster with n_cols x n_rows cells:
// index 0 and n+3 are the below-level outer pad, 1 and n+2 replicate the
// border cells at the raster extent, 2..n+1 are cell centers.
class Lattice {
 public:
  Lattice(const kde::Raster& raster, double level)
      : raster_(raster),
        g_(raster.geometry()),
        level_(level),
        width_(g_.n_cols + 4),
        height_(g_.n_rows + 4) {}

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }

  bool outer(std::size_t i, std::size_t j) const {
    return i == 0 || j == 0 || i == width_ - 1 || j == height_ - 1;
  }

  double value(std::size_t i, std::size_t j) const {
    const std::size_t col =
        std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(i) - 2, 0,
                                   static_cast<std::ptrdiff_t>(g_.n_cols) - 1);
    const std::size_t row =
        std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(j) - 2, 0,
                                   static_cast<std::ptrdiff_t>(g_.n_rows) - 1);
    return raster_.at(col, row);
  }

  bool inside(std::size_t i, std::size_t j) const {
    return !outer(i, j) && value(i, j) > level_;
  }

  double x(std::size_t i) const {
    if (i <= 1) return g_.origin_x;
    if (i >= g_.n_cols + 2) {
      return g_.origin_x + static_cast<double>(g_.n_cols) * g_.cell_size;
    }
    return g_.origin_x + (static_cast<double>(i - 2) + 0.5) * g_.cell_size;
  }

  double y(std::size_t j) const {
    if (j <= 1) return g_.origin_y;
    if (j >= g_.n_rows + 2) {
      return g_.origin_y + static_cast<double>(g_.n_rows) * g_.cell_size;
    }
    return g_.origin_y + (static_cast<double>(j - 2) + 0.5) * g_.cell_size;
  }

  // Crossing on the lattice edge between samples a and b.
  PlanarPoint crossing(std::size_t ia, std::size_t ja, std::size_t ib,
                       std::size_t jb) const {
    const PlanarPoint pa{x(ia), y(ja)};
    const PlanarPoint pb{x(ib), y(jb)};
    if (pa == pb) return pa;
    const double va = value(ia, ja);
    const double vb = value(ib, jb);
    const double t = (level_ - va) / (vb - va);
    return {pa.x + t * (pb.x - pa.x), pa.y + t * (pb.y - pa.y)};
  }

 private:
  const kde::Raster& raster_;
  const kde::GridGeometry& g_;
  double level_;
  std::size_t width_;
  std::size_t height_;
};

struct Segment {
  std::uint64_t from_edge;
  std::uint64_t to_edge;
};

// Removes repeated and exactly collinear vertices from a closed ring.
Ring simplify_ring(const Ring& in) {
  Ring ring;
  for (const auto& p : in) {
    if (ring.empty() || !(ring.back() == p)) ring.push_back(p);
  }
  while (ring.size() > 1 && ring.front() == ring.back()) ring.pop_back();

  bool changed = true;
  while (changed && ring.size() >= 3) {
    changed = false;
    Ring out;
    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i) {
      const auto& prev = out.empty() ? ring[(i + n - 1) % n] : out.back();
      const auto& next = ring[(i + 1) % n];
      if (cross(prev, ring[i], next) == 0.0) {
        changed = true;
        continue;
      }
      out.push_back(ring[i]);
    }
    ring = std::move(out);
  }
  return ring;
}

}  // namespace

BoundarySet contour(const kde::Raster& raster, double level) {
  BoundarySet result;
  result.level = level;
  result.source_grid = raster.geometry();

  const Lattice lat(raster, level);
  const std::size_t w = lat.width();
  const std::size_t h = lat.height();

  auto h_edge = [&](std::size_t i, std::size_t j) -> std::uint64_t {
    return (static_cast<std::uint64_t>(j) * w + i) * 2;
  };
  auto v_edge = [&](std::size_t i, std::size_t j) -> std::uint64_t {
    return (static_cast<std::uint64_t>(j) * w + i) * 2 + 1;
  };

  std::vector<Segment> segments;
  std::unordered_map<std::uint64_t, PlanarPoint> vertex;

  for (std::size_t j = 0; j + 1 < h; ++j) {
    for (std::size_t i = 0; i + 1 < w; ++i) {
      // Corners counter-clockwise: bl, br, tr, tl.
      const std::size_t ci[4] = {i, i + 1, i + 1, i};
      const std::size_t cj[4] = {j, j, j + 1, j + 1};
      bool in[4];
      for (int k = 0; k < 4; ++k) in[k] = lat.inside(ci[k], cj[k]);
      if (in[0] == in[1] && in[1] == in[2] && in[2] == in[3]) continue;

      // Edge k runs from corner k to corner k+1.
      const std::uint64_t edge_id[4] = {h_edge(i, j), v_edge(i + 1, j),
                                        h_edge(i, j + 1), v_edge(i, j)};
      struct Crossing {
        int edge;
        bool exit;
      };
      Crossing xs[4];
      int nx = 0;
      for (int k = 0; k < 4; ++k) {
        const int k1 = (k + 1) % 4;
        if (in[k] == in[k1]) continue;
        xs[nx++] = {k, in[k]};
        if (!vertex.contains(edge_id[k])) {
          vertex.emplace(edge_id[k],
                         lat.crossing(ci[k], cj[k], ci[k1], cj[k1]));
        }
      }

      if (nx == 2) {
        const Crossing& ex = xs[0].exit ? xs[0] : xs[1];
        const Crossing& en = xs[0].exit ? xs[1] : xs[0];
        segments.push_back({edge_id[ex.edge], edge_id[en.edge]});
        continue;
      }
      // Saddle: four alternating crossings.
      double mean = 0.0;
      for (int k = 0; k < 4; ++k) mean += lat.value(ci[k], cj[k]);
      mean *= 0.25;
      const bool joined = mean > level;
      for (int a = 0; a < 4; ++a) {
        if (!xs[a].exit) continue;
        const int b = joined ? (a + 1) % 4 : (a + 3) % 4;
        segments.push_back({edge_id[xs[a].edge], edge_id[xs[b].edge]});
      }
    }
  }

  std::unordered_map<std::uint64_t, std::size_t> by_start;
  by_start.reserve(segments.size());
  for (std::size_t s = 0; s < segments.size(); ++s) {
    by_start.emplace(segments[s].from_edge, s);
  }
  std::vector<bool> used(segments.size(), false);
  for (std::size_t s = 0; s < segments.size(); ++s) {
    if (used[s]) continue;
    Ring raw;
    std::size_t cur = s;
    while (!used[cur]) {
      used[cur] = true;
      raw.push_back(vertex.at(segments[cur].from_edge));
      auto it = by_start.find(segments[cur].to_edge);
      if (it == by_start.end()) break;
      cur = it->second;
    }
    Ring ring = simplify_ring(raw);
    if (ring.size() < 3) continue;
    const double a = signed_area(ring);
    if (a == 0.0) continue;
    if (a < 0.0) std::reverse(ring.begin(), ring.end());
    result.polygons.push_back(std::move(ring));
  }
  return result;
}

bool contains(const BoundarySet& bset, const PlanarPoint& p) {
  bool inside = false;
  for (const auto& ring : bset.polygons) {
    const std::size_t n = ring.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
      if (on_segment(ring[j], ring[i], p)) return true;
    }
    if (ring_contains(ring, p)) inside = !inside;
  }
  return inside;
}

double area(const BoundarySet& bset) {
  double total = 0.0;
  for (const auto& ring : bset.polygons) total += std::abs(signed_area(ring));
  return total;
}

CorpusSplit split_corpus(std::span<const ingest::GeoPost> posts,
                         const BoundarySet& bset,
                         const kde::LocalProjection& projection) {
  CorpusSplit split;
  for (const auto& post : posts) {
    const PlanarPoint p = projection.forward(post.lon, post.lat);
    if (contains(bset, p)) {
      split.in_posts.push_back(post);
    } else {
      split.out_posts.push_back(post);
    }
  }
  return split;
}

// ---------------------------------------------------------------------------
// GeoJSON

namespace {

std::string fixed7(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.7f", v);
  // Avoid "-0.0000000".
  if (std::string_view(buf) == "-0.0000000") return "0.0000000";
  return buf;
}

void append_ring(std::string& out, const Ring& ring,
                 const kde::LocalProjection& projection) {
  out += '[';
  for (std::size_t i = 0; i <= ring.size(); ++i) {
    const kde::LonLat ll = projection.inverse(ring[i % ring.size()]);
    if (i) out += ',';
    out += '[';
    out += fixed7(ll.lon);
    out += ',';
    out += fixed7(ll.lat);
    out += ']';
  }
  out += ']';
}

std::string number(double v) {
  nlohmann::json j = v;
  return j.dump();
}

}  // namespace

std::string to_geojson(const BoundarySet& bset,
                       const kde::LocalProjection& projection) {
  std::string out = R"({"type":"Feature","properties":{"level":)";
  out += number(bset.level);
  out += R"(,"ring_count":)";
  out += std::to_string(bset.polygons.size());
  out += R"(},"geometry":{"type":"MultiPolygon","coordinates":[)";
  for (std::size_t r = 0; r < bset.polygons.size(); ++r) {
    if (r) out += ',';
    out += '[';
    append_ring(out, bset.polygons[r], projection);
    out += ']';
  }
  out += "]}}";
  return out;
}

std::string ring_to_geojson(const Ring& ring,
                            const kde::LocalProjection& projection,
                            std::string_view properties_json) {
  std::string out = R"({"type":"Feature","properties":)";
  out += properties_json;
  out += R"(,"geometry":{"type":"Polygon","coordinates":[)";
  append_ring(out, ring, projection);
  out += "]}}";
  return out;
}

std::vector<Ring> rings_from_geojson(std::string_view text,
                                     const kde::LocalProjection& projection) {
  using nlohmann::json;
  const json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw InvalidArgument("GeoJSON document is not an object");
  }
  const json* geom = &doc;
  if (doc.value("type", "") == "Feature") {
    if (!doc.contains("geometry")) throw InvalidArgument("Feature lacks geometry");
    geom = &doc.at("geometry");
  }
  const std::string type = geom->value("type", "");
  std::vector<json> polygons;
  if (type == "MultiPolygon") {
    for (const auto& poly : geom->at("coordinates")) polygons.push_back(poly);
  } else if (type == "Polygon") {
    polygons.push_back(geom->at("coordinates"));
  } else {
    throw InvalidArgument("unsupported GeoJSON geometry type: " + type);
  }
  std::vector<Ring> rings;
  for (const auto& poly : polygons) {
    for (const auto& coords : poly) {
      Ring ring;
      for (const auto& pos : coords) {
        ring.push_back(projection.forward(pos.at(0).get<double>(),
                                          pos.at(1).get<double>()));
      }
      if (ring.size() > 1 && ring.front() == ring.back()) ring.pop_back();
      rings.push_back(std::move(ring));
    }
  }
  return rings;
}

}  // namespace placescope::boundary
