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

#include "placescope/ontology.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "json.hpp"
#include "placescope/error.hpp"

namespace placescope::ontology {

std::string_view to_string(FeatureCategory c) {
  return c == FeatureCategory::Polyline ? "Polyline" : "NonPolyline";
}

std::optional<RegionProfile> region_preset(std::string_view name) {
  if (name == "san-diego") {
    return RegionProfile{"san-diego", {-117.6, 32.53, -116.08, 33.51}, 10000.0,
                         100.0, semantic::TokenizeMode::Latin};
  }
  if (name == "beijing") {
    return RegionProfile{"beijing", {115.42, 39.44, 117.51, 41.06}, 1000.0,
                         100.0, semantic::TokenizeMode::CjkBigram};
  }
  return std::nullopt;
}

std::vector<std::string> region_preset_names() { return {"san-diego", "beijing"}; }

FeatureCategory classify_feature(double default_radius,
                                 const RegionProfile& region) {
  if (!(default_radius > 0.0) || !std::isfinite(default_radius)) {
    throw InvalidArgument("default radius must be positive");
  }
  if (!(region.polyline_threshold > 0.0)) {
    throw InvalidArgument("polyline threshold must be positive");
  }
  return default_radius > region.polyline_threshold ? FeatureCategory::Polyline
                                                    : FeatureCategory::NonPolyline;
}

namespace {

template <typename F>
auto in_stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(name, e.what());
  }
}

PlanarBox union_box(std::span<const PlanarPoint> a,
                    std::span<const PlanarPoint> b) {
  PlanarBox box = bounding_box(a);
  const PlanarBox other = bounding_box(b);
  box.min_x = std::min(box.min_x, other.min_x);
  box.min_y = std::min(box.min_y, other.min_y);
  box.max_x = std::max(box.max_x, other.max_x);
  box.max_y = std::max(box.max_y, other.max_y);
  return box;
}

semantic::TermTable table_or_empty(std::span<const ingest::GeoPost> posts,
                                   const ingest::PlaceQuery& query,
                                   const OntologyConfig& cfg,
                                   semantic::TokenizeMode mode,
                                   semantic::Scope scope) {
  if (posts.empty()) {
    semantic::TermTable t;
    t.scope = scope;
    t.k = cfg.top_k;
    return t;
  }
  return semantic::term_table(posts, query, cfg.stopwords, cfg.top_k, scope, mode);
}

}  // namespace

kde::SeasonPoints points_by_season(std::span<const ingest::GeoPost> posts,
                                   const kde::LocalProjection& proj) {
  kde::SeasonPoints out;
  for (const auto& p : posts) {
    out[ingest::assign_season(p.timestamp)].push_back(proj.forward(p.lon, p.lat));
  }
  return out;
}

double seasonal_radius(const kde::SeasonPoints& keyword_by_season,
                       double fallback) {
  auto spring = keyword_by_season.find(ingest::Season::Spring);
  if (spring == keyword_by_season.end() || spring->second.size() < 2) {
    return fallback;
  }
  try {
    const double r = kde::default_search_radius(spring->second);
    return r > 0.0 ? r : fallback;
  } catch (const DegenerateInput&) {
    return fallback;
  }
}

PlaceOntology build_place_ontology(const ingest::PlaceQuery& query,
                                   std::span<const ingest::GeoPost> corpus,
                                   std::span<const ingest::GeoPost> all_posts,
                                   const RegionProfile& region,
                                   const OntologyConfig& config) {
  if (corpus.size() < 2) {
    throw StageError("ontology", "place '" + query.canonical_name() + "' has " +
                                     std::to_string(corpus.size()) +
                                     " posts; at least 2 are needed");
  }
  const double cell = config.cell_size > 0.0 ? config.cell_size
                                             : region.default_cell_size;
  const semantic::TokenizeMode mode = config.text_mode.value_or(region.text_mode);

  PlaceOntology onto;
  onto.query = query;
  onto.region = region;
  onto.post_count = corpus.size();
  onto.all_post_count = all_posts.size();

  onto.projection = in_stage("project", [&] {
    return kde::LocalProjection::for_extent(region.bbox);
  });
  const auto kw_points = kde::project_posts(corpus, onto.projection);
  const auto all_points = kde::project_posts(all_posts, onto.projection);

  onto.default_radius = in_stage("radius", [&] {
    return kde::resolve_search_radius(kw_points, cell, config.radius_override);
  });
  onto.feature_category = in_stage("classify", [&] {
    return classify_feature(onto.default_radius.meters, region);
  });
  const double radius = onto.default_radius.meters;

  std::optional<kde::Raster> grid;
  if (corpus.size() >= kMinBoundaryPosts) {
    grid = in_stage("grid", [&] {
      return kde::covering_grid(union_box(kw_points, all_points), radius, cell,
                                config.max_cells);
    });
    const kde::Raster kw_density = in_stage("kde", [&] {
      return kde::kde(kw_points, *grid, radius, config.threads);
    });
    const kde::Raster all_density = in_stage("kde", [&] {
      return kde::kde(all_points, *grid, radius, config.threads);
    });
    onto.normalized = in_stage("normalize", [&] {
      return kde::normalize_diff(kw_density, all_density);
    });
    onto.boundary = in_stage("boundary", [&] {
      return boundary::contour(*onto.normalized, config.contour_level);
    });

    if (onto.feature_category == FeatureCategory::NonPolyline) {
      HullSummary hs;
      try {
        hs.clustering = cluster::dmdbscan(kw_points, config.min_pts);
        const auto members = cluster::largest_cluster(hs.clustering, kw_points);
        hs.cluster_size = members.size();
        hs.convex = cluster::convex_hull(members);
        hs.concave = cluster::concave_hull(members, config.concave_k0);
      } catch (const Error& e) {
        hs.note = e.what();
      }
      onto.hulls = std::move(hs);
    }
  }

  in_stage("semantic", [&] {
    onto.term_tables[0] =
        table_or_empty(all_posts, query, config, mode, semantic::Scope::Full);
    if (onto.boundary) {
      const auto split = boundary::split_corpus(all_posts, *onto.boundary, onto.projection);
      onto.term_tables[1] = table_or_empty(split.in_posts, query, config, mode,
                                           semantic::Scope::InCircle);
      onto.term_tables[2] = table_or_empty(split.out_posts, query, config, mode,
                                           semantic::Scope::OutCircle);
    } else {
      onto.term_tables[1] = table_or_empty({}, query, config, mode, semantic::Scope::InCircle);
      onto.term_tables[2] = table_or_empty({}, query, config, mode, semantic::Scope::OutCircle);
    }
    return 0;
  });

  if (grid) {
    in_stage("temporal", [&] {
      const auto kw_seasons = points_by_season(corpus, onto.projection);
      const auto all_seasons = points_by_season(all_posts, onto.projection);
      onto.seasonal_radius = config.radius_override
                                 ? radius
                                 : seasonal_radius(kw_seasons, radius);
      for (ingest::Season from : ingest::kSeasons) {
        const ingest::Season to = ingest::next_season(from);
        if (!kw_seasons.contains(from) || !kw_seasons.contains(to) ||
            !all_seasons.contains(from) || !all_seasons.contains(to)) {
          continue;
        }
        try {
          onto.seasonal_changes.push_back(kde::seasonal_change(
              kw_seasons, all_seasons, from, to, kde::ChangeMode::Normalized,
              *grid, onto.seasonal_radius, config.threads));
        } catch (const DegenerateInput&) {
          // Season without density on the grid; the pair is left out.
        }
      }
      return 0;
    });
  }
  return onto;
}

namespace {

std::string season_pair_name(const kde::SeasonalChange& c) {
  return std::string(ingest::to_string(c.from_season)) + "-" +
         std::string(ingest::to_string(c.to_season));
}

std::string base_name(const std::string& path) {
  const auto slash = path.find_last_of('/');
  return slash == std::string::npos ? path : path.substr(slash + 1);
}

nlohmann::json table_json(const semantic::TermTable& t) {
  return nlohmann::json::parse(semantic::to_json(t));
}

nlohmann::json hull_json(const std::optional<cluster::Hull>& hull,
                         const kde::LocalProjection& proj) {
  if (!hull) return nullptr;
  nlohmann::json props = {{"kind", cluster::to_string(hull->kind)},
                          {"area_m2", std::abs(signed_area(hull->ring))}};
  if (hull->kind == cluster::HullKind::Concave) props["k_used"] = hull->k_used;
  return nlohmann::json::parse(boundary::ring_to_geojson(hull->ring, proj, props.dump()));
}

}  // namespace

std::vector<std::pair<std::string, const kde::Raster*>> raster_artifacts(
    const PlaceOntology& onto, const std::string& stem) {
  std::vector<std::pair<std::string, const kde::Raster*>> out;
  if (onto.normalized) out.emplace_back(stem + ".normalized.asc", &*onto.normalized);
  for (const auto& c : onto.seasonal_changes) {
    out.emplace_back(stem + "." + season_pair_name(c) + ".asc", &c.raster);
  }
  return out;
}

std::string to_json(const PlaceOntology& onto, const std::string& stem) {
  using nlohmann::json;
  const std::string ref = base_name(stem);
  json doc;
  doc["schema"] = "placescope/1";
  doc["place"] = {{"name", onto.query.canonical_name()},
                  {"aliases", onto.query.aliases()}};
  doc["region"] = {{"name", onto.region.name},
                   {"bbox", {onto.region.bbox.min_lon, onto.region.bbox.min_lat,
                             onto.region.bbox.max_lon, onto.region.bbox.max_lat}},
                   {"polyline_threshold", onto.region.polyline_threshold},
                   {"text_mode", semantic::to_string(onto.region.text_mode)}};
  doc["projection"] = {{"origin_lon", onto.projection.origin_lon()},
                       {"origin_lat", onto.projection.origin_lat()}};
  doc["post_count"] = onto.post_count;
  doc["all_post_count"] = onto.all_post_count;
  doc["feature_category"] = to_string(onto.feature_category);
  doc["default_radius"] = {{"meters", onto.default_radius.meters},
                           {"fell_back_to_cell_size", onto.default_radius.fell_back}};

  if (onto.normalized) {
    const auto& g = onto.normalized->geometry();
    doc["grid"] = {{"origin_x", g.origin_x}, {"origin_y", g.origin_y},
                   {"cell_size", g.cell_size}, {"n_cols", g.n_cols},
                   {"n_rows", g.n_rows}};
  } else {
    doc["grid"] = nullptr;
  }
  if (onto.boundary) {
    doc["boundary"] = json::parse(boundary::to_geojson(*onto.boundary, onto.projection));
    doc["boundary_area_m2"] = boundary::area(*onto.boundary);
  } else {
    doc["boundary"] = nullptr;
    doc["boundary_area_m2"] = nullptr;
  }

  if (onto.hulls) {
    const auto& h = *onto.hulls;
    json hulls;
    hulls["cluster"] = {{"method", cluster::to_string(h.clustering.method)},
                        {"eps", h.clustering.params.eps},
                        {"min_pts", h.clustering.params.min_pts},
                        {"k", h.clustering.k},
                        {"largest_size", h.cluster_size}};
    hulls["convex"] = hull_json(h.convex, onto.projection);
    hulls["concave"] = hull_json(h.concave, onto.projection);
    if (!h.note.empty()) hulls["note"] = h.note;
    doc["hulls"] = std::move(hulls);
  } else {
    doc["hulls"] = nullptr;
  }

  doc["term_tables"] = {{"full", table_json(onto.term_tables[0])},
                        {"in", table_json(onto.term_tables[1])},
                        {"out", table_json(onto.term_tables[2])}};

  json seasonal = json::array();
  for (const auto& c : onto.seasonal_changes) {
    seasonal.push_back({{"from", ingest::to_string(c.from_season)},
                        {"to", ingest::to_string(c.to_season)},
                        {"mode", kde::to_string(c.mode)},
                        {"raster", ref + "." + season_pair_name(c) + ".asc"}});
  }
  doc["seasonal_radius"] = onto.seasonal_radius;
  doc["seasonal_changes"] = std::move(seasonal);
  doc["rasters"] = {{"normalized", onto.normalized ? json(ref + ".normalized.asc")
                                                   : json(nullptr)}};
  return doc.dump(2) + "\n";
}

}  // namespace placescope::ontology
