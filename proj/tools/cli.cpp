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

#include "cli.hpp"

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "placescope/boundary.hpp"
#include "placescope/cluster.hpp"
#include "placescope/error.hpp"
#include "placescope/ingest.hpp"
#include "placescope/kde.hpp"
#include "placescope/ontology.hpp"
#include "placescope/raster_io.hpp"
#include "placescope/semantic.hpp"
#include "placescope/synth.hpp"

namespace placescope::cli {

namespace fs = std::filesystem;
using nlohmann::json;

void write_file_atomic(const std::string& path, std::string_view content) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open " + tmp.string() + " for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.flush();
    if (!f) {
      f.close();
      fs::remove(tmp);
      throw Error("failed writing " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error("cannot move output into place at " + path + ": " + ec.message());
  }
}

namespace {

// Flags given as a JSON object: top-level keys are root options, nested
// objects hold the options of the subcommand named by their key.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override {
    return "{}";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    const json doc = json::parse(input, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
      throw CLI::ConversionError("config file is not a JSON object");
    }
    std::vector<CLI::ConfigItem> items;
    collect(doc, {}, items);
    return items;
  }

 private:
  static std::string scalar(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }

  static void collect(const json& obj, const std::vector<std::string>& parents,
                      std::vector<CLI::ConfigItem>& items) {
    for (const auto& [key, value] : obj.items()) {
      if (value.is_object()) {
        auto next = parents;
        next.push_back(key);
        collect(value, next, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(value));
      }
      items.push_back(std::move(item));
    }
  }
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot read " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(f, line)) lines.push_back(std::move(line));
  return lines;
}

std::vector<ingest::GeoPost> load_posts(const std::string& path,
                                        std::ostream& err) {
  const auto lines = read_lines(path);
  auto parsed = ingest::parse_posts(lines, ingest::ParseMode::Lenient);
  if (parsed.malformed > 0) {
    err << "warning: skipped " << parsed.malformed << " malformed lines in "
        << path << "\n";
  }
  return std::move(parsed.posts);
}

std::string posts_to_text(std::span<const ingest::GeoPost> posts) {
  std::string out;
  for (const auto& p : posts) {
    out += ingest::to_record_line(p);
    out += '\n';
  }
  return out;
}

std::vector<double> parse_numbers(const std::string& text, char sep,
                                  std::size_t expected, const char* what) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, sep)) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw UsageError(std::string("bad number in ") + what + ": '" + part + "'");
    }
  }
  if (expected && values.size() != expected) {
    throw UsageError(std::string(what) + " needs " + std::to_string(expected) +
                     " comma-separated numbers");
  }
  return values;
}

LonLatBox parse_bbox(const std::string& text) {
  const auto v = parse_numbers(text, ',', 4, "--bbox");
  return {v[0], v[1], v[2], v[3]};
}

LonLatBox posts_extent(std::span<const ingest::GeoPost> posts) {
  if (posts.empty()) throw UsageError("no posts to derive an extent from; pass --region or --bbox");
  LonLatBox box{posts[0].lon, posts[0].lat, posts[0].lon, posts[0].lat};
  for (const auto& p : posts) {
    box.min_lon = std::min(box.min_lon, p.lon);
    box.min_lat = std::min(box.min_lat, p.lat);
    box.max_lon = std::max(box.max_lon, p.lon);
    box.max_lat = std::max(box.max_lat, p.lat);
  }
  return box;
}

kde::Raster read_raster(const std::string& path) {
  const std::string bytes = read_file(path);
  if (bytes.starts_with("PSRB")) return kde::read_binary(bytes);
  return kde::read_esri_ascii(bytes);
}

void write_raster(const std::string& path, const kde::Raster& raster) {
  if (path.ends_with(".psrb")) {
    write_file_atomic(path, kde::to_binary(raster));
  } else {
    write_file_atomic(path, kde::to_esri_ascii(raster));
  }
}

// --- shared option groups --------------------------------------------------

struct RegionOptions {
  std::string preset;
  std::string bbox;
  std::optional<double> threshold;
  std::optional<double> cell_size;

  void add(CLI::App* app, bool with_threshold) {
    std::vector<std::string> names = ontology::region_preset_names();
    app->add_option("--region", preset, "Region preset")
        ->check(CLI::IsMember(names));
    app->add_option("--bbox", bbox, "Region box as min_lon,min_lat,max_lon,max_lat");
    app->add_option("--cell-size", cell_size, "Grid cell edge in meters")
        ->check(CLI::PositiveNumber);
    if (with_threshold) {
      app->add_option("--threshold", threshold, "Polyline radius threshold in meters")
          ->check(CLI::PositiveNumber);
    }
  }

  // Without a preset or --bbox the extent of `posts` is used.
  ontology::RegionProfile resolve(std::span<const ingest::GeoPost> posts) const {
    ontology::RegionProfile region;
    if (!preset.empty()) {
      region = *ontology::region_preset(preset);
    } else {
      region.name = "custom";
      region.bbox = bbox.empty() ? posts_extent(posts) : parse_bbox(bbox);
    }
    if (!preset.empty() && !bbox.empty()) region.bbox = parse_bbox(bbox);
    if (threshold) region.polyline_threshold = *threshold;
    if (cell_size) region.default_cell_size = *cell_size;
    return region;
  }
};

struct QueryOptions {
  std::string keyword;
  std::vector<std::string> aliases;

  void add(CLI::App* app, bool required) {
    auto* opt = app->add_option("--keyword", keyword, "Place name to select posts by");
    if (required) opt->required();
    app->add_option("--alias", aliases, "Alternative spelling (repeatable)");
  }

  std::optional<ingest::PlaceQuery> query() const {
    if (keyword.empty()) return std::nullopt;
    return ingest::PlaceQuery(keyword, aliases);
  }
};

std::optional<semantic::TokenizeMode> text_mode_of(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return semantic::parse_tokenize_mode(s);
}

// --- subcommands -----------------------------------------------------------

using Action = std::function<void(std::ostream& out, std::ostream& err)>;

struct Command {
  CLI::App* app;
  Action action;
};

Command add_ingest(CLI::App& root) {
  struct Opts {
    std::string input, output, report, blocked_file;
    std::vector<std::string> blocked;
    bool strict = false;
    RegionOptions region;
  };
  auto o = std::make_shared<Opts>();
  auto* app = root.add_subcommand("ingest", "Parse and noise-filter raw posts");
  app->add_option("--input", o->input, "Line-delimited posts")->required()->check(CLI::ExistingFile);
  app->add_option("--output", o->output, "Cleaned posts")->required();
  app->add_option("--report", o->report, "Noise report JSON (default: stdout)");
  app->add_option("--blocked-source", o->blocked, "Blocked source name (repeatable)");
  app->add_option("--blocked-sources-file", o->blocked_file, "File of blocked sources, one per line")
      ->check(CLI::ExistingFile);
  app->add_flag("--strict", o->strict, "Fail on the first malformed line");
  o->region.add(app, false);
  return {app, [o](std::ostream& out, std::ostream&) {
            if (o->region.preset.empty() && o->region.bbox.empty()) {
              throw UsageError("ingest needs --region or --bbox");
            }
            const auto region = o->region.resolve({});
            std::set<std::string> blocked(o->blocked.begin(), o->blocked.end());
            if (!o->blocked_file.empty()) {
              for (auto& line : read_lines(o->blocked_file)) {
                if (!line.empty() && line[0] != '#') blocked.insert(line);
              }
            }
            const auto lines = read_lines(o->input);
            const auto parsed = ingest::parse_posts(
                lines, o->strict ? ingest::ParseMode::Strict : ingest::ParseMode::Lenient);
            ingest::NoiseFilter filter(region.bbox, blocked);
            filter.add_malformed(parsed.malformed);
            std::vector<ingest::GeoPost> kept;
            for (const auto& p : parsed.posts) {
              if (filter.admit(p)) kept.push_back(p);
            }
            write_file_atomic(o->output, posts_to_text(kept));
            const std::string report = ingest::to_json(filter.report()) + "\n";
            if (o->report.empty()) {
              out << report;
            } else {
              write_file_atomic(o->report, report);
            }
          }};
}

Command add_kde(CLI::App& root, const unsigned& threads) {
  struct Opts {
    std::string input, output, templ, extent_input;
    std::optional<double> radius;
    QueryOptions query;
    RegionOptions region;
  };
  auto o = std::make_shared<Opts>();
  auto* app = root.add_subcommand("kde", "Quartic kernel density raster");
  app->add_option("--input", o->input, "Posts")->required()->check(CLI::ExistingFile);
  app->add_option("--output", o->output, "Raster (.asc or .psrb)")->required();
  app->add_option("--radius", o->radius, "Search radius in meters (default rule otherwise)")
      ->check(CLI::PositiveNumber);
  app->add_option("--template", o->templ, "Raster whose grid is reused")->check(CLI::ExistingFile);
  app->add_option("--extent-input", o->extent_input, "Posts whose extent sets the grid")
      ->check(CLI::ExistingFile);
  o->query.add(app, false);
  o->region.add(app, false);
  return {app, [o, &threads](std::ostream& out, std::ostream& err) {
            auto posts = load_posts(o->input, err);
            if (auto q = o->query.query()) posts = ingest::query_keyword(posts, *q);
            std::vector<ingest::GeoPost> extent_posts;
            if (!o->extent_input.empty()) extent_posts = load_posts(o->extent_input, err);
            const auto region =
                o->region.resolve(extent_posts.empty() ? std::span<const ingest::GeoPost>(posts)
                                                       : std::span<const ingest::GeoPost>(extent_posts));
            const auto proj = kde::LocalProjection::for_extent(region.bbox);
            const auto pts = kde::project_posts(posts, proj);
            if (pts.empty()) throw StageError("kde", "no posts selected");
            const auto radius =
                kde::resolve_search_radius(pts, region.default_cell_size, o->radius);
            kde::Raster grid = [&] {
              if (!o->templ.empty()) return read_raster(o->templ);
              const auto extent_pts =
                  extent_posts.empty() ? pts : kde::project_posts(extent_posts, proj);
              PlanarBox box = bounding_box(extent_pts);
              const PlanarBox own = bounding_box(pts);
              box = {std::min(box.min_x, own.min_x), std::min(box.min_y, own.min_y),
                     std::max(box.max_x, own.max_x), std::max(box.max_y, own.max_y)};
              return kde::covering_grid(box, radius.meters, region.default_cell_size);
            }();
            const auto density = kde::kde(pts, grid, radius.meters, threads);
            write_raster(o->output, density);
            out << json{{"radius", radius.meters},
                        {"fell_back_to_cell_size", radius.fell_back},
                        {"points", pts.size()},
                        {"n_cols", density.geometry().n_cols},
                        {"n_rows", density.geometry().n_rows}}
                       .dump()
                << "\n";
          }};
}

Command add_normalize(CLI::App& root) {
  struct Opts {
    std::string a, b, output;
  };
  auto o = std::make_shared<Opts>();
  auto* app = root.add_subcommand("normalize", "a / max(a) - b / max(b)");
  app->add_option("--a", o->a, "Keyword density raster")->required()->check(CLI::ExistingFile);
  app->add_option("--b", o->b, "Reference density raster")->required()->check(CLI::ExistingFile);
  app->add_option("--output", o->output, "Output raster")->required();
  return {app, [o](std::ostream&, std::ostream&) {
            write_raster(o->output, kde::normalize_diff(read_raster(o->a), read_raster(o->b)));
          }};
}

Command add_boundary(CLI::App& root) {
  struct Opts {
    std::string input, output;
    double level = 0.0;
    RegionOptions region;
  };
  auto o = std::make_shared<Opts>();
  auto* app = root.add_subcommand("boundary", "Contour a raster into GeoJSON rings");
  app->add_option("--input", o->input, "Raster")->required()->check(CLI::ExistingFile);
  app->add_option("--output", o->output, "GeoJSON Feature")->required();
  app->add_option("--level", o->level, "Contour level")->capture_default_str();
  o->region.add(app, false);
  return {app, [o](std::ostream& out, std::ostream&) {
            if (o->region.preset.empty() && o->region.bbox.empty()) {
              throw UsageError("boundary needs --region or --bbox for the projection");
            }
            const auto region = o->region.resolve({});
            const auto proj = kde::LocalProjection::for_extent(region.bbox);
            const auto bset = boundary::contour(read_raster(o->input), o->level);
            write_file_atomic(o->output, boundary::to_geojson(bset, proj) + "\n");
            out << json{{"rings", bset.polygons.size()}, {"area_m2", boundary::area(bset)}}.dump()
                << "\n";
          }};
}

Command add_classify(CLI::App& root) {
  struct Opts {
    double radius = 0.0;
    RegionOptions region;
  };
  auto o = std::make_shared<Opts>();
  auto* app = root.add_subcommand("classify", "Feature category from a default radius");
  app->add_option("--radius", o->radius, "Default search radius in meters")->required();
  o->region.add(app, true);
  return {app, [o](std::ostream& out, std::ostream&) {
            if (o->region.preset.empty() && !o->region.threshold) {
              throw UsageError("classify needs --threshold or --region");
            }
            ontology::RegionProfile region;
            if (!o->region.preset.empty()) region = *ontology::region_preset(o->region.preset);
            if (o->region.threshold) region.polyline_threshold = *o->region.threshold;
            out << ontology::to_string(ontology::classify_feature(o->radius, region)) << "\n";
          }};
}

Command add_cluster(CLI::App& root) {
  struct Opts {
    std::string input, output, hulls, method = "dmdbscan";
    std::optional<double> eps;
    std::size_t min_pts = 4, k = 0, k0 = 3;
    QueryOptions query;
    RegionOptions region;
  };
  auto o = std::make_shared<Opts>();
  auto* app = root.add_subcommand("cluster", "Cluster post locations");
  app->add_option("--input", o->input, "Posts")->required()->check(CLI::ExistingFile);
  app->add_option("--output", o->output, "CSV point_index,x,y,label")->required();
  app->add_option("--method", o->method, "dbscan, dmdbscan or ward")->capture_default_str()
      ->check(CLI::IsMember({"dbscan", "dmdbscan", "ward"}));
  app->add_option("--eps", o->eps, "dbscan radius in meters")->check(CLI::PositiveNumber);
  app->add_option("--min-pts", o->min_pts, "Core threshold")->capture_default_str()->check(CLI::PositiveNumber);
  app->add_option("--k", o->k, "Ward cluster count")->check(CLI::PositiveNumber);
  app->add_option("--hulls", o->hulls, "GeoJSON of the largest cluster's hulls");
  app->add_option("--k0", o->k0, "Starting neighbour count for the concave hull")->capture_default_str()
      ->check(CLI::Range(3, 1 << 20));
  o->query.add(app, false);
  o->region.add(app, false);
  return {app, [o](std::ostream& out, std::ostream& err) {
            auto posts = load_posts(o->input, err);
            if (auto q = o->query.query()) posts = ingest::query_keyword(posts, *q);
            const auto region = o->region.resolve(posts);
            const auto proj = kde::LocalProjection::for_extent(region.bbox);
            const auto pts = kde::project_posts(posts, proj);
            cluster::ClusterResult result;
            if (o->method == "dbscan") {
              if (!o->eps) throw UsageError("dbscan needs --eps");
              result = cluster::dbscan(pts, *o->eps, o->min_pts);
            } else if (o->method == "dmdbscan") {
              result = cluster::dmdbscan(pts, o->min_pts);
            } else {
              if (o->k == 0) throw UsageError("ward needs --k");
              result = cluster::ward_cluster(pts, o->k);
            }
            write_file_atomic(o->output, cluster::to_csv(result, pts));
            if (!o->hulls.empty()) {
              const auto members = cluster::largest_cluster(result, pts);
              const auto convex = cluster::convex_hull(members);
              const auto concave = cluster::concave_hull(members, o->k0);
              json fc = {{"type", "FeatureCollection"}, {"features", json::array()}};
              for (const auto* h : {&convex, &concave}) {
                json props = {{"kind", cluster::to_string(h->kind)},
                              {"area_m2", std::abs(signed_area(h->ring))}};
                if (h->kind == cluster::HullKind::Concave) props["k_used"] = h->k_used;
                fc["features"].push_back(
                    json::parse(boundary::ring_to_geojson(h->ring, proj, props.dump())));
              }
              write_file_atomic(o->hulls, fc.dump() + "\n");
            }
            out << json{{"method", o->method},
                        {"k", result.k},
                        {"noise", result.noise_count()},
                        {"eps", result.params.eps}}
                       .dump()
                << "\n";
          }};
}

Command add_temporal(CLI::App& root, const unsigned& threads) {
  struct Opts {
    std::string input, output, from = "spring", to = "summer", mode = "normalized";
    std::optional<double> radius;
    QueryOptions query;
    RegionOptions region;
  };
  auto o = std::make_shared<Opts>();
  auto* app = root.add_subcommand("temporal", "Seasonal change raster between consecutive seasons");
  app->add_option("--input", o->input, "All posts (noise-filtered)")->required()->check(CLI::ExistingFile);
  app->add_option("--output", o->output, "Change raster")->required();
  app->add_option("--from", o->from, "First season")->capture_default_str();
  app->add_option("--to", o->to, "Following season")->capture_default_str();
  app->add_option("--mode", o->mode, "absolute or normalized")->capture_default_str()
      ->check(CLI::IsMember({"absolute", "normalized"}));
  app->add_option("--radius", o->radius, "Search radius in meters")->check(CLI::PositiveNumber);
  o->query.add(app, true);
  o->region.add(app, false);
  return {app, [o, &threads](std::ostream& out, std::ostream& err) {
            const auto from = ingest::parse_season(o->from);
            const auto to = ingest::parse_season(o->to);
            if (!from || !to) throw UsageError("unknown season name");
            const auto all = load_posts(o->input, err);
            const auto kw = ingest::query_keyword(all, *o->query.query());
            if (kw.empty()) throw StageError("temporal", "no posts name the place");
            const auto region = o->region.resolve(all);
            const auto proj = kde::LocalProjection::for_extent(region.bbox);
            const auto kw_pts = kde::project_posts(kw, proj);
            const auto all_pts = kde::project_posts(all, proj);
            const double overall =
                kde::resolve_search_radius(kw_pts, region.default_cell_size, o->radius).meters;
            const auto kw_seasons = ontology::points_by_season(kw, proj);
            const auto all_seasons = ontology::points_by_season(all, proj);
            const double r = o->radius ? *o->radius : ontology::seasonal_radius(kw_seasons, overall);
            PlanarBox box = bounding_box(all_pts);
            const PlanarBox own = bounding_box(kw_pts);
            box = {std::min(box.min_x, own.min_x), std::min(box.min_y, own.min_y),
                   std::max(box.max_x, own.max_x), std::max(box.max_y, own.max_y)};
            const auto grid = kde::covering_grid(box, overall, region.default_cell_size);
            const auto change = kde::seasonal_change(
                kw_seasons, all_seasons, *from, *to, *kde::parse_change_mode(o->mode), grid, r,
                threads);
            write_raster(o->output, change.raster);
            out << json{{"radius", r}, {"max", change.raster.max_value()},
                        {"min", change.raster.min_value()}}
                       .dump()
                << "\n";
          }};
}

Command add_semantic(CLI::App& root) {
  struct Opts {
    std::string input, output, stopwords, text_mode, scope = "full", boundary, format;
    std::size_t top_k = 50;
    QueryOptions query;
    RegionOptions region;
  };
  auto o = std::make_shared<Opts>();
  auto* app = root.add_subcommand("semantic", "PMI term table for a place");
  app->add_option("--input", o->input, "Posts")->required()->check(CLI::ExistingFile);
  app->add_option("--output", o->output, "Table (.csv or .json)")->required();
  app->add_option("--stopwords", o->stopwords, "Stopword file")->check(CLI::ExistingFile);
  app->add_option("--top-k", o->top_k, "Candidate term count")->capture_default_str()->check(CLI::PositiveNumber);
  app->add_option("--text-mode", o->text_mode, "latin or cjk-bigram")
      ->check(CLI::IsMember({"latin", "cjk-bigram", "cjk"}));
  app->add_option("--scope", o->scope, "full, in or out")->capture_default_str()
      ->check(CLI::IsMember({"full", "in", "out"}));
  app->add_option("--boundary", o->boundary, "Boundary GeoJSON for in/out scopes")
      ->check(CLI::ExistingFile);
  app->add_option("--format", o->format, "csv or json (default from extension)")
      ->check(CLI::IsMember({"csv", "json"}));
  o->query.add(app, true);
  o->region.add(app, false);
  return {app, [o](std::ostream& out, std::ostream& err) {
            auto posts = load_posts(o->input, err);
            const auto query = *o->query.query();
            semantic::Stopwords stop;
            if (!o->stopwords.empty()) stop = semantic::parse_stopwords(read_file(o->stopwords));
            semantic::Scope scope = semantic::Scope::Full;
            if (o->scope != "full") {
              if (o->boundary.empty()) throw UsageError("--scope in/out needs --boundary");
              const auto region = o->region.resolve(posts);
              const auto proj = kde::LocalProjection::for_extent(region.bbox);
              boundary::BoundarySet bset;
              bset.polygons = boundary::rings_from_geojson(read_file(o->boundary), proj);
              auto split = boundary::split_corpus(posts, bset, proj);
              scope = o->scope == "in" ? semantic::Scope::InCircle : semantic::Scope::OutCircle;
              posts = scope == semantic::Scope::InCircle ? std::move(split.in_posts)
                                                         : std::move(split.out_posts);
            }
            semantic::TokenizeMode mode = semantic::TokenizeMode::Latin;
            if (auto m = text_mode_of(o->text_mode)) {
              mode = *m;
            } else if (!o->region.preset.empty()) {
              mode = ontology::region_preset(o->region.preset)->text_mode;
            }
            semantic::TermTable table;
            table.scope = scope;
            table.k = o->top_k;
            if (!posts.empty()) {
              table = semantic::term_table(posts, query, stop, o->top_k, scope, mode);
            }
            const bool as_json = o->format.empty() ? o->output.ends_with(".json") : o->format == "json";
            write_file_atomic(o->output, as_json ? semantic::to_json(table) + "\n"
                                                 : semantic::to_csv(table));
            out << json{{"posts", posts.size()}, {"rows", table.rows.size()}}.dump() << "\n";
          }};
}

synth::TruthSpec spec_from_json(const json& j) {
  synth::TruthSpec s;
  const std::string kind = j.value("kind", "blob");
  if (kind == "polyline") {
    s.kind = synth::TruthKind::Polyline;
  } else if (kind != "blob" && kind != "disk") {
    throw UsageError("spec kind must be blob or polyline");
  }
  if (j.contains("origin")) {
    s.origin_lon = j.at("origin").at(0).get<double>();
    s.origin_lat = j.at("origin").at(1).get<double>();
  }
  if (j.contains("center")) {
    s.center = {j.at("center").at(0).get<double>(), j.at("center").at(1).get<double>()};
  }
  if (j.contains("vertices")) {
    for (const auto& v : j.at("vertices")) {
      s.vertices.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
    }
  }
  s.sigma = j.value("sigma", s.sigma);
  s.place_name = j.value("place_name", s.place_name);
  s.seed = j.value("seed", s.seed);
  s.year = j.value("year", s.year);
  if (j.contains("season_weights")) {
    s.season_weights.clear();
    for (const auto& [name, w] : j.at("season_weights").items()) {
      const auto season = ingest::parse_season(name);
      if (!season) throw UsageError("unknown season in spec: " + name);
      s.season_weights[*season] = w.get<double>();
    }
  }
  if (j.contains("vocab")) {
    for (const auto& [term, p] : j.at("vocab").items()) {
      s.vocab.push_back({term, p.get<double>()});
    }
  }
  return s;
}

Command add_synth(CLI::App& root) {
  struct Opts {
    std::string spec, output, truth, kind = "blob", origin, center = "0,0", vertices,
                bbox, place_name = "place", vocab, season_weights, background_bbox;
    std::size_t n = 1000, background = 0;
    std::uint64_t seed = 1;
    double sigma = 400.0;
    int year = 2015;
  };
  auto o = std::make_shared<Opts>();
  auto* app = root.add_subcommand("synth", "Generate a synthetic corpus with known truth");
  app->add_option("--spec", o->spec, "Truth spec JSON (overrides the shape flags)")
      ->check(CLI::ExistingFile);
  app->add_option("--output", o->output, "Posts")->required();
  app->add_option("--truth", o->truth, "Truth region GeoJSON");
  app->add_option("--kind", o->kind, "blob, uniform or polyline")->capture_default_str()
      ->check(CLI::IsMember({"blob", "uniform", "polyline"}));
  app->add_option("--n", o->n, "Post count")->capture_default_str();
  app->add_option("--seed", o->seed, "Random seed")->capture_default_str();
  app->add_option("--sigma", o->sigma, "Spread in meters")->capture_default_str()->check(CLI::PositiveNumber);
  app->add_option("--origin", o->origin, "lon,lat of the planar origin");
  app->add_option("--center", o->center, "Blob center x,y in meters")->capture_default_str();
  app->add_option("--vertices", o->vertices, "Polyline x,y;x,y;... in meters");
  app->add_option("--bbox", o->bbox, "Box for uniform posts");
  app->add_option("--place-name", o->place_name, "Place name in every text")->capture_default_str();
  app->add_option("--vocab", o->vocab, "term:probability,...");
  app->add_option("--season-weights", o->season_weights, "spring=1,summer=0.4,...");
  app->add_option("--year", o->year, "Calendar year of timestamps")->capture_default_str();
  app->add_option("--background", o->background, "Uniform background posts to append")->capture_default_str();
  app->add_option("--background-bbox", o->background_bbox, "Box for the background posts");
  return {app, [o](std::ostream& out, std::ostream&) {
            std::vector<ingest::GeoPost> posts;
            if (o->kind == "uniform" && o->spec.empty()) {
              if (o->bbox.empty()) throw UsageError("uniform needs --bbox");
              posts = synth::gen_uniform(parse_bbox(o->bbox), o->n, o->seed, o->year);
            } else {
              synth::TruthSpec spec;
              if (!o->spec.empty()) {
                spec = spec_from_json(json::parse(read_file(o->spec)));
              } else {
                spec.kind = o->kind == "polyline" ? synth::TruthKind::Polyline
                                                  : synth::TruthKind::Disk;
                if (!o->origin.empty()) {
                  const auto v = parse_numbers(o->origin, ',', 2, "--origin");
                  spec.origin_lon = v[0];
                  spec.origin_lat = v[1];
                }
                const auto c = parse_numbers(o->center, ',', 2, "--center");
                spec.center = {c[0], c[1]};
                if (!o->vertices.empty()) {
                  std::stringstream ss(o->vertices);
                  std::string pair;
                  while (std::getline(ss, pair, ';')) {
                    const auto v = parse_numbers(pair, ',', 2, "--vertices");
                    spec.vertices.push_back({v[0], v[1]});
                  }
                }
                spec.sigma = o->sigma;
                spec.seed = o->seed;
                spec.year = o->year;
                spec.place_name = o->place_name;
                if (!o->vocab.empty()) {
                  std::stringstream ss(o->vocab);
                  std::string item;
                  while (std::getline(ss, item, ',')) {
                    const auto colon = item.rfind(':');
                    if (colon == std::string::npos) throw UsageError("--vocab needs term:probability");
                    spec.vocab.push_back(
                        {item.substr(0, colon),
                         parse_numbers(item.substr(colon + 1), ',', 1, "--vocab")[0]});
                  }
                }
                if (!o->season_weights.empty()) {
                  spec.season_weights.clear();
                  std::stringstream ss(o->season_weights);
                  std::string item;
                  while (std::getline(ss, item, ',')) {
                    const auto eq = item.find('=');
                    const auto season = ingest::parse_season(item.substr(0, eq));
                    if (eq == std::string::npos || !season) {
                      throw UsageError("--season-weights needs season=weight pairs");
                    }
                    spec.season_weights[*season] =
                        parse_numbers(item.substr(eq + 1), ',', 1, "--season-weights")[0];
                  }
                }
              }
              posts = spec.kind == synth::TruthKind::Disk ? synth::gen_blob(spec, o->n)
                                                          : synth::gen_polyline(spec, o->n);
              if (!o->truth.empty()) {
                const auto proj = spec.projection();
                std::string doc;
                if (spec.kind == synth::TruthKind::Disk) {
                  doc = boundary::ring_to_geojson(
                      spec.truth_ring(), proj,
                      json{{"kind", "disk"}, {"radius_m", 2.0 * spec.sigma}}.dump());
                } else {
                  json line = {{"type", "Feature"},
                               {"properties", {{"kind", "polyline"}, {"buffer_m", 2.0 * spec.sigma}}},
                               {"geometry", {{"type", "LineString"}, {"coordinates", json::array()}}}};
                  for (const auto& v : spec.vertices) {
                    const auto ll = proj.inverse(v);
                    line["geometry"]["coordinates"].push_back({ll.lon, ll.lat});
                  }
                  doc = line.dump();
                }
                write_file_atomic(o->truth, doc + "\n");
              }
            }
            if (o->background > 0) {
              if (o->background_bbox.empty()) throw UsageError("--background needs --background-bbox");
              const auto bg = synth::gen_uniform(parse_bbox(o->background_bbox), o->background,
                                                 o->seed + 1, o->year);
              posts.insert(posts.end(), bg.begin(), bg.end());
            }
            write_file_atomic(o->output, posts_to_text(posts));
            out << json{{"posts", posts.size()}}.dump() << "\n";
          }};
}

Command add_ontology(CLI::App& root, const unsigned& threads) {
  struct Opts {
    std::string input, output, stopwords, text_mode;
    std::optional<double> radius;
    double level = 0.0;
    std::size_t min_pts = 4, k0 = 3, top_k = 50;
    QueryOptions query;
    RegionOptions region;
  };
  auto o = std::make_shared<Opts>();
  auto* app = root.add_subcommand("ontology", "Full place-ontology pipeline");
  app->add_option("--input", o->input, "All posts (noise-filtered)")->required()->check(CLI::ExistingFile);
  app->add_option("--output", o->output, "Ontology JSON; rasters are written beside it")->required();
  app->add_option("--radius", o->radius, "Search radius override in meters")->check(CLI::PositiveNumber);
  app->add_option("--level", o->level, "Contour level")->capture_default_str();
  app->add_option("--min-pts", o->min_pts, "Core threshold for clustering")->capture_default_str()->check(CLI::PositiveNumber);
  app->add_option("--k0", o->k0, "Starting neighbour count for the concave hull")->capture_default_str()
      ->check(CLI::Range(3, 1 << 20));
  app->add_option("--top-k", o->top_k, "Candidate term count")->capture_default_str()->check(CLI::PositiveNumber);
  app->add_option("--stopwords", o->stopwords, "Stopword file")->check(CLI::ExistingFile);
  app->add_option("--text-mode", o->text_mode, "latin or cjk-bigram")
      ->check(CLI::IsMember({"latin", "cjk-bigram", "cjk"}));
  o->query.add(app, true);
  o->region.add(app, true);
  return {app, [o, &threads](std::ostream& out, std::ostream& err) {
            const auto all = load_posts(o->input, err);
            const auto query = *o->query.query();
            const auto corpus = ingest::query_keyword(all, query);
            const auto region = o->region.resolve(all);
            ontology::OntologyConfig cfg;
            cfg.radius_override = o->radius;
            cfg.contour_level = o->level;
            cfg.min_pts = o->min_pts;
            cfg.concave_k0 = o->k0;
            cfg.top_k = o->top_k;
            cfg.text_mode = text_mode_of(o->text_mode);
            cfg.threads = threads;
            if (!o->stopwords.empty()) cfg.stopwords = semantic::parse_stopwords(read_file(o->stopwords));
            const auto onto = ontology::build_place_ontology(query, corpus, all, region, cfg);

            std::string stem = o->output;
            if (stem.ends_with(".json")) stem.resize(stem.size() - 5);
            for (const auto& [path, raster] : ontology::raster_artifacts(onto, stem)) {
              write_raster(path, *raster);
            }
            write_file_atomic(o->output, ontology::to_json(onto, stem));
            out << json{{"feature_category", ontology::to_string(onto.feature_category)},
                        {"default_radius", onto.default_radius.meters},
                        {"post_count", onto.post_count}}
                       .dump()
                << "\n";
          }};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Place ontologies from geo-tagged posts", "placescope"};
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON file mirroring the command-line flags");
  app.require_subcommand(1);
  app.fallthrough();

  unsigned threads = 1;
  app.add_option("--threads", threads, "Worker threads (output does not depend on it)")
      ->envname("PLACESCOPE_THREADS")
      ->check(CLI::Range(1u, 1024u));

  std::vector<Command> commands = {
      add_ingest(app),          add_kde(app, threads),    add_normalize(app),
      add_boundary(app),        add_classify(app),        add_cluster(app),
      add_temporal(app, threads), add_semantic(app),      add_synth(app),
      add_ontology(app, threads)};

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  for (const auto& cmd : commands) {
    if (!cmd.app->parsed()) continue;
    const std::string name = cmd.app->get_name();
    try {
      cmd.action(out, err);
      return kExitOk;
    } catch (const UsageError& e) {
      err << "usage error: " << name << ": " << e.what() << "\n"
          << cmd.app->help();
      return kExitUsage;
    } catch (const StageError& e) {
      err << "error: " << e.what() << "\n";
      return kExitDataError;
    } catch (const std::exception& e) {
      err << "error: " << name << ": " << e.what() << "\n";
      return kExitDataError;
    }
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace placescope::cli
