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

// Acceptance suite. Each criterion prints one PASS/FAIL line with its
// wall time against its budget. `acceptance --criterion N` runs one.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli.hpp"
#include "placescope/boundary.hpp"
#include "placescope/cluster.hpp"
#include "placescope/ingest.hpp"
#include "placescope/kde.hpp"
#include "placescope/ontology.hpp"
#include "placescope/semantic.hpp"
#include "placescope/synth.hpp"

namespace fs = std::filesystem;
using namespace placescope;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

struct Criterion {
  int id;
  std::string name;
  double budget_s;
  std::function<Verdict()> run;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// ---------------------------------------------------------------------------
// 1. Noise report

Verdict noise_report_rows() {
  Verdict v;
  struct Row {
    std::uint64_t original, noise, final_count;
    double percentage;
  };
  const Row rows[] = {{7'619'307, 864'477, 6'754'830, 11.34},
                      {11'951'385, 0, 11'951'385, 0.0}};
  for (const auto& row : rows) {
    const auto r = ingest::NoiseReport::from_counts(row.original, row.noise);
    if (r.original_count != row.original || r.noise_count != row.noise ||
        r.final_count != row.final_count || r.noise_percentage != row.percentage) {
      v.fail("row " + std::to_string(row.original) + " gave final " +
             std::to_string(r.final_count) + ", " + fmt("%.4f%%", r.noise_percentage));
    }
  }

  // The filter itself on a fixture with known noise by reason.
  const LonLatBox box{-117.3, 32.5, -116.9, 33.0};
  std::vector<ingest::GeoPost> posts;
  ingest::GeoPost p;
  p.text = "x";
  p.source = "web";
  p.timestamp = *ingest::parse_timestamp("2015-06-01T00:00:00Z");
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> lon(box.min_lon, box.max_lon), lat(box.min_lat, box.max_lat);
  const std::size_t n_clean = 6'755, n_out = 300, n_bot = 300, n_dup = 264;
  for (std::size_t i = 0; i < n_clean; ++i) {
    p.id = std::to_string(i);
    p.lon = lon(rng);
    p.lat = lat(rng);
    posts.push_back(p);
  }
  for (std::size_t i = 0; i < n_out; ++i) {
    p.id = "o" + std::to_string(i);
    p.lon = box.max_lon + 0.1;
    posts.push_back(p);
  }
  for (std::size_t i = 0; i < n_bot; ++i) {
    p.id = "b" + std::to_string(i);
    p.lon = lon(rng);
    p.source = "bot";
    posts.push_back(p);
  }
  for (std::size_t i = 0; i < n_dup; ++i) posts.push_back(posts[i]);
  std::shuffle(posts.begin() + static_cast<std::ptrdiff_t>(n_clean), posts.end(), rng);

  const auto [kept, report] = ingest::filter_noise(posts, box, {"bot"});
  const auto expected = ingest::NoiseReport::from_counts(posts.size(), n_out + n_bot + n_dup);
  if (kept.size() != n_clean || report.original_count != expected.original_count ||
      report.noise_count != expected.noise_count || report.final_count != expected.final_count ||
      report.noise_percentage != expected.noise_percentage ||
      report.reason(ingest::NoiseReason::OutsideBbox) != n_out ||
      report.reason(ingest::NoiseReason::BlockedSource) != n_bot ||
      report.reason(ingest::NoiseReason::Duplicate) != n_dup) {
    v.fail("filter fixture counts differ: kept " + std::to_string(kept.size()));
  }
  if (v.pass) v.detail = "both rows exact; filter fixture 7619 -> 6755 (" +
                         fmt("%.2f%%", report.noise_percentage) + ")";
  return v;
}

// ---------------------------------------------------------------------------
// 2. Feature classification

Verdict classification_rows() {
  Verdict v;
  const auto sd = *ontology::region_preset("san-diego");
  const auto bj = *ontology::region_preset("beijing");
  using enum ontology::FeatureCategory;
  struct Row {
    double radius;
    const ontology::RegionProfile* region;
    ontology::FeatureCategory expected;
  };
  const std::vector<Row> rows = {
      {1055.2637, &sd, NonPolyline}, {2855.033, &sd, NonPolyline},  {33525.77, &sd, Polyline},
      {11641.245, &sd, Polyline},    {675.76, &sd, NonPolyline},    {292.54, &sd, NonPolyline},
      {479.13, &sd, NonPolyline},    {552.0748, &sd, NonPolyline},  {7077.94, &sd, NonPolyline},
      {233.42, &bj, NonPolyline},    {692.76, &bj, NonPolyline},    {269.5756, &bj, NonPolyline},
      {1424.168, &bj, Polyline},     {242.1619, &bj, NonPolyline},  {673.46, &bj, NonPolyline},
      {692.76, &bj, NonPolyline},    {885.48, &bj, NonPolyline}};
  for (const auto& row : rows) {
    if (ontology::classify_feature(row.radius, *row.region) != row.expected) {
      v.fail("radius " + fmt("%g", row.radius) + " misclassified");
    }
  }
  if (v.pass) v.detail = std::to_string(rows.size()) + " rows exact";
  return v;
}

// ---------------------------------------------------------------------------
// 3. KDE against direct summation

Verdict kde_oracle() {
  Verdict v;
  std::mt19937_64 rng(3);
  auto U = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
  double worst = 0.0;
  for (int inst = 0; inst < 50; ++inst) {
    const double cell = U(5, 50);
    const auto cols = static_cast<std::size_t>(U(1, 51));
    const auto rows = static_cast<std::size_t>(U(1, 51));
    kde::GridGeometry g{U(-1000, 1000), U(-1000, 1000), cell, cols, rows};
    const auto grid = kde::Raster::zeros(g);
    const double radius = cell * U(0.3, 8);
    const auto n = static_cast<std::size_t>(U(1, 101));
    std::vector<PlanarPoint> pts(n);
    const auto ext = g.extent();
    for (auto& p : pts) {
      p = {U(ext.min_x - radius, ext.max_x + radius), U(ext.min_y - radius, ext.max_y + radius)};
    }
    const auto out = kde::kde(pts, grid, radius, 1 + inst % 3);
    const double norm = 3.0 / (std::numbers::pi * radius * radius);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        const double cx = g.origin_x + (static_cast<double>(c) + 0.5) * cell;
        const double cy = g.origin_y + (static_cast<double>(r) + 0.5) * cell;
        long double acc = 0.0L;
        for (const auto& p : pts) {
          const double d2 = (p.x - cx) * (p.x - cx) + (p.y - cy) * (p.y - cy);
          if (d2 < radius * radius) {
            const double t = 1.0 - d2 / (radius * radius);
            acc += norm * t * t;
          }
        }
        const auto sum = static_cast<double>(acc);
        const double got = out.at(c, r);
        if (sum == 0.0) {
          if (got != 0.0) v.fail("nonzero cell outside every kernel");
          continue;
        }
        const double rel = std::abs(got - sum) / std::abs(sum);
        worst = std::max(worst, rel);
        if (rel > 1e-12) v.fail("relative error " + fmt("%.3g", rel));
      }
    }
  }

  double worst_mass = 0.0;
  for (int inst = 0; inst < 10; ++inst) {
    const double radius = U(100, 2000);
    const double cell = radius / 10;
    const auto grid = kde::make_grid({-1.5 * radius, -1.5 * radius, 1.5 * radius, 1.5 * radius}, cell);
    const PlanarPoint p{U(-0.5 * cell, 0.5 * cell), U(-0.5 * cell, 0.5 * cell)};
    const auto out = kde::kde(std::span(&p, 1), grid, radius);
    double mass = 0.0;
    for (double x : out.values()) mass += x * cell * cell;
    worst_mass = std::max(worst_mass, std::abs(mass - 1.0));
    if (std::abs(mass - 1.0) > 0.02) v.fail("kernel mass " + fmt("%.4f", mass));
  }
  if (v.pass) {
    v.detail = "50 instances, max rel err " + fmt("%.2g", worst) + "; max mass error " +
               fmt("%.4f", worst_mass);
  }
  return v;
}

// ---------------------------------------------------------------------------
// 4. Normalized difference

Verdict normalize_properties() {
  Verdict v;
  std::mt19937_64 rng(4);
  auto U = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
  for (int inst = 0; inst < 100; ++inst) {
    kde::GridGeometry g{0, 0, 10, static_cast<std::size_t>(U(1, 40)),
                        static_cast<std::size_t>(U(1, 40))};
    std::vector<double> va(g.cell_count()), vb(g.cell_count());
    for (std::size_t i = 0; i < va.size(); ++i) {
      va[i] = U(0, 1) < 0.3 ? 0.0 : U(0, 1e-5);
      vb[i] = U(0, 1) < 0.3 ? 0.0 : U(0, 1e-3);
    }
    va[0] = 1e-5;
    vb[vb.size() - 1] = 2e-3;
    const kde::Raster a(g, va), b(g, vb);
    const auto ab = kde::normalize_diff(a, b);
    const auto ba = kde::normalize_diff(b, a);
    const double sa = U(0.01, 100), sb = U(0.01, 100);
    std::vector<double> vsa(va), vsb(vb);
    for (auto& x : vsa) x *= sa;
    for (auto& x : vsb) x *= sb;
    const auto scaled = kde::normalize_diff(kde::Raster(g, vsa), kde::Raster(g, vsb));
    const auto same = kde::normalize_diff(a, a);
    for (std::size_t i = 0; i < va.size(); ++i) {
      const double x = ab.values()[i];
      if (x != -ba.values()[i]) v.fail("not antisymmetric");
      if (std::abs(x - scaled.values()[i]) > 1e-12) v.fail("not scale invariant");
      if (x < -1.0 || x > 1.0) v.fail("value outside [-1, 1]");
      if (same.values()[i] != 0.0) v.fail("identity is not zero");
    }
  }
  if (v.pass) v.detail = "100 raster pairs";
  return v;
}

// ---------------------------------------------------------------------------
// 5 and 6. Synthetic places through the pipeline

struct Scene {
  synth::TruthSpec spec;
  ontology::RegionProfile region;
  std::vector<ingest::GeoPost> all;
};

Scene campus(std::uint64_t seed, std::map<ingest::Season, double> weights = {}) {
  Scene s;
  s.spec.origin_lon = -117.07;
  s.spec.origin_lat = 32.77;
  s.spec.sigma = 400;
  s.spec.place_name = "SDSU";
  s.spec.vocab = {{"aztecs", 0.5}, {"campus", 0.3}};
  s.spec.seed = seed;
  if (!weights.empty()) s.spec.season_weights = weights;
  const double half_lat = 5000.0 / kde::kEarthRadius * 180.0 / std::numbers::pi;
  const double half_lon = half_lat / std::cos(s.spec.origin_lat * std::numbers::pi / 180.0);
  s.region.name = "campus";
  s.region.bbox = {s.spec.origin_lon - half_lon, s.spec.origin_lat - half_lat,
                   s.spec.origin_lon + half_lon, s.spec.origin_lat + half_lat};
  s.region.polyline_threshold = 10000;
  s.all = synth::gen_blob(s.spec, 2000);
  const auto bg = synth::gen_uniform(s.region.bbox, 20000, seed + 1000);
  s.all.insert(s.all.end(), bg.begin(), bg.end());
  return s;
}

ontology::PlaceOntology build(const Scene& s) {
  const ingest::PlaceQuery q(s.spec.place_name);
  return ontology::build_place_ontology(q, ingest::query_keyword(s.all, q), s.all, s.region);
}

Verdict boundary_recovery() {
  Verdict v;
  std::string scores;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto s = campus(seed);
    const auto onto = build(s);
    if (onto.feature_category != ontology::FeatureCategory::NonPolyline) {
      v.fail("seed " + std::to_string(seed) + " classified Polyline");
    }
    const double score = onto.boundary ? synth::iou(*onto.boundary, s.spec) : 0.0;
    scores += (scores.empty() ? "" : " ") + fmt("%.3f", score);
    if (score < 0.7) v.fail("");
  }
  v.detail = "IoU per seed " + scores + " (need >= 0.7)";
  return v;
}

Verdict seasonal_dynamics() {
  Verdict v;
  using ingest::Season;
  std::string values;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto s = campus(seed, {{Season::Spring, 1.0}, {Season::Summer, 0.4},
                                 {Season::Fall, 1.0}, {Season::Winter, 0.9}});
    const auto onto = build(s);
    const auto center = onto.projection.forward(s.spec.origin_lon, s.spec.origin_lat);
    auto at_center = [&](Season from, Season to) -> std::optional<double> {
      for (const auto& ch : onto.seasonal_changes) {
        if (ch.from_season != from || ch.to_season != to) continue;
        const auto cell = ch.raster.geometry().locate(center);
        if (!cell) return std::nullopt;
        return ch.raster.at(cell->first, cell->second);
      }
      return std::nullopt;
    };
    const auto down = at_center(Season::Spring, Season::Summer);
    const auto up = at_center(Season::Summer, Season::Fall);
    if (!down || !up) {
      v.fail("seed " + std::to_string(seed) + " has no change raster at the center");
      continue;
    }
    values += (values.empty() ? "" : " ") + fmt("%+.3f", *down) + "/" + fmt("%+.3f", *up);
    if (!(*down < 0.0) || !(*up > 0.0)) v.fail("");
  }
  v.detail = "spring->summer/summer->fall at center " + values;
  return v;
}

// ---------------------------------------------------------------------------
// 7. PMI

const char* const kTerms[] = {"alpha", "bravo",  "charlie", "delta", "echo",
                              "foxtrot", "golf", "hotel",   "india", "juliet",
                              "kilo",  "lima",   "mike",    "november", "oscar",
                              "papa",  "quebec", "romeo",   "sierra", "tango"};

double pmi_oracle(std::size_t n, std::size_t nx, std::size_t ny, std::size_t nxy) {
  return std::log2(static_cast<double>(nxy) * static_cast<double>(n) /
                   (static_cast<double>(nx) * static_cast<double>(ny)));
}

std::vector<semantic::TermRow> table_oracle(const std::vector<std::set<std::string>>& docs,
                                            const std::vector<bool>& named, std::size_t k) {
  std::map<std::string, std::size_t> df;
  for (const auto& d : docs) {
    for (const auto& t : d) ++df[t];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(df.begin(), df.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > k) ranked.resize(k);
  std::size_t nx = 0;
  for (bool b : named) nx += b;
  std::vector<semantic::TermRow> rows;
  if (nx == 0) return rows;
  for (const auto& [term, ny] : ranked) {
    std::size_t nxy = 0;
    for (std::size_t i = 0; i < docs.size(); ++i) nxy += named[i] && docs[i].count(term);
    if (nxy == 0) continue;
    rows.push_back({term, pmi_oracle(docs.size(), nx, ny, nxy), ny});
  }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.pmi != b.pmi) return a.pmi > b.pmi;
    if (a.frequency != b.frequency) return a.frequency > b.frequency;
    return a.term < b.term;
  });
  return rows;
}

Verdict pmi_oracle_suite() {
  Verdict v;
  std::mt19937_64 rng(7);
  auto I = [&](std::size_t a, std::size_t b) {
    return std::uniform_int_distribution<std::size_t>(a, b)(rng);
  };
  const ingest::PlaceQuery place("Zulu");
  for (int inst = 0; inst < 200; ++inst) {
    const std::size_t n_docs = I(1, 50), vocab = I(1, 20), k = I(1, 20);
    std::vector<ingest::GeoPost> corpus;
    std::vector<std::set<std::string>> docs;
    std::vector<bool> named;
    for (std::size_t i = 0; i < n_docs; ++i) {
      std::string text;
      std::set<std::string> terms;
      const bool has_place = I(0, 2) == 0;
      if (has_place) text = "ZULU";
      for (std::size_t w = I(0, 6); w > 0; --w) {
        const std::string t = kTerms[I(0, vocab - 1)];
        terms.insert(t);
        text += (text.empty() ? "" : " ") + t;
      }
      ingest::GeoPost p;
      p.id = std::to_string(i);
      p.text = text;
      corpus.push_back(p);
      docs.push_back(terms);
      named.push_back(has_place);
    }
    const auto got = semantic::term_table(corpus, place, {}, k, semantic::Scope::Full);
    if (got.rows != table_oracle(docs, named, k)) {
      v.fail("term table differs from the oracle on instance " + std::to_string(inst));
    }
    auto doubled = corpus;
    doubled.insert(doubled.end(), corpus.begin(), corpus.end());
    const auto twice = semantic::term_table(doubled, place, {}, k, semantic::Scope::Full);
    if (twice.rows.size() != got.rows.size()) {
      v.fail("duplication changed the row count");
    } else {
      for (std::size_t i = 0; i < got.rows.size(); ++i) {
        if (twice.rows[i].term != got.rows[i].term || twice.rows[i].pmi != got.rows[i].pmi ||
            twice.rows[i].frequency != 2 * got.rows[i].frequency) {
          v.fail("duplication changed a score");
        }
      }
    }

    const std::size_t n = I(1, 50), nx = I(1, n), ny = I(1, n);
    const std::size_t lo = nx + ny > n ? nx + ny - n : 0;
    const std::size_t nxy = I(lo, std::min(nx, ny));
    const auto score = semantic::pmi(n, nx, ny, nxy);
    if (nxy == 0 ? score.has_value() : (!score || *score != pmi_oracle(n, nx, ny, nxy))) {
      v.fail("pmi differs from the oracle");
    }
    // Independent counts: n_xy / n == (n_x / n) (n_y / n).
    const std::size_t a = I(1, 5), b = I(1, 5), m = I(1, 5);
    if (semantic::pmi(a * b * m, a * m, b * m, m) != 0.0) v.fail("independence is not 0");
  }
  if (v.pass) v.detail = "200 corpora exact; independence 0; duplication invariant";
  return v;
}

// ---------------------------------------------------------------------------
// 8. Density clustering

std::vector<int> dbscan_oracle(const std::vector<PlanarPoint>& pts, double eps,
                               std::size_t min_pts) {
  const std::size_t n = pts.size();
  const double eps2 = eps * eps;
  auto near = [&](std::size_t i, std::size_t j) { return squared_distance(pts[i], pts[j]) <= eps2; };
  std::vector<bool> core(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t c = 0;
    for (std::size_t j = 0; j < n; ++j) c += near(i, j);
    core[i] = c >= min_pts;
  }
  // Connected components of the core graph.
  std::vector<int> comp(n, -1);
  int n_comp = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (!core[s] || comp[s] >= 0) continue;
    std::vector<std::size_t> stack = {s};
    comp[s] = n_comp;
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      for (std::size_t j = 0; j < n; ++j) {
        if (core[j] && comp[j] < 0 && near(i, j)) {
          comp[j] = n_comp;
          stack.push_back(j);
        }
      }
    }
    ++n_comp;
  }
  auto lex_less = [&](std::size_t a, std::size_t b) {
    return pts[a].x != pts[b].x ? pts[a].x < pts[b].x : pts[a].y < pts[b].y;
  };
  std::vector<std::size_t> rep(n_comp, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (core[i] && (rep[comp[i]] == n || lex_less(i, rep[comp[i]]))) rep[comp[i]] = i;
  }
  std::vector<int> order(n_comp);
  for (int c = 0; c < n_comp; ++c) order[c] = c;
  std::sort(order.begin(), order.end(), [&](int a, int b) { return lex_less(rep[a], rep[b]); });
  std::vector<int> rename(n_comp);
  for (int i = 0; i < n_comp; ++i) rename[order[i]] = i;

  std::vector<int> labels(n, cluster::kNoise);
  for (std::size_t i = 0; i < n; ++i) {
    if (core[i]) {
      labels[i] = rename[comp[i]];
      continue;
    }
    std::size_t best = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (!core[j] || !near(i, j)) continue;
      if (best == n) {
        best = j;
        continue;
      }
      const double dj = squared_distance(pts[i], pts[j]), db = squared_distance(pts[i], pts[best]);
      if (dj < db || (dj == db && lex_less(j, best))) best = j;
    }
    if (best < n) labels[i] = rename[comp[best]];
  }
  return labels;
}

Verdict dbscan_oracle_suite() {
  Verdict v;
  std::mt19937_64 rng(8);
  auto U = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
  for (int inst = 0; inst < 100; ++inst) {
    const auto n = static_cast<std::size_t>(U(1, 201));
    const bool lattice = inst % 2 == 1;
    std::vector<PlanarPoint> pts;
    const int blobs = static_cast<int>(U(1, 5));
    std::vector<PlanarPoint> centers;
    for (int b = 0; b < blobs; ++b) centers.push_back({U(0, 40), U(0, 40)});
    for (std::size_t i = 0; i < n; ++i) {
      const auto& c = centers[i % centers.size()];
      const double spread = U(0.5, 6);
      PlanarPoint p{c.x + U(-spread, spread), c.y + U(-spread, spread)};
      if (lattice) p = {std::round(p.x), std::round(p.y)};
      pts.push_back(p);
    }
    const double eps = lattice ? std::round(U(1, 4)) : U(0.3, 4);
    const auto min_pts = static_cast<std::size_t>(U(1, 9));
    const auto got = cluster::dbscan(pts, eps, min_pts);
    if (got.labels != dbscan_oracle(pts, eps, min_pts)) {
      v.fail("labels differ from the reference on instance " + std::to_string(inst));
    }
  }

  // Dense and sparse lattices with jitter, 10x apart in spacing.
  std::vector<PlanarPoint> pts;
  for (int i = 0; i < 12; ++i) {
    for (int j = 0; j < 12; ++j) pts.push_back({i + U(-0.1, 0.1), j + U(-0.1, 0.1)});
  }
  const std::size_t n_dense = pts.size();
  for (int i = 0; i < 12; ++i) {
    for (int j = 0; j < 12; ++j) {
      pts.push_back({1000 + 10 * i + U(-1, 1), 10 * j + U(-1, 1)});
    }
  }
  const std::size_t n_sparse = pts.size() - n_dense;
  const std::size_t min_pts = 4;
  const auto levels = cluster::dmdbscan_eps_levels(pts, min_pts);
  const auto multi = cluster::dmdbscan_with_levels(pts, min_pts, levels);
  const auto single = cluster::dbscan(pts, levels.front(), min_pts);

  auto blob_cover = [&](const cluster::ClusterResult& r, std::size_t begin, std::size_t end) {
    std::map<int, std::size_t> count;
    for (std::size_t i = begin; i < end; ++i) {
      if (r.labels[i] != cluster::kNoise) ++count[r.labels[i]];
    }
    std::size_t best = 0;
    int id = cluster::kNoise;
    for (const auto& [label, c] : count) {
      if (c > best) {
        best = c;
        id = label;
      }
    }
    return std::pair{id, static_cast<double>(best) / static_cast<double>(end - begin)};
  };
  const auto [dense_id, dense_share] = blob_cover(multi, 0, n_dense);
  const auto [sparse_id, sparse_share] = blob_cover(multi, n_dense, pts.size());
  std::size_t sparse_noise = 0;
  for (std::size_t i = n_dense; i < pts.size(); ++i) sparse_noise += single.labels[i] == cluster::kNoise;
  const double single_noise = static_cast<double>(sparse_noise) / static_cast<double>(n_sparse);
  if (dense_id == cluster::kNoise || sparse_id == cluster::kNoise || dense_id == sparse_id ||
      dense_share < 0.9 || sparse_share < 0.9) {
    v.fail("dmdbscan missed a blob (dense " + fmt("%.2f", dense_share) + ", sparse " +
           fmt("%.2f", sparse_share) + ")");
  }
  if (single_noise < 0.9) v.fail("single eps clustered the sparse blob");
  if (v.pass) {
    v.detail = "100 instances exact; " + std::to_string(levels.size()) +
               " eps levels recover " + fmt("%.2f", dense_share) + "/" +
               fmt("%.2f", sparse_share) + " of the blobs, single eps leaves " +
               fmt("%.2f", single_noise) + " of the sparse blob as noise";
  }
  return v;
}

// ---------------------------------------------------------------------------
// 9. Hulls

bool inside_or_on(const Ring& ring, const PlanarPoint& p) {
  if (ring_contains(ring, p)) return true;
  for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
    if (on_segment(ring[j], ring[i], p)) return true;
  }
  return false;
}

// Vertices of the convex hull by brute force: endpoints of every pair that
// has all other points on its left or on the segment between them.
std::set<std::pair<double, double>> hull_vertices_oracle(const std::vector<PlanarPoint>& pts) {
  std::set<std::pair<double, double>> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (pts[i] == pts[j]) continue;
      bool edge = true;
      for (const auto& p : pts) {
        const double c = cross(pts[i], pts[j], p);
        if (c < 0 || (c == 0 && !on_segment(pts[i], pts[j], p))) {
          edge = false;
          break;
        }
      }
      if (edge) {
        out.insert({pts[i].x, pts[i].y});
        out.insert({pts[j].x, pts[j].y});
      }
    }
  }
  return out;
}

Verdict hull_properties() {
  Verdict v;
  std::mt19937_64 rng(9);
  auto U = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
  for (int inst = 0; inst < 100; ++inst) {
    const auto n = static_cast<std::size_t>(U(3, 121));
    std::vector<PlanarPoint> pts;
    std::normal_distribution<double> gauss(0, 50);
    for (std::size_t i = 0; i < n; ++i) {
      pts.push_back(inst % 2 ? PlanarPoint{gauss(rng), gauss(rng)}
                             : PlanarPoint{U(0, 100), U(0, 100)});
    }
    const auto convex = cluster::convex_hull(pts);
    const auto concave = cluster::concave_hull(pts);
    for (const auto& p : pts) {
      if (!inside_or_on(convex.ring, p)) v.fail("point outside the convex hull");
      if (!inside_or_on(concave.ring, p)) v.fail("point outside the concave hull");
    }
    const double ca = std::abs(signed_area(convex.ring));
    if (std::abs(signed_area(concave.ring)) > ca * (1 + 1e-12)) {
      v.fail("concave area exceeds convex area");
    }
    std::set<std::pair<double, double>> verts;
    for (const auto& p : convex.ring) verts.insert({p.x, p.y});
    if (verts != hull_vertices_oracle(pts) || verts.size() != convex.ring.size()) {
      v.fail("convex hull differs from brute force on instance " + std::to_string(inst));
    }
    for (std::size_t i = 0; i < convex.ring.size(); ++i) {
      const auto& a = convex.ring[i];
      const auto& b = convex.ring[(i + 1) % convex.ring.size()];
      for (const auto& p : pts) {
        if (cross(a, b, p) < 0) v.fail("point right of a convex hull edge");
      }
    }
  }
  if (v.pass) v.detail = "100 point sets";
  return v;
}

// ---------------------------------------------------------------------------
// 10. Split consistency

Verdict split_consistency() {
  Verdict v;
  std::mt19937_64 rng(10);
  auto U = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
  const kde::LocalProjection proj(-117.07, 32.77);
  const ingest::PlaceQuery place("Zulu");
  for (int inst = 0; inst < 20; ++inst) {
    // Boundary: zero contour of a density difference over a 2 km grid.
    std::vector<PlanarPoint> hot;
    for (int i = 0; i < 30; ++i) hot.push_back({U(-600, 600), U(-600, 600)});
    const auto grid = kde::make_grid({-1000, -1000, 1000, 1000}, 50);
    std::vector<PlanarPoint> spread;
    for (int i = 0; i < 60; ++i) spread.push_back({U(-1000, 1000), U(-1000, 1000)});
    const auto norm = kde::normalize_diff(kde::kde(hot, grid, 300), kde::kde(spread, grid, 300));
    const auto bset = boundary::contour(norm, 0.0);

    std::vector<ingest::GeoPost> posts;
    const auto n = static_cast<std::size_t>(U(1, 300));
    for (std::size_t i = 0; i < n; ++i) {
      ingest::GeoPost p;
      p.id = std::to_string(i);
      const auto ll = proj.inverse({U(-1200, 1200), U(-1200, 1200)});
      p.lon = ll.lon;
      p.lat = ll.lat;
      for (int w = static_cast<int>(U(0, 5)); w > 0; --w) {
        p.text += std::string(kTerms[static_cast<int>(U(0, 20))]) + " ";
      }
      if (U(0, 1) < 0.3) p.text += "zulu";
      posts.push_back(p);
    }
    const auto split = boundary::split_corpus(posts, bset, proj);
    std::set<std::string> in_ids, out_ids;
    for (const auto& p : split.in_posts) in_ids.insert(p.id);
    for (const auto& p : split.out_posts) out_ids.insert(p.id);
    for (const auto& id : in_ids) {
      if (out_ids.count(id)) v.fail("post " + id + " on both sides");
    }
    if (in_ids.size() + out_ids.size() != posts.size() ||
        split.in_posts.size() + split.out_posts.size() != posts.size()) {
      v.fail("split is not exhaustive");
    }
    for (const auto& p : split.in_posts) {
      if (!boundary::contains(bset, proj.forward(p.lon, p.lat))) v.fail("in post outside");
    }

    auto full = semantic::term_counts(posts, place, {}, semantic::TokenizeMode::Latin);
    auto sum = semantic::term_counts(split.in_posts, place, {}, semantic::TokenizeMode::Latin);
    for (const auto& [t, c] :
         semantic::term_counts(split.out_posts, place, {}, semantic::TokenizeMode::Latin)) {
      sum[t] += c;
    }
    if (full != sum) v.fail("full counts differ from in + out");
  }
  if (v.pass) v.detail = "20 corpora";
  return v;
}

// ---------------------------------------------------------------------------
// 11. CLI determinism across thread counts

std::map<std::string, std::string> read_dir(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::ifstream f(e.path(), std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    files[e.path().filename().string()] = ss.str();
  }
  return files;
}

Verdict cli_determinism() {
  Verdict v;
  const auto root = fs::temp_directory_path() / "placescope_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);
  const auto s = campus(21);
  {
    std::ofstream f(root / "posts.jsonl");
    for (const auto& p : s.all) f << ingest::to_record_line(p) << '\n';
  }
  char bbox[128];
  std::snprintf(bbox, sizeof bbox, "%.9f,%.9f,%.9f,%.9f", s.region.bbox.min_lon,
                s.region.bbox.min_lat, s.region.bbox.max_lon, s.region.bbox.max_lat);
  std::vector<std::map<std::string, std::string>> runs;
  for (const char* threads : {"1", "8", "1", "8"}) {
    const auto dir = root / ("run" + std::to_string(runs.size()));
    std::ostringstream out, err;
    const int code = cli::run({"placescope", "--threads", threads, "ontology", "--input",
                               (root / "posts.jsonl").string(), "--keyword", "SDSU", "--bbox",
                               bbox, "--output", (dir / "sdsu.json").string()},
                              out, err);
    if (code != 0) {
      v.fail("ontology exited " + std::to_string(code) + ": " + err.str());
      return v;
    }
    runs.push_back(read_dir(dir));
  }
  for (const auto& r : runs) {
    if (r != runs.front()) v.fail("outputs differ between runs");
  }
  std::size_t bytes = 0;
  for (const auto& [name, data] : runs.front()) bytes += data.size();
  if (v.pass) {
    v.detail = std::to_string(runs.front().size()) + " files, " + std::to_string(bytes) +
               " bytes identical over threads 1, 8, 1, 8";
  }
  fs::remove_all(root);
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"placescope acceptance suite"};
  int only = 0;
  app.add_option("--criterion", only, "Run a single criterion")->check(CLI::Range(1, 11));
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria = {
      {1, "noise report counts", 1, noise_report_rows},
      {2, "feature classification rows", 1, classification_rows},
      {3, "kde equals direct summation", 30, kde_oracle},
      {4, "normalized difference properties", 5, normalize_properties},
      {5, "boundary recovery of a synthetic blob", 120, boundary_recovery},
      {6, "seasonal change at the campus center", 120, seasonal_dynamics},
      {7, "pmi and term tables against counting", 10, pmi_oracle_suite},
      {8, "density clustering against reachability", 30, dbscan_oracle_suite},
      {9, "hull properties", 10, hull_properties},
      {10, "in/out split consistency", 5, split_consistency},
      {11, "ontology cli determinism", 120, cli_determinism},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    if (only != 0 && c.id != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.fail(std::string("threw: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.budget_s) v.fail(v.detail);
    if (!v.pass) ++failed;
    std::printf("[%s] criterion %d: %s: %s (%.2f s, limit %g s)\n", v.pass ? "PASS" : "FAIL",
                c.id, c.name.c_str(), v.detail.c_str(), secs, c.budget_s);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
