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

#include "placescope/cluster.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <queue>
#include <tuple>
#include <unordered_map>

#include "placescope/error.hpp"

namespace placescope::cluster {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::Dbscan: return "dbscan";
    case Method::Dmdbscan: return "dmdbscan";
    case Method::Ward: return "ward";
  }
  return "dbscan";
}

std::optional<Method> parse_method(std::string_view s) {
  if (s == "dbscan") return Method::Dbscan;
  if (s == "dmdbscan") return Method::Dmdbscan;
  if (s == "ward") return Method::Ward;
  return std::nullopt;
}

std::string_view to_string(HullKind k) {
  return k == HullKind::Convex ? "convex" : "concave";
}

std::size_t ClusterResult::noise_count() const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), kNoise));
}

namespace {

bool lex_less(const PlanarPoint& a, const PlanarPoint& b) {
  return std::tie(a.x, a.y) < std::tie(b.x, b.y);
}

// Uniform bucket grid with cell size eps; neighbours of a point lie in the
// 3x3 block around its bucket.
class NeighborGrid {
 public:
  NeighborGrid(std::span<const PlanarPoint> points, double eps)
      : points_(points), eps_(eps), eps2_(eps * eps) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      buckets_[key(cell(points[i].x), cell(points[i].y))].push_back(i);
    }
  }

  template <typename F>
  void for_each_neighbor(std::size_t i, F&& f) const {
    const PlanarPoint& p = points_[i];
    const std::int64_t cx = cell(p.x);
    const std::int64_t cy = cell(p.y);
    for (std::int64_t dy = -1; dy <= 1; ++dy) {
      for (std::int64_t dx = -1; dx <= 1; ++dx) {
        auto it = buckets_.find(key(cx + dx, cy + dy));
        if (it == buckets_.end()) continue;
        for (std::size_t j : it->second) {
          const double d2 = squared_distance(p, points_[j]);
          if (d2 <= eps2_) f(j, d2);
        }
      }
    }
  }

 private:
  std::int64_t cell(double v) const {
    return static_cast<std::int64_t>(std::floor(v / eps_));
  }
  static std::uint64_t key(std::int64_t cx, std::int64_t cy) {
    return (static_cast<std::uint64_t>(cx) * 0x9E3779B97F4A7C15ULL) ^
           static_cast<std::uint64_t>(cy);
  }

  std::span<const PlanarPoint> points_;
  double eps_;
  double eps2_;
  // Keys may collide; the distance test filters strays.
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets_;
};

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

void check_finite(std::span<const PlanarPoint> points) {
  for (const auto& p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw InvalidArgument("point coordinates must be finite");
    }
  }
}

}  // namespace

ClusterResult dbscan(std::span<const PlanarPoint> points, double eps,
                     std::size_t min_pts) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw InvalidArgument("dbscan eps must be positive");
  }
  if (min_pts < 1) throw InvalidArgument("dbscan min_pts must be at least 1");
  check_finite(points);

  const std::size_t n = points.size();
  ClusterResult result;
  result.method = Method::Dbscan;
  result.params.eps = {eps};
  result.params.min_pts = min_pts;
  result.labels.assign(n, kNoise);
  if (n == 0) return result;

  const NeighborGrid grid(points, eps);
  std::vector<bool> core(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t count = 0;
    grid.for_each_neighbor(i, [&](std::size_t, double) { ++count; });
    core[i] = count >= min_pts;
  }

  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!core[i]) continue;
    grid.for_each_neighbor(i, [&](std::size_t j, double) {
      if (core[j]) {
        const std::size_t a = find_root(parent, i);
        const std::size_t b = find_root(parent, j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
    });
  }

  // Representative (lexicographically smallest core) per component.
  std::unordered_map<std::size_t, std::size_t> rep;
  for (std::size_t i = 0; i < n; ++i) {
    if (!core[i]) continue;
    const std::size_t r = find_root(parent, i);
    auto [it, fresh] = rep.emplace(r, i);
    if (!fresh && lex_less(points[i], points[it->second])) it->second = i;
  }
  std::vector<std::pair<std::size_t, std::size_t>> order(rep.begin(), rep.end());
  std::sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
    if (points[a.second] == points[b.second]) return a.second < b.second;
    return lex_less(points[a.second], points[b.second]);
  });
  std::unordered_map<std::size_t, int> id_of_root;
  for (std::size_t c = 0; c < order.size(); ++c) {
    id_of_root[order[c].first] = static_cast<int>(c);
  }
  result.k = order.size();

  for (std::size_t i = 0; i < n; ++i) {
    if (core[i]) {
      result.labels[i] = id_of_root.at(find_root(parent, i));
      continue;
    }
    std::optional<std::size_t> best;
    double best_d2 = 0.0;
    grid.for_each_neighbor(i, [&](std::size_t j, double d2) {
      if (!core[j]) return;
      if (!best || d2 < best_d2 ||
          (d2 == best_d2 && (lex_less(points[j], points[*best]) ||
                             (points[j] == points[*best] && j < *best)))) {
        best = j;
        best_d2 = d2;
      }
    });
    if (best) result.labels[i] = id_of_root.at(find_root(parent, *best));
  }
  return result;
}

std::vector<double> k_distance_curve(std::span<const PlanarPoint> points,
                                     std::size_t min_pts) {
  if (min_pts < 1) throw InvalidArgument("min_pts must be at least 1");
  if (points.size() <= min_pts) {
    throw InvalidArgument("k-distance curve needs more points than min_pts");
  }
  check_finite(points);
  const std::size_t n = points.size();
  std::vector<double> curve(n);
  std::priority_queue<double> heap;
  for (std::size_t i = 0; i < n; ++i) {
    heap = {};
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d2 = squared_distance(points[i], points[j]);
      if (heap.size() < min_pts) {
        heap.push(d2);
      } else if (d2 < heap.top()) {
        heap.pop();
        heap.push(d2);
      }
    }
    curve[i] = std::sqrt(heap.top());
  }
  std::sort(curve.begin(), curve.end());
  return curve;
}

std::vector<double> dmdbscan_eps_levels(std::span<const PlanarPoint> points,
                                        std::size_t min_pts) {
  std::vector<double> k = k_distance_curve(points, min_pts);
  // Coincident points give zero distances; lift them to the smallest
  // positive one so the log curve is defined.
  const auto pos = std::find_if(k.begin(), k.end(), [](double v) { return v > 0.0; });
  if (pos == k.end()) {
    throw DegenerateInput("all points coincide; no eps level exists");
  }
  const double floor_value = *pos;
  for (double& v : k) v = std::max(v, floor_value);

  const std::size_t n = k.size();
  std::vector<double> l(n);
  for (std::size_t i = 0; i < n; ++i) l[i] = std::log(k[i]);

  auto median_of = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size();
    return m % 2 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
  };

  const std::size_t h = std::max<std::size_t>(1, (n + 9) / 10);
  std::vector<double> knees;
  if (n >= 2 * h + 1) {
    std::vector<double> d2(n - 2 * h);
    for (std::size_t i = h; i + h < n; ++i) {
      d2[i - h] = l[i + h] - 2.0 * l[i] + l[i - h];
    }
    std::vector<double> abs_d2(d2.size());
    std::transform(d2.begin(), d2.end(), abs_d2.begin(),
                   [](double v) { return std::abs(v); });
    const double threshold = std::max(3.0 * median_of(abs_d2), std::log(1.5));

    std::optional<std::size_t> last_knee;
    std::size_t i = 0;
    while (i < d2.size()) {
      if (!(d2[i] > threshold)) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j + 1 < d2.size() && d2[j + 1] > threshold) ++j;
      const std::size_t run_lo = i + h;
      const std::size_t run_hi = std::min(n - 2, j + h + h);
      std::size_t knee = run_lo;
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t t = run_lo; t <= run_hi; ++t) {
        const double jump = l[t + 1] - l[t];
        if (jump > best) {
          best = jump;
          knee = t;
        }
      }
      knees.push_back(k[knee]);
      last_knee = knee;
      i = j + 1;
    }
    if (last_knee && n - 1 - *last_knee > h) knees.push_back(k[n - 1]);
  }
  if (knees.empty()) return {median_of(k)};
  std::sort(knees.begin(), knees.end());
  knees.erase(std::unique(knees.begin(), knees.end()), knees.end());
  return knees;
}

ClusterResult dmdbscan_with_levels(std::span<const PlanarPoint> points,
                                   std::size_t min_pts,
                                   std::vector<double> levels) {
  if (points.empty()) throw InvalidArgument("dmdbscan needs points");
  if (levels.empty()) throw InvalidArgument("dmdbscan needs at least one eps level");
  std::sort(levels.begin(), levels.end());

  ClusterResult result;
  result.method = Method::Dmdbscan;
  result.params.eps = levels;
  result.params.min_pts = min_pts;
  result.labels.assign(points.size(), kNoise);

  std::vector<std::size_t> remaining(points.size());
  std::iota(remaining.begin(), remaining.end(), 0);
  for (double eps : levels) {
    if (remaining.empty()) break;
    std::vector<PlanarPoint> subset;
    subset.reserve(remaining.size());
    for (std::size_t i : remaining) subset.push_back(points[i]);
    const ClusterResult level = dbscan(subset, eps, min_pts);
    std::vector<std::size_t> still;
    for (std::size_t s = 0; s < remaining.size(); ++s) {
      if (level.labels[s] == kNoise) {
        still.push_back(remaining[s]);
      } else {
        result.labels[remaining[s]] =
            level.labels[s] + static_cast<int>(result.k);
      }
    }
    result.k += level.k;
    remaining = std::move(still);
  }
  return result;
}

ClusterResult dmdbscan(std::span<const PlanarPoint> points,
                       std::size_t min_pts) {
  if (points.empty()) throw InvalidArgument("dmdbscan needs points");
  return dmdbscan_with_levels(points, min_pts,
                              dmdbscan_eps_levels(points, min_pts));
}

// ---------------------------------------------------------------------------
// Ward

ClusterResult ward_cluster(std::span<const PlanarPoint> points, std::size_t k) {
  const std::size_t n = points.size();
  if (k < 1 || k > n) throw InvalidArgument("ward k must be in [1, point count]");
  check_finite(points);

  ClusterResult result;
  result.method = Method::Ward;
  result.params.k = k;
  result.k = k;

  // Condensed upper-triangular matrix of merge costs.
  auto idx = [n](std::size_t i, std::size_t j) {
    if (i > j) std::swap(i, j);
    return i * n - i * (i + 1) / 2 + (j - i - 1);
  };
  std::vector<double> d(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      d[idx(i, j)] = squared_distance(points[i], points[j]);
    }
  }

  std::vector<std::size_t> size(n, 1);
  std::vector<bool> active(n, true);
  std::vector<std::size_t> root(n);
  std::iota(root.begin(), root.end(), 0);
  // Slot s always holds the cluster whose lowest point index is s.
  std::vector<std::size_t> nn(n, n);

  auto better = [&](std::size_t a, std::size_t b, std::size_t c,
                    std::size_t e) {
    // Is pair (a, b) preferred to pair (c, e)?
    const double x = d[idx(a, b)];
    const double y = d[idx(c, e)];
    if (x != y) return x < y;
    return std::make_pair(std::min(a, b), std::max(a, b)) <
           std::make_pair(std::min(c, e), std::max(c, e));
  };
  auto refresh = [&](std::size_t i) {
    nn[i] = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || !active[j]) continue;
      if (nn[i] == n || better(i, j, i, nn[i])) nn[i] = j;
    }
  };
  for (std::size_t i = 0; i < n; ++i) refresh(i);

  for (std::size_t clusters = n; clusters > k; --clusters) {
    std::size_t a = n, b = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i] || nn[i] == n) continue;
      if (a == n || better(i, nn[i], a, b)) {
        a = i;
        b = nn[i];
      }
    }
    if (a > b) std::swap(a, b);
    const double dab = d[idx(a, b)];
    const double na = static_cast<double>(size[a]);
    const double nb = static_cast<double>(size[b]);
    for (std::size_t c = 0; c < n; ++c) {
      if (!active[c] || c == a || c == b) continue;
      const double nc = static_cast<double>(size[c]);
      d[idx(c, a)] = ((na + nc) * d[idx(c, a)] + (nb + nc) * d[idx(c, b)] -
                      nc * dab) /
                     (na + nb + nc);
    }
    active[b] = false;
    size[a] += size[b];
    for (std::size_t i = 0; i < n; ++i) {
      if (root[i] == b) root[i] = a;
    }
    refresh(a);
    for (std::size_t c = 0; c < n; ++c) {
      if (!active[c] || c == a) continue;
      if (nn[c] == a || nn[c] == b) {
        refresh(c);
      } else if (better(c, a, c, nn[c])) {
        nn[c] = a;
      }
    }
  }

  std::vector<int> id(n, -1);
  int next = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (active[s]) id[s] = next++;
  }
  result.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) result.labels[i] = id[root[i]];
  return result;
}

double within_cluster_ss(const ClusterResult& result,
                         std::span<const PlanarPoint> points) {
  if (result.labels.size() != points.size()) {
    throw InvalidArgument("labels and points differ in length");
  }
  std::vector<double> sx(result.k, 0.0), sy(result.k, 0.0);
  std::vector<std::size_t> cnt(result.k, 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const int c = result.labels[i];
    if (c == kNoise) continue;
    sx[c] += points[i].x;
    sy[c] += points[i].y;
    ++cnt[c];
  }
  double ss = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const int c = result.labels[i];
    if (c == kNoise) continue;
    const double mx = sx[c] / static_cast<double>(cnt[c]);
    const double my = sy[c] / static_cast<double>(cnt[c]);
    ss += (points[i].x - mx) * (points[i].x - mx) +
          (points[i].y - my) * (points[i].y - my);
  }
  return ss;
}

std::vector<PlanarPoint> largest_cluster(const ClusterResult& result,
                                         std::span<const PlanarPoint> points) {
  if (result.labels.size() != points.size()) {
    throw InvalidArgument("labels and points differ in length");
  }
  std::vector<std::size_t> cnt(result.k, 0);
  for (int c : result.labels) {
    if (c != kNoise) ++cnt[static_cast<std::size_t>(c)];
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < cnt.size(); ++c) {
    if (cnt[c] > cnt[best]) best = c;
  }
  if (cnt.empty() || cnt[best] == 0) {
    throw DegenerateInput("no cluster found; every point is noise");
  }
  std::vector<PlanarPoint> out;
  out.reserve(cnt[best]);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (result.labels[i] == static_cast<int>(best)) out.push_back(points[i]);
  }
  return out;
}

std::string to_csv(const ClusterResult& result,
                   std::span<const PlanarPoint> points) {
  if (result.labels.size() != points.size()) {
    throw InvalidArgument("labels and points differ in length");
  }
  auto num = [](double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
  };
  std::string out = "point_index,x,y,label\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    out += std::to_string(i) + ',' + num(points[i].x) + ',' +
           num(points[i].y) + ',' + std::to_string(result.labels[i]) + '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Hulls

namespace {

std::vector<PlanarPoint> distinct_sorted(std::span<const PlanarPoint> points) {
  check_finite(points);
  std::vector<PlanarPoint> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), lex_less);
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

Ring monotone_chain(const std::vector<PlanarPoint>& pts) {
  const std::size_t n = pts.size();
  if (n < 3) throw DegenerateInput("hull needs at least 3 distinct points");
  Ring hull(2 * n);
  std::size_t m = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (m >= 2 && cross(hull[m - 2], hull[m - 1], pts[i]) <= 0.0) --m;
    hull[m++] = pts[i];
  }
  for (std::size_t i = n - 1, lower = m + 1; i-- > 0;) {
    while (m >= lower && cross(hull[m - 2], hull[m - 1], pts[i]) <= 0.0) --m;
    hull[m++] = pts[i];
  }
  hull.resize(m - 1);
  if (hull.size() < 3) throw DegenerateInput("hull points are collinear");
  return hull;
}

bool encloses_all(const Ring& ring, const std::vector<PlanarPoint>& pts) {
  return std::all_of(pts.begin(), pts.end(),
                     [&](const PlanarPoint& p) { return ring_contains(ring, p); });
}

std::optional<Ring> wrap_with_k(const std::vector<PlanarPoint>& pts,
                                std::size_t k) {
  const std::size_t n = pts.size();
  std::size_t first = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (pts[i].y < pts[first].y ||
        (pts[i].y == pts[first].y && pts[i].x < pts[first].x)) {
      first = i;
    }
  }
  std::vector<bool> avail(n, true);
  avail[first] = false;
  std::size_t remaining = n - 1;
  bool first_back = false;
  std::vector<std::size_t> hull{first};
  std::size_t cur = first;
  PlanarPoint dir{1.0, 0.0};

  struct Cand {
    std::size_t index;
    double d2;
    double turn;
  };
  std::vector<Cand> cands;
  while (true) {
    if (!first_back && (hull.size() >= 4 || remaining == 0)) {
      avail[first] = true;
      first_back = true;
    }
    cands.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (avail[j]) cands.push_back({j, squared_distance(pts[cur], pts[j]), 0.0});
    }
    if (cands.empty()) return std::nullopt;
    const std::size_t take = std::min(k, cands.size());
    std::partial_sort(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(take),
                      cands.end(), [](const Cand& a, const Cand& b) {
                        return std::tie(a.d2, a.index) < std::tie(b.d2, b.index);
                      });
    cands.resize(take);
    for (auto& c : cands) {
      const double vx = pts[c.index].x - pts[cur].x;
      const double vy = pts[c.index].y - pts[cur].y;
      c.turn = std::atan2(dir.x * vy - dir.y * vx, dir.x * vx + dir.y * vy);
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
      return std::tie(a.turn, a.d2, a.index) < std::tie(b.turn, b.d2, b.index);
    });

    std::optional<std::size_t> chosen;
    for (const auto& c : cands) {
      const bool closing = c.index == first;
      bool crosses = false;
      // Edge t joins hull[t] and hull[t + 1]; the last one ends at cur.
      for (std::size_t t = 0; t + 2 < hull.size(); ++t) {
        if (closing && t == 0) continue;
        if (segments_intersect(pts[hull[t]], pts[hull[t + 1]], pts[cur],
                               pts[c.index])) {
          crosses = true;
          break;
        }
      }
      if (!crosses) {
        chosen = c.index;
        break;
      }
    }
    if (!chosen) return std::nullopt;
    if (*chosen == first) break;
    dir = {pts[*chosen].x - pts[cur].x, pts[*chosen].y - pts[cur].y};
    hull.push_back(*chosen);
    avail[*chosen] = false;
    --remaining;
    cur = *chosen;
  }

  Ring ring;
  ring.reserve(hull.size());
  for (std::size_t i : hull) ring.push_back(pts[i]);
  if (ring.size() < 3) return std::nullopt;
  if (signed_area(ring) < 0.0) std::reverse(ring.begin(), ring.end());
  if (!ring_is_simple(ring) || !encloses_all(ring, pts)) return std::nullopt;
  return ring;
}

}  // namespace

Hull convex_hull(std::span<const PlanarPoint> points) {
  Hull hull;
  hull.kind = HullKind::Convex;
  hull.ring = monotone_chain(distinct_sorted(points));
  return hull;
}

Hull concave_hull(std::span<const PlanarPoint> points, std::size_t k0) {
  if (k0 < 3) throw InvalidArgument("concave hull k0 must be at least 3");
  const std::vector<PlanarPoint> pts = distinct_sorted(points);
  Ring convex = monotone_chain(pts);

  Hull hull;
  hull.kind = HullKind::Concave;
  const std::size_t k_max = pts.size() - 1;
  for (std::size_t k = std::min(k0, k_max);; ++k) {
    if (auto ring = wrap_with_k(pts, k)) {
      hull.ring = std::move(*ring);
      hull.k_used = k;
      return hull;
    }
    if (k >= k_max) break;
  }
  hull.ring = std::move(convex);
  hull.k_used = k_max;
  return hull;
}

}  // namespace placescope::cluster
