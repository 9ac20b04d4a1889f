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

#include "placescope/ingest.hpp"

#include <absl/container/flat_hash_set.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "json.hpp"
#include "placescope/error.hpp"

namespace placescope::ingest {

using nlohmann::json;
namespace chr = std::chrono;

std::string_view to_string(Platform p) {
  switch (p) {
    case Platform::Twitter: return "Twitter";
    case Platform::Weibo: return "Weibo";
    case Platform::Other: return "Other";
  }
  return "Other";
}

std::optional<Platform> parse_platform(std::string_view s) {
  const std::string f = fold_ascii(s);
  if (f == "twitter") return Platform::Twitter;
  if (f == "weibo" || f == "sina weibo") return Platform::Weibo;
  if (f == "other") return Platform::Other;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Timestamps

namespace {

bool read_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > s.size()) return false;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, out);
  return ec == std::errc{} && ptr == s.data() + pos + len;
}

}  // namespace

std::optional<Timestamp> parse_timestamp(std::string_view s) {
  int y, mo, d, h, mi, sec;
  if (!read_int(s, 0, 4, y) || s.size() < 19 || s[4] != '-' ||
      !read_int(s, 5, 2, mo) || s[7] != '-' || !read_int(s, 8, 2, d) ||
      (s[10] != 'T' && s[10] != ' ') || !read_int(s, 11, 2, h) ||
      s[13] != ':' || !read_int(s, 14, 2, mi) || s[16] != ':' ||
      !read_int(s, 17, 2, sec)) {
    return std::nullopt;
  }
  if (h > 23 || mi > 59 || sec > 60) return std::nullopt;
  const chr::year_month_day ymd{chr::year{y}, chr::month{unsigned(mo)},
                                chr::day{unsigned(d)}};
  if (!ymd.ok()) return std::nullopt;

  std::size_t pos = 19;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    const std::size_t start = pos;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
    if (pos == start) return std::nullopt;
  }
  int offset_minutes = 0;
  if (pos < s.size()) {
    if (s[pos] == 'Z' || s[pos] == 'z') {
      ++pos;
    } else if (s[pos] == '+' || s[pos] == '-') {
      const int sign = s[pos] == '-' ? -1 : 1;
      int oh, om;
      if (!read_int(s, pos + 1, 2, oh)) return std::nullopt;
      std::size_t mpos = pos + 3;
      if (mpos < s.size() && s[mpos] == ':') ++mpos;
      if (!read_int(s, mpos, 2, om)) return std::nullopt;
      if (oh > 23 || om > 59) return std::nullopt;
      offset_minutes = sign * (oh * 60 + om);
      pos = mpos + 2;
    } else {
      return std::nullopt;
    }
  }
  if (pos != s.size()) return std::nullopt;

  const auto local = chr::sys_days{ymd} + chr::hours{h} + chr::minutes{mi} +
                     chr::seconds{sec};
  return chr::time_point_cast<chr::seconds>(local -
                                            chr::minutes{offset_minutes});
}

std::string format_timestamp(Timestamp t) {
  const auto day = chr::floor<chr::days>(t);
  const chr::year_month_day ymd{day};
  const chr::hh_mm_ss hms{t - day};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ",
                int(ymd.year()), unsigned(ymd.month()), unsigned(ymd.day()),
                int(hms.hours().count()), int(hms.minutes().count()),
                int(hms.seconds().count()));
  return buf;
}

// ---------------------------------------------------------------------------
// Parsing

std::optional<GeoPost> parse_post(std::string_view line,
                                  std::string* bad_field) {
  auto fail = [&](const char* field) -> std::optional<GeoPost> {
    if (bad_field) *bad_field = field;
    return std::nullopt;
  };
  json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) return fail("record");

  GeoPost post;
  auto it = j.find("id");
  if (it == j.end() || !it->is_string()) return fail("id");
  post.id = it->get<std::string>();
  if (post.id.empty()) return fail("id");

  it = j.find("created_at");
  if (it == j.end() || !it->is_string()) return fail("created_at");
  auto ts = parse_timestamp(it->get_ref<const std::string&>());
  if (!ts) return fail("created_at");
  post.timestamp = *ts;

  it = j.find("lon");
  if (it == j.end() || !it->is_number()) return fail("lon");
  post.lon = it->get<double>();
  if (!std::isfinite(post.lon) || post.lon < -180.0 || post.lon > 180.0) {
    return fail("lon");
  }

  it = j.find("lat");
  if (it == j.end() || !it->is_number()) return fail("lat");
  post.lat = it->get<double>();
  if (!std::isfinite(post.lat) || post.lat < -90.0 || post.lat > 90.0) {
    return fail("lat");
  }

  it = j.find("text");
  if (it == j.end() || !it->is_string()) return fail("text");
  post.text = it->get<std::string>();

  it = j.find("source");
  if (it == j.end() || !it->is_string()) return fail("source");
  post.source = it->get<std::string>();

  it = j.find("platform");
  if (it != j.end() && !it->is_null()) {
    if (!it->is_string()) return fail("platform");
    auto p = parse_platform(it->get_ref<const std::string&>());
    if (!p) return fail("platform");
    post.platform = *p;
  }
  return post;
}

ParseResult parse_posts(std::span<const std::string> lines, ParseMode mode) {
  ParseResult result;
  result.posts.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    std::string field;
    auto post = parse_post(line, &field);
    if (post) {
      result.posts.push_back(std::move(*post));
    } else if (mode == ParseMode::Strict) {
      throw ParseError(i + 1, field, "malformed record");
    } else {
      ++result.malformed;
    }
  }
  return result;
}

std::string to_record_line(const GeoPost& post) {
  json j = {{"id", post.id},
            {"created_at", format_timestamp(post.timestamp)},
            {"lon", post.lon},
            {"lat", post.lat},
            {"text", post.text},
            {"source", post.source},
            {"platform", std::string(to_string(post.platform))}};
  return j.dump();
}

// ---------------------------------------------------------------------------
// Noise filtering

std::string_view to_string(NoiseReason r) {
  switch (r) {
    case NoiseReason::OutsideBbox: return "OutsideBbox";
    case NoiseReason::BlockedSource: return "BlockedSource";
    case NoiseReason::Malformed: return "Malformed";
    case NoiseReason::Duplicate: return "Duplicate";
  }
  return "";
}

double noise_percentage(std::uint64_t original, std::uint64_t noise) {
  if (original == 0) return 0.0;
  // Integer hundredths of a percent, truncated: 864477 of 7619307 -> 11.34.
  const std::uint64_t hundredths = noise * 10000 / original;
  return static_cast<double>(hundredths) / 100.0;
}

NoiseReport NoiseReport::from_counts(std::uint64_t original,
                                     std::uint64_t noise) {
  if (noise > original) {
    throw InvalidArgument("noise count exceeds original count");
  }
  NoiseReport r;
  r.original_count = original;
  r.noise_count = noise;
  r.final_count = original - noise;
  r.noise_percentage = ingest::noise_percentage(original, noise);
  return r;
}

std::string to_json(const NoiseReport& report) {
  json j;
  j["original_count"] = report.original_count;
  j["noise_count"] = report.noise_count;
  j["final_count"] = report.final_count;
  j["noise_percentage"] = report.noise_percentage;
  for (std::size_t i = 0; i < kNoiseReasonCount; ++i) {
    j[std::string(to_string(static_cast<NoiseReason>(i)))] = report.reasons[i];
  }
  return j.dump();
}

struct NoiseFilter::State {
  absl::flat_hash_set<std::string> seen_ids;
};

NoiseFilter::NoiseFilter(const LonLatBox& bbox,
                         std::set<std::string> blocked_sources)
    : bbox_(bbox),
      blocked_(std::move(blocked_sources)),
      state_(std::make_unique<State>()) {
  if (bbox.degenerate()) {
    throw InvalidArgument("noise filter bounding box is degenerate");
  }
}

NoiseFilter::NoiseFilter(NoiseFilter&&) noexcept = default;
NoiseFilter& NoiseFilter::operator=(NoiseFilter&&) noexcept = default;
NoiseFilter::~NoiseFilter() = default;

bool NoiseFilter::admit(const GeoPost& post) {
  ++counts_.original_count;
  auto reject = [&](NoiseReason r) {
    ++counts_.noise_count;
    ++counts_.reasons[static_cast<std::size_t>(r)];
    return false;
  };
  if (!bbox_.contains(post.lon, post.lat)) {
    return reject(NoiseReason::OutsideBbox);
  }
  if (blocked_.contains(post.source)) {
    return reject(NoiseReason::BlockedSource);
  }
  if (!state_->seen_ids.insert(post.id).second) {
    return reject(NoiseReason::Duplicate);
  }
  return true;
}

void NoiseFilter::add_malformed(std::uint64_t count) {
  counts_.original_count += count;
  counts_.noise_count += count;
  counts_.reasons[static_cast<std::size_t>(NoiseReason::Malformed)] += count;
}

NoiseReport NoiseFilter::report() const {
  NoiseReport r = counts_;
  r.final_count = r.original_count - r.noise_count;
  r.noise_percentage = noise_percentage(r.original_count, r.noise_count);
  return r;
}

std::pair<std::vector<GeoPost>, NoiseReport> filter_noise(
    std::span<const GeoPost> posts, const LonLatBox& bbox,
    const std::set<std::string>& blocked_sources) {
  NoiseFilter filter(bbox, blocked_sources);
  std::vector<GeoPost> kept;
  kept.reserve(posts.size());
  for (const auto& p : posts) {
    if (filter.admit(p)) kept.push_back(p);
  }
  return {std::move(kept), filter.report()};
}

// ---------------------------------------------------------------------------
// Keyword selection

std::string fold_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

PlaceQuery::PlaceQuery(std::string canonical_name,
                       std::vector<std::string> aliases)
    : canonical_(std::move(canonical_name)) {
  if (canonical_.empty()) {
    throw InvalidArgument("place query needs a non-empty canonical name");
  }
  phrases_.push_back(fold_ascii(canonical_));
  for (auto& a : aliases) {
    if (a.empty()) continue;
    std::string folded = fold_ascii(a);
    if (std::find(phrases_.begin(), phrases_.end(), folded) != phrases_.end()) {
      continue;
    }
    phrases_.push_back(std::move(folded));
    aliases_.push_back(std::move(a));
  }
}

bool PlaceQuery::matches(std::string_view text) const {
  const std::string folded = fold_ascii(text);
  for (const auto& phrase : phrases_) {
    if (folded.find(phrase) != std::string::npos) return true;
  }
  return false;
}

std::vector<GeoPost> query_keyword(std::span<const GeoPost> posts,
                                   const PlaceQuery& query) {
  std::vector<GeoPost> out;
  for (const auto& p : posts) {
    if (query.matches(p.text)) out.push_back(p);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Calendar slicing

std::string_view to_string(Season s) {
  switch (s) {
    case Season::Spring: return "Spring";
    case Season::Summer: return "Summer";
    case Season::Fall: return "Fall";
    case Season::Winter: return "Winter";
  }
  return "";
}

std::optional<Season> parse_season(std::string_view s) {
  const std::string f = fold_ascii(s);
  if (f == "spring") return Season::Spring;
  if (f == "summer") return Season::Summer;
  if (f == "fall" || f == "autumn") return Season::Fall;
  if (f == "winter") return Season::Winter;
  return std::nullopt;
}

Season next_season(Season s) {
  return static_cast<Season>((static_cast<int>(s) + 1) % 4);
}

MonthKey month_key(Timestamp t) {
  const chr::year_month_day ymd{chr::floor<chr::days>(t)};
  return {int(ymd.year()), unsigned(ymd.month())};
}

SeasonKey season_key(Timestamp t) {
  const MonthKey m = month_key(t);
  switch (m.month) {
    case 3: case 4: case 5: return {m.year, Season::Spring};
    case 6: case 7: case 8: return {m.year, Season::Summer};
    case 9: case 10: case 11: return {m.year, Season::Fall};
    case 12: return {m.year, Season::Winter};
    default: return {m.year - 1, Season::Winter};
  }
}

Season assign_season(Timestamp t) { return season_key(t).season; }

std::map<MonthKey, std::vector<GeoPost>> slice_by_month(
    std::span<const GeoPost> posts) {
  std::map<MonthKey, std::vector<GeoPost>> out;
  for (const auto& p : posts) out[month_key(p.timestamp)].push_back(p);
  return out;
}

std::map<SeasonKey, std::vector<GeoPost>> slice_by_season(
    std::span<const GeoPost> posts) {
  std::map<SeasonKey, std::vector<GeoPost>> out;
  for (const auto& p : posts) out[season_key(p.timestamp)].push_back(p);
  return out;
}

}  // namespace placescope::ingest
