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

// Geo-tagged post records: parsing, noise filtering, keyword selection and
// calendar slicing.
//
// Input corpora are UTF-8 text with one JSON object per line:
//
//   {"id": "...", "created_at": "2015-03-01T12:00:00Z", "lon": -117.07,
//    "lat": 32.77, "text": "...", "source": "...", "platform": "Twitter"}
//
// "platform" is optional and defaults to "Other".

#pragma once

#include <array>
#include <chrono>
#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "placescope/geometry.hpp"

namespace placescope::ingest {

using Timestamp = std::chrono::sys_seconds;

enum class Platform { Twitter, Weibo, Other };

std::string_view to_string(Platform p);
std::optional<Platform> parse_platform(std::string_view s);

struct GeoPost {
  std::string id;
  Timestamp timestamp{};
  double lon = 0.0;
  double lat = 0.0;
  std::string text;
  std::string source;
  Platform platform = Platform::Other;

  friend bool operator==(const GeoPost&, const GeoPost&) = default;
};

/// Parses ISO-8601 "YYYY-MM-DD[T ]hh:mm:ss[.fff][Z|+hh:mm|+hhmm]".
/// Fractional seconds are truncated; a missing offset means UTC.
std::optional<Timestamp> parse_timestamp(std::string_view s);

/// "YYYY-MM-DDThh:mm:ssZ".
std::string format_timestamp(Timestamp t);

// ---------------------------------------------------------------------------
// Parsing

enum class ParseMode { Lenient, Strict };

struct ParseResult {
  std::vector<GeoPost> posts;
  std::size_t malformed = 0;
};

/// Blank lines are skipped without being counted. In strict mode the first
/// malformed line throws ParseError naming its 1-based line and field.
ParseResult parse_posts(std::span<const std::string> lines,
                        ParseMode mode = ParseMode::Lenient);

/// Parses a single record; returns the offending field name on failure.
std::optional<GeoPost> parse_post(std::string_view line,
                                  std::string* bad_field = nullptr);

/// Serializes a post back to one record line (no trailing newline).
std::string to_record_line(const GeoPost& post);

// ---------------------------------------------------------------------------
// Noise filtering

enum class NoiseReason { OutsideBbox, BlockedSource, Malformed, Duplicate };
inline constexpr std::size_t kNoiseReasonCount = 4;

std::string_view to_string(NoiseReason r);

struct NoiseReport {
  std::uint64_t original_count = 0;
  std::uint64_t noise_count = 0;
  std::uint64_t final_count = 0;
  /// Percent of original removed, truncated (not rounded) to two decimals.
  double noise_percentage = 0.0;
  std::array<std::uint64_t, kNoiseReasonCount> reasons{};

  std::uint64_t reason(NoiseReason r) const {
    return reasons[static_cast<std::size_t>(r)];
  }

  /// Fills final_count and noise_percentage from the two totals.
  static NoiseReport from_counts(std::uint64_t original, std::uint64_t noise);

  friend bool operator==(const NoiseReport&, const NoiseReport&) = default;
};

/// Two-decimal truncated percentage, 0 for an empty corpus.
double noise_percentage(std::uint64_t original, std::uint64_t noise);

/// Flat JSON object with the report fields and one key per reason.
std::string to_json(const NoiseReport& report);

/// Streaming form of filter_noise for corpora that do not fit in memory.
/// Checks run in order OutsideBbox, BlockedSource, Duplicate; a duplicate is
/// a post whose id matches an already admitted post.
class NoiseFilter {
 public:
  NoiseFilter(const LonLatBox& bbox, std::set<std::string> blocked_sources);
  NoiseFilter(NoiseFilter&&) noexcept;
  NoiseFilter& operator=(NoiseFilter&&) noexcept;
  ~NoiseFilter();

  /// Returns true when the post survives.
  bool admit(const GeoPost& post);

  /// Records lines that never became posts.
  void add_malformed(std::uint64_t count);

  NoiseReport report() const;

 private:
  struct State;
  LonLatBox bbox_;
  std::set<std::string> blocked_;
  std::unique_ptr<State> state_;
  NoiseReport counts_;
};

std::pair<std::vector<GeoPost>, NoiseReport> filter_noise(
    std::span<const GeoPost> posts, const LonLatBox& bbox,
    const std::set<std::string>& blocked_sources);

// ---------------------------------------------------------------------------
// Keyword selection

/// Place name plus spelling variants. Matching folds ASCII case only;
/// CJK text has no case.
class PlaceQuery {
 public:
  PlaceQuery(std::string canonical_name, std::vector<std::string> aliases = {});

  const std::string& canonical_name() const { return canonical_; }
  const std::vector<std::string>& aliases() const { return aliases_; }

  /// Canonical name followed by aliases, all case-folded and unique.
  const std::vector<std::string>& folded_phrases() const { return phrases_; }

  bool matches(std::string_view text) const;

 private:
  std::string canonical_;
  std::vector<std::string> aliases_;
  std::vector<std::string> phrases_;
};

std::string fold_ascii(std::string_view s);

std::vector<GeoPost> query_keyword(std::span<const GeoPost> posts,
                                   const PlaceQuery& query);

// ---------------------------------------------------------------------------
// Calendar slicing

enum class Season { Spring, Summer, Fall, Winter };
inline constexpr std::array<Season, 4> kSeasons = {
    Season::Spring, Season::Summer, Season::Fall, Season::Winter};

std::string_view to_string(Season s);
std::optional<Season> parse_season(std::string_view s);
Season next_season(Season s);

/// A season instance; winter carries the year in which it starts
/// (January 2016 belongs to Winter-2015).
struct SeasonKey {
  int year = 0;
  Season season = Season::Spring;

  auto operator<=>(const SeasonKey&) const = default;
};

struct MonthKey {
  int year = 0;
  unsigned month = 1;

  auto operator<=>(const MonthKey&) const = default;
};

Season assign_season(Timestamp t);
SeasonKey season_key(Timestamp t);
MonthKey month_key(Timestamp t);

std::map<MonthKey, std::vector<GeoPost>> slice_by_month(
    std::span<const GeoPost> posts);

std::map<SeasonKey, std::vector<GeoPost>> slice_by_season(
    std::span<const GeoPost> posts);

}  // namespace placescope::ingest
