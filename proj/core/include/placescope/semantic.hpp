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

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "placescope/ingest.hpp"

namespace placescope::semantic {

enum class TokenKind { Word, Hashtag, Mention, CharBigram };

struct Token {
  std::string surface;
  TokenKind kind = TokenKind::Word;

  friend bool operator==(const Token&, const Token&) = default;
};

enum class TokenizeMode { Latin, CjkBigram };

std::string_view to_string(TokenizeMode m);
std::optional<TokenizeMode> parse_tokenize_mode(std::string_view s);

/// Latin: ASCII case folding, URLs (http://, https://, www.) removed, split
/// on whitespace and ASCII punctuation; '#' or '@' directly before a word
/// stays attached to it. Bytes outside ASCII count as word characters.
///
/// CjkBigram: runs of Han characters emit overlapping two-character tokens
/// (a lone character is emitted as is). When two Han runs are separated only
/// by whitespace the text is taken as pre-segmented and every run is one
/// token. CJK punctuation separates tokens; other text follows Latin rules.
std::vector<Token> tokenize(std::string_view text, TokenizeMode mode);

using Stopwords = std::unordered_set<std::string>;

/// One term per line; lines starting with '#' are comments. Terms are
/// case-folded.
Stopwords parse_stopwords(std::string_view text);

using TermCount = std::pair<std::string, std::size_t>;

/// Number of documents containing each term, stopwords removed.
std::map<std::string, std::size_t> document_frequencies(
    std::span<const std::vector<Token>> docs, const Stopwords& stopwords);

/// Top k terms by document frequency, ties in term order.
std::vector<TermCount> top_terms(std::span<const std::vector<Token>> docs,
                                 const Stopwords& stopwords, std::size_t k);

/// log2((n_xy / n) / ((n_x / n) (n_y / n))); nullopt when n_xy is 0.
std::optional<double> pmi(std::size_t n_docs, std::size_t n_x, std::size_t n_y,
                          std::size_t n_xy);

enum class Scope { Full, InCircle, OutCircle };

std::string_view to_string(Scope s);

struct TermRow {
  std::string term;
  double pmi = 0.0;
  std::size_t frequency = 0;

  friend bool operator==(const TermRow&, const TermRow&) = default;
};

struct TermTable {
  Scope scope = Scope::Full;
  std::vector<TermRow> rows;  // pmi desc, frequency desc, term asc
  std::size_t k = 0;
};

/// Tokens of the place name and its aliases; these never become candidates.
std::unordered_set<std::string> place_terms(const ingest::PlaceQuery& query,
                                            TokenizeMode mode);

/// Document frequency of every candidate term (stopwords and place terms
/// removed) in a corpus.
std::map<std::string, std::size_t> term_counts(
    std::span<const ingest::GeoPost> corpus, const ingest::PlaceQuery& query,
    const Stopwords& stopwords, TokenizeMode mode);

/// Scores the k most frequent candidate terms against the posts matching
/// `query`. Terms never seen with the place are dropped.
TermTable term_table(std::span<const ingest::GeoPost> corpus,
                     const ingest::PlaceQuery& query,
                     const Stopwords& stopwords, std::size_t k, Scope scope,
                     TokenizeMode mode = TokenizeMode::Latin);

/// Header term,pmi,frequency; pmi with 9 significant digits.
std::string to_csv(const TermTable& table);
std::string to_json(const TermTable& table);

}  // namespace placescope::semantic
