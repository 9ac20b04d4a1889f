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

#include "placescope/semantic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <set>

#include "json.hpp"
#include "placescope/error.hpp"

namespace placescope::semantic {

using ingest::fold_ascii;

std::string_view to_string(TokenizeMode m) {
  return m == TokenizeMode::Latin ? "latin" : "cjk-bigram";
}

std::optional<TokenizeMode> parse_tokenize_mode(std::string_view s) {
  if (s == "latin") return TokenizeMode::Latin;
  if (s == "cjk-bigram" || s == "cjk") return TokenizeMode::CjkBigram;
  return std::nullopt;
}

std::string_view to_string(Scope s) {
  switch (s) {
    case Scope::Full: return "full";
    case Scope::InCircle: return "in";
    case Scope::OutCircle: return "out";
  }
  return "full";
}

namespace {

bool is_word_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z') || c == '_' || c >= 0x80;
}

bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool starts_url(std::string_view s, std::size_t i) {
  const std::string_view rest = s.substr(i);
  return rest.starts_with("http://") || rest.starts_with("https://") ||
         rest.starts_with("www.");
}

void tokenize_latin(std::string_view raw, std::vector<Token>& out) {
  const std::string text = fold_ascii(raw);
  const std::size_t n = text.size();
  std::size_t i = 0;
  while (i < n) {
    const auto c = static_cast<unsigned char>(text[i]);
    const bool word_start = i == 0 || !is_word_byte(static_cast<unsigned char>(text[i - 1]));
    if (word_start && starts_url(text, i)) {
      while (i < n && !is_space(static_cast<unsigned char>(text[i]))) ++i;
      continue;
    }
    if ((c == '#' || c == '@') && i + 1 < n &&
        is_word_byte(static_cast<unsigned char>(text[i + 1]))) {
      std::size_t j = i + 1;
      while (j < n && is_word_byte(static_cast<unsigned char>(text[j]))) ++j;
      out.push_back({text.substr(i, j - i),
                     c == '#' ? TokenKind::Hashtag : TokenKind::Mention});
      i = j;
      continue;
    }
    if (is_word_byte(c)) {
      std::size_t j = i;
      while (j < n && is_word_byte(static_cast<unsigned char>(text[j]))) ++j;
      out.push_back({text.substr(i, j - i), TokenKind::Word});
      i = j;
      continue;
    }
    ++i;
  }
}

struct CodePoint {
  char32_t value;
  std::size_t offset;
  std::size_t length;
};

std::vector<CodePoint> decode_utf8(std::string_view s) {
  std::vector<CodePoint> cps;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    std::size_t len = 1;
    char32_t cp = b0;
    if (b0 >= 0xF0 && b0 < 0xF8) {
      len = 4;
      cp = b0 & 0x07;
    } else if (b0 >= 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if (b0 >= 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    }
    bool ok = len == 1 ? b0 < 0x80 : i + len <= s.size();
    for (std::size_t k = 1; ok && k < len; ++k) {
      const auto b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xC0) != 0x80) ok = false;
      cp = (cp << 6) | (b & 0x3F);
    }
    if (!ok) {
      // Stray byte: keep it as an opaque non-Han unit.
      cps.push_back({0xFFFD, i, 1});
      ++i;
      continue;
    }
    cps.push_back({cp, i, len});
    i += len;
  }
  return cps;
}

bool is_han(char32_t c) {
  return (c >= 0x4E00 && c <= 0x9FFF) || (c >= 0x3400 && c <= 0x4DBF) ||
         (c >= 0xF900 && c <= 0xFAFF);
}

bool is_cjk_punct(char32_t c) {
  return (c >= 0x3000 && c <= 0x303F) || (c >= 0xFF00 && c <= 0xFFEF);
}

void tokenize_cjk(std::string_view text, std::vector<Token>& out) {
  const std::vector<CodePoint> cps = decode_utf8(text);
  struct Segment {
    bool han;
    std::size_t begin;  // code point index
    std::size_t end;
  };
  std::vector<Segment> segs;
  for (std::size_t i = 0; i < cps.size();) {
    const bool han = is_han(cps[i].value);
    std::size_t j = i + 1;
    while (j < cps.size() && is_han(cps[j].value) == han) ++j;
    segs.push_back({han, i, j});
    i = j;
  }

  auto blank = [&](const Segment& s) {
    for (std::size_t k = s.begin; k < s.end; ++k) {
      const char32_t c = cps[k].value;
      if (!(c < 0x80 && is_space(static_cast<unsigned char>(c))) && c != 0x3000) {
        return false;
      }
    }
    return true;
  };
  bool presegmented = false;
  for (std::size_t s = 1; s + 1 < segs.size(); ++s) {
    if (!segs[s].han && segs[s - 1].han && segs[s + 1].han && blank(segs[s])) {
      presegmented = true;
      break;
    }
  }

  auto bytes = [&](std::size_t from, std::size_t to) {
    const std::size_t b = cps[from].offset;
    const std::size_t e = cps[to - 1].offset + cps[to - 1].length;
    return std::string(text.substr(b, e - b));
  };

  for (const auto& seg : segs) {
    if (seg.han) {
      const std::size_t len = seg.end - seg.begin;
      if (presegmented || len == 1) {
        out.push_back({bytes(seg.begin, seg.end), TokenKind::Word});
      } else {
        for (std::size_t k = seg.begin; k + 1 < seg.end; ++k) {
          out.push_back({bytes(k, k + 2), TokenKind::CharBigram});
        }
      }
      continue;
    }
    // Non-Han stretch: CJK punctuation splits it into Latin-rule pieces.
    std::size_t piece = seg.begin;
    for (std::size_t k = seg.begin; k <= seg.end; ++k) {
      if (k == seg.end || is_cjk_punct(cps[k].value)) {
        if (k > piece) tokenize_latin(bytes(piece, k), out);
        piece = k + 1;
      }
    }
  }
}

std::size_t count_docs_with(const std::vector<std::unordered_set<std::string>>& doc_terms,
                            const std::string& term) {
  std::size_t n = 0;
  for (const auto& d : doc_terms) n += d.contains(term) ? 1 : 0;
  return n;
}

}  // namespace

std::vector<Token> tokenize(std::string_view text, TokenizeMode mode) {
  std::vector<Token> out;
  if (mode == TokenizeMode::Latin) {
    tokenize_latin(text, out);
  } else {
    tokenize_cjk(text, out);
  }
  return out;
}

Stopwords parse_stopwords(std::string_view text) {
  Stopwords words;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    while (!line.empty() && is_space(static_cast<unsigned char>(line.front()))) {
      line.remove_prefix(1);
    }
    while (!line.empty() && is_space(static_cast<unsigned char>(line.back()))) {
      line.remove_suffix(1);
    }
    if (!line.empty() && line.front() != '#') words.insert(fold_ascii(line));
    pos = eol + 1;
  }
  return words;
}

std::map<std::string, std::size_t> document_frequencies(
    std::span<const std::vector<Token>> docs, const Stopwords& stopwords) {
  std::map<std::string, std::size_t> df;
  std::set<std::string_view> seen;
  for (const auto& doc : docs) {
    seen.clear();
    for (const auto& tok : doc) {
      if (stopwords.contains(tok.surface)) continue;
      if (seen.insert(tok.surface).second) ++df[tok.surface];
    }
  }
  return df;
}

std::vector<TermCount> top_terms(std::span<const std::vector<Token>> docs,
                                 const Stopwords& stopwords, std::size_t k) {
  if (k < 1) throw InvalidArgument("top_terms k must be at least 1");
  const auto df = document_frequencies(docs, stopwords);
  std::vector<TermCount> terms(df.begin(), df.end());
  std::stable_sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) {
    return a.second > b.second;  // map order already sorts terms
  });
  if (terms.size() > k) terms.resize(k);
  return terms;
}

std::optional<double> pmi(std::size_t n_docs, std::size_t n_x, std::size_t n_y,
                          std::size_t n_xy) {
  if (n_docs < 1 || n_x < 1 || n_y < 1) {
    throw InvalidArgument("pmi needs n_docs, n_x and n_y of at least 1");
  }
  if (n_xy > std::min(n_x, n_y) || n_x > n_docs || n_y > n_docs) {
    throw InvalidArgument("pmi counts are inconsistent");
  }
  if (n_xy == 0) return std::nullopt;
  const double num = static_cast<double>(n_xy) * static_cast<double>(n_docs);
  const double den = static_cast<double>(n_x) * static_cast<double>(n_y);
  return std::log2(num / den);
}

std::unordered_set<std::string> place_terms(const ingest::PlaceQuery& query,
                                            TokenizeMode mode) {
  std::unordered_set<std::string> terms;
  for (const auto& phrase : query.folded_phrases()) {
    terms.insert(phrase);
    for (auto& tok : tokenize(phrase, mode)) terms.insert(std::move(tok.surface));
  }
  return terms;
}

namespace {

struct Prepared {
  std::vector<std::vector<Token>> docs;
  Stopwords excluded;
};

Prepared prepare(std::span<const ingest::GeoPost> corpus,
                 const ingest::PlaceQuery& query, const Stopwords& stopwords,
                 TokenizeMode mode) {
  Prepared p;
  p.excluded = stopwords;
  for (auto& t : place_terms(query, mode)) p.excluded.insert(std::move(t));
  p.docs.reserve(corpus.size());
  for (const auto& post : corpus) p.docs.push_back(tokenize(post.text, mode));
  return p;
}

}  // namespace

std::map<std::string, std::size_t> term_counts(
    std::span<const ingest::GeoPost> corpus, const ingest::PlaceQuery& query,
    const Stopwords& stopwords, TokenizeMode mode) {
  const Prepared p = prepare(corpus, query, stopwords, mode);
  return document_frequencies(p.docs, p.excluded);
}

TermTable term_table(std::span<const ingest::GeoPost> corpus,
                     const ingest::PlaceQuery& query,
                     const Stopwords& stopwords, std::size_t k, Scope scope,
                     TokenizeMode mode) {
  if (corpus.empty()) throw InvalidArgument("term table needs a non-empty corpus");
  if (k < 1) throw InvalidArgument("term table k must be at least 1");
  TermTable table;
  table.scope = scope;
  table.k = k;

  const Prepared p = prepare(corpus, query, stopwords, mode);
  const auto candidates = top_terms(p.docs, p.excluded, k);

  std::vector<bool> has_x(corpus.size());
  std::size_t n_x = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    has_x[i] = query.matches(corpus[i].text);
    n_x += has_x[i] ? 1 : 0;
  }
  if (n_x == 0 || candidates.empty()) return table;

  std::vector<std::unordered_set<std::string>> doc_terms(p.docs.size());
  std::vector<std::unordered_set<std::string>> x_terms;
  for (std::size_t i = 0; i < p.docs.size(); ++i) {
    for (const auto& tok : p.docs[i]) doc_terms[i].insert(tok.surface);
    if (has_x[i]) x_terms.push_back(doc_terms[i]);
  }

  for (const auto& [term, n_y] : candidates) {
    const std::size_t n_xy = count_docs_with(x_terms, term);
    const auto score = pmi(corpus.size(), n_x, n_y, n_xy);
    if (!score) continue;
    table.rows.push_back({term, *score, n_y});
  }
  std::sort(table.rows.begin(), table.rows.end(), [](const TermRow& a, const TermRow& b) {
    if (a.pmi != b.pmi) return a.pmi > b.pmi;
    if (a.frequency != b.frequency) return a.frequency > b.frequency;
    return a.term < b.term;
  });
  return table;
}

std::string to_csv(const TermTable& table) {
  std::string out = "term,pmi,frequency\n";
  char buf[32];
  for (const auto& row : table.rows) {
    std::snprintf(buf, sizeof buf, "%.9g", row.pmi);
    out += row.term + ',' + buf + ',' + std::to_string(row.frequency) + '\n';
  }
  return out;
}

std::string to_json(const TermTable& table) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& row : table.rows) {
    arr.push_back({{"term", row.term}, {"pmi", row.pmi}, {"frequency", row.frequency}});
  }
  return arr.dump(2);
}

}  // namespace placescope::semantic
