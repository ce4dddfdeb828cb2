/*
 * Copyright 2026 The seknow Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "seknow/topic_index.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "seknow/assets.hpp"
#include "seknow/error.hpp"
#include "seknow/text.hpp"

namespace seknow {

Stopwords Stopwords::from_text(std::string_view text) {
  Stopwords sw;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    std::string word = normalize(line);
    if (word.empty() || word.front() == '#') continue;
    sw.words_.insert(std::move(word));
  }
  std::string canonical;
  for (const auto& w : sw.words_) {
    canonical += w;
    canonical += '\n';
  }
  sw.hash_ = fnv1a_hex(canonical);
  return sw;
}

const Stopwords& Stopwords::builtin() {
  static const Stopwords sw = from_text(assets::builtin_stopwords());
  return sw;
}

Stopwords Stopwords::from_environment() {
  const char* path = std::getenv("SEKNOW_STOPWORDS");
  if (path == nullptr || *path == '\0') return builtin();
  return from_text(read_file(path));
}

namespace {

bool is_word_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c >= 0x80;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text,
                                  const Stopwords& stopwords) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (current.size() >= 2 && !stopwords.contains(current)) {
      tokens.push_back(current);
    }
    current.clear();
  };
  for (char raw : text) {
    auto c = static_cast<unsigned char>(raw);
    if (c >= 'A' && c <= 'Z') c = static_cast<unsigned char>(c - 'A' + 'a');
    if (is_word_byte(c)) {
      current.push_back(static_cast<char>(c));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

std::vector<DocTokens> tokenize_domain(const Domain& domain,
                                       const Stopwords& stopwords) {
  std::vector<DocTokens> out;
  for (const auto& e : domain.entities) {
    for (const auto& d : e.documents) {
      DocTokens doc{{domain.name, e.id, d.doc_id}, tokenize(d.title, stopwords)};
      auto body = tokenize(d.body, stopwords);
      doc.tokens.insert(doc.tokens.end(), body.begin(), body.end());
      out.push_back(std::move(doc));
    }
  }
  return out;
}

std::map<DocRef, TokenScores> compute_tfidf(std::span<const DocTokens> docs) {
  std::map<std::string, std::size_t, std::less<>> df;
  std::vector<std::map<std::string, std::size_t, std::less<>>> tf(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    for (const auto& t : docs[i].tokens) ++tf[i][t];
    for (const auto& [t, _] : tf[i]) ++df[t];
  }
  const auto n = static_cast<double>(docs.size());
  std::map<DocRef, TokenScores> scores;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    TokenScores& s = scores[docs[i].ref];
    for (const auto& [t, count] : tf[i]) {
      double idf = std::log(n / static_cast<double>(df.find(t)->second));
      s[t] = static_cast<double>(count) * idf;
    }
  }
  return scores;
}

std::vector<TopicWord> extract_candidates(const DocTokens& doc,
                                          const TokenScores& scores) {
  if (doc.tokens.empty()) {
    throw Error(ErrorKind::kNoCandidates,
                "document " + to_string(doc.ref) + " has no tokens");
  }
  struct Ranked {
    std::string_view token;
    double score;
    std::size_t first;
  };
  std::vector<Ranked> ranked;
  for (std::size_t pos = 0; pos < doc.tokens.size(); ++pos) {
    const std::string& t = doc.tokens[pos];
    bool seen = std::any_of(ranked.begin(), ranked.end(),
                            [&](const Ranked& r) { return r.token == t; });
    if (seen) continue;
    auto it = scores.find(t);
    ranked.push_back({t, it == scores.end() ? 0.0 : it->second, pos});
  }
  std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.first != b.first) return a.first < b.first;
    return a.token < b.token;
  });
  std::vector<TopicWord> out;
  for (std::size_t i = 0; i < ranked.size() && i < 3; ++i) {
    out.push_back({std::string(ranked[i].token), ranked[i].score, 0.0, false});
  }
  return out;
}

TokenScores compute_ca_tfidf(std::span<const std::vector<TopicWord>> candidates,
                             std::size_t entity_count) {
  TokenScores sums;
  for (const auto& doc : candidates) {
    for (const auto& word : doc) sums[word.token] += word.tfidf;
  }
  const double entities = static_cast<double>(std::max<std::size_t>(entity_count, 1));
  for (auto& [_, v] : sums) v /= entities;
  return sums;
}

Thresholds default_thresholds() {
  return {{"restaurant", 2.3}, {"hotel", 2.7}, {"taxi", 6.9}, {"train", 7.3}};
}

TopicIndex::TopicIndex(std::map<DocRef, IndexedDocument> entries,
                       Thresholds thresholds, std::string stopwords_hash)
    : entries_(std::move(entries)),
      thresholds_(std::move(thresholds)),
      stopwords_hash_(std::move(stopwords_hash)) {}

const IndexedDocument* TopicIndex::find(const DocRef& ref) const {
  auto it = entries_.find(ref);
  return it == entries_.end() ? nullptr : &it->second;
}

std::vector<std::pair<const DocRef*, const IndexedDocument*>>
TopicIndex::entity_documents(std::string_view domain,
                             std::string_view entity_id) const {
  std::vector<std::pair<const DocRef*, const IndexedDocument*>> out;
  DocRef lo{std::string(domain), std::string(entity_id), ""};
  for (auto it = entries_.lower_bound(lo); it != entries_.end(); ++it) {
    if (it->first.domain != domain || it->first.entity_id != entity_id) break;
    out.emplace_back(&it->first, &it->second);
  }
  return out;
}

TopicIndex TopicIndex::with_topics(const DocRef& ref,
                                   std::vector<std::string> topics) const {
  TopicIndex copy = *this;
  auto it = copy.entries_.find(ref);
  if (it == copy.entries_.end()) {
    throw Error(ErrorKind::kIndexing, "document " + to_string(ref) + " is not indexed");
  }
  it->second.topics = std::move(topics);
  return copy;
}

TopicIndex build_topic_index(const KnowledgeBase& kb,
                             const Thresholds& thresholds,
                             const Stopwords& stopwords) {
  std::map<DocRef, IndexedDocument> entries;
  for (const auto& [name, domain] : kb.domains()) {
    std::vector<DocTokens> docs = tokenize_domain(domain, stopwords);
    if (docs.empty()) continue;
    auto threshold = thresholds.find(name);
    if (threshold == thresholds.end()) {
      throw Error(ErrorKind::kConfiguration,
                  "no topic threshold configured for domain '" + name + "'");
    }
    auto scores = compute_tfidf(docs);
    std::vector<std::vector<TopicWord>> candidates;
    candidates.reserve(docs.size());
    for (const auto& doc : docs) {
      try {
        candidates.push_back(extract_candidates(doc, scores[doc.ref]));
      } catch (const Error& e) {
        throw Error(ErrorKind::kIndexing, e.what());
      }
    }
    TokenScores ca = compute_ca_tfidf(candidates, domain.entities.size());
    for (std::size_t i = 0; i < docs.size(); ++i) {
      IndexedDocument indexed;
      for (auto word : candidates[i]) {
        word.ca_tfidf = ca.find(word.token)->second;
        word.survived_filter = word.ca_tfidf >= threshold->second;
        if (word.survived_filter) indexed.topics.push_back(word.token);
        indexed.candidates.push_back(std::move(word));
      }
      // Every document keeps at least its best candidate.
      if (indexed.topics.empty()) indexed.topics.push_back(indexed.candidates.front().token);
      entries.emplace(docs[i].ref, std::move(indexed));
    }
  }
  return TopicIndex(std::move(entries), thresholds, stopwords.hash());
}

std::string serialize_index(const TopicIndex& index) {
  std::vector<std::string> lines;
  lines.reserve(index.entries().size());
  for (const auto& [ref, doc] : index.entries()) {
    lines.push_back(ref.domain + "\t" + ref.entity_id + "\t" + ref.doc_id + "\t" +
                    join(doc.topics, ","));
  }
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& l : lines) {
    out += l;
    out += '\n';
  }
  return out;
}

std::string serialize_index_meta(const TopicIndex& index) {
  std::string out;
  for (const auto& [domain, value] : index.thresholds()) {
    out += "threshold\t" + domain + "\t" + format_shortest(value) + "\n";
  }
  out += "stopwords\t" + index.stopwords_hash() + "\n";
  return out;
}

namespace {

std::vector<std::string> split_on(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? line.npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string> lines_of(std::string_view text) {
  std::vector<std::string> out;
  for (auto& l : split_on(text, '\n')) {
    if (!l.empty() && l.back() == '\r') l.pop_back();
    if (!l.empty()) out.push_back(std::move(l));
  }
  return out;
}

}  // namespace

TopicIndex parse_index(std::string_view index_text, std::string_view meta_text) {
  std::map<DocRef, IndexedDocument> entries;
  std::size_t line_no = 0;
  for (const auto& line : split_on(index_text, '\n')) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_on(line, '\t');
    if (fields.size() != 4 || fields[3].empty()) {
      throw Error(ErrorKind::kLoad, "index line " + std::to_string(line_no) +
                                        ": expected 4 tab-separated fields");
    }
    IndexedDocument doc;
    doc.topics = split_on(fields[3], ',');
    if (doc.topics.size() > 3 ||
        std::any_of(doc.topics.begin(), doc.topics.end(),
                    [](const std::string& t) { return t.empty(); })) {
      throw Error(ErrorKind::kLoad, "index line " + std::to_string(line_no) +
                                        ": expected one to three topic words");
    }
    entries[{fields[0], fields[1], fields[2]}] = std::move(doc);
  }
  Thresholds thresholds;
  std::string hash;
  for (const auto& line : lines_of(meta_text)) {
    auto fields = split_on(line, '\t');
    if (fields.size() == 3 && fields[0] == "threshold") {
      char* end = nullptr;
      double v = std::strtod(fields[2].c_str(), &end);
      if (end == fields[2].c_str() || *end != '\0') {
        throw Error(ErrorKind::kLoad, "bad threshold value '" + fields[2] + "'");
      }
      thresholds[fields[1]] = v;
    } else if (fields.size() == 2 && fields[0] == "stopwords") {
      hash = fields[1];
    } else {
      throw Error(ErrorKind::kLoad, "unrecognized index metadata line '" + line + "'");
    }
  }
  return TopicIndex(std::move(entries), std::move(thresholds), std::move(hash));
}

void save_index(const TopicIndex& index, const std::string& path) {
  write_file(path, serialize_index(index));
  write_file(path + ".meta", serialize_index_meta(index));
}

TopicIndex load_index(const std::string& path) {
  std::string meta;
  if (std::filesystem::exists(path + ".meta")) meta = read_file(path + ".meta");
  return parse_index(read_file(path), meta);
}

}  // namespace seknow
