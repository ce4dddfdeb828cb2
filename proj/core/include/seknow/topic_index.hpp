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

#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "seknow/kb.hpp"

namespace seknow {

/// Stopword list used by the tokenizer. The builtin list matches
/// data/stopwords.txt; `SEKNOW_STOPWORDS` may point at a replacement file.
class Stopwords {
 public:
  /// One word per line; blank lines and lines starting with '#' are ignored.
  static Stopwords from_text(std::string_view text);
  static const Stopwords& builtin();
  /// Builtin list unless SEKNOW_STOPWORDS names a file.
  static Stopwords from_environment();

  bool contains(std::string_view word) const { return words_.contains(word); }
  std::size_t size() const { return words_.size(); }
  /// FNV-1a over the sorted words joined by newlines.
  const std::string& hash() const { return hash_; }

 private:
  std::set<std::string, std::less<>> words_;
  std::string hash_;
};

/// Lowercase alphanumeric runs (bytes >= 0x80 count as word characters),
/// minus stopwords and tokens shorter than two bytes.
std::vector<std::string> tokenize(std::string_view text,
                                  const Stopwords& stopwords = Stopwords::builtin());

struct TopicWord {
  std::string token;
  double tfidf = 0.0;
  double ca_tfidf = 0.0;
  bool survived_filter = false;

  bool operator==(const TopicWord&) const = default;
};

/// Token stream of one document: title tokens followed by body tokens.
struct DocTokens {
  DocRef ref;
  std::vector<std::string> tokens;
};

using TokenScores = std::map<std::string, double, std::less<>>;

std::vector<DocTokens> tokenize_domain(const Domain& domain,
                                       const Stopwords& stopwords);

/// tf(t,d) * ln(N / df(t)) over the documents of one domain.
std::map<DocRef, TokenScores> compute_tfidf(std::span<const DocTokens> docs);

/// Top three tokens by TF-IDF; ties go to the earlier first occurrence.
/// Throws Error(kNoCandidates) for a document without tokens.
std::vector<TopicWord> extract_candidates(const DocTokens& doc,
                                          const TokenScores& scores);

/// Sum of a token's candidate TF-IDF scores over the domain, divided by the
/// number of entities in the domain.
TokenScores compute_ca_tfidf(std::span<const std::vector<TopicWord>> candidates,
                             std::size_t entity_count);

using Thresholds = std::map<std::string, double, std::less<>>;

/// restaurant 2.3, hotel 2.7, taxi 6.9, train 7.3.
Thresholds default_thresholds();

struct IndexedDocument {
  std::vector<std::string> topics;
  /// Candidate words with their scores; empty when loaded from an index file.
  std::vector<TopicWord> candidates;

  bool operator==(const IndexedDocument&) const = default;
};

class TopicIndex {
 public:
  TopicIndex() = default;
  TopicIndex(std::map<DocRef, IndexedDocument> entries, Thresholds thresholds,
             std::string stopwords_hash);

  const std::map<DocRef, IndexedDocument>& entries() const { return entries_; }
  const Thresholds& thresholds() const { return thresholds_; }
  const std::string& stopwords_hash() const { return stopwords_hash_; }

  const IndexedDocument* find(const DocRef& ref) const;
  /// All indexed documents of one entity, ascending by doc id.
  std::vector<std::pair<const DocRef*, const IndexedDocument*>> entity_documents(
      std::string_view domain, std::string_view entity_id) const;

  /// Returns a copy whose entry for `ref` has the given topics.
  TopicIndex with_topics(const DocRef& ref, std::vector<std::string> topics) const;

  bool operator==(const TopicIndex&) const = default;

 private:
  std::map<DocRef, IndexedDocument> entries_;
  Thresholds thresholds_;
  std::string stopwords_hash_;
};

/// Throws Error(kConfiguration) when a domain with documents has no
/// threshold, Error(kIndexing) when a document yields no candidates.
TopicIndex build_topic_index(const KnowledgeBase& kb,
                             const Thresholds& thresholds,
                             const Stopwords& stopwords = Stopwords::builtin());

/// `domain \t entity_id \t doc_id \t t1[,t2[,t3]]` lines, sorted.
std::string serialize_index(const TopicIndex& index);
/// Sidecar: `threshold \t domain \t value` lines then `stopwords \t hash`.
std::string serialize_index_meta(const TopicIndex& index);
TopicIndex parse_index(std::string_view index_text, std::string_view meta_text);

/// Writes `path` and `path + ".meta"`.
void save_index(const TopicIndex& index, const std::string& path);
/// Reads `path` and, when present, `path + ".meta"`.
TopicIndex load_index(const std::string& path);

}  // namespace seknow
