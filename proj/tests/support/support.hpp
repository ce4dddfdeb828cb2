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
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "seknow/belief.hpp"
#include "seknow/corpus.hpp"
#include "seknow/kb.hpp"
#include "seknow/topic_index.hpp"

namespace seknow::test {

std::string data_path(std::string_view relative);

const KnowledgeBase& toy_kb();
const TopicIndex& toy_index();
const DialogCorpus& toy_corpus();

struct SyntheticSet {
  KnowledgeBase kb;
  TopicIndex index;
  DialogCorpus corpus;
};
/// The committed fixture under data/synthetic.
const SyntheticSet& committed_synthetic();

// ---- independent oracles -------------------------------------------------

/// Lowercase ASCII, collapse whitespace, trim, then decode well-formed UTF-8.
std::u32string oracle_codepoints(std::string_view text);
/// Textbook O(n*m) LCS table.
std::size_t dp_lcs(const std::u32string& a, const std::u32string& b);
double dp_similarity(std::string_view a, std::string_view b);

using Constraints = std::vector<std::pair<std::string, std::string>>;
/// Ids of every entity whose attributes equal all constraints, ascending.
std::vector<std::string> filter_entities(const Domain& domain, const Constraints& constraints);

/// Topic words per document recomputed from scratch for ASCII text: regex tokenizer,
/// per-term scans for tf and df, full sort of every document's terms.
std::map<DocRef, std::vector<std::string>> brute_force_topics(const KnowledgeBase& kb,
                                                              const Thresholds& thresholds,
                                                              const Stopwords& stopwords);
/// Same rows and layout as the index file.
std::string brute_force_index_file(const KnowledgeBase& kb, const Thresholds& thresholds,
                                   const Stopwords& stopwords);

// ---- random inputs --------------------------------------------------------

std::string random_token(std::mt19937_64& rng, std::size_t min_len, std::size_t max_len,
                         std::string_view alphabet);
/// Mixed ASCII and multi-byte text, optionally with spaces.
std::string random_text(std::mt19937_64& rng, std::size_t max_chars);
ExtendedBeliefState random_state(std::mt19937_64& rng);
/// A KB with 1 to 3 domains and at most `max_entities` entities overall.
KnowledgeBase random_kb(std::mt19937_64& rng, std::size_t max_entities);

}  // namespace seknow::test
