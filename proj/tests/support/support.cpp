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

#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <regex>
#include <tuple>

#include "seknow/pipeline.hpp"

namespace seknow::test {

std::string data_path(std::string_view relative) {
  return std::string(SEKNOW_DATA_DIR) + "/" + std::string(relative);
}

const KnowledgeBase& toy_kb() {
  static const KnowledgeBase kb =
      load_knowledge_base(data_path("toy/db.json"), data_path("toy/docs.json"));
  return kb;
}

const TopicIndex& toy_index() {
  static const TopicIndex index = build_topic_index(toy_kb(), default_thresholds());
  return index;
}

const DialogCorpus& toy_corpus() {
  static const DialogCorpus corpus = load_corpus(data_path("toy/corpus.jsonl"));
  return corpus;
}

const SyntheticSet& committed_synthetic() {
  static const SyntheticSet set{
      load_knowledge_base(data_path("synthetic/db.json"), data_path("synthetic/docs.json")),
      load_index(data_path("synthetic/index.tsv")),
      load_corpus(data_path("synthetic/corpus.jsonl"))};
  return set;
}

std::u32string oracle_codepoints(std::string_view text) {
  std::string cleaned;
  bool pending_space = false;
  for (char c : text) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
      pending_space = !cleaned.empty();
      continue;
    }
    if (pending_space) cleaned += ' ';
    pending_space = false;
    cleaned += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
  }
  std::u32string out;
  for (std::size_t i = 0; i < cleaned.size();) {
    const auto b = static_cast<unsigned char>(cleaned[i]);
    int len = b < 0x80 ? 1 : b >= 0xF0 ? 4 : b >= 0xE0 ? 3 : 2;
    char32_t cp = len == 1 ? b : len == 2 ? (b & 0x1F) : len == 3 ? (b & 0x0F) : (b & 0x07);
    for (int k = 1; k < len; ++k) {
      cp = (cp << 6) | (static_cast<unsigned char>(cleaned[i + static_cast<std::size_t>(k)]) & 0x3F);
    }
    out.push_back(cp);
    i += static_cast<std::size_t>(len);
  }
  return out;
}

std::size_t dp_lcs(const std::u32string& a, const std::u32string& b) {
  std::vector<std::vector<std::size_t>> t(a.size() + 1, std::vector<std::size_t>(b.size() + 1, 0));
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      t[i][j] = a[i - 1] == b[j - 1] ? t[i - 1][j - 1] + 1 : std::max(t[i - 1][j], t[i][j - 1]);
    }
  }
  return t[a.size()][b.size()];
}

double dp_similarity(std::string_view a, std::string_view b) {
  const auto x = oracle_codepoints(a);
  const auto y = oracle_codepoints(b);
  if (x.empty() && y.empty()) return 1.0;
  if (x.empty() || y.empty()) return 0.0;
  return 2.0 * static_cast<double>(dp_lcs(x, y)) / static_cast<double>(x.size() + y.size());
}

std::vector<std::string> filter_entities(const Domain& domain, const Constraints& constraints) {
  std::vector<std::string> ids;
  for (const auto& e : domain.entities) {
    bool all = true;
    for (const auto& [slot, value] : constraints) {
      auto it = e.attributes.find(slot);
      if (it == e.attributes.end() || it->second != value) all = false;
    }
    if (all) ids.push_back(e.id);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::string random_token(std::mt19937_64& rng, std::size_t min_len, std::size_t max_len,
                         std::string_view alphabet) {
  const std::size_t len = min_len + uniform_index(rng, max_len - min_len + 1);
  std::string out;
  for (std::size_t i = 0; i < len; ++i) out += alphabet[uniform_index(rng, alphabet.size())];
  return out;
}

std::string random_text(std::mt19937_64& rng, std::size_t max_chars) {
  static const std::vector<std::string> pieces = {
      "a", "b", "c", "d", "e", "g", "h", "o", "u", "z", "A", "B", " ", "  ",
      "\xC3\xA9", "\xC3\xBC", "\xE2\x82\xAC", "\xF0\x9F\x8D\x95", "1", "-"};
  const std::size_t n = uniform_index(rng, max_chars + 1);
  std::string out;
  for (std::size_t i = 0; i < n; ++i) out += pieces[uniform_index(rng, pieces.size())];
  return out;
}

namespace {

constexpr std::string_view kLower = "abcdefghijklmnopqrstuvwxyz";
constexpr std::string_view kValueChars = "abcdefghijklmnopqrstuvwxyz0123456789-':.{}=|,";

std::string random_value_word(std::mt19937_64& rng) {
  for (;;) {
    std::string w = random_token(rng, 1, 8, kValueChars);
    if (w != "{" && w != "}" && w != "," && w != "=" && w != "||") return w;
  }
}

}  // namespace

ExtendedBeliefState random_state(std::mt19937_64& rng) {
  static const std::vector<std::string> domains = {"restaurant", "hotel", "train", "taxi",
                                                   "attraction", "hospital", "police"};
  ExtendedBeliefState s;
  const std::size_t blocks = uniform_index(rng, 4);
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::string& domain = domains[uniform_index(rng, domains.size())];
    const std::size_t slots = 1 + uniform_index(rng, 4);
    for (std::size_t k = 0; k < slots; ++k) {
      std::string slot = random_token(rng, 1, 10, kLower);
      if (uniform_index(rng, 6) == 0) slot = std::string(kRukSlot);
      std::string value;
      const std::size_t words = 1 + uniform_index(rng, 3);
      for (std::size_t w = 0; w < words; ++w) value += (w ? " " : "") + random_value_word(rng);
      s.set(domain, slot, value);
    }
  }
  if (uniform_index(rng, 2) == 0) {
    std::vector<std::string> topic;
    const std::size_t n = 1 + uniform_index(rng, 3);
    for (std::size_t i = 0; i < n; ++i) topic.push_back(random_value_word(rng));
    s.set_topic(topic);
  }
  return s;
}

KnowledgeBase random_kb(std::mt19937_64& rng, std::size_t max_entities) {
  static const std::vector<std::string> names = {"restaurant", "hotel", "attraction"};
  static const std::vector<std::string> slots = {"food", "area", "pricerange", "stars", "type"};
  static const std::vector<std::string> values = {"red", "green", "blue"};
  std::vector<Domain> domains;
  const std::size_t domain_count = 1 + uniform_index(rng, 3);
  std::size_t budget = uniform_index(rng, max_entities + 1);
  for (std::size_t d = 0; d < domain_count; ++d) {
    Domain dom;
    dom.name = names[d];
    dom.slot_schema = {"name"};
    for (const auto& s : slots) {
      if (uniform_index(rng, 4) != 0) dom.slot_schema.insert(s);
    }
    const std::size_t n = d + 1 == domain_count ? budget : uniform_index(rng, budget + 1);
    budget -= n;
    for (std::size_t i = 0; i < n; ++i) {
      Entity e;
      e.id = dom.name.substr(0, 1) + std::to_string(100 + i);
      e.name = random_token(rng, 3, 8, kLower) + " " + std::to_string(i);
      e.bookable = uniform_index(rng, 2) == 0;
      e.attributes["name"] = e.name;
      for (const auto& s : dom.slot_schema) {
        if (s == "name") continue;
        if (uniform_index(rng, 5) != 0) e.attributes[s] = values[uniform_index(rng, values.size())];
      }
      dom.entities.push_back(std::move(e));
    }
    domains.push_back(std::move(dom));
  }
  return KnowledgeBase(std::move(domains));
}

namespace {

std::vector<std::string> regex_tokens(const std::string& text, const Stopwords& stopwords) {
  std::string lower = text;
  for (auto& c : lower) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  static const std::regex word("[a-z0-9]+");
  std::vector<std::string> out;
  for (std::sregex_iterator it(lower.begin(), lower.end(), word), end; it != end; ++it) {
    std::string w = it->str();
    if (w.size() >= 2 && !stopwords.contains(w)) out.push_back(w);
  }
  return out;
}

}  // namespace

// Exhaustive recomputation of the index: counts every term by scanning whole
// token lists, no shared tables.
std::map<DocRef, std::vector<std::string>> brute_force_topics(const KnowledgeBase& kb,
                                                             const Thresholds& thresholds,
                                                             const Stopwords& stopwords) {
  std::map<DocRef, std::vector<std::string>> out;
  for (const auto& [name, domain] : kb.domains()) {
    std::vector<std::pair<DocRef, std::vector<std::string>>> docs;
    for (const auto& e : domain.entities) {
      for (const auto& d : e.documents) {
        auto tokens = regex_tokens(d.title, stopwords);
        auto body = regex_tokens(d.body, stopwords);
        tokens.insert(tokens.end(), body.begin(), body.end());
        docs.push_back({{name, e.id, d.doc_id}, tokens});
      }
    }
    if (docs.empty()) continue;
    const double n = static_cast<double>(docs.size());
    std::vector<std::vector<std::pair<std::string, double>>> cands;
    for (const auto& [ref, tokens] : docs) {
      std::vector<std::tuple<double, std::size_t, std::string>> scored;
      for (std::size_t pos = 0; pos < tokens.size(); ++pos) {
        const std::string& t = tokens[pos];
        if (std::find(tokens.begin(), tokens.begin() + static_cast<std::ptrdiff_t>(pos), t) !=
            tokens.begin() + static_cast<std::ptrdiff_t>(pos)) {
          continue;
        }
        const auto tf = static_cast<double>(std::count(tokens.begin(), tokens.end(), t));
        double df = 0;
        for (const auto& other : docs) {
          if (std::find(other.second.begin(), other.second.end(), t) != other.second.end()) ++df;
        }
        scored.emplace_back(-(tf * std::log(n / df)), pos, t);
      }
      std::sort(scored.begin(), scored.end());
      std::vector<std::pair<std::string, double>> top;
      for (std::size_t i = 0; i < scored.size() && i < 3; ++i) {
        top.emplace_back(std::get<2>(scored[i]), -std::get<0>(scored[i]));
      }
      cands.push_back(top);
    }
    std::map<std::string, double> ca;
    for (const auto& c : cands) {
      for (const auto& [t, s] : c) ca[t] += s;
    }
    const double threshold = thresholds.at(name);
    for (std::size_t i = 0; i < docs.size(); ++i) {
      std::vector<std::string> kept;
      for (const auto& [t, s] : cands[i]) {
        if (ca[t] / static_cast<double>(domain.entities.size()) >= threshold) kept.push_back(t);
      }
      if (kept.empty() && !cands[i].empty()) kept.push_back(cands[i].front().first);
      out[docs[i].first] = kept;
    }
  }
  return out;
}

std::string brute_force_index_file(const KnowledgeBase& kb, const Thresholds& thresholds,
                                   const Stopwords& stopwords) {
  std::string out;
  for (const auto& [ref, topics] : brute_force_topics(kb, thresholds, stopwords)) {
    out += ref.domain + "\t" + ref.entity_id + "\t" + ref.doc_id + "\t";
    for (std::size_t i = 0; i < topics.size(); ++i) out += (i ? "," : "") + topics[i];
    out += "\n";
  }
  return out;
}

}  // namespace seknow::test
