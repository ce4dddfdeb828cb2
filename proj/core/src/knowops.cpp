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

#include "seknow/knowops.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <unordered_map>

#include "seknow/error.hpp"
#include "seknow/text.hpp"

namespace seknow {

const DomainMatch* QueryResult::find(std::string_view domain) const {
  for (const auto& m : per_domain) {
    if (m.domain == domain) return &m;
  }
  return nullptr;
}

std::array<int, 6> QueryVector::encode() const {
  std::array<int, 6> v{};
  v[std::min<std::size_t>(bucket, 4)] = 1;
  v[5] = booking ? 1 : 0;
  return v;
}

QueryResult structured_query(const KnowledgeBase& kb,
                             const ExtendedBeliefState& state) {
  QueryResult result;
  for (const auto& block : state.blocks()) {
    if (block.slots.empty()) continue;
    const Domain& domain = kb.domain(block.domain);
    for (const auto& c : block.slots) {
      if (!domain.slot_schema.contains(c.slot)) {
        throw Error(ErrorKind::kQuery, "slot '" + c.slot + "' is not in the schema of domain '" +
                                           domain.name + "'");
      }
    }
    DomainMatch match{domain.name, {}, false};
    for (const auto& e : domain.entities) {
      bool ok = std::all_of(block.slots.begin(), block.slots.end(), [&](const auto& c) {
        const std::string* v = e.attribute(c.slot);
        return v != nullptr && *v == c.value;
      });
      if (!ok) continue;
      match.entity_ids.push_back(e.id);
      match.booking_available = match.booking_available || e.bookable;
    }
    result.booking_available = result.booking_available || match.booking_available;
    result.per_domain.push_back(std::move(match));
  }
  return result;
}

std::string format_query_span(const QueryResult& result) {
  std::vector<std::string> parts;
  for (const auto& m : result.per_domain) {
    parts.push_back(m.count() == 0 ? m.domain + " no match"
                                   : m.domain + " " + std::to_string(m.count()) + " match");
  }
  return join(parts, " , ");
}

QueryVector map_query_vector(const QueryResult& result,
                             std::string_view active_domain) {
  QueryVector v;
  if (const DomainMatch* m = result.find(active_domain)) {
    v.bucket = std::min<std::size_t>(m->count(), 4);
    v.booking = m->booking_available;
  }
  return v;
}

namespace {

// Bit-parallel LCS length (Allison-Dix / Hyyro): one bit per code point of
// the shorter string, one pass over the longer one.
std::size_t lcs_length(const std::u32string& a, const std::u32string& b) {
  const std::u32string& pattern = a.size() <= b.size() ? a : b;
  const std::u32string& text = a.size() <= b.size() ? b : a;
  const std::size_t m = pattern.size();
  if (m == 0) return 0;
  const std::size_t words = (m + 63) / 64;

  std::unordered_map<char32_t, std::vector<std::uint64_t>> match_masks;
  for (std::size_t i = 0; i < m; ++i) {
    auto& mask = match_masks[pattern[i]];
    if (mask.empty()) mask.assign(words, 0);
    mask[i / 64] |= std::uint64_t{1} << (i % 64);
  }

  std::vector<std::uint64_t> v(words, ~std::uint64_t{0});
  for (char32_t c : text) {
    auto it = match_masks.find(c);
    if (it == match_masks.end()) continue;
    const auto& mask = it->second;
    std::uint64_t carry = 0;
    for (std::size_t w = 0; w < words; ++w) {
      std::uint64_t u = v[w] & mask[w];
      std::uint64_t sum = v[w] + u;
      std::uint64_t carry_out = sum < v[w] ? 1 : 0;
      sum += carry;
      carry_out |= (sum < carry) ? 1 : 0;
      carry = carry_out;
      v[w] = sum | (v[w] & ~mask[w]);
    }
  }

  std::size_t zeros = 0;
  for (std::size_t w = 0; w < words; ++w) {
    std::uint64_t bits = ~v[w];
    if (w == words - 1 && m % 64 != 0) bits &= (std::uint64_t{1} << (m % 64)) - 1;
    zeros += static_cast<std::size_t>(std::popcount(bits));
  }
  return zeros;
}

}  // namespace

double fuzzy_similarity(std::string_view a, std::string_view b) {
  const std::u32string x = decode_utf8(normalize(a));
  const std::u32string y = decode_utf8(normalize(b));
  if (x.empty() && y.empty()) return 1.0;
  if (x.empty() || y.empty()) return 0.0;
  const auto lcs = static_cast<double>(lcs_length(x, y));
  return 2.0 * lcs / static_cast<double>(x.size() + y.size());
}

std::optional<EntityMatch> match_entity(const KnowledgeBase& kb,
                                        std::string_view domain,
                                        std::string_view ruk_value,
                                        double floor) {
  const Domain& d = kb.domain(domain);
  std::optional<EntityMatch> best;
  for (const auto& e : d.entities) {
    double score = std::max(fuzzy_similarity(ruk_value, e.name),
                            fuzzy_similarity(ruk_value, e.id));
    if (!best || score > best->score) best = EntityMatch{&e, score};
  }
  if (!best || best->score < floor) return std::nullopt;
  return best;
}

std::vector<ScoredDocument> retrieve_document(const TopicIndex& index,
                                              std::string_view domain,
                                              const Entity& entity,
                                              const std::vector<std::string>& topic) {
  if (topic.empty()) {
    throw Error(ErrorKind::kEmptyTopic, "document retrieval needs a topic");
  }
  const std::string query = join(topic, " ");
  std::vector<ScoredDocument> ranked;
  for (const auto& [ref, doc] : index.entity_documents(domain, entity.id)) {
    ranked.push_back({*ref, fuzzy_similarity(query, join(doc->topics, " "))});
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const ScoredDocument& x, const ScoredDocument& y) {
                     return x.score > y.score;
                   });
  return ranked;
}

KnowledgeResult knowledge_operation(const KnowledgeBase& kb,
                                    const TopicIndex& index,
                                    const ExtendedBeliefState& state,
                                    const KnowledgeConfig& config) {
  KnowledgeResult out;
  out.query = structured_query(kb, state);
  auto ruk = state.ruk();
  if (!ruk || state.topic().empty()) return out;
  out.entity = match_entity(kb, ruk->domain, ruk->value, config.match_floor);
  if (!out.entity) return out;
  out.ranking = retrieve_document(index, ruk->domain, *out.entity->entity, state.topic());
  if (out.ranking.empty() || out.ranking.front().score < config.match_floor) return out;
  const ScoredDocument& top = out.ranking.front();
  const Document* doc = out.entity->entity->find_document(top.ref.doc_id);
  out.document = DocumentHit{top.ref, doc ? doc->body : std::string(), top.score};
  return out;
}

}  // namespace seknow
