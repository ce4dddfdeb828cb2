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

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "seknow/belief.hpp"
#include "seknow/kb.hpp"
#include "seknow/topic_index.hpp"

namespace seknow {

/// Default acceptance floor for fuzzy entity and document matches.
inline constexpr double kDefaultMatchFloor = 0.6;

struct DomainMatch {
  std::string domain;
  /// Ascending by id.
  std::vector<std::string> entity_ids;
  /// Some matched entity is bookable.
  bool booking_available = false;

  std::size_t count() const { return entity_ids.size(); }
  bool operator==(const DomainMatch&) const = default;
};

/// Exact-match query result, one entry per constrained domain in belief order.
struct QueryResult {
  std::vector<DomainMatch> per_domain;
  /// Some matched entity in any domain is bookable.
  bool booking_available = false;

  const DomainMatch* find(std::string_view domain) const;
  bool operator==(const QueryResult&) const = default;
};

struct DocumentHit {
  DocRef ref;
  std::string body;
  double score = 0.0;

  bool operator==(const DocumentHit&) const = default;
};

/// The selected document, or nullopt for "none".
using RetrievedDocument = std::optional<DocumentHit>;

/// Five one-hot count buckets {0, 1, 2, 3, >=4} followed by a booking bit.
struct QueryVector {
  std::size_t bucket = 0;
  bool booking = false;

  std::array<int, 6> encode() const;
  bool operator==(const QueryVector&) const = default;
};

/// Throws Error(kQuery) for a constraint on a slot outside the domain schema,
/// Error(kDomainNotFound) for an unknown domain.
QueryResult structured_query(const KnowledgeBase& kb,
                             const ExtendedBeliefState& state);

/// "restaurant 2 match , train no match".
std::string format_query_span(const QueryResult& result);

QueryVector map_query_vector(const QueryResult& result,
                             std::string_view active_domain);

/// 2 * LCS / (|a| + |b|) over code points of the normalized strings.
double fuzzy_similarity(std::string_view a, std::string_view b);

struct EntityMatch {
  const Entity* entity = nullptr;
  double score = 0.0;
};

/// Best entity of `domain` by max(sim(value, name), sim(value, id)); ties go
/// to the smaller id. nullopt when the best score is below `floor`.
std::optional<EntityMatch> match_entity(const KnowledgeBase& kb,
                                        std::string_view domain,
                                        std::string_view ruk_value,
                                        double floor = kDefaultMatchFloor);

struct ScoredDocument {
  DocRef ref;
  double score = 0.0;
  bool operator==(const ScoredDocument&) const = default;
};

/// Indexed documents of one entity ranked by topic similarity, best first,
/// ties by doc id. Throws Error(kEmptyTopic) for an empty topic.
std::vector<ScoredDocument> retrieve_document(const TopicIndex& index,
                                              std::string_view domain,
                                              const Entity& entity,
                                              const std::vector<std::string>& topic);

struct KnowledgeConfig {
  double match_floor = kDefaultMatchFloor;
};

struct KnowledgeResult {
  QueryResult query;
  RetrievedDocument document;
  /// Fuzzy-matched entity, when the state asked for unstructured knowledge.
  std::optional<EntityMatch> entity;
  /// Full document ranking for the matched entity (used by retrieval metrics).
  std::vector<ScoredDocument> ranking;
};

/// Structured query plus, when the state carries both a `ruk` triple and a
/// topic, entity matching and document retrieval. The document is none
/// otherwise, or when the best document scores below the floor.
KnowledgeResult knowledge_operation(const KnowledgeBase& kb,
                                    const TopicIndex& index,
                                    const ExtendedBeliefState& state,
                                    const KnowledgeConfig& config = {});

}  // namespace seknow
