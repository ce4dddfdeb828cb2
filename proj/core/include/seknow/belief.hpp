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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "seknow/kb.hpp"

namespace seknow {

class TopicIndex;

/// Slot marking a turn that requires unstructured knowledge. Its value names
/// the entity of interest.
inline constexpr std::string_view kRukSlot = "ruk";

struct DsvTriple {
  std::string domain;
  std::string slot;
  std::string value;

  auto operator<=>(const DsvTriple&) const = default;
  bool operator==(const DsvTriple&) const = default;
};

/// Belief state extended with the `ruk` triple and a topic word sequence.
///
/// Triples are grouped by domain in first-mention order. Within a domain,
/// ordinary slots keep their first-mention order and `ruk` always comes last.
/// Setting an existing (domain, slot) overwrites its value in place.
class ExtendedBeliefState {
 public:
  struct SlotValue {
    std::string slot;
    std::string value;
    bool operator==(const SlotValue&) const = default;
  };
  struct DomainBlock {
    std::string domain;
    std::vector<SlotValue> slots;
    std::optional<std::string> ruk;
    bool operator==(const DomainBlock&) const = default;
  };

  /// Normalizes all three parts. Throws Error(kParse) for empty parts, for a
  /// domain or slot containing whitespace, or for a reserved span token.
  void set(std::string_view domain, std::string_view slot, std::string_view value);
  bool erase(std::string_view domain, std::string_view slot);
  const std::string* get(std::string_view domain, std::string_view slot) const;

  void set_topic(std::vector<std::string> topic);
  const std::vector<std::string>& topic() const { return topic_; }

  const std::vector<DomainBlock>& blocks() const { return blocks_; }
  /// Flattened triples in canonical order, `ruk` included.
  std::vector<DsvTriple> triples() const;
  std::vector<DsvTriple> original_triples() const;

  /// First (domain, entity) carried by a `ruk` triple.
  std::optional<DsvTriple> ruk() const;
  void clear_extension();
  /// Copy without any `ruk` triple or topic.
  ExtendedBeliefState without_extension() const;

  bool empty() const { return blocks_.empty() && topic_.empty(); }

  bool operator==(const ExtendedBeliefState&) const = default;

 private:
  std::vector<DomainBlock> blocks_;
  std::vector<std::string> topic_;
};

/// `domain { slot = value , ... } ... || topic words`; empty state is "".
std::string serialize_belief(const ExtendedBeliefState& state);

/// Inverse of serialize_belief. Tolerates repeated whitespace; a repeated
/// (domain, slot) keeps the last value. Throws ParseError with a byte offset.
ExtendedBeliefState parse_belief_span(std::string_view text);

/// Adds (domain, ruk, entity name) and the document's indexed topic words.
/// Any earlier `ruk` triple is replaced. Without an annotation the state is
/// returned unchanged. Throws Error(kLabel) when the document is not indexed
/// or the entity is unknown.
ExtendedBeliefState extend_gold_label(const ExtendedBeliefState& original,
                                      const std::optional<DocRef>& annotation,
                                      const TopicIndex& index,
                                      const KnowledgeBase& kb);

/// Equality of the non-`ruk` triple sets. Topics are ignored.
bool joint_goal_match(const ExtendedBeliefState& pred,
                      const ExtendedBeliefState& gold);

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct ExtendedPrf {
  Prf ruk;
  Prf topic;
};

Prf prf_from_counts(std::size_t correct, std::size_t predicted, std::size_t gold);

/// Turn-level P/R/F1 of the `ruk` triple (domain and value must match) and of
/// the topic (token sets must match). Undefined ratios are reported as 0.
/// Throws Error(kAlignment) on length mismatch.
ExtendedPrf extended_prf(const std::vector<ExtendedBeliefState>& preds,
                         const std::vector<ExtendedBeliefState>& golds);

enum class Speaker { kUser, kSystem };

/// Dialog history ending with the current user utterance.
struct DialogContext {
  struct Utterance {
    Speaker speaker;
    std::string text;
  };
  std::vector<Utterance> utterances;
  /// Number of previous exchanges visible to a predictor; nullopt = all.
  std::optional<std::size_t> window;

  /// The latest user utterance ("" when there is none).
  std::string_view current_user() const;
  /// The system response right before the current user utterance.
  std::string_view previous_response() const;
  /// Utterances inside the window, oldest first.
  std::vector<Utterance> visible() const;
};

}  // namespace seknow
