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
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "seknow/belief.hpp"
#include "seknow/kb.hpp"
#include "seknow/pipeline.hpp"
#include "seknow/topic_index.hpp"

namespace seknow {

/// User goal for one domain of a dialog.
struct DomainGoal {
  std::map<std::string, std::string> constraints;
  std::set<std::string> requestables;

  bool operator==(const DomainGoal&) const = default;
};

using GoalSpec = std::map<std::string, DomainGoal>;

struct DialogTurn {
  std::string user;
  std::string response;
  /// Gold state, already extended on knowledge-seeking turns.
  ExtendedBeliefState gold_belief;
  std::optional<DocRef> doc;
  std::optional<std::string> delex_response;

  bool operator==(const DialogTurn&) const = default;
};

struct Dialog {
  std::string dialog_id;
  GoalSpec goal;
  std::vector<DialogTurn> turns;

  bool operator==(const Dialog&) const = default;
};

struct DialogCorpus {
  std::vector<Dialog> dialogs;

  bool operator==(const DialogCorpus&) const = default;
};

/// One JSON object per line. Throws Error(kLoad) naming the dialog and the
/// 1-based turn for malformed records or unparsable belief spans.
DialogCorpus parse_corpus(std::string_view text, std::string_view source = "<corpus>");
DialogCorpus load_corpus(const std::string& path);
std::string serialize_corpus(const DialogCorpus& corpus);

struct CorpusStats {
  std::size_t dialogs = 0;
  std::size_t turns = 0;
  double mean_turns = 0.0;
  /// Distinct (domain, slot) pairs in gold states, `ruk` excluded.
  std::size_t slot_types = 0;
  /// Distinct (domain, slot, value) triples in gold states, `ruk` excluded.
  std::size_t slot_values = 0;
  std::size_t annotated_turns = 0;
  double annotated_fraction = 0.0;

  bool operator==(const CorpusStats&) const = default;
};

CorpusStats corpus_stats(const DialogCorpus& corpus);

struct SyntheticKbSpec {
  std::size_t restaurants = 20;
  std::size_t hotels = 12;
  /// Documents per entity, each on a different topic word.
  std::size_t docs_per_entity = 3;
};

/// Restaurant and hotel records with templated documents. Topic words repeat
/// inside their own document so that the default thresholds keep them.
KnowledgeBase generate_synthetic_kb(const SyntheticKbSpec& spec, std::uint64_t seed);

struct SyntheticCorpusSpec {
  std::size_t dialogs = 10;
  std::size_t inserted_per_dialog = 1;
  std::size_t constraints_per_dialog = 2;
  bool ask_requestables = true;
  /// Half of the inserted questions refer to the entity only as "that place".
  bool adversarial = false;
};

/// Dialogs with constraint turns, an optional request turn and inserted
/// document questions, plus aligned goals. Throws Error(kGeneration) when the
/// spec asks for more inserted turns than there are indexed documents.
DialogCorpus generate_synthetic_corpus(const KnowledgeBase& kb, const TopicIndex& index,
                                       const SyntheticCorpusSpec& spec, std::uint64_t seed);

/// Consistency samples from gold annotations: history, gold span, the query
/// span of the gold state, the annotated document body and the response.
/// Turns with an empty gold state are skipped.
std::vector<CorruptionSample> corruption_inputs(const DialogCorpus& corpus,
                                                const KnowledgeBase& kb);

/// KB ontology plus every value seen in the corpus gold states.
Ontology corpus_ontology(const DialogCorpus& corpus, const KnowledgeBase& kb);

}  // namespace seknow
