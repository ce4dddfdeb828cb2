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
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "seknow/belief.hpp"
#include "seknow/kb.hpp"
#include "seknow/knowops.hpp"
#include "seknow/topic_index.hpp"

namespace seknow {

struct TurnOutput {
  ExtendedBeliefState belief;
  QueryResult query;
  std::string query_span;
  RetrievedDocument document;
  /// Ranking of the matched entity's documents; empty for structured turns.
  std::vector<ScoredDocument> ranking;
  std::string active_domain;
  std::string delexicalized_response;
  std::string lexicalized_response;
  std::vector<std::string> unresolved_placeholders;
};

/// Per-dialog state. Single owner: one thread mutates a session at a time.
class Session {
 public:
  explicit Session(std::optional<std::size_t> window = std::nullopt) {
    history_.window = window;
  }

  const DialogContext& history() const { return history_; }
  const ExtendedBeliefState& prev_belief() const { return prev_belief_; }
  std::size_t turns() const { return turns_; }

  /// Appends the user utterance to the history.
  void begin_turn(std::string_view user_utterance);
  /// Records the turn's belief and the system response.
  void complete_turn(ExtendedBeliefState belief, std::string response);

 private:
  DialogContext history_;
  ExtendedBeliefState prev_belief_;
  std::size_t turns_ = 0;
};

/// What a belief predictor sees. `gold` is set only when the caller has an
/// annotation for the turn; only the oracle predictor may read it.
struct PredictorInput {
  const DialogContext& context;
  const ExtendedBeliefState& previous;
  const ExtendedBeliefState* gold = nullptr;
};

class BeliefPredictor {
 public:
  virtual ~BeliefPredictor() = default;
  virtual ExtendedBeliefState predict(const PredictorInput& input) const = 0;
  virtual std::string_view name() const = 0;
};

/// Returns the gold state verbatim; throws Error(kOracle) without one.
class OraclePredictor final : public BeliefPredictor {
 public:
  ExtendedBeliefState predict(const PredictorInput& input) const override;
  std::string_view name() const override { return "oracle"; }
};

/// Deterministic rule-based tracker.
///
/// Starting from the previous state (minus its `ruk` triple and topic), it
/// adds every ontology value found verbatim in the latest user utterance,
/// longest match first. It then picks the entity in focus (a name mentioned in
/// the utterance, else the previous `ruk` entity, else the first structured
/// match) and, when the utterance shares words with the topics of that
/// entity's documents, sets `ruk` to the entity and the topic to the shared
/// words of the best-overlapping document.
class HeuristicPredictor final : public BeliefPredictor {
 public:
  HeuristicPredictor(const KnowledgeBase& kb, const TopicIndex& index,
                     const Stopwords& stopwords = Stopwords::builtin());

  ExtendedBeliefState predict(const PredictorInput& input) const override;
  std::string_view name() const override { return "heuristic"; }

 private:
  struct Phrase {
    std::string domain;
    std::string slot;
    std::string value;
    std::vector<std::string> words;
  };
  struct NamedEntity {
    std::string domain;
    const Entity* entity;
    std::vector<std::string> words;
  };

  const Entity* focus_entity(const std::vector<std::string>& words,
                             const ExtendedBeliefState& previous,
                             const ExtendedBeliefState& state,
                             std::string* domain) const;

  const KnowledgeBase& kb_;
  const TopicIndex& index_;
  const Stopwords& stopwords_;
  std::vector<Phrase> phrases_;
  std::vector<NamedEntity> names_;
};

/// Response templates keyed by (domain, condition); `*` is the fallback domain.
class TemplateSet {
 public:
  /// `domain \t condition \t text` lines; '#' starts a comment line.
  static TemplateSet parse(std::string_view text);
  static const TemplateSet& builtin();

  /// Domain-specific entry, else the `*` entry, else nullptr.
  const std::string* find(std::string_view domain, std::string_view condition) const;

 private:
  std::map<std::pair<std::string, std::string>, std::string> entries_;
};

/// Domain a response should address: the retrieved document's domain, else
/// the most recently mentioned constrained domain, else the `ruk` domain.
std::string active_domain(const ExtendedBeliefState& belief,
                          const RetrievedDocument& document);

/// Delexicalized response: document answer, entity offer (with one request
/// sentence per schema slot named in `user_utterance`), no-match apology, or
/// greeting. Throws Error(kTemplate) when no template covers the case.
std::string template_generate(const ExtendedBeliefState& belief,
                              const QueryResult& query,
                              const RetrievedDocument& document,
                              const TemplateSet& templates,
                              std::string_view user_utterance = {},
                              const KnowledgeBase* kb = nullptr);

struct GeneratorInput {
  const DialogContext& context;
  const ExtendedBeliefState& belief;
  const QueryResult& query;
  const RetrievedDocument& document;
};

class ResponseGenerator {
 public:
  virtual ~ResponseGenerator() = default;
  virtual std::string generate(const GeneratorInput& input) const = 0;
};

class TemplateGenerator final : public ResponseGenerator {
 public:
  TemplateGenerator(TemplateSet templates, const KnowledgeBase& kb)
      : templates_(std::move(templates)), kb_(kb) {}
  std::string generate(const GeneratorInput& input) const override;

 private:
  TemplateSet templates_;
  const KnowledgeBase& kb_;
};

struct Lexicalized {
  std::string text;
  std::vector<std::string> unresolved;
};

/// Replaces `[slot]` with the first matched entity's value, using the last
/// domain of `query` that has matches. Unresolvable placeholders stay.
Lexicalized lexicalize(std::string_view delex, const QueryResult& query,
                       const KnowledgeBase& kb);

/// One turn: predict, operate on knowledge, generate, lexicalize, then update
/// the session. `gold` is forwarded to the predictor only. Failures are
/// rethrown with the turn number attached.
TurnOutput run_turn(Session& session, std::string_view user_utterance,
                    const ExtendedBeliefState* gold,
                    const BeliefPredictor& predictor,
                    const ResponseGenerator& generator, const KnowledgeBase& kb,
                    const TopicIndex& index, const KnowledgeConfig& config = {});

enum class CorruptionType { kNone, kReplaceState, kReplaceValues, kReplaceResponse };

std::string_view to_string(CorruptionType type);

struct CorruptionSample {
  std::string context;
  std::string belief_span;
  std::string query_span;
  std::string document;
  std::string response;
  /// 1 consistent, 0 corrupted.
  int label = 1;
  CorruptionType corruption = CorruptionType::kNone;

  bool operator==(const CorruptionSample&) const = default;
};

/// Uniform integer in [0, n) from a 64-bit Mersenne Twister, by rejection.
/// Unlike std::uniform_int_distribution the sequence is the same on every
/// standard library.
std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n);

/// Corrupts exactly floor(n/2) samples chosen by a seeded shuffle. Each gets
/// one of three corruptions with equal probability: the belief span replaced
/// by another sample's, every slot value replaced by a different ontology
/// value, or the response replaced by another sample's.
/// Throws Error(kCorruption) for n < 2 or a slot without an alternative value.
std::vector<CorruptionSample> corrupt_samples(const std::vector<CorruptionSample>& samples,
                                              std::uint64_t seed,
                                              const Ontology& ontology);

/// JSON lines, one sample per line.
std::string serialize_samples(const std::vector<CorruptionSample>& samples);

}  // namespace seknow
