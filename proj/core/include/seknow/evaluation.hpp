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
#include <optional>
#include <string>
#include <vector>

#include "seknow/belief.hpp"
#include "seknow/corpus.hpp"
#include "seknow/kb.hpp"
#include "seknow/knowops.hpp"
#include "seknow/metrics.hpp"
#include "seknow/pipeline.hpp"
#include "seknow/topic_index.hpp"

namespace seknow {

/// All rates are percentages. `combined` keeps 4 decimals.
struct MetricsReport {
  double joint_goal = 0.0;
  double inform = 0.0;
  double success = 0.0;
  double bleu = 0.0;
  double meteor = 0.0;
  double rouge_l = 0.0;
  double combined = 0.0;
  double mrr_at_5 = 0.0;
  double r_at_1 = 0.0;
  ExtendedPrf extended_prf;

  std::size_t dialogs = 0;
  std::size_t turns = 0;
  std::size_t original_turns = 0;
  std::size_t knowledge_turns = 0;
};

struct DialogResult {
  std::string dialog_id;
  std::vector<TurnOutput> turns;
};

struct InformSuccess {
  double inform = 0.0;
  double success = 0.0;
};

/// Dialog-level Inform and Success rates.
///
/// A goal domain is informed when it needs no offer (at most one entity in
/// the KB, or no constraints) or when some turn's delexicalized response
/// carries `[name]` while that turn's matches for the domain include an
/// entity satisfying every goal constraint. A dialog succeeds when it is
/// informed and every requested slot's placeholder appears in a response
/// whose active domain is the goal domain.
/// Throws Error(kGoal) for unknown domains or slots outside the schema.
InformSuccess inform_success(const std::vector<DialogResult>& results,
                             const std::vector<const GoalSpec*>& goals,
                             const KnowledgeBase& kb);

struct EvaluationOptions {
  std::size_t workers = 1;
  KnowledgeConfig knowledge;
  std::optional<std::size_t> window;
};

struct Evaluation {
  MetricsReport report;
  std::vector<DialogResult> results;
};

/// Runs every dialog through the pipeline and scores the outputs. Dialogs are
/// independent, so they are spread over `options.workers` threads; the
/// aggregate does not depend on the worker count.
Evaluation evaluate_corpus(const DialogCorpus& corpus, const KnowledgeBase& kb,
                           const TopicIndex& index, const BeliefPredictor& predictor,
                           const ResponseGenerator& generator,
                           const EvaluationOptions& options = {});

struct RunMetadata {
  std::string predictor;
  std::uint64_t seed = 0;
  std::string corpus_hash;
  std::string index_hash;
  std::string stopwords_hash;
};

/// Structured report, keys in a fixed order, trailing newline.
std::string report_to_json(const MetricsReport& report, const RunMetadata& meta);
/// Human-readable two-column table.
std::string format_report_table(const MetricsReport& report);

}  // namespace seknow
