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

using Tokens = std::vector<std::string>;

/// Corpus BLEU-4: clipped n-gram precisions with uniform weights, standard
/// brevity penalty, no smoothing, scaled to [0, 100].
/// Throws Error(kMetric) for an empty or misaligned corpus.
double bleu(const std::vector<Tokens>& hypotheses, const std::vector<Tokens>& references);

inline constexpr double kRougeBeta = 1.2;

/// Sentence ROUGE-L F-measure in [0, 1]. Throws Error(kMetric) for an empty
/// reference.
double rouge_l_sentence(const Tokens& hypothesis, const Tokens& reference);
/// Mean sentence ROUGE-L, scaled to [0, 100].
double rouge_l(const std::vector<Tokens>& hypotheses, const std::vector<Tokens>& references);

struct MeteorParams {
  double alpha = 0.9;
  double beta = 3.0;
  double gamma = 0.5;
};

/// Suffix-stripping stem used by the second METEOR matching stage.
std::string meteor_stem(std::string_view word);

/// METEOR without a synonym stage: exact then stem unigram alignment,
/// F_mean * (1 - gamma * (chunks / matches)^beta), in [0, 1].
double meteor_sentence(const Tokens& hypothesis, const Tokens& reference,
                       const MeteorParams& params = {});
/// Mean sentence METEOR, scaled to [0, 100].
double meteor(const std::vector<Tokens>& hypotheses, const std::vector<Tokens>& references,
              const MeteorParams& params = {});

struct RetrievalCase {
  /// Ranked documents for the turn; nullopt means the ranking is missing.
  std::optional<std::vector<DocRef>> ranking;
  DocRef gold;
};

struct RetrievalScores {
  double mrr_at_5 = 0.0;
  double r_at_1 = 0.0;
};

/// MRR@5 and R@1 scaled to [0, 100]. Throws Error(kEvaluation) when a case
/// has no ranking.
RetrievalScores retrieval_metrics(const std::vector<RetrievalCase>& cases);
/// Same from 1-based gold ranks; nullopt = gold not retrieved.
RetrievalScores retrieval_metrics_from_ranks(const std::vector<std::optional<std::size_t>>& ranks);

/// (inform + success) * 0.5 + bleu rounded half-up to 4 decimals.
double combined_internal(double inform, double success, double bleu);
/// Same, reported to 1 decimal (rounded half-up from the 4-decimal value).
double combined_score(double inform, double success, double bleu);

/// Mean that does not depend on the order of `values`.
double order_independent_mean(std::vector<double> values);

}  // namespace seknow
