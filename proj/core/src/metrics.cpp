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

#include "seknow/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "seknow/error.hpp"

namespace seknow {

namespace {

void check_aligned(std::size_t hyps, std::size_t refs, std::string_view metric) {
  if (hyps != refs) {
    throw Error(ErrorKind::kMetric, std::string(metric) + ": " + std::to_string(hyps) +
                                        " hypotheses for " + std::to_string(refs) + " references");
  }
  if (hyps == 0) throw Error(ErrorKind::kMetric, std::string(metric) + ": empty corpus");
}

std::map<std::vector<std::string_view>, std::size_t> ngram_counts(const Tokens& tokens,
                                                                  std::size_t n) {
  std::map<std::vector<std::string_view>, std::size_t> counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::vector<std::string_view> gram(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                       tokens.begin() + static_cast<std::ptrdiff_t>(i + n));
    ++counts[gram];
  }
  return counts;
}

std::size_t lcs_tokens(const Tokens& a, const Tokens& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace

double bleu(const std::vector<Tokens>& hypotheses, const std::vector<Tokens>& references) {
  check_aligned(hypotheses.size(), references.size(), "bleu");
  std::size_t matched[4] = {0, 0, 0, 0};
  std::size_t total[4] = {0, 0, 0, 0};
  std::size_t hyp_len = 0, ref_len = 0;
  for (std::size_t k = 0; k < hypotheses.size(); ++k) {
    hyp_len += hypotheses[k].size();
    ref_len += references[k].size();
    for (std::size_t n = 1; n <= 4; ++n) {
      auto hyp = ngram_counts(hypotheses[k], n);
      auto ref = ngram_counts(references[k], n);
      for (const auto& [gram, count] : hyp) {
        total[n - 1] += count;
        auto it = ref.find(gram);
        if (it != ref.end()) matched[n - 1] += std::min(count, it->second);
      }
    }
  }
  double log_sum = 0.0;
  for (std::size_t n = 0; n < 4; ++n) {
    if (total[n] == 0 || matched[n] == 0) return 0.0;
    log_sum += 0.25 * std::log(static_cast<double>(matched[n]) / static_cast<double>(total[n]));
  }
  double bp = hyp_len > ref_len
                  ? 1.0
                  : std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len));
  return 100.0 * bp * std::exp(log_sum);
}

double rouge_l_sentence(const Tokens& hypothesis, const Tokens& reference) {
  if (reference.empty()) throw Error(ErrorKind::kMetric, "rouge-l: empty reference");
  if (hypothesis.empty()) return 0.0;
  const auto lcs = static_cast<double>(lcs_tokens(hypothesis, reference));
  if (lcs == 0.0) return 0.0;
  const double precision = lcs / static_cast<double>(hypothesis.size());
  const double recall = lcs / static_cast<double>(reference.size());
  const double beta2 = kRougeBeta * kRougeBeta;
  return (1.0 + beta2) * precision * recall / (recall + beta2 * precision);
}

double rouge_l(const std::vector<Tokens>& hypotheses, const std::vector<Tokens>& references) {
  check_aligned(hypotheses.size(), references.size(), "rouge-l");
  std::vector<double> scores;
  scores.reserve(hypotheses.size());
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    scores.push_back(rouge_l_sentence(hypotheses[i], references[i]));
  }
  return 100.0 * order_independent_mean(std::move(scores));
}

std::string meteor_stem(std::string_view word) {
  static constexpr std::string_view kSuffixes[] = {"ing", "ed", "es", "s"};
  for (std::string_view suffix : kSuffixes) {
    if (word.size() >= suffix.size() + 3 && word.ends_with(suffix)) {
      return std::string(word.substr(0, word.size() - suffix.size()));
    }
  }
  return std::string(word);
}

double meteor_sentence(const Tokens& hypothesis, const Tokens& reference,
                       const MeteorParams& params) {
  if (reference.empty()) throw Error(ErrorKind::kMetric, "meteor: empty reference");
  std::vector<std::ptrdiff_t> align(hypothesis.size(), -1);
  std::vector<bool> ref_used(reference.size(), false);
  auto stage = [&](auto&& same) {
    for (std::size_t i = 0; i < hypothesis.size(); ++i) {
      if (align[i] >= 0) continue;
      for (std::size_t j = 0; j < reference.size(); ++j) {
        if (!ref_used[j] && same(hypothesis[i], reference[j])) {
          align[i] = static_cast<std::ptrdiff_t>(j);
          ref_used[j] = true;
          break;
        }
      }
    }
  };
  stage([](const std::string& a, const std::string& b) { return a == b; });
  stage([](const std::string& a, const std::string& b) { return meteor_stem(a) == meteor_stem(b); });

  std::size_t matches = 0, chunks = 0;
  std::ptrdiff_t last_ref = -2;
  bool in_chunk = false;
  for (std::size_t i = 0; i < hypothesis.size(); ++i) {
    if (align[i] < 0) {
      in_chunk = false;
      continue;
    }
    ++matches;
    if (!in_chunk || align[i] != last_ref + 1) ++chunks;
    in_chunk = true;
    last_ref = align[i];
  }
  if (matches == 0) return 0.0;
  const double m = static_cast<double>(matches);
  const double precision = m / static_cast<double>(hypothesis.size());
  const double recall = m / static_cast<double>(reference.size());
  const double fmean =
      precision * recall / (params.alpha * precision + (1.0 - params.alpha) * recall);
  const double penalty = params.gamma * std::pow(static_cast<double>(chunks) / m, params.beta);
  return fmean * (1.0 - penalty);
}

double meteor(const std::vector<Tokens>& hypotheses, const std::vector<Tokens>& references,
              const MeteorParams& params) {
  check_aligned(hypotheses.size(), references.size(), "meteor");
  std::vector<double> scores;
  scores.reserve(hypotheses.size());
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    scores.push_back(meteor_sentence(hypotheses[i], references[i], params));
  }
  return 100.0 * order_independent_mean(std::move(scores));
}

RetrievalScores retrieval_metrics(const std::vector<RetrievalCase>& cases) {
  std::vector<std::optional<std::size_t>> ranks;
  ranks.reserve(cases.size());
  for (std::size_t i = 0; i < cases.size(); ++i) {
    if (!cases[i].ranking) {
      throw Error(ErrorKind::kEvaluation, "knowledge turn " + std::to_string(i + 1) +
                                              " has no document ranking");
    }
    const auto& ranking = *cases[i].ranking;
    auto it = std::find(ranking.begin(), ranking.end(), cases[i].gold);
    ranks.push_back(it == ranking.end()
                        ? std::nullopt
                        : std::optional<std::size_t>(static_cast<std::size_t>(it - ranking.begin()) + 1));
  }
  return retrieval_metrics_from_ranks(ranks);
}

RetrievalScores retrieval_metrics_from_ranks(const std::vector<std::optional<std::size_t>>& ranks) {
  if (ranks.empty()) return {};
  std::vector<double> reciprocal;
  std::vector<double> hits_at_1;
  for (const auto& r : ranks) {
    double rr = 0.0;
    if (r && *r >= 1 && *r <= 5) rr = 1.0 / static_cast<double>(*r);
    reciprocal.push_back(rr);
    hits_at_1.push_back(r && *r == 1 ? 1.0 : 0.0);
  }
  // Both means go through the same summation so MRR@5 >= R@1 survives rounding.
  RetrievalScores out;
  out.mrr_at_5 = 100.0 * order_independent_mean(std::move(reciprocal));
  out.r_at_1 = 100.0 * order_independent_mean(std::move(hits_at_1));
  return out;
}

namespace {

// Half-up rounding of a non-negative or negative value at 1e-4 resolution.
long long to_ten_thousandths(double value) { return std::llround(value * 10000.0); }

}  // namespace

double combined_internal(double inform, double success, double bleu) {
  return static_cast<double>(to_ten_thousandths((inform + success) * 0.5 + bleu)) / 10000.0;
}

double combined_score(double inform, double success, double bleu) {
  long long units = to_ten_thousandths((inform + success) * 0.5 + bleu);
  long long tenths = units >= 0 ? (units + 500) / 1000 : -((-units + 500) / 1000);
  return static_cast<double>(tenths) / 10.0;
}

double order_independent_mean(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

}  // namespace seknow
