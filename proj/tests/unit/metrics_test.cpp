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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "seknow/error.hpp"
#include "seknow/metrics.hpp"
#include "seknow/pipeline.hpp"
#include "seknow/text.hpp"

namespace seknow {
namespace {

Tokens toks(std::string_view s) { return split_whitespace(s); }

std::vector<Tokens> corpus(std::initializer_list<std::string_view> lines) {
  std::vector<Tokens> out;
  for (auto l : lines) out.push_back(toks(l));
  return out;
}

void expect_metric_error(const std::function<void()>& f) {
  try {
    f();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kMetric);
  }
}

TEST(Bleu, Identity) {
  const auto c = corpus({"the cat sat on the mat", "i would like a cheap hotel please"});
  EXPECT_EQ(bleu(c, c), 100.0);
}

TEST(Bleu, NoFourGramOverlapIsZero) {
  EXPECT_EQ(bleu(corpus({"a b c d e"}), corpus({"a b c x e"})), 0.0);
}

TEST(Bleu, HandCountedThreePairs) {
  const auto hyps = corpus({"the cat sat on the mat", "a dog ran", "hello there"});
  const auto refs = corpus({"the cat sat on the mat", "a dog ran fast", "hello world"});
  // Matches / totals per order: 10/11, 7/8, 5/5, 3/3. Lengths 11 vs 12.
  const double bp = std::exp(1.0 - 12.0 / 11.0);
  const double expected =
      100.0 * bp * std::exp((std::log(10.0 / 11.0) + std::log(7.0 / 8.0)) / 4.0);
  EXPECT_NEAR(bleu(hyps, refs), expected, 1e-9);
}

TEST(Bleu, ClipsRepeatedNgrams) {
  // Unigram "the" is clipped to 2; no bigram beyond "the the" in reference.
  const auto hyps = corpus({"the the the the the the the"});
  const auto refs = corpus({"the the cat sat on a mat"});
  EXPECT_EQ(bleu(hyps, refs), 0.0);
}

TEST(Bleu, Errors) {
  expect_metric_error([] { bleu({}, {}); });
  expect_metric_error([] { bleu(corpus({"a"}), {}); });
}

TEST(RougeL, Examples) {
  EXPECT_EQ(rouge_l(corpus({"a b c"}), corpus({"a b c"})), 100.0);
  EXPECT_EQ(rouge_l(corpus({"a b c"}), corpus({"x y z"})), 0.0);
  // LCS 2 of 3 on both sides; equal P and R give F = 2/3 for any beta.
  EXPECT_NEAR(rouge_l_sentence(toks("the cat sat"), toks("the cat ran")), 2.0 / 3.0, 1e-12);
  const double p = 2.0 / 4.0, r = 2.0 / 3.0, b2 = kRougeBeta * kRougeBeta;
  EXPECT_NEAR(rouge_l_sentence(toks("the cat sat down"), toks("the big cat")),
              (1 + b2) * p * r / (r + b2 * p), 1e-12);
  expect_metric_error([] { rouge_l_sentence(toks("a"), {}); });
  EXPECT_EQ(rouge_l_sentence({}, toks("a")), 0.0);
}

TEST(Meteor, IdentityFollowsChunkPenalty) {
  const Tokens s = toks("the cat sat on the mat");
  EXPECT_NEAR(meteor_sentence(s, s), 1.0 - 0.5 * std::pow(1.0 / 6.0, 3.0), 1e-12);
  EXPECT_NEAR(meteor({s}, {s}), 100.0 * (1.0 - 0.5 / 216.0), 1e-9);
}

TEST(Meteor, SwappedWordsMakeThreeChunks) {
  // All 3 unigrams match, P = R = 1, chunks = 3 so the penalty is gamma.
  EXPECT_NEAR(meteor_sentence(toks("the sat cat"), toks("the cat sat")), 0.5, 1e-12);
}

TEST(Meteor, StemStageAndPartialMatch) {
  // "dogs" meets "dog" through the stem stage: 2 matches, one chunk.
  const double p = 2.0 / 3.0, r = 2.0 / 2.0;
  const double fmean = p * r / (0.9 * p + 0.1 * r);
  EXPECT_NEAR(meteor_sentence(toks("big dogs bark"), toks("big dog")),
              fmean * (1.0 - 0.5 * std::pow(1.0 / 2.0, 3.0)), 1e-12);
  EXPECT_EQ(meteor_sentence(toks("a b"), toks("c d")), 0.0);
  expect_metric_error([] { meteor_sentence(toks("a"), {}); });
}

TEST(Meteor, Stemmer) {
  EXPECT_EQ(meteor_stem("dogs"), "dog");
  EXPECT_EQ(meteor_stem("boxes"), "box");
  EXPECT_EQ(meteor_stem("played"), "play");
  EXPECT_EQ(meteor_stem("running"), "runn");
  EXPECT_EQ(meteor_stem("is"), "is");
  EXPECT_EQ(meteor_stem("bus"), "bus");
}

TEST(Retrieval, RankExamples) {
  const auto s = retrieval_metrics_from_ranks({1, 2, 5, std::nullopt});
  EXPECT_EQ(s.mrr_at_5, 42.5);
  EXPECT_EQ(s.r_at_1, 25.0);
  const auto first = retrieval_metrics_from_ranks({1, 1, 1});
  EXPECT_EQ(first.mrr_at_5, 100.0);
  EXPECT_EQ(first.r_at_1, 100.0);
  EXPECT_EQ(retrieval_metrics_from_ranks({6, 7}).mrr_at_5, 0.0);
}

TEST(Retrieval, CasesUseRankingPosition) {
  const DocRef a{"hotel", "h1", "a"}, b{"hotel", "h1", "b"};
  const auto s = retrieval_metrics({{std::vector<DocRef>{b, a}, a}, {std::vector<DocRef>{a}, a},
                                    {std::vector<DocRef>{}, a}, {std::vector<DocRef>{b}, a}});
  EXPECT_EQ(s.mrr_at_5, 100.0 * 1.5 / 4.0);
  EXPECT_EQ(s.r_at_1, 25.0);
  try {
    retrieval_metrics({{std::nullopt, a}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kEvaluation);
  }
}

TEST(Retrieval, MrrNeverBelowRecallAtOne) {
  std::mt19937_64 rng(47);
  for (int i = 0; i < 500; ++i) {
    std::vector<std::optional<std::size_t>> ranks;
    const std::size_t n = 1 + uniform_index(rng, 20);
    for (std::size_t k = 0; k < n; ++k) {
      const auto r = uniform_index(rng, 9);
      ranks.push_back(r == 0 ? std::nullopt : std::optional<std::size_t>(r));
    }
    const auto s = retrieval_metrics_from_ranks(ranks);
    EXPECT_GE(s.mrr_at_5, s.r_at_1);
  }
}

TEST(Combined, ReferenceRows) {
  EXPECT_EQ(combined_score(93.6, 71.9, 17.3), 100.1);
  EXPECT_EQ(combined_score(82.9, 68.7, 19.0), 94.8);
  EXPECT_EQ(combined_score(0, 0, 0), 0.0);
  EXPECT_EQ(combined_internal(93.6, 71.9, 17.3), 100.05);
}

TEST(Combined, LinearInBleu) {
  std::mt19937_64 rng(53);
  for (int i = 0; i < 1000; ++i) {
    const double inform = static_cast<double>(uniform_index(rng, 1001)) / 10.0;
    const double success = static_cast<double>(uniform_index(rng, 1001)) / 10.0;
    const double b = static_cast<double>(uniform_index(rng, 10001)) / 100.0;
    EXPECT_NEAR(combined_internal(inform, success, 2 * b) - combined_internal(inform, success, b), b,
                1e-9);
  }
}

TEST(OrderIndependentMean, BitIdenticalUnderPermutation) {
  std::mt19937_64 rng(59);
  std::vector<double> v;
  for (int i = 0; i < 200; ++i) v.push_back(std::ldexp(static_cast<double>(rng() >> 11), -40));
  const double m = order_independent_mean(v);
  for (int i = 0; i < 20; ++i) {
    std::shuffle(v.begin(), v.end(), rng);
    EXPECT_EQ(order_independent_mean(v), m);
  }
  EXPECT_EQ(order_independent_mean({}), 0.0);
}

}  // namespace
}  // namespace seknow
