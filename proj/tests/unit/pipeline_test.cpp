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

#include <cmath>

#include "seknow/error.hpp"
#include "seknow/pipeline.hpp"
#include "support.hpp"

namespace seknow {
namespace {

ExtendedBeliefState span(std::string_view text) { return parse_belief_span(text); }

class ItalianRestaurantDialog : public ::testing::Test {
 protected:
  const KnowledgeBase& kb = test::toy_kb();
  const TopicIndex& index = test::toy_index();
  OraclePredictor oracle;
  TemplateGenerator generator{TemplateSet::builtin(), test::toy_kb()};
};

TEST_F(ItalianRestaurantDialog, OracleTurns) {
  Session session;
  const auto g1 = span("restaurant { food = italian , area = center }");
  const TurnOutput t1 = run_turn(session, "i want an italian restaurant in the center .", &g1,
                                 oracle, generator, kb, index);
  EXPECT_EQ(t1.belief, g1);
  EXPECT_NE(t1.query_span.find("restaurant 2 match"), std::string::npos);
  EXPECT_EQ(t1.query_span, format_query_span(t1.query));
  EXPECT_FALSE(t1.document);
  EXPECT_EQ(t1.delexicalized_response, "i found 2 options . [name] is a nice choice .");
  EXPECT_EQ(t1.lexicalized_response, "i found 2 options . pizza hut is a nice choice .");
  EXPECT_EQ(session.prev_belief(), g1);

  const auto g2 = span("restaurant { food = italian , area = center , ruk = pizza hut } || favorite");
  const TurnOutput t2 = run_turn(session, "what is the favorite food of customers at pizza hut ?",
                                 &g2, oracle, generator, kb, index);
  ASSERT_TRUE(t2.document);
  EXPECT_EQ(t2.document->ref, (DocRef{"restaurant", "r01", "d1"}));
  EXPECT_EQ(t2.delexicalized_response, "according to our information : " + t2.document->body);
  EXPECT_EQ(t2.ranking.size(), 2u);
  EXPECT_EQ(session.turns(), 2u);
  EXPECT_EQ(session.history().utterances.size(), 4u);
  EXPECT_EQ(session.history().previous_response(), t1.lexicalized_response);
}

TEST_F(ItalianRestaurantDialog, EmptyUtteranceIsPassedThrough) {
  struct Recording final : BeliefPredictor {
    mutable std::string seen = "unset";
    ExtendedBeliefState predict(const PredictorInput& in) const override {
      seen = std::string(in.context.current_user());
      return in.previous;
    }
    std::string_view name() const override { return "recording"; }
  } recording;
  Session session;
  const TurnOutput out = run_turn(session, "", nullptr, recording, generator, kb, index);
  EXPECT_EQ(recording.seen, "");
  EXPECT_EQ(out.delexicalized_response, "how can i help you ?");
}

TEST_F(ItalianRestaurantDialog, PredictorErrorCarriesTurnNumber) {
  Session session;
  const auto g = span("restaurant { food = italian }");
  run_turn(session, "italian please", &g, oracle, generator, kb, index);
  try {
    run_turn(session, "anything", nullptr, oracle, generator, kb, index);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kOracle);
    EXPECT_EQ(std::string(e.what()).rfind("turn 2: ", 0), 0u) << e.what();
  }
}

TEST(OraclePredictor, ReturnsGoldVerbatim) {
  OraclePredictor oracle;
  DialogContext ctx;
  ExtendedBeliefState prev;
  for (const char* text : {"restaurant { food = italian }",
                           "restaurant { food = italian , ruk = pizza hut } || favorite"}) {
    const auto gold = span(text);
    EXPECT_EQ(oracle.predict({ctx, prev, &gold}), gold);
  }
  EXPECT_THROW(oracle.predict({ctx, prev, nullptr}), Error);
}

class Heuristic : public ::testing::Test {
 protected:
  ExtendedBeliefState predict(std::string_view utterance, const ExtendedBeliefState& previous) {
    DialogContext ctx;
    ctx.utterances.push_back({Speaker::kUser, std::string(utterance)});
    return predictor.predict({ctx, previous, nullptr});
  }
  HeuristicPredictor predictor{test::toy_kb(), test::toy_index()};
};

TEST_F(Heuristic, AddsVerbatimOntologyValues) {
  const auto s = predict("looking for italian food in the center", {});
  ASSERT_NE(s.get("restaurant", "food"), nullptr);
  EXPECT_EQ(*s.get("restaurant", "food"), "italian");
  ASSERT_NE(s.get("restaurant", "area"), nullptr);
  EXPECT_EQ(*s.get("restaurant", "area"), "center");
  EXPECT_FALSE(s.ruk());
}

TEST_F(Heuristic, TopicOverlapSetsRuk) {
  const auto s = predict("do they serve breakfast ?", span("hotel { area = north }"));
  ASSERT_TRUE(s.ruk());
  EXPECT_EQ(s.ruk()->domain, "hotel");
  EXPECT_EQ(s.ruk()->value, "acorn guest house");
  EXPECT_EQ(s.topic(), std::vector<std::string>{"breakfast"});
}

TEST_F(Heuristic, NamedEntityWins) {
  const auto s = predict("what is the favorite at pizza hut ?", span("restaurant { food = chinese }"));
  ASSERT_TRUE(s.ruk());
  EXPECT_EQ(s.ruk()->value, "pizza hut");
  EXPECT_EQ(s.topic(), std::vector<std::string>{"favorite"});
}

TEST_F(Heuristic, NoHitsReturnsPreviousUnchanged) {
  const auto prev = span("hotel { area = north }");
  EXPECT_EQ(predict("thank you very much", prev), prev);
  EXPECT_EQ(predict("", {}), ExtendedBeliefState{});
}

TEST_F(Heuristic, DropsPreviousExtension) {
  const auto prev = span("hotel { area = north , ruk = acorn guest house } || breakfast");
  EXPECT_EQ(predict("thanks", prev), prev.without_extension());
}

TEST(Templates, BuiltinConditions) {
  const auto& t = TemplateSet::builtin();
  const auto& kb = test::toy_kb();
  const auto two = span("restaurant { food = italian , area = center }");
  EXPECT_EQ(template_generate(two, structured_query(kb, two), std::nullopt, t),
            "i found 2 options . [name] is a nice choice .");
  const auto none = span("restaurant { food = italian , area = north }");
  EXPECT_EQ(template_generate(none, structured_query(kb, none), std::nullopt, t),
            "sorry , no match found .");
  const DocumentHit hit{{"restaurant", "r01", "d1"}, "yes , it is .", 1.0};
  EXPECT_EQ(template_generate(two, structured_query(kb, two), hit, t),
            "according to our information : yes , it is .");
  EXPECT_EQ(template_generate({}, {}, std::nullopt, t), "how can i help you ?");
}

TEST(Templates, RequestSentences) {
  const auto& kb = test::toy_kb();
  const auto two = span("restaurant { food = italian , area = center }");
  EXPECT_EQ(template_generate(two, structured_query(kb, two), std::nullopt, TemplateSet::builtin(),
                              "what is the phone number and address ?", &kb),
            "i found 2 options . [name] is a nice choice . the address is [address] . "
            "the phone is [phone] .");
}

TEST(Templates, MissingTemplateIsError) {
  const TemplateSet only_greet = TemplateSet::parse("*\tgreet\thello .\n");
  const auto& kb = test::toy_kb();
  const auto two = span("restaurant { food = italian }");
  try {
    template_generate(two, structured_query(kb, two), std::nullopt, only_greet);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kTemplate);
  }
  EXPECT_THROW(TemplateSet::parse("*\toffer\n"), Error);
}

TEST(Templates, DomainRowOverridesWildcard) {
  const TemplateSet t = TemplateSet::parse("# c\n*\tnomatch\tnone .\nhotel\tnomatch\tno hotel .\n");
  EXPECT_EQ(*t.find("hotel", "nomatch"), "no hotel .");
  EXPECT_EQ(*t.find("taxi", "nomatch"), "none .");
  EXPECT_EQ(t.find("taxi", "offer"), nullptr);
}

TEST(ActiveDomain, Precedence) {
  const auto s = span("hotel { area = north } restaurant { food = thai , ruk = pizza hut }");
  EXPECT_EQ(active_domain(s, std::nullopt), "restaurant");
  const DocumentHit hit{{"hotel", "h01", "d1"}, "", 1.0};
  EXPECT_EQ(active_domain(s, hit), "hotel");
  EXPECT_EQ(active_domain(span("taxi { ruk = city cabs }"), std::nullopt), "taxi");
  EXPECT_EQ(active_domain({}, std::nullopt), "");
}

TEST(Lexicalize, Examples) {
  const auto& kb = test::toy_kb();
  const auto q = structured_query(kb, span("hotel { area = north }"));
  const auto one = lexicalize("[name] is nice", q, kb);
  EXPECT_EQ(one.text, "acorn guest house is nice");
  EXPECT_TRUE(one.unresolved.empty());

  const auto two = lexicalize("[name] is at [address] .", q, kb);
  EXPECT_EQ(two.text, "acorn guest house is at 154 chesterton road .");

  const auto zero = lexicalize("[name] is nice", structured_query(kb, span("hotel { area = west }")), kb);
  EXPECT_EQ(zero.text, "[name] is nice");
  EXPECT_EQ(zero.unresolved, std::vector<std::string>{"name"});

  const auto missing = lexicalize("call [fax]", q, kb);
  EXPECT_EQ(missing.text, "call [fax]");
  EXPECT_EQ(missing.unresolved, std::vector<std::string>{"fax"});
}

std::vector<CorruptionSample> italian_samples(std::size_t n) {
  std::vector<CorruptionSample> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({"ctx " + std::to_string(i), "restaurant { food = italian }", "restaurant 2 match",
                   "", "response " + std::to_string(i), 1, CorruptionType::kNone});
  }
  return out;
}

Ontology italian_chinese() {
  Ontology o;
  o.add("restaurant", "food", "italian");
  o.add("restaurant", "food", "chinese");
  return o;
}

TEST(Corruption, ExactlyHalf) {
  for (std::uint64_t seed : {0u, 1u, 99u}) {
    const auto out = corrupt_samples(italian_samples(10), seed, italian_chinese());
    ASSERT_EQ(out.size(), 10u);
    EXPECT_EQ(std::count_if(out.begin(), out.end(), [](const auto& s) { return s.label == 0; }), 5);
    for (const auto& s : out) {
      EXPECT_EQ(s.label == 1, s.corruption == CorruptionType::kNone);
    }
  }
  const auto odd = corrupt_samples(italian_samples(11), 4, italian_chinese());
  EXPECT_EQ(std::count_if(odd.begin(), odd.end(), [](const auto& s) { return s.label == 0; }), 5);
}

TEST(Corruption, ValueReplacementUsesOnlyAlternative) {
  const auto samples = italian_samples(40);
  const auto out = corrupt_samples(samples, 7, italian_chinese());
  int seen = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].corruption != CorruptionType::kReplaceValues) continue;
    EXPECT_EQ(out[i].belief_span, "restaurant { food = chinese }");
    EXPECT_NE(out[i].belief_span, samples[i].belief_span);
    ++seen;
  }
  EXPECT_GT(seen, 0);
}

TEST(Corruption, DeterministicPerSeed) {
  const auto samples = italian_samples(50);
  EXPECT_EQ(serialize_samples(corrupt_samples(samples, 5, italian_chinese())),
            serialize_samples(corrupt_samples(samples, 5, italian_chinese())));
  EXPECT_NE(serialize_samples(corrupt_samples(samples, 5, italian_chinese())),
            serialize_samples(corrupt_samples(samples, 6, italian_chinese())));
}

TEST(Corruption, Errors) {
  Ontology lonely;
  lonely.add("restaurant", "food", "italian");
  try {
    // Large enough that some sample draws the value replacement.
    corrupt_samples(italian_samples(60), 1, lonely);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kCorruption);
    EXPECT_NE(std::string(e.what()).find("restaurant-food"), std::string::npos);
  }
  EXPECT_THROW(corrupt_samples(italian_samples(1), 1, italian_chinese()), Error);
}

TEST(Corruption, TypeFrequenciesWithinThreeSigma) {
  const auto out = corrupt_samples(italian_samples(3000), 13, italian_chinese());
  std::map<CorruptionType, int> counts;
  for (const auto& s : out) ++counts[s.corruption];
  const double n = 1500.0;
  const double sigma = std::sqrt(n * (1.0 / 3.0) * (2.0 / 3.0));
  for (auto type : {CorruptionType::kReplaceState, CorruptionType::kReplaceValues,
                    CorruptionType::kReplaceResponse}) {
    EXPECT_LE(std::abs(counts[type] - n / 3.0), 3.0 * sigma) << to_string(type);
  }
}

TEST(UniformIndex, InRangeAndStable) {
  std::mt19937_64 rng(1);
  for (std::uint64_t n = 1; n < 200; ++n) EXPECT_LT(uniform_index(rng, n), n);
  std::mt19937_64 a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(uniform_index(a, 7), uniform_index(b, 7));
  EXPECT_EQ(uniform_index(a, 0), 0u);
}

}  // namespace
}  // namespace seknow
