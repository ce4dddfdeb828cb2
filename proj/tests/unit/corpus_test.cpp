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

#include <filesystem>

#include "seknow/corpus.hpp"
#include "seknow/error.hpp"
#include "seknow/text.hpp"
#include "support.hpp"

namespace seknow {
namespace {

TEST(LoadCorpus, ToyFixture) {
  const DialogCorpus& c = test::toy_corpus();
  ASSERT_EQ(c.dialogs.size(), 6u);
  EXPECT_EQ(c.dialogs[0].dialog_id, "toy-001");
  const CorpusStats s = corpus_stats(c);
  EXPECT_EQ(s.turns, 15u);
  EXPECT_EQ(s.mean_turns, 2.5);
  EXPECT_EQ(s.annotated_turns, 4u);
  const Dialog& d = c.dialogs[0];
  EXPECT_EQ(d.goal.at("restaurant").constraints.at("food"), "italian");
  EXPECT_EQ(d.goal.at("restaurant").requestables, std::set<std::string>{"phone"});
  ASSERT_TRUE(d.turns[1].doc);
  EXPECT_EQ(*d.turns[1].doc, (DocRef{"restaurant", "r01", "d1"}));
  EXPECT_EQ(d.turns[1].gold_belief.topic(), std::vector<std::string>{"favorite"});
}

std::string toy_line_with_bad_third_span() {
  const std::string text = read_file(test::data_path("toy/corpus.jsonl"));
  std::string line = text.substr(0, text.find('\n'));
  const std::string third = "\"belief_span\": \"restaurant { food = italian , area = center }\", \"delex_response\": \"i found 2 options . [name] is a nice choice . the phone";
  const auto pos = line.find(third);
  EXPECT_NE(pos, std::string::npos);
  line.replace(pos, std::string("\"belief_span\": \"restaurant { food = italian , area = center }\"").size(),
               "\"belief_span\": \"restaurant { food = \"");
  return line + "\n";
}

TEST(LoadCorpus, BadSpanNamesDialogAndTurn) {
  try {
    parse_corpus(toy_line_with_bad_third_span(), "corpus.jsonl");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kLoad);
    const std::string what = e.what();
    EXPECT_NE(what.find("dialog 'toy-001' turn 3"), std::string::npos) << what;
    EXPECT_NE(what.find("corpus.jsonl:1"), std::string::npos) << what;
  }
}

TEST(LoadCorpus, RejectsMalformedRecords) {
  const char* bad[] = {
      "not json\n",
      "{\"dialog_id\": \"x\", \"goal\": {}, \"turns\": [], \"extra\": 1}\n",
      "{\"dialog_id\": \"x\", \"goal\": {}, \"turns\": [{\"user\": \"u\", \"response\": \"r\"}]}\n",
      "{\"dialog_id\": \"x\", \"goal\": {}, \"turns\": [{\"user\": \"u\", \"response\": \"r\", "
      "\"belief_span\": \"hotel { area = north }\", \"doc\": {\"domain\": \"hotel\", "
      "\"entity_id\": \"h01\", \"doc_id\": \"d1\"}}]}\n",
      "{\"dialog_id\": \"x\", \"goal\": {}, \"turns\": []}\n{\"dialog_id\": \"x\", \"goal\": {}, "
      "\"turns\": []}\n",
  };
  for (const char* text : bad) {
    try {
      parse_corpus(text);
      ADD_FAILURE() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kLoad) << text;
    }
  }
}

TEST(LoadCorpus, MissingFileIsIoError) {
  try {
    load_corpus("/nonexistent/corpus.jsonl");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIo);
  }
}

TEST(SerializeCorpus, RoundTrip) {
  const DialogCorpus& toy = test::toy_corpus();
  EXPECT_EQ(parse_corpus(serialize_corpus(toy)), toy);
  const DialogCorpus& synth = test::committed_synthetic().corpus;
  const std::string text = serialize_corpus(synth);
  EXPECT_EQ(parse_corpus(text), synth);
  EXPECT_EQ(text, read_file(test::data_path("synthetic/corpus.jsonl")));
}

TEST(CorpusStats, EmptyCorpusIsAllZero) { EXPECT_EQ(corpus_stats({}), CorpusStats{}); }

TEST(CorpusStats, CountsDistinctSlotsWithoutRuk) {
  DialogCorpus c;
  Dialog d{"d", {}, {}};
  DialogTurn t;
  t.gold_belief = parse_belief_span("hotel { area = north , ruk = acorn guest house } || breakfast");
  d.turns.push_back(t);
  t.gold_belief = parse_belief_span("hotel { area = south } restaurant { area = south }");
  d.turns.push_back(t);
  c.dialogs.push_back(d);
  const CorpusStats s = corpus_stats(c);
  EXPECT_EQ(s.slot_types, 2u);
  EXPECT_EQ(s.slot_values, 3u);
  EXPECT_EQ(s.mean_turns, 2.0);
}

class Synthetic : public ::testing::Test {
 protected:
  const KnowledgeBase kb = generate_synthetic_kb({}, 7);
  const TopicIndex index = build_topic_index(kb, default_thresholds());
};

TEST_F(Synthetic, KbMatchesCommittedFixture) {
  const auto& fixture = test::committed_synthetic();
  EXPECT_EQ(kb, fixture.kb);
  EXPECT_EQ(serialize_index(index), serialize_index(fixture.index));
  EXPECT_TRUE(validate_knowledge_base(kb).ok());
  for (const auto& [ref, doc] : index.entries()) EXPECT_EQ(doc.topics.size(), 1u) << to_string(ref);
}

TEST_F(Synthetic, DeterministicPerSeed) {
  SyntheticCorpusSpec spec;
  const std::string a = serialize_corpus(generate_synthetic_corpus(kb, index, spec, 7));
  const std::string b = serialize_corpus(generate_synthetic_corpus(kb, index, spec, 7));
  EXPECT_EQ(a, b);
  EXPECT_NE(a, serialize_corpus(generate_synthetic_corpus(kb, index, spec, 8)));
  EXPECT_EQ(serialize_db(generate_synthetic_kb({}, 3)), serialize_db(generate_synthetic_kb({}, 3)));
}

TEST_F(Synthetic, NoInsertedTurnsMeansNoRuk) {
  SyntheticCorpusSpec spec;
  spec.inserted_per_dialog = 0;
  for (const auto& d : generate_synthetic_corpus(kb, index, spec, 1).dialogs) {
    for (const auto& t : d.turns) {
      EXPECT_FALSE(t.gold_belief.ruk());
      EXPECT_FALSE(t.doc);
    }
  }
}

TEST_F(Synthetic, TooManyInsertedTurnsIsGenerationError) {
  SyntheticCorpusSpec spec;
  spec.dialogs = 1;
  spec.inserted_per_dialog = kb.document_count() + 1;
  try {
    generate_synthetic_corpus(kb, index, spec, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kGeneration);
  }
}

TEST_F(Synthetic, AnnotationsResolveAndExtendGold) {
  SyntheticCorpusSpec spec;
  spec.dialogs = 30;
  spec.inserted_per_dialog = 2;
  spec.adversarial = true;
  const DialogCorpus c = generate_synthetic_corpus(kb, index, spec, 99);
  std::size_t annotated = 0;
  for (const auto& d : c.dialogs) {
    for (const auto& t : d.turns) {
      if (!t.doc) {
        EXPECT_FALSE(t.gold_belief.ruk());
        continue;
      }
      ++annotated;
      ASSERT_NE(index.find(*t.doc), nullptr);
      const Entity* e = kb.domain(t.doc->domain).find_entity(t.doc->entity_id);
      ASSERT_NE(e, nullptr);
      ASSERT_NE(e->find_document(t.doc->doc_id), nullptr);
      EXPECT_EQ(extend_gold_label(t.gold_belief.without_extension(), t.doc, index, kb),
                t.gold_belief);
    }
    for (const auto& [domain, goal] : d.goal) {
      EXPECT_NE(kb.find_domain(domain), nullptr);
      for (const auto& [slot, _] : goal.constraints) {
        EXPECT_TRUE(kb.domain(domain).slot_schema.contains(slot));
      }
    }
  }
  EXPECT_EQ(annotated, 60u);
  EXPECT_EQ(parse_corpus(serialize_corpus(c)), c);
}

TEST(CorruptionInputs, SkipsEmptyStates) {
  const auto samples = corruption_inputs(test::toy_corpus(), test::toy_kb());
  std::size_t non_empty = 0;
  for (const auto& d : test::toy_corpus().dialogs) {
    for (const auto& t : d.turns) non_empty += t.gold_belief.triples().empty() ? 0 : 1;
  }
  EXPECT_EQ(samples.size(), non_empty);
  for (const auto& s : samples) {
    EXPECT_FALSE(s.belief_span.empty());
    EXPECT_EQ(s.label, 1);
  }
  const Ontology o = corpus_ontology(test::toy_corpus(), test::toy_kb());
  EXPECT_NE(o.values("restaurant", "food"), nullptr);
}

}  // namespace
}  // namespace seknow
