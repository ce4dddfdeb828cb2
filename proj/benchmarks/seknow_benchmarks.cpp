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

#include <benchmark/benchmark.h>

#include <random>
#include <string>

#include "seknow/belief.hpp"
#include "seknow/corpus.hpp"
#include "seknow/evaluation.hpp"
#include "seknow/knowops.hpp"
#include "seknow/pipeline.hpp"
#include "seknow/topic_index.hpp"

namespace {

using namespace seknow;

struct Fixture {
  KnowledgeBase kb;
  TopicIndex index;
  DialogCorpus corpus;
};

const Fixture& fixture() {
  static const Fixture f = [] {
    Fixture out;
    out.kb = generate_synthetic_kb({100, 60, 4}, 1);
    out.index = build_topic_index(out.kb, default_thresholds());
    SyntheticCorpusSpec spec;
    spec.dialogs = 200;
    out.corpus = generate_synthetic_corpus(out.kb, out.index, spec, 1);
    return out;
  }();
  return f;
}

std::string random_string(std::mt19937_64& rng, std::size_t n) {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s.push_back(static_cast<char>('a' + uniform_index(rng, 8)));
  return s;
}

void BM_FuzzySimilarity(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::string a = random_string(rng, n);
  const std::string b = random_string(rng, n);
  for (auto _ : state) benchmark::DoNotOptimize(fuzzy_similarity(a, b));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FuzzySimilarity)->RangeMultiplier(4)->Range(16, 1024)->Complexity();

void BM_BuildTopicIndex(benchmark::State& state) {
  const auto& kb = fixture().kb;
  for (auto _ : state) benchmark::DoNotOptimize(build_topic_index(kb, default_thresholds()));
  state.counters["documents"] = static_cast<double>(kb.document_count());
}
BENCHMARK(BM_BuildTopicIndex)->Unit(benchmark::kMillisecond);

void BM_BeliefRoundTrip(benchmark::State& state) {
  const std::string span =
      "restaurant { food = italian , area = center , pricerange = cheap , ruk = pizza hut } "
      "hotel { area = north , stars = 4 } || vegetarian options";
  for (auto _ : state) benchmark::DoNotOptimize(serialize_belief(parse_belief_span(span)));
}
BENCHMARK(BM_BeliefRoundTrip);

void BM_KnowledgeOperation(benchmark::State& state) {
  const auto& f = fixture();
  const Entity& e = f.kb.domain("hotel").entities.front();
  const auto docs = f.index.entity_documents("hotel", e.id);
  ExtendedBeliefState s;
  s.set("hotel", "area", *e.attribute("area"));
  s.set("hotel", "ruk", e.name);
  s.set_topic(docs.front().second->topics);
  for (auto _ : state) benchmark::DoNotOptimize(knowledge_operation(f.kb, f.index, s));
}
BENCHMARK(BM_KnowledgeOperation);

void BM_EvaluateCorpus(benchmark::State& state) {
  const auto& f = fixture();
  HeuristicPredictor predictor(f.kb, f.index);
  TemplateGenerator generator(TemplateSet::builtin(), f.kb);
  EvaluationOptions options;
  options.workers = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        evaluate_corpus(f.corpus, f.kb, f.index, predictor, generator, options).report.combined);
  }
}
BENCHMARK(BM_EvaluateCorpus)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
