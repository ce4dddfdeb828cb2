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

#include "seknow/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "seknow/error.hpp"
#include "seknow/text.hpp"

namespace seknow {

namespace {

std::set<std::string> satisfying_entities(const Domain& domain, const DomainGoal& goal) {
  std::set<std::string> out;
  for (const auto& e : domain.entities) {
    bool ok = true;
    for (const auto& [slot, value] : goal.constraints) {
      const std::string* v = e.attribute(slot);
      if (v == nullptr && slot == "name") v = &e.name;
      if (v == nullptr || *v != value) {
        ok = false;
        break;
      }
    }
    if (ok) out.insert(e.id);
  }
  return out;
}

bool contains(std::string_view text, std::string_view needle) {
  return text.find(needle) != std::string_view::npos;
}

}  // namespace

InformSuccess inform_success(const std::vector<DialogResult>& results,
                             const std::vector<const GoalSpec*>& goals,
                             const KnowledgeBase& kb) {
  if (results.size() != goals.size()) {
    throw Error(ErrorKind::kGoal, std::to_string(goals.size()) + " goals for " +
                                      std::to_string(results.size()) + " dialogs");
  }
  if (results.empty()) return {};
  std::size_t informed = 0, succeeded = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const DialogResult& dialog = results[i];
    bool dialog_inform = true, dialog_success = true;
    for (const auto& [name, goal] : *goals[i]) {
      const Domain* domain = kb.find_domain(name);
      if (domain == nullptr) {
        throw Error(ErrorKind::kGoal,
                    "dialog '" + dialog.dialog_id + "': goal references unknown domain '" + name + "'");
      }
      for (const auto& [slot, value] : goal.constraints) {
        if (!domain->slot_schema.contains(slot)) {
          throw Error(ErrorKind::kGoal, "dialog '" + dialog.dialog_id + "': goal slot '" + slot +
                                            "' is not in the " + name + " schema");
        }
      }
      bool inform = domain->entities.size() <= 1 || goal.constraints.empty();
      if (!inform) {
        const auto wanted = satisfying_entities(*domain, goal);
        for (const auto& turn : dialog.turns) {
          if (!contains(turn.delexicalized_response, "[name]")) continue;
          const DomainMatch* match = turn.query.find(name);
          if (match == nullptr) continue;
          if (std::any_of(match->entity_ids.begin(), match->entity_ids.end(),
                          [&](const std::string& id) { return wanted.contains(id); })) {
            inform = true;
            break;
          }
        }
      }
      bool success = inform;
      for (const auto& slot : goal.requestables) {
        if (!success) break;
        const std::string placeholder = "[" + slot + "]";
        success = std::any_of(dialog.turns.begin(), dialog.turns.end(), [&](const TurnOutput& t) {
          return t.active_domain == name && contains(t.delexicalized_response, placeholder);
        });
      }
      dialog_inform = dialog_inform && inform;
      dialog_success = dialog_success && success;
    }
    if (dialog_inform) ++informed;
    if (dialog_inform && dialog_success) ++succeeded;
  }
  const double n = static_cast<double>(results.size());
  return {100.0 * static_cast<double>(informed) / n, 100.0 * static_cast<double>(succeeded) / n};
}

namespace {

DialogResult run_dialog(const Dialog& dialog, const KnowledgeBase& kb, const TopicIndex& index,
                        const BeliefPredictor& predictor, const ResponseGenerator& generator,
                        const EvaluationOptions& options) {
  DialogResult result;
  result.dialog_id = dialog.dialog_id;
  Session session(options.window);
  for (const auto& turn : dialog.turns) {
    result.turns.push_back(run_turn(session, turn.user, &turn.gold_belief, predictor, generator,
                                    kb, index, options.knowledge));
  }
  return result;
}

}  // namespace

Evaluation evaluate_corpus(const DialogCorpus& corpus, const KnowledgeBase& kb,
                           const TopicIndex& index, const BeliefPredictor& predictor,
                           const ResponseGenerator& generator,
                           const EvaluationOptions& options) {
  const std::size_t n = corpus.dialogs.size();
  if (n == 0) throw Error(ErrorKind::kMetric, "cannot evaluate an empty corpus");
  Evaluation eval;
  eval.results.resize(n);
  std::vector<std::exception_ptr> failures(n);

  auto work = [&](std::size_t i) {
    try {
      eval.results[i] = run_dialog(corpus.dialogs[i], kb, index, predictor, generator, options);
    } catch (...) {
      failures[i] = std::current_exception();
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(options.workers, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) work(i);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!failures[i]) continue;
    const std::string where = "dialog '" + corpus.dialogs[i].dialog_id + "': ";
    try {
      std::rethrow_exception(failures[i]);
    } catch (const Error& e) {
      throw Error(e.kind(), where + e.what());
    } catch (const std::exception& e) {
      throw Error(ErrorKind::kEvaluation, where + e.what());
    }
  }

  MetricsReport& r = eval.report;
  std::vector<Tokens> hyps, refs;
  std::vector<ExtendedBeliefState> preds, golds;
  std::vector<std::optional<std::size_t>> ranks;
  std::size_t goal_hits = 0;
  std::vector<const GoalSpec*> goals;
  for (std::size_t i = 0; i < n; ++i) {
    const Dialog& dialog = corpus.dialogs[i];
    goals.push_back(&dialog.goal);
    for (std::size_t t = 0; t < dialog.turns.size(); ++t) {
      const DialogTurn& gold = dialog.turns[t];
      const TurnOutput& out = eval.results[i].turns[t];
      ++r.turns;
      hyps.push_back(split_whitespace(out.delexicalized_response));
      refs.push_back(split_whitespace(gold.delex_response ? *gold.delex_response : gold.response));
      preds.push_back(out.belief);
      golds.push_back(gold.gold_belief);
      if (gold.doc) {
        ++r.knowledge_turns;
        std::optional<std::size_t> rank;
        for (std::size_t k = 0; k < out.ranking.size(); ++k) {
          if (out.ranking[k].ref == *gold.doc) {
            rank = k + 1;
            break;
          }
        }
        ranks.push_back(rank);
      } else {
        ++r.original_turns;
        if (joint_goal_match(out.belief, gold.gold_belief)) ++goal_hits;
      }
    }
  }
  r.dialogs = n;
  if (r.original_turns > 0) {
    r.joint_goal = 100.0 * static_cast<double>(goal_hits) / static_cast<double>(r.original_turns);
  }
  const InformSuccess is = inform_success(eval.results, goals, kb);
  r.inform = is.inform;
  r.success = is.success;
  if (!hyps.empty()) {
    try {
      r.bleu = bleu(hyps, refs);
      r.rouge_l = rouge_l(hyps, refs);
      r.meteor = meteor(hyps, refs);
    } catch (const Error& e) {
      throw Error(e.kind(), std::string("scoring responses: ") + e.what());
    }
  }
  const RetrievalScores retrieval = retrieval_metrics_from_ranks(ranks);
  r.mrr_at_5 = retrieval.mrr_at_5;
  r.r_at_1 = retrieval.r_at_1;
  r.extended_prf = extended_prf(preds, golds);
  r.combined = combined_internal(r.inform, r.success, r.bleu);
  return eval;
}

namespace {

nlohmann::ordered_json prf_json(const Prf& p) {
  nlohmann::ordered_json j;
  j["precision"] = p.precision;
  j["recall"] = p.recall;
  j["f1"] = p.f1;
  return j;
}

}  // namespace

std::string report_to_json(const MetricsReport& r, const RunMetadata& meta) {
  nlohmann::ordered_json j;
  j["joint_goal"] = r.joint_goal;
  j["inform"] = r.inform;
  j["success"] = r.success;
  j["bleu"] = r.bleu;
  j["meteor_simplified"] = r.meteor;
  j["rouge_l"] = r.rouge_l;
  j["combined"] = r.combined;
  j["mrr_at_5"] = r.mrr_at_5;
  j["r_at_1"] = r.r_at_1;
  j["extended_prf"]["ruk"] = prf_json(r.extended_prf.ruk);
  j["extended_prf"]["topic"] = prf_json(r.extended_prf.topic);
  j["counts"]["dialogs"] = r.dialogs;
  j["counts"]["turns"] = r.turns;
  j["counts"]["original_turns"] = r.original_turns;
  j["counts"]["knowledge_turns"] = r.knowledge_turns;
  j["meta"]["predictor"] = meta.predictor;
  j["meta"]["seed"] = meta.seed;
  j["meta"]["corpus_hash"] = meta.corpus_hash;
  j["meta"]["index_hash"] = meta.index_hash;
  j["meta"]["stopwords_hash"] = meta.stopwords_hash;
  return j.dump(2) + "\n";
}

std::string format_report_table(const MetricsReport& r) {
  std::ostringstream out;
  auto row = [&](std::string_view label, const std::string& value) {
    out << label;
    for (std::size_t i = label.size(); i < 22; ++i) out << ' ';
    out << value << '\n';
  };
  auto pct = [](double v) { return format_fixed(v, 2); };
  row("Joint Goal", pct(r.joint_goal));
  row("Inform", pct(r.inform));
  row("Success", pct(r.success));
  row("BLEU", pct(r.bleu));
  row("METEOR (simplified)", pct(r.meteor));
  row("ROUGE-L", pct(r.rouge_l));
  row("Combined", format_fixed(combined_score(r.inform, r.success, r.bleu), 1));
  row("MRR@5", pct(r.mrr_at_5));
  row("R@1", pct(r.r_at_1));
  row("ruk P/R/F1", format_fixed(r.extended_prf.ruk.precision, 3) + " / " +
                        format_fixed(r.extended_prf.ruk.recall, 3) + " / " +
                        format_fixed(r.extended_prf.ruk.f1, 3));
  row("topic P/R/F1", format_fixed(r.extended_prf.topic.precision, 3) + " / " +
                          format_fixed(r.extended_prf.topic.recall, 3) + " / " +
                          format_fixed(r.extended_prf.topic.f1, 3));
  row("dialogs / turns", std::to_string(r.dialogs) + " / " + std::to_string(r.turns));
  return out.str();
}

}  // namespace seknow
