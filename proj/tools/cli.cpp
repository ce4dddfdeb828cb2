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

#include "cli.hpp"

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "seknow/belief.hpp"
#include "seknow/corpus.hpp"
#include "seknow/error.hpp"
#include "seknow/evaluation.hpp"
#include "seknow/kb.hpp"
#include "seknow/knowops.hpp"
#include "seknow/pipeline.hpp"
#include "seknow/text.hpp"
#include "seknow/topic_index.hpp"

namespace seknow::cli {

namespace {

struct Options {
  std::string kb;
  std::string docs;
  std::string index;
  std::string corpus;
  std::string out;
  std::string belief;
  std::string predictor = "heuristic";
  std::vector<std::string> thresholds;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  double floor = kDefaultMatchFloor;
  std::size_t dialogs = 50;
  std::size_t inserted = 1;
  std::size_t restaurants = 20;
  std::size_t hotels = 12;
  std::size_t docs_per_entity = 3;
  bool adversarial = false;
  bool verbose = false;
};

Thresholds thresholds_from(const Options& o) {
  Thresholds t = default_thresholds();
  for (const auto& item : o.thresholds) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == item.size()) {
      throw Error(ErrorKind::kUsage, "--threshold expects domain=value, got '" + item + "'");
    }
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorKind::kUsage, "--threshold value is not a number in '" + item + "'");
    }
    t[normalize(item.substr(0, eq))] = value;
  }
  return t;
}

KnowledgeBase kb_from(const Options& o) { return load_knowledge_base(o.kb, o.docs); }

TopicIndex index_from(const Options& o, const KnowledgeBase& kb, const Stopwords& stopwords) {
  if (!o.index.empty()) return load_index(o.index);
  return build_topic_index(kb, thresholds_from(o), stopwords);
}

void emit(const Options& o, std::ostream& out, const std::string& text) {
  if (o.out.empty()) {
    out << text;
  } else {
    write_file(o.out, text);
  }
}

std::string index_hash(const TopicIndex& index) {
  return fnv1a_hex(serialize_index(index) + serialize_index_meta(index));
}

std::unique_ptr<BeliefPredictor> predictor_from(const Options& o, const KnowledgeBase& kb,
                                                const TopicIndex& index,
                                                const Stopwords& stopwords) {
  if (o.predictor == "oracle") return std::make_unique<OraclePredictor>();
  return std::make_unique<HeuristicPredictor>(kb, index, stopwords);
}

std::string document_label(const RetrievedDocument& doc) {
  return doc ? to_string(doc->ref) : std::string("none");
}

int cmd_build_index(const Options& o, std::ostream& out) {
  const Stopwords stopwords = Stopwords::from_environment();
  const KnowledgeBase kb = kb_from(o);
  const TopicIndex index = build_topic_index(kb, thresholds_from(o), stopwords);
  save_index(index, o.out);
  out << "indexed " << index.entries().size() << " documents into " << o.out << "\n";
  out << "stopwords " << stopwords.hash() << "\n";
  return kOk;
}

int cmd_query(const Options& o, std::ostream& out) {
  const KnowledgeBase kb = kb_from(o);
  const QueryResult result = structured_query(kb, parse_belief_span(o.belief));
  out << format_query_span(result) << "\n";
  if (o.verbose) {
    for (const auto& m : result.per_domain) {
      out << m.domain << ":";
      for (const auto& id : m.entity_ids) out << " " << id;
      out << (m.booking_available ? " (booking available)" : "") << "\n";
    }
  }
  return kOk;
}

int cmd_retrieve(const Options& o, std::ostream& out) {
  const Stopwords stopwords = Stopwords::from_environment();
  const KnowledgeBase kb = kb_from(o);
  const TopicIndex index = index_from(o, kb, stopwords);
  const KnowledgeResult result =
      knowledge_operation(kb, index, parse_belief_span(o.belief), KnowledgeConfig{o.floor});
  for (std::size_t i = 0; i < result.ranking.size(); ++i) {
    const DocRef& ref = result.ranking[i].ref;
    out << (i + 1) << "\t" << format_fixed(result.ranking[i].score, 4) << "\t" << ref.domain
        << "\t" << ref.entity_id << "\t" << ref.doc_id << "\n";
  }
  if (o.verbose) {
    out << "# query " << format_query_span(result.query) << "\n";
    if (result.entity) {
      out << "# entity " << result.entity->entity->id << " "
          << format_fixed(result.entity->score, 4) << "\n";
    }
    out << "# document " << document_label(result.document) << "\n";
  }
  return kOk;
}

int cmd_run(const Options& o, std::ostream& out) {
  const Stopwords stopwords = Stopwords::from_environment();
  const KnowledgeBase kb = kb_from(o);
  const TopicIndex index = index_from(o, kb, stopwords);
  const DialogCorpus corpus = load_corpus(o.corpus);
  const auto predictor = predictor_from(o, kb, index, stopwords);
  const TemplateGenerator generator(TemplateSet::builtin(), kb);
  std::string text;
  for (const auto& dialog : corpus.dialogs) {
    Session session;
    for (std::size_t t = 0; t < dialog.turns.size(); ++t) {
      const DialogTurn& turn = dialog.turns[t];
      TurnOutput result;
      try {
        result = run_turn(session, turn.user, &turn.gold_belief, *predictor, generator, kb, index,
                          KnowledgeConfig{o.floor});
      } catch (const Error& e) {
        throw Error(e.kind(), "dialog '" + dialog.dialog_id + "': " + e.what());
      }
      text += dialog.dialog_id + ":" + std::to_string(t + 1) + "\t" +
              serialize_belief(result.belief) + "\t" + result.query_span + "\t" +
              (result.document ? to_string(result.document->ref) : std::string("-")) + "\t" +
              result.delexicalized_response + "\t" + result.lexicalized_response + "\n";
    }
  }
  emit(o, out, text);
  return kOk;
}

int cmd_corrupt(const Options& o, std::ostream& out, std::ostream& err) {
  const KnowledgeBase kb = kb_from(o);
  const DialogCorpus corpus = load_corpus(o.corpus);
  const auto samples = corrupt_samples(corruption_inputs(corpus, kb), o.seed,
                                       corpus_ontology(corpus, kb));
  std::size_t corrupted = 0;
  for (const auto& s : samples) corrupted += s.label == 0 ? 1 : 0;
  emit(o, out, serialize_samples(samples));
  (o.out.empty() ? err : out) << "samples " << samples.size() << ", corrupted " << corrupted
                              << "\n";
  return kOk;
}

int cmd_eval(const Options& o, std::ostream& out) {
  const Stopwords stopwords = Stopwords::from_environment();
  const KnowledgeBase kb = kb_from(o);
  const TopicIndex index = index_from(o, kb, stopwords);
  const std::string corpus_text = read_file(o.corpus);
  const DialogCorpus corpus = parse_corpus(corpus_text, o.corpus);
  const auto predictor = predictor_from(o, kb, index, stopwords);
  const TemplateGenerator generator(TemplateSet::builtin(), kb);
  EvaluationOptions options;
  options.workers = o.workers;
  options.knowledge.match_floor = o.floor;
  const Evaluation eval = evaluate_corpus(corpus, kb, index, *predictor, generator, options);
  RunMetadata meta;
  meta.predictor = std::string(predictor->name());
  meta.seed = o.seed;
  meta.corpus_hash = fnv1a_hex(corpus_text);
  meta.index_hash = index_hash(index);
  meta.stopwords_hash = stopwords.hash();
  if (!o.out.empty()) write_file(o.out, report_to_json(eval.report, meta));
  out << format_report_table(eval.report);
  return kOk;
}

int cmd_stats(const Options& o, std::ostream& out) {
  const CorpusStats s = corpus_stats(load_corpus(o.corpus));
  out << "dialogs\t" << s.dialogs << "\n"
      << "turns\t" << s.turns << "\n"
      << "mean_turns\t" << format_fixed(s.mean_turns, 2) << "\n"
      << "slot_types\t" << s.slot_types << "\n"
      << "slot_values\t" << s.slot_values << "\n"
      << "annotated_turns\t" << s.annotated_turns << "\n"
      << "annotated_fraction\t" << format_fixed(s.annotated_fraction, 4) << "\n";
  if (!o.kb.empty()) {
    const KnowledgeBase kb = kb_from(o);
    out << "entities\t" << kb.entity_count() << "\n"
        << "documents\t" << kb.document_count() << "\n";
  }
  return kOk;
}

int cmd_chat(const Options& o, std::istream& in, std::ostream& out) {
  const Stopwords stopwords = Stopwords::from_environment();
  const KnowledgeBase kb = kb_from(o);
  const TopicIndex index = index_from(o, kb, stopwords);
  const HeuristicPredictor predictor(kb, index, stopwords);
  const TemplateGenerator generator(TemplateSet::builtin(), kb);
  Session session;
  std::string line;
  out << "> " << std::flush;
  while (std::getline(in, line)) {
    if (normalize(line) == "quit") break;
    if (!normalize(line).empty()) {
      try {
        const TurnOutput turn = run_turn(session, line, nullptr, predictor, generator, kb, index,
                                         KnowledgeConfig{o.floor});
        out << "belief: " << serialize_belief(turn.belief) << "\n"
            << "query: " << turn.query_span << "\n"
            << "document: " << document_label(turn.document) << "\n"
            << "system: " << turn.lexicalized_response << "\n";
      } catch (const Error& e) {
        out << "error: " << to_string(e.kind()) << ": " << e.what() << "\n";
      }
    }
    out << "> " << std::flush;
  }
  out << "\n";
  return kOk;
}

int cmd_synth(const Options& o, std::ostream& out) {
  const Stopwords stopwords = Stopwords::from_environment();
  SyntheticKbSpec kb_spec;
  kb_spec.restaurants = o.restaurants;
  kb_spec.hotels = o.hotels;
  kb_spec.docs_per_entity = o.docs_per_entity;
  const KnowledgeBase kb = generate_synthetic_kb(kb_spec, o.seed);
  const TopicIndex index = build_topic_index(kb, thresholds_from(o), stopwords);
  SyntheticCorpusSpec spec;
  spec.dialogs = o.dialogs;
  spec.inserted_per_dialog = o.inserted;
  spec.adversarial = o.adversarial;
  const DialogCorpus corpus = generate_synthetic_corpus(kb, index, spec, o.seed);

  const std::filesystem::path dir(o.out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + o.out + ": " + ec.message());
  write_file((dir / "db.json").string(), serialize_db(kb));
  write_file((dir / "docs.json").string(), serialize_docs(kb));
  save_index(index, (dir / "index.tsv").string());
  write_file((dir / "corpus.jsonl").string(), serialize_corpus(corpus));
  out << "wrote " << kb.entity_count() << " entities, " << kb.document_count() << " documents, "
      << corpus.dialogs.size() << " dialogs to " << o.out << "\n";
  return kOk;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
             std::ostream& err) {
  Options o;
  CLI::App app{"Semi-structured knowledge dialog toolkit", "seknow"};
  app.require_subcommand(1, 1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  auto kb_opts = [&](CLI::App* sub, bool docs_required) {
    sub->add_option("--kb", o.kb, "Structured records file (JSON)")->required();
    auto* docs = sub->add_option("--docs", o.docs, "Document base file (JSON)");
    if (docs_required) docs->required();
  };
  auto index_opts = [&](CLI::App* sub) {
    sub->add_option("--index", o.index, "Topic index file; built in memory when omitted");
    sub->add_option("--threshold", o.thresholds, "Per-domain CA-TF-IDF threshold, domain=value");
    sub->add_option("--floor", o.floor, "Fuzzy match acceptance floor")
        ->check(CLI::Range(0.0, 1.0));
  };

  auto* build = app.add_subcommand("build-index", "Build the document topic index");
  kb_opts(build, true);
  build->add_option("--out", o.out, "Index output path (sidecar written to <out>.meta)")->required();
  build->add_option("--threshold", o.thresholds, "Per-domain CA-TF-IDF threshold, domain=value");

  auto* query = app.add_subcommand("query", "Run a structured query for a belief span");
  kb_opts(query, false);
  query->add_option("--belief", o.belief, "Belief span")->required();
  query->add_flag("-v,--verbose", o.verbose, "List matched entity ids");

  auto* retrieve = app.add_subcommand("retrieve", "Run the full knowledge operation for a belief span");
  kb_opts(retrieve, true);
  index_opts(retrieve);
  retrieve->add_option("--belief", o.belief, "Belief span")->required();
  retrieve->add_flag("-v,--verbose", o.verbose, "Also print the query span, entity and selection");

  auto predictor_opt = [&](CLI::App* sub) {
    sub->add_option("--predictor", o.predictor, "Belief predictor")
        ->check(CLI::IsMember({"oracle", "heuristic"}));
  };

  auto* run = app.add_subcommand("run", "Run the pipeline over a corpus and print each turn");
  kb_opts(run, true);
  index_opts(run);
  run->add_option("--corpus", o.corpus, "Dialog corpus (JSON lines)")->required();
  run->add_option("--out", o.out, "Output file; standard output when omitted");
  run->add_option("--seed", o.seed, "Random seed (the pipeline itself is deterministic)");
  predictor_opt(run);

  auto* corrupt = app.add_subcommand("corrupt", "Build consistency samples with seeded corruption");
  kb_opts(corrupt, false);
  corrupt->add_option("--corpus", o.corpus, "Dialog corpus (JSON lines)")->required();
  corrupt->add_option("--out", o.out, "Output file; standard output when omitted");
  corrupt->add_option("--seed", o.seed, "Random seed");

  auto* eval = app.add_subcommand("eval", "Evaluate a predictor on a corpus");
  kb_opts(eval, true);
  index_opts(eval);
  eval->add_option("--corpus", o.corpus, "Dialog corpus (JSON lines)")->required();
  eval->add_option("--out", o.out, "Report file (JSON)");
  eval->add_option("--workers", o.workers, "Worker threads")->check(CLI::Range(1, 1024));
  eval->add_option("--seed", o.seed, "Seed recorded in the report");
  predictor_opt(eval);

  auto* stats = app.add_subcommand("stats", "Corpus statistics");
  stats->add_option("--corpus", o.corpus, "Dialog corpus (JSON lines)")->required();
  stats->add_option("--kb", o.kb, "Structured records file, for entity counts");
  stats->add_option("--docs", o.docs, "Document base file, for document counts");

  auto* chat = app.add_subcommand("chat", "Interactive session with the heuristic predictor");
  kb_opts(chat, true);
  index_opts(chat);

  auto* synth = app.add_subcommand("synth", "Generate a synthetic KB, index and corpus");
  synth->add_option("--out", o.out, "Output directory")->required();
  synth->add_option("--seed", o.seed, "Random seed");
  synth->add_option("--dialogs", o.dialogs, "Number of dialogs");
  synth->add_option("--inserted", o.inserted, "Inserted knowledge turns per dialog");
  synth->add_option("--restaurants", o.restaurants, "Restaurant entities");
  synth->add_option("--hotels", o.hotels, "Hotel entities");
  synth->add_option("--docs-per-entity", o.docs_per_entity, "Documents per entity");
  synth->add_option("--threshold", o.thresholds, "Per-domain CA-TF-IDF threshold, domain=value");
  synth->add_flag("--adversarial", o.adversarial, "Refer to some entities only as \"that place\"");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << to_string(ErrorKind::kUsage) << ": " << e.what() << "\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kUsageError;
  }

  try {
    if (build->parsed()) return cmd_build_index(o, out);
    if (query->parsed()) return cmd_query(o, out);
    if (retrieve->parsed()) return cmd_retrieve(o, out);
    if (run->parsed()) return cmd_run(o, out);
    if (corrupt->parsed()) return cmd_corrupt(o, out, err);
    if (eval->parsed()) return cmd_eval(o, out);
    if (stats->parsed()) return cmd_stats(o, out);
    if (chat->parsed()) return cmd_chat(o, in, out);
    if (synth->parsed()) return cmd_synth(o, out);
  } catch (const Error& e) {
    err << "error: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return e.kind() == ErrorKind::kUsage ? kUsageError : kDomainError;
  } catch (const std::exception& e) {
    err << "error: " << to_string(ErrorKind::kIo) << ": " << e.what() << "\n";
    return kDomainError;
  }
  return kUsageError;
}

}  // namespace seknow::cli
