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

#include "seknow/pipeline.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "seknow/assets.hpp"
#include "seknow/error.hpp"
#include "seknow/text.hpp"

namespace seknow {

void Session::begin_turn(std::string_view user_utterance) {
  history_.utterances.push_back({Speaker::kUser, std::string(user_utterance)});
}

void Session::complete_turn(ExtendedBeliefState belief, std::string response) {
  history_.utterances.push_back({Speaker::kSystem, std::move(response)});
  prev_belief_ = std::move(belief);
  ++turns_;
}

ExtendedBeliefState OraclePredictor::predict(const PredictorInput& input) const {
  if (input.gold == nullptr) {
    throw Error(ErrorKind::kOracle, "turn has no gold belief annotation");
  }
  return *input.gold;
}

namespace {

// Lowercased word-character runs; used for verbatim phrase matching.
std::vector<std::string> words_of(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char raw : text) {
    auto c = static_cast<unsigned char>(raw);
    if (c >= 'A' && c <= 'Z') c = static_cast<unsigned char>(c - 'A' + 'a');
    if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c >= 0x80) {
      cur.push_back(static_cast<char>(c));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

bool matches_at(const std::vector<std::string>& words, std::size_t start,
                const std::vector<std::string>& phrase) {
  if (phrase.empty() || start + phrase.size() > words.size()) return false;
  return std::equal(phrase.begin(), phrase.end(), words.begin() + static_cast<std::ptrdiff_t>(start));
}

std::string last_constrained_domain(const ExtendedBeliefState& state) {
  const auto& blocks = state.blocks();
  for (auto it = blocks.rbegin(); it != blocks.rend(); ++it) {
    if (!it->slots.empty()) return it->domain;
  }
  return {};
}

}  // namespace

HeuristicPredictor::HeuristicPredictor(const KnowledgeBase& kb,
                                       const TopicIndex& index,
                                       const Stopwords& stopwords)
    : kb_(kb), index_(index), stopwords_(stopwords) {
  std::set<std::tuple<std::string, std::string, std::string>> seen;
  for (const auto& [name, domain] : kb.domains()) {
    for (const auto& e : domain.entities) {
      for (const auto& [slot, value] : e.attributes) {
        if (!seen.emplace(name, slot, value).second) continue;
        auto words = words_of(value);
        if (!words.empty()) phrases_.push_back({name, slot, value, std::move(words)});
      }
      if (!index.entity_documents(name, e.id).empty()) {
        auto words = words_of(e.name);
        if (!words.empty()) names_.push_back({name, &e, std::move(words)});
      }
    }
  }
}

const Entity* HeuristicPredictor::focus_entity(const std::vector<std::string>& words,
                                               const ExtendedBeliefState& previous,
                                               const ExtendedBeliefState& state,
                                               std::string* domain) const {
  const NamedEntity* mentioned = nullptr;
  for (const auto& n : names_) {
    if (mentioned && n.words.size() <= mentioned->words.size()) continue;
    for (std::size_t s = 0; s < words.size(); ++s) {
      if (matches_at(words, s, n.words)) {
        mentioned = &n;
        break;
      }
    }
  }
  if (mentioned) {
    *domain = mentioned->domain;
    return mentioned->entity;
  }

  if (auto ruk = previous.ruk(); ruk && kb_.find_domain(ruk->domain)) {
    if (auto m = match_entity(kb_, ruk->domain, ruk->value)) {
      *domain = ruk->domain;
      return m->entity;
    }
  }

  QueryResult query;
  try {
    query = structured_query(kb_, state);
  } catch (const Error&) {
    return nullptr;
  }
  for (auto it = query.per_domain.rbegin(); it != query.per_domain.rend(); ++it) {
    const Domain& d = kb_.domain(it->domain);
    for (const auto& id : it->entity_ids) {
      if (!index_.entity_documents(d.name, id).empty()) {
        *domain = d.name;
        return d.find_entity(id);
      }
    }
  }
  return nullptr;
}

ExtendedBeliefState HeuristicPredictor::predict(const PredictorInput& input) const {
  const std::string_view utterance = input.context.current_user();
  const std::vector<std::string> words = words_of(utterance);
  ExtendedBeliefState state = input.previous.without_extension();

  struct Hit {
    std::size_t start;
    const Phrase* phrase;
  };
  std::vector<Hit> hits;
  std::map<std::string, std::size_t> domain_hits;
  for (const auto& p : phrases_) {
    for (std::size_t s = 0; s < words.size(); ++s) {
      if (matches_at(words, s, p.words)) {
        hits.push_back({s, &p});
        ++domain_hits[p.domain];
      }
    }
  }
  std::set<std::string> mentioned(words.begin(), words.end());
  const std::string prev_active = last_constrained_domain(input.previous);

  auto preference = [&](const Phrase& p) {
    return std::tuple(mentioned.contains(p.domain) ? 0 : 1,
                      -static_cast<long>(domain_hits[p.domain]),
                      p.domain == prev_active ? 0 : 1);
  };
  std::sort(hits.begin(), hits.end(), [&](const Hit& a, const Hit& b) {
    if (a.phrase->words.size() != b.phrase->words.size()) {
      return a.phrase->words.size() > b.phrase->words.size();
    }
    if (a.phrase->value.size() != b.phrase->value.size()) {
      return a.phrase->value.size() > b.phrase->value.size();
    }
    if (a.start != b.start) return a.start < b.start;
    auto pa = preference(*a.phrase);
    auto pb = preference(*b.phrase);
    if (pa != pb) return pa < pb;
    return std::tie(a.phrase->domain, a.phrase->slot) < std::tie(b.phrase->domain, b.phrase->slot);
  });

  std::vector<bool> used(words.size(), false);
  std::vector<Hit> accepted;
  for (const auto& h : hits) {
    const std::size_t end = h.start + h.phrase->words.size();
    if (std::any_of(used.begin() + static_cast<std::ptrdiff_t>(h.start),
                    used.begin() + static_cast<std::ptrdiff_t>(end), [](bool u) { return u; })) {
      continue;
    }
    std::fill(used.begin() + static_cast<std::ptrdiff_t>(h.start),
              used.begin() + static_cast<std::ptrdiff_t>(end), true);
    accepted.push_back(h);
  }
  std::sort(accepted.begin(), accepted.end(),
            [](const Hit& a, const Hit& b) { return a.start < b.start; });
  for (const auto& h : accepted) state.set(h.phrase->domain, h.phrase->slot, h.phrase->value);

  std::string domain;
  const Entity* entity = focus_entity(words, input.previous, state, &domain);
  if (entity == nullptr) return state;

  const std::vector<std::string> tokens = tokenize(utterance, stopwords_);
  const std::set<std::string> token_set(tokens.begin(), tokens.end());
  std::vector<std::string> best;
  for (const auto& [ref, doc] : index_.entity_documents(domain, entity->id)) {
    std::vector<std::string> shared;
    for (const auto& t : doc->topics) {
      if (token_set.contains(t)) shared.push_back(t);
    }
    if (shared.size() > best.size()) best = std::move(shared);
  }
  if (!best.empty()) {
    state.set(domain, kRukSlot, entity->name);
    state.set_topic(std::move(best));
  }
  return state;
}

TemplateSet TemplateSet::parse(std::string_view text) {
  TemplateSet set;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto first = line.find('\t');
    auto second = first == std::string::npos ? first : line.find('\t', first + 1);
    if (second == std::string::npos) {
      throw Error(ErrorKind::kTemplate, "template line " + std::to_string(line_no) +
                                            ": expected domain, condition and text");
    }
    set.entries_[{line.substr(0, first), line.substr(first + 1, second - first - 1)}] =
        line.substr(second + 1);
  }
  return set;
}

const TemplateSet& TemplateSet::builtin() {
  static const TemplateSet set = parse(assets::builtin_templates());
  return set;
}

const std::string* TemplateSet::find(std::string_view domain,
                                     std::string_view condition) const {
  auto it = entries_.find({std::string(domain), std::string(condition)});
  if (it != entries_.end()) return &it->second;
  it = entries_.find({"*", std::string(condition)});
  return it == entries_.end() ? nullptr : &it->second;
}

std::string active_domain(const ExtendedBeliefState& belief,
                          const RetrievedDocument& document) {
  if (document) return document->ref.domain;
  std::string domain = last_constrained_domain(belief);
  if (!domain.empty()) return domain;
  if (auto ruk = belief.ruk()) return ruk->domain;
  return {};
}

namespace {

std::string fill(std::string text, std::string_view key, std::string_view value) {
  const std::string needle = "{" + std::string(key) + "}";
  for (auto pos = text.find(needle); pos != std::string::npos;
       pos = text.find(needle, pos + value.size())) {
    text.replace(pos, needle.size(), value);
  }
  return text;
}

const std::string& require_template(const TemplateSet& templates,
                                    std::string_view domain,
                                    std::string_view condition) {
  const std::string* t = templates.find(domain, condition);
  if (t == nullptr) {
    throw Error(ErrorKind::kTemplate, "no '" + std::string(condition) +
                                          "' template for domain '" + std::string(domain) + "'");
  }
  return *t;
}

}  // namespace

std::string template_generate(const ExtendedBeliefState& belief,
                              const QueryResult& query,
                              const RetrievedDocument& document,
                              const TemplateSet& templates,
                              std::string_view user_utterance,
                              const KnowledgeBase* kb) {
  const std::string domain = active_domain(belief, document);
  if (document) {
    return fill(require_template(templates, domain, "document"), "body", document->body);
  }
  if (domain.empty()) return require_template(templates, domain, "greet");
  const DomainMatch* match = query.find(domain);
  const std::size_t count = match ? match->count() : 0;
  if (count == 0) return require_template(templates, domain, "nomatch");

  std::string out = fill(require_template(templates, domain, "offer"), "count",
                         std::to_string(count));
  const Domain* schema = kb ? kb->find_domain(domain) : nullptr;
  if (schema != nullptr) {
    const auto words = words_of(user_utterance);
    const std::set<std::string> asked(words.begin(), words.end());
    for (const auto& slot : schema->slot_schema) {
      if (slot == "name" || !asked.contains(slot)) continue;
      out += " " + fill(require_template(templates, domain, "request"), "slot", slot);
    }
  }
  return out;
}

std::string TemplateGenerator::generate(const GeneratorInput& input) const {
  return template_generate(input.belief, input.query, input.document, templates_,
                           input.context.current_user(), &kb_);
}

Lexicalized lexicalize(std::string_view delex, const QueryResult& query,
                       const KnowledgeBase& kb) {
  const Entity* entity = nullptr;
  for (auto it = query.per_domain.rbegin(); it != query.per_domain.rend(); ++it) {
    if (it->entity_ids.empty()) continue;
    if (const Domain* d = kb.find_domain(it->domain)) entity = d->find_entity(it->entity_ids.front());
    break;
  }
  Lexicalized out;
  std::size_t pos = 0;
  while (pos < delex.size()) {
    std::size_t open = delex.find('[', pos);
    std::size_t close = open == std::string_view::npos ? open : delex.find(']', open + 1);
    if (close == std::string_view::npos) {
      out.text.append(delex.substr(pos));
      break;
    }
    out.text.append(delex.substr(pos, open - pos));
    const std::string slot(delex.substr(open + 1, close - open - 1));
    const std::string* value = nullptr;
    if (entity != nullptr && !slot.empty()) {
      value = entity->attribute(slot);
      if (value == nullptr && slot == "name") value = &entity->name;
    }
    if (value != nullptr) {
      out.text.append(*value);
    } else {
      out.text.append(delex.substr(open, close - open + 1));
      out.unresolved.push_back(slot);
    }
    pos = close + 1;
  }
  return out;
}

TurnOutput run_turn(Session& session, std::string_view user_utterance,
                    const ExtendedBeliefState* gold,
                    const BeliefPredictor& predictor,
                    const ResponseGenerator& generator, const KnowledgeBase& kb,
                    const TopicIndex& index, const KnowledgeConfig& config) {
  session.begin_turn(user_utterance);
  TurnOutput out;
  try {
    out.belief = predictor.predict({session.history(), session.prev_belief(), gold});
    KnowledgeResult knowledge = knowledge_operation(kb, index, out.belief, config);
    out.query = std::move(knowledge.query);
    out.query_span = format_query_span(out.query);
    out.document = std::move(knowledge.document);
    out.ranking = std::move(knowledge.ranking);
    out.active_domain = active_domain(out.belief, out.document);
    out.delexicalized_response =
        generator.generate({session.history(), out.belief, out.query, out.document});
    Lexicalized lex = lexicalize(out.delexicalized_response, out.query, kb);
    out.lexicalized_response = std::move(lex.text);
    out.unresolved_placeholders = std::move(lex.unresolved);
  } catch (const Error& e) {
    throw Error(e.kind(), "turn " + std::to_string(session.turns() + 1) + ": " + e.what());
  }
  session.complete_turn(out.belief, out.lexicalized_response);
  return out;
}

std::string_view to_string(CorruptionType type) {
  switch (type) {
    case CorruptionType::kNone: return "none";
    case CorruptionType::kReplaceState: return "replace_state";
    case CorruptionType::kReplaceValues: return "replace_values";
    case CorruptionType::kReplaceResponse: return "replace_response";
  }
  return "none";
}

std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
  if (n <= 1) return 0;
  const std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % n;
  std::uint64_t draw = rng();
  while (draw >= limit) draw = rng();
  return draw % n;
}

namespace {

std::string replace_values(const std::string& span, const Ontology& ontology,
                           std::mt19937_64& rng) {
  ExtendedBeliefState original;
  try {
    original = parse_belief_span(span);
  } catch (const ParseError& e) {
    throw Error(ErrorKind::kCorruption, std::string("unparsable belief span: ") + e.what());
  }
  if (original.triples().empty()) {
    throw Error(ErrorKind::kCorruption, "belief span '" + span + "' has no slot values to replace");
  }
  ExtendedBeliefState corrupted;
  for (const auto& t : original.triples()) {
    const std::vector<std::string>* values = ontology.values(t.domain, t.slot);
    std::vector<std::string_view> alternatives;
    if (values != nullptr) {
      for (const auto& v : *values) {
        if (v != t.value) alternatives.push_back(v);
      }
    }
    if (alternatives.empty()) {
      throw Error(ErrorKind::kCorruption,
                  "no alternative value for slot " + t.domain + "-" + t.slot);
    }
    corrupted.set(t.domain, t.slot, alternatives[uniform_index(rng, alternatives.size())]);
  }
  corrupted.set_topic(original.topic());
  return serialize_belief(corrupted);
}

}  // namespace

std::vector<CorruptionSample> corrupt_samples(const std::vector<CorruptionSample>& samples,
                                              std::uint64_t seed,
                                              const Ontology& ontology) {
  const std::size_t n = samples.size();
  if (n < 2) throw Error(ErrorKind::kCorruption, "need at least 2 samples, got " + std::to_string(n));
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  for (std::size_t i = n - 1; i > 0; --i) {
    std::swap(order[i], order[uniform_index(rng, i + 1)]);
  }

  std::vector<CorruptionSample> out = samples;
  for (auto& s : out) {
    s.label = 1;
    s.corruption = CorruptionType::kNone;
  }
  auto other = [&](std::size_t i) {
    std::size_t j = uniform_index(rng, n - 1);
    return j >= i ? j + 1 : j;
  };
  for (std::size_t k = 0; k < n / 2; ++k) {
    const std::size_t i = order[k];
    CorruptionSample& s = out[i];
    s.label = 0;
    switch (uniform_index(rng, 3)) {
      case 0:
        s.corruption = CorruptionType::kReplaceState;
        s.belief_span = samples[other(i)].belief_span;
        break;
      case 1:
        s.corruption = CorruptionType::kReplaceValues;
        s.belief_span = replace_values(samples[i].belief_span, ontology, rng);
        break;
      default:
        s.corruption = CorruptionType::kReplaceResponse;
        s.response = samples[other(i)].response;
        break;
    }
  }
  return out;
}

std::string serialize_samples(const std::vector<CorruptionSample>& samples) {
  std::string out;
  for (const auto& s : samples) {
    nlohmann::ordered_json j;
    j["context"] = s.context;
    j["belief_span"] = s.belief_span;
    j["query_span"] = s.query_span;
    j["document"] = s.document;
    j["response"] = s.response;
    j["label"] = s.label;
    j["corruption"] = std::string(to_string(s.corruption));
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace seknow
