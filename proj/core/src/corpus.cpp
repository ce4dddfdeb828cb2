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

#include "seknow/corpus.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <tuple>
#include <utility>

#include <nlohmann/json.hpp>

#include "seknow/error.hpp"
#include "seknow/knowops.hpp"
#include "seknow/text.hpp"

namespace seknow {

namespace {

using nlohmann::json;

[[noreturn]] void load_fail(std::string_view source, std::size_t line, const std::string& where,
                            const std::string& msg) {
  std::string text = std::string(source) + ":" + std::to_string(line) + ": ";
  if (!where.empty()) text += where + ": ";
  throw Error(ErrorKind::kLoad, text + msg);
}

std::string required_string(const json& obj, const char* key, std::string_view source,
                            std::size_t line, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) load_fail(source, line, where, std::string("missing field '") + key + "'");
  if (!it->is_string()) load_fail(source, line, where, std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

void only_keys(const json& obj, std::initializer_list<std::string_view> allowed,
               std::string_view source, std::size_t line, const std::string& where) {
  for (const auto& item : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      load_fail(source, line, where, "unknown field '" + item.key() + "'");
    }
  }
}

GoalSpec parse_goal(const json& goal, std::string_view source, std::size_t line,
                    const std::string& where) {
  if (!goal.is_object()) load_fail(source, line, where, "goal must be an object");
  GoalSpec out;
  for (const auto& [domain, spec] : goal.items()) {
    const std::string gwhere = where + " goal '" + domain + "'";
    if (!spec.is_object()) load_fail(source, line, gwhere, "must be an object");
    only_keys(spec, {"constraints", "requestables"}, source, line, gwhere);
    DomainGoal g;
    if (auto it = spec.find("constraints"); it != spec.end()) {
      if (!it->is_object()) load_fail(source, line, gwhere, "constraints must be an object");
      for (const auto& [slot, value] : it->items()) {
        if (!value.is_string()) load_fail(source, line, gwhere, "constraint values must be strings");
        g.constraints[normalize(slot)] = normalize(value.get<std::string>());
      }
    }
    if (auto it = spec.find("requestables"); it != spec.end()) {
      if (!it->is_array()) load_fail(source, line, gwhere, "requestables must be an array");
      for (const auto& slot : *it) {
        if (!slot.is_string()) load_fail(source, line, gwhere, "requestables must be strings");
        g.requestables.insert(normalize(slot.get<std::string>()));
      }
    }
    out[normalize(domain)] = std::move(g);
  }
  return out;
}

DialogTurn parse_turn(const json& t, std::string_view source, std::size_t line,
                      const std::string& where) {
  if (!t.is_object()) load_fail(source, line, where, "turn must be an object");
  only_keys(t, {"user", "response", "belief_span", "doc", "delex_response"}, source, line, where);
  DialogTurn turn;
  turn.user = normalize(required_string(t, "user", source, line, where));
  turn.response = normalize(required_string(t, "response", source, line, where));
  const std::string span = required_string(t, "belief_span", source, line, where);
  try {
    turn.gold_belief = parse_belief_span(span);
  } catch (const Error& e) {
    load_fail(source, line, where, std::string("belief span: ") + e.what());
  }
  if (auto it = t.find("doc"); it != t.end() && !it->is_null()) {
    if (!it->is_object()) load_fail(source, line, where, "doc must be an object");
    only_keys(*it, {"domain", "entity_id", "doc_id"}, source, line, where);
    turn.doc = DocRef{normalize(required_string(*it, "domain", source, line, where)),
                      normalize(required_string(*it, "entity_id", source, line, where)),
                      normalize(required_string(*it, "doc_id", source, line, where))};
    auto ruk = turn.gold_belief.ruk();
    if (!ruk || ruk->domain != turn.doc->domain) {
      load_fail(source, line, where,
                "document annotation without a matching ruk triple in the belief span");
    }
  }
  if (auto it = t.find("delex_response"); it != t.end() && !it->is_null()) {
    if (!it->is_string()) load_fail(source, line, where, "delex_response must be a string");
    turn.delex_response = normalize(it->get<std::string>());
  }
  return turn;
}

}  // namespace

DialogCorpus parse_corpus(std::string_view text, std::string_view source) {
  DialogCorpus corpus;
  std::set<std::string> ids;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (normalize(line).empty()) continue;

    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      load_fail(source, line_no, "", std::string("invalid JSON: ") + e.what());
    }
    if (!record.is_object()) load_fail(source, line_no, "", "dialog record must be an object");
    only_keys(record, {"dialog_id", "goal", "turns"}, source, line_no, "");
    Dialog dialog;
    dialog.dialog_id = required_string(record, "dialog_id", source, line_no, "");
    const std::string where = "dialog '" + dialog.dialog_id + "'";
    if (!ids.insert(dialog.dialog_id).second) load_fail(source, line_no, where, "duplicate dialog id");
    if (auto it = record.find("goal"); it != record.end()) {
      dialog.goal = parse_goal(*it, source, line_no, where);
    }
    auto turns = record.find("turns");
    if (turns == record.end() || !turns->is_array()) {
      load_fail(source, line_no, where, "'turns' must be an array");
    }
    for (std::size_t i = 0; i < turns->size(); ++i) {
      dialog.turns.push_back(
          parse_turn((*turns)[i], source, line_no, where + " turn " + std::to_string(i + 1)));
    }
    corpus.dialogs.push_back(std::move(dialog));
  }
  return corpus;
}

DialogCorpus load_corpus(const std::string& path) {
  return parse_corpus(read_file(path), path);
}

std::string serialize_corpus(const DialogCorpus& corpus) {
  std::string out;
  for (const auto& d : corpus.dialogs) {
    nlohmann::ordered_json record;
    record["dialog_id"] = d.dialog_id;
    nlohmann::ordered_json goal = nlohmann::ordered_json::object();
    for (const auto& [domain, g] : d.goal) {
      nlohmann::ordered_json spec;
      spec["constraints"] = nlohmann::ordered_json::object();
      for (const auto& [slot, value] : g.constraints) spec["constraints"][slot] = value;
      spec["requestables"] = nlohmann::ordered_json::array();
      for (const auto& slot : g.requestables) spec["requestables"].push_back(slot);
      goal[domain] = std::move(spec);
    }
    record["goal"] = std::move(goal);
    record["turns"] = nlohmann::ordered_json::array();
    for (const auto& t : d.turns) {
      nlohmann::ordered_json turn;
      turn["user"] = t.user;
      turn["response"] = t.response;
      turn["belief_span"] = serialize_belief(t.gold_belief);
      if (t.doc) {
        turn["doc"] = {{"domain", t.doc->domain},
                       {"entity_id", t.doc->entity_id},
                       {"doc_id", t.doc->doc_id}};
      }
      if (t.delex_response) turn["delex_response"] = *t.delex_response;
      record["turns"].push_back(std::move(turn));
    }
    out += record.dump();
    out += '\n';
  }
  return out;
}

CorpusStats corpus_stats(const DialogCorpus& corpus) {
  CorpusStats stats;
  std::set<std::pair<std::string, std::string>> slots;
  std::set<DsvTriple> values;
  for (const auto& d : corpus.dialogs) {
    ++stats.dialogs;
    for (const auto& t : d.turns) {
      ++stats.turns;
      if (t.doc) ++stats.annotated_turns;
      for (auto& triple : t.gold_belief.original_triples()) {
        slots.emplace(triple.domain, triple.slot);
        values.insert(std::move(triple));
      }
    }
  }
  stats.slot_types = slots.size();
  stats.slot_values = values.size();
  if (stats.dialogs > 0) {
    stats.mean_turns = static_cast<double>(stats.turns) / static_cast<double>(stats.dialogs);
  }
  if (stats.turns > 0) {
    stats.annotated_fraction =
        static_cast<double>(stats.annotated_turns) / static_cast<double>(stats.turns);
  }
  return stats;
}

namespace {

template <typename T>
void shuffle(std::vector<T>& items, std::mt19937_64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[uniform_index(rng, i)]);
  }
}

template <typename T>
const T& pick(const std::vector<T>& items, std::mt19937_64& rng) {
  return items[uniform_index(rng, items.size())];
}

const std::vector<std::string> kNamePrefixes = {
    "golden", "royal",  "little", "blue",  "green", "old",
    "silver", "happy",  "grand",  "lucky", "cosy",  "bright"};
const std::vector<std::string> kRestaurantNouns = {
    "dragon", "garden", "kitchen", "lantern", "table", "oven",
    "spoon",  "bistro", "grill",   "cafe",    "plate", "fork"};
const std::vector<std::string> kHotelNouns = {
    "harbour", "meadow", "bridge", "castle", "willow", "orchard",
    "chapel",  "river",  "maple",  "heath",  "abbey",  "valley"};
const std::vector<std::string> kHotelSuffixes = {"lodge", "inn", "house"};
const std::vector<std::string> kStreets = {"mill", "station", "king", "regent",
                                           "trinity", "market", "church", "park"};
const std::vector<std::string> kAreas = {"center", "north", "south", "east", "west"};
const std::vector<std::string> kPrices = {"cheap", "moderate", "expensive"};
const std::vector<std::string> kFoods = {"italian", "chinese", "indian",
                                         "british", "french",  "thai"};
const std::vector<std::string> kHotelTypes = {"hotel", "guesthouse"};
const std::vector<std::string> kStars = {"2", "3", "4", "5"};
const std::vector<std::string> kYesNo = {"yes", "no"};
const std::vector<std::string> kRestaurantTopics = {
    "vegetarian", "dessert", "delivery", "takeaway", "terrace", "wine", "music", "children"};
const std::vector<std::string> kHotelTopics = {
    "breakfast", "pets", "gym", "laundry", "shuttle", "sauna", "balcony", "minibar"};

std::string digits(std::mt19937_64& rng, std::size_t count) {
  std::string out;
  for (std::size_t i = 0; i < count; ++i) out += static_cast<char>('0' + uniform_index(rng, 10));
  return out;
}

std::string document_body(const std::string& name, const std::string& topic) {
  return name + " and " + topic + " . guests ask whether " + topic + " is offered at " + name +
         " . yes , " + topic + " is offered . we hope you enjoy the " + topic + " .";
}

std::vector<Document> make_documents(const std::string& name,
                                     const std::vector<std::string>& pool, std::size_t count,
                                     std::mt19937_64& rng) {
  std::vector<std::string> topics = pool;
  shuffle(topics, rng);
  std::vector<Document> docs;
  for (std::size_t i = 0; i < count; ++i) {
    docs.push_back({"d" + std::to_string(i + 1), topics[i], document_body(name, topics[i])});
  }
  return docs;
}

std::vector<std::string> name_pool(const std::vector<std::string>& nouns, std::size_t count,
                                   std::mt19937_64& rng, std::string_view what) {
  std::vector<std::string> names;
  for (const auto& p : kNamePrefixes) {
    for (const auto& n : nouns) names.push_back(p + " " + n);
  }
  if (count > names.size()) {
    throw Error(ErrorKind::kGeneration, "at most " + std::to_string(names.size()) + " " +
                                            std::string(what) + " can be generated");
  }
  shuffle(names, rng);
  names.resize(count);
  return names;
}

std::string entity_id(char prefix, std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%c%03zu", prefix, i + 1);
  return buf;
}

}  // namespace

KnowledgeBase generate_synthetic_kb(const SyntheticKbSpec& spec, std::uint64_t seed) {
  if (spec.docs_per_entity > kRestaurantTopics.size() ||
      spec.docs_per_entity > kHotelTopics.size()) {
    throw Error(ErrorKind::kGeneration, "docs_per_entity exceeds the topic pool");
  }
  std::mt19937_64 rng(seed);
  std::vector<Domain> domains;

  Domain restaurant;
  restaurant.name = "restaurant";
  restaurant.slot_schema = {"name", "food", "area", "pricerange", "address", "phone"};
  const auto rnames = name_pool(kRestaurantNouns, spec.restaurants, rng, "restaurants");
  for (std::size_t i = 0; i < rnames.size(); ++i) {
    Entity e;
    e.id = entity_id('r', i);
    e.name = rnames[i];
    e.bookable = uniform_index(rng, 2) == 0;
    e.attributes = {{"name", e.name},
                    {"food", pick(kFoods, rng)},
                    {"area", pick(kAreas, rng)},
                    {"pricerange", pick(kPrices, rng)},
                    {"address", std::to_string(1 + uniform_index(rng, 99)) + " " +
                                    pick(kStreets, rng) + " street"},
                    {"phone", "01223 " + digits(rng, 6)}};
    e.documents = make_documents(e.name, kRestaurantTopics, spec.docs_per_entity, rng);
    restaurant.entities.push_back(std::move(e));
  }
  domains.push_back(std::move(restaurant));

  Domain hotel;
  hotel.name = "hotel";
  hotel.slot_schema = {"name",  "type",    "area",     "pricerange", "stars",
                       "parking", "internet", "address", "phone"};
  auto hnames = name_pool(kHotelNouns, spec.hotels, rng, "hotels");
  for (std::size_t i = 0; i < hnames.size(); ++i) {
    Entity e;
    e.id = entity_id('h', i);
    e.name = hnames[i] + " " + pick(kHotelSuffixes, rng);
    e.bookable = uniform_index(rng, 2) == 0;
    e.attributes = {{"name", e.name},
                    {"type", pick(kHotelTypes, rng)},
                    {"area", pick(kAreas, rng)},
                    {"pricerange", pick(kPrices, rng)},
                    {"stars", pick(kStars, rng)},
                    {"parking", pick(kYesNo, rng)},
                    {"internet", pick(kYesNo, rng)},
                    {"address", std::to_string(1 + uniform_index(rng, 99)) + " " +
                                    pick(kStreets, rng) + " road"},
                    {"phone", "01223 " + digits(rng, 6)}};
    e.documents = make_documents(e.name, kHotelTopics, spec.docs_per_entity, rng);
    hotel.entities.push_back(std::move(e));
  }
  domains.push_back(std::move(hotel));
  return KnowledgeBase(std::move(domains));
}

namespace {

const std::set<std::string, std::less<>> kRequestablePool = {"address", "phone", "postcode"};

bool constrainable(std::string_view slot) {
  return slot != "name" && !kRequestablePool.contains(slot) && slot != "parking" &&
         slot != "internet";
}

struct TurnPlan {
  std::string user;
  ExtendedBeliefState gold;
  std::optional<DocRef> doc;
};

void add_references(DialogTurn& turn, const KnowledgeBase& kb) {
  const QueryResult query = structured_query(kb, turn.gold_belief);
  RetrievedDocument document;
  if (turn.doc) {
    const Entity* e = kb.domain(turn.doc->domain).find_entity(turn.doc->entity_id);
    const Document* d = e ? e->find_document(turn.doc->doc_id) : nullptr;
    if (d == nullptr) throw Error(ErrorKind::kGeneration, "annotated document missing from kb");
    document = DocumentHit{*turn.doc, d->body, 1.0};
  }
  std::string delex = template_generate(turn.gold_belief, query, document,
                                        TemplateSet::builtin(), turn.user, &kb);
  turn.response = lexicalize(delex, query, kb).text;
  turn.delex_response = std::move(delex);
}

}  // namespace

DialogCorpus generate_synthetic_corpus(const KnowledgeBase& kb, const TopicIndex& index,
                                       const SyntheticCorpusSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<DocRef> docs;
  for (const auto& [ref, entry] : index.entries()) {
    const Domain* d = kb.find_domain(ref.domain);
    const Entity* e = d ? d->find_entity(ref.entity_id) : nullptr;
    if (e != nullptr && e->find_document(ref.doc_id) != nullptr) docs.push_back(ref);
  }
  const std::size_t inserted_total = spec.dialogs * spec.inserted_per_dialog;
  if (inserted_total > docs.size()) {
    throw Error(ErrorKind::kGeneration,
                std::to_string(inserted_total) + " inserted turns requested but only " +
                    std::to_string(docs.size()) + " indexed documents exist");
  }
  shuffle(docs, rng);

  std::vector<const Domain*> eligible;
  for (const auto& [name, domain] : kb.domains()) {
    bool has = std::any_of(domain.slot_schema.begin(), domain.slot_schema.end(),
                           [](const std::string& s) { return constrainable(s); });
    if (has && !domain.entities.empty()) eligible.push_back(&domain);
  }
  if (eligible.empty()) throw Error(ErrorKind::kGeneration, "no domain has constrainable slots");

  DialogCorpus corpus;
  std::size_t next_doc = 0;
  for (std::size_t di = 0; di < spec.dialogs; ++di) {
    std::vector<DocRef> inserted(docs.begin() + static_cast<std::ptrdiff_t>(next_doc),
                                 docs.begin() + static_cast<std::ptrdiff_t>(next_doc + spec.inserted_per_dialog));
    next_doc += spec.inserted_per_dialog;

    const Domain* domain = nullptr;
    const Entity* target = nullptr;
    if (!inserted.empty()) {
      const Domain* d = kb.find_domain(inserted.front().domain);
      if (d != nullptr && std::find(eligible.begin(), eligible.end(), d) != eligible.end()) {
        domain = d;
        target = d->find_entity(inserted.front().entity_id);
      }
    }
    if (target == nullptr) {
      domain = pick(eligible, rng);
      target = &domain->entities[uniform_index(rng, domain->entities.size())];
    }

    std::vector<std::string> slots;
    for (const auto& [slot, value] : target->attributes) {
      if (constrainable(slot) && domain->slot_schema.contains(slot)) slots.push_back(slot);
    }
    shuffle(slots, rng);
    if (slots.size() > spec.constraints_per_dialog) slots.resize(spec.constraints_per_dialog);
    std::vector<std::string> requestables;
    if (spec.ask_requestables) {
      for (const auto& slot : kRequestablePool) {
        if (domain->slot_schema.contains(slot) && target->attribute(slot) != nullptr) {
          requestables.push_back(slot);
        }
      }
    }

    Dialog dialog;
    char id[32];
    std::snprintf(id, sizeof id, "syn-%04zu", di + 1);
    dialog.dialog_id = id;
    DomainGoal& goal = dialog.goal[domain->name];

    std::vector<TurnPlan> original;
    ExtendedBeliefState state;
    for (std::size_t k = 0; k < slots.size(); ++k) {
      const std::string& value = *target->attribute(slots[k]);
      state.set(domain->name, slots[k], value);
      goal.constraints[slots[k]] = value;
      std::string user =
          k == 0 ? "i am looking for a " + domain->name + " . the " + slots[k] + " should be " + value + " ."
                 : "i would also like the " + slots[k] + " to be " + value + " .";
      original.push_back({std::move(user), state, std::nullopt});
    }
    if (original.empty()) original.push_back({"i am looking for a " + domain->name + " .", state, std::nullopt});
    if (!requestables.empty()) {
      goal.requestables.insert(requestables.begin(), requestables.end());
      original.push_back({"can you tell me the " + join(requestables, " and ") + " ?", state, std::nullopt});
    }

    // Inserted turns go after a random original turn, never before the first.
    std::vector<std::pair<std::size_t, std::size_t>> slots_after;  // (after original k, inserted i)
    for (std::size_t i = 0; i < inserted.size(); ++i) {
      slots_after.emplace_back(uniform_index(rng, original.size()), i);
    }
    std::stable_sort(slots_after.begin(), slots_after.end());

    std::size_t cursor = 0;
    for (std::size_t k = 0; k < original.size(); ++k) {
      DialogTurn turn;
      turn.user = original[k].user;
      turn.gold_belief = original[k].gold;
      add_references(turn, kb);
      dialog.turns.push_back(std::move(turn));
      while (cursor < slots_after.size() && slots_after[cursor].first == k) {
        const DocRef& ref = inserted[slots_after[cursor].second];
        ++cursor;
        const Entity* owner = kb.domain(ref.domain).find_entity(ref.entity_id);
        const IndexedDocument* entry = index.find(ref);
        const std::string topic = join(entry->topics, " ");
        const bool pronoun = spec.adversarial && uniform_index(rng, 2) == 0 && owner == target;
        DialogTurn extra;
        extra.user = pronoun ? "does that place have " + topic + " ?"
                             : "i have a question about " + owner->name + " . what about the " + topic + " ?";
        extra.doc = ref;
        extra.gold_belief = extend_gold_label(original[k].gold, ref, index, kb);
        add_references(extra, kb);
        dialog.turns.push_back(std::move(extra));
      }
    }
    corpus.dialogs.push_back(std::move(dialog));
  }
  return corpus;
}

std::vector<CorruptionSample> corruption_inputs(const DialogCorpus& corpus,
                                                const KnowledgeBase& kb) {
  std::vector<CorruptionSample> out;
  for (const auto& d : corpus.dialogs) {
    std::string history;
    for (const auto& t : d.turns) {
      if (!history.empty()) history += ' ';
      history += "user : " + t.user;
      if (!t.gold_belief.triples().empty()) {
        CorruptionSample s;
        s.context = history;
        s.belief_span = serialize_belief(t.gold_belief);
        s.query_span = format_query_span(structured_query(kb, t.gold_belief));
        if (t.doc) {
          const Domain* domain = kb.find_domain(t.doc->domain);
          const Entity* e = domain ? domain->find_entity(t.doc->entity_id) : nullptr;
          const Document* doc = e ? e->find_document(t.doc->doc_id) : nullptr;
          if (doc != nullptr) s.document = doc->body;
        }
        s.response = t.response;
        out.push_back(std::move(s));
      }
      history += " system : " + t.response;
    }
  }
  return out;
}

Ontology corpus_ontology(const DialogCorpus& corpus, const KnowledgeBase& kb) {
  Ontology ontology = build_ontology(kb);
  for (const auto& d : corpus.dialogs) {
    for (const auto& t : d.turns) {
      for (const auto& triple : t.gold_belief.triples()) {
        ontology.add(triple.domain, triple.slot, triple.value);
      }
    }
  }
  return ontology;
}

}  // namespace seknow
