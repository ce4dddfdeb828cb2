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

#include "seknow/belief.hpp"

#include <algorithm>
#include <array>
#include <set>

#include "seknow/error.hpp"
#include "seknow/text.hpp"
#include "seknow/topic_index.hpp"

namespace seknow {

namespace {

constexpr std::array<std::string_view, 5> kReserved = {"{", "}", ",", "=", "||"};

bool is_reserved(std::string_view token) {
  return std::find(kReserved.begin(), kReserved.end(), token) != kReserved.end();
}

void check_atom(std::string_view what, const std::string& text) {
  if (text.empty()) throw Error(ErrorKind::kParse, std::string(what) + " is empty");
  if (text.find(' ') != std::string::npos) {
    throw Error(ErrorKind::kParse, std::string(what) + " '" + text + "' contains whitespace");
  }
  if (is_reserved(text)) {
    throw Error(ErrorKind::kParse, std::string(what) + " '" + text + "' is a reserved token");
  }
}

}  // namespace

void ExtendedBeliefState::set(std::string_view domain, std::string_view slot,
                              std::string_view value) {
  std::string d = normalize(domain);
  std::string s = normalize(slot);
  std::string v = normalize(value);
  check_atom("domain", d);
  check_atom("slot", s);
  if (v.empty()) throw Error(ErrorKind::kParse, "value of " + d + "-" + s + " is empty");
  for (const auto& tok : split_whitespace(v)) {
    if (is_reserved(tok)) {
      throw Error(ErrorKind::kParse, "value '" + v + "' contains reserved token '" + tok + "'");
    }
  }
  auto block = std::find_if(blocks_.begin(), blocks_.end(),
                            [&](const DomainBlock& b) { return b.domain == d; });
  if (block == blocks_.end()) {
    blocks_.push_back({d, {}, std::nullopt});
    block = std::prev(blocks_.end());
  }
  if (s == kRukSlot) {
    block->ruk = std::move(v);
    return;
  }
  for (auto& sv : block->slots) {
    if (sv.slot == s) {
      sv.value = std::move(v);
      return;
    }
  }
  block->slots.push_back({std::move(s), std::move(v)});
}

bool ExtendedBeliefState::erase(std::string_view domain, std::string_view slot) {
  auto block = std::find_if(blocks_.begin(), blocks_.end(),
                            [&](const DomainBlock& b) { return b.domain == domain; });
  if (block == blocks_.end()) return false;
  bool removed = false;
  if (slot == kRukSlot) {
    removed = block->ruk.has_value();
    block->ruk.reset();
  } else {
    auto it = std::find_if(block->slots.begin(), block->slots.end(),
                           [&](const SlotValue& sv) { return sv.slot == slot; });
    if (it != block->slots.end()) {
      block->slots.erase(it);
      removed = true;
    }
  }
  if (block->slots.empty() && !block->ruk) blocks_.erase(block);
  return removed;
}

const std::string* ExtendedBeliefState::get(std::string_view domain,
                                            std::string_view slot) const {
  for (const auto& b : blocks_) {
    if (b.domain != domain) continue;
    if (slot == kRukSlot) return b.ruk ? &*b.ruk : nullptr;
    for (const auto& sv : b.slots) {
      if (sv.slot == slot) return &sv.value;
    }
  }
  return nullptr;
}

void ExtendedBeliefState::set_topic(std::vector<std::string> topic) {
  std::vector<std::string> words;
  for (const auto& t : topic) {
    for (auto& w : split_whitespace(normalize(t))) {
      check_atom("topic word", w);
      words.push_back(std::move(w));
    }
  }
  topic_ = std::move(words);
}

std::vector<DsvTriple> ExtendedBeliefState::triples() const {
  std::vector<DsvTriple> out;
  for (const auto& b : blocks_) {
    for (const auto& sv : b.slots) out.push_back({b.domain, sv.slot, sv.value});
    if (b.ruk) out.push_back({b.domain, std::string(kRukSlot), *b.ruk});
  }
  return out;
}

std::vector<DsvTriple> ExtendedBeliefState::original_triples() const {
  std::vector<DsvTriple> out;
  for (const auto& b : blocks_) {
    for (const auto& sv : b.slots) out.push_back({b.domain, sv.slot, sv.value});
  }
  return out;
}

std::optional<DsvTriple> ExtendedBeliefState::ruk() const {
  for (const auto& b : blocks_) {
    if (b.ruk) return DsvTriple{b.domain, std::string(kRukSlot), *b.ruk};
  }
  return std::nullopt;
}

void ExtendedBeliefState::clear_extension() {
  for (auto& b : blocks_) b.ruk.reset();
  std::erase_if(blocks_, [](const DomainBlock& b) { return b.slots.empty(); });
  topic_.clear();
}

ExtendedBeliefState ExtendedBeliefState::without_extension() const {
  ExtendedBeliefState copy = *this;
  copy.clear_extension();
  return copy;
}

std::string serialize_belief(const ExtendedBeliefState& state) {
  std::vector<std::string> parts;
  for (const auto& b : state.blocks()) {
    std::vector<std::string> pairs;
    for (const auto& sv : b.slots) pairs.push_back(sv.slot + " = " + sv.value);
    if (b.ruk) pairs.push_back(std::string(kRukSlot) + " = " + *b.ruk);
    parts.push_back(b.domain + " { " + join(pairs, " , ") + " }");
  }
  if (!state.topic().empty()) {
    parts.push_back("|| " + join(state.topic(), " "));
  }
  return join(parts, " ");
}

namespace {

struct SpanToken {
  std::string_view text;
  std::size_t offset;
};

std::vector<SpanToken> lex_span(std::string_view text) {
  std::vector<SpanToken> out;
  std::size_t i = 0;
  auto space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; };
  while (i < text.size()) {
    while (i < text.size() && space(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && !space(text[i])) ++i;
    if (i > start) out.push_back({text.substr(start, i - start), start});
  }
  return out;
}

}  // namespace

ExtendedBeliefState parse_belief_span(std::string_view text) {
  const std::vector<SpanToken> tokens = lex_span(text);
  std::size_t pos = 0;
  auto at_end = [&] { return pos >= tokens.size(); };
  auto offset = [&] { return at_end() ? text.size() : tokens[pos].offset; };

  ExtendedBeliefState state;
  auto apply = [&](std::size_t where, auto&& fn) {
    try {
      fn();
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(where, e.what());
    }
  };

  while (!at_end()) {
    const SpanToken head = tokens[pos];
    if (head.text == "||") {
      ++pos;
      if (at_end()) throw ParseError(offset(), "expected topic words after '||'");
      std::vector<std::string> topic;
      for (; !at_end(); ++pos) {
        if (is_reserved(tokens[pos].text)) {
          throw ParseError(offset(), "unexpected '" + std::string(tokens[pos].text) +
                                         "' in topic segment");
        }
        topic.emplace_back(tokens[pos].text);
      }
      apply(head.offset, [&] { state.set_topic(std::move(topic)); });
      break;
    }
    if (is_reserved(head.text)) {
      throw ParseError(head.offset, "expected a domain name, found '" +
                                        std::string(head.text) + "'");
    }
    ++pos;
    if (at_end() || tokens[pos].text != "{") {
      throw ParseError(offset(), "expected '{' after '" + std::string(head.text) +
                                     "' (topic words must follow '||')");
    }
    ++pos;
    if (!at_end() && tokens[pos].text == "}") {
      ++pos;
      continue;
    }
    while (true) {
      if (at_end()) throw ParseError(offset(), "unbalanced braces: missing '}'");
      const SpanToken slot = tokens[pos];
      if (is_reserved(slot.text)) {
        throw ParseError(slot.offset, "expected a slot name, found '" +
                                          std::string(slot.text) + "'");
      }
      ++pos;
      if (at_end() || tokens[pos].text != "=") {
        throw ParseError(offset(), "missing '=' after slot '" + std::string(slot.text) + "'");
      }
      ++pos;
      std::vector<std::string> value;
      while (!at_end() && tokens[pos].text != "," && tokens[pos].text != "}") {
        if (is_reserved(tokens[pos].text)) {
          throw ParseError(offset(), "unexpected '" + std::string(tokens[pos].text) +
                                         "' in value");
        }
        value.emplace_back(tokens[pos].text);
        ++pos;
      }
      if (at_end()) throw ParseError(offset(), "unbalanced braces: missing '}'");
      if (value.empty()) throw ParseError(offset(), "empty value for slot '" +
                                                        std::string(slot.text) + "'");
      apply(slot.offset, [&] { state.set(head.text, slot.text, join(value, " ")); });
      if (tokens[pos].text == "}") {
        ++pos;
        break;
      }
      ++pos;  // ','
    }
  }
  return state;
}

ExtendedBeliefState extend_gold_label(const ExtendedBeliefState& original,
                                      const std::optional<DocRef>& annotation,
                                      const TopicIndex& index,
                                      const KnowledgeBase& kb) {
  if (!annotation) return original;
  const IndexedDocument* doc = index.find(*annotation);
  if (doc == nullptr) {
    throw Error(ErrorKind::kLabel, "document " + to_string(*annotation) + " is not indexed");
  }
  const Domain* domain = kb.find_domain(annotation->domain);
  const Entity* entity = domain ? domain->find_entity(annotation->entity_id) : nullptr;
  if (entity == nullptr) {
    throw Error(ErrorKind::kLabel, "annotated entity (" + annotation->domain + ", " +
                                       annotation->entity_id + ") is not in the knowledge base");
  }
  ExtendedBeliefState extended = original;
  extended.clear_extension();
  extended.set(annotation->domain, kRukSlot, entity->name);
  extended.set_topic(doc->topics);
  return extended;
}

bool joint_goal_match(const ExtendedBeliefState& pred,
                      const ExtendedBeliefState& gold) {
  auto p = pred.original_triples();
  auto g = gold.original_triples();
  std::sort(p.begin(), p.end());
  std::sort(g.begin(), g.end());
  return p == g;
}

Prf prf_from_counts(std::size_t correct, std::size_t predicted, std::size_t gold) {
  Prf out;
  if (predicted > 0) out.precision = static_cast<double>(correct) / static_cast<double>(predicted);
  if (gold > 0) out.recall = static_cast<double>(correct) / static_cast<double>(gold);
  if (out.precision + out.recall > 0) {
    out.f1 = 2 * out.precision * out.recall / (out.precision + out.recall);
  }
  return out;
}

ExtendedPrf extended_prf(const std::vector<ExtendedBeliefState>& preds,
                         const std::vector<ExtendedBeliefState>& golds) {
  if (preds.size() != golds.size()) {
    throw Error(ErrorKind::kAlignment, std::to_string(preds.size()) + " predictions for " +
                                           std::to_string(golds.size()) + " gold states");
  }
  std::size_t ruk_correct = 0, ruk_pred = 0, ruk_gold = 0;
  std::size_t topic_correct = 0, topic_pred = 0, topic_gold = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    auto p = preds[i].ruk();
    auto g = golds[i].ruk();
    ruk_pred += p.has_value();
    ruk_gold += g.has_value();
    if (p && g && p->domain == g->domain && p->value == g->value) ++ruk_correct;

    const auto& pt = preds[i].topic();
    const auto& gt = golds[i].topic();
    topic_pred += !pt.empty();
    topic_gold += !gt.empty();
    if (!pt.empty() && !gt.empty() &&
        std::set<std::string>(pt.begin(), pt.end()) ==
            std::set<std::string>(gt.begin(), gt.end())) {
      ++topic_correct;
    }
  }
  return {prf_from_counts(ruk_correct, ruk_pred, ruk_gold),
          prf_from_counts(topic_correct, topic_pred, topic_gold)};
}

std::string_view DialogContext::current_user() const {
  for (auto it = utterances.rbegin(); it != utterances.rend(); ++it) {
    if (it->speaker == Speaker::kUser) return it->text;
  }
  return {};
}

std::string_view DialogContext::previous_response() const {
  bool seen_user = false;
  for (auto it = utterances.rbegin(); it != utterances.rend(); ++it) {
    if (it->speaker == Speaker::kUser) {
      if (seen_user) break;
      seen_user = true;
    } else if (seen_user) {
      return it->text;
    }
  }
  return {};
}

std::vector<DialogContext::Utterance> DialogContext::visible() const {
  if (!window) return utterances;
  std::size_t keep = 2 * *window + 1;
  if (keep >= utterances.size()) return utterances;
  return {utterances.end() - static_cast<std::ptrdiff_t>(keep), utterances.end()};
}

}  // namespace seknow
