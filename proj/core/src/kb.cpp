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

#include "seknow/kb.hpp"

#include <algorithm>
#include <iterator>
#include <nlohmann/json.hpp>
#include <sstream>

#include "seknow/error.hpp"
#include "seknow/text.hpp"

namespace seknow {

using nlohmann::json;

const Document* Entity::find_document(std::string_view doc_id) const {
  for (const auto& doc : documents) {
    if (doc.doc_id == doc_id) return &doc;
  }
  return nullptr;
}

const std::string* Entity::attribute(std::string_view slot) const {
  auto it = attributes.find(std::string(slot));
  return it == attributes.end() ? nullptr : &it->second;
}

const Entity* Domain::find_entity(std::string_view id) const {
  auto it = std::lower_bound(
      entities.begin(), entities.end(), id,
      [](const Entity& e, std::string_view key) { return e.id < key; });
  if (it == entities.end() || it->id != id) return nullptr;
  return &*it;
}

std::string to_string(const DocRef& ref) {
  return ref.domain + "/" + ref.entity_id + "/" + ref.doc_id;
}

KnowledgeBase::KnowledgeBase(std::vector<Domain> domains) {
  for (auto& domain : domains) {
    domain.name = normalize(domain.name);
    std::set<std::string> schema;
    for (const auto& slot : domain.slot_schema) schema.insert(normalize(slot));
    domain.slot_schema = std::move(schema);
    for (auto& entity : domain.entities) {
      entity.id = normalize(entity.id);
      entity.name = normalize(entity.name);
      std::map<std::string, std::string> attrs;
      for (const auto& [k, v] : entity.attributes) {
        attrs[normalize(k)] = normalize(v);
      }
      entity.attributes = std::move(attrs);
      for (auto& doc : entity.documents) {
        doc.doc_id = normalize(doc.doc_id);
        doc.title = normalize(doc.title);
        doc.body = normalize(doc.body);
      }
    }
    std::stable_sort(
        domain.entities.begin(), domain.entities.end(),
        [](const Entity& a, const Entity& b) { return a.id < b.id; });
    std::string key = domain.name;
    domains_.insert_or_assign(std::move(key), std::move(domain));
  }
}

const Domain* KnowledgeBase::find_domain(std::string_view name) const {
  auto it = domains_.find(name);
  return it == domains_.end() ? nullptr : &it->second;
}

const Domain& KnowledgeBase::domain(std::string_view name) const {
  const Domain* d = find_domain(name);
  if (d == nullptr) {
    throw Error(ErrorKind::kDomainNotFound, std::string(name));
  }
  return *d;
}

std::size_t KnowledgeBase::entity_count() const {
  std::size_t n = 0;
  for (const auto& [_, d] : domains_) n += d.entities.size();
  return n;
}

std::size_t KnowledgeBase::document_count() const {
  std::size_t n = 0;
  for (const auto& [_, d] : domains_) {
    for (const auto& e : d.entities) n += e.documents.size();
  }
  return n;
}

namespace {

// Key injected into every parsed object holding the line its `{` was on.
constexpr const char* kLineKey = "\x01line";

struct ReadTracker {
  const char* base = nullptr;
  std::size_t consumed = 0;
};

// Forward iterator over a buffer that records how far the parser has read,
// so object-start callbacks can be mapped to source lines.
class TrackingIterator {
 public:
  using iterator_category = std::forward_iterator_tag;
  using value_type = char;
  using difference_type = std::ptrdiff_t;
  using pointer = const char*;
  using reference = const char&;

  TrackingIterator() = default;
  TrackingIterator(const char* pos, ReadTracker* tracker)
      : pos_(pos), tracker_(tracker) {}

  reference operator*() const {
    tracker_->consumed = static_cast<std::size_t>(pos_ - tracker_->base) + 1;
    return *pos_;
  }
  TrackingIterator& operator++() {
    ++pos_;
    return *this;
  }
  TrackingIterator operator++(int) {
    TrackingIterator copy = *this;
    ++pos_;
    return copy;
  }
  bool operator==(const TrackingIterator& other) const {
    return pos_ == other.pos_;
  }

 private:
  const char* pos_ = nullptr;
  ReadTracker* tracker_ = nullptr;
};

class LineMap {
 public:
  explicit LineMap(std::string_view text) {
    for (std::size_t i = 0; i < text.size(); ++i) {
      if (text[i] == '\n') newlines_.push_back(i);
    }
  }
  // 1-based line of the byte at `offset`.
  std::size_t line_of(std::size_t offset) const {
    auto it = std::lower_bound(newlines_.begin(), newlines_.end(), offset);
    return static_cast<std::size_t>(it - newlines_.begin()) + 1;
  }

 private:
  std::vector<std::size_t> newlines_;
};

json parse_with_lines(std::string_view text, std::string_view name) {
  ReadTracker tracker{text.data(), 0};
  LineMap lines(text);
  std::vector<std::size_t> open;
  json::parser_callback_t cb = [&](int, json::parse_event_t event,
                                   json& parsed) {
    if (event == json::parse_event_t::object_start) {
      open.push_back(lines.line_of(tracker.consumed ? tracker.consumed - 1 : 0));
    } else if (event == json::parse_event_t::object_end && !open.empty()) {
      parsed[kLineKey] = open.back();
      open.pop_back();
    }
    return true;
  };
  try {
    return json::parse(TrackingIterator(text.data(), &tracker),
                       TrackingIterator(text.data() + text.size(), &tracker),
                       cb);
  } catch (const json::parse_error& e) {
    std::size_t offset = e.byte > 0 ? e.byte - 1 : 0;
    throw Error(ErrorKind::kLoad, std::string(name) + ":" +
                                      std::to_string(lines.line_of(offset)) +
                                      ": malformed input: " + e.what());
  }
}

class SchemaReader {
 public:
  explicit SchemaReader(std::string_view file) : file_(file) {}

  [[noreturn]] void fail(const json& at, const std::string& what) const {
    std::string where(file_);
    if (at.is_object() && at.contains(kLineKey)) {
      where += ":" + std::to_string(at[kLineKey].get<std::size_t>());
    }
    throw Error(ErrorKind::kLoad, where + ": " + what);
  }

  const json& require(const json& obj, const char* key) const {
    auto it = obj.find(key);
    if (it == obj.end()) fail(obj, std::string("missing field '") + key + "'");
    return *it;
  }

  std::string string_field(const json& obj, const char* key) const {
    const json& v = require(obj, key);
    if (!v.is_string()) fail(obj, std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
  }

  void only_keys(const json& obj, std::initializer_list<std::string_view> keys) const {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (it.key() == kLineKey) continue;
      if (std::find(keys.begin(), keys.end(), it.key()) == keys.end()) {
        fail(obj, "unexpected field '" + it.key() + "'");
      }
    }
  }

 private:
  std::string_view file_;
};

std::vector<Domain> read_db(const json& root, const SchemaReader& reader) {
  if (!root.is_object()) reader.fail(root, "top level must be an object of domains");
  std::vector<Domain> domains;
  for (auto it = root.begin(); it != root.end(); ++it) {
    if (it.key() == kLineKey) continue;
    const json& body = it.value();
    if (!body.is_object()) reader.fail(root, "domain '" + it.key() + "' must be an object");
    reader.only_keys(body, {"slots", "entities"});
    Domain domain;
    domain.name = it.key();
    if (normalize(domain.name).empty()) reader.fail(body, "empty domain name");
    const json& slots = reader.require(body, "slots");
    if (!slots.is_array()) reader.fail(body, "'slots' must be an array");
    for (const auto& s : slots) {
      if (!s.is_string()) reader.fail(body, "'slots' entries must be strings");
      domain.slot_schema.insert(s.get<std::string>());
    }
    const json& entities = reader.require(body, "entities");
    if (!entities.is_array()) reader.fail(body, "'entities' must be an array");
    for (const auto& e : entities) {
      if (!e.is_object()) reader.fail(body, "entity must be an object");
      reader.only_keys(e, {"id", "name", "bookable", "attributes"});
      Entity entity;
      entity.id = reader.string_field(e, "id");
      entity.name = reader.string_field(e, "name");
      if (auto b = e.find("bookable"); b != e.end()) {
        if (!b->is_boolean()) reader.fail(e, "'bookable' must be a boolean");
        entity.bookable = b->get<bool>();
      }
      if (auto a = e.find("attributes"); a != e.end()) {
        if (!a->is_object()) reader.fail(e, "'attributes' must be an object");
        for (auto kv = a->begin(); kv != a->end(); ++kv) {
          if (kv.key() == kLineKey) continue;
          if (!kv.value().is_string()) {
            reader.fail(e, "attribute '" + kv.key() + "' must be a string");
          }
          entity.attributes[kv.key()] = kv.value().get<std::string>();
        }
      }
      domain.entities.push_back(std::move(entity));
    }
    domains.push_back(std::move(domain));
  }
  return domains;
}

struct PendingDoc {
  std::string domain;
  std::string owner;
  Document doc;
  std::size_t line = 0;
};

std::vector<PendingDoc> read_docs(const json& root, const SchemaReader& reader) {
  if (!root.is_array()) reader.fail(root, "top level must be an array of documents");
  std::vector<PendingDoc> docs;
  for (const auto& d : root) {
    if (!d.is_object()) reader.fail(root, "document must be an object");
    reader.only_keys(d, {"domain", "entity_id", "doc_id", "title", "body"});
    PendingDoc p;
    p.domain = normalize(reader.string_field(d, "domain"));
    p.owner = normalize(reader.string_field(d, "entity_id"));
    p.doc.doc_id = reader.string_field(d, "doc_id");
    p.doc.title = reader.string_field(d, "title");
    p.doc.body = reader.string_field(d, "body");
    p.line = d[kLineKey].get<std::size_t>();
    docs.push_back(std::move(p));
  }
  return docs;
}

// Resolves a document owner by id, then by case-insensitive exact name.
Entity* resolve_owner(Domain& domain, const PendingDoc& doc,
                      std::string_view doc_name) {
  std::vector<Entity*> by_id;
  for (auto& e : domain.entities) {
    if (normalize(e.id) == doc.owner) by_id.push_back(&e);
  }
  auto ambiguous = [&](const char* how) {
    throw Error(ErrorKind::kFusion,
                std::string(doc_name) + ":" + std::to_string(doc.line) +
                    ": ambiguous owner (" + doc.domain + ", " + doc.owner +
                    ") matches several entities by " + how);
  };
  if (by_id.size() > 1) ambiguous("id");
  if (by_id.size() == 1) return by_id.front();
  std::vector<Entity*> by_name;
  for (auto& e : domain.entities) {
    if (normalize(e.name) == doc.owner) by_name.push_back(&e);
  }
  if (by_name.size() > 1) ambiguous("name");
  return by_name.empty() ? nullptr : by_name.front();
}

}  // namespace

KnowledgeBase parse_knowledge_base(std::string_view db_text,
                                   std::string_view doc_text,
                                   std::string_view db_name,
                                   std::string_view doc_name) {
  SchemaReader db_reader(db_name);
  std::vector<Domain> domains = read_db(parse_with_lines(db_text, db_name), db_reader);

  for (auto& domain : domains) {
    if (!domain.slot_schema.contains("name")) continue;
    for (auto& e : domain.entities) {
      e.attributes.try_emplace("name", e.name);
    }
  }

  if (!doc_text.empty()) {
    SchemaReader doc_reader(doc_name);
    auto docs = read_docs(parse_with_lines(doc_text, doc_name), doc_reader);
    std::vector<std::string> orphans;
    for (auto& pending : docs) {
      Domain* domain = nullptr;
      for (auto& d : domains) {
        if (normalize(d.name) == pending.domain) domain = &d;
      }
      Entity* owner = domain ? resolve_owner(*domain, pending, doc_name) : nullptr;
      if (owner == nullptr) {
        orphans.push_back("(" + pending.domain + ", " + pending.owner + ") at " +
                          std::string(doc_name) + ":" +
                          std::to_string(pending.line));
        continue;
      }
      owner->documents.push_back(std::move(pending.doc));
    }
    if (!orphans.empty()) {
      throw Error(ErrorKind::kFusion,
                  "documents reference unknown entities: " + join(orphans, "; "));
    }
  }
  return KnowledgeBase(std::move(domains));
}

KnowledgeBase load_knowledge_base(const std::string& db_path,
                                  const std::string& doc_path) {
  std::string db = read_file(db_path);
  std::string docs = doc_path.empty() ? std::string() : read_file(doc_path);
  return parse_knowledge_base(db, docs, db_path, doc_path);
}

std::string serialize_db(const KnowledgeBase& kb) {
  json root = json::object();
  for (const auto& [name, domain] : kb.domains()) {
    json entities = json::array();
    for (const auto& e : domain.entities) {
      json attrs = json::object();
      for (const auto& [k, v] : e.attributes) attrs[k] = v;
      entities.push_back({{"id", e.id},
                          {"name", e.name},
                          {"bookable", e.bookable},
                          {"attributes", attrs}});
    }
    root[name] = {{"slots", domain.slot_schema}, {"entities", entities}};
  }
  return root.dump(2) + "\n";
}

std::string serialize_docs(const KnowledgeBase& kb) {
  json root = json::array();
  for (const auto& [name, domain] : kb.domains()) {
    for (const auto& e : domain.entities) {
      for (const auto& d : e.documents) {
        root.push_back({{"domain", name},
                        {"entity_id", e.id},
                        {"doc_id", d.doc_id},
                        {"title", d.title},
                        {"body", d.body}});
      }
    }
  }
  return root.dump(2) + "\n";
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kInvalidDomainName: return "invalid-domain-name";
    case ViolationKind::kDuplicateId: return "duplicate-id";
    case ViolationKind::kSchemaForeign: return "schema-foreign";
    case ViolationKind::kEmptyBody: return "empty-body";
    case ViolationKind::kDuplicateDocId: return "duplicate-doc-id";
    case ViolationKind::kNameMismatch: return "name-mismatch";
    case ViolationKind::kEmptyField: return "empty-field";
  }
  return "unknown";
}

std::size_t ValidationReport::count(ViolationKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(violations.begin(), violations.end(),
                    [kind](const Violation& v) { return v.kind == kind; }));
}

ValidationReport validate_knowledge_base(const KnowledgeBase& kb) {
  ValidationReport report;
  auto add = [&](ViolationKind kind, const std::string& domain,
                 const std::string& entity, std::string detail) {
    report.violations.push_back({kind, domain, entity, std::move(detail)});
  };
  for (const auto& [name, domain] : kb.domains()) {
    if (name.empty() || name != normalize(name)) {
      add(ViolationKind::kInvalidDomainName, name, "", "domain name must be lowercase and nonempty");
    }
    report.entities_per_domain[name] = domain.entities.size();
    report.entity_count += domain.entities.size();
    for (std::size_t i = 0; i < domain.entities.size(); ++i) {
      const Entity& e = domain.entities[i];
      if (i > 0 && domain.entities[i - 1].id == e.id) {
        add(ViolationKind::kDuplicateId, name, e.id, "entity id '" + e.id + "' is not unique");
      }
      if (e.id.empty()) add(ViolationKind::kEmptyField, name, e.id, "empty entity id");
      for (const auto& [slot, value] : e.attributes) {
        if (!domain.slot_schema.contains(slot)) {
          add(ViolationKind::kSchemaForeign, name, e.id,
              "attribute '" + slot + "' is not in the domain schema");
        }
      }
      if (const std::string* n = e.attribute("name"); n && *n != e.name) {
        add(ViolationKind::kNameMismatch, name, e.id,
            "name attribute '" + *n + "' differs from entity name '" + e.name + "'");
      }
      std::set<std::string> doc_ids;
      for (const auto& d : e.documents) {
        ++report.document_count;
        if (d.body.empty()) {
          add(ViolationKind::kEmptyBody, name, e.id, "document '" + d.doc_id + "' has an empty body");
        }
        if (!doc_ids.insert(d.doc_id).second) {
          add(ViolationKind::kDuplicateDocId, name, e.id,
              "document id '" + d.doc_id + "' is not unique within the entity");
        }
      }
    }
  }
  return report;
}

std::span<const Entity> list_entities(const KnowledgeBase& kb,
                                      std::string_view domain) {
  return kb.domain(domain).entities;
}

void Ontology::add(std::string_view domain, std::string_view slot,
                   std::string_view value) {
  auto& slots = entries_[std::string(domain)];
  auto& values = slots[std::string(slot)];
  auto it = std::lower_bound(values.begin(), values.end(), value);
  if (it == values.end() || *it != value) values.insert(it, std::string(value));
}

const std::vector<std::string>* Ontology::values(std::string_view domain,
                                                 std::string_view slot) const {
  auto d = entries_.find(domain);
  if (d == entries_.end()) return nullptr;
  auto s = d->second.find(slot);
  return s == d->second.end() ? nullptr : &s->second;
}

Ontology build_ontology(const KnowledgeBase& kb) {
  Ontology ontology;
  for (const auto& [name, domain] : kb.domains()) {
    for (const auto& e : domain.entities) {
      for (const auto& [slot, value] : e.attributes) {
        if (!value.empty()) ontology.add(name, slot, value);
      }
      ontology.add(name, "ruk", e.name);
    }
  }
  return ontology;
}

}  // namespace seknow
