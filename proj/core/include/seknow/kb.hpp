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

#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace seknow {

struct Document {
  std::string doc_id;
  std::string title;
  std::string body;

  bool operator==(const Document&) const = default;
};

struct Entity {
  std::string id;
  std::string name;
  std::map<std::string, std::string> attributes;
  bool bookable = false;
  std::vector<Document> documents;

  const Document* find_document(std::string_view doc_id) const;
  /// Attribute value or nullptr when the entity lacks the slot.
  const std::string* attribute(std::string_view slot) const;

  bool operator==(const Entity&) const = default;
};

struct Domain {
  std::string name;
  std::set<std::string> slot_schema;
  /// Sorted ascending by id.
  std::vector<Entity> entities;

  const Entity* find_entity(std::string_view id) const;

  bool operator==(const Domain&) const = default;
};

/// Address of one document inside a knowledge base.
struct DocRef {
  std::string domain;
  std::string entity_id;
  std::string doc_id;

  auto operator<=>(const DocRef&) const = default;
  bool operator==(const DocRef&) const = default;
};

std::string to_string(const DocRef& ref);

/// Fused structured records and unstructured documents. Immutable once built;
/// all strings are normalized and entities are kept sorted by id.
class KnowledgeBase {
 public:
  KnowledgeBase() = default;
  explicit KnowledgeBase(std::vector<Domain> domains);

  const std::map<std::string, Domain, std::less<>>& domains() const {
    return domains_;
  }
  const Domain* find_domain(std::string_view name) const;
  /// Throws Error(kDomainNotFound).
  const Domain& domain(std::string_view name) const;

  std::size_t entity_count() const;
  std::size_t document_count() const;

  bool operator==(const KnowledgeBase&) const = default;

 private:
  std::map<std::string, Domain, std::less<>> domains_;
};

/// Loads the structured-records file and (optionally, when `doc_path` is
/// empty) the document-base file, then attaches each document to its owner.
KnowledgeBase load_knowledge_base(const std::string& db_path,
                                  const std::string& doc_path);

/// Same as load_knowledge_base over in-memory text. The names are used in
/// error messages only.
KnowledgeBase parse_knowledge_base(std::string_view db_text,
                                   std::string_view doc_text,
                                   std::string_view db_name = "<db>",
                                   std::string_view doc_name = "<docs>");

std::string serialize_db(const KnowledgeBase& kb);
std::string serialize_docs(const KnowledgeBase& kb);

enum class ViolationKind {
  kInvalidDomainName,
  kDuplicateId,
  kSchemaForeign,
  kEmptyBody,
  kDuplicateDocId,
  kNameMismatch,
  kEmptyField,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::string domain;
  std::string entity_id;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  std::size_t entity_count = 0;
  std::size_t document_count = 0;
  std::map<std::string, std::size_t> entities_per_domain;

  bool ok() const { return violations.empty(); }
  std::size_t count(ViolationKind kind) const;
};

ValidationReport validate_knowledge_base(const KnowledgeBase& kb);

/// Entities of `domain`, ascending by id. Throws Error(kDomainNotFound).
std::span<const Entity> list_entities(const KnowledgeBase& kb,
                                      std::string_view domain);

/// Known values per (domain, slot), sorted and deduplicated. The `ruk` slot of
/// every domain lists its entity names.
class Ontology {
 public:
  using SlotValues = std::map<std::string, std::vector<std::string>, std::less<>>;
  using Entries = std::map<std::string, SlotValues, std::less<>>;

  void add(std::string_view domain, std::string_view slot,
           std::string_view value);
  const std::vector<std::string>* values(std::string_view domain,
                                         std::string_view slot) const;
  const Entries& entries() const { return entries_; }

 private:
  Entries entries_;
};

Ontology build_ontology(const KnowledgeBase& kb);

}  // namespace seknow
