#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mekb {

enum class EntitySource { global, brand, category, product };

std::string_view to_string(EntitySource source);
std::optional<EntitySource> parse_entity_source(std::string_view s);

// 1.0 for KG entities; dataset augmentation entities get a lower weight.
double base_weight(EntitySource source);

struct Entity {
  std::string entity_id;
  std::string title;
  EntitySource source = EntitySource::global;
  double base_weight = 1.0;

  bool operator==(const Entity&) const = default;
};

struct Triple {
  std::string head;
  std::string relation_type;
  std::string tail;

  bool operator==(const Triple&) const = default;
};

struct Item;

// The global knowledge graph. Entity ids and titles are both unique, so a
// title is an unambiguous serialization of its entity.
class KnowledgeGraph {
 public:
  // Throws LoadError on duplicate id or title, or an empty id/title.
  void add_entity(Entity entity);
  // Throws LoadError if head or tail is unknown.
  void add_triple(Triple triple);

  const Entity* find(std::string_view entity_id) const;
  const Entity& at(std::string_view entity_id) const;
  std::optional<std::string> id_for_title(std::string_view title) const;
  bool contains(std::string_view entity_id) const { return find(entity_id) != nullptr; }

  const std::map<std::string, Entity, std::less<>>& entities() const { return entities_; }
  const std::vector<Triple>& triples() const { return triples_; }
  std::size_t entity_count() const { return entities_.size(); }
  std::size_t triple_count() const { return triples_.size(); }

  bool operator==(const KnowledgeGraph&) const = default;

 private:
  std::map<std::string, Entity, std::less<>> entities_;
  std::vector<Triple> triples_;
  std::map<std::string, std::string, std::less<>> title_index_;
};

// Entities file: id<TAB>title[<TAB>source], one per line.
// Triples file: head<TAB>relation<TAB>tail, one per line.
KnowledgeGraph load_kg(const std::string& entities_path,
                       const std::optional<std::string>& triples_path = std::nullopt);
void save_entities(const KnowledgeGraph& kg, const std::string& path);
void save_triples(const KnowledgeGraph& kg, const std::string& path);

// Id under which a dataset attribute is registered, e.g. "brand:Sony".
std::string attribute_entity_id(EntitySource source, std::string_view name);

// Registers every distinct brand/category/product name carried by the items
// as an entity. A name that collides with an existing title gets a
// "#<source>" suffix. Applying it twice with the same items is a no-op.
KnowledgeGraph augment_domain_entities(KnowledgeGraph kg, std::span<const Item> items);

}  // namespace mekb
