#include "mekbrec/kgstore.hpp"

#include <set>
#include <utility>

#include "mekbrec/error.hpp"
#include "mekbrec/item.hpp"
#include "mekbrec/tsv.hpp"

namespace mekb {

std::string_view to_string(EntitySource source) {
  switch (source) {
    case EntitySource::global: return "global";
    case EntitySource::brand: return "brand";
    case EntitySource::category: return "category";
    case EntitySource::product: return "product";
  }
  return "global";
}

std::optional<EntitySource> parse_entity_source(std::string_view s) {
  if (s.empty() || s == "global") return EntitySource::global;
  if (s == "brand") return EntitySource::brand;
  if (s == "category") return EntitySource::category;
  if (s == "product") return EntitySource::product;
  return std::nullopt;
}

double base_weight(EntitySource source) {
  switch (source) {
    case EntitySource::global: return 1.0;
    case EntitySource::brand: return 0.5;
    case EntitySource::category: return 0.3;
    case EntitySource::product: return 0.1;
  }
  return 1.0;
}

void KnowledgeGraph::add_entity(Entity entity) {
  if (entity.entity_id.empty()) throw LoadError("entity with empty id");
  if (entity.title.empty()) throw LoadError("entity " + entity.entity_id + " has an empty title");
  if (entities_.count(entity.entity_id)) {
    throw LoadError("duplicate entity id " + entity.entity_id);
  }
  if (auto it = title_index_.find(entity.title); it != title_index_.end()) {
    throw LoadError("duplicate title \"" + entity.title + "\" on " + entity.entity_id +
                    " (already used by " + it->second + ")");
  }
  title_index_.emplace(entity.title, entity.entity_id);
  std::string key = entity.entity_id;
  entities_.emplace(std::move(key), std::move(entity));
}

void KnowledgeGraph::add_triple(Triple triple) {
  if (!contains(triple.head)) throw LoadError("triple head " + triple.head + " is not an entity");
  if (!contains(triple.tail)) throw LoadError("triple tail " + triple.tail + " is not an entity");
  triples_.push_back(std::move(triple));
}

const Entity* KnowledgeGraph::find(std::string_view entity_id) const {
  auto it = entities_.find(entity_id);
  return it == entities_.end() ? nullptr : &it->second;
}

const Entity& KnowledgeGraph::at(std::string_view entity_id) const {
  const Entity* e = find(entity_id);
  if (!e) throw LoadError("unknown entity " + std::string(entity_id));
  return *e;
}

std::optional<std::string> KnowledgeGraph::id_for_title(std::string_view title) const {
  auto it = title_index_.find(title);
  if (it == title_index_.end()) return std::nullopt;
  return it->second;
}

KnowledgeGraph load_kg(const std::string& entities_path,
                       const std::optional<std::string>& triples_path) {
  KnowledgeGraph kg;
  tsv::for_each_line(entities_path, [&](std::size_t line_no, const std::string& line) {
    const auto fields = tsv::split(line);
    if (fields.size() < 2 || fields.size() > 3) {
      throw ParseError(entities_path, line_no, "expected id<TAB>title[<TAB>source]");
    }
    const auto source = parse_entity_source(fields.size() == 3 ? fields[2] : "");
    if (!source) throw ParseError(entities_path, line_no, "unknown source \"" + fields[2] + "\"");
    try {
      kg.add_entity(Entity{fields[0], fields[1], *source, base_weight(*source)});
    } catch (const LoadError& e) {
      throw LoadError(entities_path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  });
  if (triples_path) {
    tsv::for_each_line(*triples_path, [&](std::size_t line_no, const std::string& line) {
      auto fields = tsv::split(line);
      if (fields.size() != 3) {
        throw ParseError(*triples_path, line_no, "expected head<TAB>relation<TAB>tail");
      }
      try {
        kg.add_triple(Triple{std::move(fields[0]), std::move(fields[1]), std::move(fields[2])});
      } catch (const LoadError& e) {
        throw LoadError(*triples_path + ":" + std::to_string(line_no) + ": " + e.what());
      }
    });
  }
  return kg;
}

void save_entities(const KnowledgeGraph& kg, const std::string& path) {
  auto out = tsv::open_output(path);
  for (const auto& [id, e] : kg.entities()) {
    std::vector<std::string> fields{e.entity_id, e.title};
    if (e.source != EntitySource::global) fields.emplace_back(to_string(e.source));
    out << tsv::join(fields) << '\n';
  }
}

void save_triples(const KnowledgeGraph& kg, const std::string& path) {
  auto out = tsv::open_output(path);
  for (const auto& t : kg.triples()) {
    out << tsv::join({t.head, t.relation_type, t.tail}) << '\n';
  }
}

std::string attribute_entity_id(EntitySource source, std::string_view name) {
  return std::string(to_string(source)) + ":" + std::string(name);
}

KnowledgeGraph augment_domain_entities(KnowledgeGraph kg, std::span<const Item> items) {
  // Fixed processing order (source, then name) keeps suffixing deterministic.
  std::set<std::pair<EntitySource, std::string>> names;
  for (const auto& item : items) {
    for (const auto& attr : item.attributes) {
      if (attr.source == EntitySource::global || attr.name.empty()) continue;
      names.emplace(attr.source, attr.name);
    }
  }
  for (const auto& [source, name] : names) {
    std::string id = attribute_entity_id(source, name);
    if (kg.contains(id)) continue;
    std::string title = name;
    if (kg.id_for_title(title)) {
      const std::string stem = name + "#" + std::string(to_string(source));
      title = stem;
      for (int n = 2; kg.id_for_title(title); ++n) title = stem + "#" + std::to_string(n);
    }
    kg.add_entity(Entity{std::move(id), std::move(title), source, base_weight(source)});
  }
  return kg;
}

}  // namespace mekb
