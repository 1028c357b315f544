#include "mekbrec/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include <json.hpp>

#include "mekbrec/error.hpp"
#include "mekbrec/tsv.hpp"

namespace mekb {
namespace {

bool map_domain(const DomainMap& domains, std::string& domain) {
  if (domains.empty()) return true;
  auto it = domains.find(domain);
  if (it == domains.end()) return false;
  domain = it->second;
  return true;
}

std::vector<std::string> string_array(const nlohmann::json& j, const char* key) {
  std::vector<std::string> out;
  if (!j.contains(key)) return out;
  for (const auto& v : j.at(key)) out.push_back(v.get<std::string>());
  return out;
}

const std::pair<const char*, EntitySource> kAttributeKeys[] = {
    {"brands", EntitySource::brand},
    {"categories", EntitySource::category},
    {"products", EntitySource::product},
};

}  // namespace

std::vector<Interaction> load_interactions(const std::string& path, const DomainMap& domains,
                                           IngestDiagnostics& diag) {
  std::set<Interaction> seen;
  tsv::for_each_line(path, [&](std::size_t, const std::string& line) {
    ++diag.lines;
    auto fields = tsv::split(line);
    if (fields.size() < 3 || fields.size() > 4 || fields[0].empty() || fields[1].empty() ||
        fields[2].empty()) {
      ++diag.malformed;
      return;
    }
    if (fields.size() == 4) {
      double rating = 0.0;
      const auto& f = fields[3];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), rating);
      if (ec != std::errc() || ptr != f.data() + f.size()) {
        ++diag.malformed;
        return;
      }
      if (rating < kPositiveRating) {
        ++diag.non_positive;
        return;
      }
    }
    Interaction rec{std::move(fields[0]), std::move(fields[1]), std::move(fields[2])};
    if (!map_domain(domains, rec.domain)) {
      ++diag.other_domain;
      return;
    }
    if (!seen.insert(std::move(rec)).second) ++diag.duplicates;
  });
  return {seen.begin(), seen.end()};
}

std::vector<Item> load_items(const std::string& path, const DomainMap& domains,
                             IngestDiagnostics& diag) {
  std::map<std::string, Item> items;
  tsv::for_each_line(path, [&](std::size_t, const std::string& line) {
    ++diag.lines;
    Item item;
    try {
      const auto j = nlohmann::json::parse(line);
      item.item_id = j.at("item_id").get<std::string>();
      item.domain = j.at("domain").get<std::string>();
      item.text = j.value("text", std::string());
      item.explicit_entities = string_array(j, "entities");
      for (const auto& [key, source] : kAttributeKeys) {
        for (auto& name : string_array(j, key)) {
          if (name.empty()) continue;
          item.explicit_entities.push_back(attribute_entity_id(source, name));
          item.attributes.push_back({source, std::move(name)});
        }
      }
    } catch (const nlohmann::json::exception&) {
      ++diag.malformed;
      return;
    }
    if (item.item_id.empty()) {
      ++diag.malformed;
      return;
    }
    if (!map_domain(domains, item.domain)) {
      ++diag.other_domain;
      return;
    }
    std::string key = item.item_id;
    if (!items.emplace(std::move(key), std::move(item)).second) ++diag.duplicates;
  });
  std::vector<Item> out;
  out.reserve(items.size());
  for (auto& [id, item] : items) out.push_back(std::move(item));
  return out;
}

IngestResult ingest(const std::string& interactions_path, const std::string& items_path,
                    const DomainMap& domains) {
  IngestResult r;
  r.interactions = load_interactions(interactions_path, domains, r.interaction_diagnostics);
  r.items = load_items(items_path, domains, r.item_diagnostics);
  return r;
}

void save_interactions(std::span<const Interaction> interactions, const std::string& path) {
  auto out = tsv::open_output(path);
  for (const auto& r : interactions) out << tsv::join({r.user_id, r.item_id, r.domain}) << '\n';
}

std::string item_to_json_line(const Item& item) {
  nlohmann::json j;
  j["item_id"] = item.item_id;
  j["domain"] = item.domain;
  j["text"] = item.text;
  std::set<std::string> derived;
  for (const auto& [key, source] : kAttributeKeys) {
    std::vector<std::string> names;
    for (const auto& a : item.attributes) {
      if (a.source == source) {
        names.push_back(a.name);
        derived.insert(attribute_entity_id(source, a.name));
      }
    }
    if (!names.empty()) j[key] = names;
  }
  std::vector<std::string> entities;
  for (const auto& e : item.explicit_entities) {
    if (!derived.count(e)) entities.push_back(e);
  }
  if (!entities.empty()) j["entities"] = entities;
  return j.dump();
}

void save_items(std::span<const Item> items, const std::string& path) {
  auto out = tsv::open_output(path);
  for (const auto& item : items) out << item_to_json_line(item) << '\n';
}

}  // namespace mekb
