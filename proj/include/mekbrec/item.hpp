#pragma once

#include <string>
#include <vector>

#include "mekbrec/kgstore.hpp"

namespace mekb {

// A named brand / category / product attached to an item by the dataset.
struct DomainAttribute {
  EntitySource source = EntitySource::brand;
  std::string name;
};

struct Item {
  std::string item_id;
  std::string domain;
  std::string text;
  // Entity ids the dataset asserts directly (attribute entities included
  // once the item has been ingested).
  std::vector<std::string> explicit_entities;
  std::vector<DomainAttribute> attributes;
};

}  // namespace mekb

namespace mekb {

// A positive user-item interaction.
struct Interaction {
  std::string user_id;
  std::string item_id;
  std::string domain;

  auto operator<=>(const Interaction&) const = default;
};

}  // namespace mekb
