#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mekbrec/item.hpp"

namespace mekb {

struct IngestDiagnostics {
  std::size_t lines = 0;
  std::size_t malformed = 0;
  std::size_t non_positive = 0;  // rating below 4
  std::size_t duplicates = 0;
  std::size_t other_domain = 0;  // domain not in the domain map

  bool operator==(const IngestDiagnostics&) const = default;
};

struct IngestResult {
  std::vector<Interaction> interactions;  // sorted, deduplicated
  std::vector<Item> items;                // sorted by item_id
  IngestDiagnostics interaction_diagnostics;
  IngestDiagnostics item_diagnostics;
};

// Raw domain label -> pipeline label. Empty map keeps every domain as is;
// otherwise records of unlisted domains are dropped and tallied.
using DomainMap = std::map<std::string, std::string>;

// Rating at or above this is a positive interaction.
inline constexpr double kPositiveRating = 4.0;

// Interactions: user<TAB>item<TAB>domain[<TAB>rating]. Without a rating the
// record is an implicit positive.
// Items: one JSON object per line with item_id, domain, text and optional
// brands / categories / products / entities string arrays.
// Unreadable files throw InputError; malformed lines are skipped and tallied.
IngestResult ingest(const std::string& interactions_path, const std::string& items_path,
                    const DomainMap& domains = {});

std::vector<Interaction> load_interactions(const std::string& path, const DomainMap& domains,
                                           IngestDiagnostics& diag);
std::vector<Item> load_items(const std::string& path, const DomainMap& domains,
                             IngestDiagnostics& diag);

void save_interactions(std::span<const Interaction> interactions, const std::string& path);
void save_items(std::span<const Item> items, const std::string& path);
std::string item_to_json_line(const Item& item);

}  // namespace mekb
