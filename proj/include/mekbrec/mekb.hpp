#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mekbrec/kgstore.hpp"
#include "mekbrec/linker.hpp"

namespace mekb {

struct MeKBConfig {
  std::uint64_t k_star = 10;
  bool apply_base_weight = true;

  bool operator==(const MeKBConfig&) const = default;
};

struct InterestEntry {
  std::string entity_id;
  std::uint64_t raw_count = 0;
  double tf = 0.0;
  double idf = 0.0;
  double score = 0.0;
};

// A user's personal knowledge graph: entries by descending score, ties by
// ascending entity id.
struct MeKB {
  std::string user_id;
  std::vector<InterestEntry> entries;

  bool empty() const { return entries.empty(); }
};

struct IdfTable {
  std::map<std::string, double, std::less<>> idf;
  std::size_t n_users = 0;

  // Throws std::out_of_range for an entity no user is interested in.
  double at(std::string_view entity_id) const;
};

// Log smoothing of an interaction count: identity up to k_star, then
// k * (1 + ln(k / k_star)).
double smooth(std::uint64_t k, std::uint64_t k_star);

// idf(e) = ln(N_u / #users with e). Throws std::invalid_argument on no users.
IdfTable compute_idf(const std::map<std::string, std::set<std::string>>& incidence);

// Per-user set of entities appearing in any of the user's positives.
std::set<std::string> interest_set(std::span<const LinkedItem* const> positives);

// Aggregates the user's linked positives into normalized tf-idf interest
// scores. Entities with idf 0 are dropped; if nothing remains the MeKB is
// empty.
MeKB build_mekb(const std::string& user_id, std::span<const LinkedItem* const> positives,
                const IdfTable& idf, const KnowledgeGraph& kg, const MeKBConfig& cfg = {});

// user_id then (entity_id, raw_count, score) triples, scores with 9 decimals.
void save_mekbs(std::span<const MeKB> mekbs, const std::string& path);
std::string format_mekb(const MeKB& mekb);
std::vector<MeKB> load_mekbs(const std::string& path);

}  // namespace mekb
