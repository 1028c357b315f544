#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mekb {

class KnowledgeGraph;

struct Anchor {
  std::string surface;
  std::string entity_id;
};

// Exact P(e|m) as a ratio of anchor counts.
struct PriorFraction {
  std::uint64_t numerator = 0;
  std::uint64_t denominator = 0;
};

// Mention surface -> entity anchor counts. Keys are normalized mentions.
// Counts are exact integers; priors are derived on demand.
class AliasTable {
 public:
  using Candidates = std::map<std::string, std::uint64_t, std::less<>>;

  // `mention` must already be normalized.
  void add_normalized(const std::string& mention, const std::string& entity_id,
                      std::uint64_t count = 1);

  // Count addition; associative and commutative.
  void merge(const AliasTable& other);

  // freq(m,e) / freq(m); 0 when m is unknown or e is not a candidate.
  // `mention` is normalized before lookup.
  double prior(std::string_view mention, std::string_view entity_id) const;
  PriorFraction prior_fraction(std::string_view mention, std::string_view entity_id) const;

  // Highest-count candidate; ties go to the smallest entity id.
  std::optional<std::string> top1(std::string_view mention) const;
  std::optional<std::string> top1_normalized(std::string_view normalized) const;

  const Candidates* candidates(std::string_view normalized) const;
  std::uint64_t total(std::string_view normalized) const;

  const std::map<std::string, Candidates, std::less<>>& table() const { return table_; }
  std::size_t mention_count() const { return table_.size(); }
  bool empty() const { return table_.empty(); }

  bool operator==(const AliasTable& other) const { return table_ == other.table_ && totals_ == other.totals_; }

 private:
  std::map<std::string, Candidates, std::less<>> table_;
  std::map<std::string, std::uint64_t, std::less<>> totals_;
};

struct AliasDiagnostics {
  std::size_t anchors_read = 0;
  std::size_t unknown_entity = 0;
  std::size_t empty_surface = 0;

  bool operator==(const AliasDiagnostics&) const = default;
};

struct AliasBuild {
  AliasTable table;
  AliasDiagnostics diagnostics;
};

// Counts (normalize(surface), entity) pairs. Anchors naming an entity absent
// from `kg` are skipped and tallied; pass nullptr to skip the check.
AliasBuild build_alias_table(std::span<const Anchor> anchors, const KnowledgeGraph* kg);

// One anchor per entity title.
std::vector<Anchor> title_anchors(const KnowledgeGraph& kg);

// Anchor corpus: surface<TAB>entity_id per line.
std::vector<Anchor> load_anchors(const std::string& path);
void save_anchors(std::span<const Anchor> anchors, const std::string& path);

// mention<TAB>entity_id<TAB>count, sorted by (mention, count desc, entity_id).
void save_alias_table(const AliasTable& table, const std::string& path);
std::string format_alias_table(const AliasTable& table);
AliasTable load_alias_table(const std::string& path);

}  // namespace mekb
