#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mekbrec/alias.hpp"
#include "mekbrec/item.hpp"
#include "mekbrec/kgstore.hpp"

namespace mekb {

struct Mention {
  std::size_t begin = 0;  // byte offsets into the normalized text
  std::size_t end = 0;
  std::string surface;

  bool operator==(const Mention&) const = default;
};

struct LinkedItem {
  std::string item_id;
  std::set<std::string> entities;

  bool operator==(const LinkedItem&) const = default;
};

// Byte trie over alias-table mentions, for greedy longest-match scanning.
// Mentions shorter than two code points are not indexed.
class Gazetteer {
 public:
  static constexpr std::size_t kMinMentionChars = 2;

  Gazetteer() = default;
  explicit Gazetteer(const AliasTable& table);

  void insert(std::string_view normalized);
  bool contains(std::string_view normalized) const;
  std::size_t size() const { return size_; }

  // Non-overlapping matches over already-normalized text, scanning left to
  // right; the longest mention wins at each start. In whitespace-separated
  // scripts a match must start and end on a word boundary.
  std::vector<Mention> scan(std::string_view normalized) const;

 private:
  std::uint32_t child(std::uint32_t node, unsigned char byte) const;

  std::unordered_map<std::uint64_t, std::uint32_t> edges_;
  std::vector<bool> terminal_{false};
  std::size_t size_ = 0;
};

std::vector<Mention> extract_mentions(std::string_view text, const Gazetteer& gazetteer);
std::vector<Mention> extract_mentions(std::string_view text, const AliasTable& table);

// {top1(m) for every extracted mention} united with the item's explicit
// entities. Throws LinkError if an explicit entity is not in the KG.
LinkedItem link_item(const Item& item, const AliasTable& table, const Gazetteer& gazetteer,
                     const KnowledgeGraph& kg);
LinkedItem link_item(const Item& item, const AliasTable& table, const KnowledgeGraph& kg);

// item_id<TAB>entity<TAB>entity... with entities in ascending order.
void save_linked_items(std::span<const LinkedItem> items, const std::string& path);
std::vector<LinkedItem> load_linked_items(const std::string& path);

}  // namespace mekb
