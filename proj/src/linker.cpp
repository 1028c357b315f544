#include "mekbrec/linker.hpp"

#include "mekbrec/error.hpp"
#include "mekbrec/text.hpp"
#include "mekbrec/tsv.hpp"

namespace mekb {
namespace {

constexpr std::uint32_t kNoNode = 0xFFFFFFFFu;

std::uint64_t edge_key(std::uint32_t node, unsigned char byte) {
  return (static_cast<std::uint64_t>(node) << 8) | byte;
}

}  // namespace

Gazetteer::Gazetteer(const AliasTable& table) {
  for (const auto& [mention, cands] : table.table()) insert(mention);
}

void Gazetteer::insert(std::string_view normalized) {
  if (text::codepoint_count(normalized) < kMinMentionChars) return;
  std::uint32_t node = 0;
  for (char c : normalized) {
    const auto byte = static_cast<unsigned char>(c);
    std::uint32_t next = child(node, byte);
    if (next == kNoNode) {
      next = static_cast<std::uint32_t>(terminal_.size());
      terminal_.push_back(false);
      edges_.emplace(edge_key(node, byte), next);
    }
    node = next;
  }
  if (!terminal_[node]) {
    terminal_[node] = true;
    ++size_;
  }
}

std::uint32_t Gazetteer::child(std::uint32_t node, unsigned char byte) const {
  auto it = edges_.find(edge_key(node, byte));
  return it == edges_.end() ? kNoNode : it->second;
}

bool Gazetteer::contains(std::string_view normalized) const {
  std::uint32_t node = 0;
  for (char c : normalized) {
    node = child(node, static_cast<unsigned char>(c));
    if (node == kNoNode) return false;
  }
  return terminal_[node];
}

std::vector<Mention> Gazetteer::scan(std::string_view s) const {
  std::vector<Mention> mentions;
  if (s.empty() || size_ == 0) return mentions;
  const std::vector<char32_t> cps = text::decode_utf8(s);
  const std::vector<std::size_t> offsets = text::codepoint_offsets(s);
  const std::size_t n = cps.size();
  if (offsets.size() != n + 1) return mentions;  // not valid UTF-8; normalize() first

  std::vector<bool> spaced(n);
  for (std::size_t k = 0; k < n; ++k) spaced[k] = text::is_spaced_word_char(cps[k]);
  auto boundary = [&](std::size_t k) {
    return k == 0 || k == n || !(spaced[k - 1] && spaced[k]);
  };

  std::size_t k = 0;
  while (k < n) {
    if (!boundary(k) || text::is_space(cps[k])) {
      ++k;
      continue;
    }
    std::size_t best = 0;
    std::uint32_t node = 0;
    std::size_t j = k;  // code point index at the current byte position
    for (std::size_t b = offsets[k]; b < s.size(); ++b) {
      node = child(node, static_cast<unsigned char>(s[b]));
      if (node == kNoNode) break;
      if (b + 1 == offsets[j + 1]) {
        ++j;
        if (terminal_[node] && boundary(j)) best = j;
      }
    }
    if (best > k) {
      mentions.push_back({offsets[k], offsets[best],
                          std::string(s.substr(offsets[k], offsets[best] - offsets[k]))});
      k = best;
    } else {
      ++k;
    }
  }
  return mentions;
}

std::vector<Mention> extract_mentions(std::string_view text, const Gazetteer& gazetteer) {
  return gazetteer.scan(text::normalize(text));
}

std::vector<Mention> extract_mentions(std::string_view text, const AliasTable& table) {
  return extract_mentions(text, Gazetteer(table));
}

LinkedItem link_item(const Item& item, const AliasTable& table, const Gazetteer& gazetteer,
                     const KnowledgeGraph& kg) {
  LinkedItem out{item.item_id, {}};
  for (const auto& m : extract_mentions(item.text, gazetteer)) {
    auto entity = table.top1_normalized(m.surface);
    if (entity && kg.contains(*entity)) out.entities.insert(std::move(*entity));
  }
  for (const auto& e : item.explicit_entities) {
    if (!kg.contains(e)) {
      throw LinkError("item " + item.item_id + " names unknown entity " + e);
    }
    out.entities.insert(e);
  }
  return out;
}

LinkedItem link_item(const Item& item, const AliasTable& table, const KnowledgeGraph& kg) {
  return link_item(item, table, Gazetteer(table), kg);
}

void save_linked_items(std::span<const LinkedItem> items, const std::string& path) {
  auto out = tsv::open_output(path);
  for (const auto& item : items) {
    std::vector<std::string> fields{item.item_id};
    fields.insert(fields.end(), item.entities.begin(), item.entities.end());
    out << tsv::join(fields) << '\n';
  }
}

std::vector<LinkedItem> load_linked_items(const std::string& path) {
  std::vector<LinkedItem> items;
  tsv::for_each_line(path, [&](std::size_t line_no, const std::string& line) {
    auto fields = tsv::split(line);
    if (fields[0].empty()) throw ParseError(path, line_no, "empty item id");
    LinkedItem item{fields[0], {}};
    for (std::size_t i = 1; i < fields.size(); ++i) {
      if (!fields[i].empty()) item.entities.insert(std::move(fields[i]));
    }
    items.push_back(std::move(item));
  });
  return items;
}

}  // namespace mekb
