#include "mekbrec/alias.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "mekbrec/error.hpp"
#include "mekbrec/kgstore.hpp"
#include "mekbrec/text.hpp"
#include "mekbrec/tsv.hpp"

namespace mekb {

void AliasTable::add_normalized(const std::string& mention, const std::string& entity_id,
                                std::uint64_t count) {
  if (count == 0) return;
  table_[mention][entity_id] += count;
  totals_[mention] += count;
}

void AliasTable::merge(const AliasTable& other) {
  for (const auto& [mention, cands] : other.table_) {
    for (const auto& [entity, count] : cands) add_normalized(mention, entity, count);
  }
}

const AliasTable::Candidates* AliasTable::candidates(std::string_view normalized) const {
  auto it = table_.find(normalized);
  return it == table_.end() ? nullptr : &it->second;
}

std::uint64_t AliasTable::total(std::string_view normalized) const {
  auto it = totals_.find(normalized);
  return it == totals_.end() ? 0 : it->second;
}

PriorFraction AliasTable::prior_fraction(std::string_view mention,
                                         std::string_view entity_id) const {
  const std::string m = text::normalize(mention);
  const Candidates* cands = candidates(m);
  if (!cands) return {};
  auto it = cands->find(entity_id);
  if (it == cands->end()) return {0, total(m)};
  return {it->second, total(m)};
}

double AliasTable::prior(std::string_view mention, std::string_view entity_id) const {
  const PriorFraction f = prior_fraction(mention, entity_id);
  if (f.denominator == 0) return 0.0;
  return static_cast<double>(f.numerator) / static_cast<double>(f.denominator);
}

std::optional<std::string> AliasTable::top1_normalized(std::string_view normalized) const {
  const Candidates* cands = candidates(normalized);
  if (!cands || cands->empty()) return std::nullopt;
  // Candidates iterate in ascending id order, so strict > keeps the smallest id on ties.
  auto best = cands->begin();
  for (auto it = cands->begin(); it != cands->end(); ++it) {
    if (it->second > best->second) best = it;
  }
  return best->first;
}

std::optional<std::string> AliasTable::top1(std::string_view mention) const {
  return top1_normalized(text::normalize(mention));
}

AliasBuild build_alias_table(std::span<const Anchor> anchors, const KnowledgeGraph* kg) {
  AliasBuild out;
  for (const auto& anchor : anchors) {
    ++out.diagnostics.anchors_read;
    if (kg && !kg->contains(anchor.entity_id)) {
      ++out.diagnostics.unknown_entity;
      continue;
    }
    std::string mention = text::normalize(anchor.surface);
    if (mention.empty()) {
      ++out.diagnostics.empty_surface;
      continue;
    }
    out.table.add_normalized(mention, anchor.entity_id);
  }
  return out;
}

std::vector<Anchor> title_anchors(const KnowledgeGraph& kg) {
  std::vector<Anchor> anchors;
  anchors.reserve(kg.entity_count());
  for (const auto& [id, e] : kg.entities()) anchors.push_back({e.title, id});
  return anchors;
}

std::vector<Anchor> load_anchors(const std::string& path) {
  std::vector<Anchor> anchors;
  tsv::for_each_line(path, [&](std::size_t line_no, const std::string& line) {
    auto fields = tsv::split(line);
    if (fields.size() != 2) throw ParseError(path, line_no, "expected surface<TAB>entity_id");
    anchors.push_back({std::move(fields[0]), std::move(fields[1])});
  });
  return anchors;
}

void save_anchors(std::span<const Anchor> anchors, const std::string& path) {
  auto out = tsv::open_output(path);
  for (const auto& a : anchors) out << tsv::join({a.surface, a.entity_id}) << '\n';
}

std::string format_alias_table(const AliasTable& table) {
  std::ostringstream out;
  for (const auto& [mention, cands] : table.table()) {
    std::vector<std::pair<std::string, std::uint64_t>> rows(cands.begin(), cands.end());
    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    for (const auto& [entity, count] : rows) {
      out << tsv::join({mention, entity, std::to_string(count)}) << '\n';
    }
  }
  return out.str();
}

void save_alias_table(const AliasTable& table, const std::string& path) {
  auto out = tsv::open_output(path);
  out << format_alias_table(table);
}

AliasTable load_alias_table(const std::string& path) {
  AliasTable table;
  tsv::for_each_line(path, [&](std::size_t line_no, const std::string& line) {
    const auto fields = tsv::split(line);
    if (fields.size() != 3) throw ParseError(path, line_no, "expected mention<TAB>entity<TAB>count");
    std::uint64_t count = 0;
    const auto& c = fields[2];
    auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), count);
    if (ec != std::errc() || ptr != c.data() + c.size() || count == 0) {
      throw ParseError(path, line_no, "count must be a positive integer");
    }
    table.add_normalized(fields[0], fields[1], count);
  });
  return table;
}

}  // namespace mekb
