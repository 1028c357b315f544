#include "mekbrec/mekb.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "mekbrec/error.hpp"
#include "mekbrec/tsv.hpp"

namespace mekb {

double IdfTable::at(std::string_view entity_id) const {
  auto it = idf.find(entity_id);
  if (it == idf.end()) {
    throw std::out_of_range("entity " + std::string(entity_id) + " missing from idf table");
  }
  return it->second;
}

double smooth(std::uint64_t k, std::uint64_t k_star) {
  const auto kd = static_cast<double>(k);
  if (k <= k_star) return kd;
  return kd * (1.0 + std::log(kd / static_cast<double>(k_star)));
}

IdfTable compute_idf(const std::map<std::string, std::set<std::string>>& incidence) {
  if (incidence.empty()) throw std::invalid_argument("compute_idf needs at least one user");
  std::map<std::string, std::size_t, std::less<>> users_with;
  for (const auto& [user, entities] : incidence) {
    for (const auto& e : entities) ++users_with[e];
  }
  IdfTable out;
  out.n_users = incidence.size();
  const auto n = static_cast<double>(out.n_users);
  for (const auto& [e, count] : users_with) {
    out.idf.emplace(e, count == out.n_users ? 0.0 : std::log(n / static_cast<double>(count)));
  }
  return out;
}

std::set<std::string> interest_set(std::span<const LinkedItem* const> positives) {
  std::set<std::string> out;
  for (const LinkedItem* item : positives) out.insert(item->entities.begin(), item->entities.end());
  return out;
}

MeKB build_mekb(const std::string& user_id, std::span<const LinkedItem* const> positives,
                const IdfTable& idf, const KnowledgeGraph& kg, const MeKBConfig& cfg) {
  if (cfg.k_star < 1) throw std::invalid_argument("k_star must be >= 1");
  std::map<std::string, std::uint64_t> counts;
  for (const LinkedItem* item : positives) {
    for (const auto& e : item->entities) ++counts[e];
  }

  MeKB out{user_id, {}};
  double denominator = 0.0;
  for (const auto& [entity, k] : counts) {
    const double entity_idf = idf.at(entity);
    if (entity_idf <= 0.0) continue;
    const double weight = cfg.apply_base_weight ? kg.at(entity).base_weight : 1.0;
    InterestEntry entry{entity, k, smooth(k, cfg.k_star) * weight, entity_idf, 0.0};
    denominator += entry.tf * entry.idf;
    out.entries.push_back(std::move(entry));
  }
  if (!(denominator > 0.0)) {
    out.entries.clear();
    return out;
  }
  for (auto& entry : out.entries) entry.score = entry.tf * entry.idf / denominator;
  std::sort(out.entries.begin(), out.entries.end(), [](const auto& a, const auto& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.entity_id < b.entity_id;
  });
  return out;
}

std::string format_mekb(const MeKB& mekb) {
  std::vector<std::string> fields{mekb.user_id};
  char buf[64];
  for (const auto& e : mekb.entries) {
    fields.push_back(e.entity_id);
    fields.push_back(std::to_string(e.raw_count));
    std::snprintf(buf, sizeof buf, "%.9f", e.score);
    fields.emplace_back(buf);
  }
  return tsv::join(fields);
}

void save_mekbs(std::span<const MeKB> mekbs, const std::string& path) {
  auto out = tsv::open_output(path);
  for (const auto& m : mekbs) out << format_mekb(m) << '\n';
}

std::vector<MeKB> load_mekbs(const std::string& path) {
  std::vector<MeKB> out;
  tsv::for_each_line(path, [&](std::size_t line_no, const std::string& line) {
    auto fields = tsv::split(line);
    if (fields.empty() || fields[0].empty() || (fields.size() - 1) % 3 != 0) {
      throw ParseError(path, line_no, "expected user_id followed by (entity, count, score) triples");
    }
    MeKB m{fields[0], {}};
    for (std::size_t i = 1; i < fields.size(); i += 3) {
      InterestEntry e;
      e.entity_id = fields[i];
      try {
        e.raw_count = std::stoull(fields[i + 1]);
        e.score = std::stod(fields[i + 2]);
      } catch (const std::exception&) {
        throw ParseError(path, line_no, "bad count or score for " + fields[i]);
      }
      m.entries.push_back(std::move(e));
    }
    out.push_back(std::move(m));
  });
  return out;
}

}  // namespace mekb
