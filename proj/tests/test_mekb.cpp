#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "mekbrec/mekb.hpp"
#include "support.hpp"

using namespace mekb;

namespace {

KnowledgeGraph entities(int n, EntitySource src = EntitySource::global) {
  KnowledgeGraph kg;
  for (int i = 1; i <= n; ++i) {
    const std::string id = "e" + std::to_string(i);
    kg.add_entity({id, "title " + id, src, base_weight(src)});
  }
  return kg;
}

std::vector<const LinkedItem*> pointers(const std::vector<LinkedItem>& items) {
  std::vector<const LinkedItem*> out;
  for (const auto& i : items) out.push_back(&i);
  return out;
}

}  // namespace

TEST_CASE("smooth") {
  CHECK(smooth(5, 10) == 5.0);
  CHECK(smooth(10, 10) == 10.0);
  CHECK(smooth(27, 10) == doctest::Approx(27.0 * (1.0 + std::log(2.7))).epsilon(1e-15));
  CHECK(smooth(27, 10) == doctest::Approx(53.816).epsilon(1e-4));
  CHECK(smooth(0, 10) == 0.0);
  for (std::uint64_t ks : {1, 3, 10, 50}) {
    for (std::uint64_t k = 0; k < 300; ++k) CHECK(smooth(k + 1, ks) > smooth(k, ks));
    CHECK(smooth(ks, ks) == static_cast<double>(ks));
  }
}

TEST_CASE("compute_idf") {
  const std::map<std::string, std::set<std::string>> inc{
      {"u1", {"a", "b", "all"}}, {"u2", {"b", "all"}}, {"u3", {"all"}}, {"u4", {"all"}}};
  const IdfTable idf = compute_idf(inc);
  CHECK(idf.n_users == 4);
  CHECK(idf.at("a") == doctest::Approx(1.38629).epsilon(1e-5));
  CHECK(idf.at("b") == doctest::Approx(0.69315).epsilon(1e-5));
  CHECK(idf.at("all") == 0.0);
  CHECK_THROWS_AS(idf.at("zzz"), std::out_of_range);
  CHECK_THROWS_AS(compute_idf({}), std::invalid_argument);
}

TEST_CASE("build_mekb hand oracle") {
  const KnowledgeGraph kg = entities(2);
  IdfTable idf;
  idf.n_users = 4;
  idf.idf = {{"e1", std::log(2.0)}, {"e2", std::log(4.0)}};
  const std::vector<LinkedItem> items{{"i1", {"e1", "e2"}}, {"i2", {"e1"}}, {"i3", {"e1"}}};
  const MeKB m = build_mekb("u", pointers(items), idf, kg);
  REQUIRE(m.entries.size() == 2);
  const double den = 3 * std::log(2.0) + std::log(4.0);
  CHECK(m.entries[0].entity_id == "e1");
  CHECK(m.entries[0].raw_count == 3);
  CHECK(m.entries[0].score == doctest::Approx(3 * std::log(2.0) / den).epsilon(1e-12));
  CHECK(m.entries[1].score == doctest::Approx(std::log(4.0) / den).epsilon(1e-12));
  CHECK(m.entries[0].score == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("build_mekb edge cases") {
  const KnowledgeGraph kg = entities(2);
  IdfTable idf;
  idf.n_users = 2;
  idf.idf = {{"e1", std::log(2.0)}, {"e2", 0.0}};
  const std::vector<LinkedItem> single{{"i", {"e1"}}};
  const MeKB one = build_mekb("u", pointers(single), idf, kg);
  REQUIRE(one.entries.size() == 1);
  CHECK(one.entries[0].score == 1.0);

  const std::vector<LinkedItem> shared{{"i", {"e2"}}};
  CHECK(build_mekb("u", pointers(shared), idf, kg).empty());
  CHECK(build_mekb("u", {}, idf, kg).empty());
}

TEST_CASE("base weights multiply tf") {
  KnowledgeGraph kg;
  kg.add_entity({"g", "G", EntitySource::global, 1.0});
  kg.add_entity({"b", "B", EntitySource::brand, 0.5});
  IdfTable idf;
  idf.n_users = 2;
  idf.idf = {{"g", 1.0}, {"b", 1.0}};
  const std::vector<LinkedItem> items{{"i", {"g", "b"}}};
  const MeKB on = build_mekb("u", pointers(items), idf, kg);
  CHECK(on.entries[0].entity_id == "g");
  CHECK(on.entries[0].score == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  const MeKB off = build_mekb("u", pointers(items), idf, kg, {10, false});
  CHECK(off.entries[0].entity_id == "b");  // equal scores, ascending id
  CHECK(off.entries[0].score == 0.5);
}

TEST_CASE("build_mekb matches a direct evaluation on random instances") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const int n_ent = 1 + static_cast<int>(rng() % 20);
    const int n_users = 1 + static_cast<int>(rng() % 10);
    KnowledgeGraph kg;
    std::vector<double> weight(n_ent);
    for (int e = 0; e < n_ent; ++e) {
      const auto src = static_cast<EntitySource>(rng() % 4);
      weight[e] = base_weight(src);
      kg.add_entity({"e" + std::to_string(e), "t" + std::to_string(e), src, weight[e]});
    }
    // counts[u][e]: number of the user's items linked to e.
    std::vector<std::vector<int>> counts(n_users, std::vector<int>(n_ent, 0));
    std::vector<std::vector<LinkedItem>> items(n_users);
    for (int u = 0; u < n_users; ++u) {
      const int n_items = static_cast<int>(rng() % 40);
      for (int i = 0; i < n_items; ++i) {
        LinkedItem li{"i" + std::to_string(i), {}};
        for (int e = 0; e < n_ent; ++e) {
          if (rng() % 3 == 0) {
            li.entities.insert("e" + std::to_string(e));
            ++counts[u][e];
          }
        }
        items[u].push_back(li);
      }
    }
    std::map<std::string, std::set<std::string>> inc;
    for (int u = 0; u < n_users; ++u) inc["u" + std::to_string(u)] = interest_set(pointers(items[u]));
    const IdfTable idf = compute_idf(inc);
    const std::uint64_t k_star = 1 + rng() % 12;
    for (int u = 0; u < n_users; ++u) {
      const MeKB m = build_mekb("u" + std::to_string(u), pointers(items[u]), idf, kg, {k_star, true});
      // Direct evaluation.
      std::map<std::string, double> expect;
      double den = 0.0;
      for (int e = 0; e < n_ent; ++e) {
        const int k = counts[u][e];
        if (k == 0) continue;
        int df = 0;
        for (int v = 0; v < n_users; ++v) df += counts[v][e] > 0;
        const double idf_e = std::log(static_cast<double>(n_users) / df);
        const double ks = static_cast<double>(k_star);
        const double s = k <= static_cast<int>(k_star) ? k : k * (1.0 + std::log(k / ks));
        const double w = s * weight[e] * idf_e;
        if (idf_e > 0) expect["e" + std::to_string(e)] = w;
        den += w;
      }
      if (den == 0.0) {
        CHECK(m.empty());
        continue;
      }
      REQUIRE(m.entries.size() == expect.size());
      double total = 0.0;
      for (const auto& entry : m.entries) {
        const double want = expect.at(entry.entity_id) / den;
        CHECK(std::abs(entry.score - want) <= 1e-12 * std::max(1.0, want));
        total += entry.score;
      }
      CHECK(std::abs(total - 1.0) < 1e-9);
      for (std::size_t i = 1; i < m.entries.size(); ++i) {
        const auto& a = m.entries[i - 1];
        const auto& b = m.entries[i];
        CHECK((a.score > b.score || (a.score == b.score && a.entity_id < b.entity_id)));
      }
    }
  }
}

TEST_CASE("mekb file round-trip") {
  const auto dir = testsupport::scratch("mekb_io");
  MeKB m{"u1", {{"e1", 3, 3.0, 0.5, 0.6}, {"e2", 1, 1.0, 1.0, 0.4}}};
  const std::vector<MeKB> ms{m, MeKB{"u2", {}}};
  save_mekbs(ms, (dir / "m.tsv").string());
  CHECK(testsupport::read_file(dir / "m.tsv") ==
        "u1\te1\t3\t0.600000000\te2\t1\t0.400000000\nu2\n");
  const auto back = load_mekbs((dir / "m.tsv").string());
  REQUIRE(back.size() == 2);
  CHECK(back[0].entries[1].entity_id == "e2");
  CHECK(back[0].entries[1].raw_count == 1);
  CHECK(back[0].entries[0].score == 0.6);
  CHECK(back[1].empty());
}
