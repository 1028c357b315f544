#include <doctest.h>

#include <random>

#include "mekbrec/error.hpp"
#include "mekbrec/linker.hpp"
#include "mekbrec/text.hpp"
#include "support.hpp"

using namespace mekb;

namespace {

AliasTable table_of(std::initializer_list<std::pair<const char*, const char*>> entries) {
  AliasTable t;
  for (const auto& [m, e] : entries) t.add_normalized(text::normalize(m), e);
  return t;
}

std::vector<std::string> surfaces(const std::vector<Mention>& ms) {
  std::vector<std::string> out;
  for (const auto& m : ms) out.push_back(m.surface);
  return out;
}

// Greedy longest match by trying every substring at each boundary position.
std::vector<Mention> brute_force_scan(const std::string& norm, const AliasTable& t) {
  const auto offs = text::codepoint_offsets(norm);
  const auto cps = text::decode_utf8(norm);
  auto boundary = [&](std::size_t k) {
    return k == 0 || k == cps.size() ||
           !(text::is_spaced_word_char(cps[k - 1]) && text::is_spaced_word_char(cps[k]));
  };
  std::vector<Mention> out;
  std::size_t i = 0;
  while (i < cps.size()) {
    std::size_t best = 0;
    if (boundary(i) && !text::is_space(cps[i])) {
      for (std::size_t j = cps.size(); j >= i + 2; --j) {
        if (!boundary(j)) continue;
        const std::string sub = norm.substr(offs[i], offs[j] - offs[i]);
        if (t.candidates(sub) != nullptr) {
          best = j;
          break;
        }
      }
    }
    if (best) {
      out.push_back({offs[i], offs[best], norm.substr(offs[i], offs[best] - offs[i])});
      i = best;
    } else {
      ++i;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("longest match wins") {
  const auto t = table_of({{"manchester united f.c.", "Q1"}, {"manchester", "Q2"}});
  const auto ms = extract_mentions("Manchester United F.C. won", t);
  CHECK(surfaces(ms) == std::vector<std::string>{"manchester united f.c."});
  CHECK(ms[0].begin == 0);
}

TEST_CASE("no hits and empty text") {
  const auto t = table_of({{"jaguar", "Q1"}});
  CHECK(extract_mentions("nothing here", t).empty());
  CHECK(extract_mentions("", t).empty());
}

TEST_CASE("repeated mention yields distinct spans") {
  const auto t = table_of({{"jaguar", "Q1"}});
  const auto ms = extract_mentions("jaguar jaguar", t);
  REQUIRE(ms.size() == 2);
  CHECK(ms[0].begin == 0);
  CHECK(ms[1].begin == 7);
  CHECK(ms == brute_force_scan("jaguar jaguar", t));
}

TEST_CASE("word boundaries apply to spaced scripts only") {
  const auto t = table_of({{"art", "Q1"}, {"東京", "Q2"}});
  CHECK(extract_mentions("start", t).empty());
  CHECK(surfaces(extract_mentions("art, start.", t)) == std::vector<std::string>{"art"});
  CHECK(surfaces(extract_mentions("私は東京に", t)) == std::vector<std::string>{"東京"});
}

TEST_CASE("single-character mentions are ignored") {
  const auto t = table_of({{"a", "Q1"}, {"ab", "Q2"}});
  CHECK(surfaces(extract_mentions("a ab", t)) == std::vector<std::string>{"ab"});
}

TEST_CASE("scanner matches a brute-force substring oracle") {
  const auto t = table_of({{"new york", "Q1"}, {"new", "Q2"}, {"york city", "Q3"}, {"city", "Q4"},
                           {"ny", "Q5"}, {"new york city", "Q6"}, {"東京", "Q7"}, {"京都", "Q8"}});
  const char* const words[] = {"new", "york", "city", "ny", "newyork", "東京", "京都", "東", "of", "the"};
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> w(0, 9), len(0, 8), join(0, 3);
  for (int trial = 0; trial < 500; ++trial) {
    std::string s;
    const int n = len(rng);
    for (int i = 0; i < n; ++i) {
      s += words[w(rng)];
      s += join(rng) == 0 ? "" : " ";
    }
    const std::string norm = text::normalize(s);
    CHECK(extract_mentions(norm, t) == brute_force_scan(norm, t));
  }
}

TEST_CASE("link_item unions top1 links and explicit entities") {
  KnowledgeGraph kg;
  kg.add_entity({"Qcar", "Jaguar Cars", EntitySource::global, 1.0});
  kg.add_entity({"Qanimal", "Jaguar", EntitySource::global, 1.0});
  kg.add_entity({"Qbrand", "Acme", EntitySource::brand, 0.5});
  AliasTable t;
  t.add_normalized("jaguar", "Qcar", 3);
  t.add_normalized("jaguar", "Qanimal", 1);

  Item item{"i1", "d", "JAGUAR", {}, {}};
  CHECK(link_item(item, t, kg).entities == std::set<std::string>{"Qcar"});

  item.text = "";
  item.explicit_entities = {"Qbrand"};
  CHECK(link_item(item, t, kg).entities == std::set<std::string>{"Qbrand"});

  item.text = "jaguar";
  item.explicit_entities = {"Qcar"};
  CHECK(link_item(item, t, kg).entities == std::set<std::string>{"Qcar"});

  item.explicit_entities = {"Qmissing"};
  CHECK_THROWS_AS(link_item(item, t, kg), LinkError);
}

TEST_CASE("linking is invariant under casing and compatibility forms") {
  KnowledgeGraph kg;
  kg.add_entity({"Q1", "Tokyo Tower", EntitySource::global, 1.0});
  const auto t = table_of({{"tokyo tower", "Q1"}});
  const Item a{"a", "d", "visit Tokyo Tower", {}, {}};
  const Item b{"b", "d", "VISIT ＴＯＫＹＯ　ＴＯＷＥＲ", {}, {}};
  CHECK(link_item(a, t, kg).entities == link_item(b, t, kg).entities);
  CHECK(link_item(a, t, kg).entities.size() == 1);
}

TEST_CASE("linked items file round-trip") {
  const auto dir = testsupport::scratch("linked_io");
  const std::vector<LinkedItem> items{{"i1", {"Q2", "Q1"}}, {"i2", {}}};
  save_linked_items(items, (dir / "l.tsv").string());
  CHECK(testsupport::read_file(dir / "l.tsv") == "i1\tQ1\tQ2\ni2\n");
  CHECK(load_linked_items((dir / "l.tsv").string()) == items);
}
