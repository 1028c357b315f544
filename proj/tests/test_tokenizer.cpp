#include <doctest.h>

#include <random>

#include "mekbrec/text.hpp"
#include "mekbrec/tokenizer.hpp"
#include "support.hpp"

using namespace mekb;

namespace {

std::vector<std::string> pieces(const std::vector<TokenId>& ids, const Vocab& v) {
  std::vector<std::string> out;
  for (auto id : ids) out.push_back(v.token(id));
  return out;
}

Vocab vocab_of(std::initializer_list<const char*> tokens) {
  Vocab v;
  for (const char* t : tokens) v.add(t);
  return v;
}

}  // namespace

TEST_CASE("specials occupy ids 0-3") {
  const Vocab v;
  CHECK(v.size() == 4);
  CHECK(v.token(Vocab::kPad) == "[PAD]");
  CHECK(v.token(Vocab::kUnk) == "[UNK]");
  CHECK(v.token(Vocab::kSep) == "[SEP]");
  CHECK(v.token(Vocab::kMask) == "[MASK]");
}

TEST_CASE("train_vocab merge trace") {
  const std::vector<std::string> corpus{"aaa"};
  // Base alphabet is {a, ##a}; the first merge joins the smallest tied pair (##a, ##a).
  const Vocab six = train_vocab(corpus, 6);
  CHECK(std::vector<std::string>(six.tokens().begin() + 4, six.tokens().end()) ==
        std::vector<std::string>{"##a", "a"});
  const Vocab seven = train_vocab(corpus, 7);
  CHECK(seven.tokens().back() == "##aa");
  CHECK(pieces(tokenize("aaa", seven), seven) == std::vector<std::string>{"a", "##aa"});
  CHECK_THROWS_AS(train_vocab(corpus, 5), std::invalid_argument);
  CHECK_THROWS_AS(train_vocab(std::vector<std::string>{}, 100), std::invalid_argument);
}

TEST_CASE("train_vocab reaches the requested size") {
  std::mt19937_64 rng(2);
  std::vector<std::string> titles;
  for (int i = 0; i < 100; ++i) {
    std::string t;
    for (int w = 0; w < 2; ++w) {
      for (int c = 0; c < 6; ++c) t.push_back(static_cast<char>('a' + rng() % 8));
      t.push_back(' ');
    }
    titles.push_back(t);
  }
  const Vocab v = train_vocab(titles, 200);
  CHECK(v.size() == 200);
  CHECK(train_vocab(titles, 200) == v);
  // Every corpus character is covered, so no title produces UNK.
  for (const auto& t : titles) {
    for (auto id : tokenize(t, v)) CHECK(id != Vocab::kUnk);
  }
}

TEST_CASE("greedy longest match") {
  const Vocab v = vocab_of({"a", "##a", "##aa"});
  CHECK(pieces(tokenize("aaaa", v), v) == std::vector<std::string>{"a", "##aa", "##a"});
  CHECK(tokenize("a", v) == std::vector<TokenId>{4});
  CHECK(tokenize("☂", v) == std::vector<TokenId>{Vocab::kUnk});
  CHECK(tokenize("a ☂ a", v) == std::vector<TokenId>{4, Vocab::kUnk, 4});
}

TEST_CASE("tokenize then detokenize is identity on in-vocab titles") {
  const std::vector<std::string> titles{"manchester united", "association football", "jaguar",
                                        "paris hilton", "東京 タワー"};
  const Vocab v = train_vocab(titles, 60);
  for (const auto& t : titles) {
    const auto norm = text::normalize(t);
    CHECK(detokenize(tokenize(norm, v), v) == norm);
  }
}

TEST_CASE("long words fall back to characters") {
  const std::string word(70, 'b');
  const Vocab v = vocab_of({"b", "##b", "bb"});
  const auto ids = tokenize(word, v);
  CHECK(ids.size() == 70);
  CHECK(detokenize(ids, v) == word);
}

TEST_CASE("build_sequence layout") {
  const Vocab v = vocab_of({"tok", "two"});
  KnowledgeGraph kg;
  kg.add_entity({"e1", "tok", EntitySource::global, 1.0});
  kg.add_entity({"e2", "two", EntitySource::global, 1.0});

  const MeKB one{"u", {{"e1", 1, 1, 1, 1.0}}};
  const TokenSequence s = build_sequence(one, kg, v, 4);
  CHECK(s.ids == std::vector<TokenId>{4, Vocab::kSep, Vocab::kPad, Vocab::kPad});
  CHECK(s.attention_mask == std::vector<std::uint8_t>{1, 1, 0, 0});
  CHECK(s.length() == 2);

  const MeKB two{"u", {{"e2", 1, 1, 1, 0.6}, {"e1", 1, 1, 1, 0.4}}};
  const TokenSequence t = build_sequence(two, kg, v, 3);
  CHECK(t.ids == std::vector<TokenId>{5, Vocab::kSep, 4});
  CHECK(t.length() == 3);

  const MeKB rescaled{"u", {{"e2", 9, 9, 9, 0.9}, {"e1", 1, 1, 1, 0.1}}};
  CHECK(build_sequence(rescaled, kg, v, 8) == build_sequence(two, kg, v, 8));

  const TokenSequence empty = build_sequence(MeKB{"u", {}}, kg, v, 4);
  CHECK(empty.length() == 0);
  CHECK(empty.ids == std::vector<TokenId>(4, Vocab::kPad));
}

TEST_CASE("sequence invariants on random titles") {
  std::mt19937_64 rng(4);
  std::vector<std::string> titles;
  for (int i = 0; i < 50; ++i) titles.push_back("w" + std::to_string(rng() % 1000) + " x" + std::to_string(i));
  const Vocab v = train_vocab(titles, 80);
  for (std::size_t n_max : {1, 5, 16, 64}) {
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<std::string> sub(titles.begin(), titles.begin() + static_cast<long>(rng() % 10));
      const auto s = build_sequence(sub, v, n_max);
      REQUIRE(s.ids.size() == n_max);
      REQUIRE(s.attention_mask.size() == n_max);
      bool padding = false;
      for (std::size_t i = 0; i < n_max; ++i) {
        if (s.ids[i] == Vocab::kPad) padding = true;
        CHECK(s.attention_mask[i] == (s.ids[i] == Vocab::kPad ? 0 : 1));
        if (padding) CHECK(s.ids[i] == Vocab::kPad);
      }
    }
  }
}

TEST_CASE("vocab file round-trip") {
  const auto dir = testsupport::scratch("vocab_io");
  const Vocab v = vocab_of({"a", "##b"});
  save_vocab(v, (dir / "v.txt").string());
  CHECK(load_vocab((dir / "v.txt").string()) == v);
  testsupport::write_file(dir / "bad.txt", "[UNK]\n[PAD]\n[SEP]\n[MASK]\n");
  CHECK_THROWS(load_vocab((dir / "bad.txt").string()));
}
