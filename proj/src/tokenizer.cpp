#include "mekbrec/tokenizer.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <utility>

#include "mekbrec/error.hpp"
#include "mekbrec/text.hpp"
#include "mekbrec/tsv.hpp"

namespace mekb {
namespace {

const char* const kSpecialTokens[] = {"[PAD]", "[UNK]", "[SEP]", "[MASK]"};

std::string strip_continuation(const std::string& piece) {
  if (piece.starts_with(Vocab::kContinuation)) return piece.substr(Vocab::kContinuation.size());
  return piece;
}

void tokenize_chars(const std::vector<char32_t>& cps, const Vocab& vocab,
                    std::vector<TokenId>& out) {
  for (std::size_t i = 0; i < cps.size(); ++i) {
    std::string piece = text::encode_utf8(cps[i]);
    if (i > 0) piece.insert(0, Vocab::kContinuation);
    out.push_back(vocab.find(piece).value_or(Vocab::kUnk));
  }
}

void tokenize_word(std::string_view word, const Vocab& vocab, std::vector<TokenId>& out) {
  const std::vector<char32_t> cps = text::decode_utf8(word);
  if (cps.size() > kMaxWordChars) {
    tokenize_chars(cps, vocab, out);
    return;
  }
  const std::vector<std::size_t> offsets = text::codepoint_offsets(word);
  std::size_t start = 0;
  while (start < cps.size()) {
    std::size_t end = cps.size();
    std::optional<TokenId> match;
    for (; end > start; --end) {
      std::string piece(word.substr(offsets[start], offsets[end] - offsets[start]));
      if (start > 0) piece.insert(0, Vocab::kContinuation);
      match = vocab.find(piece);
      if (match) break;
    }
    if (match) {
      out.push_back(*match);
      start = end;
    } else {
      out.push_back(Vocab::kUnk);
      ++start;
    }
  }
}

}  // namespace

Vocab::Vocab() {
  for (const char* s : kSpecialTokens) add(s);
}

TokenId Vocab::add(const std::string& token) {
  if (auto it = index_.find(token); it != index_.end()) return it->second;
  const auto id = static_cast<TokenId>(tokens_.size());
  tokens_.push_back(token);
  index_.emplace(token, id);
  return id;
}

std::optional<TokenId> Vocab::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t TokenSequence::length() const {
  return static_cast<std::size_t>(std::count(attention_mask.begin(), attention_mask.end(), 1));
}

Vocab train_vocab(std::span<const std::string> titles, std::size_t vocab_size) {
  if (titles.empty()) throw std::invalid_argument("train_vocab: empty corpus");

  std::map<std::string, std::uint64_t> word_freq;
  for (const auto& title : titles) {
    const std::string norm = text::normalize(title);
    for (auto w : text::split_words(norm)) ++word_freq[std::string(w)];
  }
  if (word_freq.empty()) throw std::invalid_argument("train_vocab: corpus has no words");

  // Symbols are interned strings; each word is a sequence of symbol ids.
  std::vector<std::string> symbols;
  std::map<std::string, int> symbol_id;
  auto intern = [&](const std::string& s) {
    auto [it, inserted] = symbol_id.emplace(s, static_cast<int>(symbols.size()));
    if (inserted) symbols.push_back(s);
    return it->second;
  };
  std::vector<std::pair<std::vector<int>, std::uint64_t>> words;
  for (const auto& [w, freq] : word_freq) {
    const auto cps = text::decode_utf8(w);
    std::vector<int> seq;
    for (std::size_t i = 0; i < cps.size(); ++i) {
      std::string piece = text::encode_utf8(cps[i]);
      if (i > 0) piece.insert(0, Vocab::kContinuation);
      seq.push_back(intern(piece));
    }
    words.emplace_back(std::move(seq), freq);
  }

  std::set<std::string> alphabet(symbols.begin(), symbols.end());
  if (vocab_size < alphabet.size() + Vocab::kSpecialCount) {
    throw std::invalid_argument("train_vocab: vocab_size " + std::to_string(vocab_size) +
                                " is below alphabet size " + std::to_string(alphabet.size()) +
                                " + 4 specials");
  }
  Vocab vocab;
  for (const auto& s : alphabet) vocab.add(s);

  while (vocab.size() < vocab_size) {
    std::map<std::pair<int, int>, std::uint64_t> pair_freq;
    for (const auto& [seq, freq] : words) {
      for (std::size_t i = 0; i + 1 < seq.size(); ++i) pair_freq[{seq[i], seq[i + 1]}] += freq;
    }
    if (pair_freq.empty()) break;
    auto best = pair_freq.begin();
    for (auto it = pair_freq.begin(); it != pair_freq.end(); ++it) {
      if (it->second > best->second) {
        best = it;
      } else if (it->second == best->second) {
        const auto& a = it->first;
        const auto& b = best->first;
        if (std::tie(symbols[a.first], symbols[a.second]) <
            std::tie(symbols[b.first], symbols[b.second])) {
          best = it;
        }
      }
    }
    const auto [left, right] = best->first;
    const std::string merged = symbols[left] + strip_continuation(symbols[right]);
    const int merged_id = intern(merged);
    vocab.add(merged);
    for (auto& [seq, freq] : words) {
      std::vector<int> next;
      next.reserve(seq.size());
      for (std::size_t i = 0; i < seq.size(); ++i) {
        if (i + 1 < seq.size() && seq[i] == left && seq[i + 1] == right) {
          next.push_back(merged_id);
          ++i;
        } else {
          next.push_back(seq[i]);
        }
      }
      seq = std::move(next);
    }
  }
  return vocab;
}

std::vector<TokenId> tokenize(std::string_view title, const Vocab& vocab) {
  std::vector<TokenId> out;
  const std::string norm = text::normalize(title);
  for (auto word : text::split_words(norm)) tokenize_word(word, vocab, out);
  return out;
}

std::string detokenize(std::span<const TokenId> ids, const Vocab& vocab) {
  std::string out;
  for (TokenId id : ids) {
    const std::string& piece = vocab.token(id);
    if (piece.starts_with(Vocab::kContinuation)) {
      out += piece.substr(Vocab::kContinuation.size());
    } else {
      if (!out.empty()) out.push_back(' ');
      out += piece;
    }
  }
  return out;
}

TokenSequence build_sequence(std::span<const std::string> titles, const Vocab& vocab,
                             std::size_t n_max) {
  TokenSequence seq;
  seq.ids.reserve(n_max);
  for (const auto& title : titles) {
    if (seq.ids.size() >= n_max) break;
    for (TokenId id : tokenize(title, vocab)) seq.ids.push_back(id);
    seq.ids.push_back(Vocab::kSep);
  }
  if (seq.ids.size() > n_max) seq.ids.resize(n_max);
  seq.attention_mask.assign(seq.ids.size(), 1);
  seq.ids.resize(n_max, Vocab::kPad);
  seq.attention_mask.resize(n_max, 0);
  return seq;
}

TokenSequence build_sequence(const MeKB& mekb, const KnowledgeGraph& kg, const Vocab& vocab,
                             std::size_t n_max) {
  std::vector<std::string> titles;
  titles.reserve(mekb.entries.size());
  for (const auto& e : mekb.entries) titles.push_back(kg.at(e.entity_id).title);
  return build_sequence(titles, vocab, n_max);
}

void save_vocab(const Vocab& vocab, const std::string& path) {
  auto out = tsv::open_output(path);
  for (const auto& t : vocab.tokens()) out << t << '\n';
}

Vocab load_vocab(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  Vocab vocab;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    if (line_no < Vocab::kSpecialCount) {
      if (line != kSpecialTokens[line_no]) {
        throw ParseError(path, line_no + 1, std::string("expected special token ") +
                                                kSpecialTokens[line_no]);
      }
    } else {
      if (line.empty()) throw ParseError(path, line_no + 1, "empty token");
      if (vocab.find(line)) throw ParseError(path, line_no + 1, "duplicate token " + line);
      vocab.add(line);
    }
    ++line_no;
  }
  if (line_no < Vocab::kSpecialCount) throw ParseError(path, line_no, "vocab file is truncated");
  return vocab;
}

}  // namespace mekb
