#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mekbrec/kgstore.hpp"
#include "mekbrec/mekb.hpp"

namespace mekb {

using TokenId = std::int32_t;

// WordPiece-style vocabulary. Word-internal pieces carry the "##" prefix.
class Vocab {
 public:
  static constexpr TokenId kPad = 0;
  static constexpr TokenId kUnk = 1;
  static constexpr TokenId kSep = 2;
  static constexpr TokenId kMask = 3;
  static constexpr std::size_t kSpecialCount = 4;
  static constexpr std::string_view kContinuation = "##";

  // Starts with the four specials.
  Vocab();

  // Adds a token if absent; returns its id.
  TokenId add(const std::string& token);
  std::optional<TokenId> find(std::string_view token) const;
  const std::string& token(TokenId id) const { return tokens_.at(static_cast<std::size_t>(id)); }
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  static bool is_special(TokenId id) { return id >= 0 && id < static_cast<TokenId>(kSpecialCount); }

  bool operator==(const Vocab& other) const { return tokens_ == other.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
};

// Fixed-length encoder input. PAD occurs only as a suffix; the mask is 1
// exactly on non-PAD positions.
struct TokenSequence {
  std::vector<TokenId> ids;
  std::vector<std::uint8_t> attention_mask;

  std::size_t length() const;  // number of masked-in positions
  bool operator==(const TokenSequence&) const = default;
};

// Words longer than this many code points are split into single characters.
inline constexpr std::size_t kMaxWordChars = 64;

// Greedy pair-merge training from characters. The most frequent adjacent
// pair is merged each round (ties: lexicographically smallest pair) until
// `vocab_size` tokens exist or no pair is left. Throws std::invalid_argument
// for an empty corpus or a size below alphabet + specials.
Vocab train_vocab(std::span<const std::string> titles, std::size_t vocab_size);

// Greedy longest-match within each whitespace word of the normalized title.
// A character with no matching piece becomes UNK.
std::vector<TokenId> tokenize(std::string_view title, const Vocab& vocab);
std::string detokenize(std::span<const TokenId> ids, const Vocab& vocab);

// Titles of the entries in score order, each followed by SEP, hard-truncated
// at n_max, then PAD-filled.
TokenSequence build_sequence(const MeKB& mekb, const KnowledgeGraph& kg, const Vocab& vocab,
                             std::size_t n_max);
TokenSequence build_sequence(std::span<const std::string> titles, const Vocab& vocab,
                             std::size_t n_max);

void save_vocab(const Vocab& vocab, const std::string& path);
Vocab load_vocab(const std::string& path);

}  // namespace mekb
