#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mekbrec/nn.hpp"
#include "mekbrec/tokenizer.hpp"

namespace mekb {

using nn::Matrix;
using nn::Vector;

struct EncoderConfig {
  int n_layers = 2;
  int n_heads = 4;
  int d_model = 128;
  int d_ffn = 512;
  int k_dim = 64;
  int n_max = 256;
  int vocab_size = 0;
  // Width of an optional GELU hidden layer in the output MLP; 0 = affine only.
  int mlp_hidden = 0;
  std::uint64_t seed = 0;
  double init_std = 0.02;

  // Throws std::invalid_argument when a dimension is non-positive or
  // d_model is not divisible by n_heads.
  void validate() const;
  bool operator==(const EncoderConfig&) const = default;
};

struct LayerParams {
  Matrix ln1_gain, ln1_bias;
  Matrix wq, bq, wk, bk, wv, bv, wo, bo;
  Matrix ln2_gain, ln2_bias;
  Matrix w1, b1, w2, b2;
};

struct TensorRef {
  std::string name;
  Matrix* value;
  bool decay;  // layer-norm gains/biases are excluded from weight decay
};

// User tower: token + learned position embeddings, pre-norm transformer
// blocks, mean pooling over masked-in positions, MLP to k_dim.
struct EncoderParams {
  Matrix token_embedding;     // [V, d]
  Matrix position_embedding;  // [N, d]
  std::vector<LayerParams> layers;
  Matrix mlp_hidden_w, mlp_hidden_b;  // empty unless mlp_hidden > 0
  Matrix proj_w, proj_b;              // [d or hidden, K], [1, K]

  // Every tensor in a fixed order with a stable name.
  std::vector<TensorRef> tensors();
  std::vector<std::pair<std::string, const Matrix*>> tensors() const;

  void set_zero();
  bool all_finite() const;
};

// Truncated normal (|z| <= 2) weights, zero biases, unit layer-norm gains.
EncoderParams init_encoder(const EncoderConfig& cfg);
EncoderParams zeros_like(const EncoderParams& p);

struct LayerCache {
  nn::LayerNormCache ln1, ln2;
  Matrix h1, q, k, v, ctx;
  std::vector<Matrix> attention;  // per head, [L, L]
  Matrix h2, ffn_pre, ffn_act;
};

struct HiddenCache {
  std::vector<TokenId> ids;  // masked-in prefix
  std::vector<LayerCache> layers;
  Matrix output;  // [L, d]
};

struct UserCache {
  HiddenCache hidden;
  Vector pooled;
  Vector mlp_pre, mlp_act;
  Vector output;
};

// Per-position hidden states for the masked-in prefix of `seq`. Throws
// std::invalid_argument for an all-zero mask, a mask that is not a prefix,
// or an out-of-range token id.
HiddenCache forward_hidden(const EncoderParams& p, const EncoderConfig& cfg,
                           const TokenSequence& seq);
// Accumulates into `grads`.
void backward_hidden(const EncoderParams& p, const EncoderConfig& cfg, const HiddenCache& cache,
                     const Matrix& d_output, EncoderParams& grads);

UserCache forward_user(const EncoderParams& p, const EncoderConfig& cfg,
                       const TokenSequence& seq);
void backward_user(const EncoderParams& p, const EncoderConfig& cfg, const UserCache& cache,
                   const Vector& d_output, EncoderParams& grads);

Vector encode_user(const EncoderParams& p, const EncoderConfig& cfg, const TokenSequence& seq);

// Item tower: one K-dimensional ID embedding per target-domain item.
class ItemTower {
 public:
  ItemTower() = default;
  // Throws std::invalid_argument on duplicate ids.
  ItemTower(std::vector<std::string> item_ids, Matrix embeddings);

  static ItemTower init(std::vector<std::string> item_ids, int k_dim, std::uint64_t seed,
                        double init_std = 0.02);

  std::size_t size() const { return item_ids_.size(); }
  int k_dim() const { return static_cast<int>(embeddings_.cols()); }
  // Throws std::out_of_range for an unknown item.
  std::size_t row(std::string_view item_id) const;
  bool contains(std::string_view item_id) const;
  const std::vector<std::string>& item_ids() const { return item_ids_; }
  const Matrix& embeddings() const { return embeddings_; }
  Matrix& embeddings() { return embeddings_; }

  bool operator==(const ItemTower& other) const {
    return item_ids_ == other.item_ids_ && embeddings_ == other.embeddings_;
  }

 private:
  std::vector<std::string> item_ids_;
  std::unordered_map<std::string, std::size_t> index_;
  Matrix embeddings_;
};

Vector encode_item(std::string_view item_id, const ItemTower& tower);

// Dot-product relevance. Throws std::invalid_argument on a size mismatch.
double score(const Vector& user, const Vector& item);

}  // namespace mekb
