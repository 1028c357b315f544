#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mekbrec/encoder.hpp"
#include "mekbrec/tokenizer.hpp"

namespace mekb {

enum class OptimizerKind { lamb, adam };

struct TrainConfig {
  int epochs = 15;
  int batch_size = 128;
  double lr = 5e-4;
  double weight_decay = 5e-4;
  int warmup_epochs = 1;
  OptimizerKind optimizer = OptimizerKind::lamb;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-6;
  std::uint64_t seed = 0;
  // Dual-encoder only: keep the user tower fixed and fit the item tower.
  bool freeze_encoder = false;
  // Masked-token pretraining only.
  double mask_prob = 0.15;

  // Throws std::invalid_argument unless lr > 0 and warmup_epochs < epochs.
  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

// Linear warmup from 0 to base_lr, then half-cosine decay to 0 at total_steps.
double lr_at(std::int64_t step, std::int64_t total_steps, std::int64_t warmup_steps,
             double base_lr);

struct MomentState {
  Matrix m, v;
};

// One LAMB (or AdamW, with trust ratio fixed to 1) update of a single tensor
// at 1-based step t. The trust ratio is ||p|| / ||update||, taken as 1 when
// either norm is 0.
void lamb_update(Matrix& param, const Matrix& grad, MomentState& state, std::int64_t t,
                 double lr, double weight_decay, const TrainConfig& cfg);

// Layer-wise optimizer over a fixed list of tensors.
class LambOptimizer {
 public:
  LambOptimizer(std::vector<TensorRef> params, const TrainConfig& cfg);

  // `grads` is parallel to the parameter list given at construction.
  void step(std::span<const Matrix* const> grads, double lr);
  std::int64_t steps_taken() const { return t_; }

 private:
  std::vector<TensorRef> params_;
  std::vector<MomentState> state_;
  TrainConfig cfg_;
  std::int64_t t_ = 0;
};

struct TrainingExample {
  std::string user_id;
  TokenSequence seq;  // must have at least one masked-in token
  std::string item_id;
};

// Mean over rows of -log softmax(user_row . items^T)[positive], using a
// max-shifted log-sum-exp. Optional outputs receive dL/d(user) and
// dL/d(items) (accumulated into d_items).
double full_softmax_loss(const Matrix& users, const Matrix& items,
                         std::span<const std::size_t> positives, Matrix* d_users = nullptr,
                         Matrix* d_items = nullptr);

struct BatchGradients {
  double loss = 0.0;
  EncoderParams encoder;
  Matrix items;
};

// Full-softmax loss of a batch over every item in the tower.
double batch_loss(std::span<const TrainingExample> batch, const EncoderParams& params,
                  const EncoderConfig& cfg, const ItemTower& tower);
// Loss plus exact gradients for the encoder and the item matrix.
BatchGradients batch_gradients(std::span<const TrainingExample> batch,
                               const EncoderParams& params, const EncoderConfig& cfg,
                               const ItemTower& tower);

struct EpochStats {
  int epoch = 0;
  double mean_loss = 0.0;
  double lr = 0.0;  // rate at the epoch's last step
};

struct DualEncoderResult {
  EncoderParams params;
  ItemTower tower;
  std::vector<EpochStats> epochs;
};

using EpochCallback = std::function<void(const EpochStats&)>;

// Seeded shuffled minibatches, full-softmax loss, LAMB under lr_at. Throws
// TrainingError naming the step on a non-finite loss or parameter.
DualEncoderResult train_dual_encoder(std::span<const TrainingExample> examples,
                                     EncoderParams params, ItemTower tower,
                                     const EncoderConfig& enc_cfg, const TrainConfig& cfg,
                                     const EpochCallback& on_epoch = {});

// Masked-token prediction head tied to the token embeddings.
struct MlmHead {
  Matrix ln_gain, ln_bias;  // [1, d]
  Matrix out_bias;          // [1, V]
};

MlmHead init_mlm_head(const EncoderConfig& cfg);

struct MaskedSequence {
  TokenSequence input;
  std::vector<std::size_t> positions;
  std::vector<TokenId> targets;
};

// Picks max(1, round(mask_prob * n)) of the n maskable (masked-in, non-SEP)
// positions; each becomes MASK (80%), a random non-special token (10%) or
// stays unchanged (10%).
MaskedSequence mask_sequence(const TokenSequence& seq, int vocab_size, double mask_prob,
                             std::mt19937_64& rng);

// Mean token cross-entropy over every masked position in the batch; adds
// gradients when the output pointers are non-null.
double mlm_loss(std::span<const MaskedSequence> batch, const EncoderParams& params,
                const MlmHead& head, const EncoderConfig& cfg, EncoderParams* d_params = nullptr,
                MlmHead* d_head = nullptr);

struct PretrainResult {
  EncoderParams params;
  std::vector<double> step_losses;
  std::vector<EpochStats> epochs;
};

// Masked-token pretraining; the output MLP is not updated and the head is
// discarded.
PretrainResult pretrain_mlm(std::span<const TokenSequence> corpus, EncoderParams params,
                            const EncoderConfig& enc_cfg, const TrainConfig& cfg,
                            const EpochCallback& on_epoch = {});

}  // namespace mekb
