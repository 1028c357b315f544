#include "mekbrec/training.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "mekbrec/error.hpp"

namespace mekb {
namespace {

bool pretrain_updates(const std::string& name) {
  return !name.starts_with("proj_") && !name.starts_with("mlp_hidden_");
}

std::string step_label(int epoch, std::int64_t step) {
  return "epoch " + std::to_string(epoch) + ", step " + std::to_string(step);
}

std::vector<std::vector<std::size_t>> shuffled_batches(std::size_t n, int batch_size,
                                                       std::mt19937_64& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<std::size_t>> batches;
  const auto bs = static_cast<std::size_t>(batch_size);
  for (std::size_t i = 0; i < n; i += bs) {
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i),
                         order.begin() + static_cast<std::ptrdiff_t>(std::min(n, i + bs)));
  }
  return batches;
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 1) throw std::invalid_argument("epochs must be positive");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be positive");
  if (!(lr > 0.0)) throw std::invalid_argument("lr must be positive");
  if (weight_decay < 0.0) throw std::invalid_argument("weight_decay must be non-negative");
  if (warmup_epochs < 0 || warmup_epochs >= epochs) {
    throw std::invalid_argument("warmup_epochs must be smaller than epochs");
  }
  if (!(mask_prob > 0.0 && mask_prob < 1.0)) throw std::invalid_argument("mask_prob must be in (0,1)");
}

double lr_at(std::int64_t step, std::int64_t total_steps, std::int64_t warmup_steps,
             double base_lr) {
  if (step < 0 || step > total_steps) throw std::invalid_argument("lr_at: step out of range");
  if (step < warmup_steps) {
    return base_lr * static_cast<double>(step) / static_cast<double>(warmup_steps);
  }
  const std::int64_t decay_steps = total_steps - warmup_steps;
  if (decay_steps <= 0) return base_lr;
  const double progress =
      static_cast<double>(step - warmup_steps) / static_cast<double>(decay_steps);
  return base_lr * 0.5 * (1.0 + std::cos(M_PI * progress));
}

void lamb_update(Matrix& param, const Matrix& grad, MomentState& state, std::int64_t t,
                 double lr, double weight_decay, const TrainConfig& cfg) {
  if (state.m.size() == 0) {
    state.m = Matrix::Zero(param.rows(), param.cols());
    state.v = Matrix::Zero(param.rows(), param.cols());
  }
  state.m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * grad;
  state.v = cfg.beta2 * state.v + (1.0 - cfg.beta2) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
  Matrix update = (state.m.array() / c1) / ((state.v.array() / c2).sqrt() + cfg.eps);
  if (weight_decay != 0.0) update += weight_decay * param;

  double trust = 1.0;
  if (cfg.optimizer == OptimizerKind::lamb) {
    const double p_norm = param.norm();
    const double u_norm = update.norm();
    if (p_norm > 0.0 && u_norm > 0.0) trust = p_norm / u_norm;
  }
  param -= (lr * trust) * update;
}

LambOptimizer::LambOptimizer(std::vector<TensorRef> params, const TrainConfig& cfg)
    : params_(std::move(params)), state_(params_.size()), cfg_(cfg) {}

void LambOptimizer::step(std::span<const Matrix* const> grads, double lr) {
  if (grads.size() != params_.size()) throw std::invalid_argument("optimizer: gradient count mismatch");
  ++t_;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const double wd = params_[i].decay ? cfg_.weight_decay : 0.0;
    lamb_update(*params_[i].value, *grads[i], state_[i], t_, lr, wd, cfg_);
  }
}

double full_softmax_loss(const Matrix& users, const Matrix& items,
                         std::span<const std::size_t> positives, Matrix* d_users,
                         Matrix* d_items) {
  const auto B = users.rows();
  if (static_cast<std::size_t>(B) != positives.size()) {
    throw std::invalid_argument("full_softmax_loss: one positive per row required");
  }
  const Matrix scores = users * items.transpose();
  double total = 0.0;
  Matrix d_scores;
  if (d_users || d_items) d_scores.resize(B, items.rows());
  for (Eigen::Index b = 0; b < B; ++b) {
    const auto pos = static_cast<Eigen::Index>(positives[static_cast<std::size_t>(b)]);
    if (pos >= items.rows()) throw std::out_of_range("positive item index out of range");
    const double mx = scores.row(b).maxCoeff();
    const Vector shifted_exp = (scores.row(b).array() - mx).exp().matrix();
    const double sum = shifted_exp.sum();
    total += mx + std::log(sum) - scores(b, pos);
    if (d_scores.size() > 0) {
      d_scores.row(b) = shifted_exp / sum;
      d_scores(b, pos) -= 1.0;
    }
  }
  const double inv_b = 1.0 / static_cast<double>(B);
  if (d_scores.size() > 0) {
    d_scores *= inv_b;
    if (d_users) *d_users = d_scores * items;
    if (d_items) {
      if (d_items->size() == 0) *d_items = Matrix::Zero(items.rows(), items.cols());
      *d_items += d_scores.transpose() * users;
    }
  }
  return total * inv_b;
}

namespace {

struct BatchForward {
  std::vector<UserCache> caches;       // one per distinct user
  std::vector<std::size_t> user_slot;  // example -> cache index
  Matrix users;                        // [B, K]
  std::vector<std::size_t> positives;
};

BatchForward forward_batch(std::span<const TrainingExample> batch, const EncoderParams& params,
                           const EncoderConfig& cfg, const ItemTower& tower) {
  BatchForward f;
  std::map<std::string, std::size_t> slot_of;
  f.users.resize(static_cast<Eigen::Index>(batch.size()), cfg.k_dim);
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto& ex = batch[b];
    auto [it, inserted] = slot_of.emplace(ex.user_id, f.caches.size());
    if (inserted) f.caches.push_back(forward_user(params, cfg, ex.seq));
    f.user_slot.push_back(it->second);
    f.users.row(static_cast<Eigen::Index>(b)) = f.caches[it->second].output;
    f.positives.push_back(tower.row(ex.item_id));
  }
  return f;
}

}  // namespace

double batch_loss(std::span<const TrainingExample> batch, const EncoderParams& params,
                  const EncoderConfig& cfg, const ItemTower& tower) {
  const BatchForward f = forward_batch(batch, params, cfg, tower);
  return full_softmax_loss(f.users, tower.embeddings(), f.positives);
}

BatchGradients batch_gradients(std::span<const TrainingExample> batch,
                               const EncoderParams& params, const EncoderConfig& cfg,
                               const ItemTower& tower) {
  const BatchForward f = forward_batch(batch, params, cfg, tower);
  BatchGradients g;
  g.encoder = zeros_like(params);
  Matrix d_users;
  g.loss = full_softmax_loss(f.users, tower.embeddings(), f.positives, &d_users, &g.items);

  std::vector<Vector> d_slot(f.caches.size(), Vector::Zero(cfg.k_dim));
  for (std::size_t b = 0; b < batch.size(); ++b) {
    d_slot[f.user_slot[b]] += d_users.row(static_cast<Eigen::Index>(b));
  }
  for (std::size_t s = 0; s < f.caches.size(); ++s) {
    backward_user(params, cfg, f.caches[s], d_slot[s], g.encoder);
  }
  return g;
}

DualEncoderResult train_dual_encoder(std::span<const TrainingExample> examples,
                                     EncoderParams params, ItemTower tower,
                                     const EncoderConfig& enc_cfg, const TrainConfig& cfg,
                                     const EpochCallback& on_epoch) {
  cfg.validate();
  enc_cfg.validate();
  if (examples.empty()) throw std::invalid_argument("train_dual_encoder: no examples");
  for (const auto& ex : examples) {
    if (ex.seq.length() == 0) {
      throw std::invalid_argument("user " + ex.user_id + " has an empty MeKB sequence");
    }
    tower.row(ex.item_id);
  }

  std::vector<TensorRef> trainable;
  if (!cfg.freeze_encoder) trainable = params.tensors();
  trainable.push_back({"item_embeddings", &tower.embeddings(), true});
  LambOptimizer opt(trainable, cfg);

  std::mt19937_64 rng(cfg.seed);
  const auto steps_per_epoch = static_cast<std::int64_t>(
      (examples.size() + static_cast<std::size_t>(cfg.batch_size) - 1) /
      static_cast<std::size_t>(cfg.batch_size));
  const std::int64_t total_steps = steps_per_epoch * cfg.epochs;
  const std::int64_t warmup_steps = steps_per_epoch * cfg.warmup_epochs;

  DualEncoderResult result{{}, {}, {}};
  std::int64_t step = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    double loss_sum = 0.0;
    double lr = 0.0;
    const auto batches = shuffled_batches(examples.size(), cfg.batch_size, rng);
    for (const auto& idx : batches) {
      std::vector<TrainingExample> batch;
      batch.reserve(idx.size());
      for (std::size_t i : idx) batch.push_back(examples[i]);
      BatchGradients g = batch_gradients(batch, params, enc_cfg, tower);
      if (!std::isfinite(g.loss)) {
        throw TrainingError("non-finite loss at " + step_label(epoch, step));
      }
      loss_sum += g.loss;

      std::vector<const Matrix*> grads;
      if (!cfg.freeze_encoder) {
        for (auto& t : g.encoder.tensors()) grads.push_back(t.value);
      }
      grads.push_back(&g.items);
      lr = lr_at(step, total_steps, warmup_steps, cfg.lr);
      opt.step(grads, lr);
      if (!params.all_finite() || !tower.embeddings().allFinite()) {
        throw TrainingError("non-finite parameters after " + step_label(epoch, step));
      }
      ++step;
    }
    EpochStats stats{epoch, loss_sum / static_cast<double>(batches.size()), lr};
    result.epochs.push_back(stats);
    if (on_epoch) on_epoch(stats);
  }
  result.params = std::move(params);
  result.tower = std::move(tower);
  return result;
}

MlmHead init_mlm_head(const EncoderConfig& cfg) {
  return MlmHead{Matrix::Ones(1, cfg.d_model), Matrix::Zero(1, cfg.d_model),
                 Matrix::Zero(1, cfg.vocab_size)};
}

MaskedSequence mask_sequence(const TokenSequence& seq, int vocab_size, double mask_prob,
                             std::mt19937_64& rng) {
  MaskedSequence out{seq, {}, {}};
  std::vector<std::size_t> maskable;
  for (std::size_t i = 0; i < seq.ids.size(); ++i) {
    if (seq.attention_mask[i] == 1 && seq.ids[i] != Vocab::kSep) maskable.push_back(i);
  }
  if (maskable.empty()) return out;
  const auto n = maskable.size();
  const auto count = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(mask_prob * static_cast<double>(n))), 1, n);
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(maskable[i], maskable[pick(rng)]);
  }
  maskable.resize(count);
  std::sort(maskable.begin(), maskable.end());

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<TokenId> random_token(static_cast<TokenId>(Vocab::kSpecialCount),
                                                      static_cast<TokenId>(vocab_size - 1));
  for (std::size_t pos : maskable) {
    out.positions.push_back(pos);
    out.targets.push_back(seq.ids[pos]);
    const double r = unit(rng);
    if (r < 0.8) {
      out.input.ids[pos] = Vocab::kMask;
    } else if (r < 0.9) {
      out.input.ids[pos] = random_token(rng);
    }
  }
  return out;
}

double mlm_loss(std::span<const MaskedSequence> batch, const EncoderParams& params,
                const MlmHead& head, const EncoderConfig& cfg, EncoderParams* d_params,
                MlmHead* d_head) {
  std::size_t total_masked = 0;
  for (const auto& s : batch) total_masked += s.positions.size();
  if (total_masked == 0) return 0.0;
  const double inv_m = 1.0 / static_cast<double>(total_masked);
  const Matrix& emb = params.token_embedding;

  double loss = 0.0;
  for (const auto& s : batch) {
    if (s.positions.empty()) continue;
    const HiddenCache cache = forward_hidden(params, cfg, s.input);
    const auto M = static_cast<Eigen::Index>(s.positions.size());
    Matrix picked(M, cfg.d_model);
    for (Eigen::Index r = 0; r < M; ++r) {
      picked.row(r) = cache.output.row(static_cast<Eigen::Index>(s.positions[static_cast<std::size_t>(r)]));
    }
    nn::LayerNormCache ln;
    const Matrix z = nn::layer_norm(picked, head.ln_gain, head.ln_bias, ln);
    Matrix logits = z * emb.transpose();
    logits.rowwise() += head.out_bias.row(0);

    Matrix d_logits(M, logits.cols());
    for (Eigen::Index r = 0; r < M; ++r) {
      const TokenId target = s.targets[static_cast<std::size_t>(r)];
      const double lse = nn::log_sum_exp(logits.row(r));
      loss += lse - logits(r, target);
      d_logits.row(r) = (logits.row(r).array() - lse).exp().matrix();
      d_logits(r, target) -= 1.0;
    }
    if (!d_params) continue;
    d_logits *= inv_m;
    d_params->token_embedding += d_logits.transpose() * z;
    if (d_head) d_head->out_bias.row(0) += d_logits.colwise().sum();
    const Matrix d_z = d_logits * emb;
    Matrix dummy_gain = Matrix::Zero(1, cfg.d_model);
    Matrix dummy_bias = Matrix::Zero(1, cfg.d_model);
    const Matrix d_picked = nn::layer_norm_backward(d_z, head.ln_gain, ln,
                                                    d_head ? d_head->ln_gain : dummy_gain,
                                                    d_head ? d_head->ln_bias : dummy_bias);
    Matrix d_hidden = Matrix::Zero(cache.output.rows(), cache.output.cols());
    for (Eigen::Index r = 0; r < M; ++r) {
      d_hidden.row(static_cast<Eigen::Index>(s.positions[static_cast<std::size_t>(r)])) += d_picked.row(r);
    }
    backward_hidden(params, cfg, cache, d_hidden, *d_params);
  }
  return loss * inv_m;
}

PretrainResult pretrain_mlm(std::span<const TokenSequence> corpus, EncoderParams params,
                            const EncoderConfig& enc_cfg, const TrainConfig& cfg,
                            const EpochCallback& on_epoch) {
  cfg.validate();
  enc_cfg.validate();
  if (corpus.empty()) throw std::invalid_argument("pretrain_mlm: empty corpus");

  MlmHead head = init_mlm_head(enc_cfg);
  std::vector<TensorRef> trainable;
  for (auto& t : params.tensors()) {
    if (pretrain_updates(t.name)) trainable.push_back(t);
  }
  trainable.push_back({"mlm.ln_gain", &head.ln_gain, false});
  trainable.push_back({"mlm.ln_bias", &head.ln_bias, false});
  trainable.push_back({"mlm.out_bias", &head.out_bias, true});
  LambOptimizer opt(trainable, cfg);

  std::mt19937_64 order_rng(cfg.seed);
  std::mt19937_64 mask_rng(cfg.seed ^ 0x9E3779B97F4A7C15ULL);
  const auto steps_per_epoch = static_cast<std::int64_t>(
      (corpus.size() + static_cast<std::size_t>(cfg.batch_size) - 1) /
      static_cast<std::size_t>(cfg.batch_size));
  const std::int64_t total_steps = steps_per_epoch * cfg.epochs;
  const std::int64_t warmup_steps = steps_per_epoch * cfg.warmup_epochs;

  PretrainResult result;
  std::int64_t step = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    double loss_sum = 0.0;
    double lr = 0.0;
    const auto batches = shuffled_batches(corpus.size(), cfg.batch_size, order_rng);
    for (const auto& idx : batches) {
      std::vector<MaskedSequence> batch;
      batch.reserve(idx.size());
      for (std::size_t i : idx) {
        batch.push_back(mask_sequence(corpus[i], enc_cfg.vocab_size, cfg.mask_prob, mask_rng));
      }
      EncoderParams d_params = zeros_like(params);
      MlmHead d_head{Matrix::Zero(1, enc_cfg.d_model), Matrix::Zero(1, enc_cfg.d_model),
                     Matrix::Zero(1, enc_cfg.vocab_size)};
      const double loss = mlm_loss(batch, params, head, enc_cfg, &d_params, &d_head);
      if (!std::isfinite(loss)) {
        throw TrainingError("non-finite pretraining loss at " + step_label(epoch, step));
      }
      result.step_losses.push_back(loss);
      loss_sum += loss;

      std::vector<const Matrix*> grads;
      for (auto& t : d_params.tensors()) {
        if (pretrain_updates(t.name)) grads.push_back(t.value);
      }
      grads.push_back(&d_head.ln_gain);
      grads.push_back(&d_head.ln_bias);
      grads.push_back(&d_head.out_bias);
      lr = lr_at(step, total_steps, warmup_steps, cfg.lr);
      opt.step(grads, lr);
      if (!params.all_finite()) {
        throw TrainingError("non-finite parameters after " + step_label(epoch, step));
      }
      ++step;
    }
    EpochStats stats{epoch, loss_sum / static_cast<double>(batches.size()), lr};
    result.epochs.push_back(stats);
    if (on_epoch) on_epoch(stats);
  }
  result.params = std::move(params);
  return result;
}

}  // namespace mekb
