#include "mekbrec/encoder.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace mekb {
namespace {

Matrix truncated_normal(Eigen::Index rows, Eigen::Index cols, double std, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    double z = dist(rng);
    while (std::abs(z) > 2.0) z = dist(rng);
    m.data()[i] = z * std;
  }
  return m;
}

Matrix zeros(Eigen::Index rows, Eigen::Index cols) { return Matrix::Zero(rows, cols); }
Matrix ones(Eigen::Index rows, Eigen::Index cols) { return Matrix::Ones(rows, cols); }

void add_bias(Matrix& m, const Matrix& bias) { m.rowwise() += bias.row(0); }

std::size_t prefix_length(const TokenSequence& seq) {
  if (seq.ids.size() != seq.attention_mask.size()) {
    throw std::invalid_argument("token ids and attention mask differ in length");
  }
  std::size_t len = 0;
  while (len < seq.attention_mask.size() && seq.attention_mask[len] == 1) ++len;
  for (std::size_t i = len; i < seq.attention_mask.size(); ++i) {
    if (seq.attention_mask[i] != 0) {
      throw std::invalid_argument("attention mask must be a prefix of ones");
    }
  }
  if (len == 0) throw std::invalid_argument("empty sequence (all-zero attention mask)");
  return len;
}

}  // namespace

void EncoderConfig::validate() const {
  if (n_layers < 1 || n_heads < 1 || d_model < 1 || d_ffn < 1 || k_dim < 1 || n_max < 1 ||
      vocab_size < 1 || mlp_hidden < 0) {
    throw std::invalid_argument("encoder dimensions must be positive");
  }
  if (d_model % n_heads != 0) throw std::invalid_argument("d_model must be divisible by n_heads");
  if (!(init_std > 0.0)) throw std::invalid_argument("init_std must be positive");
}

std::vector<TensorRef> EncoderParams::tensors() {
  std::vector<TensorRef> out;
  out.push_back({"token_embedding", &token_embedding, true});
  out.push_back({"position_embedding", &position_embedding, true});
  for (std::size_t l = 0; l < layers.size(); ++l) {
    auto& L = layers[l];
    const std::string p = "layer" + std::to_string(l) + ".";
    out.push_back({p + "ln1_gain", &L.ln1_gain, false});
    out.push_back({p + "ln1_bias", &L.ln1_bias, false});
    out.push_back({p + "wq", &L.wq, true});
    out.push_back({p + "bq", &L.bq, true});
    out.push_back({p + "wk", &L.wk, true});
    out.push_back({p + "bk", &L.bk, true});
    out.push_back({p + "wv", &L.wv, true});
    out.push_back({p + "bv", &L.bv, true});
    out.push_back({p + "wo", &L.wo, true});
    out.push_back({p + "bo", &L.bo, true});
    out.push_back({p + "ln2_gain", &L.ln2_gain, false});
    out.push_back({p + "ln2_bias", &L.ln2_bias, false});
    out.push_back({p + "w1", &L.w1, true});
    out.push_back({p + "b1", &L.b1, true});
    out.push_back({p + "w2", &L.w2, true});
    out.push_back({p + "b2", &L.b2, true});
  }
  if (mlp_hidden_w.size() > 0) {
    out.push_back({"mlp_hidden_w", &mlp_hidden_w, true});
    out.push_back({"mlp_hidden_b", &mlp_hidden_b, true});
  }
  out.push_back({"proj_w", &proj_w, true});
  out.push_back({"proj_b", &proj_b, true});
  return out;
}

std::vector<std::pair<std::string, const Matrix*>> EncoderParams::tensors() const {
  std::vector<std::pair<std::string, const Matrix*>> out;
  for (auto& t : const_cast<EncoderParams*>(this)->tensors()) out.emplace_back(t.name, t.value);
  return out;
}

void EncoderParams::set_zero() {
  for (auto& t : tensors()) t.value->setZero();
}

bool EncoderParams::all_finite() const {
  for (const auto& [name, m] : tensors()) {
    if (!m->allFinite()) return false;
  }
  return true;
}

EncoderParams init_encoder(const EncoderConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  const double s = cfg.init_std;
  const int d = cfg.d_model;
  EncoderParams p;
  p.token_embedding = truncated_normal(cfg.vocab_size, d, s, rng);
  p.position_embedding = truncated_normal(cfg.n_max, d, s, rng);
  for (int l = 0; l < cfg.n_layers; ++l) {
    LayerParams L;
    L.ln1_gain = ones(1, d);
    L.ln1_bias = zeros(1, d);
    L.wq = truncated_normal(d, d, s, rng);
    L.bq = zeros(1, d);
    L.wk = truncated_normal(d, d, s, rng);
    L.bk = zeros(1, d);
    L.wv = truncated_normal(d, d, s, rng);
    L.bv = zeros(1, d);
    L.wo = truncated_normal(d, d, s, rng);
    L.bo = zeros(1, d);
    L.ln2_gain = ones(1, d);
    L.ln2_bias = zeros(1, d);
    L.w1 = truncated_normal(d, cfg.d_ffn, s, rng);
    L.b1 = zeros(1, cfg.d_ffn);
    L.w2 = truncated_normal(cfg.d_ffn, d, s, rng);
    L.b2 = zeros(1, d);
    p.layers.push_back(std::move(L));
  }
  int proj_in = d;
  if (cfg.mlp_hidden > 0) {
    p.mlp_hidden_w = truncated_normal(d, cfg.mlp_hidden, s, rng);
    p.mlp_hidden_b = zeros(1, cfg.mlp_hidden);
    proj_in = cfg.mlp_hidden;
  }
  p.proj_w = truncated_normal(proj_in, cfg.k_dim, s, rng);
  p.proj_b = zeros(1, cfg.k_dim);
  return p;
}

EncoderParams zeros_like(const EncoderParams& p) {
  EncoderParams z = p;
  z.set_zero();
  return z;
}

HiddenCache forward_hidden(const EncoderParams& p, const EncoderConfig& cfg,
                           const TokenSequence& seq) {
  const std::size_t len = prefix_length(seq);
  if (len > static_cast<std::size_t>(p.position_embedding.rows())) {
    throw std::invalid_argument("sequence longer than n_max");
  }
  const auto L = static_cast<Eigen::Index>(len);
  const int d = cfg.d_model;
  const int dh = d / cfg.n_heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  HiddenCache cache;
  cache.ids.assign(seq.ids.begin(), seq.ids.begin() + static_cast<std::ptrdiff_t>(len));
  Matrix x(L, d);
  for (Eigen::Index i = 0; i < L; ++i) {
    const TokenId id = cache.ids[static_cast<std::size_t>(i)];
    if (id < 0 || id >= p.token_embedding.rows()) {
      throw std::invalid_argument("token id " + std::to_string(id) + " outside the vocabulary");
    }
    x.row(i) = p.token_embedding.row(id) + p.position_embedding.row(i);
  }

  cache.layers.resize(p.layers.size());
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    const LayerParams& W = p.layers[l];
    LayerCache& c = cache.layers[l];
    c.h1 = nn::layer_norm(x, W.ln1_gain, W.ln1_bias, c.ln1);
    c.q = c.h1 * W.wq;
    add_bias(c.q, W.bq);
    c.k = c.h1 * W.wk;
    add_bias(c.k, W.bk);
    c.v = c.h1 * W.wv;
    add_bias(c.v, W.bv);
    c.ctx.resize(L, d);
    c.attention.resize(static_cast<std::size_t>(cfg.n_heads));
    for (int h = 0; h < cfg.n_heads; ++h) {
      const auto off = h * dh;
      const Matrix scores = (c.q.middleCols(off, dh) * c.k.middleCols(off, dh).transpose()) * scale;
      c.attention[static_cast<std::size_t>(h)] = nn::softmax_rows(scores);
      c.ctx.middleCols(off, dh) = c.attention[static_cast<std::size_t>(h)] * c.v.middleCols(off, dh);
    }
    x += c.ctx * W.wo;
    add_bias(x, W.bo);

    c.h2 = nn::layer_norm(x, W.ln2_gain, W.ln2_bias, c.ln2);
    c.ffn_pre = c.h2 * W.w1;
    add_bias(c.ffn_pre, W.b1);
    c.ffn_act = nn::gelu(c.ffn_pre);
    x += c.ffn_act * W.w2;
    add_bias(x, W.b2);
  }
  cache.output = std::move(x);
  return cache;
}

void backward_hidden(const EncoderParams& p, const EncoderConfig& cfg, const HiddenCache& cache,
                     const Matrix& d_output, EncoderParams& g) {
  const int d = cfg.d_model;
  const int dh = d / cfg.n_heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  const auto L = d_output.rows();
  Matrix dx = d_output;

  for (std::size_t li = p.layers.size(); li-- > 0;) {
    const LayerParams& W = p.layers[li];
    LayerParams& G = g.layers[li];
    const LayerCache& c = cache.layers[li];

    // Feed-forward residual branch.
    G.w2 += c.ffn_act.transpose() * dx;
    G.b2.row(0) += dx.colwise().sum();
    Matrix d_pre = dx * W.w2.transpose();
    for (Eigen::Index i = 0; i < d_pre.size(); ++i) {
      d_pre.data()[i] *= nn::gelu_grad(c.ffn_pre.data()[i]);
    }
    G.w1 += c.h2.transpose() * d_pre;
    G.b1.row(0) += d_pre.colwise().sum();
    const Matrix d_h2 = d_pre * W.w1.transpose();
    dx += nn::layer_norm_backward(d_h2, W.ln2_gain, c.ln2, G.ln2_gain, G.ln2_bias);

    // Attention residual branch.
    G.wo += c.ctx.transpose() * dx;
    G.bo.row(0) += dx.colwise().sum();
    const Matrix d_ctx = dx * W.wo.transpose();
    Matrix dq = Matrix::Zero(L, d);
    Matrix dk = Matrix::Zero(L, d);
    Matrix dv = Matrix::Zero(L, d);
    for (int h = 0; h < cfg.n_heads; ++h) {
      const auto off = h * dh;
      const Matrix& A = c.attention[static_cast<std::size_t>(h)];
      const Matrix d_ch = d_ctx.middleCols(off, dh);
      const Matrix dA = d_ch * c.v.middleCols(off, dh).transpose();
      dv.middleCols(off, dh) = A.transpose() * d_ch;
      const Eigen::VectorXd row_dot = (dA.array() * A.array()).rowwise().sum();
      const Matrix dS = (A.array() * (dA.array().colwise() - row_dot.array())).matrix();
      dq.middleCols(off, dh) = (dS * c.k.middleCols(off, dh)) * scale;
      dk.middleCols(off, dh) = (dS.transpose() * c.q.middleCols(off, dh)) * scale;
    }
    G.wq += c.h1.transpose() * dq;
    G.bq.row(0) += dq.colwise().sum();
    G.wk += c.h1.transpose() * dk;
    G.bk.row(0) += dk.colwise().sum();
    G.wv += c.h1.transpose() * dv;
    G.bv.row(0) += dv.colwise().sum();
    const Matrix d_h1 = dq * W.wq.transpose() + dk * W.wk.transpose() + dv * W.wv.transpose();
    dx += nn::layer_norm_backward(d_h1, W.ln1_gain, c.ln1, G.ln1_gain, G.ln1_bias);
  }

  for (Eigen::Index i = 0; i < L; ++i) {
    g.token_embedding.row(cache.ids[static_cast<std::size_t>(i)]) += dx.row(i);
    g.position_embedding.row(i) += dx.row(i);
  }
}

UserCache forward_user(const EncoderParams& p, const EncoderConfig& cfg,
                       const TokenSequence& seq) {
  UserCache c;
  c.hidden = forward_hidden(p, cfg, seq);
  c.pooled = c.hidden.output.colwise().mean();
  if (cfg.mlp_hidden > 0) {
    c.mlp_pre = c.pooled * p.mlp_hidden_w + p.mlp_hidden_b.row(0);
    c.mlp_act = c.mlp_pre.unaryExpr([](double v) { return nn::gelu(v); });
    c.output = c.mlp_act * p.proj_w + p.proj_b.row(0);
  } else {
    c.output = c.pooled * p.proj_w + p.proj_b.row(0);
  }
  return c;
}

void backward_user(const EncoderParams& p, const EncoderConfig& cfg, const UserCache& c,
                   const Vector& d_output, EncoderParams& g) {
  const Vector& proj_in = cfg.mlp_hidden > 0 ? c.mlp_act : c.pooled;
  g.proj_w += proj_in.transpose() * d_output;
  g.proj_b.row(0) += d_output;
  Vector d_pooled = d_output * p.proj_w.transpose();
  if (cfg.mlp_hidden > 0) {
    Vector d_pre = d_pooled;
    for (Eigen::Index i = 0; i < d_pre.size(); ++i) d_pre(i) *= nn::gelu_grad(c.mlp_pre(i));
    g.mlp_hidden_w += c.pooled.transpose() * d_pre;
    g.mlp_hidden_b.row(0) += d_pre;
    d_pooled = d_pre * p.mlp_hidden_w.transpose();
  }
  const auto L = c.hidden.output.rows();
  const Matrix d_hidden = Matrix::Ones(L, 1) * (d_pooled / static_cast<double>(L));
  backward_hidden(p, cfg, c.hidden, d_hidden, g);
}

Vector encode_user(const EncoderParams& p, const EncoderConfig& cfg, const TokenSequence& seq) {
  return forward_user(p, cfg, seq).output;
}

ItemTower::ItemTower(std::vector<std::string> item_ids, Matrix embeddings)
    : item_ids_(std::move(item_ids)), embeddings_(std::move(embeddings)) {
  if (static_cast<Eigen::Index>(item_ids_.size()) != embeddings_.rows()) {
    throw std::invalid_argument("item tower: id count does not match embedding rows");
  }
  for (std::size_t i = 0; i < item_ids_.size(); ++i) {
    if (!index_.emplace(item_ids_[i], i).second) {
      throw std::invalid_argument("item tower: duplicate item " + item_ids_[i]);
    }
  }
}

ItemTower ItemTower::init(std::vector<std::string> item_ids, int k_dim, std::uint64_t seed,
                          double init_std) {
  std::mt19937_64 rng(seed);
  Matrix m = truncated_normal(static_cast<Eigen::Index>(item_ids.size()), k_dim, init_std, rng);
  return ItemTower(std::move(item_ids), std::move(m));
}

std::size_t ItemTower::row(std::string_view item_id) const {
  auto it = index_.find(std::string(item_id));
  if (it == index_.end()) throw std::out_of_range("unknown item " + std::string(item_id));
  return it->second;
}

bool ItemTower::contains(std::string_view item_id) const {
  return index_.count(std::string(item_id)) > 0;
}

Vector encode_item(std::string_view item_id, const ItemTower& tower) {
  return tower.embeddings().row(static_cast<Eigen::Index>(tower.row(item_id)));
}

double score(const Vector& user, const Vector& item) {
  if (user.size() != item.size()) throw std::invalid_argument("score: dimension mismatch");
  return user.dot(item);
}

}  // namespace mekb
