#include "mekbrec/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>

#include "mekbrec/config_json.hpp"
#include "mekbrec/error.hpp"
#include "mekbrec/tsv.hpp"

namespace mekb {

NLOHMANN_JSON_SERIALIZE_ENUM(OptimizerKind, {{OptimizerKind::lamb, "lamb"},
                                             {OptimizerKind::adam, "adam"}})

void to_json(nlohmann::json& j, const EncoderConfig& c) {
  j = {{"n_layers", c.n_layers}, {"n_heads", c.n_heads},     {"d_model", c.d_model},
       {"d_ffn", c.d_ffn},       {"k_dim", c.k_dim},         {"n_max", c.n_max},
       {"vocab_size", c.vocab_size}, {"mlp_hidden", c.mlp_hidden}, {"seed", c.seed},
       {"init_std", c.init_std}};
}

void from_json(const nlohmann::json& j, EncoderConfig& c) {
  const EncoderConfig d;
  c.n_layers = j.value("n_layers", d.n_layers);
  c.n_heads = j.value("n_heads", d.n_heads);
  c.d_model = j.value("d_model", d.d_model);
  c.d_ffn = j.value("d_ffn", d.d_ffn);
  c.k_dim = j.value("k_dim", d.k_dim);
  c.n_max = j.value("n_max", d.n_max);
  c.vocab_size = j.value("vocab_size", d.vocab_size);
  c.mlp_hidden = j.value("mlp_hidden", d.mlp_hidden);
  c.seed = j.value("seed", d.seed);
  c.init_std = j.value("init_std", d.init_std);
}

void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = {{"epochs", c.epochs},         {"batch_size", c.batch_size},
       {"lr", c.lr},                 {"weight_decay", c.weight_decay},
       {"warmup_epochs", c.warmup_epochs}, {"schedule", "cosine"},
       {"optimizer", c.optimizer},   {"beta1", c.beta1},
       {"beta2", c.beta2},           {"eps", c.eps},
       {"seed", c.seed},             {"freeze_encoder", c.freeze_encoder},
       {"mask_prob", c.mask_prob}};
}

void from_json(const nlohmann::json& j, TrainConfig& c) {
  const TrainConfig d;
  if (j.contains("schedule") && j.at("schedule") != "cosine") {
    throw std::invalid_argument("only the cosine schedule is supported");
  }
  c.epochs = j.value("epochs", d.epochs);
  c.batch_size = j.value("batch_size", d.batch_size);
  c.lr = j.value("lr", d.lr);
  c.weight_decay = j.value("weight_decay", d.weight_decay);
  c.warmup_epochs = j.value("warmup_epochs", d.warmup_epochs);
  c.optimizer = j.value("optimizer", d.optimizer);
  c.beta1 = j.value("beta1", d.beta1);
  c.beta2 = j.value("beta2", d.beta2);
  c.eps = j.value("eps", d.eps);
  c.seed = j.value("seed", d.seed);
  c.freeze_encoder = j.value("freeze_encoder", d.freeze_encoder);
  c.mask_prob = j.value("mask_prob", d.mask_prob);
}

void to_json(nlohmann::json& j, const MeKBConfig& c) {
  j = {{"k_star", c.k_star}, {"apply_base_weight", c.apply_base_weight}};
}

void from_json(const nlohmann::json& j, MeKBConfig& c) {
  const MeKBConfig d;
  c.k_star = j.value("k_star", d.k_star);
  c.apply_base_weight = j.value("apply_base_weight", d.apply_base_weight);
}

void to_json(nlohmann::json& j, const SplitSpec& c) {
  j = {{"train", c.train}, {"valid", c.valid}, {"test", c.test},
       {"cold_start_fraction", c.cold_start_fraction}, {"seed", c.seed}};
}

void from_json(const nlohmann::json& j, SplitSpec& c) {
  const SplitSpec d;
  c.train = j.value("train", d.train);
  c.valid = j.value("valid", d.valid);
  c.test = j.value("test", d.test);
  c.cold_start_fraction = j.value("cold_start_fraction", d.cold_start_fraction);
  c.seed = j.value("seed", d.seed);
}

void to_json(nlohmann::json& j, const EvalSettings& c) {
  j = {{"k", c.k}, {"n_neg", c.n_neg}, {"seed", c.seed}};
}

void from_json(const nlohmann::json& j, EvalSettings& c) {
  const EvalSettings d;
  c.k = j.value("k", d.k);
  c.n_neg = j.value("n_neg", d.n_neg);
  c.seed = j.value("seed", d.seed);
}

namespace {

constexpr char kMagic[8] = {'M', 'E', 'K', 'B', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;
constexpr const char* kItemTensor = "item_embeddings";

class Writer {
 public:
  void bytes(const void* p, std::size_t n) { out_.append(static_cast<const char*>(p), n); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void f64(double d) { u64(std::bit_cast<std::uint64_t>(d)); }
  void str(const std::string& s) {
    u64(s.size());
    out_ += s;
  }
  void tensor(const std::string& name, const Matrix& m) {
    str(name);
    u64(static_cast<std::uint64_t>(m.rows()));
    u64(static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.size(); ++i) f64(m.data()[i]);
  }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(const std::string& in) : in_(in) {}
  void need(std::size_t n) const {
    if (pos_ + n > in_.size()) throw ParseError("checkpoint", 0, "truncated container");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in_[pos_++])) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in_[pos_++])) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const auto n = u64();
    need(n);
    std::string s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::string raw(std::size_t n) {
    need(n);
    std::string s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  const std::string& in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ckpt) {
  Writer w;
  w.bytes(kMagic, sizeof kMagic);
  w.u32(kVersion);
  w.str(nlohmann::json(ckpt.config).dump());
  const auto tensors = ckpt.params.tensors();
  w.u64(tensors.size() + (ckpt.tower ? 1 : 0));
  for (const auto& [name, m] : tensors) w.tensor(name, *m);
  if (ckpt.tower) {
    w.tensor(kItemTensor, ckpt.tower->embeddings());
    w.u64(ckpt.tower->size());
    for (const auto& id : ckpt.tower->item_ids()) w.str(id);
  } else {
    w.u64(0);
  }
  return w.take();
}

Checkpoint deserialize_checkpoint(const std::string& bytes) {
  Reader r(bytes);
  if (r.raw(sizeof kMagic) != std::string(kMagic, sizeof kMagic)) {
    throw ParseError("checkpoint", 0, "bad magic");
  }
  if (const auto v = r.u32(); v != kVersion) {
    throw ParseError("checkpoint", 0, "unsupported version " + std::to_string(v));
  }
  Checkpoint ckpt;
  try {
    ckpt.config = nlohmann::json::parse(r.str()).get<EncoderConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("checkpoint", 0, std::string("bad config header: ") + e.what());
  }
  ckpt.params = init_encoder(ckpt.config);

  std::map<std::string, Matrix> loaded;
  const auto n_tensors = r.u64();
  for (std::uint64_t t = 0; t < n_tensors; ++t) {
    std::string name = r.str();
    const auto rows = r.u64();
    const auto cols = r.u64();
    r.need(rows * cols * 8);
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = r.f64();
    if (!loaded.emplace(std::move(name), std::move(m)).second) {
      throw ParseError("checkpoint", 0, "duplicate tensor");
    }
  }
  for (auto& t : ckpt.params.tensors()) {
    auto it = loaded.find(t.name);
    if (it == loaded.end()) throw ParseError("checkpoint", 0, "missing tensor " + t.name);
    if (it->second.rows() != t.value->rows() || it->second.cols() != t.value->cols()) {
      throw ParseError("checkpoint", 0, "shape mismatch for " + t.name);
    }
    *t.value = std::move(it->second);
    loaded.erase(it);
  }
  const auto n_items = r.u64();
  auto item_it = loaded.find(kItemTensor);
  if (n_items > 0 || item_it != loaded.end()) {
    if (item_it == loaded.end()) throw ParseError("checkpoint", 0, "item ids without embeddings");
    std::vector<std::string> ids;
    for (std::uint64_t i = 0; i < n_items; ++i) ids.push_back(r.str());
    try {
      ckpt.tower = ItemTower(std::move(ids), std::move(item_it->second));
    } catch (const std::invalid_argument& e) {
      throw ParseError("checkpoint", 0, e.what());
    }
    loaded.erase(item_it);
  }
  if (!loaded.empty()) throw ParseError("checkpoint", 0, "unexpected tensor " + loaded.begin()->first);
  if (!r.done()) throw ParseError("checkpoint", 0, "trailing bytes");
  return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  auto out = tsv::open_output(path);
  const std::string bytes = serialize_checkpoint(ckpt);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return deserialize_checkpoint(bytes);
  } catch (const ParseError& e) {
    throw ParseError(path, 0, e.what());
  }
}

}  // namespace mekb
