// Runs every acceptance criterion and prints one PASS/FAIL line for each.
// Usage: mekbrec_acceptance [criterion numbers...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mekbrec/alias.hpp"
#include "mekbrec/checkpoint.hpp"
#include "mekbrec/dataio.hpp"
#include "mekbrec/encoder.hpp"
#include "mekbrec/eval.hpp"
#include "mekbrec/linker.hpp"
#include "mekbrec/mekb.hpp"
#include "mekbrec/pipeline.hpp"
#include "mekbrec/text.hpp"
#include "mekbrec/tokenizer.hpp"
#include "mekbrec/training.hpp"
#include "micro.hpp"
#include "support.hpp"

using namespace mekb;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_s;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

bool close_rel(double got, double want, double tol = 1e-12) {
  return std::abs(got - want) <= tol * std::max(1.0, std::abs(want));
}

// ---- 1 -------------------------------------------------------------------

Outcome formula_oracles() {
  std::mt19937_64 rng(101);
  std::size_t bad = 0, instances = 0;

  // Prior: counts of (surface, entity) over the anchor list.
  for (int trial = 0; trial < 1000; ++trial, ++instances) {
    const int n = 1 + static_cast<int>(rng() % 60);
    std::vector<Anchor> anchors;
    for (int i = 0; i < n; ++i) {
      anchors.push_back({"m" + std::to_string(rng() % 5), "e" + std::to_string(rng() % 6)});
    }
    const AliasTable t = build_alias_table(anchors, nullptr).table;
    for (int m = 0; m < 5; ++m) {
      for (int e = 0; e < 6; ++e) {
        const std::string ms = "m" + std::to_string(m), es = "e" + std::to_string(e);
        double num = 0, den = 0;
        for (const auto& a : anchors) {
          if (a.surface != ms) continue;
          ++den;
          if (a.entity_id == es) ++num;
        }
        const double want = den == 0 ? 0.0 : num / den;
        if (!close_rel(t.prior(ms, es), want)) ++bad;
      }
    }
  }

  // Smooth: k below the knee is returned as is, above it k + k ln k - k ln k*.
  for (int trial = 0; trial < 1000; ++trial, ++instances) {
    const std::uint64_t k = rng() % 500, ks = 1 + rng() % 50;
    const double kd = static_cast<double>(k), ksd = static_cast<double>(ks);
    const double want = k <= ks ? kd : kd + kd * std::log(kd) - kd * std::log(ksd);
    if (!close_rel(smooth(k, ks), want)) ++bad;
  }

  // Idf: user count over users holding the entity.
  for (int trial = 0; trial < 1000; ++trial, ++instances) {
    const int n_users = 1 + static_cast<int>(rng() % 12);
    std::map<std::string, std::set<std::string>> inc;
    std::vector<std::vector<bool>> has(n_users, std::vector<bool>(8, false));
    for (int u = 0; u < n_users; ++u) {
      auto& s = inc["u" + std::to_string(u)];
      for (int e = 0; e < 8; ++e) {
        if (rng() % 3 == 0) {
          s.insert("e" + std::to_string(e));
          has[u][e] = true;
        }
      }
    }
    const IdfTable idf = compute_idf(inc);
    for (int e = 0; e < 8; ++e) {
      int df = 0;
      for (int u = 0; u < n_users; ++u) df += has[u][e];
      const std::string id = "e" + std::to_string(e);
      if (df == 0) {
        if (idf.idf.count(id)) ++bad;
        continue;
      }
      if (!close_rel(idf.at(id), std::log(static_cast<double>(n_users) / df))) ++bad;
    }
  }

  // MeKBScore: normalized smoothed, weighted tf times idf.
  for (int trial = 0; trial < 1000; ++trial) {
    const int n_ent = 1 + static_cast<int>(rng() % 15);
    const int n_users = 1 + static_cast<int>(rng() % 8);
    KnowledgeGraph kg;
    std::vector<double> weight(n_ent);
    for (int e = 0; e < n_ent; ++e) {
      const auto src = static_cast<EntitySource>(rng() % 4);
      weight[e] = base_weight(src);
      kg.add_entity({"e" + std::to_string(e), "t" + std::to_string(e), src, weight[e]});
    }
    std::vector<std::vector<int>> counts(n_users, std::vector<int>(n_ent, 0));
    std::vector<std::vector<LinkedItem>> items(n_users);
    for (int u = 0; u < n_users; ++u) {
      const int n_items = static_cast<int>(rng() % 30);
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
    auto ptrs = [&](int u) {
      std::vector<const LinkedItem*> p;
      for (const auto& li : items[u]) p.push_back(&li);
      return p;
    };
    std::map<std::string, std::set<std::string>> inc;
    for (int u = 0; u < n_users; ++u) inc["u" + std::to_string(u)] = interest_set(ptrs(u));
    const IdfTable idf = compute_idf(inc);
    const std::uint64_t k_star = 1 + rng() % 12;
    for (int u = 0; u < n_users; ++u, ++instances) {
      const MeKB m = build_mekb("u" + std::to_string(u), ptrs(u), idf, kg, {k_star, true});
      std::map<std::string, double> raw;
      double den = 0.0;
      for (int e = 0; e < n_ent; ++e) {
        const int k = counts[u][e];
        if (k == 0) continue;
        int df = 0;
        for (int v = 0; v < n_users; ++v) df += counts[v][e] > 0;
        const double ks = static_cast<double>(k_star);
        const double s = k <= static_cast<int>(k_star) ? k : k * (1.0 + std::log(k / ks));
        const double w = s * weight[e] * std::log(static_cast<double>(n_users) / df);
        if (w > 0) raw["e" + std::to_string(e)] = w;
        den += w;
      }
      if (raw.empty()) {
        bad += !m.empty();
        continue;
      }
      if (m.entries.size() != raw.size()) {
        ++bad;
        continue;
      }
      for (const auto& entry : m.entries) {
        if (!close_rel(entry.score, raw.at(entry.entity_id) / den)) ++bad;
      }
    }
  }
  return {bad == 0, std::to_string(instances) + " instances, " + std::to_string(bad) + " mismatches"};
}

// ---- 2 -------------------------------------------------------------------

Outcome gradient_fidelity() {
  const EncoderConfig cfg = testsupport::micro_config();
  EncoderParams params = init_encoder(cfg);
  testsupport::jitter(params, 99);
  ItemTower tower = ItemTower::init({"i0", "i1", "i2", "i3", "i4"}, cfg.k_dim, 3, 0.5);
  const auto batch = testsupport::micro_batch(static_cast<std::size_t>(cfg.n_max));
  BatchGradients g = batch_gradients(batch, params, cfg, tower);
  const auto loss = [&] { return batch_loss(batch, params, cfg, tower); };

  auto analytic = g.encoder.tensors();
  auto tensors = params.tensors();
  std::size_t failed = 0;
  double worst = 0.0;
  std::string worst_name;
  for (std::size_t t = 0; t < tensors.size(); ++t) {
    const Matrix num = testsupport::numeric_gradient(*tensors[t].value, loss);
    if (!testsupport::grads_agree(*analytic[t].value, num)) ++failed;
    const double err = (*analytic[t].value - num).norm() < 1e-8
                           ? 0.0
                           : testsupport::rel_error(*analytic[t].value, num);
    if (err > worst) {
      worst = err;
      worst_name = tensors[t].name;
    }
  }
  const Matrix num_items = testsupport::numeric_gradient(tower.embeddings(), loss);
  if (!testsupport::grads_agree(g.items, num_items)) ++failed;
  worst = std::max(worst, testsupport::rel_error(g.items, num_items));
  return {failed == 0, std::to_string(tensors.size() + 1) + " tensors, worst relative error " +
                           fmt("%.2e", worst) + (worst_name.empty() ? "" : " (" + worst_name + ")")};
}

// ---- 3 -------------------------------------------------------------------

Outcome loss_identities() {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 2.0);
  bool ok = true;
  std::ostringstream d;

  Matrix u = Matrix::NullaryExpr(3, 4, [&] { return n(rng); });
  Matrix one = Matrix::NullaryExpr(1, 4, [&] { return n(rng); });
  const std::vector<std::size_t> zeros{0, 0, 0};
  const double single = full_softmax_loss(u, one, zeros);
  ok &= single == 0.0;
  d << "I=1 loss " << single;

  for (int items : {2, 7, 50}) {
    const Matrix users = Matrix::Zero(3, 4);
    const Matrix cat = Matrix::NullaryExpr(items, 4, [&] { return n(rng); });
    const std::vector<std::size_t> pos{0, static_cast<std::size_t>(items - 1), 1};
    const double l = full_softmax_loss(users, cat, pos);
    ok &= std::abs(l - std::log(static_cast<double>(items))) < 1e-9;
  }

  // An extra unit column on the users and a constant column c on the items
  // adds c to every logit.
  const Matrix users = Matrix::NullaryExpr(4, 4, [&] { return n(rng); });
  const Matrix cat = Matrix::NullaryExpr(9, 4, [&] { return n(rng); });
  const std::vector<std::size_t> pos{3, 0, 8, 5};
  const double base = full_softmax_loss(users, cat, pos);
  Matrix users1(4, 5), cat1(9, 5);
  users1 << users, Matrix::Ones(4, 1);
  double worst_shift = 0.0;
  for (double c : {-1000.0, -3.5, 0.0, 1e-3, 42.0, 700.0}) {
    cat1 << cat, Matrix::Constant(9, 1, c);
    worst_shift = std::max(worst_shift, std::abs(full_softmax_loss(users1, cat1, pos) - base));
  }
  ok &= worst_shift < 1e-9;
  d << ", ln I for I in {2,7,50}, worst shift difference " << fmt("%.1e", worst_shift);
  return {ok, d.str()};
}

// ---- 4 -------------------------------------------------------------------

PipelineConfig small_pipeline(const fs::path& dir) {
  PipelineConfig cfg;
  cfg.work_dir = dir.string();
  return cfg;
}

void prepare(const PipelineConfig& cfg) {
  run_synth(cfg);
  run_build_alias(cfg);
  run_link(cfg);
  run_build_mekb(cfg);
  run_train_vocab(cfg);
}

Outcome overfit_sanity() {
  const auto dir = testsupport::scratch("c4_separable");
  PipelineConfig cfg = small_pipeline(dir);
  cfg.synth.separable = true;
  cfg.synth.n_users = 20;
  cfg.synth.n_topics = 10;
  cfg.synth.n_target_items = 10;
  cfg.synth.n_source_items = 30;
  cfg.synth.n_entities = 100;
  cfg.synth.n_cooccurrence = 0;
  cfg.vocab_size = 300;
  prepare(cfg);

  const KnowledgeGraph kg = load_kg(cfg.path(cfg.files.entities_augmented));
  const Vocab vocab = load_vocab(cfg.path(cfg.files.vocab));
  std::map<std::string, TokenSequence> seqs;
  for (const auto& m : load_mekbs(cfg.path(cfg.files.mekb))) {
    if (!m.empty()) seqs.emplace(m.user_id, build_sequence(m, kg, vocab, cfg.encoder.n_max));
  }
  IngestDiagnostics diag;
  std::vector<TrainingExample> examples;
  std::set<std::string> catalog_set;
  for (const auto& r : load_interactions(cfg.path(cfg.files.interactions), {}, diag)) {
    if (r.domain != cfg.target_domain) continue;
    catalog_set.insert(r.item_id);
    const auto it = seqs.find(r.user_id);
    if (it != seqs.end()) examples.push_back({r.user_id, it->second, r.item_id});
  }
  const std::vector<std::string> catalog(catalog_set.begin(), catalog_set.end());

  EncoderConfig enc = cfg.encoder;
  enc.vocab_size = static_cast<int>(vocab.size());
  TrainConfig tc = cfg.train;
  tc.epochs = 200;
  tc.batch_size = 4;
  tc.warmup_epochs = 5;
  tc.lr = 0.03;
  const DualEncoderResult res =
      train_dual_encoder(examples, init_encoder(enc), ItemTower::init(catalog, enc.k_dim, 9, enc.init_std),
                         enc, tc);

  std::size_t hits = 0;
  for (const auto& ex : examples) {
    const Vector u = encode_user(res.params, enc, ex.seq);
    const double pos = score(u, encode_item(ex.item_id, res.tower));
    std::vector<double> neg;
    for (const auto& id : catalog) {
      if (id != ex.item_id) neg.push_back(score(u, encode_item(id, res.tower)));
    }
    hits += pessimistic_rank(pos, neg) == 1;
  }
  const double hr1 = examples.empty() ? 0.0 : static_cast<double>(hits) / examples.size();
  return {examples.size() == 20 && hr1 >= 0.9,
          std::to_string(examples.size()) + " users, " + std::to_string(catalog.size()) +
              " items, training HR@1 " + fmt("%.3f", hr1) + ", final loss " +
              fmt("%.4f", res.epochs.back().mean_loss)};
}

// ---- 5, 6 ----------------------------------------------------------------

// HR@10 of `bucket` for `ranker` in a report.jsonl file.
double report_hr(const std::string& path, const std::string& ranker, const std::string& bucket) {
  std::istringstream in(testsupport::read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    if (j.at("ranker") == ranker && j.at("bucket") == bucket) return j.at("hr").get<double>();
  }
  throw std::runtime_error("no " + ranker + "/" + bucket + " row in " + path);
}

Outcome pretraining_direction() {
  int wins = 0;
  std::ostringstream d;
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    const auto dir = testsupport::scratch("c5_seed" + std::to_string(seed));
    PipelineConfig cfg = small_pipeline(dir);
    cfg.set_seed(seed);
    cfg.train.epochs = 3;
    prepare(cfg);
    run_pretrain(cfg);

    cfg.use_pretrained = true;
    cfg.files.model = "model_pretrained.ckpt";
    cfg.files.report_jsonl = "report_pretrained.jsonl";
    cfg.files.report = "report_pretrained.txt";
    cfg.files.train_log = "train_pretrained.tsv";
    run_train(cfg);
    run_evaluate(cfg);
    const double pre = report_hr(cfg.path(cfg.files.report_jsonl), "model", "all");

    cfg.use_pretrained = false;
    cfg.files.model = "model_random.ckpt";
    cfg.files.report_jsonl = "report_random.jsonl";
    cfg.files.report = "report_random.txt";
    cfg.files.train_log = "train_random.tsv";
    run_train(cfg);
    run_evaluate(cfg);
    const double rnd = report_hr(cfg.path(cfg.files.report_jsonl), "model", "all");

    wins += pre > rnd;
    d << "seed " << seed << ": pretrained " << fmt("%.4f", pre) << " vs random "
      << fmt("%.4f", rnd) << "; ";
  }
  d << wins << "/3 wins, " << PipelineConfig{}.synth.n_users << " users";
  return {wins >= 2, d.str()};
}

Outcome zero_shot_direction() {
  const auto dir = testsupport::scratch("c6_zero_shot");
  const PipelineConfig cfg = small_pipeline(dir);
  run_all(cfg);
  const std::string bucket = "zero-shot [0]";
  const double model = report_hr(cfg.path(cfg.files.report_jsonl), "model", bucket);
  const double pop = report_hr(cfg.path(cfg.files.report_jsonl), "popularity", bucket);
  return {model > pop, "zero-shot HR@10 model " + fmt("%.4f", model) + " vs popularity " +
                           fmt("%.4f", pop) + ", held-out fraction " +
                           fmt("%.2f", cfg.split.cold_start_fraction)};
}

// ---- 7 -------------------------------------------------------------------

Outcome evaluation_exactness() {
  std::mt19937_64 rng(77);
  const std::size_t n_items = 40;
  std::vector<std::string> catalog;
  for (std::size_t i = 0; i < n_items; ++i) catalog.push_back("i" + std::to_string(100 + i));
  std::map<std::string, nn::Vector> scores;
  std::vector<Interaction> test;
  std::map<std::string, std::set<std::string>> interacted;
  for (int u = 0; u < 50; ++u) {
    const std::string user = "u" + std::to_string(u);
    nn::Vector s(static_cast<Eigen::Index>(n_items));
    // Coarse values so that ties occur.
    for (Eigen::Index i = 0; i < s.size(); ++i) s[i] = static_cast<double>(rng() % 8);
    scores[user] = s;
    const std::string item = catalog[rng() % n_items];
    test.push_back({user, item, "movies"});
    interacted[user].insert(item);
  }
  const Ranker ranker = [&](const std::string& u) -> std::optional<nn::Vector> { return scores.at(u); };
  EvalSettings settings;
  settings.k = 10;
  settings.n_neg = static_cast<int>(n_items) - 1;
  settings.seed = 3;
  const EvalOutcomes out = evaluate_records(ranker, catalog, test, interacted, settings);

  std::size_t mismatches = 0;
  double hr = 0, ndcg = 0;
  for (std::size_t r = 0; r < test.size(); ++r) {
    const auto& s = scores.at(test[r].user_id);
    const auto pos_idx = static_cast<Eigen::Index>(
        std::find(catalog.begin(), catalog.end(), test[r].item_id) - catalog.begin());
    std::size_t rank = 1;
    for (Eigen::Index i = 0; i < s.size(); ++i) rank += i != pos_idx && s[i] >= s[pos_idx];
    const double h = rank <= 10 ? 1.0 : 0.0;
    const double g = rank <= 10 ? 1.0 / std::log2(rank + 1.0) : 0.0;
    hr += h;
    ndcg += g;
    const auto& got = out.records[r];
    mismatches += got.rank != rank || got.hit != h || got.ndcg != g;
  }
  const EvalReport rep = summarize(out);
  mismatches += rep.overall.hr != hr / test.size();
  mismatches += std::abs(rep.overall.ndcg - ndcg / test.size()) > 1e-15;

  // A record whose positive has exactly two items scored above it.
  const std::vector<std::string> cat3{"a", "b", "c", "d", "e"};
  const Ranker fixed = [](const std::string&) -> std::optional<nn::Vector> {
    nn::Vector v(5);
    v << 0.9, 0.8, 0.5, 0.1, 0.2;
    return v;
  };
  const std::vector<Interaction> t3{{"u", "c", "movies"}};
  EvalSettings s3;
  s3.n_neg = 4;
  const EvalOutcomes o3 = evaluate_records(fixed, cat3, t3, {{"u", {"c"}}}, s3);
  const bool rank3 = o3.records.at(0).rank == 3 && o3.records[0].ndcg == 0.5 && ndcg_at(3, 10) == 0.5;
  return {mismatches == 0 && rank3 && out.replacement_fallbacks == 0,
          std::to_string(test.size()) + " records over " + std::to_string(n_items) + " items, " +
              std::to_string(mismatches) + " mismatches; rank-3 NDCG@10 " +
              fmt("%.17g", o3.records.at(0).ndcg)};
}

// ---- 8 -------------------------------------------------------------------

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = testsupport::read_file(e.path());
  }
  return files;
}

Outcome determinism() {
  const auto a = testsupport::scratch("c8_run_a");
  const auto b = testsupport::scratch("c8_run_b");
  run_all(small_pipeline(a));
  run_all(small_pipeline(b));
  const auto fa = snapshot(a), fb = snapshot(b);
  std::size_t differ = 0;
  for (const auto& [name, bytes] : fa) {
    const auto it = fb.find(name);
    differ += it == fb.end() || it->second != bytes;
  }
  differ += fb.size() - std::min(fb.size(), fa.size());
  std::size_t total = 0;
  for (const auto& [name, bytes] : fa) total += bytes.size();
  return {differ == 0 && !fa.empty() && fa.size() == fb.size(),
          std::to_string(fa.size()) + " files, " + std::to_string(total) + " bytes, " +
              std::to_string(differ) + " differing"};
}

// ---- 9 -------------------------------------------------------------------

Outcome alias_associativity() {
  std::mt19937_64 rng(909);
  std::vector<Anchor> corpus;
  const std::vector<std::string> words{"Paris", "paris", "Mercury", "Jaguar", "Apple", "apple inc",
                                       "Amazon", "Python", "Java", "Orion", "Nile", "Rome"};
  for (int i = 0; i < 10000; ++i) {
    std::string surface = words[rng() % words.size()];
    if (rng() % 4 == 0) surface += " " + std::to_string(rng() % 30);
    corpus.push_back({surface, "Q" + std::to_string(1 + rng() % 200)});
  }
  const AliasTable whole = build_alias_table(corpus, nullptr).table;
  const std::string whole_text = format_alias_table(whole);

  std::size_t failures = 0;
  const int trials = 30;
  for (int trial = 0; trial < trials; ++trial) {
    std::vector<Anchor> shuffled = corpus;
    if (trial % 2 == 1) std::shuffle(shuffled.begin(), shuffled.end(), rng);
    // Cut points include empty shards on some trials.
    std::size_t c1 = rng() % (shuffled.size() + 1), c2 = rng() % (shuffled.size() + 1);
    if (trial == 0) c1 = c2 = 0;
    if (trial == 1) c1 = c2 = shuffled.size();
    if (c1 > c2) std::swap(c1, c2);
    const std::span<const Anchor> all(shuffled);
    const AliasTable a = build_alias_table(all.subspan(0, c1), nullptr).table;
    const AliasTable b = build_alias_table(all.subspan(c1, c2 - c1), nullptr).table;
    const AliasTable c = build_alias_table(all.subspan(c2), nullptr).table;
    AliasTable left = a;
    left.merge(b);
    left.merge(c);
    AliasTable bc = b;
    bc.merge(c);
    AliasTable right = a;
    right.merge(bc);
    AliasTable rev = c;
    rev.merge(a);
    rev.merge(b);
    for (const AliasTable* t : {&left, &right, &rev}) {
      failures += !(*t == whole) || format_alias_table(*t) != whole_text;
    }
  }
  return {failures == 0, std::to_string(corpus.size()) + " anchors, " +
                             std::to_string(whole.mention_count()) + " mentions, " +
                             std::to_string(trials) + " splits x 3 merge orders, " +
                             std::to_string(failures) + " mismatches"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "formula oracles", 10, formula_oracles},
      {2, "gradient fidelity", 60, gradient_fidelity},
      {3, "loss identities", 60, loss_identities},
      {4, "overfit sanity", 300, overfit_sanity},
      {5, "pretraining ablation direction", 1200, pretraining_direction},
      {6, "zero-shot advantage over popularity", 1200, zero_shot_direction},
      {7, "evaluation exactness", 60, evaluation_exactness},
      {8, "pipeline determinism", 1200, determinism},
      {9, "alias merge associativity", 60, alias_associativity},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.budget_s) {
      o.pass = false;
      o.detail += "; over the " + fmt("%.0f", c.budget_s) + " s budget";
    }
    std::printf("%s %d %s (%.1f s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name.c_str(), secs,
                o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
