#include "mekbrec/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "mekbrec/alias.hpp"
#include "mekbrec/checkpoint.hpp"
#include "mekbrec/config_json.hpp"
#include "mekbrec/dataio.hpp"
#include "mekbrec/error.hpp"
#include "mekbrec/kgstore.hpp"
#include "mekbrec/linker.hpp"
#include "mekbrec/splitmix.hpp"
#include "mekbrec/tokenizer.hpp"
#include "mekbrec/tsv.hpp"

namespace mekb {

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(
    PipelineFiles, entities, triples, anchors, items, interactions, cooccurrence, alias,
    entities_augmented, linked, split_train, split_valid, split_test, mekb, vocab, pretrained,
    pretrain_log, model, train_log, report, report_jsonl)

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(
    SynthSpec, n_users, n_source_items, n_target_items, n_topics, n_entities,
    n_generic_entities, n_brands, max_topics_per_user, topic_purity, min_source_positives,
    max_source_positives, min_target_positives, max_target_positives, overlap_fraction,
    n_cooccurrence, separable, seed, source_domain, target_domain)

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(
    PipelineConfig, work_dir, files, source_domain, target_domain, seed, synth, mekb,
    min_user_positives, min_item_positives, split, include_target_train, vocab_size, encoder,
    pretrain, train, use_pretrained, eval)

PipelineConfig::PipelineConfig() {
  encoder.n_layers = 2;
  encoder.n_heads = 4;
  encoder.d_model = 32;
  encoder.d_ffn = 64;
  encoder.k_dim = 32;
  encoder.n_max = 96;

  pretrain.epochs = 6;
  pretrain.batch_size = 16;
  pretrain.lr = 0.03;
  pretrain.warmup_epochs = 1;

  train.epochs = 8;
  train.batch_size = 16;
  train.lr = 0.03;
  train.warmup_epochs = 1;

  eval.n_neg = 99;
  set_seed(seed);
}

std::string PipelineConfig::path(const std::string& file) const {
  return (std::filesystem::path(work_dir) / file).string();
}

void PipelineConfig::set_seed(std::uint64_t s) {
  seed = s;
  synth.seed = s;
  encoder.seed = splitmix64(s ^ 1);
  pretrain.seed = splitmix64(s ^ 2);
  train.seed = splitmix64(s ^ 3);
  split.seed = splitmix64(s ^ 4);
  eval.seed = splitmix64(s ^ 5);
}

void PipelineConfig::validate() const {
  if (source_domain.empty() || target_domain.empty() || source_domain == target_domain) {
    throw std::invalid_argument("source and target domains must be distinct and non-empty");
  }
  split.validate();
  pretrain.validate();
  train.validate();
  if (vocab_size == 0) throw std::invalid_argument("vocab_size must be positive");
  if (eval.k <= 0 || eval.n_neg <= 0) throw std::invalid_argument("eval k and n_neg must be positive");
}

std::string pipeline_config_to_json(const PipelineConfig& cfg) {
  return nlohmann::json(cfg).dump(2) + "\n";
}

PipelineConfig pipeline_config_from_json(const std::string& text) {
  try {
    // Patch onto the full default config so that nested objects keep the
    // pipeline defaults for keys they omit. A global seed rederives the stage
    // seeds first; explicit stage seeds still win.
    const nlohmann::json patch = nlohmann::json::parse(text);
    PipelineConfig base;
    if (patch.is_object() && patch.contains("seed")) base.set_seed(patch.at("seed").get<std::uint64_t>());
    nlohmann::json merged = base;
    merged.merge_patch(patch);
    return merged.get<PipelineConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("config", 0, e.what());
  }
}

PipelineConfig load_pipeline_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return pipeline_config_from_json(ss.str());
}

void save_pipeline_config(const PipelineConfig& cfg, const std::string& path) {
  auto out = tsv::open_output(path);
  out << pipeline_config_to_json(cfg);
}

namespace {

void require_inputs(const PipelineConfig& cfg, std::initializer_list<std::string> files) {
  for (const auto& f : files) {
    if (!std::filesystem::is_regular_file(cfg.path(f))) {
      throw InputError("missing input " + cfg.path(f));
    }
  }
}

DomainMap domain_map(const PipelineConfig& cfg) {
  return {{cfg.source_domain, cfg.source_domain}, {cfg.target_domain, cfg.target_domain}};
}

std::string format_double(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

void write_epoch_log(const std::vector<EpochStats>& epochs, const std::string& path) {
  auto out = tsv::open_output(path);
  out << "epoch\tmean_loss\tlr\n";
  for (const auto& e : epochs) {
    out << e.epoch << '\t' << format_double("%.9g", e.mean_loss) << '\t'
        << format_double("%.9g", e.lr) << '\n';
  }
}

std::vector<Interaction> load_split(const PipelineConfig& cfg, const std::string& file) {
  IngestDiagnostics diag;
  return load_interactions(cfg.path(file), {}, diag);
}

std::vector<std::string> target_catalog(const PipelineConfig& cfg) {
  IngestDiagnostics diag;
  std::vector<std::string> catalog;
  for (const auto& item : load_items(cfg.path(cfg.files.items), domain_map(cfg), diag)) {
    if (item.domain == cfg.target_domain) catalog.push_back(item.item_id);
  }
  std::sort(catalog.begin(), catalog.end());
  if (catalog.empty()) throw LoadError("no items in target domain " + cfg.target_domain);
  return catalog;
}

// Per-user MeKB sequences for users with a non-empty MeKB.
struct UserSequences {
  KnowledgeGraph kg;
  Vocab vocab;
  std::map<std::string, TokenSequence> sequences;
};

UserSequences user_sequences(const PipelineConfig& cfg, int n_max) {
  UserSequences us;
  us.kg = load_kg(cfg.path(cfg.files.entities_augmented));
  us.vocab = load_vocab(cfg.path(cfg.files.vocab));
  for (const auto& m : load_mekbs(cfg.path(cfg.files.mekb))) {
    if (m.empty()) continue;
    us.sequences.emplace(m.user_id, build_sequence(m, us.kg, us.vocab, n_max));
  }
  return us;
}

}  // namespace

std::string run_synth(const PipelineConfig& cfg) {
  SynthSpec spec = cfg.synth;
  spec.source_domain = cfg.source_domain;
  spec.target_domain = cfg.target_domain;
  const SynthBundle bundle = generate_synthetic(spec);
  std::filesystem::create_directories(cfg.work_dir);
  const auto& f = cfg.files;
  write_bundle(bundle, {cfg.path(f.entities), cfg.path(f.triples), cfg.path(f.anchors),
                        cfg.path(f.items), cfg.path(f.interactions), cfg.path(f.cooccurrence)});
  std::ostringstream s;
  s << "entities " << bundle.kg.entity_count() << ", triples " << bundle.kg.triple_count()
    << ", anchors " << bundle.anchors.size() << ", items " << bundle.items.size()
    << ", interactions " << bundle.interactions.size() << '\n';
  return s.str();
}

std::string run_build_alias(const PipelineConfig& cfg) {
  const auto& f = cfg.files;
  require_inputs(cfg, {f.entities, f.triples, f.anchors});
  const KnowledgeGraph kg = load_kg(cfg.path(f.entities), cfg.path(f.triples));
  std::vector<Anchor> anchors = load_anchors(cfg.path(f.anchors));
  const auto titles = title_anchors(kg);
  anchors.insert(anchors.end(), titles.begin(), titles.end());
  const AliasBuild build = build_alias_table(anchors, &kg);
  save_alias_table(build.table, cfg.path(f.alias));
  std::ostringstream s;
  s << "anchors " << build.diagnostics.anchors_read << ", mentions " << build.table.table().size()
    << ", unknown entity " << build.diagnostics.unknown_entity << ", empty surface "
    << build.diagnostics.empty_surface << '\n';
  return s.str();
}

std::string run_link(const PipelineConfig& cfg) {
  const auto& f = cfg.files;
  require_inputs(cfg, {f.entities, f.triples, f.items, f.alias});
  IngestDiagnostics diag;
  const auto items = load_items(cfg.path(f.items), domain_map(cfg), diag);
  const KnowledgeGraph kg =
      augment_domain_entities(load_kg(cfg.path(f.entities), cfg.path(f.triples)), items);
  const AliasTable table = load_alias_table(cfg.path(f.alias));
  const Gazetteer gazetteer(table);
  std::vector<LinkedItem> linked;
  linked.reserve(items.size());
  std::size_t links = 0;
  for (const auto& item : items) {
    linked.push_back(link_item(item, table, gazetteer, kg));
    links += linked.back().entities.size();
  }
  save_entities(kg, cfg.path(f.entities_augmented));
  save_linked_items(linked, cfg.path(f.linked));
  std::ostringstream s;
  s << "items " << linked.size() << ", links " << links << ", malformed item lines "
    << diag.malformed << ", entities " << kg.entity_count() << '\n';
  return s.str();
}

std::string run_build_mekb(const PipelineConfig& cfg) {
  const auto& f = cfg.files;
  require_inputs(cfg, {f.interactions, f.linked, f.entities_augmented});
  IngestDiagnostics diag;
  const auto all = load_interactions(cfg.path(f.interactions), domain_map(cfg), diag);
  std::vector<Interaction> source, target;
  for (const auto& r : all) (r.domain == cfg.source_domain ? source : target).push_back(r);
  source = filter_dataset(source, cfg.min_user_positives, cfg.min_item_positives);
  target = filter_dataset(target, cfg.min_user_positives, cfg.min_item_positives);

  std::set<std::string> source_users, target_users, overlapped;
  for (const auto& r : source) source_users.insert(r.user_id);
  for (const auto& r : target) target_users.insert(r.user_id);
  std::set_intersection(source_users.begin(), source_users.end(), target_users.begin(),
                        target_users.end(), std::inserter(overlapped, overlapped.end()));
  const DatasetSplit split = split_dataset(target, overlapped, cfg.split);
  save_interactions(split.train, cfg.path(f.split_train));
  save_interactions(split.valid, cfg.path(f.split_valid));
  save_interactions(split.test, cfg.path(f.split_test));

  const KnowledgeGraph kg = load_kg(cfg.path(f.entities_augmented));
  std::map<std::string, LinkedItem> linked;
  for (auto& li : load_linked_items(cfg.path(f.linked))) linked.emplace(li.item_id, std::move(li));

  std::map<std::string, std::vector<const LinkedItem*>> positives;
  auto add = [&](const Interaction& r) {
    const auto it = linked.find(r.item_id);
    if (it == linked.end()) throw LoadError("interaction item " + r.item_id + " was not linked");
    positives[r.user_id].push_back(&it->second);
  };
  for (const auto& r : source) add(r);
  if (cfg.include_target_train) {
    for (const auto& r : split.train) add(r);
  }
  std::map<std::string, std::set<std::string>> incidence;
  for (const auto& [user, items] : positives) incidence[user] = interest_set(items);
  std::vector<MeKB> mekbs;
  std::size_t empty = 0;
  if (!incidence.empty()) {
    const IdfTable idf = compute_idf(incidence);
    for (const auto& [user, items] : positives) {
      mekbs.push_back(build_mekb(user, items, idf, kg, cfg.mekb));
      if (mekbs.back().empty()) ++empty;
    }
  }
  save_mekbs(mekbs, cfg.path(f.mekb));
  std::ostringstream s;
  s << "source records " << source.size() << ", target records " << target.size()
    << ", overlap ratio "
    << format_double("%.4f", source_users.empty() ? 0.0 : overlap_ratio(source_users, target_users))
    << ", split " << split.train.size() << '/' << split.valid.size() << '/' << split.test.size()
    << ", cold-start users " << split.cold_start_users.size() << ", mekbs " << mekbs.size()
    << " (" << empty << " empty)\n";
  return s.str();
}

std::string run_train_vocab(const PipelineConfig& cfg) {
  const auto& f = cfg.files;
  require_inputs(cfg, {f.entities_augmented});
  const KnowledgeGraph kg = load_kg(cfg.path(f.entities_augmented));
  std::vector<std::string> titles;
  titles.reserve(kg.entity_count());
  for (const auto& [id, e] : kg.entities()) titles.push_back(e.title);
  const Vocab vocab = train_vocab(titles, cfg.vocab_size);
  save_vocab(vocab, cfg.path(f.vocab));
  return "vocab " + std::to_string(vocab.size()) + " tokens from " +
         std::to_string(titles.size()) + " titles\n";
}

std::string run_pretrain(const PipelineConfig& cfg) {
  const auto& f = cfg.files;
  require_inputs(cfg, {f.entities_augmented, f.vocab, f.mekb});
  const UserSequences us = user_sequences(cfg, cfg.encoder.n_max);
  std::vector<TokenSequence> corpus;
  for (const auto& [user, seq] : us.sequences) corpus.push_back(seq);
  std::size_t cooc = 0;
  if (std::filesystem::is_regular_file(cfg.path(f.cooccurrence))) {
    for (const auto& list : load_cooccurrence(cfg.path(f.cooccurrence))) {
      std::vector<std::string> titles;
      for (const auto& id : list) {
        if (const Entity* e = us.kg.find(id)) titles.push_back(e->title);
      }
      if (titles.empty()) continue;
      corpus.push_back(build_sequence(titles, us.vocab, cfg.encoder.n_max));
      ++cooc;
    }
  }
  if (corpus.empty()) throw LoadError("empty pretraining corpus");
  EncoderConfig enc = cfg.encoder;
  enc.vocab_size = static_cast<int>(us.vocab.size());
  const PretrainResult result = pretrain_mlm(corpus, init_encoder(enc), enc, cfg.pretrain);
  save_checkpoint({enc, result.params, std::nullopt}, cfg.path(f.pretrained));
  write_epoch_log(result.epochs, cfg.path(f.pretrain_log));
  std::ostringstream s;
  s << "sequences " << corpus.size() << " (" << cooc << " co-occurrence), final loss "
    << format_double("%.4f", result.epochs.empty() ? 0.0 : result.epochs.back().mean_loss) << '\n';
  return s.str();
}

std::string run_train(const PipelineConfig& cfg) {
  const auto& f = cfg.files;
  require_inputs(cfg, {f.entities_augmented, f.vocab, f.mekb, f.split_train, f.items});
  if (cfg.use_pretrained) require_inputs(cfg, {f.pretrained});

  EncoderConfig enc = cfg.encoder;
  EncoderParams params;
  if (cfg.use_pretrained) {
    Checkpoint ck = load_checkpoint(cfg.path(f.pretrained));
    enc = ck.config;
    params = std::move(ck.params);
  }
  const UserSequences us = user_sequences(cfg, enc.n_max);
  if (!cfg.use_pretrained) {
    enc.vocab_size = static_cast<int>(us.vocab.size());
    params = init_encoder(enc);
  } else if (enc.vocab_size != static_cast<int>(us.vocab.size())) {
    throw LoadError("pretrained checkpoint vocabulary does not match " + cfg.path(f.vocab));
  }

  const auto catalog = target_catalog(cfg);
  ItemTower tower = ItemTower::init(catalog, enc.k_dim, splitmix64(cfg.train.seed ^ 0xA5),
                                    enc.init_std);
  std::vector<TrainingExample> examples;
  std::size_t ineligible = 0;
  for (const auto& r : load_split(cfg, f.split_train)) {
    const auto it = us.sequences.find(r.user_id);
    if (it == us.sequences.end() || !tower.contains(r.item_id)) {
      ++ineligible;
      continue;
    }
    examples.push_back({r.user_id, it->second, r.item_id});
  }
  if (examples.empty()) throw LoadError("no eligible training examples");
  const DualEncoderResult result =
      train_dual_encoder(examples, std::move(params), std::move(tower), enc, cfg.train);
  save_checkpoint({enc, result.params, result.tower}, cfg.path(f.model));
  write_epoch_log(result.epochs, cfg.path(f.train_log));
  std::ostringstream s;
  s << "examples " << examples.size() << " (" << ineligible << " ineligible), final loss "
    << format_double("%.4f", result.epochs.empty() ? 0.0 : result.epochs.back().mean_loss) << '\n';
  return s.str();
}

namespace {

Ranker model_ranker(const Checkpoint& ck, const UserSequences& us) {
  return [&ck, &us](const std::string& user) -> std::optional<nn::Vector> {
    const auto it = us.sequences.find(user);
    if (it == us.sequences.end()) return std::nullopt;
    const nn::Vector u = encode_user(ck.params, ck.config, it->second);
    return nn::Vector(u * ck.tower->embeddings().transpose());
  };
}

std::string tag_jsonl(const std::string& jsonl, const std::string& ranker) {
  std::istringstream in(jsonl);
  std::string line, out;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] != '{') continue;
    out += "{\"ranker\":\"" + ranker + "\"," + line.substr(1) + "\n";
  }
  return out;
}

}  // namespace

std::string run_evaluate(const PipelineConfig& cfg) {
  const auto& f = cfg.files;
  require_inputs(cfg, {f.entities_augmented, f.vocab, f.mekb, f.split_train, f.split_valid,
                       f.split_test, f.model});
  const Checkpoint ck = load_checkpoint(cfg.path(f.model));
  if (!ck.tower) throw LoadError(cfg.path(f.model) + " has no item embeddings");
  const UserSequences us = user_sequences(cfg, ck.config.n_max);

  const auto train = load_split(cfg, f.split_train);
  const auto valid = load_split(cfg, f.split_valid);
  const auto test = load_split(cfg, f.split_test);
  std::map<std::string, std::set<std::string>> interacted;
  std::map<std::string, std::size_t> train_counts;
  for (const auto* part : {&train, &valid, &test}) {
    for (const auto& r : *part) interacted[r.user_id].insert(r.item_id);
  }
  for (const auto& r : train) ++train_counts[r.user_id];

  const auto& catalog = ck.tower->item_ids();
  const EvalOutcomes model = evaluate_records(model_ranker(ck, us), catalog, test, interacted, cfg.eval);
  const EvalOutcomes popular =
      evaluate_records(popularity_ranker(train, catalog), catalog, test, interacted, cfg.eval);
  const EvalReport model_report = bin_by_activity(model, train_counts);
  const EvalReport popular_report = bin_by_activity(popular, train_counts);

  const std::string text = "model\n" + format_report(model_report) + "\npopularity\n" +
                           format_report(popular_report);
  auto out = tsv::open_output(cfg.path(f.report));
  out << text;
  auto jsonl = tsv::open_output(cfg.path(f.report_jsonl));
  jsonl << tag_jsonl(format_report_jsonl(model_report), "model")
        << tag_jsonl(format_report_jsonl(popular_report), "popularity");
  return text;
}

std::vector<std::pair<std::string, double>> run_retrieve(const PipelineConfig& cfg,
                                                         const std::string& user_id,
                                                         std::size_t top_n) {
  const auto& f = cfg.files;
  require_inputs(cfg, {f.entities_augmented, f.vocab, f.mekb, f.model});
  const Checkpoint ck = load_checkpoint(cfg.path(f.model));
  if (!ck.tower) throw LoadError(cfg.path(f.model) + " has no item embeddings");
  const UserSequences us = user_sequences(cfg, ck.config.n_max);
  const auto it = us.sequences.find(user_id);
  if (it == us.sequences.end()) throw ColdUserError("cold user, no MeKB: " + user_id);
  const nn::Vector u = encode_user(ck.params, ck.config, it->second);
  const auto& ids = ck.tower->item_ids();
  std::vector<std::pair<std::string, double>> scored;
  scored.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    scored.emplace_back(ids[i], score(u, ck.tower->embeddings().row(static_cast<Eigen::Index>(i))));
  }
  const std::size_t n = std::min(top_n, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end(),
                    [](const auto& a, const auto& b) {
                      return a.second != b.second ? a.second > b.second : a.first < b.first;
                    });
  scored.resize(n);
  return scored;
}

void run_all(const PipelineConfig& cfg) {
  run_synth(cfg);
  run_build_alias(cfg);
  run_link(cfg);
  run_build_mekb(cfg);
  run_train_vocab(cfg);
  if (cfg.use_pretrained) run_pretrain(cfg);
  run_train(cfg);
  run_evaluate(cfg);
}

}  // namespace mekb
