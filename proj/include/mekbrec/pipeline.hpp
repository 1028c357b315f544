#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mekbrec/encoder.hpp"
#include "mekbrec/eval.hpp"
#include "mekbrec/mekb.hpp"
#include "mekbrec/synthetic.hpp"
#include "mekbrec/training.hpp"

namespace mekb {

// File names inside the working directory.
struct PipelineFiles {
  std::string entities = "entities.tsv";
  std::string triples = "triples.tsv";
  std::string anchors = "anchors.tsv";
  std::string items = "items.jsonl";
  std::string interactions = "interactions.tsv";
  std::string cooccurrence = "cooccurrence.tsv";
  std::string alias = "alias.tsv";
  std::string entities_augmented = "entities_augmented.tsv";
  std::string linked = "linked.tsv";
  std::string split_train = "split_train.tsv";
  std::string split_valid = "split_valid.tsv";
  std::string split_test = "split_test.tsv";
  std::string mekb = "mekb.tsv";
  std::string vocab = "vocab.txt";
  std::string pretrained = "pretrained.ckpt";
  std::string pretrain_log = "pretrain_metrics.tsv";
  std::string model = "model.ckpt";
  std::string train_log = "train_metrics.tsv";
  std::string report = "report.txt";
  std::string report_jsonl = "report.jsonl";

  bool operator==(const PipelineFiles&) const = default;
};

struct PipelineConfig {
  std::string work_dir = ".";
  PipelineFiles files;
  std::string source_domain = "books";
  std::string target_domain = "movies";
  std::uint64_t seed = 7;

  SynthSpec synth;
  MeKBConfig mekb;
  std::size_t min_user_positives = 1;
  std::size_t min_item_positives = 1;
  SplitSpec split;
  // Also aggregate the user's target-domain training positives into the MeKB.
  bool include_target_train = false;

  std::size_t vocab_size = 1000;
  EncoderConfig encoder;
  TrainConfig pretrain;
  TrainConfig train;
  // Start fine-tuning from the pretrained checkpoint instead of a random init.
  bool use_pretrained = true;
  EvalSettings eval;

  PipelineConfig();
  bool operator==(const PipelineConfig&) const = default;

  std::string path(const std::string& file) const;
  // Sets the global seed and every seed derived from it.
  void set_seed(std::uint64_t s);
  void validate() const;
};

PipelineConfig load_pipeline_config(const std::string& path);
void save_pipeline_config(const PipelineConfig& cfg, const std::string& path);
std::string pipeline_config_to_json(const PipelineConfig& cfg);
PipelineConfig pipeline_config_from_json(const std::string& text);

// Each stage reads and writes only its own files under work_dir and returns a
// short human-readable summary. Missing inputs throw InputError.
std::string run_synth(const PipelineConfig& cfg);
std::string run_build_alias(const PipelineConfig& cfg);
std::string run_link(const PipelineConfig& cfg);
std::string run_build_mekb(const PipelineConfig& cfg);
std::string run_train_vocab(const PipelineConfig& cfg);
std::string run_pretrain(const PipelineConfig& cfg);
std::string run_train(const PipelineConfig& cfg);
std::string run_evaluate(const PipelineConfig& cfg);

// Top-n target items by score, ties by ascending item_id. Throws
// ColdUserError when the user has no MeKB.
std::vector<std::pair<std::string, double>> run_retrieve(const PipelineConfig& cfg,
                                                         const std::string& user_id,
                                                         std::size_t top_n);

// synth through evaluate.
void run_all(const PipelineConfig& cfg);

}  // namespace mekb
