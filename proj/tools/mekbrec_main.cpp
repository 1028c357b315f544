#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "mekbrec/error.hpp"
#include "mekbrec/pipeline.hpp"

namespace {

enum ExitCode {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kMissingInput = 3,
  kInvalidData = 4,
  kTrainingDiverged = 5,
  kColdUser = 6,
};

struct Overrides {
  std::string config;
  std::string work_dir;
  std::optional<std::uint64_t> seed;
};

mekb::PipelineConfig resolve(const Overrides& o) {
  mekb::PipelineConfig cfg;
  if (!o.config.empty()) cfg = mekb::load_pipeline_config(o.config);
  if (!o.work_dir.empty()) cfg.work_dir = o.work_dir;
  if (o.seed) cfg.set_seed(*o.seed);
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MeKB cross-domain recommendation pipeline"};
  app.require_subcommand(1);
  Overrides o;
  app.add_option("-c,--config", o.config, "JSON pipeline config");
  app.add_option("-w,--work-dir", o.work_dir, "Directory holding all pipeline files");
  app.add_option("--seed", o.seed, "Global seed; rederives every stage seed");

  using Stage = std::string (*)(const mekb::PipelineConfig&);
  const std::pair<const char*, std::pair<const char*, Stage>> stages[] = {
      {"synth", {"Generate a synthetic two-domain dataset", mekb::run_synth}},
      {"build-alias", {"Build the alias table from anchors and titles", mekb::run_build_alias}},
      {"link", {"Link item texts to KG entities", mekb::run_link}},
      {"build-mekb", {"Filter, split and build per-user MeKBs", mekb::run_build_mekb}},
      {"train-vocab", {"Train the subword vocabulary over entity titles", mekb::run_train_vocab}},
      {"pretrain", {"Masked-token pretraining of the user encoder", mekb::run_pretrain}},
      {"train", {"Train the dual encoder", mekb::run_train}},
      {"evaluate", {"Evaluate against the popularity baseline", mekb::run_evaluate}},
  };
  Stage selected = nullptr;
  for (const auto& [name, desc_fn] : stages) {
    auto* sub = app.add_subcommand(name, desc_fn.first);
    const Stage fn = desc_fn.second;
    sub->callback([&selected, fn] { selected = fn; });
  }

  bool write_config = false;
  auto* init = app.add_subcommand("init-config", "Write the effective config as JSON to stdout");
  init->callback([&] { write_config = true; });

  std::string user;
  std::size_t top = 10;
  bool do_retrieve = false;
  auto* retrieve = app.add_subcommand("retrieve", "Top-n target items for one user");
  retrieve->add_option("--user", user, "User id")->required();
  retrieve->add_option("--top", top, "Number of items")->check(CLI::PositiveNumber);
  retrieve->callback([&] { do_retrieve = true; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    const mekb::PipelineConfig cfg = resolve(o);
    if (write_config) {
      std::cout << mekb::pipeline_config_to_json(cfg);
    } else if (do_retrieve) {
      for (const auto& [item, s] : mekb::run_retrieve(cfg, user, top)) {
        std::printf("%s\t%.6f\n", item.c_str(), s);
      }
    } else {
      std::cout << selected(cfg);
    }
    return kOk;
  } catch (const mekb::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kMissingInput;
  } catch (const mekb::ColdUserError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kColdUser;
  } catch (const mekb::TrainingError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kTrainingDiverged;
  } catch (const mekb::LoadError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalidData;
  } catch (const mekb::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalidData;
  } catch (const mekb::LinkError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalidData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}
