#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mekbrec/alias.hpp"
#include "mekbrec/item.hpp"
#include "mekbrec/kgstore.hpp"

namespace mekb {

// Planted-topic cross-domain world. Users hold latent topics; items of a
// topic mention that topic's entities; positives concentrate in the user's
// topics, so a user's source-domain entities predict target-domain items.
struct SynthSpec {
  std::size_t n_users = 600;
  std::size_t n_source_items = 360;
  std::size_t n_target_items = 240;
  std::size_t n_topics = 12;
  std::size_t n_entities = 360;  // topic entities, split evenly over topics
  std::size_t n_generic_entities = 6;
  std::size_t n_brands = 15;
  std::size_t max_topics_per_user = 2;
  double topic_purity = 0.9;
  std::size_t min_source_positives = 5;
  std::size_t max_source_positives = 15;
  std::size_t min_target_positives = 3;
  std::size_t max_target_positives = 10;
  double overlap_fraction = 0.8;  // users also active in the target domain
  std::size_t n_cooccurrence = 1200;
  // One topic per user, one target item per topic, a single target positive
  // per user: the user's MeKB fully determines its item.
  bool separable = false;
  std::uint64_t seed = 7;
  std::string source_domain = "books";
  std::string target_domain = "movies";

  bool operator==(const SynthSpec&) const = default;
};

struct SynthBundle {
  KnowledgeGraph kg;
  std::vector<Anchor> anchors;
  std::vector<Item> items;
  std::vector<Interaction> interactions;
  // Entity-id lists drawn from single topics, for pretraining.
  std::vector<std::vector<std::string>> cooccurrence;
  std::map<std::string, std::vector<std::size_t>> user_topics;
  std::map<std::string, std::size_t> item_topic;
};

// Throws std::invalid_argument for an infeasible spec.
SynthBundle generate_synthetic(const SynthSpec& spec);

struct BundlePaths {
  std::string entities, triples, anchors, items, interactions, cooccurrence;
};

void write_bundle(const SynthBundle& bundle, const BundlePaths& paths);

// One entity-id list per line, tab-separated.
void save_cooccurrence(const std::vector<std::vector<std::string>>& lists, const std::string& path);
std::vector<std::vector<std::string>> load_cooccurrence(const std::string& path);

}  // namespace mekb
