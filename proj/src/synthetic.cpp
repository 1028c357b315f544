#include "mekbrec/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <stdexcept>

#include "mekbrec/dataio.hpp"
#include "mekbrec/tsv.hpp"

namespace mekb {
namespace {

using Rng = std::mt19937_64;

const char* const kFiller[] = {"the", "story", "of", "a", "new", "great", "with", "and",
                               "about", "journey", "into", "edition", "from", "for"};

std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

bool coin(Rng& rng, double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p; }

// Pronounceable pseudo-words: disjoint from the English filler vocabulary.
class NameMaker {
 public:
  explicit NameMaker(Rng& rng) : rng_(rng) {
    for (const char* f : kFiller) used_words_.insert(f);
  }

  std::string word() {
    static const std::string consonants = "bdfgklmnprstvz";
    static const std::string vowels = "aeiou";
    while (true) {
      std::string w;
      const std::size_t syllables = uniform(rng_, 2, 3);
      for (std::size_t s = 0; s < syllables; ++s) {
        w.push_back(consonants[uniform(rng_, 0, consonants.size() - 1)]);
        w.push_back(vowels[uniform(rng_, 0, vowels.size() - 1)]);
        if (coin(rng_, 0.3)) w.push_back(consonants[uniform(rng_, 0, consonants.size() - 1)]);
      }
      w[0] = static_cast<char>(w[0] - 'a' + 'A');
      if (used_words_.insert(w).second) return w;
    }
  }

  std::string title(std::size_t words) {
    std::string t = word();
    for (std::size_t i = 1; i < words; ++i) t += " " + word();
    return t;
  }

 private:
  Rng& rng_;
  std::set<std::string> used_words_;
};

std::string numbered(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%05zu", prefix, i);
  return buf;
}

std::size_t weighted_pick(Rng& rng, const std::vector<double>& weights) {
  return std::discrete_distribution<std::size_t>(weights.begin(), weights.end())(rng);
}

}  // namespace

SynthBundle generate_synthetic(const SynthSpec& spec) {
  if (spec.n_topics == 0 || spec.n_users == 0 || spec.n_source_items == 0 ||
      spec.n_target_items == 0) {
    throw std::invalid_argument("synthetic spec needs topics, users and items");
  }
  if (spec.n_topics > spec.n_entities) {
    throw std::invalid_argument("synthetic spec has more topics than entities");
  }
  if (spec.n_source_items < spec.n_topics || spec.n_target_items < spec.n_topics) {
    throw std::invalid_argument("every topic needs at least one item per domain");
  }
  if (spec.separable && spec.n_target_items != spec.n_topics) {
    throw std::invalid_argument("separable spec needs exactly one target item per topic");
  }
  if (spec.min_source_positives < 1 || spec.min_source_positives > spec.max_source_positives ||
      spec.min_target_positives < 1 || spec.min_target_positives > spec.max_target_positives ||
      spec.max_topics_per_user < 1) {
    throw std::invalid_argument("synthetic spec has inconsistent positive counts");
  }
  if (spec.max_source_positives > spec.n_source_items) {
    throw std::invalid_argument("max_source_positives exceeds the source catalog");
  }

  Rng rng(spec.seed);
  NameMaker names(rng);
  SynthBundle b;

  // Entities: topic entities round-robin over topics, plus topic-free generic ones.
  std::vector<std::vector<std::string>> topic_entities(spec.n_topics);
  std::vector<std::string> generic;
  for (std::size_t i = 0; i < spec.n_entities; ++i) {
    const std::string id = numbered("Q", i + 1);
    b.kg.add_entity(Entity{id, names.title(uniform(rng, 1, 2)), EntitySource::global, 1.0});
    topic_entities[i % spec.n_topics].push_back(id);
  }
  for (std::size_t i = 0; i < spec.n_generic_entities; ++i) {
    const std::string id = numbered("Q", spec.n_entities + i + 1);
    b.kg.add_entity(Entity{id, names.title(1), EntitySource::global, 1.0});
    generic.push_back(id);
  }
  for (const auto& ents : topic_entities) {
    for (const auto& head : ents) {
      if (ents.size() < 2) break;
      const std::size_t n = uniform(rng, 1, 2);
      for (std::size_t r = 0; r < n; ++r) {
        const auto& tail = ents[uniform(rng, 0, ents.size() - 1)];
        if (tail != head) b.kg.add_triple(Triple{head, "related_to", tail});
      }
    }
  }

  // Anchors: the title a few times, and the first title word as a short alias.
  for (const auto& [id, e] : b.kg.entities()) {
    const std::size_t title_count = uniform(rng, 1, 3);
    for (std::size_t c = 0; c < title_count; ++c) b.anchors.push_back({e.title, id});
    const auto space = e.title.find(' ');
    if (space != std::string::npos) {
      const std::size_t alias_count = uniform(rng, 1, 2);
      for (std::size_t c = 0; c < alias_count; ++c) b.anchors.push_back({e.title.substr(0, space), id});
    }
  }

  std::vector<std::string> brands;
  for (std::size_t i = 0; i < spec.n_brands; ++i) brands.push_back(names.word());
  std::vector<std::string> categories;
  for (std::size_t t = 0; t < spec.n_topics; ++t) categories.push_back(names.word() + " Collection");

  auto mention = [&](const std::string& id) {
    const std::string& title = b.kg.at(id).title;
    const auto space = title.find(' ');
    if (space != std::string::npos && coin(rng, 0.2)) return title.substr(0, space);
    return title;
  };
  auto filler = [&] { return std::string(kFiller[uniform(rng, 0, std::size(kFiller) - 1)]); };

  auto make_items = [&](const std::string& domain, const char* prefix, std::size_t count,
                        bool with_products) {
    std::vector<std::vector<std::string>> by_topic(spec.n_topics);
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t topic = i % spec.n_topics;
      Item item;
      item.item_id = numbered(prefix, i + 1);
      item.domain = domain;
      const auto& pool = topic_entities[topic];
      std::vector<std::string> chosen;
      const std::size_t n_mentions = std::min<std::size_t>(pool.size(), uniform(rng, 2, 3));
      while (chosen.size() < n_mentions) {
        const auto& e = pool[uniform(rng, 0, pool.size() - 1)];
        if (std::find(chosen.begin(), chosen.end(), e) == chosen.end()) chosen.push_back(e);
      }
      if (!generic.empty() && coin(rng, 0.3)) chosen.push_back(generic[uniform(rng, 0, generic.size() - 1)]);
      std::string text = filler();
      for (const auto& e : chosen) text += " " + mention(e) + " " + filler();
      item.text = text;
      item.attributes.push_back({EntitySource::brand, brands[uniform(rng, 0, brands.size() - 1)]});
      const std::size_t cat = coin(rng, 0.9) ? topic : uniform(rng, 0, spec.n_topics - 1);
      item.attributes.push_back({EntitySource::category, categories[cat]});
      if (with_products) item.attributes.push_back({EntitySource::product, names.title(2)});
      for (const auto& a : item.attributes) {
        item.explicit_entities.push_back(attribute_entity_id(a.source, a.name));
      }
      b.item_topic[item.item_id] = topic;
      by_topic[topic].push_back(item.item_id);
      b.items.push_back(std::move(item));
    }
    return by_topic;
  };
  const auto source_by_topic = make_items(spec.source_domain, "S", spec.n_source_items, false);
  const auto target_by_topic = make_items(spec.target_domain, "T", spec.n_target_items, true);

  // Zipf-like popularity inside each target topic.
  std::vector<std::vector<double>> target_weights(spec.n_topics);
  for (std::size_t t = 0; t < spec.n_topics; ++t) {
    for (std::size_t r = 0; r < target_by_topic[t].size(); ++r) {
      target_weights[t].push_back(1.0 / std::pow(static_cast<double>(r + 1), 0.8));
    }
  }

  std::set<Interaction> interactions;
  for (std::size_t u = 0; u < spec.n_users; ++u) {
    const std::string user = numbered("u", u + 1);
    std::vector<std::size_t> topics;
    if (spec.separable) {
      topics.push_back(u % spec.n_topics);
    } else {
      const std::size_t k = uniform(rng, 1, std::min(spec.max_topics_per_user, spec.n_topics));
      while (topics.size() < k) {
        const std::size_t t = uniform(rng, 0, spec.n_topics - 1);
        if (std::find(topics.begin(), topics.end(), t) == topics.end()) topics.push_back(t);
      }
    }
    b.user_topics[user] = topics;
    const double purity = spec.separable ? 1.0 : spec.topic_purity;

    std::set<std::string> src;
    const std::size_t n_src = uniform(rng, spec.min_source_positives, spec.max_source_positives);
    for (std::size_t attempt = 0; src.size() < n_src && attempt < 50 * n_src; ++attempt) {
      if (coin(rng, purity)) {
        const auto& pool = source_by_topic[topics[uniform(rng, 0, topics.size() - 1)]];
        src.insert(pool[uniform(rng, 0, pool.size() - 1)]);
      } else {
        src.insert(numbered("S", uniform(rng, 1, spec.n_source_items)));
      }
    }
    for (const auto& item : src) interactions.insert({user, item, spec.source_domain});

    if (!spec.separable && !coin(rng, spec.overlap_fraction)) continue;
    std::set<std::string> tgt;
    const std::size_t n_tgt =
        spec.separable ? 1 : uniform(rng, spec.min_target_positives, spec.max_target_positives);
    for (std::size_t attempt = 0; tgt.size() < n_tgt && attempt < 50 * n_tgt; ++attempt) {
      if (coin(rng, purity)) {
        const std::size_t t = topics[uniform(rng, 0, topics.size() - 1)];
        tgt.insert(target_by_topic[t][weighted_pick(rng, target_weights[t])]);
      } else {
        tgt.insert(numbered("T", uniform(rng, 1, spec.n_target_items)));
      }
    }
    for (const auto& item : tgt) interactions.insert({user, item, spec.target_domain});
  }
  b.interactions.assign(interactions.begin(), interactions.end());

  for (std::size_t s = 0; s < spec.n_cooccurrence; ++s) {
    const auto& pool = topic_entities[uniform(rng, 0, spec.n_topics - 1)];
    std::vector<std::string> list = pool;
    std::shuffle(list.begin(), list.end(), rng);
    list.resize(std::min(list.size(), uniform(rng, 4, 10)));
    if (!generic.empty() && coin(rng, 0.3)) list.push_back(generic[uniform(rng, 0, generic.size() - 1)]);
    b.cooccurrence.push_back(std::move(list));
  }
  return b;
}

void save_cooccurrence(const std::vector<std::vector<std::string>>& lists, const std::string& path) {
  auto out = tsv::open_output(path);
  for (const auto& l : lists) out << tsv::join(l) << '\n';
}

std::vector<std::vector<std::string>> load_cooccurrence(const std::string& path) {
  std::vector<std::vector<std::string>> out;
  tsv::for_each_line(path, [&](std::size_t, const std::string& line) { out.push_back(tsv::split(line)); });
  return out;
}

void write_bundle(const SynthBundle& bundle, const BundlePaths& paths) {
  save_entities(bundle.kg, paths.entities);
  save_triples(bundle.kg, paths.triples);
  save_anchors(bundle.anchors, paths.anchors);
  save_items(bundle.items, paths.items);
  save_interactions(bundle.interactions, paths.interactions);
  save_cooccurrence(bundle.cooccurrence, paths.cooccurrence);
}

}  // namespace mekb
