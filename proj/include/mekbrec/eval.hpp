#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "mekbrec/item.hpp"
#include "mekbrec/nn.hpp"

namespace mekb {

struct SplitSpec {
  double train = 0.8;
  double valid = 0.1;
  double test = 0.1;
  double cold_start_fraction = 0.2;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const SplitSpec&) const = default;
};

struct DatasetSplit {
  std::vector<Interaction> train, valid, test;
  std::set<std::string> cold_start_users;
};

// Seeded 8:1:1 record split. A seeded `cold_start_fraction` of the
// overlapped users has all of its records moved to test.
DatasetSplit split_dataset(std::span<const Interaction> records,
                           const std::set<std::string>& overlapped_users, const SplitSpec& spec);

// Scores every catalog item for a user, in catalog order; nullopt when the
// user cannot be encoded (e.g. empty MeKB).
using Ranker = std::function<std::optional<nn::Vector>(const std::string& user_id)>;

struct EvalSettings {
  int k = 10;
  int n_neg = 999;
  std::uint64_t seed = 0;

  bool operator==(const EvalSettings&) const = default;
};

struct RecordOutcome {
  std::string user_id;
  std::string item_id;
  std::size_t rank = 0;  // 1-based among the positive and its negatives
  double hit = 0.0;
  double ndcg = 0.0;
};

struct EvalOutcomes {
  std::vector<RecordOutcome> records;
  std::size_t skipped_unencodable = 0;
  std::size_t replacement_fallbacks = 0;
  int k = 10;
  int n_neg = 999;
};

struct BinMetrics {
  std::string label;
  double hr = 0.0;
  double ndcg = 0.0;
  std::size_t n_users = 0;
  std::size_t n_records = 0;
};

struct EvalReport {
  int k = 10;
  int n_neg = 999;
  BinMetrics overall;
  std::vector<BinMetrics> bins;  // [0], [1,10), [10,inf) when binned
  std::size_t skipped_unencodable = 0;
  std::size_t replacement_fallbacks = 0;
};

// 1-based rank of the positive with ties counted against it.
std::size_t pessimistic_rank(double positive, std::span<const double> negatives);
double ndcg_at(std::size_t rank, int k);

// Per test record: n_neg negatives drawn uniformly without replacement from
// catalog items the user never interacted with (with replacement, tallied,
// when the pool is too small), then the positive is ranked among them.
// Each record's RNG stream depends only on (seed, record index).
// Throws std::invalid_argument on an empty test set.
EvalOutcomes evaluate_records(const Ranker& ranker, const std::vector<std::string>& catalog,
                              std::span<const Interaction> test,
                              const std::map<std::string, std::set<std::string>>& interacted,
                              const EvalSettings& settings);

EvalReport summarize(const EvalOutcomes& outcomes);
EvalReport evaluate(const Ranker& ranker, const std::vector<std::string>& catalog,
                    std::span<const Interaction> test,
                    const std::map<std::string, std::set<std::string>>& interacted,
                    const EvalSettings& settings);

// Zero-shot [0], few-shot [1,10) and multi-shot [10,inf) buckets by the
// user's target-domain training count.
std::size_t activity_bin(std::size_t train_count);
EvalReport bin_by_activity(const EvalOutcomes& outcomes,
                           const std::map<std::string, std::size_t>& train_counts);

// Scores items by training-set popularity, identically for every user.
Ranker popularity_ranker(std::span<const Interaction> train,
                         const std::vector<std::string>& catalog);

// |X ∩ Y| / |X|. Throws std::invalid_argument when X is empty.
double overlap_ratio(const std::set<std::string>& x, const std::set<std::string>& y);

// Single pass: drops users with fewer than min_user_positives records and
// items with fewer than min_item_positives, both counted on the input.
std::vector<Interaction> filter_dataset(std::span<const Interaction> interactions,
                                        std::size_t min_user_positives = 5,
                                        std::size_t min_item_positives = 50);

std::string format_report(const EvalReport& report);
// One JSON object per line: overall first, then each bin.
std::string format_report_jsonl(const EvalReport& report);

}  // namespace mekb
