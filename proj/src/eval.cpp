#include "mekbrec/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "mekbrec/splitmix.hpp"

namespace mekb {
namespace {

const char* const kBinLabels[] = {"zero-shot [0]", "few-shot [1,10)", "multi-shot [10,inf)"};

BinMetrics aggregate(const std::string& label, const std::vector<const RecordOutcome*>& recs) {
  BinMetrics m;
  m.label = label;
  m.n_records = recs.size();
  std::set<std::string> users;
  for (const auto* r : recs) {
    m.hr += r->hit;
    m.ndcg += r->ndcg;
    users.insert(r->user_id);
  }
  m.n_users = users.size();
  if (!recs.empty()) {
    m.hr /= static_cast<double>(recs.size());
    m.ndcg /= static_cast<double>(recs.size());
  }
  return m;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace

void SplitSpec::validate() const {
  if (train < 0 || valid < 0 || test < 0 || std::abs(train + valid + test - 1.0) > 1e-9) {
    throw std::invalid_argument("split fractions must be non-negative and sum to 1");
  }
  if (cold_start_fraction < 0 || cold_start_fraction > 1) {
    throw std::invalid_argument("cold_start_fraction must lie in [0,1]");
  }
}

DatasetSplit split_dataset(std::span<const Interaction> records,
                           const std::set<std::string>& overlapped_users, const SplitSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  DatasetSplit out;

  std::set<std::string> present;
  for (const auto& r : records) {
    if (overlapped_users.count(r.user_id)) present.insert(r.user_id);
  }
  std::vector<std::string> candidates(present.begin(), present.end());
  std::shuffle(candidates.begin(), candidates.end(), rng);
  const auto n_cold = static_cast<std::size_t>(
      std::llround(spec.cold_start_fraction * static_cast<double>(candidates.size())));
  out.cold_start_users.insert(candidates.begin(),
                              candidates.begin() + static_cast<std::ptrdiff_t>(n_cold));

  std::vector<Interaction> rest;
  for (const auto& r : records) {
    if (out.cold_start_users.count(r.user_id)) {
      out.test.push_back(r);
    } else {
      rest.push_back(r);
    }
  }
  std::sort(out.test.begin(), out.test.end());
  std::sort(rest.begin(), rest.end());
  std::shuffle(rest.begin(), rest.end(), rng);
  const std::size_t n = rest.size();
  const auto n_train = std::min(n, static_cast<std::size_t>(std::llround(spec.train * static_cast<double>(n))));
  const auto n_valid = std::min(n - n_train, static_cast<std::size_t>(std::llround(spec.valid * static_cast<double>(n))));
  out.train.assign(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(n_train));
  out.valid.assign(rest.begin() + static_cast<std::ptrdiff_t>(n_train),
                   rest.begin() + static_cast<std::ptrdiff_t>(n_train + n_valid));
  out.test.insert(out.test.end(), rest.begin() + static_cast<std::ptrdiff_t>(n_train + n_valid),
                  rest.end());
  return out;
}

std::size_t pessimistic_rank(double positive, std::span<const double> negatives) {
  std::size_t rank = 1;
  for (double s : negatives) {
    if (s >= positive) ++rank;
  }
  return rank;
}

double ndcg_at(std::size_t rank, int k) {
  if (rank == 0 || rank > static_cast<std::size_t>(k)) return 0.0;
  return 1.0 / std::log2(static_cast<double>(rank) + 1.0);
}

EvalOutcomes evaluate_records(const Ranker& ranker, const std::vector<std::string>& catalog,
                              std::span<const Interaction> test,
                              const std::map<std::string, std::set<std::string>>& interacted,
                              const EvalSettings& settings) {
  if (test.empty()) throw std::invalid_argument("evaluate: empty test set");
  if (settings.k < 1 || settings.n_neg < 0) throw std::invalid_argument("evaluate: bad k or n_neg");
  std::unordered_map<std::string, std::size_t> catalog_index;
  for (std::size_t i = 0; i < catalog.size(); ++i) catalog_index.emplace(catalog[i], i);

  EvalOutcomes out;
  out.k = settings.k;
  out.n_neg = settings.n_neg;
  std::map<std::string, std::optional<nn::Vector>> score_cache;
  static const std::set<std::string> kNone;

  for (std::size_t r = 0; r < test.size(); ++r) {
    const Interaction& rec = test[r];
    auto pos_it = catalog_index.find(rec.item_id);
    if (pos_it == catalog_index.end()) {
      throw std::invalid_argument("test item " + rec.item_id + " is not in the catalog");
    }
    auto cached = score_cache.find(rec.user_id);
    if (cached == score_cache.end()) {
      cached = score_cache.emplace(rec.user_id, ranker(rec.user_id)).first;
    }
    if (!cached->second) {
      ++out.skipped_unencodable;
      continue;
    }
    const nn::Vector& scores = *cached->second;
    if (static_cast<std::size_t>(scores.size()) != catalog.size()) {
      throw std::invalid_argument("ranker returned the wrong number of scores");
    }

    auto seen_it = interacted.find(rec.user_id);
    const std::set<std::string>& seen = seen_it == interacted.end() ? kNone : seen_it->second;
    std::vector<std::size_t> pool;
    pool.reserve(catalog.size());
    for (std::size_t i = 0; i < catalog.size(); ++i) {
      if (i != pos_it->second && !seen.count(catalog[i])) pool.push_back(i);
    }

    std::mt19937_64 rng(splitmix64(settings.seed ^ splitmix64(r)));
    const auto n_neg = static_cast<std::size_t>(settings.n_neg);
    std::vector<double> negatives;
    negatives.reserve(n_neg);
    if (pool.size() >= n_neg) {
      for (std::size_t i = 0; i < n_neg; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
        std::swap(pool[i], pool[pick(rng)]);
        negatives.push_back(scores(static_cast<Eigen::Index>(pool[i])));
      }
    } else if (!pool.empty()) {
      ++out.replacement_fallbacks;
      std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
      for (std::size_t i = 0; i < n_neg; ++i) {
        negatives.push_back(scores(static_cast<Eigen::Index>(pool[pick(rng)])));
      }
    } else {
      ++out.replacement_fallbacks;
    }

    RecordOutcome o;
    o.user_id = rec.user_id;
    o.item_id = rec.item_id;
    o.rank = pessimistic_rank(scores(static_cast<Eigen::Index>(pos_it->second)), negatives);
    o.hit = o.rank <= static_cast<std::size_t>(settings.k) ? 1.0 : 0.0;
    o.ndcg = ndcg_at(o.rank, settings.k);
    out.records.push_back(std::move(o));
  }
  return out;
}

EvalReport summarize(const EvalOutcomes& outcomes) {
  EvalReport report;
  report.k = outcomes.k;
  report.n_neg = outcomes.n_neg;
  report.skipped_unencodable = outcomes.skipped_unencodable;
  report.replacement_fallbacks = outcomes.replacement_fallbacks;
  std::vector<const RecordOutcome*> all;
  for (const auto& r : outcomes.records) all.push_back(&r);
  report.overall = aggregate("all", all);
  return report;
}

EvalReport evaluate(const Ranker& ranker, const std::vector<std::string>& catalog,
                    std::span<const Interaction> test,
                    const std::map<std::string, std::set<std::string>>& interacted,
                    const EvalSettings& settings) {
  return summarize(evaluate_records(ranker, catalog, test, interacted, settings));
}

std::size_t activity_bin(std::size_t train_count) {
  if (train_count == 0) return 0;
  return train_count < 10 ? 1 : 2;
}

EvalReport bin_by_activity(const EvalOutcomes& outcomes,
                           const std::map<std::string, std::size_t>& train_counts) {
  EvalReport report = summarize(outcomes);
  std::vector<const RecordOutcome*> bins[3];
  for (const auto& r : outcomes.records) {
    auto it = train_counts.find(r.user_id);
    bins[activity_bin(it == train_counts.end() ? 0 : it->second)].push_back(&r);
  }
  for (int b = 0; b < 3; ++b) report.bins.push_back(aggregate(kBinLabels[b], bins[b]));
  return report;
}

Ranker popularity_ranker(std::span<const Interaction> train,
                         const std::vector<std::string>& catalog) {
  std::unordered_map<std::string, double> counts;
  for (const auto& r : train) counts[r.item_id] += 1.0;
  nn::Vector scores(static_cast<Eigen::Index>(catalog.size()));
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    auto it = counts.find(catalog[i]);
    scores(static_cast<Eigen::Index>(i)) = it == counts.end() ? 0.0 : it->second;
  }
  return [scores](const std::string&) -> std::optional<nn::Vector> { return scores; };
}

double overlap_ratio(const std::set<std::string>& x, const std::set<std::string>& y) {
  if (x.empty()) throw std::invalid_argument("overlap_ratio: X is empty");
  std::size_t both = 0;
  for (const auto& u : x) both += y.count(u);
  return static_cast<double>(both) / static_cast<double>(x.size());
}

std::vector<Interaction> filter_dataset(std::span<const Interaction> interactions,
                                        std::size_t min_user_positives,
                                        std::size_t min_item_positives) {
  std::unordered_map<std::string, std::size_t> per_user, per_item;
  for (const auto& r : interactions) {
    ++per_user[r.user_id];
    ++per_item[r.item_id];
  }
  std::vector<Interaction> out;
  for (const auto& r : interactions) {
    if (per_user[r.user_id] >= min_user_positives && per_item[r.item_id] >= min_item_positives) {
      out.push_back(r);
    }
  }
  return out;
}

std::string format_report(const EvalReport& report) {
  std::ostringstream out;
  const std::string hr = "HR@" + std::to_string(report.k);
  const std::string nd = "NDCG@" + std::to_string(report.k);
  char line[256];
  std::snprintf(line, sizeof line, "%-22s %8s %9s %10s %10s\n", "bucket", "#users", "#records",
                hr.c_str(), nd.c_str());
  out << line;
  auto row = [&](const BinMetrics& m) {
    std::snprintf(line, sizeof line, "%-22s %8zu %9zu %10.4f %10.4f\n", m.label.c_str(),
                  m.n_users, m.n_records, m.hr, m.ndcg);
    out << line;
  };
  for (const auto& b : report.bins) row(b);
  row(report.overall);
  out << "negatives per record: " << report.n_neg << "\n";
  out << "skipped (no MeKB): " << report.skipped_unencodable << "\n";
  out << "negative pool fallbacks: " << report.replacement_fallbacks << "\n";
  return out.str();
}

std::string format_report_jsonl(const EvalReport& report) {
  std::ostringstream out;
  auto row = [&](const BinMetrics& m) {
    out << "{\"bucket\":\"" << json_escape(m.label) << "\",\"k\":" << report.k
        << ",\"hr\":" << fmt(m.hr) << ",\"ndcg\":" << fmt(m.ndcg) << ",\"n_users\":" << m.n_users
        << ",\"n_records\":" << m.n_records << "}\n";
  };
  row(report.overall);
  for (const auto& b : report.bins) row(b);
  return out.str();
}

}  // namespace mekb
