#include "cxgdial/corpus.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "cxgdial/rng.hpp"

namespace cxgdial {

namespace {

std::string chunk_id(const std::string& region, size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%05zu", index);
  return region + "_" + buf;
}

// Regions in sorted order, each with the indices of its docs in input order.
std::map<std::string, std::vector<size_t>> docs_by_region(
    const std::vector<RawDocument>& docs) {
  std::map<std::string, std::vector<size_t>> grouped;
  for (size_t i = 0; i < docs.size(); ++i) {
    if (docs[i].region.empty())
      throw std::invalid_argument("document '" + docs[i].doc_id +
                                  "' has an empty region label");
    grouped[docs[i].region].push_back(i);
  }
  return grouped;
}

std::map<std::string, std::vector<size_t>> samples_by_region(
    const std::vector<std::string>& regions) {
  std::map<std::string, std::vector<size_t>> grouped;
  for (size_t i = 0; i < regions.size(); ++i) grouped[regions[i]].push_back(i);
  return grouped;
}

size_t median_count(std::vector<size_t> counts) {
  std::sort(counts.begin(), counts.end());
  size_t n = counts.size();
  if (n % 2 == 1) return counts[n / 2];
  return (counts[n / 2 - 1] + counts[n / 2]) / 2;
}

class ChunkBuilder {
 public:
  ChunkBuilder(const std::string& region, size_t sample_size,
               std::vector<Sample>* out)
      : region_(region), sample_size_(sample_size), out_(out) {}

  void push(const std::string& token, const std::string& doc_id) {
    if (std::find(current_.provenance.begin(), current_.provenance.end(),
                  doc_id) == current_.provenance.end())
      current_.provenance.push_back(doc_id);
    current_.tokens.push_back(token);
    if (current_.tokens.size() == sample_size_) flush();
  }

  size_t room() const { return sample_size_ - current_.tokens.size(); }

 private:
  void flush() {
    current_.sample_id = chunk_id(region_, out_->size());
    current_.region = region_;
    out_->push_back(std::move(current_));
    current_ = Sample{};
  }

  std::string region_;
  size_t sample_size_;
  std::vector<Sample>* out_;
  Sample current_;
};

}  // namespace

std::vector<std::string> region_order(const std::vector<Sample>& samples) {
  std::set<std::string> seen;
  for (const auto& s : samples) seen.insert(s.region);
  return {seen.begin(), seen.end()};
}

std::vector<Sample> build_samples(const std::vector<RawDocument>& docs,
                                  size_t sample_size) {
  if (sample_size < 1) throw std::invalid_argument("sample_size must be >= 1");
  std::vector<Sample> all;
  for (const auto& [region, doc_idx] : docs_by_region(docs)) {
    std::vector<Sample> region_samples;
    ChunkBuilder chunks(region, sample_size, &region_samples);
    for (size_t di : doc_idx) {
      const RawDocument& doc = docs[di];
      for (const auto& sentence : doc.sentences) {
        if (sentence.empty())
          throw std::invalid_argument("document '" + doc.doc_id +
                                      "' contains an empty sentence");
        for (const auto& tok : sentence) chunks.push(tok, doc.doc_id);
      }
    }
    // partial trailing chunk (still inside ChunkBuilder) is dropped
    all.insert(all.end(), region_samples.begin(), region_samples.end());
  }
  return all;
}

std::vector<Sample> aggregate_sentences(const std::vector<RawDocument>& docs,
                                        size_t sample_size, uint64_t seed) {
  if (sample_size < 1) throw std::invalid_argument("sample_size must be >= 1");
  std::vector<Sample> all;
  Rng root(seed);
  size_t region_index = 0;
  for (const auto& [region, doc_idx] : docs_by_region(docs)) {
    // (doc index, sentence index) pairs, shuffled within the region
    std::vector<std::pair<size_t, size_t>> order;
    for (size_t di : doc_idx) {
      const RawDocument& doc = docs[di];
      for (size_t si = 0; si < doc.sentences.size(); ++si) {
        if (doc.sentences[si].empty())
          throw std::invalid_argument("document '" + doc.doc_id +
                                      "' contains an empty sentence");
        order.emplace_back(di, si);
      }
    }
    Rng rng = root.derive(region_index++);
    rng.shuffle(order);

    std::vector<Sample> region_samples;
    ChunkBuilder chunks(region, sample_size, &region_samples);
    for (const auto& [di, si] : order) {
      const auto& sentence = docs[di].sentences[si];
      size_t take = std::min(sentence.size(), chunks.room());
      for (size_t t = 0; t < take; ++t) chunks.push(sentence[t], docs[di].doc_id);
      // leftover of a truncated sentence is dropped; next chunk starts fresh
    }
    all.insert(all.end(), region_samples.begin(), region_samples.end());
  }
  return all;
}

std::pair<std::vector<Sample>, std::vector<Sample>> split_dev(
    const std::vector<Sample>& samples, size_t dev_count, uint64_t seed) {
  if (dev_count >= samples.size())
    throw std::invalid_argument("dev_count " + std::to_string(dev_count) +
                                " must be smaller than the corpus (" +
                                std::to_string(samples.size()) + " samples)");
  std::vector<std::string> labels;
  labels.reserve(samples.size());
  for (const auto& s : samples) labels.push_back(s.region);
  auto grouped = samples_by_region(labels);

  // Proportional quota with largest-remainder rounding.
  size_t total = samples.size();
  std::vector<std::pair<std::string, size_t>> quotas;
  std::vector<std::pair<double, std::string>> remainders;
  size_t assigned = 0;
  for (const auto& [region, idx] : grouped) {
    double exact = static_cast<double>(idx.size()) * dev_count / total;
    size_t q = static_cast<size_t>(exact);
    quotas.emplace_back(region, q);
    remainders.emplace_back(exact - static_cast<double>(q), region);
    assigned += q;
  }
  std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (size_t i = 0; assigned < dev_count; i = (i + 1) % remainders.size()) {
    for (auto& [region, q] : quotas) {
      if (region == remainders[i].second && q < grouped[region].size()) {
        ++q;
        ++assigned;
        break;
      }
    }
  }

  Rng root(seed);
  std::vector<bool> in_dev(samples.size(), false);
  size_t region_index = 0;
  for (const auto& [region, quota] : quotas) {
    auto idx = grouped[region];
    Rng rng = root.derive(region_index++);
    rng.shuffle(idx);
    for (size_t i = 0; i < std::min(quota, idx.size()); ++i) in_dev[idx[i]] = true;
  }

  std::pair<std::vector<Sample>, std::vector<Sample>> out;
  for (size_t i = 0; i < samples.size(); ++i)
    (in_dev[i] ? out.first : out.second).push_back(samples[i]);
  return out;
}

FoldPlan make_folds(const std::vector<std::string>& sample_ids,
                    const std::vector<std::string>& regions, int k,
                    uint64_t seed) {
  if (k < 2) throw std::invalid_argument("fold count must be >= 2");
  if (sample_ids.size() != regions.size())
    throw std::invalid_argument("sample_ids and regions length mismatch");
  auto grouped = samples_by_region(regions);
  for (const auto& [region, idx] : grouped) {
    if (idx.size() < static_cast<size_t>(k))
      throw std::invalid_argument("region '" + region + "' has " +
                                  std::to_string(idx.size()) +
                                  " samples, fewer than k=" + std::to_string(k));
  }
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  Rng root(seed);
  size_t region_index = 0;
  for (const auto& [region, idx_const] : grouped) {
    auto idx = idx_const;
    Rng rng = root.derive(region_index++);
    rng.shuffle(idx);
    for (size_t i = 0; i < idx.size(); ++i) {
      const std::string& id = sample_ids[idx[i]];
      if (!plan.assignments.emplace(id, static_cast<int>(i % k)).second)
        throw std::invalid_argument("duplicate sample_id '" + id + "'");
    }
  }
  return plan;
}

FoldPlan make_folds(const std::vector<Sample>& samples, int k, uint64_t seed) {
  std::vector<std::string> ids, regions;
  ids.reserve(samples.size());
  regions.reserve(samples.size());
  for (const auto& s : samples) {
    ids.push_back(s.sample_id);
    regions.push_back(s.region);
  }
  return make_folds(ids, regions, k, seed);
}

std::vector<size_t> balance_indices(const std::vector<std::string>& labels,
                                    uint64_t seed) {
  auto grouped = samples_by_region(labels);
  if (grouped.size() < 2) {  // single label: identity
    std::vector<size_t> all(labels.size());
    for (size_t i = 0; i < all.size(); ++i) all[i] = i;
    return all;
  }
  std::vector<size_t> counts;
  for (const auto& [region, idx] : grouped) counts.push_back(idx.size());
  size_t target = median_count(counts);

  std::vector<size_t> out;
  Rng root(seed);
  size_t region_index = 0;
  for (const auto& [region, idx_const] : grouped) {
    auto idx = idx_const;
    Rng rng = root.derive(region_index++);
    if (idx.size() >= target) {
      rng.shuffle(idx);
      idx.resize(target);
      std::sort(idx.begin(), idx.end());
      out.insert(out.end(), idx.begin(), idx.end());
    } else {
      out.insert(out.end(), idx.begin(), idx.end());
      auto pool = idx;
      rng.shuffle(pool);
      size_t need = target - idx.size();
      for (size_t i = 0; i < need; ++i) out.push_back(pool[i % pool.size()]);
    }
  }
  return out;
}

std::vector<Sample> balance_classes(const std::vector<Sample>& samples,
                                    uint64_t seed) {
  std::vector<std::string> labels;
  labels.reserve(samples.size());
  for (const auto& s : samples) labels.push_back(s.region);
  auto picks = balance_indices(labels, seed);

  std::vector<Sample> out;
  out.reserve(picks.size());
  std::map<std::string, size_t> dup_counts;
  std::set<size_t> seen;
  for (size_t i : picks) {
    Sample s = samples[i];
    if (!seen.insert(i).second) {
      size_t n = ++dup_counts[s.sample_id];
      s.sample_id += "#dup" + std::to_string(n);
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace cxgdial
