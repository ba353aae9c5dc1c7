#ifndef CXGDIAL_CORPUS_HPP
#define CXGDIAL_CORPUS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace cxgdial {

// One input document: ordered sentences of raw tokens, labeled with the
// region it was collected from. Tokens may carry inline annotation in the
// form word|TAG or word|TAG|domain.
struct RawDocument {
  std::string doc_id;
  std::string region;
  std::vector<std::vector<std::string>> sentences;
};

// A fixed-size, region-labeled chunk of tokens. The sample is the unit of
// observation for every downstream stage; equal sizes make raw frequencies
// directly comparable across samples.
struct Sample {
  std::string sample_id;
  std::string region;
  std::vector<std::string> tokens;
  std::vector<std::string> provenance;  // contributing doc_ids
};

struct FoldPlan {
  int k = 0;
  std::map<std::string, int> assignments;  // sample_id -> fold
  uint64_t seed = 0;
};

// Sorted unique region labels; the canonical declared region order.
std::vector<std::string> region_order(const std::vector<Sample>& samples);

// Contiguous chunking: per region, documents are concatenated in input order
// and cut into consecutive chunks of exactly sample_size tokens. The final
// partial chunk is dropped. Regions with fewer than sample_size tokens yield
// no samples (not an error).
std::vector<Sample> build_samples(const std::vector<RawDocument>& docs,
                                  size_t sample_size);

// Sentence aggregation: per region, sentences are shuffled (seeded), then
// concatenated and cut into chunks of exactly sample_size tokens. A sentence
// crossing a chunk boundary is truncated to fill the chunk; its leftover
// tokens are dropped and the next chunk starts at the next whole sentence.
std::vector<Sample> aggregate_sentences(const std::vector<RawDocument>& docs,
                                        size_t sample_size, uint64_t seed);

// Stratified dev/main split. dev gets dev_count samples, allocated across
// regions proportionally (largest remainder), drawn at random per region.
std::pair<std::vector<Sample>, std::vector<Sample>> split_dev(
    const std::vector<Sample>& samples, size_t dev_count, uint64_t seed);

// Stratified k-fold assignment over (sample_id, region) pairs. Every region
// must have at least k samples; per region the fold sizes differ by <= 1.
FoldPlan make_folds(const std::vector<std::string>& sample_ids,
                    const std::vector<std::string>& regions, int k,
                    uint64_t seed);
FoldPlan make_folds(const std::vector<Sample>& samples, int k, uint64_t seed);

// Index-level balancing used by both sample- and feature-level callers.
// Returns row indices (with repeats) such that every label occurs exactly
// median-count times: minority labels are oversampled by duplicating whole
// rows, majority labels undersampled uniformly at random.
std::vector<size_t> balance_indices(const std::vector<std::string>& labels,
                                    uint64_t seed);

// Equalizes all regions to the median region size. Duplicated samples get a
// "#dupN" suffix on their id so ids stay unique.
std::vector<Sample> balance_classes(const std::vector<Sample>& samples,
                                    uint64_t seed);

}  // namespace cxgdial

#endif  // CXGDIAL_CORPUS_HPP
