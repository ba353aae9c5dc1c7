#ifndef CXGDIAL_INDUCE_HPP
#define CXGDIAL_INDUCE_HPP

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "cxgdial/grammar.hpp"

namespace cxgdial {

struct InductionConfig {
  size_t min_len = 2;
  size_t max_len = 6;
  size_t min_freq = 20;
  double min_assoc = 0.1;
  size_t max_grammar = 500;
  uint64_t seed = 1;
};

struct CandidateStats {
  std::vector<SlotConstraint> slots;
  long long freq = 0;
  double assoc = 0.0;  // mean directional delta-P over adjacent transitions
};

// Slot occurrence counts over adjacent token-position pairs, the marginals
// needed for delta-P scoring. Pairs never cross sample boundaries.
class TransitionCounts {
 public:
  static TransitionCounts collect(
      const std::vector<std::vector<TaggedToken>>& samples);

  // delta-P(next | cur) = P(next at p+1 | cur at p) - P(next at p+1 | not cur
  // at p). A transition with zero support on either side scores 0.
  double delta_p(const SlotConstraint& cur, const SlotConstraint& next) const;

  long long pair_total() const { return pair_total_; }

 private:
  long long pair_total_ = 0;
  std::unordered_map<std::string, long long> first_;   // slot at pair start
  std::unordered_map<std::string, long long> second_;  // slot at pair end
  std::unordered_map<std::string, long long> pairs_;   // (cur, next)
};

// Mean delta-P across a candidate's adjacent slot transitions; single-slot
// candidates score 0 by convention.
double score_association(const std::vector<SlotConstraint>& slots,
                         const TransitionCounts& counts);

// Enumerates contiguous mixed-level slot sequences with length in
// [min_len, max_len] and corpus frequency >= min_freq, growing level by
// level: a sequence is counted only when both its (length-1)-prefix and
// -suffix met the frequency floor. Returned candidates carry freq and assoc
// and are sorted by (assoc desc, freq desc, slots).
std::vector<CandidateStats> extract_candidates(
    const std::vector<std::vector<TaggedToken>>& samples,
    const InductionConfig& cfg);

// Full induction: extract, filter by min_assoc, truncate to max_grammar,
// horizontally prune, renumber. Purely syntactic constructions of length
// >= 2 also become constituent rules with the head at the rightmost NOUN,
// else rightmost VERB, else the last slot.
Grammar induce_grammar(const std::vector<std::vector<TaggedToken>>& samples,
                       const InductionConfig& cfg, const Tagset& tagset,
                       size_t k);

// TSV audit of every candidate: slots, freq, assoc.
void write_candidate_audit(const std::string& path,
                           const std::vector<CandidateStats>& candidates);

}  // namespace cxgdial

#endif  // CXGDIAL_INDUCE_HPP
