#ifndef CXGDIAL_MERGE_HPP
#define CXGDIAL_MERGE_HPP

#include <string>
#include <vector>

#include "cxgdial/classify.hpp"

namespace cxgdial {

// A partition of the original region labels into disjoint groups. Group
// labels join the sorted member regions with '+'.
struct RegionSet {
  std::vector<std::vector<std::string>> groups;

  static RegionSet from_regions(const std::vector<std::string>& regions);
  std::string label(size_t group) const;
  std::vector<std::string> labels() const;
  size_t group_of(const std::string& region) const;  // throws if unknown
  RegionSet merged(size_t a, size_t b) const;
  void validate(const std::vector<std::string>& original_regions) const;
};

struct MergeConfig {
  int folds = 10;
  double c = 1.0;
  Normalization normalization = Normalization::kNone;
  uint64_t seed = 1;
};

// Symmetric matrix of pairwise held-out macro-F between groups.
struct PairwiseMatrix {
  std::vector<std::string> labels;
  std::vector<double> f;  // labels.size()^2, diagonal unused

  double at(size_t i, size_t j) const { return f[i * labels.size() + j]; }
};

// Binary balanced CV for every unordered group pair. Groups need at least
// cfg.folds samples each.
PairwiseMatrix pairwise_f_matrix(const FeatureMatrix& m, const RegionSet& regions,
                                 const MergeConfig& cfg);

struct MergeProposal {
  int round = 0;
  std::string group_a, group_b;
  double pair_f = 0.0;
  double overall_before = 0.0;
  double overall_after = 0.0;
  bool accepted = false;
};

struct MergeOutcome {
  RegionSet final_set;
  std::vector<MergeProposal> audit;
};

// Greedy merge evaluation: repeatedly propose merging the lowest-F pair,
// under-sample the combined group back to the median size of the others,
// and accept only a strict improvement in overall CV macro-F. Stops at the
// first rejection or when a single group remains.
MergeOutcome merge_scan(const FeatureMatrix& m, const RegionSet& initial,
                        const MergeConfig& cfg);

}  // namespace cxgdial

#endif  // CXGDIAL_MERGE_HPP
