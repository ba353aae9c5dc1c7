#ifndef CXGDIAL_ANALYSIS_HPP
#define CXGDIAL_ANALYSIS_HPP

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cxgdial/classify.hpp"

namespace cxgdial {

// Weights divided by the global max-abs entry so every value sits in [-1, 1].
// Prediction never reads this view; it is a reporting convention only.
struct NormalizedWeights {
  std::vector<std::string> regions;
  std::vector<std::vector<double>> wn;
  double scale_factor = 1.0;

  size_t n_features() const { return wn.empty() ? 0 : wn[0].size(); }
};

NormalizedWeights normalize_weights(const LinearRegionModel& model);

struct SignatureEntry {
  int cid = 0;
  double weight = 0.0;
};

// A region's profile of its most predictive constructions: entries sorted by
// normalized weight descending, optionally capped (|w| < cap drops the
// handful of unusually predictive features), truncated to top_k.
struct SelectionSignature {
  std::string region;
  std::vector<SignatureEntry> entries;
};

std::vector<SelectionSignature> selection_signatures(
    const NormalizedWeights& nw, size_t top_k,
    std::optional<double> cap = std::nullopt);

struct PcaResult {
  std::vector<std::string> regions;
  std::vector<std::array<double, 2>> coordinates;  // per region
  std::array<double, 2> explained{0.0, 0.0};       // variance fractions, desc
  std::vector<double> component1, component2;      // feature-space axes
};

// Two-component PCA over the region x feature weight matrix: columns are
// mean-centered, no variance scaling, no rotation. Requires >= 3 regions.
PcaResult pca_similarity(const NormalizedWeights& nw);

struct WeightProfile {
  std::string region;
  std::vector<double> weights;  // indexed by cid, full feature count
  double display_clip = 0.1;
};

WeightProfile weight_profile(const NormalizedWeights& nw,
                             const std::string& region);

struct RegionalBreakdown {
  std::string region;
  std::map<size_t, double> by_length_pct;       // construction length -> %
  std::map<std::string, double> by_level_pct;   // LEX/SYN/SEM -> %
};

// Composition of each region's signature: percentage of constructions by
// slot length and percentage of slot constraints by level, both summing to
// 100 per region.
std::vector<RegionalBreakdown> regional_breakdowns(
    const std::vector<SelectionSignature>& signatures, const Grammar& g);

// Human-readable bracket rendering: [ADV – 'about'], [<25> – 'to' – <14>],
// grouped by region.
std::string construction_bracket(const Construction& c);
std::string signatures_to_text(const std::vector<SelectionSignature>& signatures,
                               const Grammar& g);

}  // namespace cxgdial

#endif  // CXGDIAL_ANALYSIS_HPP
