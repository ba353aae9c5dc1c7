#include "cxgdial/merge.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include "cxgdial/rng.hpp"

namespace cxgdial {

RegionSet RegionSet::from_regions(const std::vector<std::string>& regions) {
  RegionSet rs;
  std::set<std::string> seen;
  for (const auto& r : regions) {
    if (!seen.insert(r).second)
      throw std::invalid_argument("duplicate region '" + r + "'");
  }
  for (const auto& r : seen) rs.groups.push_back({r});
  return rs;
}

std::string RegionSet::label(size_t group) const {
  auto members = groups.at(group);
  std::sort(members.begin(), members.end());
  std::string out;
  for (size_t i = 0; i < members.size(); ++i) out += (i ? "+" : "") + members[i];
  return out;
}

std::vector<std::string> RegionSet::labels() const {
  std::vector<std::string> out;
  out.reserve(groups.size());
  for (size_t i = 0; i < groups.size(); ++i) out.push_back(label(i));
  return out;
}

size_t RegionSet::group_of(const std::string& region) const {
  for (size_t g = 0; g < groups.size(); ++g)
    for (const auto& r : groups[g])
      if (r == region) return g;
  throw std::invalid_argument("region '" + region + "' not in region set");
}

RegionSet RegionSet::merged(size_t a, size_t b) const {
  if (a == b || a >= groups.size() || b >= groups.size())
    throw std::invalid_argument("invalid merge pair");
  RegionSet out;
  std::vector<std::string> joined = groups[a];
  joined.insert(joined.end(), groups[b].begin(), groups[b].end());
  std::sort(joined.begin(), joined.end());
  for (size_t g = 0; g < groups.size(); ++g)
    if (g != a && g != b) out.groups.push_back(groups[g]);
  out.groups.push_back(std::move(joined));
  // keep group order stable by sorted label
  std::sort(out.groups.begin(), out.groups.end());
  return out;
}

void RegionSet::validate(const std::vector<std::string>& original_regions) const {
  std::set<std::string> expected(original_regions.begin(), original_regions.end());
  std::set<std::string> seen;
  for (const auto& group : groups) {
    if (group.empty()) throw std::invalid_argument("empty region group");
    for (const auto& r : group) {
      if (!expected.count(r))
        throw std::invalid_argument("group member '" + r +
                                    "' is not an original region");
      if (!seen.insert(r).second)
        throw std::invalid_argument("region '" + r + "' appears in two groups");
    }
  }
  if (seen.size() != expected.size())
    throw std::invalid_argument("region groups do not cover all regions");
}

namespace {

// Relabels every row with its group label; declared regions become the
// sorted group labels.
FeatureMatrix relabel(const FeatureMatrix& m, const RegionSet& rs) {
  FeatureMatrix out = m;
  std::map<std::string, std::string> group_label;
  for (size_t g = 0; g < rs.groups.size(); ++g)
    for (const auto& r : rs.groups[g]) group_label[r] = rs.label(g);
  std::set<std::string> regions;
  for (auto& label : out.labels) {
    auto it = group_label.find(label);
    if (it == group_label.end())
      throw std::invalid_argument("sample region '" + label +
                                  "' missing from region set");
    label = it->second;
    regions.insert(label);
  }
  out.regions.assign(regions.begin(), regions.end());
  return out;
}

double grouped_cv_f(const FeatureMatrix& grouped, const MergeConfig& cfg) {
  FoldPlan plan =
      make_folds(grouped.sample_ids, grouped.labels, cfg.folds, cfg.seed);
  return cross_validate(grouped, plan, cfg.c, cfg.normalization).macro_f1;
}

// Under-samples one group down to the median size of the other groups.
FeatureMatrix undersample_group(const FeatureMatrix& m, const std::string& group,
                                uint64_t seed) {
  std::map<std::string, std::vector<size_t>> by_label;
  for (size_t i = 0; i < m.rows(); ++i) by_label[m.labels[i]].push_back(i);
  std::vector<size_t> other_sizes;
  for (const auto& [label, idx] : by_label)
    if (label != group) other_sizes.push_back(idx.size());
  if (other_sizes.empty()) return m;
  std::sort(other_sizes.begin(), other_sizes.end());
  size_t n = other_sizes.size();
  size_t target = n % 2 == 1 ? other_sizes[n / 2]
                             : (other_sizes[n / 2 - 1] + other_sizes[n / 2]) / 2;

  auto& merged_idx = by_label[group];
  if (merged_idx.size() <= target) return m;
  Rng rng(seed);
  rng.shuffle(merged_idx);
  merged_idx.resize(target);
  std::sort(merged_idx.begin(), merged_idx.end());

  std::vector<size_t> keep;
  for (const auto& [label, idx] : by_label)
    keep.insert(keep.end(), idx.begin(), idx.end());
  std::sort(keep.begin(), keep.end());
  return select_rows(m, keep);
}

}  // namespace

PairwiseMatrix pairwise_f_matrix(const FeatureMatrix& m, const RegionSet& regions,
                                 const MergeConfig& cfg) {
  FeatureMatrix grouped = relabel(m, regions);
  std::map<std::string, size_t> counts;
  for (const auto& label : grouped.labels) ++counts[label];
  for (const auto& [label, n] : counts)
    if (n < static_cast<size_t>(cfg.folds))
      throw std::invalid_argument("group '" + label + "' has " +
                                  std::to_string(n) +
                                  " samples, fewer than folds=" +
                                  std::to_string(cfg.folds));

  PairwiseMatrix pm;
  pm.labels = regions.labels();
  std::sort(pm.labels.begin(), pm.labels.end());
  const size_t n = pm.labels.size();
  pm.f.assign(n * n, 0.0);

  for (size_t a = 0; a < n; ++a) {
    for (size_t b = a + 1; b < n; ++b) {
      std::vector<size_t> idx;
      for (size_t i = 0; i < grouped.rows(); ++i)
        if (grouped.labels[i] == pm.labels[a] || grouped.labels[i] == pm.labels[b])
          idx.push_back(i);
      FeatureMatrix pair = select_rows(grouped, idx);
      pair.regions = {pm.labels[a], pm.labels[b]};
      MergeConfig pair_cfg = cfg;
      pair_cfg.seed = mix_seed(cfg.seed, a * n + b);
      double f = grouped_cv_f(pair, pair_cfg);
      pm.f[a * n + b] = pm.f[b * n + a] = f;
    }
  }
  return pm;
}

MergeOutcome merge_scan(const FeatureMatrix& m, const RegionSet& initial,
                        const MergeConfig& cfg) {
  std::vector<std::string> original;
  for (const auto& group : initial.groups)
    original.insert(original.end(), group.begin(), group.end());
  initial.validate(original);

  MergeOutcome outcome;
  outcome.final_set = initial;
  if (initial.groups.size() < 2) return outcome;

  double incumbent = grouped_cv_f(relabel(m, outcome.final_set), cfg);
  for (int round = 0; outcome.final_set.groups.size() > 1; ++round) {
    PairwiseMatrix pm = pairwise_f_matrix(m, outcome.final_set, cfg);

    // lowest-F unordered pair; ties resolve to the earlier (a, b) labels
    size_t best_a = 0, best_b = 1;
    double lowest = 2.0;
    for (size_t a = 0; a < pm.labels.size(); ++a) {
      for (size_t b = a + 1; b < pm.labels.size(); ++b) {
        if (pm.at(a, b) < lowest) {
          lowest = pm.at(a, b);
          best_a = a;
          best_b = b;
        }
      }
    }

    // map matrix labels back onto group indices
    auto labels = outcome.final_set.labels();
    size_t group_a = 0, group_b = 0;
    for (size_t g = 0; g < labels.size(); ++g) {
      if (labels[g] == pm.labels[best_a]) group_a = g;
      if (labels[g] == pm.labels[best_b]) group_b = g;
    }

    RegionSet proposed = outcome.final_set.merged(group_a, group_b);
    std::string merged_label;
    {
      auto members = outcome.final_set.groups[group_a];
      members.insert(members.end(), outcome.final_set.groups[group_b].begin(),
                     outcome.final_set.groups[group_b].end());
      std::sort(members.begin(), members.end());
      for (size_t i = 0; i < members.size(); ++i)
        merged_label += (i ? "+" : "") + members[i];
    }

    // A merge down to one group leaves nothing to predict, so it can never
    // demonstrate an improvement; such a proposal is recorded and rejected.
    double after = incumbent;
    if (proposed.groups.size() >= 2) {
      FeatureMatrix grouped = relabel(m, proposed);
      grouped = undersample_group(grouped, merged_label, mix_seed(cfg.seed, round));
      after = grouped_cv_f(grouped, cfg);
    }

    MergeProposal proposal;
    proposal.round = round;
    proposal.group_a = pm.labels[best_a];
    proposal.group_b = pm.labels[best_b];
    proposal.pair_f = lowest;
    proposal.overall_before = incumbent;
    proposal.overall_after = after;
    proposal.accepted = after > incumbent;
    outcome.audit.push_back(proposal);

    if (!proposal.accepted) break;
    proposed.validate(original);  // partition invariants hold at every step
    outcome.final_set = proposed;
    incumbent = after;
  }
  return outcome;
}

}  // namespace cxgdial
