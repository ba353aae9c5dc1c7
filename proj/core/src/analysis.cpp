#include "cxgdial/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cxgdial {

NormalizedWeights normalize_weights(const LinearRegionModel& model) {
  NormalizedWeights nw;
  nw.regions = model.regions;
  nw.wn = model.weights;
  double max_abs = 0.0;
  for (const auto& row : nw.wn)
    for (double v : row) max_abs = std::max(max_abs, std::abs(v));
  nw.scale_factor = max_abs > 0.0 ? max_abs : 1.0;
  if (max_abs > 0.0)
    for (auto& row : nw.wn)
      for (double& v : row) v /= max_abs;
  return nw;
}

std::vector<SelectionSignature> selection_signatures(
    const NormalizedWeights& nw, size_t top_k, std::optional<double> cap) {
  if (top_k < 1) throw std::invalid_argument("selection_signatures: top_k must be >= 1");
  std::vector<SelectionSignature> out;
  out.reserve(nw.regions.size());
  for (size_t r = 0; r < nw.regions.size(); ++r) {
    SelectionSignature sig;
    sig.region = nw.regions[r];
    for (size_t j = 0; j < nw.wn[r].size(); ++j) {
      double w = nw.wn[r][j];
      if (cap && std::abs(w) >= *cap) continue;
      sig.entries.push_back({static_cast<int>(j), w});
    }
    std::sort(sig.entries.begin(), sig.entries.end(),
              [](const SignatureEntry& a, const SignatureEntry& b) {
                if (a.weight != b.weight) return a.weight > b.weight;
                return a.cid < b.cid;
              });
    if (sig.entries.size() > top_k) sig.entries.resize(top_k);
    out.push_back(std::move(sig));
  }
  return out;
}

// ---------------------------------------------------------------------------
// PCA via the region-level Gram matrix
// ---------------------------------------------------------------------------

namespace {

// Jacobi eigendecomposition for small dense symmetric matrices.
void jacobi_eigen(std::vector<std::vector<double>> a,
                  std::vector<double>* values,
                  std::vector<std::vector<double>>* vectors) {
  const size_t n = a.size();
  std::vector<std::vector<double>> v(n, std::vector<double>(n, 0.0));
  for (size_t i = 0; i < n; ++i) v[i][i] = 1.0;

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (size_t p = 0; p < n; ++p)
      for (size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-24) break;
    for (size_t p = 0; p < n; ++p) {
      for (size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double cos_r = 1.0 / std::sqrt(t * t + 1.0);
        const double sin_r = t * cos_r;
        for (size_t i = 0; i < n; ++i) {
          const double aip = a[i][p], aiq = a[i][q];
          a[i][p] = cos_r * aip - sin_r * aiq;
          a[i][q] = sin_r * aip + cos_r * aiq;
        }
        for (size_t i = 0; i < n; ++i) {
          const double api = a[p][i], aqi = a[q][i];
          a[p][i] = cos_r * api - sin_r * aqi;
          a[q][i] = sin_r * api + cos_r * aqi;
        }
        for (size_t i = 0; i < n; ++i) {
          const double vip = v[i][p], viq = v[i][q];
          v[i][p] = cos_r * vip - sin_r * viq;
          v[i][q] = sin_r * vip + cos_r * viq;
        }
      }
    }
  }
  values->resize(n);
  vectors->assign(n, std::vector<double>(n));
  for (size_t i = 0; i < n; ++i) {
    (*values)[i] = a[i][i];
    for (size_t j = 0; j < n; ++j) (*vectors)[i][j] = v[j][i];  // row i = eigvec i
  }
}

}  // namespace

PcaResult pca_similarity(const NormalizedWeights& nw) {
  const size_t n = nw.regions.size();
  if (n < 3)
    throw std::invalid_argument("pca_similarity requires >= 3 regions, got " +
                                std::to_string(n));
  const size_t d = nw.n_features();

  // column mean-centering
  std::vector<std::vector<double>> centered = nw.wn;
  for (size_t j = 0; j < d; ++j) {
    double mean = 0.0;
    for (size_t i = 0; i < n; ++i) mean += centered[i][j];
    mean /= static_cast<double>(n);
    for (size_t i = 0; i < n; ++i) centered[i][j] -= mean;
  }

  // Gram matrix G = A A^T (n x n); eigenvalues are squared singular values.
  std::vector<std::vector<double>> gram(n, std::vector<double>(n, 0.0));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i; j < n; ++j) {
      double s = 0.0;
      for (size_t f = 0; f < d; ++f) s += centered[i][f] * centered[j][f];
      gram[i][j] = gram[j][i] = s;
    }
  }

  std::vector<double> values;
  std::vector<std::vector<double>> vectors;
  jacobi_eigen(gram, &values, &vectors);

  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return values[a] > values[b]; });

  double total = 0.0;
  for (double v : values) total += std::max(0.0, v);

  PcaResult result;
  result.regions = nw.regions;
  result.coordinates.assign(n, {0.0, 0.0});
  result.component1.assign(d, 0.0);
  result.component2.assign(d, 0.0);

  for (size_t comp = 0; comp < 2; ++comp) {
    const double lambda = std::max(0.0, values[order[comp]]);
    const double sigma = std::sqrt(lambda);
    result.explained[comp] = total > 0.0 ? lambda / total : 0.0;
    if (sigma <= 1e-12) continue;  // degenerate: coordinates stay at origin

    std::vector<double> u = vectors[order[comp]];
    // canonical sign: largest-magnitude entry positive
    size_t arg = 0;
    for (size_t i = 1; i < n; ++i)
      if (std::abs(u[i]) > std::abs(u[arg])) arg = i;
    if (u[arg] < 0.0)
      for (double& x : u) x = -x;

    // scores = U * sigma; axis v = A^T u / sigma
    auto& axis = comp == 0 ? result.component1 : result.component2;
    for (size_t f = 0; f < d; ++f) {
      double s = 0.0;
      for (size_t i = 0; i < n; ++i) s += centered[i][f] * u[i];
      axis[f] = s / sigma;
    }
    for (size_t i = 0; i < n; ++i) result.coordinates[i][comp] = u[i] * sigma;
  }
  return result;
}

WeightProfile weight_profile(const NormalizedWeights& nw,
                             const std::string& region) {
  auto it = std::find(nw.regions.begin(), nw.regions.end(), region);
  if (it == nw.regions.end())
    throw std::invalid_argument("unknown region '" + region + "'");
  WeightProfile profile;
  profile.region = region;
  profile.weights = nw.wn[static_cast<size_t>(it - nw.regions.begin())];
  return profile;
}

std::vector<RegionalBreakdown> regional_breakdowns(
    const std::vector<SelectionSignature>& signatures, const Grammar& g) {
  std::vector<RegionalBreakdown> out;
  out.reserve(signatures.size());
  for (const auto& sig : signatures) {
    RegionalBreakdown b;
    b.region = sig.region;
    std::map<size_t, size_t> length_counts;
    std::map<std::string, size_t> level_counts;
    size_t total_slots = 0;
    for (const auto& entry : sig.entries) {
      if (entry.cid < 0 || static_cast<size_t>(entry.cid) >= g.constructions.size())
        throw std::invalid_argument("signature for region '" + sig.region +
                                    "' references unknown cid " +
                                    std::to_string(entry.cid));
      const Construction& c = g.constructions[entry.cid];
      ++length_counts[c.length()];
      for (const auto& slot : c.slots) {
        ++level_counts[to_string(slot.level)];
        ++total_slots;
      }
    }
    const double n_entries = static_cast<double>(sig.entries.size());
    for (const auto& [len, count] : length_counts)
      b.by_length_pct[len] = 100.0 * static_cast<double>(count) / n_entries;
    for (const auto& [level, count] : level_counts)
      b.by_level_pct[level] =
          100.0 * static_cast<double>(count) / static_cast<double>(total_slots);
    out.push_back(std::move(b));
  }
  return out;
}

std::string construction_bracket(const Construction& c) {
  std::ostringstream out;
  out << '[';
  for (size_t i = 0; i < c.slots.size(); ++i) {
    if (i) out << " – ";  // en dash separator
    const auto& s = c.slots[i];
    switch (s.level) {
      case SlotLevel::kLex: out << '\'' << s.text << '\''; break;
      case SlotLevel::kSyn: out << s.text; break;
      case SlotLevel::kSem: out << '<' << s.domain << '>'; break;
    }
  }
  out << ']';
  return out.str();
}

std::string signatures_to_text(const std::vector<SelectionSignature>& signatures,
                               const Grammar& g) {
  std::ostringstream out;
  for (const auto& sig : signatures) {
    out << sig.region << "\n\n";
    for (const auto& entry : sig.entries) {
      if (entry.cid < 0 || static_cast<size_t>(entry.cid) >= g.constructions.size())
        throw std::invalid_argument("signature for region '" + sig.region +
                                    "' references unknown cid " +
                                    std::to_string(entry.cid));
      out << construction_bracket(g.constructions[entry.cid]) << '\n';
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace cxgdial
