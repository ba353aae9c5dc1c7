#include "cxgdial/classify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "cxgdial/parallel.hpp"
#include "cxgdial/rng.hpp"

namespace cxgdial {

const char* to_string(Normalization n) {
  switch (n) {
    case Normalization::kNone: return "none";
    case Normalization::kL1: return "l1";
    case Normalization::kL2: return "l2";
  }
  return "?";
}

Normalization normalization_from_string(const std::string& name) {
  std::string s;
  for (char c : name) s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (s == "none") return Normalization::kNone;
  if (s == "l1") return Normalization::kL1;
  if (s == "l2") return Normalization::kL2;
  throw std::invalid_argument("unknown normalization '" + name + "'");
}

FeatureMatrix vectorize(const std::vector<Sample>& samples, const Grammar& g,
                        const SemanticLexicon& lexicon,
                        const AnnotateOptions& opts) {
  FeatureMatrix m;
  m.n_features = g.constructions.size();
  m.regions = region_order(samples);
  m.sample_ids.reserve(samples.size());
  m.labels.reserve(samples.size());
  for (const auto& s : samples) {
    m.sample_ids.push_back(s.sample_id);
    m.labels.push_back(s.region);
  }
  m.x.assign(samples.size() * m.n_features, 0.0);

  GrammarMatcher matcher(g);
  parallel_for(samples.size(), [&](size_t i) {
    auto tokens = annotate_sample(samples[i], lexicon, opts);
    tokens = collapse_constituents(tokens, g.constituents);
    auto counts = matcher.scan(tokens);
    auto row = m.row(i);
    for (size_t j = 0; j < counts.size(); ++j) row[j] = counts[j];
  });
  return m;
}

FeatureMatrix normalized_view(const FeatureMatrix& m, Normalization norm) {
  FeatureMatrix out = m;
  out.normalization = norm;
  if (norm == Normalization::kNone) return out;
  for (size_t i = 0; i < out.rows(); ++i) {
    auto row = out.row(i);
    double scale = 0.0;
    if (norm == Normalization::kL1) {
      for (double v : row) scale += std::abs(v);
    } else {
      for (double v : row) scale += v * v;
      scale = std::sqrt(scale);
    }
    if (scale > 0.0)
      for (double& v : row) v /= scale;
  }
  return out;
}

FeatureMatrix select_rows(const FeatureMatrix& m,
                          const std::vector<size_t>& indices) {
  FeatureMatrix out;
  out.regions = m.regions;
  out.n_features = m.n_features;
  out.normalization = m.normalization;
  out.x.reserve(indices.size() * m.n_features);
  for (size_t i : indices) {
    out.sample_ids.push_back(m.sample_ids[i]);
    out.labels.push_back(m.labels[i]);
    auto row = m.row(i);
    out.x.insert(out.x.end(), row.begin(), row.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Linear SVM, dual coordinate descent
// ---------------------------------------------------------------------------

namespace {

// One-vs-rest binary solve. The bias is learned as an augmented constant
// feature, so it carries a small regularization penalty like the weights.
struct BinarySolution {
  std::vector<double> w;  // length d
  double bias = 0.0;
  std::vector<double> objective;  // dual objective per epoch, non-increasing
};

BinarySolution solve_binary_hinge(const FeatureMatrix& m,
                                  const std::vector<int8_t>& y, double c,
                                  Rng rng) {
  const size_t n = m.rows();
  const size_t d = m.n_features;
  constexpr double kBiasFeature = 1.0;
  constexpr size_t kMaxEpochs = 1000;
  constexpr double kTol = 1e-10;

  std::vector<double> q_diag(n);
  for (size_t i = 0; i < n; ++i) {
    double s = kBiasFeature * kBiasFeature;
    for (double v : m.row(i)) s += v * v;
    q_diag[i] = s;
  }

  std::vector<double> w(d, 0.0);
  double w_bias = 0.0;
  std::vector<double> alpha(n, 0.0);
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;

  BinarySolution sol;
  for (size_t epoch = 0; epoch < kMaxEpochs; ++epoch) {
    rng.shuffle(order);
    double max_violation = 0.0;
    for (size_t i : order) {
      auto xi = m.row(i);
      double margin = w_bias * kBiasFeature;
      for (size_t j = 0; j < d; ++j) margin += w[j] * xi[j];
      const double g = y[i] * margin - 1.0;

      double pg = g;
      if (alpha[i] <= 0.0)
        pg = std::min(g, 0.0);
      else if (alpha[i] >= c)
        pg = std::max(g, 0.0);
      max_violation = std::max(max_violation, std::abs(pg));
      if (std::abs(pg) < 1e-14) continue;

      const double next = std::clamp(alpha[i] - g / q_diag[i], 0.0, c);
      const double delta = next - alpha[i];
      if (delta == 0.0) continue;
      alpha[i] = next;
      const double step = delta * y[i];
      for (size_t j = 0; j < d; ++j) w[j] += step * xi[j];
      w_bias += step * kBiasFeature;
    }

    double dual = 0.5 * (w_bias * w_bias);
    for (size_t j = 0; j < d; ++j) dual += 0.5 * w[j] * w[j];
    for (size_t i = 0; i < n; ++i) dual -= alpha[i];
    sol.objective.push_back(dual);
    if (max_violation < kTol) break;
  }
  sol.w = std::move(w);
  sol.bias = w_bias * kBiasFeature;
  return sol;
}

void check_finite(const FeatureMatrix& m) {
  for (double v : m.x)
    if (!std::isfinite(v))
      throw std::invalid_argument("feature matrix contains non-finite values");
}

std::map<std::string, size_t> region_index(const std::vector<std::string>& regions) {
  std::map<std::string, size_t> idx;
  for (size_t i = 0; i < regions.size(); ++i) idx[regions[i]] = i;
  return idx;
}

}  // namespace

LinearRegionModel train_linear_svm(const FeatureMatrix& m, double c,
                                   uint64_t seed) {
  if (c <= 0.0) throw std::invalid_argument("C must be positive");
  if (m.regions.size() < 2)
    throw std::invalid_argument("training requires at least 2 regions");
  check_finite(m);
  auto idx = region_index(m.regions);
  std::vector<size_t> counts(m.regions.size(), 0);
  for (const auto& label : m.labels) {
    auto it = idx.find(label);
    if (it == idx.end())
      throw std::invalid_argument("row label '" + label +
                                  "' missing from declared regions");
    ++counts[it->second];
  }
  for (size_t r = 0; r < counts.size(); ++r)
    if (counts[r] == 0)
      throw std::invalid_argument("region '" + m.regions[r] +
                                  "' has no training samples");

  LinearRegionModel model;
  model.regions = m.regions;
  model.c = c;
  model.normalization = m.normalization;
  model.seed = seed;
  model.weights.resize(m.regions.size());
  model.biases.resize(m.regions.size());
  model.objective_history.resize(m.regions.size());

  Rng root(seed);
  for (size_t r = 0; r < m.regions.size(); ++r) {
    std::vector<int8_t> y(m.rows());
    for (size_t i = 0; i < m.rows(); ++i)
      y[i] = m.labels[i] == m.regions[r] ? 1 : -1;
    BinarySolution sol = solve_binary_hinge(m, y, c, root.derive(r));
    model.weights[r] = std::move(sol.w);
    model.biases[r] = sol.bias;
    model.objective_history[r] = std::move(sol.objective);
  }
  return model;
}

std::vector<double> decision_values(const LinearRegionModel& model,
                                    std::span<const double> raw_row) {
  if (raw_row.size() != model.n_features())
    throw std::invalid_argument(
        "feature dimension " + std::to_string(raw_row.size()) +
        " does not match model (" + std::to_string(model.n_features()) + ")");
  std::vector<double> row(raw_row.begin(), raw_row.end());
  if (model.normalization != Normalization::kNone) {
    double scale = 0.0;
    if (model.normalization == Normalization::kL1) {
      for (double v : row) scale += std::abs(v);
    } else {
      for (double v : row) scale += v * v;
      scale = std::sqrt(scale);
    }
    if (scale > 0.0)
      for (double& v : row) v /= scale;
  }
  std::vector<double> values(model.regions.size());
  for (size_t r = 0; r < model.regions.size(); ++r) {
    double s = model.biases[r];
    for (size_t j = 0; j < row.size(); ++j) s += model.weights[r][j] * row[j];
    values[r] = s;
  }
  return values;
}

std::string predict_region(const LinearRegionModel& model,
                           std::span<const double> raw_row) {
  auto values = decision_values(model, raw_row);
  size_t best = 0;
  for (size_t r = 1; r < values.size(); ++r)
    if (values[r] > values[best]) best = r;  // strict: ties keep earlier region
  return model.regions[best];
}

double total_hinge_loss(const LinearRegionModel& model, const FeatureMatrix& m) {
  FeatureMatrix nm = normalized_view(m, model.normalization);
  double loss = 0.0;
  for (size_t r = 0; r < model.regions.size(); ++r) {
    for (size_t i = 0; i < nm.rows(); ++i) {
      double margin = model.biases[r];
      auto row = nm.row(i);
      for (size_t j = 0; j < row.size(); ++j) margin += model.weights[r][j] * row[j];
      double y = nm.labels[i] == model.regions[r] ? 1.0 : -1.0;
      loss += std::max(0.0, 1.0 - y * margin);
    }
  }
  return loss;
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

namespace {

// Shared between evaluate_metrics and majority_baseline; fills everything
// except the baseline field.
EvalReport metrics_impl(const std::vector<std::string>& gold,
                        const std::vector<std::string>& pred,
                        const std::vector<std::string>& regions) {
  if (gold.size() != pred.size())
    throw std::invalid_argument("gold and predicted label lists differ in length");
  EvalReport report;
  report.regions = regions;
  const size_t n = regions.size();
  auto idx = region_index(regions);
  report.confusion.assign(n * n, 0);
  for (size_t i = 0; i < gold.size(); ++i) {
    auto g = idx.find(gold[i]);
    auto p = idx.find(pred[i]);
    if (g == idx.end())
      throw std::invalid_argument("gold label '" + gold[i] + "' not in region set");
    if (p == idx.end())
      throw std::invalid_argument("predicted label '" + pred[i] + "' not in region set");
    ++report.confusion[g->second * n + p->second];
  }

  report.precision.resize(n);
  report.recall.resize(n);
  report.f1.resize(n);
  for (size_t r = 0; r < n; ++r) {
    long long tp = report.confusion[r * n + r];
    long long row_sum = 0, col_sum = 0;
    for (size_t j = 0; j < n; ++j) {
      row_sum += report.confusion[r * n + j];
      col_sum += report.confusion[j * n + r];
    }
    double p = col_sum == 0 ? 0.0 : static_cast<double>(tp) / col_sum;
    double rec = row_sum == 0 ? 0.0 : static_cast<double>(tp) / row_sum;
    double f = (p + rec) == 0.0 ? 0.0 : 2.0 * p * rec / (p + rec);
    report.precision[r] = p;
    report.recall[r] = rec;
    report.f1[r] = f;
    report.macro_precision += p / n;
    report.macro_recall += rec / n;
    report.macro_f1 += f / n;
  }
  return report;
}

}  // namespace

EvalReport evaluate_metrics(const std::vector<std::string>& gold,
                            const std::vector<std::string>& pred,
                            const std::vector<std::string>& regions) {
  EvalReport report = metrics_impl(gold, pred, regions);
  report.majority_baseline_f1 = gold.empty() ? 0.0 : majority_baseline(gold);
  return report;
}

double majority_baseline(const std::vector<std::string>& labels) {
  if (labels.empty()) throw std::invalid_argument("majority_baseline: no labels");
  std::map<std::string, size_t> counts;
  for (const auto& l : labels) ++counts[l];
  std::string majority;
  size_t best = 0;
  for (const auto& [label, n] : counts) {
    if (n > best) {  // ties keep the lexicographically first label
      best = n;
      majority = label;
    }
  }
  std::vector<std::string> regions;
  for (const auto& [label, n] : counts) regions.push_back(label);
  std::vector<std::string> pred(labels.size(), majority);
  return metrics_impl(labels, pred, regions).macro_f1;
}

// ---------------------------------------------------------------------------
// Grid search / cross-validation / final fit
// ---------------------------------------------------------------------------

GridResult grid_search(const FeatureMatrix& dev, const std::vector<double>& cs,
                       const std::vector<Normalization>& norms, uint64_t seed) {
  if (cs.empty() || norms.empty())
    throw std::invalid_argument("grid_search: empty parameter grid");
  GridResult result;
  result.c = cs[0];
  result.normalization = norms[0];
  if (cs.size() == 1 && norms.size() == 1) return result;  // nothing to choose

  if (dev.regions.size() < 2)
    throw std::invalid_argument("grid_search: dev matrix needs >= 2 regions");

  // stratified 3/4 train, 1/4 validation split
  std::map<std::string, std::vector<size_t>> by_region;
  for (size_t i = 0; i < dev.rows(); ++i) by_region[dev.labels[i]].push_back(i);
  std::vector<size_t> train_idx, val_idx;
  Rng root(seed);
  size_t region_i = 0;
  for (auto& [region, idx] : by_region) {
    if (idx.size() < 2)
      throw std::invalid_argument("grid_search: region '" + region +
                                  "' has fewer than 2 dev samples");
    Rng rng = root.derive(region_i++);
    rng.shuffle(idx);
    size_t val_n = std::max<size_t>(1, idx.size() / 4);
    for (size_t i = 0; i < idx.size(); ++i)
      (i < val_n ? val_idx : train_idx).push_back(idx[i]);
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(val_idx.begin(), val_idx.end());

  FeatureMatrix train = select_rows(dev, train_idx);
  auto balanced = balance_indices(train.labels, mix_seed(seed, 17));
  train = select_rows(train, balanced);
  FeatureMatrix val = select_rows(dev, val_idx);

  double best_score = -1.0;
  for (double c : cs) {
    for (Normalization norm : norms) {
      FeatureMatrix nm = normalized_view(train, norm);
      LinearRegionModel model = train_linear_svm(nm, c, mix_seed(seed, 23));
      std::vector<std::string> pred;
      pred.reserve(val.rows());
      for (size_t i = 0; i < val.rows(); ++i)
        pred.push_back(predict_region(model, val.row(i)));
      double score = evaluate_metrics(val.labels, pred, dev.regions).macro_f1;
      result.scores.push_back({c, norm, score});
      if (score > best_score) {
        best_score = score;
        result.c = c;
        result.normalization = norm;
      }
    }
  }
  return result;
}

EvalReport cross_validate(const FeatureMatrix& m, const FoldPlan& folds,
                          double c, Normalization norm, bool balance) {
  if (folds.k < 2) throw std::invalid_argument("cross_validate: k must be >= 2");
  std::vector<int> fold_of(m.rows());
  for (size_t i = 0; i < m.rows(); ++i) {
    auto it = folds.assignments.find(m.sample_ids[i]);
    if (it == folds.assignments.end())
      throw std::invalid_argument("sample '" + m.sample_ids[i] +
                                  "' missing from fold plan");
    fold_of[i] = it->second;
  }

  std::vector<std::string> gold, pred;
  gold.reserve(m.rows());
  pred.reserve(m.rows());
  for (int f = 0; f < folds.k; ++f) {
    std::vector<size_t> train_idx, test_idx;
    for (size_t i = 0; i < m.rows(); ++i)
      (fold_of[i] == f ? test_idx : train_idx).push_back(i);
    if (test_idx.empty()) continue;

    std::set<std::string> train_regions;
    for (size_t i : train_idx) train_regions.insert(m.labels[i]);
    for (const auto& region : m.regions)
      if (!train_regions.count(region))
        throw std::invalid_argument("fold " + std::to_string(f) +
                                    ": training set lacks region '" + region + "'");

    FeatureMatrix train = select_rows(m, train_idx);
    if (balance) {
      auto picks = balance_indices(train.labels, mix_seed(folds.seed, f));
      train = select_rows(train, picks);
    }
    FeatureMatrix nm = normalized_view(train, norm);
    LinearRegionModel model =
        train_linear_svm(nm, c, mix_seed(folds.seed, 1000 + f));
    for (size_t i : test_idx) {
      gold.push_back(m.labels[i]);
      pred.push_back(predict_region(model, m.row(i)));
    }
  }
  return evaluate_metrics(gold, pred, m.regions);
}

LinearRegionModel fit_final_model(const FeatureMatrix& m, double c,
                                  Normalization norm, uint64_t seed,
                                  bool balance) {
  FeatureMatrix train = m;
  if (balance) {
    auto picks = balance_indices(m.labels, mix_seed(seed, 7));
    train = select_rows(m, picks);
  }
  FeatureMatrix nm = normalized_view(train, norm);
  return train_linear_svm(nm, c, seed);
}

}  // namespace cxgdial
