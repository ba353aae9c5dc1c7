#ifndef CXGDIAL_CLASSIFY_HPP
#define CXGDIAL_CLASSIFY_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cxgdial/corpus.hpp"
#include "cxgdial/grammar.hpp"

namespace cxgdial {

enum class Normalization { kNone, kL1, kL2 };

const char* to_string(Normalization n);
Normalization normalization_from_string(const std::string& name);

// Default search grid for C and normalization.
inline const std::vector<double> kDefaultGridCs = {0.01, 0.1, 1.0, 10.0};
inline const std::vector<Normalization> kDefaultGridNorms = {
    Normalization::kNone, Normalization::kL1, Normalization::kL2};

// samples x constructions raw-frequency counts with region labels.
struct FeatureMatrix {
  std::vector<std::string> sample_ids;
  std::vector<std::string> labels;
  std::vector<std::string> regions;  // declared region order
  size_t n_features = 0;
  std::vector<double> x;  // row-major
  Normalization normalization = Normalization::kNone;

  size_t rows() const { return labels.size(); }
  std::span<const double> row(size_t i) const {
    return {x.data() + i * n_features, n_features};
  }
  std::span<double> row(size_t i) {
    return {x.data() + i * n_features, n_features};
  }
};

// Annotate, collapse constituents, scan: row i holds the per-construction
// instance counts of sample i.
FeatureMatrix vectorize(const std::vector<Sample>& samples, const Grammar& g,
                        const SemanticLexicon& lexicon,
                        const AnnotateOptions& opts);

// Copy with rows rescaled to unit L1/L2 norm (zero rows stay zero).
FeatureMatrix normalized_view(const FeatureMatrix& m, Normalization norm);

// One-vs-rest linear max-margin model: per region, w minimizing
// 1/2 ||w||^2 + C * sum hinge(1 - y * (w.x + b)). objective_history records
// the optimizer objective once per epoch and never increases.
struct LinearRegionModel {
  std::vector<std::string> regions;
  std::vector<std::vector<double>> weights;  // per region, length n_features
  std::vector<double> biases;
  double c = 1.0;
  Normalization normalization = Normalization::kNone;
  uint64_t seed = 0;
  std::string grammar_checksum;
  std::vector<std::vector<double>> objective_history;

  size_t n_features() const { return weights.empty() ? 0 : weights[0].size(); }
};

// Trains on the matrix exactly as given (callers normalize/balance first).
LinearRegionModel train_linear_svm(const FeatureMatrix& m, double c,
                                   uint64_t seed);

// Per-region decision values w.x + b for a raw count row; the model's
// normalization is applied to the row first.
std::vector<double> decision_values(const LinearRegionModel& model,
                                    std::span<const double> raw_row);

// Argmax region; ties resolve to the earlier region in declared order.
std::string predict_region(const LinearRegionModel& model,
                           std::span<const double> raw_row);

// Sum of per-region hinge losses of the model over a raw count matrix.
double total_hinge_loss(const LinearRegionModel& model, const FeatureMatrix& m);

struct EvalReport {
  std::vector<std::string> regions;
  std::vector<double> precision, recall, f1;
  double macro_precision = 0.0, macro_recall = 0.0, macro_f1 = 0.0;
  double majority_baseline_f1 = 0.0;
  std::vector<long long> confusion;  // rows gold, columns predicted

  long long confusion_at(size_t gold, size_t pred) const {
    return confusion[gold * regions.size() + pred];
  }
};

// Precision TP/(TP+FP), recall TP/(TP+FN), F their harmonic mean (0 when
// P+R = 0), macro averages unweighted.
EvalReport evaluate_metrics(const std::vector<std::string>& gold,
                            const std::vector<std::string>& pred,
                            const std::vector<std::string>& regions);

// Macro-F of always predicting the most frequent region; 2/(n(n+1)) for n
// balanced regions.
double majority_baseline(const std::vector<std::string>& labels);

struct GridCandidate {
  double c = 1.0;
  Normalization normalization = Normalization::kNone;
  double score = 0.0;
};

struct GridResult {
  double c = 1.0;
  Normalization normalization = Normalization::kNone;
  std::vector<GridCandidate> scores;  // every evaluated combination
};

// Evaluates each (C, normalization) on an internal stratified split of the
// dev matrix (3/4 train balanced, 1/4 validation) and returns the config
// with the best macro-F. Deterministic; ties keep the earlier grid entry.
GridResult grid_search(const FeatureMatrix& dev, const std::vector<double>& cs,
                       const std::vector<Normalization>& norms, uint64_t seed);

// Per fold: train one-vs-rest on the remaining folds (class-balanced),
// predict the held-out fold; predictions are pooled into one report.
EvalReport cross_validate(const FeatureMatrix& m, const FoldPlan& folds,
                          double c, Normalization norm, bool balance = true);

// One full-data fit (balanced by default) for weight analysis.
LinearRegionModel fit_final_model(const FeatureMatrix& m, double c,
                                  Normalization norm, uint64_t seed,
                                  bool balance = true);

FeatureMatrix select_rows(const FeatureMatrix& m,
                          const std::vector<size_t>& indices);

}  // namespace cxgdial

#endif  // CXGDIAL_CLASSIFY_HPP
