#ifndef CXGDIAL_REPORT_HPP
#define CXGDIAL_REPORT_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "cxgdial/analysis.hpp"
#include "cxgdial/merge.hpp"

namespace cxgdial {

// Everything one full run produces, plus the provenance block that makes the
// run reproducible (config hash, grammar checksum, seeds, version).
struct ReportBundle {
  GrammarStats grammar_stats;
  EvalReport eval;
  NormalizedWeights weights;
  std::vector<SelectionSignature> signatures;
  PcaResult pca;
  std::vector<RegionalBreakdown> breakdowns;
  std::vector<MergeProposal> merge_audit;
  nlohmann::json provenance;
};

nlohmann::json grammar_stats_to_json(const GrammarStats& stats);
nlohmann::json pca_to_json(const PcaResult& pca);
nlohmann::json breakdowns_to_json(const std::vector<RegionalBreakdown>& breakdowns);
nlohmann::json merge_audit_to_json(const std::vector<MergeProposal>& audit);
std::string merge_audit_jsonl(const std::vector<MergeProposal>& audit);

// Table-style summary: macro precision/recall/F and the majority baseline,
// then one row per region.
std::string summary_markdown(const EvalReport& report);

// Confusion matrix with gold rows, predicted columns, bolded diagonal, and a
// bucketed error legend.
std::string confusion_markdown(const EvalReport& report);

// Writes the bundle's figures and tables under out_dir and returns the file
// names written. An incomplete bundle is an error naming the missing parts;
// empty signatures skip the breakdown figures with a notice on stderr.
std::vector<std::string> emit_figures(const ReportBundle& bundle,
                                      const std::string& out_dir);

}  // namespace cxgdial

#endif  // CXGDIAL_REPORT_HPP
