#include "cxgdial/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "cxgdial/io.hpp"
#include "cxgdial/svg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace cxgdial {

namespace {

std::string fmt(double v, int digits = 4) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

}  // namespace

json grammar_stats_to_json(const GrammarStats& stats) {
  json j;
  j["n_constructions"] = stats.n_constructions;
  j["total_constraints"] = stats.total_constraints;
  json lengths = json::object();
  for (const auto& [len, n] : stats.length_histogram)
    lengths[std::to_string(len)] = n;
  j["length_histogram"] = lengths;
  j["constraint_counts"] = stats.constraint_counts;
  j["constraint_percents"] = stats.constraint_percents;
  return j;
}

json pca_to_json(const PcaResult& pca) {
  json j;
  json coords = json::object();
  for (size_t i = 0; i < pca.regions.size(); ++i)
    coords[pca.regions[i]] = {pca.coordinates[i][0], pca.coordinates[i][1]};
  j["coordinates"] = coords;
  j["explained_variance"] = {pca.explained[0], pca.explained[1]};
  j["explained_total"] = pca.explained[0] + pca.explained[1];
  return j;
}

json breakdowns_to_json(const std::vector<RegionalBreakdown>& breakdowns) {
  json j = json::object();
  for (const auto& b : breakdowns) {
    json lengths = json::object();
    for (const auto& [len, pct] : b.by_length_pct)
      lengths[std::to_string(len)] = pct;
    j[b.region] = {{"by_length_pct", lengths}, {"by_level_pct", b.by_level_pct}};
  }
  return j;
}

json merge_audit_to_json(const std::vector<MergeProposal>& audit) {
  json j = json::array();
  for (const auto& p : audit) {
    j.push_back({{"round", p.round},
                 {"pair", {p.group_a, p.group_b}},
                 {"pair_F", p.pair_f},
                 {"overall_F_before", p.overall_before},
                 {"overall_F_after", p.overall_after},
                 {"accepted", p.accepted}});
  }
  return j;
}

std::string merge_audit_jsonl(const std::vector<MergeProposal>& audit) {
  std::ostringstream out;
  for (const auto& entry : merge_audit_to_json(audit)) out << entry.dump() << '\n';
  return out.str();
}

std::string summary_markdown(const EvalReport& report) {
  std::ostringstream out;
  out << "| | Precision | Recall | F-Measure | Majority Baseline |\n";
  out << "|---|---|---|---|---|\n";
  out << "| All regions (macro) | " << fmt(report.macro_precision, 2) << " | "
      << fmt(report.macro_recall, 2) << " | " << fmt(report.macro_f1, 2) << " | "
      << fmt(report.majority_baseline_f1, 2) << " (F1) |\n\n";
  out << "| Region | Precision | Recall | F-Measure |\n";
  out << "|---|---|---|---|\n";
  for (size_t r = 0; r < report.regions.size(); ++r) {
    out << "| " << report.regions[r] << " | " << fmt(report.precision[r], 4)
        << " | " << fmt(report.recall[r], 4) << " | " << fmt(report.f1[r], 4)
        << " |\n";
  }
  return out.str();
}

std::string confusion_markdown(const EvalReport& report) {
  const size_t n = report.regions.size();
  std::ostringstream out;
  out << "Rows are gold regions; columns are predicted regions.\n\n";
  out << "| |";
  for (const auto& r : report.regions) out << " " << r << " |";
  out << "\n|---|";
  for (size_t i = 0; i < n; ++i) out << "---|";
  out << "\n";
  for (size_t i = 0; i < n; ++i) {
    out << "| **" << report.regions[i] << "** |";
    for (size_t j = 0; j < n; ++j) {
      long long v = report.confusion[i * n + j];
      if (i == j)
        out << " **" << v << "** |";
      else
        out << " " << v << " |";
    }
    out << "\n";
  }

  long long max_off = 0;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      if (i != j) max_off = std::max(max_off, report.confusion[i * n + j]);
  out << "\nLegend: error categories by frequency\n\n";
  if (max_off == 0) {
    out << "| 0 |\n|---|\n";
  } else {
    // zero bucket plus four ranges of width ceil(max/5); the last range
    // absorbs the remainder (max 25 gives 1-5, 6-10, 11-15, 16-25)
    long long width = (max_off + 4) / 5;
    out << "| 0 |";
    long long lo = 1;
    int buckets = 0;
    for (int b = 0; b < 4 && lo <= max_off; ++b) {
      long long hi = b == 3 ? max_off : std::min(max_off, lo + width - 1);
      if (lo == hi)
        out << " " << lo << " |";
      else
        out << " " << lo << "-" << hi << " |";
      lo = hi + 1;
      ++buckets;
    }
    out << "\n|---|";
    for (int b = 0; b < buckets; ++b) out << "---|";
    out << "\n";
  }
  return out.str();
}

std::vector<std::string> emit_figures(const ReportBundle& bundle,
                                      const std::string& out_dir) {
  std::vector<std::string> missing;
  if (bundle.eval.regions.empty()) missing.push_back("eval report");
  if (bundle.weights.regions.empty()) missing.push_back("normalized weights");
  if (bundle.pca.regions.empty()) missing.push_back("pca result");
  if (bundle.grammar_stats.n_constructions == 0) missing.push_back("grammar stats");
  if (bundle.provenance.is_null()) missing.push_back("provenance");
  if (!missing.empty()) {
    std::string msg = "cannot emit figures, bundle is missing:";
    for (const auto& m : missing) msg += " " + m + ";";
    throw std::runtime_error(msg);
  }
  fs::create_directories(out_dir);
  std::vector<std::string> written;
  auto emit = [&](const std::string& name, const std::string& content) {
    write_file((fs::path(out_dir) / name).string(), content);
    written.push_back(name);
  };

  // grammar composition
  {
    std::vector<std::string> cats;
    BarSeries counts{"constructions", {}};
    for (const auto& [len, n] : bundle.grammar_stats.length_histogram) {
      cats.push_back(std::to_string(len));
      counts.values.push_back(static_cast<double>(n));
    }
    emit("grammar_lengths.svg",
         bar_chart_svg("Constructions by number of slots", cats, {counts},
                       "count"));
  }
  {
    std::vector<std::string> cats;
    BarSeries pct{"share of constraints", {}};
    for (const auto& [level, p] : bundle.grammar_stats.constraint_percents) {
      cats.push_back(level);
      pct.values.push_back(p);
    }
    emit("grammar_constraints.svg",
         bar_chart_svg("Slot constraints by representation type", cats, {pct},
                       "%"));
  }

  // per-region P/R/F
  {
    BarSeries p{"precision", bundle.eval.precision};
    BarSeries r{"recall", bundle.eval.recall};
    BarSeries f{"f-measure", bundle.eval.f1};
    emit("region_prf.svg",
         bar_chart_svg("Results by region", bundle.eval.regions, {p, r, f},
                       "score"));
  }

  // weight profiles
  emit("weight_profiles.svg",
       weight_profile_svg("Feature weights by region", bundle.weights.regions,
                          bundle.weights.wn, 0.1));

  // PCA scatter
  {
    std::vector<LabeledPoint> points;
    for (size_t i = 0; i < bundle.pca.regions.size(); ++i)
      points.push_back({bundle.pca.regions[i], bundle.pca.coordinates[i][0],
                        bundle.pca.coordinates[i][1]});
    char x_label[64], y_label[64];
    std::snprintf(x_label, sizeof(x_label), "component 1 (%.1f%%)",
                  100.0 * bundle.pca.explained[0]);
    std::snprintf(y_label, sizeof(y_label), "component 2 (%.1f%%)",
                  100.0 * bundle.pca.explained[1]);
    emit("pca_scatter.svg",
         scatter_svg("Similarity of feature weights", points, x_label, y_label));
  }

  // signature breakdowns
  bool have_signature_entries = false;
  for (const auto& sig : bundle.signatures)
    if (!sig.entries.empty()) have_signature_entries = true;
  if (have_signature_entries && !bundle.breakdowns.empty()) {
    std::vector<std::string> regions;
    std::vector<size_t> lengths;
    for (const auto& b : bundle.breakdowns) {
      regions.push_back(b.region);
      for (const auto& [len, pct] : b.by_length_pct)
        if (std::find(lengths.begin(), lengths.end(), len) == lengths.end())
          lengths.push_back(len);
    }
    std::sort(lengths.begin(), lengths.end());
    std::vector<BarSeries> by_len;
    for (size_t len : lengths) {
      BarSeries s{std::to_string(len) + " slots", {}};
      for (const auto& b : bundle.breakdowns) {
        auto it = b.by_length_pct.find(len);
        s.values.push_back(it == b.by_length_pct.end() ? 0.0 : it->second);
      }
      by_len.push_back(std::move(s));
    }
    emit("breakdown_lengths.svg",
         stacked_bar_svg("Top regional constructions by length", regions, by_len));

    std::vector<BarSeries> by_level;
    for (const std::string level : {"LEX", "SYN", "SEM"}) {
      BarSeries s{level, {}};
      for (const auto& b : bundle.breakdowns) {
        auto it = b.by_level_pct.find(level);
        s.values.push_back(it == b.by_level_pct.end() ? 0.0 : it->second);
      }
      by_level.push_back(std::move(s));
    }
    emit("breakdown_constraints.svg",
         stacked_bar_svg("Top regional constructions by slot constraints",
                         regions, by_level));
  } else {
    std::cerr << "[notice] signatures are empty; breakdown figures omitted\n";
  }

  // confusion heatmap + markdown tables
  emit("confusion_heatmap.svg",
       heatmap_svg("Confusion matrix", bundle.eval.regions, bundle.eval.confusion));
  emit("report.md", summary_markdown(bundle.eval));
  emit("confusion.md", confusion_markdown(bundle.eval));
  return written;
}

}  // namespace cxgdial
