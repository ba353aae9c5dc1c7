// cxg-dialect: construction-grammar dialectometry pipeline.
//
// Subcommands cover the full workflow: corpus sampling, semantic lexicon
// construction, grammar induction, matching, vectorization, classifier
// training and evaluation, weight analysis, region-merge evaluation, and a
// synthetic benchmark generator. `pipeline` chains everything from one
// config file and emits a reproducible report bundle.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "cxgdial/analysis.hpp"
#include "cxgdial/annotate.hpp"
#include "cxgdial/classify.hpp"
#include "cxgdial/corpus.hpp"
#include "cxgdial/grammar.hpp"
#include "cxgdial/induce.hpp"
#include "cxgdial/io.hpp"
#include "cxgdial/merge.hpp"
#include "cxgdial/report.hpp"
#include "cxgdial/svg.hpp"
#include "cxgdial/synth.hpp"
#include "cxgdial/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cxgdial;

namespace {

struct RunConfig {
  std::map<std::string, std::string> values;
  std::string source_path;

  bool has(const std::string& key) const { return values.count(key) > 0; }
  std::string get(const std::string& key, const std::string& fallback = "") const {
    auto it = values.find(key);
    return it == values.end() ? fallback : it->second;
  }
  long long get_int(const std::string& key, long long fallback) const {
    auto it = values.find(key);
    if (it == values.end()) return fallback;
    try {
      return std::stoll(it->second);
    } catch (const std::exception&) {
      throw std::runtime_error("config key '" + key + "' is not an integer: " +
                               it->second);
    }
  }
  double get_double(const std::string& key, double fallback) const {
    auto it = values.find(key);
    if (it == values.end()) return fallback;
    try {
      return std::stod(it->second);
    } catch (const std::exception&) {
      throw std::runtime_error("config key '" + key + "' is not a number: " +
                               it->second);
    }
  }
  void set(const std::string& key, const std::string& value) { values[key] = value; }

  // Resolved configuration text for the provenance hash. Output location is
  // not part of the run's identity.
  std::string canonical() const {
    std::ostringstream out;
    for (const auto& [k, v] : values)
      if (k != "out") out << k << '=' << v << '\n';
    return out.str();
  }
};

RunConfig load_run_config(const std::string& path) {
  RunConfig cfg;
  cfg.source_path = path;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config from " + path);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected key=value");
    cfg.set(line.substr(0, eq), line.substr(eq + 1));
  }
  return cfg;
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(s);
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

void log_stage(const std::string& msg) { std::cerr << "[cxg-dialect] " << msg << "\n"; }

// Flags shared by most subcommands; empty string / negative means unset.
struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  long long seed = -1;
  long long sample_size = -1;
  long long folds = -1;
  long long top_k = -1;
  double cap = std::nan("");
  std::string regions;
};

void add_common_flags(CLI::App* cmd, CommonFlags* flags) {
  cmd->add_option("--config", flags->config_path, "key=value run configuration");
  cmd->add_option("--out", flags->out_dir, "output directory");
  cmd->add_option("--seed", flags->seed, "master random seed");
  cmd->add_option("--sample-size", flags->sample_size, "tokens per sample");
  cmd->add_option("--folds", flags->folds, "cross-validation fold count");
  cmd->add_option("--top-k", flags->top_k, "signature size");
  cmd->add_option("--cap", flags->cap, "signature weight cap");
  cmd->add_option("--regions", flags->regions, "comma-separated region set");
}

RunConfig resolve_config(const CommonFlags& flags) {
  RunConfig cfg;
  if (!flags.config_path.empty()) cfg = load_run_config(flags.config_path);
  if (flags.seed >= 0) cfg.set("seed", std::to_string(flags.seed));
  if (flags.sample_size > 0) cfg.set("sample_size", std::to_string(flags.sample_size));
  if (flags.folds > 0) cfg.set("folds", std::to_string(flags.folds));
  if (flags.top_k > 0) cfg.set("top_k", std::to_string(flags.top_k));
  if (!std::isnan(flags.cap)) cfg.set("cap", std::to_string(flags.cap));
  if (!flags.regions.empty()) cfg.set("regions", flags.regions);
  if (!flags.out_dir.empty()) cfg.set("out", flags.out_dir);
  return cfg;
}

uint64_t master_seed(const RunConfig& cfg) {
  return static_cast<uint64_t>(cfg.get_int("seed", 42));
}

void ensure_out_dir(const RunConfig& cfg) {
  fs::create_directories(cfg.get("out", "out"));
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
  return (fs::path(cfg.get("out", "out")) / name).string();
}

std::vector<Sample> filter_regions(std::vector<Sample> samples,
                                   const RunConfig& cfg) {
  if (!cfg.has("regions")) return samples;
  auto keep = split_commas(cfg.get("regions"));
  std::set<std::string> keep_set(keep.begin(), keep.end());
  std::vector<Sample> out;
  for (auto& s : samples)
    if (keep_set.count(s.region)) out.push_back(std::move(s));
  if (out.empty())
    throw std::runtime_error("no samples left after region filter '" +
                             cfg.get("regions") + "'");
  return out;
}

AnnotateOptions annotate_options(const RunConfig& cfg, const Grammar& grammar,
                                 const UnigramTagger* tagger) {
  AnnotateOptions opts;
  opts.tagset = grammar.tagset;
  const std::string source = cfg.get("tag_source", "tagged");
  if (source == "tagged") {
    opts.source = TagSource::kTaggedInput;
  } else if (source == "builtin") {
    opts.source = TagSource::kBuiltinTagger;
    if (tagger == nullptr)
      throw std::runtime_error("tag_source=builtin requires tagger=<path>");
    opts.tagger = tagger;
  } else {
    throw std::runtime_error("tag_source must be 'tagged' or 'builtin', got '" +
                             source + "'");
  }
  return opts;
}

SemanticLexicon lexicon_or_empty(const RunConfig& cfg) {
  const std::string path = cfg.get("lexicon");
  if (path.empty() || path == "none") {
    SemanticLexicon empty;
    empty.k = 0;
    return empty;
  }
  return load_lexicon(path);
}

std::vector<Sample> load_input_samples(const RunConfig& cfg) {
  if (cfg.has("samples")) return filter_regions(load_samples_jsonl(cfg.get("samples")), cfg);
  if (!cfg.has("corpus"))
    throw std::runtime_error("need samples=<jsonl> or corpus=<dir> in the config");
  auto docs = load_corpus_dir(cfg.get("corpus"));
  const auto sample_size = static_cast<size_t>(cfg.get_int("sample_size", 2000));
  std::vector<Sample> samples;
  if (cfg.get("sampling", "chunk") == "aggregate")
    samples = aggregate_sentences(docs, sample_size, master_seed(cfg));
  else
    samples = build_samples(docs, sample_size);
  // regions that were too small to fill one sample are reported, not fatal
  std::set<std::string> sampled;
  for (const auto& s : samples) sampled.insert(s.region);
  for (const auto& doc : docs)
    if (!sampled.count(doc.region))
      log_stage("notice: region '" + doc.region + "' yielded zero samples");
  return filter_regions(std::move(samples), cfg);
}

json provenance_block(const RunConfig& cfg, const std::string& grammar_checksum) {
  json j;
  j["tool"] = "cxg-dialect";
  j["version"] = kVersion;
  j["config_hash"] = checksum_hex(fnv1a64(cfg.canonical()));
  j["seed"] = master_seed(cfg);
  j["grammar_checksum"] = grammar_checksum;
  return j;
}

// ---------------------------------------------------------------------------
// Subcommand bodies
// ---------------------------------------------------------------------------

int cmd_synth(const RunConfig& cfg) {
  if (!cfg.has("synth")) throw std::runtime_error("synth needs synth=<spec file>");
  SynthSpec spec = parse_synth_spec(cfg.get("synth"));
  uint64_t seed = cfg.has("seed") ? master_seed(cfg) : spec.seed;
  log_stage("generating synthetic corpus (" + std::to_string(spec.regions.size()) +
            " regions)");
  auto synth = generate_synthetic(spec, seed);
  ensure_out_dir(cfg);
  save_corpus_dir(out_path(cfg, "corpus"), synth.docs);
  save_grammar(out_path(cfg, "grammar.cxg"), synth.grammar);
  save_planted_rates(out_path(cfg, "planted_rates.json"), synth);
  log_stage("wrote corpus/, grammar.cxg, planted_rates.json");
  return 0;
}

int cmd_lexicon_build(const RunConfig& cfg) {
  if (!cfg.has("corpus"))
    throw std::runtime_error("lexicon-build needs corpus=<dir>");
  auto docs = load_corpus_dir(cfg.get("corpus"));
  EmbeddingConfig ecfg;
  ecfg.dim = static_cast<size_t>(cfg.get_int("dim", 500));
  ecfg.window = static_cast<size_t>(cfg.get_int("window", 5));
  ecfg.min_count = static_cast<size_t>(cfg.get_int("min_count", 5));
  log_stage("building PPMI embeddings (dim=" + std::to_string(ecfg.dim) + ")");
  EmbeddingTable emb;
  if (cfg.has("embeddings_in")) {
    emb = load_embeddings(cfg.get("embeddings_in"));
  } else {
    emb = build_cooccurrence_embeddings(docs, ecfg);
  }
  ensure_out_dir(cfg);
  save_embeddings(out_path(cfg, "embeddings.txt"), emb);
  const auto k = static_cast<size_t>(cfg.get_int("k", 100));
  log_stage("clustering " + std::to_string(emb.rows.size()) + " words into " +
            std::to_string(k) + " domains");
  auto lexicon = cluster_domains(emb, std::min(k, emb.rows.size()), master_seed(cfg));
  save_lexicon(out_path(cfg, "lexicon.tsv"), lexicon);
  if (cfg.get("train_tagger", "0") == "1") {
    UnigramTagger tagger;
    tagger.train(docs);
    tagger.save(out_path(cfg, "tagger.tsv"));
  }
  log_stage("wrote embeddings.txt, lexicon.tsv");
  return 0;
}

struct AnnotatedCorpus {
  std::vector<Sample> samples;
  std::vector<std::vector<TaggedToken>> tokens;
};

AnnotatedCorpus annotate_all(const std::vector<Sample>& samples,
                             const SemanticLexicon& lexicon,
                             const AnnotateOptions& opts) {
  AnnotatedCorpus out;
  out.samples = samples;
  out.tokens.resize(samples.size());
  for (size_t i = 0; i < samples.size(); ++i)
    out.tokens[i] = annotate_sample(samples[i], lexicon, opts);
  return out;
}

int cmd_induce(const RunConfig& cfg) {
  auto samples = load_input_samples(cfg);
  auto lexicon = lexicon_or_empty(cfg);
  Grammar tag_holder;  // supplies the tagset for annotation
  if (cfg.has("tagset")) tag_holder.tagset = Tagset::custom(split_commas(cfg.get("tagset")));
  std::optional<UnigramTagger> tagger;
  if (cfg.has("tagger")) tagger = UnigramTagger::load(cfg.get("tagger"));
  auto opts = annotate_options(cfg, tag_holder, tagger ? &*tagger : nullptr);

  log_stage("annotating " + std::to_string(samples.size()) + " samples");
  auto annotated = annotate_all(samples, lexicon, opts);

  InductionConfig icfg;
  icfg.min_len = static_cast<size_t>(cfg.get_int("min_len", 2));
  icfg.max_len = static_cast<size_t>(cfg.get_int("max_len", 6));
  icfg.min_freq = static_cast<size_t>(cfg.get_int("min_freq", 20));
  icfg.min_assoc = cfg.get_double("min_assoc", 0.1);
  icfg.max_grammar = static_cast<size_t>(cfg.get_int("max_grammar", 500));
  icfg.seed = master_seed(cfg);

  log_stage("extracting candidates");
  auto candidates = extract_candidates(annotated.tokens, icfg);
  size_t k = lexicon.k;
  Grammar grammar = induce_grammar(annotated.tokens, icfg, tag_holder.tagset, k);
  log_stage("induced " + std::to_string(grammar.constructions.size()) +
            " constructions (from " + std::to_string(candidates.size()) +
            " candidates)");
  ensure_out_dir(cfg);
  save_grammar(out_path(cfg, "grammar.cxg"), grammar);
  write_candidate_audit(out_path(cfg, "candidates.tsv"), candidates);
  log_stage("wrote grammar.cxg, candidates.tsv");
  return 0;
}

int cmd_grammar_stats(const RunConfig& cfg) {
  if (!cfg.has("grammar")) throw std::runtime_error("grammar-stats needs grammar=<path>");
  Grammar g = parse_grammar_file(cfg.get("grammar"));
  json j = grammar_stats_to_json(grammar_stats(g));
  std::cout << j.dump(2) << "\n";
  if (cfg.has("out")) {
    ensure_out_dir(cfg);
    write_file(out_path(cfg, "grammar_stats.json"), j.dump(2) + "\n");
  }
  return 0;
}

int cmd_match(const RunConfig& cfg) {
  if (!cfg.has("grammar")) throw std::runtime_error("match needs grammar=<path>");
  Grammar g = parse_grammar_file(cfg.get("grammar"));
  auto samples = load_input_samples(cfg);
  auto lexicon = lexicon_or_empty(cfg);
  std::optional<UnigramTagger> tagger;
  if (cfg.has("tagger")) tagger = UnigramTagger::load(cfg.get("tagger"));
  auto opts = annotate_options(cfg, g, tagger ? &*tagger : nullptr);

  for (const auto& s : samples) {
    auto tokens = collapse_constituents(annotate_sample(s, lexicon, opts),
                                        g.constituents);
    json spans = json::array();
    for (const auto& c : g.constructions) {
      for (const auto& span : match_construction(c, tokens))
        spans.push_back({{"cid", span.cid},
                         {"start", span.start},
                         {"end", span.end}});
    }
    json line;
    line["sample_id"] = s.sample_id;
    line["region"] = s.region;
    line["spans"] = spans;
    std::cout << line.dump() << "\n";
  }
  return 0;
}

FeatureMatrix vectorize_from_config(const RunConfig& cfg, Grammar* grammar_out,
                                    std::string* checksum_out) {
  if (!cfg.has("grammar")) throw std::runtime_error("need grammar=<path>");
  Grammar g = parse_grammar_file(cfg.get("grammar"));
  auto samples = load_input_samples(cfg);
  auto lexicon = lexicon_or_empty(cfg);
  std::optional<UnigramTagger> tagger;
  if (cfg.has("tagger")) tagger = UnigramTagger::load(cfg.get("tagger"));
  auto opts = annotate_options(cfg, g, tagger ? &*tagger : nullptr);
  log_stage("vectorizing " + std::to_string(samples.size()) + " samples x " +
            std::to_string(g.constructions.size()) + " constructions");
  FeatureMatrix m = vectorize(samples, g, lexicon, opts);
  if (checksum_out) *checksum_out = checksum_hex(grammar_checksum(g));
  if (grammar_out) *grammar_out = std::move(g);
  return m;
}

int cmd_vectorize(const RunConfig& cfg) {
  std::string checksum;
  FeatureMatrix m = vectorize_from_config(cfg, nullptr, &checksum);
  ensure_out_dir(cfg);
  save_features(out_path(cfg, "features.jsonl"), m, checksum);
  log_stage("wrote features.jsonl (" + std::to_string(m.rows()) + " rows)");
  return 0;
}

FeaturesFile features_from_config(const RunConfig& cfg) {
  if (!cfg.has("features"))
    throw std::runtime_error("need features=<jsonl> (run vectorize first)");
  return load_features(cfg.get("features"));
}

int cmd_train(const RunConfig& cfg) {
  auto file = features_from_config(cfg);
  double c = cfg.get_double("c", 1.0);
  Normalization norm = normalization_from_string(cfg.get("norm", "none"));
  if (cfg.get("grid", "0") == "1") {
    auto grid_cs = cfg.has("grid_c")
                       ? [&] {
                           std::vector<double> cs;
                           for (const auto& v : split_commas(cfg.get("grid_c")))
                             cs.push_back(std::stod(v));
                           return cs;
                         }()
                       : kDefaultGridCs;
    std::vector<Normalization> norms;
    if (cfg.has("grid_norm")) {
      for (const auto& v : split_commas(cfg.get("grid_norm")))
        norms.push_back(normalization_from_string(v));
    } else {
      norms = kDefaultGridNorms;
    }
    auto grid = grid_search(file.matrix, grid_cs, norms, master_seed(cfg));
    c = grid.c;
    norm = grid.normalization;
    log_stage("grid search selected C=" + std::to_string(c) + " norm=" +
              to_string(norm));
  }
  auto model = fit_final_model(file.matrix, c, norm, master_seed(cfg));
  model.grammar_checksum = file.grammar_checksum;
  ensure_out_dir(cfg);
  save_model(out_path(cfg, "model.json"), model);
  log_stage("wrote model.json");
  return 0;
}

int cmd_evaluate(const RunConfig& cfg) {
  auto file = features_from_config(cfg);
  const int folds = static_cast<int>(cfg.get_int("folds", 10));
  auto plan = make_folds(file.matrix.sample_ids, file.matrix.labels, folds,
                         master_seed(cfg));
  double c = cfg.get_double("c", 1.0);
  Normalization norm = normalization_from_string(cfg.get("norm", "none"));
  log_stage("cross-validating (k=" + std::to_string(folds) + ")");
  auto report = cross_validate(file.matrix, plan, c, norm);
  ensure_out_dir(cfg);
  write_file(out_path(cfg, "eval.json"), report_to_json(report).dump(2) + "\n");
  write_file(out_path(cfg, "report.md"), summary_markdown(report));
  write_file(out_path(cfg, "confusion.md"), confusion_markdown(report));
  std::cout << report_to_json(report).dump(2) << "\n";
  return 0;
}

LinearRegionModel model_from_config(const RunConfig& cfg) {
  if (!cfg.has("model")) throw std::runtime_error("need model=<json>");
  return load_model(cfg.get("model"));
}

int cmd_signatures(const RunConfig& cfg) {
  auto model = model_from_config(cfg);
  auto nw = normalize_weights(model);
  const auto top_k = static_cast<size_t>(cfg.get_int("top_k", 250));
  std::optional<double> cap;
  if (cfg.has("cap") && cfg.get("cap") != "none") cap = cfg.get_double("cap", 0.02);
  auto sigs = selection_signatures(nw, top_k, cap);
  ensure_out_dir(cfg);
  json j = json::object();
  for (const auto& sig : sigs) {
    json entries = json::array();
    for (const auto& e : sig.entries) entries.push_back({{"cid", e.cid}, {"weight", e.weight}});
    j[sig.region] = entries;
  }
  write_file(out_path(cfg, "signatures.json"), j.dump(2) + "\n");
  if (cfg.has("grammar")) {
    Grammar g = parse_grammar_file(cfg.get("grammar"));
    write_file(out_path(cfg, "signatures.txt"), signatures_to_text(sigs, g));
  }
  log_stage("wrote signatures.json");
  return 0;
}

int cmd_pca(const RunConfig& cfg) {
  auto model = model_from_config(cfg);
  auto nw = normalize_weights(model);
  auto pca = pca_similarity(nw);
  ensure_out_dir(cfg);
  write_file(out_path(cfg, "pca.json"), pca_to_json(pca).dump(2) + "\n");
  std::vector<LabeledPoint> points;
  for (size_t i = 0; i < pca.regions.size(); ++i)
    points.push_back({pca.regions[i], pca.coordinates[i][0], pca.coordinates[i][1]});
  write_file(out_path(cfg, "pca_scatter.svg"),
             scatter_svg("Similarity of feature weights", points, "component 1",
                         "component 2"));
  std::cout << pca_to_json(pca).dump(2) << "\n";
  return 0;
}

int cmd_breakdowns(const RunConfig& cfg) {
  auto model = model_from_config(cfg);
  if (!cfg.has("grammar")) throw std::runtime_error("breakdowns needs grammar=<path>");
  Grammar g = parse_grammar_file(cfg.get("grammar"));
  auto nw = normalize_weights(model);
  const auto top_k = static_cast<size_t>(cfg.get_int("top_k", 250));
  std::optional<double> cap;
  if (cfg.has("cap") && cfg.get("cap") != "none") cap = cfg.get_double("cap", 0.02);
  auto sigs = selection_signatures(nw, top_k, cap);
  auto breakdowns = regional_breakdowns(sigs, g);
  ensure_out_dir(cfg);
  write_file(out_path(cfg, "breakdowns.json"),
             breakdowns_to_json(breakdowns).dump(2) + "\n");
  std::cout << breakdowns_to_json(breakdowns).dump(2) << "\n";
  return 0;
}

int cmd_merge_scan(const RunConfig& cfg) {
  auto file = features_from_config(cfg);
  MergeConfig mcfg;
  mcfg.folds = static_cast<int>(cfg.get_int("merge_folds", cfg.get_int("folds", 10)));
  mcfg.c = cfg.get_double("c", 1.0);
  mcfg.normalization = normalization_from_string(cfg.get("norm", "none"));
  mcfg.seed = master_seed(cfg);
  auto initial = RegionSet::from_regions(file.matrix.regions);
  log_stage("merge scan over " + std::to_string(initial.groups.size()) + " regions");
  auto outcome = merge_scan(file.matrix, initial, mcfg);
  ensure_out_dir(cfg);
  write_file(out_path(cfg, "merge_audit.jsonl"), merge_audit_jsonl(outcome.audit));
  json final_set = json::array();
  for (size_t g = 0; g < outcome.final_set.groups.size(); ++g)
    final_set.push_back(outcome.final_set.label(g));
  write_file(out_path(cfg, "final_regions.json"), final_set.dump(2) + "\n");
  std::cout << final_set.dump(2) << "\n";
  return 0;
}

int cmd_pipeline(const RunConfig& cfg_in) {
  RunConfig cfg = cfg_in;
  ensure_out_dir(cfg);
  uint64_t seed = master_seed(cfg);

  // 1. corpus: synthetic or on-disk
  std::vector<RawDocument> docs;
  Grammar grammar;
  bool have_grammar = false;
  if (cfg.has("synth")) {
    SynthSpec spec = parse_synth_spec(cfg.get("synth"));
    log_stage("stage 1: synthetic corpus (" + std::to_string(spec.regions.size()) +
              " regions x " + std::to_string(spec.samples_per_region) + " samples)");
    auto synth = generate_synthetic(spec, seed);
    docs = std::move(synth.docs);
    grammar = std::move(synth.grammar);
    have_grammar = cfg.get("grammar", "synth") == "synth";
    save_grammar(out_path(cfg, "grammar.cxg"), grammar);
    save_planted_rates(out_path(cfg, "planted_rates.json"),
                       SynthOutput{{}, grammar, synth.regions, synth.planted_rates});
    if (!cfg.has("sample_size")) cfg.set("sample_size", std::to_string(spec.sample_size));
  } else if (cfg.has("corpus")) {
    log_stage("stage 1: loading corpus " + cfg.get("corpus"));
    docs = load_corpus_dir(cfg.get("corpus"));
  } else if (!cfg.has("samples")) {
    throw std::runtime_error("pipeline needs synth=, corpus= or samples= input");
  }

  // 2. samples
  std::vector<Sample> samples;
  const auto sample_size = static_cast<size_t>(cfg.get_int("sample_size", 2000));
  if (cfg.has("samples")) {
    samples = filter_regions(load_samples_jsonl(cfg.get("samples")), cfg);
  } else {
    log_stage("stage 2: sampling (size " + std::to_string(sample_size) + ")");
    if (cfg.get("sampling", "chunk") == "aggregate")
      samples = aggregate_sentences(docs, sample_size, seed);
    else
      samples = build_samples(docs, sample_size);
    samples = filter_regions(std::move(samples), cfg);
  }
  if (cfg.get("write_samples", "0") == "1")
    save_samples_jsonl(out_path(cfg, "samples.jsonl"), samples);

  // 3. lexicon
  SemanticLexicon lexicon;
  if (cfg.get("lexicon", "") == "build") {
    log_stage("stage 3: building lexicon");
    EmbeddingConfig ecfg;
    ecfg.dim = static_cast<size_t>(cfg.get_int("dim", 64));
    ecfg.window = static_cast<size_t>(cfg.get_int("window", 5));
    ecfg.min_count = static_cast<size_t>(cfg.get_int("min_count", 5));
    auto emb = build_cooccurrence_embeddings(docs, ecfg);
    const auto k = std::min(static_cast<size_t>(cfg.get_int("k", 100)), emb.rows.size());
    lexicon = cluster_domains(emb, k, seed);
    save_lexicon(out_path(cfg, "lexicon.tsv"), lexicon);
  } else if (cfg.has("lexicon") && cfg.get("lexicon") != "none") {
    lexicon = load_lexicon(cfg.get("lexicon"));
  }

  // 4. grammar
  std::optional<UnigramTagger> tagger;
  if (cfg.has("tagger")) tagger = UnigramTagger::load(cfg.get("tagger"));
  if (!have_grammar) {
    const std::string source = cfg.get("grammar", "induce");
    if (source == "induce") {
      log_stage("stage 4: inducing grammar");
      Grammar tag_holder;
      if (cfg.has("tagset"))
        tag_holder.tagset = Tagset::custom(split_commas(cfg.get("tagset")));
      auto opts = annotate_options(cfg, tag_holder, tagger ? &*tagger : nullptr);
      auto annotated = annotate_all(samples, lexicon, opts);
      InductionConfig icfg;
      icfg.min_len = static_cast<size_t>(cfg.get_int("min_len", 2));
      icfg.max_len = static_cast<size_t>(cfg.get_int("max_len", 6));
      icfg.min_freq = static_cast<size_t>(cfg.get_int("min_freq", 20));
      icfg.min_assoc = cfg.get_double("min_assoc", 0.1);
      icfg.max_grammar = static_cast<size_t>(cfg.get_int("max_grammar", 500));
      icfg.seed = seed;
      auto candidates = extract_candidates(annotated.tokens, icfg);
      grammar = induce_grammar(annotated.tokens, icfg, tag_holder.tagset, lexicon.k);
      save_grammar(out_path(cfg, "grammar.cxg"), grammar);
      write_candidate_audit(out_path(cfg, "candidates.tsv"), candidates);
    } else {
      log_stage("stage 4: loading grammar " + source);
      grammar = parse_grammar_file(source);
    }
  }
  const std::string checksum = checksum_hex(grammar_checksum(grammar));

  // 5. features
  log_stage("stage 5: vectorizing " + std::to_string(samples.size()) +
            " samples x " + std::to_string(grammar.constructions.size()) +
            " constructions");
  auto opts = annotate_options(cfg, grammar, tagger ? &*tagger : nullptr);
  FeatureMatrix features = vectorize(samples, grammar, lexicon, opts);
  save_features(out_path(cfg, "features.jsonl"), features, checksum);

  // 6. dev split + grid search
  double chosen_c = cfg.get_double("c", 1.0);
  Normalization chosen_norm = normalization_from_string(cfg.get("norm", "none"));
  FeatureMatrix main_features = features;
  if (cfg.get("grid", "1") == "1" && !(cfg.has("c") && cfg.has("norm"))) {
    size_t dev_count = static_cast<size_t>(
        cfg.get_int("dev_count",
                    std::max<long long>(static_cast<long long>(features.regions.size()) * 8,
                                        static_cast<long long>(samples.size() / 10))));
    if (dev_count >= samples.size())
      throw std::runtime_error("dev_count " + std::to_string(dev_count) +
                               " exceeds the corpus; set dev_count=");
    log_stage("stage 6: grid search on " + std::to_string(dev_count) + " dev samples");
    auto [dev_samples, main_samples] = split_dev(samples, dev_count, seed);
    std::set<std::string> dev_ids;
    for (const auto& s : dev_samples) dev_ids.insert(s.sample_id);
    std::vector<size_t> dev_idx, main_idx;
    for (size_t i = 0; i < features.rows(); ++i)
      (dev_ids.count(features.sample_ids[i]) ? dev_idx : main_idx).push_back(i);
    FeatureMatrix dev = select_rows(features, dev_idx);
    main_features = select_rows(features, main_idx);

    std::vector<double> grid_cs = kDefaultGridCs;
    if (cfg.has("grid_c")) {
      grid_cs.clear();
      for (const auto& v : split_commas(cfg.get("grid_c"))) grid_cs.push_back(std::stod(v));
    }
    std::vector<Normalization> grid_norms = kDefaultGridNorms;
    if (cfg.has("grid_norm")) {
      grid_norms.clear();
      for (const auto& v : split_commas(cfg.get("grid_norm")))
        grid_norms.push_back(normalization_from_string(v));
    }
    auto grid = grid_search(dev, grid_cs, grid_norms, seed);
    chosen_c = grid.c;
    chosen_norm = grid.normalization;
    log_stage("grid selected C=" + std::to_string(chosen_c) + " norm=" +
              to_string(chosen_norm));
  }

  // 7. cross-validation
  const int folds = static_cast<int>(cfg.get_int("folds", 10));
  log_stage("stage 7: " + std::to_string(folds) + "-fold cross-validation");
  auto plan = make_folds(main_features.sample_ids, main_features.labels, folds, seed);
  auto report = cross_validate(main_features, plan, chosen_c, chosen_norm);
  write_file(out_path(cfg, "eval.json"), report_to_json(report).dump(2) + "\n");

  // 8. final model
  log_stage("stage 8: fitting the final model");
  auto model = fit_final_model(main_features, chosen_c, chosen_norm, seed);
  model.grammar_checksum = checksum;
  save_model(out_path(cfg, "model.json"), model);

  // 9. analysis
  log_stage("stage 9: analysis exports");
  auto nw = normalize_weights(model);
  const auto top_k = static_cast<size_t>(cfg.get_int("top_k", 250));
  std::optional<double> cap = cfg.get("cap", "0.02") == "none"
                                  ? std::nullopt
                                  : std::optional<double>(cfg.get_double("cap", 0.02));
  auto sigs = selection_signatures(nw, top_k, cap);
  json sig_json = json::object();
  for (const auto& sig : sigs) {
    json entries = json::array();
    for (const auto& e : sig.entries) entries.push_back({{"cid", e.cid}, {"weight", e.weight}});
    sig_json[sig.region] = entries;
  }
  write_file(out_path(cfg, "signatures.json"), sig_json.dump(2) + "\n");
  write_file(out_path(cfg, "signatures.txt"), signatures_to_text(sigs, grammar));
  auto breakdowns = regional_breakdowns(sigs, grammar);
  write_file(out_path(cfg, "breakdowns.json"), breakdowns_to_json(breakdowns).dump(2) + "\n");
  PcaResult pca;
  if (nw.regions.size() >= 3) {
    pca = pca_similarity(nw);
    write_file(out_path(cfg, "pca.json"), pca_to_json(pca).dump(2) + "\n");
  } else {
    log_stage("notice: fewer than 3 regions, PCA skipped");
  }

  // 10. merge scan
  log_stage("stage 10: merge scan");
  MergeConfig mcfg;
  mcfg.folds = static_cast<int>(cfg.get_int("merge_folds", folds));
  mcfg.c = chosen_c;
  mcfg.normalization = chosen_norm;
  mcfg.seed = seed;
  auto outcome = merge_scan(main_features, RegionSet::from_regions(main_features.regions),
                            mcfg);
  write_file(out_path(cfg, "merge_audit.jsonl"), merge_audit_jsonl(outcome.audit));
  json final_set = json::array();
  for (size_t g = 0; g < outcome.final_set.groups.size(); ++g)
    final_set.push_back(outcome.final_set.label(g));
  write_file(out_path(cfg, "final_regions.json"), final_set.dump(2) + "\n");

  // 11. bundle + figures
  log_stage("stage 11: report bundle and figures");
  ReportBundle bundle;
  bundle.grammar_stats = grammar_stats(grammar);
  bundle.eval = report;
  bundle.weights = nw;
  bundle.signatures = sigs;
  bundle.pca = pca;
  bundle.breakdowns = breakdowns;
  bundle.merge_audit = outcome.audit;
  bundle.provenance = provenance_block(cfg, checksum);
  write_file(out_path(cfg, "provenance.json"), bundle.provenance.dump(2) + "\n");

  json bundle_json;
  bundle_json["grammar_stats"] = grammar_stats_to_json(bundle.grammar_stats);
  bundle_json["eval"] = report_to_json(report);
  bundle_json["chosen"] = {{"C", chosen_c}, {"normalization", to_string(chosen_norm)}};
  bundle_json["pca"] = nw.regions.size() >= 3 ? pca_to_json(pca) : json();
  bundle_json["breakdowns"] = breakdowns_to_json(breakdowns);
  bundle_json["merge_audit"] = merge_audit_to_json(outcome.audit);
  bundle_json["provenance"] = bundle.provenance;
  write_file(out_path(cfg, "bundle.json"), bundle_json.dump(2) + "\n");

  if (nw.regions.size() >= 3) {
    auto files = emit_figures(bundle, cfg.get("out", "out"));
    log_stage("wrote " + std::to_string(files.size()) + " figure/table files");
  } else {
    write_file(out_path(cfg, "report.md"), summary_markdown(report));
    write_file(out_path(cfg, "confusion.md"), confusion_markdown(report));
  }
  log_stage("pipeline complete: " + cfg.get("out", "out"));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"construction-grammar dialectometry toolkit"};
  app.set_version_flag("--version", std::string("cxg-dialect ") + kVersion);
  app.require_subcommand(1);

  std::map<std::string, CommonFlags> flags;
  std::map<std::string, std::map<std::string, std::string>> extra;

  // per-subcommand input flags mapped straight onto config keys
  auto add_input_flag = [&](CLI::App* cmd, const std::string& name,
                            const std::string& key, const std::string& desc) {
    auto& slot = extra[cmd->get_name()][key];
    cmd->add_option(name, slot, desc);
  };

  struct SubSpec {
    const char* name;
    const char* desc;
    int (*fn)(const RunConfig&);
  };
  const std::vector<SubSpec> subs = {
      {"synth", "generate a synthetic benchmark corpus", cmd_synth},
      {"lexicon-build", "build embeddings and a semantic-domain lexicon", cmd_lexicon_build},
      {"induce", "induce a construction grammar from samples", cmd_induce},
      {"grammar-stats", "report grammar composition statistics", cmd_grammar_stats},
      {"match", "emit construction match spans for samples", cmd_match},
      {"vectorize", "produce the samples x constructions count matrix", cmd_vectorize},
      {"train", "train (optionally grid-searched) the region model", cmd_train},
      {"evaluate", "cross-validated evaluation with confusion tables", cmd_evaluate},
      {"signatures", "per-region selection signatures", cmd_signatures},
      {"pca", "two-component similarity map of region weights", cmd_pca},
      {"breakdowns", "top-construction composition per region", cmd_breakdowns},
      {"merge-scan", "hierarchical region merge evaluation", cmd_merge_scan},
      {"pipeline", "run the full workflow from one config", cmd_pipeline},
  };

  std::map<std::string, int (*)(const RunConfig&)> dispatch;
  for (const auto& spec : subs) {
    CLI::App* cmd = app.add_subcommand(spec.name, spec.desc);
    add_common_flags(cmd, &flags[spec.name]);
    add_input_flag(cmd, "--corpus", "corpus", "corpus directory");
    add_input_flag(cmd, "--samples", "samples", "samples JSONL file");
    add_input_flag(cmd, "--grammar", "grammar", "grammar file (or 'induce'/'synth')");
    add_input_flag(cmd, "--lexicon", "lexicon", "semantic lexicon TSV (or 'build')");
    add_input_flag(cmd, "--tagger", "tagger", "unigram tagger TSV");
    add_input_flag(cmd, "--model", "model", "model JSON file");
    add_input_flag(cmd, "--features", "features", "features JSONL file");
    add_input_flag(cmd, "--synth-spec", "synth", "synthetic corpus spec");
    add_input_flag(cmd, "--embeddings-in", "embeddings_in",
                   "pre-trained word vectors to ingest");
    add_input_flag(cmd, "--c", "c", "SVM regularization strength");
    add_input_flag(cmd, "--norm", "norm", "feature normalization (none|l1|l2)");
    dispatch[spec.name] = spec.fn;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // usage error
  }

  try {
    for (auto* cmd : app.get_subcommands()) {
      const std::string name = cmd->get_name();
      RunConfig cfg = resolve_config(flags[name]);
      for (const auto& [key, value] : extra[name])
        if (!value.empty()) cfg.set(key, value);
      return dispatch[name](cfg);
    }
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
