#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "cxgdial/corpus.hpp"
#include "cxgdial/io.hpp"
#include "cxgdial/report.hpp"
#include "cxgdial/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cxgdial;

namespace {

const std::string kBin = CXG_DIALECT_BIN;

struct RunResult {
  int exit_code;
  std::string stdout_text;
};

RunResult run(const std::string& args) {
  fs::path out = fs::temp_directory_path() / "cxgdial_cli_out.txt";
  std::string cmd = kBin + " " + args + " >" + out.string() + " 2>/dev/null";
  int status = std::system(cmd.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.stdout_text = read_file(out.string());
  fs::remove(out);
  return result;
}

fs::path work_dir() {
  fs::path dir = fs::temp_directory_path() / "cxgdial_cli_work";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("samples jsonl round trip") {
  auto dir = work_dir();
  std::vector<Sample> samples;
  Sample s;
  s.sample_id = "A_00001";
  s.region = "A";
  s.tokens = {"the|DET", "cat|NOUN|7"};
  s.provenance = {"A/doc1.txt", "A/doc2.txt"};
  samples.push_back(s);
  auto path = (dir / "samples.jsonl").string();
  save_samples_jsonl(path, samples);
  auto loaded = load_samples_jsonl(path);
  REQUIRE(loaded.size() == 1);
  CHECK(loaded[0].sample_id == s.sample_id);
  CHECK(loaded[0].region == s.region);
  CHECK(loaded[0].tokens == s.tokens);
  CHECK(loaded[0].provenance == s.provenance);
  fs::remove(path);
}

TEST_CASE("unknown flag exits with usage error") {
  CHECK(run("--definitely-not-a-flag").exit_code == 2);
  CHECK(run("grammar-stats --bogus-flag x").exit_code == 2);
  CHECK(run("not-a-subcommand").exit_code == 2);
}

TEST_CASE("missing input file is a data error") {
  CHECK(run("grammar-stats --grammar /nonexistent/g.cxg").exit_code == 1);
  CHECK(run("vectorize --grammar /nonexistent/g.cxg --samples /nope.jsonl").exit_code == 1);
}

TEST_CASE("grammar-stats reports the tiny fixture") {
  auto dir = work_dir();
  auto grammar = dir / "tiny.cxg";
  {
    std::ofstream out(grammar);
    out << "#tagset=ADV,DET,NOUN,VERB\n#k=30\n";
    out << "SYN:ADV LEX:about\n";
    out << "LEX:provide SEM:25 SEM:25\n";
    out << "SYN:DET SYN:NOUN\n";
  }
  auto result = run("grammar-stats --grammar " + grammar.string());
  REQUIRE(result.exit_code == 0);
  json j = json::parse(result.stdout_text);
  CHECK(j.at("n_constructions") == 3);
  CHECK(j.at("total_constraints") == 7);
  CHECK(j.at("length_histogram").at("2") == 2);
  CHECK(j.at("length_histogram").at("3") == 1);
}

TEST_CASE("synth then pipeline emits the full bundle") {
  auto dir = work_dir();
  auto spec = dir / "demo.synth";
  {
    std::ofstream out(spec);
    out << "regions=NORTH,SOUTH,EAST,WEST\n";
    out << "n_constructions=40\n";
    out << "effect_size=0.6\n";
    out << "samples_per_region=24\n";
    out << "sample_size=300\n";
    out << "vocab_size=150\n";
    out << "domains=12\n";
    out << "seed=5\n";
  }
  auto synth_out = dir / "synth_out";
  auto result = run("synth --synth-spec " + spec.string() + " --out " +
                    synth_out.string() + " --seed 5");
  REQUIRE(result.exit_code == 0);
  CHECK(fs::exists(synth_out / "corpus" / "NORTH"));
  CHECK(fs::exists(synth_out / "grammar.cxg"));
  CHECK(fs::exists(synth_out / "planted_rates.json"));

  auto cfg = dir / "pipeline.cfg";
  {
    std::ofstream out(cfg);
    out << "synth=" << spec.string() << "\n";
    out << "grammar=synth\n";
    out << "folds=4\n";
    out << "merge_folds=4\n";
    out << "dev_count=32\n";
    out << "grid_c=1\n";
    out << "grid_norm=none,l2\n";
    out << "top_k=25\n";
    out << "cap=0.9\n";
    out << "seed=5\n";
  }
  auto pipe_out = dir / "pipe_out";
  result = run("pipeline --config " + cfg.string() + " --out " + pipe_out.string());
  REQUIRE(result.exit_code == 0);

  for (const std::string name :
       {"grammar.cxg", "features.jsonl", "eval.json", "model.json",
        "signatures.json", "signatures.txt", "pca.json", "breakdowns.json",
        "merge_audit.jsonl", "final_regions.json", "provenance.json",
        "bundle.json", "report.md", "confusion.md"}) {
    INFO("missing artifact: " << name);
    CHECK(fs::exists(pipe_out / name));
  }
  // eight figures per run
  size_t svg_count = 0;
  for (const auto& entry : fs::directory_iterator(pipe_out))
    if (entry.path().extension() == ".svg") ++svg_count;
  CHECK(svg_count == 8);

  json eval = json::parse(read_file((pipe_out / "eval.json").string()));
  CHECK(eval.at("macro_f1").get<double>() > 0.8);
  json prov = json::parse(read_file((pipe_out / "provenance.json").string()));
  CHECK(prov.contains("config_hash"));
  CHECK(prov.contains("seed"));
  CHECK(prov.contains("grammar_checksum"));

  // downstream single-purpose commands run off the bundle artifacts
  auto eval_out = dir / "eval_out";
  result = run("evaluate --features " + (pipe_out / "features.jsonl").string() +
               " --out " + eval_out.string() + " --folds 4 --seed 5");
  REQUIRE(result.exit_code == 0);
  CHECK(fs::exists(eval_out / "confusion.md"));

  auto sig_out = dir / "sig_out";
  result = run("signatures --model " + (pipe_out / "model.json").string() +
               " --grammar " + (pipe_out / "grammar.cxg").string() + " --out " +
               sig_out.string() + " --top-k 10");
  REQUIRE(result.exit_code == 0);
  CHECK(fs::exists(sig_out / "signatures.txt"));

  auto match_result = run("match --grammar " + (pipe_out / "grammar.cxg").string() +
                          " --corpus " + (synth_out / "corpus").string() +
                          " --sample-size 300");
  REQUIRE(match_result.exit_code == 0);
  std::istringstream lines(match_result.stdout_text);
  std::string first_line;
  REQUIRE(std::getline(lines, first_line));
  json match_json = json::parse(first_line);
  CHECK(match_json.contains("sample_id"));
  CHECK(match_json.contains("spans"));
  fs::remove_all(dir);
}

TEST_CASE("confusion legend buckets follow the five-way split") {
  // max off-diagonal error 25 buckets as 0 / 1-5 / 6-10 / 11-15 / 16-25
  EvalReport rep;
  rep.regions = {"A", "B"};
  rep.precision = {1, 1};
  rep.recall = {1, 1};
  rep.f1 = {1, 1};
  rep.confusion = {100, 25, 0, 100};
  auto md = confusion_markdown(rep);
  CHECK(md.find("| 0 | 1-5 | 6-10 | 11-15 | 16-25 |") != std::string::npos);

  rep.confusion = {100, 0, 0, 100};
  md = confusion_markdown(rep);
  CHECK(md.find("| 0 |\n|---|") != std::string::npos);
}

TEST_CASE("pipeline runs the corpus route with lexicon build and induction") {
  auto dir = work_dir() / "corpus_route";
  fs::remove_all(dir);
  // small pre-tagged corpus with region-specific bigrams
  for (const std::string region : {"UP", "DOWN"}) {
    fs::create_directories(dir / "corpus" / region);
    std::ofstream out(dir / "corpus" / region / "doc0.txt");
    Rng rng(region == "UP" ? 1 : 2);
    for (int line = 0; line < 220; ++line) {
      for (int i = 0; i < 10; ++i) {
        if (i == 4) {
          out << (region == "UP" ? "cold|ADJ wind|NOUN " : "warm|ADJ rain|NOUN ");
        }
        out << "w" << rng.index(12) << "|NOUN ";
      }
      out << "\n";
    }
  }
  auto cfg = dir / "run.cfg";
  {
    std::ofstream out(cfg);
    out << "corpus=" << (dir / "corpus").string() << "\n";
    out << "sample_size=120\nlexicon=build\ndim=8\nwindow=3\nmin_count=3\nk=4\n";
    out << "grammar=induce\nmin_len=2\nmax_len=3\nmin_freq=12\nmin_assoc=0.05\n";
    out << "max_grammar=120\nfolds=3\nmerge_folds=3\ndev_count=8\n";
    out << "grid_c=1\ngrid_norm=none\ntop_k=15\ncap=none\nseed=3\n";
  }
  auto out_dir = dir / "out";
  auto result = run("pipeline --config " + cfg.string() + " --out " + out_dir.string());
  REQUIRE(result.exit_code == 0);
  CHECK(fs::exists(out_dir / "lexicon.tsv"));
  CHECK(fs::exists(out_dir / "candidates.tsv"));
  CHECK(fs::exists(out_dir / "grammar.cxg"));
  CHECK(fs::exists(out_dir / "eval.json"));
  // the induced grammar picked up the planted regional bigrams
  auto grammar_text = read_file((out_dir / "grammar.cxg").string());
  CHECK(grammar_text.find("LEX:cold LEX:wind") != std::string::npos);
  CHECK(grammar_text.find("LEX:warm LEX:rain") != std::string::npos);
  json eval = json::parse(read_file((out_dir / "eval.json").string()));
  CHECK(eval.at("macro_f1").get<double>() > 0.9);
  fs::remove_all(dir);
}

TEST_CASE("emit_figures rejects an incomplete bundle naming the gaps") {
  ReportBundle empty;
  try {
    emit_figures(empty, (work_dir() / "figs_err").string());
    FAIL_CHECK("expected an error for the empty bundle");
  } catch (const std::runtime_error& e) {
    std::string msg = e.what();
    CHECK(msg.find("eval report") != std::string::npos);
    CHECK(msg.find("pca result") != std::string::npos);
    CHECK(msg.find("provenance") != std::string::npos);
  }
}

TEST_CASE("empty signatures skip the breakdown figures") {
  ReportBundle bundle;
  bundle.eval = evaluate_metrics({"A", "B", "C"}, {"A", "B", "C"}, {"A", "B", "C"});
  bundle.weights.regions = {"A", "B", "C"};
  bundle.weights.wn = {{0.1, 0.2}, {0.2, 0.1}, {0.0, 0.3}};
  bundle.pca = pca_similarity(bundle.weights);
  bundle.signatures = {{"A", {}}, {"B", {}}, {"C", {}}};
  Grammar g;
  Construction c;
  c.cid = 0;
  c.slots = {SlotConstraint::lex("x")};
  g.constructions.push_back(c);
  bundle.grammar_stats = grammar_stats(g);
  bundle.provenance = json::object();

  auto dir = work_dir() / "figs_empty_sigs";
  fs::remove_all(dir);
  auto files = emit_figures(bundle, dir.string());
  for (const auto& f : files) {
    CHECK(f.find("breakdown") == std::string::npos);
  }
  CHECK(fs::exists(dir / "pca_scatter.svg"));
  CHECK(!fs::exists(dir / "breakdown_lengths.svg"));
  fs::remove_all(dir);
}

TEST_CASE("merge-scan subcommand writes an audit log") {
  auto dir = work_dir();
  auto spec = dir / "dup.synth";
  {
    std::ofstream out(spec);
    out << "regions=P,Q,R\n";
    out << "n_constructions=24\n";
    out << "effect_size=0.8\n";
    out << "samples_per_region=20\n";
    out << "sample_size=200\n";
    out << "vocab_size=120\n";
    out << "domains=10\n";
    out << "seed=9\n";
  }
  auto synth_out = dir / "synth";
  REQUIRE(run("synth --synth-spec " + spec.string() + " --out " +
              synth_out.string() + " --seed 9").exit_code == 0);
  auto vec_out = dir / "vec";
  REQUIRE(run("vectorize --corpus " + (synth_out / "corpus").string() +
              " --grammar " + (synth_out / "grammar.cxg").string() +
              " --sample-size 200 --out " + vec_out.string()).exit_code == 0);
  auto merge_out = dir / "merge";
  auto result = run("merge-scan --features " + (vec_out / "features.jsonl").string() +
                    " --out " + merge_out.string() + " --folds 4 --seed 9");
  REQUIRE(result.exit_code == 0);
  REQUIRE(fs::exists(merge_out / "merge_audit.jsonl"));
  json final_set = json::parse(read_file((merge_out / "final_regions.json").string()));
  CHECK(final_set.size() == 3);  // distinct planted regions stay apart
  fs::remove_all(dir);
}
