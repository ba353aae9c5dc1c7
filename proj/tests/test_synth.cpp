#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

#include "cxgdial/classify.hpp"
#include "cxgdial/synth.hpp"

using namespace cxgdial;

namespace {

SynthSpec small_spec() {
  SynthSpec spec;
  spec.regions = {"A", "B", "C"};
  spec.n_constructions = 12;
  spec.effect_size = 0.5;
  spec.samples_per_region = 10;
  spec.sample_size = 400;
  spec.vocab_size = 120;
  spec.domains = 10;
  return spec;
}

// total scanned instances per construction for one region's samples
std::vector<long long> region_counts(const SynthOutput& synth,
                                     const std::string& region,
                                     size_t sample_size, long long* tokens_out) {
  auto samples = build_samples(synth.docs, sample_size);
  GrammarMatcher matcher(synth.grammar);
  SemanticLexicon lexicon;  // tokens carry explicit domains
  lexicon.k = synth.grammar.k;
  AnnotateOptions opts;
  opts.source = TagSource::kTaggedInput;
  std::vector<long long> totals(synth.grammar.constructions.size(), 0);
  long long tokens = 0;
  for (const auto& s : samples) {
    if (s.region != region) continue;
    auto tagged = annotate_sample(s, lexicon, opts);
    auto counts = matcher.scan(tagged);
    for (size_t c = 0; c < counts.size(); ++c) totals[c] += counts[c];
    tokens += static_cast<long long>(s.tokens.size());
  }
  if (tokens_out) *tokens_out = tokens;
  return totals;
}

}  // namespace

TEST_CASE("effect size outside [0,1] is rejected") {
  auto spec = small_spec();
  spec.effect_size = 1.2;
  CHECK_THROWS_AS(generate_synthetic(spec, 1), std::invalid_argument);
  spec.effect_size = -0.1;
  CHECK_THROWS_AS(generate_synthetic(spec, 1), std::invalid_argument);
}

TEST_CASE("null effect gives identical regional distributions") {
  auto spec = small_spec();
  spec.effect_size = 0.0;
  auto synth = generate_synthetic(spec, 3);
  for (size_t r = 1; r < synth.planted_rates.size(); ++r)
    for (size_t c = 0; c < synth.planted_rates[r].size(); ++c)
      CHECK(synth.planted_rates[r][c] ==
            doctest::Approx(synth.planted_rates[0][c]).epsilon(1e-12));
}

TEST_CASE("extreme effect confines constructions to their region") {
  auto spec = small_spec();
  spec.effect_size = 1.0;
  spec.samples_per_region = 6;
  auto synth = generate_synthetic(spec, 5);

  for (size_t r = 0; r < synth.regions.size(); ++r) {
    auto counts = region_counts(synth, synth.regions[r], spec.sample_size, nullptr);
    for (size_t c = 0; c < counts.size(); ++c) {
      bool preferred = c % synth.regions.size() == r;
      if (preferred) {
        CHECK(synth.planted_rates[r][c] > 0.0);
      } else {
        CHECK(synth.planted_rates[r][c] == 0.0);
        CHECK(counts[c] == 0);  // never observed outside the preferred region
      }
    }
  }
}

TEST_CASE("empirical rates concentrate around the planted table") {
  SynthSpec spec;
  spec.regions = {"A", "B"};
  spec.n_constructions = 2;
  spec.effect_size = 0.25;  // rates near 0.05 / 0.03 per token
  spec.samples_per_region = 400;
  spec.sample_size = 500;
  spec.vocab_size = 100;
  spec.domains = 8;
  spec.insert_prob = 0.2;
  auto synth = generate_synthetic(spec, 11);

  for (size_t r = 0; r < synth.regions.size(); ++r) {
    long long tokens = 0;
    auto counts = region_counts(synth, synth.regions[r], spec.sample_size, &tokens);
    REQUIRE(tokens > 0);
    for (size_t c = 0; c < counts.size(); ++c) {
      double empirical = static_cast<double>(counts[c]) / static_cast<double>(tokens);
      CHECK(std::abs(empirical - synth.planted_rates[r][c]) <= 0.005);
    }
    // the two planted rates differ as configured
    CHECK(synth.planted_rates[r][r % 2] > synth.planted_rates[r][1 - r % 2]);
  }
}

TEST_CASE("generation is deterministic given the seed") {
  auto spec = small_spec();
  spec.samples_per_region = 3;
  auto a = generate_synthetic(spec, 21);
  auto b = generate_synthetic(spec, 21);
  REQUIRE(a.docs.size() == b.docs.size());
  for (size_t i = 0; i < a.docs.size(); ++i) {
    CHECK(a.docs[i].doc_id == b.docs[i].doc_id);
    CHECK(a.docs[i].sentences == b.docs[i].sentences);
  }
  CHECK(serialize_grammar(a.grammar) == serialize_grammar(b.grammar));
  auto c = generate_synthetic(spec, 22);
  CHECK(a.docs[0].sentences != c.docs[0].sentences);
}

TEST_CASE("duplicate regions copy the source preference vector") {
  auto spec = small_spec();
  spec.regions = {"A", "B", "C", "D"};
  spec.duplicate_of["D"] = "A";
  auto synth = generate_synthetic(spec, 7);
  CHECK(synth.planted_rates[3] == synth.planted_rates[0]);
  CHECK(synth.planted_rates[1] != synth.planted_rates[0]);
}

TEST_CASE("synth spec file parsing") {
  auto path = (std::filesystem::temp_directory_path() / "cxgdial_synth.cfg").string();
  {
    std::ofstream out(path);
    out << "# demo spec\n";
    out << "regions=A,B,C,D\n";
    out << "n_constructions=200\n";
    out << "effect_size=0.2\n";
    out << "samples_per_region=400\n";
    out << "sample_size=2000\n";
    out << "seed=7\n";
    out << "duplicate=D:A\n";
  }
  auto spec = parse_synth_spec(path);
  CHECK(spec.regions == std::vector<std::string>{"A", "B", "C", "D"});
  CHECK(spec.n_constructions == 200);
  CHECK(spec.effect_size == doctest::Approx(0.2));
  CHECK(spec.samples_per_region == 400);
  CHECK(spec.sample_size == 2000);
  CHECK(spec.seed == 7);
  CHECK(spec.duplicate_of.at("D") == "A");
  std::filesystem::remove(path);

  std::ofstream bad(path);
  bad << "nonsense line\n";
  bad.close();
  CHECK_THROWS_AS(parse_synth_spec(path), std::runtime_error);
  std::filesystem::remove(path);
}

TEST_CASE("planted corpora drive a separable classifier") {
  auto spec = small_spec();
  spec.effect_size = 0.8;
  spec.samples_per_region = 16;
  auto synth = generate_synthetic(spec, 13);
  auto samples = build_samples(synth.docs, spec.sample_size);
  SemanticLexicon lexicon;
  lexicon.k = synth.grammar.k;
  AnnotateOptions opts;
  opts.source = TagSource::kTaggedInput;
  auto m = vectorize(samples, synth.grammar, lexicon, opts);
  auto plan = make_folds(m.sample_ids, m.labels, 4, 9);
  auto report = cross_validate(m, plan, 1.0, Normalization::kNone);
  CHECK(report.macro_f1 >= 0.95);
}
