#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "cxgdial/annotate.hpp"
#include "cxgdial/rng.hpp"

using namespace cxgdial;

namespace {

RawDocument doc_of_sentences(std::vector<std::vector<std::string>> sentences,
                             const std::string& region = "A") {
  return RawDocument{"doc", region, std::move(sentences)};
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0, na = 0, nb = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 || nb == 0) return 0;
  return dot / std::sqrt(na * nb);
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("token parsing handles all annotation forms") {
  auto plain = parse_token("Word");
  CHECK(plain.word == "word");
  CHECK(!plain.has_tag);
  CHECK(!plain.has_domain);

  auto tagged = parse_token("walks|verb");
  CHECK(tagged.word == "walks");
  CHECK(tagged.tag == "VERB");
  CHECK(tagged.has_tag);

  auto full = parse_token("cat|NOUN|25");
  CHECK(full.word == "cat");
  CHECK(full.domain == 25);
  CHECK(full.has_domain);

  CHECK(parse_token("|").word == "|");
  CHECK_THROWS_AS(parse_token("cat|NOUN|banana"), std::invalid_argument);
}

TEST_CASE("minimal two-word corpus gets vectors") {
  std::vector<std::vector<std::string>> sentences;
  for (int i = 0; i < 30; ++i) sentences.push_back({"a", "b"});
  EmbeddingConfig cfg;
  cfg.dim = 2;
  cfg.window = 2;
  cfg.min_count = 1;
  auto table = build_cooccurrence_embeddings({doc_of_sentences(sentences)}, cfg);
  REQUIRE(table.rows.count("a") == 1);
  REQUIRE(table.rows.count("b") == 1);
  double c = cosine(table.rows.at("a"), table.rows.at("b"));
  CHECK(std::isfinite(c));
  for (const auto& [word, vec] : table.rows)
    for (double v : vec) CHECK(std::isfinite(v));
}

TEST_CASE("identical context distributions give identical vectors") {
  // w1 and w2 always appear in the frame x _ y, so their co-occurrence
  // profiles coincide exactly
  std::vector<std::vector<std::string>> sentences;
  for (int i = 0; i < 40; ++i) {
    sentences.push_back({"x", "w1", "y"});
    sentences.push_back({"x", "w2", "y"});
    sentences.push_back({"y", "q", "x"});
  }
  EmbeddingConfig cfg;
  cfg.dim = 3;
  cfg.window = 1;
  cfg.min_count = 1;
  auto table = build_cooccurrence_embeddings({doc_of_sentences(sentences)}, cfg);
  const auto& v1 = table.rows.at("w1");
  const auto& v2 = table.rows.at("w2");
  REQUIRE(v1.size() == v2.size());
  for (size_t i = 0; i < v1.size(); ++i)
    CHECK(v1[i] == doctest::Approx(v2[i]).epsilon(1e-6));
}

TEST_CASE("dim exceeding vocabulary is reduced") {
  std::vector<std::vector<std::string>> sentences(20, {"a", "b", "c"});
  EmbeddingConfig cfg;
  cfg.dim = 64;
  cfg.window = 2;
  cfg.min_count = 1;
  auto table = build_cooccurrence_embeddings({doc_of_sentences(sentences)}, cfg);
  CHECK(table.dim <= 3);
}

TEST_CASE("embedding defaults match full-scale configuration") {
  EmbeddingConfig cfg;
  CHECK(cfg.dim == 500);
}

TEST_CASE("embedding save and load round trip") {
  EmbeddingTable table;
  table.dim = 2;
  table.rows["alpha"] = {0.25, -1.5};
  table.rows["beta"] = {1.0 / 3.0, 2.0};
  auto path = temp_path("cxgdial_emb_test.txt");
  save_embeddings(path, table);
  auto loaded = load_embeddings(path);
  CHECK(loaded.dim == 2);
  CHECK(loaded.rows.at("alpha")[0] == table.rows.at("alpha")[0]);
  CHECK(loaded.rows.at("beta")[0] == table.rows.at("beta")[0]);
  std::filesystem::remove(path);
}

TEST_CASE("k=1 puts every word in domain 0") {
  EmbeddingTable table;
  table.dim = 2;
  table.rows["a"] = {0.0, 0.0};
  table.rows["b"] = {1.0, 1.0};
  table.rows["c"] = {2.0, 0.5};
  auto lex = cluster_domains(table, 1, 3);
  CHECK(lex.k == 1);
  for (const auto& [word, dom] : lex.entries) CHECK(dom == 0);
}

TEST_CASE("two separated clouds split perfectly at k=2") {
  EmbeddingTable table;
  table.dim = 2;
  Rng rng(17);
  for (int i = 0; i < 20; ++i) {
    table.rows["near" + std::to_string(i)] = {rng.unit() * 0.1, rng.unit() * 0.1};
    table.rows["far" + std::to_string(i)] = {10.0 + rng.unit() * 0.1,
                                             10.0 + rng.unit() * 0.1};
  }
  auto lex = cluster_domains(table, 2, 5);
  std::set<int> near_domains, far_domains;
  for (const auto& [word, dom] : lex.entries) {
    if (word.rfind("near", 0) == 0) near_domains.insert(dom);
    else far_domains.insert(dom);
  }
  CHECK(near_domains.size() == 1);
  CHECK(far_domains.size() == 1);
  CHECK(*near_domains.begin() != *far_domains.begin());
}

TEST_CASE("k-means objective never increases") {
  EmbeddingTable table;
  table.dim = 3;
  Rng rng(23);
  for (int i = 0; i < 60; ++i)
    table.rows["w" + std::to_string(i)] = {rng.unit() * 4, rng.unit() * 4,
                                           rng.unit() * 4};
  std::vector<double> wcss;
  cluster_domains(table, 5, 7, &wcss);
  REQUIRE(wcss.size() >= 2);
  for (size_t i = 1; i < wcss.size(); ++i) CHECK(wcss[i] <= wcss[i - 1] + 1e-9);
}

TEST_CASE("clustering assigns every word exactly one dense domain") {
  EmbeddingTable table;
  table.dim = 2;
  Rng rng(29);
  for (int i = 0; i < 50; ++i)
    table.rows["w" + std::to_string(i)] = {rng.unit(), rng.unit()};
  size_t k = 7;
  auto lex = cluster_domains(table, k, 11);
  CHECK(lex.entries.size() == table.rows.size());
  std::set<int> used;
  for (const auto& [word, dom] : lex.entries) {
    CHECK(dom >= 0);
    CHECK(dom < static_cast<int>(k));
    used.insert(dom);
  }
  CHECK(used.size() == k);
}

TEST_CASE("lexicon build is byte-deterministic") {
  EmbeddingTable table;
  table.dim = 2;
  Rng rng(31);
  for (int i = 0; i < 30; ++i)
    table.rows["w" + std::to_string(i)] = {rng.unit(), rng.unit()};
  auto a = cluster_domains(table, 4, 9);
  auto b = cluster_domains(table, 4, 9);
  CHECK(a.entries == b.entries);

  auto pa = temp_path("cxgdial_lex_a.tsv");
  auto pb = temp_path("cxgdial_lex_b.tsv");
  save_lexicon(pa, a);
  save_lexicon(pb, b);
  std::ifstream fa(pa), fb(pb);
  std::string ca((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
  std::string cb((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
  CHECK(ca == cb);
  std::filesystem::remove(pa);
  std::filesystem::remove(pb);
}

TEST_CASE("domains form along contextual classes end to end") {
  // two word classes living in distinct frames separate at k=2 through the
  // full embeddings-then-clustering path
  const std::vector<std::string> food = {"bread", "rice", "soup", "cake"};
  const std::vector<std::string> tool = {"hammer", "wrench", "saw", "drill"};
  Rng rng(99);
  std::vector<std::vector<std::string>> sentences;
  for (int i = 0; i < 120; ++i) {
    sentences.push_back({"we", "eat", food[rng.index(food.size())], "today"});
    sentences.push_back({"they", "grab", "the", tool[rng.index(tool.size())]});
  }
  EmbeddingConfig cfg;
  cfg.dim = 4;
  cfg.window = 2;
  cfg.min_count = 1;
  auto emb = build_cooccurrence_embeddings({doc_of_sentences(sentences)}, cfg);
  // cluster the content words only: the frame words would otherwise own
  // the top-level variance split
  EmbeddingTable content;
  content.dim = emb.dim;
  for (const auto& w : food) content.rows[w] = emb.rows.at(w);
  for (const auto& w : tool) content.rows[w] = emb.rows.at(w);
  auto lex = cluster_domains(content, 2, 7);
  std::set<int> food_domains, tool_domains;
  for (const auto& w : food) food_domains.insert(lex.domain_of(w));
  for (const auto& w : tool) tool_domains.insert(lex.domain_of(w));
  CHECK(food_domains.size() == 1);
  CHECK(tool_domains.size() == 1);
  CHECK(*food_domains.begin() != *tool_domains.begin());
}

TEST_CASE("cluster_domains rejects bad input") {
  EmbeddingTable empty;
  CHECK_THROWS_AS(cluster_domains(empty, 2, 1), std::invalid_argument);
  EmbeddingTable one;
  one.dim = 1;
  one.rows["a"] = {1.0};
  CHECK_THROWS_AS(cluster_domains(one, 2, 1), std::invalid_argument);
}

TEST_CASE("lexicon file round trip") {
  SemanticLexicon lex;
  lex.k = 4;
  lex.entries = {{"apple", 0}, {"pear", 0}, {"run", 3}};
  auto path = temp_path("cxgdial_lex_rt.tsv");
  save_lexicon(path, lex);
  auto loaded = load_lexicon(path);
  CHECK(loaded.k == 4);
  CHECK(loaded.entries == lex.entries);
  std::filesystem::remove(path);
}

TEST_CASE("annotate_sample pre-tagged with lexicon domains") {
  // instance "provide an opportunity" with all three words in domain 25
  SemanticLexicon lex;
  lex.k = 100;
  lex.entries = {{"provide", 25}, {"an", 25}, {"opportunity", 25}};
  Sample s;
  s.sample_id = "s1";
  s.region = "A";
  s.tokens = {"provide|VERB", "an|DET", "opportunity|NOUN"};
  AnnotateOptions opts;
  opts.source = TagSource::kTaggedInput;
  auto tagged = annotate_sample(s, lex, opts);
  REQUIRE(tagged.size() == 3);
  CHECK(tagged[0].tag == "VERB");
  CHECK(tagged[1].tag == "DET");
  CHECK(tagged[2].tag == "NOUN");
  for (const auto& t : tagged) CHECK(t.domain == 25);
}

TEST_CASE("unknown word falls back to X and no domain") {
  SemanticLexicon lex;
  lex.k = 10;
  UnigramTagger tagger;
  tagger.train({doc_of_sentences({{"the|DET", "cat|NOUN"}})});
  Sample s;
  s.sample_id = "s1";
  s.region = "A";
  s.tokens = {"zzzqq"};
  AnnotateOptions opts;
  opts.source = TagSource::kBuiltinTagger;
  opts.tagger = &tagger;
  auto tagged = annotate_sample(s, lex, opts);
  REQUIRE(tagged.size() == 1);
  CHECK(tagged[0].tag == "X");
  CHECK(tagged[0].domain == kNoDomain);
}

TEST_CASE("annotation output aligns with input length") {
  SemanticLexicon lex;
  lex.k = 5;
  AnnotateOptions opts;
  opts.source = TagSource::kTaggedInput;
  Sample s;
  s.sample_id = "s";
  s.region = "A";
  for (int i = 0; i < 37; ++i) s.tokens.push_back("w" + std::to_string(i) + "|NOUN");
  CHECK(annotate_sample(s, lex, opts).size() == 37);
}

TEST_CASE("malformed tagged input names the offending token") {
  SemanticLexicon lex;
  AnnotateOptions opts;
  opts.source = TagSource::kTaggedInput;
  Sample s;
  s.sample_id = "s9";
  s.region = "A";
  s.tokens = {"fine|NOUN", "broken"};
  try {
    annotate_sample(s, lex, opts);
    FAIL_CHECK("expected annotation error");
  } catch (const std::runtime_error& e) {
    std::string msg = e.what();
    CHECK(msg.find("s9") != std::string::npos);
    CHECK(msg.find("token 2") != std::string::npos);
  }
}

TEST_CASE("explicit token domain wins over lexicon lookup") {
  SemanticLexicon lex;
  lex.k = 100;
  lex.entries = {{"cat", 7}};
  AnnotateOptions opts;
  opts.source = TagSource::kTaggedInput;
  Sample s;
  s.sample_id = "s";
  s.region = "A";
  s.tokens = {"cat|NOUN|42", "cat|NOUN"};
  auto tagged = annotate_sample(s, lex, opts);
  CHECK(tagged[0].domain == 42);
  CHECK(tagged[1].domain == 7);
}

TEST_CASE("unigram tagger picks the most frequent tag") {
  UnigramTagger tagger;
  tagger.train({doc_of_sentences({{"run|VERB", "run|VERB", "run|NOUN"},
                                  {"walk|VERB"}})});
  CHECK(tagger.tag_of("run") == "VERB");
  CHECK(tagger.tag_of("walk") == "VERB");
  CHECK(tagger.tag_of("unseen") == "X");
}

TEST_CASE("tagset membership is enforced") {
  SemanticLexicon lex;
  AnnotateOptions opts;
  opts.source = TagSource::kTaggedInput;
  Sample s;
  s.sample_id = "s";
  s.region = "A";
  s.tokens = {"word|BOGUS"};
  CHECK_THROWS_AS(annotate_sample(s, lex, opts), std::runtime_error);

  opts.tagset = Tagset::custom({"BOGUS", "NOUN"});
  CHECK(annotate_sample(s, lex, opts)[0].tag == "BOGUS");
}
