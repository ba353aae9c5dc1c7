#include <benchmark/benchmark.h>

#include "cxgdial/grammar.hpp"
#include "cxgdial/rng.hpp"

using namespace cxgdial;

namespace {

struct Fixture {
  Grammar grammar;
  std::vector<TaggedToken> tokens;
};

Fixture make_fixture(size_t n_constructions, size_t n_tokens) {
  static const std::vector<std::string> kTags = {"NOUN", "VERB", "ADJ", "DET",
                                                 "ADP", "ADV", "PRON", "AUX"};
  Rng rng(12345);
  Fixture f;
  f.grammar.k = 25;
  std::vector<std::string> words;
  for (int i = 0; i < 400; ++i) words.push_back("w" + std::to_string(i));
  for (size_t c = 0; c < n_constructions; ++c) {
    Construction con;
    con.cid = static_cast<int>(c);
    size_t len = 2 + rng.index(4);
    for (size_t s = 0; s < len; ++s) {
      switch (rng.index(3)) {
        case 0: con.slots.push_back(SlotConstraint::lex(words[rng.index(words.size())])); break;
        case 1: con.slots.push_back(SlotConstraint::syn(kTags[rng.index(kTags.size())])); break;
        default: con.slots.push_back(SlotConstraint::sem(static_cast<int>(rng.index(25))));
      }
    }
    f.grammar.constructions.push_back(std::move(con));
  }
  for (size_t i = 0; i < n_tokens; ++i) {
    size_t w = rng.index(words.size());
    f.tokens.push_back({words[w], kTags[w % kTags.size()],
                        static_cast<int>(w % 25)});
  }
  return f;
}

void BM_ScanSample(benchmark::State& state) {
  auto f = make_fixture(static_cast<size_t>(state.range(0)), 2000);
  GrammarMatcher matcher(f.grammar);
  for (auto _ : state) {
    auto counts = matcher.scan(f.tokens);
    benchmark::DoNotOptimize(counts);
  }
  state.SetItemsProcessed(state.iterations() * 2000);
}
BENCHMARK(BM_ScanSample)->Arg(100)->Arg(500)->Arg(2000);

void BM_MatcherBuild(benchmark::State& state) {
  auto f = make_fixture(static_cast<size_t>(state.range(0)), 10);
  for (auto _ : state) {
    GrammarMatcher matcher(f.grammar);
    benchmark::DoNotOptimize(matcher);
  }
}
BENCHMARK(BM_MatcherBuild)->Arg(500)->Arg(4500);

void BM_CollapseConstituents(benchmark::State& state) {
  auto f = make_fixture(10, 2000);
  std::vector<ConstituentRule> rules = {
      {{"DET", "NOUN"}, 1}, {{"ADJ", "NOUN"}, 1}, {{"ADP", "DET", "NOUN"}, 2}};
  for (auto _ : state) {
    auto collapsed = collapse_constituents(f.tokens, rules);
    benchmark::DoNotOptimize(collapsed);
  }
}
BENCHMARK(BM_CollapseConstituents);

void BM_HorizontalPrune(benchmark::State& state) {
  auto f = make_fixture(static_cast<size_t>(state.range(0)), 10);
  for (auto _ : state) {
    auto pruned = horizontal_prune(f.grammar.constructions);
    benchmark::DoNotOptimize(pruned);
  }
}
BENCHMARK(BM_HorizontalPrune)->Arg(500);

}  // namespace
