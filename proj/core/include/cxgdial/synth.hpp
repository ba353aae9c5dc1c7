#ifndef CXGDIAL_SYNTH_HPP
#define CXGDIAL_SYNTH_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cxgdial/corpus.hpp"
#include "cxgdial/grammar.hpp"

namespace cxgdial {

// Generator parameters. The key=value file format accepts:
//   regions=A,B,C,D           n_constructions=200     effect_size=0.2
//   samples_per_region=400    sample_size=2000        seed=7
//   insert_prob=0.35          vocab_size=300          domains=25
//   duplicate=B:A             (B copies A's preference vector; repeatable)
struct SynthSpec {
  std::vector<std::string> regions;
  size_t n_constructions = 20;
  double effect_size = 0.5;
  size_t samples_per_region = 50;
  size_t sample_size = 2000;
  uint64_t seed = 1;
  double insert_prob = 0.35;
  size_t vocab_size = 300;
  size_t domains = 25;
  size_t min_sentence = 8;
  size_t max_sentence = 24;
  std::map<std::string, std::string> duplicate_of;  // region -> source region
};

SynthSpec parse_synth_spec(const std::string& path);

struct SynthOutput {
  std::vector<RawDocument> docs;  // pre-tagged tokens: word|TAG|domain
  Grammar grammar;
  std::vector<std::string> regions;
  // expected instances per emitted token, regions x constructions
  std::vector<std::vector<double>> planted_rates;
};

// Plants per-region multinomial preferences over a known grammar. Each
// construction opens with a dedicated anchor word that background text never
// produces, so scanned instance counts track insertions exactly. Preferences
// follow round-robin assignment: the preferred region draws a construction
// with weight (1 + effect), the rest with (1 - effect); effect 1 confines a
// construction to its preferred region, effect 0 equalizes all regions.
SynthOutput generate_synthetic(const SynthSpec& spec, uint64_t seed);

void save_planted_rates(const std::string& path, const SynthOutput& synth);

}  // namespace cxgdial

#endif  // CXGDIAL_SYNTH_HPP
