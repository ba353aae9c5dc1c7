#include "cxgdial/synth.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "cxgdial/rng.hpp"

namespace cxgdial {

namespace {

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(s);
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

SynthSpec parse_synth_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read synth spec from " + path);
  SynthSpec spec;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected key=value");
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    try {
      if (key == "regions") spec.regions = split_commas(value);
      else if (key == "n_constructions") spec.n_constructions = std::stoul(value);
      else if (key == "effect_size") spec.effect_size = std::stod(value);
      else if (key == "samples_per_region") spec.samples_per_region = std::stoul(value);
      else if (key == "sample_size") spec.sample_size = std::stoul(value);
      else if (key == "seed") spec.seed = std::stoull(value);
      else if (key == "insert_prob") spec.insert_prob = std::stod(value);
      else if (key == "vocab_size") spec.vocab_size = std::stoul(value);
      else if (key == "domains") spec.domains = std::stoul(value);
      else if (key == "min_sentence") spec.min_sentence = std::stoul(value);
      else if (key == "max_sentence") spec.max_sentence = std::stoul(value);
      else if (key == "duplicate") {
        size_t colon = value.find(':');
        if (colon == std::string::npos)
          throw std::invalid_argument("duplicate wants REGION:SOURCE");
        spec.duplicate_of[value.substr(0, colon)] = value.substr(colon + 1);
      } else {
        throw std::invalid_argument("unknown key '" + key + "'");
      }
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " +
                               e.what());
    }
  }
  return spec;
}

namespace {

struct VocabWord {
  std::string word;
  std::string tag;
  int domain;

  std::string annotated() const {
    return word + "|" + tag + "|" + std::to_string(domain);
  }
};

}  // namespace

SynthOutput generate_synthetic(const SynthSpec& spec, uint64_t seed) {
  if (spec.effect_size < 0.0 || spec.effect_size > 1.0)
    throw std::invalid_argument("effect_size must be within [0,1], got " +
                                std::to_string(spec.effect_size));
  if (spec.regions.empty()) throw std::invalid_argument("no regions declared");
  if (spec.n_constructions < 1)
    throw std::invalid_argument("n_constructions must be >= 1");
  if (spec.vocab_size < 1) throw std::invalid_argument("vocab_size must be >= 1");
  if (spec.domains < 1) throw std::invalid_argument("domains must be >= 1");
  if (spec.insert_prob < 0.0 || spec.insert_prob >= 1.0)
    throw std::invalid_argument("insert_prob must be within [0,1)");
  if (spec.min_sentence < 1 || spec.min_sentence > spec.max_sentence)
    throw std::invalid_argument("sentence length bounds are invalid");
  {
    std::set<std::string> unique(spec.regions.begin(), spec.regions.end());
    if (unique.size() != spec.regions.size())
      throw std::invalid_argument("duplicate region in spec");
  }
  for (const auto& [dup, src] : spec.duplicate_of) {
    auto known = [&](const std::string& r) {
      return std::find(spec.regions.begin(), spec.regions.end(), r) !=
             spec.regions.end();
    };
    if (!known(dup) || !known(src))
      throw std::invalid_argument("duplicate entry '" + dup + ":" + src +
                                  "' names an unknown region");
    if (spec.duplicate_of.count(src))
      throw std::invalid_argument("duplicate source '" + src +
                                  "' is itself a duplicate");
  }

  const Tagset tagset = Tagset::universal();
  const auto& tags = tagset.tags();

  // background vocabulary: every word owns a fixed tag and domain
  std::vector<VocabWord> vocab(spec.vocab_size);
  std::vector<std::vector<size_t>> words_of_tag(tags.size());
  std::vector<std::vector<size_t>> words_of_domain(spec.domains);
  for (size_t i = 0; i < spec.vocab_size; ++i) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "w%04zu", i);
    vocab[i].word = buf;
    vocab[i].tag = tags[i % tags.size()];
    vocab[i].domain = static_cast<int>(i % spec.domains);
    words_of_tag[i % tags.size()].push_back(i);
    words_of_domain[i % spec.domains].push_back(i);
  }
  std::vector<size_t> usable_tags, usable_domains;
  for (size_t t = 0; t < tags.size(); ++t)
    if (!words_of_tag[t].empty()) usable_tags.push_back(t);
  for (size_t d = 0; d < spec.domains; ++d)
    if (!words_of_domain[d].empty()) usable_domains.push_back(d);
  std::map<std::string, size_t> word_index;
  for (size_t i = 0; i < vocab.size(); ++i) word_index[vocab[i].word] = i;

  // constructions: anchor LEX slot, then random mixed-level slots
  Rng grammar_rng(mix_seed(seed, 0x9e37));
  SynthOutput out;
  out.regions = spec.regions;
  out.grammar.tagset = tagset;
  out.grammar.k = spec.domains;
  std::vector<VocabWord> anchors(spec.n_constructions);
  for (size_t c = 0; c < spec.n_constructions; ++c) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "xc%04zu", c);
    anchors[c].word = buf;
    anchors[c].tag = tags[c % tags.size()];
    anchors[c].domain = static_cast<int>(c % spec.domains);

    Construction con;
    con.cid = static_cast<int>(c);
    con.slots.push_back(SlotConstraint::lex(anchors[c].word));
    size_t len = 2 + grammar_rng.index(4);  // 2..5 slots
    for (size_t s = 1; s < len; ++s) {
      double u = grammar_rng.unit();
      if (u < 1.0 / 3.0) {
        con.slots.push_back(
            SlotConstraint::lex(vocab[grammar_rng.index(vocab.size())].word));
      } else if (u < 2.0 / 3.0) {
        size_t t = usable_tags[grammar_rng.index(usable_tags.size())];
        con.slots.push_back(SlotConstraint::syn(tags[t]));
      } else {
        size_t d = usable_domains[grammar_rng.index(usable_domains.size())];
        con.slots.push_back(SlotConstraint::sem(static_cast<int>(d)));
      }
    }
    out.grammar.constructions.push_back(std::move(con));
  }

  // region preference vectors: round-robin preferred region, 1 +/- effect
  const size_t n_regions = spec.regions.size();
  const size_t n_cons = spec.n_constructions;
  std::vector<std::vector<double>> pref(n_regions, std::vector<double>(n_cons));
  for (size_t r = 0; r < n_regions; ++r) {
    double z = 0.0;
    for (size_t c = 0; c < n_cons; ++c) {
      double w = (c % n_regions == r) ? 1.0 + spec.effect_size
                                      : 1.0 - spec.effect_size;
      pref[r][c] = w;
      z += w;
    }
    if (z <= 0.0) throw std::invalid_argument("degenerate preference vector");
    for (double& w : pref[r]) w /= z;
  }
  for (const auto& [dup, src] : spec.duplicate_of) {
    size_t di = std::find(spec.regions.begin(), spec.regions.end(), dup) -
                spec.regions.begin();
    size_t si = std::find(spec.regions.begin(), spec.regions.end(), src) -
                spec.regions.begin();
    pref[di] = pref[si];
  }

  // expected instances per token: q * P_r(c) / E[tokens per emission step]
  out.planted_rates.assign(n_regions, std::vector<double>(n_cons, 0.0));
  const double q = spec.insert_prob;
  for (size_t r = 0; r < n_regions; ++r) {
    double mean_len = 0.0;
    for (size_t c = 0; c < n_cons; ++c)
      mean_len += pref[r][c] *
                  static_cast<double>(out.grammar.constructions[c].length());
    const double tokens_per_step = q * mean_len + (1.0 - q);
    for (size_t c = 0; c < n_cons; ++c)
      out.planted_rates[r][c] = q * pref[r][c] / tokens_per_step;
  }

  // emit pre-tagged documents per region
  constexpr size_t kSentencesPerDoc = 200;
  for (size_t r = 0; r < n_regions; ++r) {
    Rng rng(mix_seed(seed, 1000 + r));
    std::vector<double> cumulative(n_cons);
    double acc = 0.0;
    for (size_t c = 0; c < n_cons; ++c) {
      acc += pref[r][c];
      cumulative[c] = acc;
    }

    const size_t budget = spec.samples_per_region * spec.sample_size;
    size_t emitted = 0;
    size_t doc_index = 0;
    RawDocument doc;
    auto open_doc = [&]() {
      doc = RawDocument{};
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%s_doc%03zu", spec.regions[r].c_str(),
                    doc_index++);
      doc.doc_id = buf;
      doc.region = spec.regions[r];
    };
    open_doc();

    while (emitted < budget) {
      size_t target = spec.min_sentence +
                      rng.index(spec.max_sentence - spec.min_sentence + 1);
      std::vector<std::string> sentence;
      while (sentence.size() < target) {
        if (rng.unit() < q) {
          double u = rng.unit() * acc;
          size_t c = std::lower_bound(cumulative.begin(), cumulative.end(), u) -
                     cumulative.begin();
          if (c >= n_cons) c = n_cons - 1;
          for (const auto& slot : out.grammar.constructions[c].slots) {
            switch (slot.level) {
              case SlotLevel::kLex: {
                if (slot.text == anchors[c].word) {
                  sentence.push_back(anchors[c].annotated());
                } else {
                  // fixed lexical slot over a background word
                  sentence.push_back(vocab[word_index.at(slot.text)].annotated());
                }
                break;
              }
              case SlotLevel::kSyn: {
                size_t t = std::find(tags.begin(), tags.end(), slot.text) -
                           tags.begin();
                const auto& pool = words_of_tag[t];
                sentence.push_back(vocab[pool[rng.index(pool.size())]].annotated());
                break;
              }
              case SlotLevel::kSem: {
                const auto& pool = words_of_domain[slot.domain];
                sentence.push_back(vocab[pool[rng.index(pool.size())]].annotated());
                break;
              }
            }
          }
        } else {
          sentence.push_back(vocab[rng.index(vocab.size())].annotated());
        }
      }
      emitted += sentence.size();
      doc.sentences.push_back(std::move(sentence));
      if (doc.sentences.size() >= kSentencesPerDoc) {
        out.docs.push_back(std::move(doc));
        open_doc();
      }
    }
    if (!doc.sentences.empty()) out.docs.push_back(std::move(doc));
  }
  return out;
}

void save_planted_rates(const std::string& path, const SynthOutput& synth) {
  nlohmann::json j;
  j["regions"] = synth.regions;
  j["n_constructions"] = synth.grammar.constructions.size();
  j["rates"] = synth.planted_rates;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write planted rates to " + path);
  out << j.dump(2) << '\n';
}

}  // namespace cxgdial
