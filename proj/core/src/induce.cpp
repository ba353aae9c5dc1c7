#include "cxgdial/induce.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

namespace cxgdial {

namespace {

constexpr char kSep = '\x1f';

// Decodable slot fragments: "Lword", "STAG", "D25", joined by \x1f.
std::string slot_fragment(const SlotConstraint& s) {
  switch (s.level) {
    case SlotLevel::kLex: return "L" + s.text;
    case SlotLevel::kSyn: return "S" + s.text;
    case SlotLevel::kSem: return "D" + std::to_string(s.domain);
  }
  return "?";
}

SlotConstraint decode_fragment(const std::string& frag) {
  if (frag.empty()) throw std::logic_error("empty slot fragment");
  const std::string value = frag.substr(1);
  switch (frag[0]) {
    case 'L': return SlotConstraint::lex(value);
    case 'S': return SlotConstraint::syn(value);
    case 'D': return SlotConstraint::sem(std::stoi(value));
  }
  throw std::logic_error("bad slot fragment '" + frag + "'");
}

std::vector<SlotConstraint> decode_key(const std::string& key) {
  std::vector<SlotConstraint> slots;
  size_t start = 0;
  while (start < key.size()) {
    size_t end = key.find(kSep, start);
    if (end == std::string::npos) end = key.size();
    slots.push_back(decode_fragment(key.substr(start, end - start)));
    start = end + 1;
  }
  return slots;
}

// The level options available at one token position: LEX and SYN always,
// SEM only when the word has a domain.
std::vector<std::string> position_options(const TaggedToken& t) {
  std::vector<std::string> opts;
  opts.push_back("L" + t.word);
  opts.push_back("S" + t.tag);
  if (t.domain != kNoDomain) opts.push_back("D" + std::to_string(t.domain));
  return opts;
}

using CountMap = std::unordered_map<std::string, long long>;

}  // namespace

TransitionCounts TransitionCounts::collect(
    const std::vector<std::vector<TaggedToken>>& samples) {
  TransitionCounts tc;
  for (const auto& tokens : samples) {
    if (tokens.size() < 2) continue;
    std::vector<std::vector<std::string>> opts(tokens.size());
    for (size_t i = 0; i < tokens.size(); ++i) opts[i] = position_options(tokens[i]);
    for (size_t p = 0; p + 1 < tokens.size(); ++p) {
      ++tc.pair_total_;
      for (const auto& cur : opts[p]) {
        ++tc.first_[cur];
        for (const auto& nxt : opts[p + 1]) ++tc.pairs_[cur + kSep + nxt];
      }
      for (const auto& nxt : opts[p + 1]) ++tc.second_[nxt];
    }
  }
  return tc;
}

double TransitionCounts::delta_p(const SlotConstraint& cur,
                                 const SlotConstraint& next) const {
  const std::string cur_key = slot_fragment(cur);
  const std::string next_key = slot_fragment(next);
  auto lookup = [](const CountMap& m, const std::string& k) -> long long {
    auto it = m.find(k);
    return it == m.end() ? 0 : it->second;
  };
  const long long joint = lookup(pairs_, cur_key + kSep + next_key);
  const long long cur_n = lookup(first_, cur_key);
  const long long next_n = lookup(second_, next_key);
  const long long not_cur_n = pair_total_ - cur_n;
  if (cur_n == 0 || not_cur_n == 0) return 0.0;
  const double p_given = static_cast<double>(joint) / static_cast<double>(cur_n);
  const double p_other =
      static_cast<double>(next_n - joint) / static_cast<double>(not_cur_n);
  return p_given - p_other;
}

double score_association(const std::vector<SlotConstraint>& slots,
                         const TransitionCounts& counts) {
  if (slots.size() < 2) return 0.0;
  double sum = 0.0;
  for (size_t i = 0; i + 1 < slots.size(); ++i)
    sum += counts.delta_p(slots[i], slots[i + 1]);
  return sum / static_cast<double>(slots.size() - 1);
}

std::vector<CandidateStats> extract_candidates(
    const std::vector<std::vector<TaggedToken>>& samples,
    const InductionConfig& cfg) {
  if (cfg.min_len < 1 || cfg.min_len > cfg.max_len || cfg.max_len > 6)
    throw std::invalid_argument("induction length bounds must satisfy 1 <= min <= max <= 6");
  std::vector<CandidateStats> out;
  if (samples.empty()) return out;

  std::vector<std::vector<std::vector<std::string>>> opts(samples.size());
  for (size_t s = 0; s < samples.size(); ++s) {
    opts[s].resize(samples[s].size());
    for (size_t i = 0; i < samples[s].size(); ++i)
      opts[s][i] = position_options(samples[s][i]);
  }

  const auto floor = static_cast<long long>(cfg.min_freq);

  // length 1 counts seed the apriori frontier
  std::vector<CountMap> counts(cfg.max_len + 1);
  for (const auto& sample_opts : opts)
    for (const auto& pos : sample_opts)
      for (const auto& frag : pos) ++counts[1][frag];

  for (size_t len = 2; len <= cfg.max_len; ++len) {
    CountMap& level = counts[len];
    for (const auto& sample_opts : opts) {
      if (sample_opts.size() < len) continue;
      for (size_t start = 0; start + len <= sample_opts.size(); ++start) {
        // DFS over per-position level choices, pruning on infrequent prefixes
        struct Frame {
          size_t offset;
          size_t next_option;
          size_t key_len;
        };
        std::string key;
        std::vector<Frame> stack{{0, 0, 0}};
        while (!stack.empty()) {
          Frame& f = stack.back();
          const auto& choices = sample_opts[start + f.offset];
          if (f.next_option >= choices.size()) {
            stack.pop_back();
            if (!stack.empty()) key.resize(stack.back().key_len);
            continue;
          }
          const std::string& frag = choices[f.next_option++];
          key.resize(f.key_len);
          if (f.offset > 0) key.push_back(kSep);
          key += frag;
          if (f.offset + 1 == len) {
            ++level[key];
            key.resize(f.key_len);
            continue;
          }
          // extend only frequent prefixes
          auto it = counts[f.offset + 1].find(key);
          if (it == counts[f.offset + 1].end() || it->second < floor) {
            key.resize(f.key_len);
            continue;
          }
          stack.push_back({f.offset + 1, 0, key.size()});
        }
      }
    }
    // thin the frontier so later levels only extend frequent sequences
    for (auto it = level.begin(); it != level.end();)
      it = it->second < floor ? level.erase(it) : std::next(it);
    if (level.empty()) break;
  }

  TransitionCounts tc = TransitionCounts::collect(samples);

  struct Keyed {
    std::string key;
    CandidateStats stats;
  };
  std::vector<Keyed> keyed;
  for (size_t len = cfg.min_len; len <= cfg.max_len; ++len) {
    for (const auto& [key, freq] : counts[len]) {
      if (freq < floor) continue;
      CandidateStats cs;
      cs.slots = decode_key(key);
      cs.freq = freq;
      cs.assoc = score_association(cs.slots, tc);
      keyed.push_back({key, std::move(cs)});
    }
  }
  std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
    if (a.stats.assoc != b.stats.assoc) return a.stats.assoc > b.stats.assoc;
    if (a.stats.freq != b.stats.freq) return a.stats.freq > b.stats.freq;
    return a.key < b.key;
  });
  out.reserve(keyed.size());
  for (auto& k : keyed) out.push_back(std::move(k.stats));
  return out;
}

Grammar induce_grammar(const std::vector<std::vector<TaggedToken>>& samples,
                       const InductionConfig& cfg, const Tagset& tagset,
                       size_t k) {
  auto candidates = extract_candidates(samples, cfg);

  std::vector<Construction> constructions;
  for (const auto& cand : candidates) {
    if (cand.assoc < cfg.min_assoc) continue;
    if (constructions.size() >= cfg.max_grammar) break;
    Construction c;
    c.cid = static_cast<int>(constructions.size());
    c.slots = cand.slots;
    constructions.push_back(std::move(c));
  }
  constructions = horizontal_prune(constructions);
  renumber(&constructions);

  Grammar g;
  g.tagset = tagset;
  g.k = k;
  g.constructions = std::move(constructions);
  // tokens may carry explicit domains beyond the lexicon's k; the grammar
  // must declare enough domains to round-trip its own SEM slots
  for (const auto& c : g.constructions)
    for (const auto& s : c.slots)
      if (s.level == SlotLevel::kSem && static_cast<size_t>(s.domain) >= g.k)
        g.k = static_cast<size_t>(s.domain) + 1;

  // purely syntactic constructions double as constituent rules
  for (const auto& c : g.constructions) {
    if (c.length() < 2) continue;
    bool all_syn = std::all_of(c.slots.begin(), c.slots.end(), [](const auto& s) {
      return s.level == SlotLevel::kSyn;
    });
    if (!all_syn) continue;
    ConstituentRule rule;
    for (const auto& s : c.slots) rule.pattern.push_back(s.text);
    rule.head_index = rule.pattern.size() - 1;
    for (size_t i = rule.pattern.size(); i-- > 0;) {
      if (rule.pattern[i] == "NOUN") {
        rule.head_index = i;
        break;
      }
      if (rule.pattern[i] == "VERB" && rule.pattern[rule.head_index] != "VERB")
        rule.head_index = i;
    }
    if (std::find(g.constituents.begin(), g.constituents.end(), rule) ==
        g.constituents.end())
      g.constituents.push_back(std::move(rule));
  }
  return g;
}

void write_candidate_audit(const std::string& path,
                           const std::vector<CandidateStats>& candidates) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write candidate audit to " + path);
  out << "slots\tfreq\tassoc\n";
  char buf[32];
  for (const auto& c : candidates) {
    for (size_t i = 0; i < c.slots.size(); ++i)
      out << (i ? " " : "") << c.slots[i].str();
    std::snprintf(buf, sizeof(buf), "%.6f", c.assoc);
    out << '\t' << c.freq << '\t' << buf << '\n';
  }
}

}  // namespace cxgdial
