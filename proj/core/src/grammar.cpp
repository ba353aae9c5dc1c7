#include "cxgdial/grammar.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace cxgdial {

namespace {

std::string lower_ascii(std::string s) {
  for (char& c : s)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return s;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

[[noreturn]] void parse_fail(const std::string& filename, size_t line_no,
                             const std::string& msg) {
  throw std::runtime_error(filename + ":" + std::to_string(line_no) + ": " + msg);
}

}  // namespace

const char* to_string(SlotLevel level) {
  switch (level) {
    case SlotLevel::kLex: return "LEX";
    case SlotLevel::kSyn: return "SYN";
    case SlotLevel::kSem: return "SEM";
  }
  return "?";
}

SlotConstraint SlotConstraint::lex(const std::string& word) {
  SlotConstraint s;
  s.level = SlotLevel::kLex;
  s.text = lower_ascii(word);
  return s;
}

SlotConstraint SlotConstraint::syn(const std::string& tag) {
  SlotConstraint s;
  s.level = SlotLevel::kSyn;
  s.text = tag;
  return s;
}

SlotConstraint SlotConstraint::sem(int domain) {
  SlotConstraint s;
  s.level = SlotLevel::kSem;
  s.domain = domain;
  return s;
}

std::string SlotConstraint::str() const {
  switch (level) {
    case SlotLevel::kLex: return "LEX:" + text;
    case SlotLevel::kSyn: return "SYN:" + text;
    case SlotLevel::kSem: return "SEM:" + std::to_string(domain);
  }
  return "?";
}

bool Grammar::operator==(const Grammar& other) const {
  if (k != other.k || !(tagset == other.tagset)) return false;
  if (constituents.size() != other.constituents.size()) return false;
  for (size_t i = 0; i < constituents.size(); ++i)
    if (!(constituents[i] == other.constituents[i])) return false;
  if (constructions.size() != other.constructions.size()) return false;
  for (size_t i = 0; i < constructions.size(); ++i) {
    if (constructions[i].cid != other.constructions[i].cid) return false;
    if (!(constructions[i].slots == other.constructions[i].slots)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Parsing / serialization
// ---------------------------------------------------------------------------

namespace {

SlotConstraint parse_slot(const std::string& tok, const Grammar& g,
                          const std::string& filename, size_t line_no) {
  size_t colon = tok.find(':');
  if (colon == std::string::npos)
    parse_fail(filename, line_no, "slot '" + tok + "' lacks a LEX:/SYN:/SEM: prefix");
  std::string prefix = tok.substr(0, colon);
  std::string value = tok.substr(colon + 1);
  if (value.empty())
    parse_fail(filename, line_no, "slot '" + tok + "' has an empty value");
  if (prefix == "LEX") return SlotConstraint::lex(value);
  if (prefix == "SYN") {
    if (!g.tagset.contains(value))
      parse_fail(filename, line_no, "tag '" + value + "' not in declared tagset");
    return SlotConstraint::syn(value);
  }
  if (prefix == "SEM") {
    int dom = 0;
    try {
      size_t used = 0;
      dom = std::stoi(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      parse_fail(filename, line_no, "domain id '" + value + "' is not an integer");
    }
    if (dom < 0 || static_cast<size_t>(dom) >= g.k)
      parse_fail(filename, line_no,
                 "domain id " + std::to_string(dom) + " outside [0," +
                     std::to_string(g.k) + ") (declare #k=)");
    return SlotConstraint::sem(dom);
  }
  parse_fail(filename, line_no, "unknown level prefix '" + prefix + "'");
}

}  // namespace

Grammar parse_grammar(std::istream& in, const std::string& filename) {
  Grammar g;
  std::string line;
  size_t line_no = 0;
  bool saw_body = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.rfind("#tagset=", 0) == 0) {
      if (saw_body)
        parse_fail(filename, line_no, "#tagset= must precede constructions");
      std::vector<std::string> tags;
      std::string item;
      std::istringstream ss(line.substr(8));
      while (std::getline(ss, item, ','))
        if (!item.empty()) tags.push_back(item);
      try {
        g.tagset = Tagset::custom(tags);
      } catch (const std::exception& e) {
        parse_fail(filename, line_no, e.what());
      }
      continue;
    }
    if (line.rfind("#k=", 0) == 0) {
      if (saw_body) parse_fail(filename, line_no, "#k= must precede constructions");
      try {
        g.k = std::stoul(line.substr(3));
      } catch (const std::exception&) {
        parse_fail(filename, line_no, "invalid #k= value");
      }
      if (g.k > (1u << 30))
        parse_fail(filename, line_no, "#k= exceeds the supported domain count");
      continue;
    }
    if (line[0] == '#') continue;

    auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    saw_body = true;

    if (tokens[0] == "@constituent") {
      ConstituentRule rule;
      bool have_head = false;
      for (size_t i = 1; i < tokens.size(); ++i) {
        if (tokens[i].rfind("head=", 0) == 0) {
          try {
            rule.head_index = std::stoul(tokens[i].substr(5));
          } catch (const std::exception&) {
            parse_fail(filename, line_no, "invalid head= value");
          }
          have_head = true;
          continue;
        }
        SlotConstraint s = parse_slot(tokens[i], g, filename, line_no);
        if (s.level != SlotLevel::kSyn)
          parse_fail(filename, line_no, "constituent patterns must be purely SYN");
        rule.pattern.push_back(s.text);
      }
      if (!have_head) parse_fail(filename, line_no, "constituent rule lacks head=");
      if (rule.pattern.size() < 2)
        parse_fail(filename, line_no, "constituent pattern must have >= 2 units");
      if (rule.head_index >= rule.pattern.size())
        parse_fail(filename, line_no, "head index " +
                                          std::to_string(rule.head_index) +
                                          " outside pattern");
      g.constituents.push_back(std::move(rule));
      continue;
    }

    Construction c;
    c.cid = static_cast<int>(g.constructions.size());
    for (const auto& tok : tokens)
      c.slots.push_back(parse_slot(tok, g, filename, line_no));
    g.constructions.push_back(std::move(c));
  }
  return g;
}

Grammar parse_grammar_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read grammar from " + path);
  return parse_grammar(in, path);
}

std::string serialize_grammar(const Grammar& g) {
  std::ostringstream out;
  out << "#tagset=";
  const auto& tags = g.tagset.tags();
  for (size_t i = 0; i < tags.size(); ++i) out << (i ? "," : "") << tags[i];
  out << '\n';
  out << "#k=" << g.k << '\n';
  for (const auto& c : g.constructions) {
    for (size_t i = 0; i < c.slots.size(); ++i)
      out << (i ? " " : "") << c.slots[i].str();
    out << '\n';
  }
  for (const auto& rule : g.constituents) {
    out << "@constituent";
    for (const auto& tag : rule.pattern) out << " SYN:" << tag;
    out << " head=" << rule.head_index << '\n';
  }
  return out.str();
}

void save_grammar(const std::string& path, const Grammar& g) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write grammar to " + path);
  out << serialize_grammar(g);
}

// ---------------------------------------------------------------------------
// Collapsing, matching, pruning
// ---------------------------------------------------------------------------

std::vector<TaggedToken> collapse_constituents(
    const std::vector<TaggedToken>& tokens,
    const std::vector<ConstituentRule>& rules) {
  if (rules.empty()) return tokens;
  std::vector<TaggedToken> out;
  out.reserve(tokens.size());
  size_t i = 0;
  while (i < tokens.size()) {
    const ConstituentRule* best = nullptr;
    for (const auto& rule : rules) {
      if (i + rule.pattern.size() > tokens.size()) continue;
      bool ok = true;
      for (size_t j = 0; j < rule.pattern.size(); ++j) {
        if (tokens[i + j].tag != rule.pattern[j]) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      if (best == nullptr || rule.pattern.size() > best->pattern.size())
        best = &rule;  // longest wins; earlier rule wins on equal length
    }
    if (best != nullptr) {
      out.push_back(tokens[i + best->head_index]);
      i += best->pattern.size();
    } else {
      out.push_back(tokens[i]);
      ++i;
    }
  }
  return out;
}

std::vector<MatchSpan> match_construction(const Construction& c,
                                          const std::vector<TaggedToken>& tokens) {
  std::vector<MatchSpan> spans;
  const size_t len = c.slots.size();
  if (len == 0 || tokens.size() < len) return spans;
  for (size_t start = 0; start + len <= tokens.size(); ++start) {
    bool ok = true;
    for (size_t i = 0; i < len; ++i) {
      if (!c.slots[i].matches(tokens[start + i])) {
        ok = false;
        break;
      }
    }
    if (ok) spans.push_back(MatchSpan{c.cid, start, start + len});
  }
  return spans;
}

std::vector<int> scan_sample(const Grammar& g,
                             const std::vector<TaggedToken>& tokens) {
  return GrammarMatcher(g).scan(tokens);
}

std::vector<Construction> horizontal_prune(const std::vector<Construction>& cs) {
  // dedup, keeping the first occurrence of each slot sequence
  std::vector<const Construction*> unique;
  std::vector<bool> is_dup(cs.size(), false);
  for (size_t i = 0; i < cs.size(); ++i) {
    bool dup = false;
    for (const auto* u : unique) {
      if (u->same_slots(cs[i])) {
        dup = true;
        break;
      }
    }
    is_dup[i] = dup;
    if (!dup) unique.push_back(&cs[i]);
  }

  auto contained_in = [](const Construction& inner, const Construction& outer) {
    if (inner.slots.size() >= outer.slots.size()) return false;
    return std::search(outer.slots.begin(), outer.slots.end(),
                       inner.slots.begin(), inner.slots.end()) != outer.slots.end();
  };

  std::vector<Construction> kept;
  for (size_t i = 0; i < cs.size(); ++i) {
    if (is_dup[i]) continue;
    bool contained = false;
    for (const auto* u : unique) {
      if (u != &cs[i] && contained_in(cs[i], *u)) {
        contained = true;
        break;
      }
    }
    if (!contained) kept.push_back(cs[i]);
  }
  return kept;
}

void renumber(std::vector<Construction>* cs) {
  for (size_t i = 0; i < cs->size(); ++i) (*cs)[i].cid = static_cast<int>(i);
}

GrammarStats grammar_stats(const Grammar& g) {
  GrammarStats stats;
  stats.n_constructions = g.constructions.size();
  stats.constraint_counts = {{"LEX", 0}, {"SYN", 0}, {"SEM", 0}};
  for (const auto& c : g.constructions) {
    ++stats.length_histogram[c.length()];
    stats.total_constraints += c.length();
    for (const auto& s : c.slots) ++stats.constraint_counts[to_string(s.level)];
  }
  for (const auto& [level, n] : stats.constraint_counts)
    stats.constraint_percents[level] =
        stats.total_constraints == 0
            ? 0.0
            : 100.0 * static_cast<double>(n) / static_cast<double>(stats.total_constraints);
  return stats;
}

uint64_t grammar_checksum(const Grammar& g) {
  const std::string text = serialize_grammar(g);
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string checksum_hex(uint64_t checksum) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(checksum));
  return buf;
}

// ---------------------------------------------------------------------------
// GrammarMatcher
// ---------------------------------------------------------------------------

namespace {

constexpr uint32_t kLevelShift = 30;
constexpr uint32_t kValueMask = (1u << kLevelShift) - 1;

uint32_t make_code(SlotLevel level, uint32_t value) {
  return (static_cast<uint32_t>(level) << kLevelShift) | (value & kValueMask);
}

}  // namespace

GrammarMatcher::GrammarMatcher(const Grammar& g) {
  auto intern = [](std::unordered_map<std::string, int32_t>& table,
                   const std::string& key) {
    return table.emplace(key, static_cast<int32_t>(table.size())).first->second;
  };
  coded_.reserve(g.constructions.size());
  for (const auto& c : g.constructions) {
    std::vector<SlotCode> codes;
    codes.reserve(c.slots.size());
    for (const auto& s : c.slots) {
      switch (s.level) {
        case SlotLevel::kLex:
          codes.push_back(make_code(s.level,
                                    static_cast<uint32_t>(intern(words_, s.text))));
          break;
        case SlotLevel::kSyn:
          codes.push_back(make_code(s.level,
                                    static_cast<uint32_t>(intern(tags_, s.text))));
          break;
        case SlotLevel::kSem:
          codes.push_back(make_code(s.level, static_cast<uint32_t>(s.domain)));
          break;
      }
    }
    lengths_.push_back(codes.size());
    if (!codes.empty())
      by_first_slot_[codes[0]].push_back(static_cast<uint32_t>(coded_.size()));
    coded_.push_back(std::move(codes));
  }
}

std::vector<GrammarMatcher::CodedToken> GrammarMatcher::encode(
    const std::vector<TaggedToken>& tokens) const {
  std::vector<CodedToken> coded(tokens.size());
  for (size_t i = 0; i < tokens.size(); ++i) {
    CodedToken t;
    auto w = words_.find(tokens[i].word);
    t.word = w == words_.end() ? -1 : w->second;
    auto tg = tags_.find(tokens[i].tag);
    t.tag = tg == tags_.end() ? -1 : tg->second;
    t.domain = tokens[i].domain;
    coded[i] = t;
  }
  return coded;
}

std::vector<int> GrammarMatcher::scan(const std::vector<TaggedToken>& tokens) const {
  std::vector<int> counts(coded_.size(), 0);
  const auto coded = encode(tokens);
  const size_t n = coded.size();

  auto slot_ok = [](SlotCode code, const CodedToken& t) {
    const uint32_t value = code & kValueMask;
    switch (static_cast<SlotLevel>(code >> kLevelShift)) {
      case SlotLevel::kLex:
        return t.word >= 0 && static_cast<uint32_t>(t.word) == value;
      case SlotLevel::kSyn:
        return t.tag >= 0 && static_cast<uint32_t>(t.tag) == value;
      case SlotLevel::kSem:
        return t.domain >= 0 && static_cast<uint32_t>(t.domain) == value;
    }
    return false;
  };

  auto try_candidates = [&](SlotCode first, size_t pos) {
    auto it = by_first_slot_.find(first);
    if (it == by_first_slot_.end()) return;
    for (uint32_t ci : it->second) {
      const auto& slots = coded_[ci];
      if (pos + slots.size() > n) continue;
      bool ok = true;
      for (size_t j = 1; j < slots.size(); ++j) {
        if (!slot_ok(slots[j], coded[pos + j])) {
          ok = false;
          break;
        }
      }
      if (ok) ++counts[ci];
    }
  };

  for (size_t pos = 0; pos < n; ++pos) {
    const CodedToken& t = coded[pos];
    if (t.word >= 0)
      try_candidates(make_code(SlotLevel::kLex, static_cast<uint32_t>(t.word)), pos);
    if (t.tag >= 0)
      try_candidates(make_code(SlotLevel::kSyn, static_cast<uint32_t>(t.tag)), pos);
    if (t.domain >= 0)
      try_candidates(make_code(SlotLevel::kSem, static_cast<uint32_t>(t.domain)), pos);
  }
  return counts;
}

}  // namespace cxgdial
