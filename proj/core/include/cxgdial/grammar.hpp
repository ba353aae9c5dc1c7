#ifndef CXGDIAL_GRAMMAR_HPP
#define CXGDIAL_GRAMMAR_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "cxgdial/annotate.hpp"

namespace cxgdial {

enum class SlotLevel { kLex, kSyn, kSem };

const char* to_string(SlotLevel level);

// A per-position requirement: exact word (LEX), syntactic tag (SYN), or
// semantic domain id (SEM). kNoDomain never satisfies a SEM constraint.
struct SlotConstraint {
  SlotLevel level = SlotLevel::kLex;
  std::string text;  // word for LEX (lowercased), tag for SYN
  int domain = kNoDomain;

  static SlotConstraint lex(const std::string& word);
  static SlotConstraint syn(const std::string& tag);
  static SlotConstraint sem(int domain);

  bool matches(const TaggedToken& token) const {
    switch (level) {
      case SlotLevel::kLex: return token.word == text;
      case SlotLevel::kSyn: return token.tag == text;
      case SlotLevel::kSem: return token.domain != kNoDomain && token.domain == domain;
    }
    return false;
  }

  bool operator==(const SlotConstraint& o) const {
    return level == o.level && text == o.text && domain == o.domain;
  }

  std::string str() const;  // LEX:word / SYN:TAG / SEM:<int>
};

struct Construction {
  int cid = 0;
  std::vector<SlotConstraint> slots;

  size_t length() const { return slots.size(); }
  bool same_slots(const Construction& o) const { return slots == o.slots; }
};

// Purely syntactic multi-token pattern collapsed to its head token so the
// whole unit can fill one slot.
struct ConstituentRule {
  std::vector<std::string> pattern;  // SYN tags, length >= 2
  size_t head_index = 0;

  bool operator==(const ConstituentRule& o) const {
    return pattern == o.pattern && head_index == o.head_index;
  }
};

struct Grammar {
  std::vector<Construction> constructions;
  std::vector<ConstituentRule> constituents;
  Tagset tagset;
  size_t k = 0;  // semantic domain count

  bool operator==(const Grammar& other) const;
};

struct MatchSpan {
  int cid = 0;
  size_t start = 0;
  size_t end = 0;  // exclusive; end - start == construction length

  bool operator==(const MatchSpan& o) const {
    return cid == o.cid && start == o.start && end == o.end;
  }
};

// Grammar file format: '#tagset=' and '#k=' directives, '#' comments, one
// construction per line as whitespace-separated LEX:/SYN:/SEM: slots, and
// '@constituent SYN:A SYN:B head=<i>' rules. Errors carry line numbers.
Grammar parse_grammar(std::istream& in, const std::string& filename);
Grammar parse_grammar_file(const std::string& path);
std::string serialize_grammar(const Grammar& g);
void save_grammar(const std::string& path, const Grammar& g);

// Greedy left-to-right longest-match replacement of constituent spans by
// their head token. Overlaps resolve leftmost-first, then longest, then by
// rule declaration order. No rules means identity.
std::vector<TaggedToken> collapse_constituents(
    const std::vector<TaggedToken>& tokens,
    const std::vector<ConstituentRule>& rules);

// All contiguous windows (overlapping included) where every slot accepts the
// respective token.
std::vector<MatchSpan> match_construction(const Construction& c,
                                          const std::vector<TaggedToken>& tokens);

// Per-construction instance counts over an already-collapsed token sequence.
std::vector<int> scan_sample(const Grammar& g,
                             const std::vector<TaggedToken>& tokens);

// Drops every construction whose slot sequence is contained in another
// retained construction as a contiguous sub-sequence; duplicates keep their
// first occurrence. Order-stable and idempotent.
std::vector<Construction> horizontal_prune(const std::vector<Construction>& cs);

// Reassigns dense cids 0..n-1 in list order.
void renumber(std::vector<Construction>* cs);

struct GrammarStats {
  size_t n_constructions = 0;
  size_t total_constraints = 0;
  std::map<size_t, size_t> length_histogram;
  std::map<std::string, size_t> constraint_counts;    // LEX/SYN/SEM
  std::map<std::string, double> constraint_percents;  // of total_constraints
};

GrammarStats grammar_stats(const Grammar& g);

uint64_t grammar_checksum(const Grammar& g);  // FNV-1a over serialized text
std::string checksum_hex(uint64_t checksum);

// Precomputed matcher: grammar slot values are interned once so that a scan
// reduces to integer comparisons, with candidate constructions looked up by
// their first slot. scan() equals scan_sample on every input.
class GrammarMatcher {
 public:
  explicit GrammarMatcher(const Grammar& g);

  std::vector<int> scan(const std::vector<TaggedToken>& tokens) const;
  size_t n_constructions() const { return lengths_.size(); }

 private:
  struct CodedToken {
    int32_t word = -1;
    int32_t tag = -1;
    int32_t domain = kNoDomain;
  };
  // slot code: level in the top 2 bits, value id below
  using SlotCode = uint32_t;

  std::vector<CodedToken> encode(const std::vector<TaggedToken>& tokens) const;

  std::unordered_map<std::string, int32_t> words_;
  std::unordered_map<std::string, int32_t> tags_;
  std::vector<std::vector<SlotCode>> coded_;  // per construction
  std::vector<size_t> lengths_;
  std::unordered_map<SlotCode, std::vector<uint32_t>> by_first_slot_;
};

}  // namespace cxgdial

#endif  // CXGDIAL_GRAMMAR_HPP
