#ifndef CXGDIAL_ANNOTATE_HPP
#define CXGDIAL_ANNOTATE_HPP

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "cxgdial/corpus.hpp"

namespace cxgdial {

inline constexpr int kNoDomain = -1;

// Syntactic tag inventory. Defaults to the 17-tag Universal Dependencies
// set; a custom tagset accepts any uppercase token.
class Tagset {
 public:
  Tagset() : Tagset(universal()) {}
  static Tagset universal();
  static Tagset custom(std::vector<std::string> tags);

  bool contains(const std::string& tag) const { return set_.count(tag) > 0; }
  const std::vector<std::string>& tags() const { return tags_; }
  bool operator==(const Tagset& other) const { return tags_ == other.tags_; }

 private:
  explicit Tagset(std::vector<std::string> tags);
  std::vector<std::string> tags_;
  std::set<std::string> set_;
};

// Three-level token annotation: lexical form (lowercased), syntactic tag,
// semantic domain id (kNoDomain when the word is not in the lexicon).
struct TaggedToken {
  std::string word;
  std::string tag;
  int domain = kNoDomain;

  bool operator==(const TaggedToken& o) const {
    return word == o.word && tag == o.tag && domain == o.domain;
  }
};

// Split of an inline-annotated token string. word|TAG|domain and word|TAG
// forms carry annotation; a bare token is just a word.
struct ParsedToken {
  std::string word;
  std::string tag;
  int domain = kNoDomain;
  bool has_tag = false;
  bool has_domain = false;
};
ParsedToken parse_token(const std::string& raw);

// Lowercased word form of a possibly annotated token string.
std::string token_word(const std::string& raw);

struct EmbeddingConfig {
  size_t dim = 500;
  size_t window = 5;
  size_t min_count = 5;
};

struct EmbeddingTable {
  size_t dim = 0;
  std::map<std::string, std::vector<double>> rows;
};

// Distributional word vectors: positive PMI over symmetric window
// co-occurrence, factorized to the top-dim components (eigenvectors of the
// PPMI matrix scaled by sqrt(|eigenvalue|)). Words below min_count are
// skipped; dim larger than the vocabulary is reduced with a warning.
EmbeddingTable build_cooccurrence_embeddings(const std::vector<RawDocument>& docs,
                                             const EmbeddingConfig& cfg);

void save_embeddings(const std::string& path, const EmbeddingTable& table);
EmbeddingTable load_embeddings(const std::string& path);

struct SemanticLexicon {
  size_t k = 0;
  std::map<std::string, int> entries;  // word -> domain in [0, k)
  std::string provenance;

  int domain_of(const std::string& word) const {
    auto it = entries.find(word);
    return it == entries.end() ? kNoDomain : it->second;
  }
};

// K-means over embedding rows: seeded farthest-point initialization, Lloyd
// iteration until assignments are stable or 100 iterations. Emptied clusters
// are refilled with the point farthest from its center, so all k domain ids
// stay populated. wcss_history, when given, records the within-cluster sum
// of squares after every iteration.
SemanticLexicon cluster_domains(const EmbeddingTable& emb, size_t k,
                                uint64_t seed,
                                std::vector<double>* wcss_history = nullptr);

// TSV with a "#k=<int>" header line, then word<TAB>domain rows.
void save_lexicon(const std::string& path, const SemanticLexicon& lexicon);
SemanticLexicon load_lexicon(const std::string& path);

// Frequency-lexicon unigram tagger; the fallback tag is X.
class UnigramTagger {
 public:
  void train(const std::vector<RawDocument>& tagged_docs);
  std::string tag_of(const std::string& word) const;

  void save(const std::string& path) const;
  static UnigramTagger load(const std::string& path);

 private:
  std::map<std::string, std::string> lexicon_;
};

enum class TagSource { kTaggedInput, kBuiltinTagger };

struct AnnotateOptions {
  TagSource source = TagSource::kTaggedInput;
  const UnigramTagger* tagger = nullptr;  // required for kBuiltinTagger
  Tagset tagset;
};

// Annotates raw token strings at all three levels. In tagged-input mode each
// token must carry word|TAG; missing or malformed annotation is an error
// naming the offending token. An explicit |domain wins over lexicon lookup.
std::vector<TaggedToken> annotate_tokens(const std::vector<std::string>& tokens,
                                         const SemanticLexicon& lexicon,
                                         const AnnotateOptions& opts,
                                         const std::string& where);

std::vector<TaggedToken> annotate_sample(const Sample& sample,
                                         const SemanticLexicon& lexicon,
                                         const AnnotateOptions& opts);

}  // namespace cxgdial

#endif  // CXGDIAL_ANNOTATE_HPP
