#include "cxgdial/annotate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "cxgdial/rng.hpp"

namespace cxgdial {

namespace {

std::string lower_ascii(std::string s) {
  for (char& c : s)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return s;
}

std::string upper_ascii(std::string s) {
  for (char& c : s)
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  return s;
}

bool valid_tag_token(const std::string& tag) {
  if (tag.empty()) return false;
  for (char c : tag)
    if (!((c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_'))
      return false;
  return true;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

Tagset::Tagset(std::vector<std::string> tags) : tags_(std::move(tags)) {
  for (const auto& t : tags_) {
    if (!valid_tag_token(t))
      throw std::invalid_argument("invalid tag token '" + t +
                                  "' (must be uppercase)");
    set_.insert(t);
  }
}

Tagset Tagset::universal() {
  return Tagset({"ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ", "NOUN",
                 "NUM", "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM",
                 "VERB", "X"});
}

Tagset Tagset::custom(std::vector<std::string> tags) {
  if (tags.empty()) throw std::invalid_argument("custom tagset is empty");
  return Tagset(std::move(tags));
}

ParsedToken parse_token(const std::string& raw) {
  ParsedToken out;
  size_t p1 = raw.find('|');
  if (p1 == std::string::npos || p1 == 0) {
    out.word = lower_ascii(raw);
    return out;
  }
  out.word = lower_ascii(raw.substr(0, p1));
  size_t p2 = raw.find('|', p1 + 1);
  std::string tag = p2 == std::string::npos ? raw.substr(p1 + 1)
                                            : raw.substr(p1 + 1, p2 - p1 - 1);
  if (!tag.empty()) {
    out.tag = upper_ascii(tag);
    out.has_tag = true;
  }
  if (p2 != std::string::npos && p2 + 1 < raw.size()) {
    const std::string dom = raw.substr(p2 + 1);
    try {
      size_t used = 0;
      int v = std::stoi(dom, &used);
      if (used != dom.size() || v < 0) throw std::invalid_argument(dom);
      out.domain = v;
      out.has_domain = true;
    } catch (const std::exception&) {
      throw std::invalid_argument("malformed domain field '" + dom +
                                  "' in token '" + raw + "'");
    }
  }
  return out;
}

std::string token_word(const std::string& raw) { return parse_token(raw).word; }

// ---------------------------------------------------------------------------
// Embeddings
// ---------------------------------------------------------------------------

namespace {

// Sparse symmetric matrix in adjacency form, one (col, value) list per row.
struct SparseSym {
  std::vector<std::vector<std::pair<uint32_t, double>>> rows;

  void matvec(const std::vector<double>& v, std::vector<double>* out) const {
    out->assign(rows.size(), 0.0);
    for (size_t i = 0; i < rows.size(); ++i) {
      double acc = 0.0;
      for (const auto& [j, val] : rows[i]) acc += val * v[j];
      (*out)[i] = acc;
    }
  }
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

// Dominant eigenpairs of a sparse symmetric matrix by power iteration with
// deflation. Deterministic: start vectors come from a fixed-seed stream.
void top_eigenpairs(const SparseSym& m, size_t count,
                    std::vector<double>* eigenvalues,
                    std::vector<std::vector<double>>* eigenvectors) {
  const size_t n = m.rows.size();
  eigenvalues->clear();
  eigenvectors->clear();
  Rng rng(0x5eedc0de);
  std::vector<double> v(n), mv(n);
  for (size_t comp = 0; comp < count; ++comp) {
    for (auto& x : v) x = rng.unit() - 0.5;
    // project out previously found components
    auto deflate = [&](std::vector<double>* w) {
      for (size_t j = 0; j < eigenvectors->size(); ++j) {
        double c = dot(*w, (*eigenvectors)[j]);
        for (size_t i = 0; i < n; ++i) (*w)[i] -= c * (*eigenvectors)[j][i];
      }
    };
    deflate(&v);
    double nv = norm(v);
    if (nv == 0.0) break;
    for (auto& x : v) x /= nv;

    double lambda = 0.0;
    for (int iter = 0; iter < 300; ++iter) {
      m.matvec(v, &mv);
      deflate(&mv);
      double new_lambda = dot(v, mv);
      double nm = norm(mv);
      if (nm < 1e-14) {
        lambda = 0.0;
        break;
      }
      for (size_t i = 0; i < n; ++i) mv[i] /= nm;
      double delta = 0.0;
      for (size_t i = 0; i < n; ++i)
        delta = std::max(delta, std::abs(std::abs(mv[i]) - std::abs(v[i])));
      v = mv;
      lambda = new_lambda;
      if (delta < 1e-12 && iter > 2) break;
    }
    // canonical sign: entry of largest magnitude is positive
    size_t arg = 0;
    for (size_t i = 1; i < n; ++i)
      if (std::abs(v[i]) > std::abs(v[arg])) arg = i;
    if (v[arg] < 0)
      for (auto& x : v) x = -x;
    eigenvalues->push_back(lambda);
    eigenvectors->push_back(v);
  }
}

}  // namespace

EmbeddingTable build_cooccurrence_embeddings(const std::vector<RawDocument>& docs,
                                             const EmbeddingConfig& cfg) {
  if (cfg.dim < 1) throw std::invalid_argument("embedding dim must be >= 1");
  if (docs.empty()) throw std::invalid_argument("embedding corpus is empty");

  std::map<std::string, long long> freq;
  for (const auto& doc : docs)
    for (const auto& sent : doc.sentences)
      for (const auto& tok : sent) ++freq[token_word(tok)];

  std::vector<std::string> vocab;
  std::map<std::string, uint32_t> word_id;
  for (const auto& [w, f] : freq) {
    if (f >= static_cast<long long>(cfg.min_count)) {
      word_id[w] = static_cast<uint32_t>(vocab.size());
      vocab.push_back(w);
    }
  }

  EmbeddingTable table;
  if (vocab.empty()) {
    std::cerr << "[warn] no word reaches min_count=" << cfg.min_count
              << "; embedding table is empty\n";
    return table;
  }

  size_t dim = cfg.dim;
  if (dim > vocab.size()) {
    std::cerr << "[warn] dim " << dim << " exceeds vocabulary size "
              << vocab.size() << "; reducing\n";
    dim = vocab.size();
  }

  // symmetric window co-occurrence within sentences
  std::vector<std::map<uint32_t, double>> cooc(vocab.size());
  double total = 0.0;
  std::vector<double> marginal(vocab.size(), 0.0);
  for (const auto& doc : docs) {
    for (const auto& sent : doc.sentences) {
      std::vector<int> ids;
      ids.reserve(sent.size());
      for (const auto& tok : sent) {
        auto it = word_id.find(token_word(tok));
        ids.push_back(it == word_id.end() ? -1 : static_cast<int>(it->second));
      }
      for (size_t i = 0; i < ids.size(); ++i) {
        if (ids[i] < 0) continue;
        size_t hi = std::min(ids.size(), i + cfg.window + 1);
        for (size_t j = i + 1; j < hi; ++j) {
          if (ids[j] < 0) continue;
          auto a = static_cast<uint32_t>(ids[i]);
          auto b = static_cast<uint32_t>(ids[j]);
          cooc[a][b] += 1.0;
          cooc[b][a] += 1.0;
          marginal[a] += 1.0;
          marginal[b] += 1.0;
          total += 2.0;
        }
      }
    }
  }

  SparseSym ppmi;
  ppmi.rows.resize(vocab.size());
  for (size_t i = 0; i < vocab.size(); ++i) {
    for (const auto& [j, c] : cooc[i]) {
      if (marginal[i] == 0.0 || marginal[j] == 0.0) continue;
      double pmi = std::log(c * total / (marginal[i] * marginal[j]));
      if (pmi > 0.0) ppmi.rows[i].emplace_back(j, pmi);
    }
  }

  std::vector<double> eigenvalues;
  std::vector<std::vector<double>> eigenvectors;
  top_eigenpairs(ppmi, dim, &eigenvalues, &eigenvectors);

  table.dim = eigenvalues.size();
  for (size_t w = 0; w < vocab.size(); ++w) {
    std::vector<double> row(table.dim);
    for (size_t j = 0; j < table.dim; ++j)
      row[j] = eigenvectors[j][w] * std::sqrt(std::abs(eigenvalues[j]));
    table.rows[vocab[w]] = std::move(row);
  }
  return table;
}

void save_embeddings(const std::string& path, const EmbeddingTable& table) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write embeddings to " + path);
  for (const auto& [word, vec] : table.rows) {
    out << word;
    for (double v : vec) out << ' ' << format_double(v);
    out << '\n';
  }
}

EmbeddingTable load_embeddings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read embeddings from " + path);
  EmbeddingTable table;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string word;
    ss >> word;
    std::vector<double> vec;
    double v;
    while (ss >> v) vec.push_back(v);
    if (vec.empty() || !std::all_of(vec.begin(), vec.end(), [](double x) {
          return std::isfinite(x);
        }))
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": malformed embedding row");
    if (table.dim == 0) table.dim = vec.size();
    if (vec.size() != table.dim)
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": inconsistent dimensionality");
    table.rows[word] = std::move(vec);
  }
  return table;
}

// ---------------------------------------------------------------------------
// Semantic domains
// ---------------------------------------------------------------------------

SemanticLexicon cluster_domains(const EmbeddingTable& emb, size_t k,
                                uint64_t seed,
                                std::vector<double>* wcss_history) {
  if (emb.rows.empty())
    throw std::invalid_argument("cluster_domains: empty embedding table");
  if (k < 1) throw std::invalid_argument("cluster_domains: k must be >= 1");
  if (k > emb.rows.size())
    throw std::invalid_argument("cluster_domains: k=" + std::to_string(k) +
                                " exceeds vocabulary size " +
                                std::to_string(emb.rows.size()));
  const size_t n = emb.rows.size();
  const size_t d = emb.dim;
  std::vector<std::string> words;
  std::vector<std::vector<double>> x;
  words.reserve(n);
  x.reserve(n);
  for (const auto& [w, row] : emb.rows) {
    words.push_back(w);
    x.push_back(row);
  }

  auto sqdist = [&](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < d; ++i) {
      double diff = a[i] - b[i];
      s += diff * diff;
    }
    return s;
  };

  // farthest-point init: seeded first pick, then maximin
  Rng rng(seed);
  std::vector<std::vector<double>> centers;
  centers.push_back(x[rng.index(n)]);
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  while (centers.size() < k) {
    size_t far = 0;
    double far_d = -1.0;
    for (size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], sqdist(x[i], centers.back()));
      if (nearest[i] > far_d) {
        far_d = nearest[i];
        far = i;
      }
    }
    centers.push_back(x[far]);
  }

  std::vector<int> assign(n, -1);
  auto reassign = [&]() {
    bool changed = false;
    for (size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_d = sqdist(x[i], centers[0]);
      for (size_t c = 1; c < k; ++c) {
        double dist = sqdist(x[i], centers[c]);
        if (dist < best_d) {
          best_d = dist;
          best = static_cast<int>(c);
        }
      }
      if (assign[i] != best) {
        assign[i] = best;
        changed = true;
      }
    }
    return changed;
  };
  auto wcss = [&]() {
    double s = 0.0;
    for (size_t i = 0; i < n; ++i) s += sqdist(x[i], centers[assign[i]]);
    return s;
  };

  reassign();
  if (wcss_history) wcss_history->push_back(wcss());
  for (int iter = 0; iter < 100; ++iter) {
    // update step
    std::vector<std::vector<double>> sums(k, std::vector<double>(d, 0.0));
    std::vector<size_t> sizes(k, 0);
    for (size_t i = 0; i < n; ++i) {
      ++sizes[assign[i]];
      for (size_t j = 0; j < d; ++j) sums[assign[i]][j] += x[i][j];
    }
    for (size_t c = 0; c < k; ++c) {
      if (sizes[c] == 0) continue;  // refilled below
      for (size_t j = 0; j < d; ++j) centers[c][j] = sums[c][j] / sizes[c];
    }
    bool changed = reassign();
    // refill emptied clusters with the globally worst-fitting point
    for (size_t c = 0; c < k; ++c) {
      std::vector<size_t> counts(k, 0);
      for (int a : assign) ++counts[a];
      if (counts[c] > 0) continue;
      size_t far = n;
      double far_d = -1.0;
      for (size_t i = 0; i < n; ++i) {
        if (counts[assign[i]] <= 1) continue;
        double dist = sqdist(x[i], centers[assign[i]]);
        if (dist > far_d) {
          far_d = dist;
          far = i;
        }
      }
      if (far == n) break;
      centers[c] = x[far];
      assign[far] = static_cast<int>(c);
      changed = true;
    }
    if (wcss_history) wcss_history->push_back(wcss());
    if (!changed) break;
  }

  SemanticLexicon lexicon;
  lexicon.k = k;
  lexicon.provenance = "ppmi-factorization dim=" + std::to_string(d) +
                       " vocab=" + std::to_string(n) + " k=" + std::to_string(k) +
                       " seed=" + std::to_string(seed);
  for (size_t i = 0; i < n; ++i) lexicon.entries[words[i]] = assign[i];
  return lexicon;
}

void save_lexicon(const std::string& path, const SemanticLexicon& lexicon) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write lexicon to " + path);
  out << "#k=" << lexicon.k << '\n';
  for (const auto& [word, dom] : lexicon.entries) out << word << '\t' << dom << '\n';
}

SemanticLexicon load_lexicon(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read lexicon from " + path);
  SemanticLexicon lex;
  std::string line;
  size_t line_no = 0;
  bool have_k = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.rfind("#k=", 0) == 0) {
      lex.k = std::stoul(line.substr(3));
      have_k = true;
      continue;
    }
    if (line[0] == '#') continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected word<TAB>domain");
    std::string word = line.substr(0, tab);
    int dom = std::stoi(line.substr(tab + 1));
    if (!have_k)
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": missing #k= header before entries");
    if (dom < 0 || static_cast<size_t>(dom) >= lex.k)
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": domain id " + std::to_string(dom) +
                               " outside [0," + std::to_string(lex.k) + ")");
    lex.entries[word] = dom;
  }
  return lex;
}

// ---------------------------------------------------------------------------
// Tagging and annotation
// ---------------------------------------------------------------------------

void UnigramTagger::train(const std::vector<RawDocument>& tagged_docs) {
  std::map<std::string, std::map<std::string, long long>> counts;
  for (const auto& doc : tagged_docs) {
    for (const auto& sent : doc.sentences) {
      for (const auto& tok : sent) {
        ParsedToken p = parse_token(tok);
        if (!p.has_tag)
          throw std::invalid_argument("tagger training token '" + tok +
                                      "' in document '" + doc.doc_id +
                                      "' lacks |TAG annotation");
        ++counts[p.word][p.tag];
      }
    }
  }
  lexicon_.clear();
  for (const auto& [word, tag_counts] : counts) {
    std::string best;
    long long best_n = -1;
    for (const auto& [tag, n] : tag_counts) {
      if (n > best_n) {  // map order makes ties resolve to the smaller tag
        best_n = n;
        best = tag;
      }
    }
    lexicon_[word] = best;
  }
}

std::string UnigramTagger::tag_of(const std::string& word) const {
  auto it = lexicon_.find(word);
  return it == lexicon_.end() ? "X" : it->second;
}

void UnigramTagger::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write tagger to " + path);
  for (const auto& [word, tag] : lexicon_) out << word << '\t' << tag << '\n';
}

UnigramTagger UnigramTagger::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read tagger from " + path);
  UnigramTagger tagger;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected word<TAB>TAG");
    tagger.lexicon_[line.substr(0, tab)] = line.substr(tab + 1);
  }
  return tagger;
}

std::vector<TaggedToken> annotate_tokens(const std::vector<std::string>& tokens,
                                         const SemanticLexicon& lexicon,
                                         const AnnotateOptions& opts,
                                         const std::string& where) {
  std::vector<TaggedToken> out;
  out.reserve(tokens.size());
  for (size_t i = 0; i < tokens.size(); ++i) {
    ParsedToken p;
    try {
      p = parse_token(tokens[i]);
    } catch (const std::exception& e) {
      throw std::runtime_error(where + ", token " + std::to_string(i + 1) +
                               ": " + e.what());
    }
    TaggedToken t;
    t.word = p.word;
    if (opts.source == TagSource::kTaggedInput) {
      if (!p.has_tag)
        throw std::runtime_error(where + ", token " + std::to_string(i + 1) +
                                 ": '" + tokens[i] +
                                 "' lacks |TAG annotation (tagged-input mode)");
      t.tag = p.tag;
    } else {
      if (opts.tagger == nullptr)
        throw std::invalid_argument("builtin tagger requested but none supplied");
      t.tag = p.has_tag ? p.tag : opts.tagger->tag_of(p.word);
    }
    if (!opts.tagset.contains(t.tag))
      throw std::runtime_error(where + ", token " + std::to_string(i + 1) +
                               ": tag '" + t.tag + "' not in declared tagset");
    t.domain = p.has_domain ? p.domain : lexicon.domain_of(p.word);
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<TaggedToken> annotate_sample(const Sample& sample,
                                         const SemanticLexicon& lexicon,
                                         const AnnotateOptions& opts) {
  return annotate_tokens(sample.tokens, lexicon, opts,
                         "sample '" + sample.sample_id + "'");
}

}  // namespace cxgdial
