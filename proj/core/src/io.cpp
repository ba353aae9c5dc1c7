#include "cxgdial/io.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fs = std::filesystem;
using nlohmann::json;

namespace cxgdial {

std::vector<RawDocument> load_corpus_dir(const std::string& root) {
  if (!fs::is_directory(root))
    throw std::runtime_error("corpus directory not found: " + root);
  std::vector<std::string> regions;
  for (const auto& entry : fs::directory_iterator(root))
    if (entry.is_directory()) regions.push_back(entry.path().filename().string());
  std::sort(regions.begin(), regions.end());
  if (regions.empty())
    throw std::runtime_error("corpus directory has no region subdirectories: " + root);

  std::vector<RawDocument> docs;
  for (const auto& region : regions) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(fs::path(root) / region))
      if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& file : files)
      docs.push_back(load_document(file.string(), region,
                                   region + "/" + file.filename().string()));
  }
  return docs;
}

RawDocument load_document(const std::string& path, const std::string& region,
                          const std::string& doc_id) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read document " + path);
  RawDocument doc;
  doc.doc_id = doc_id;
  doc.region = region;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> tokens;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) tokens.push_back(tok);
    if (!tokens.empty()) doc.sentences.push_back(std::move(tokens));
  }
  return doc;
}

void save_corpus_dir(const std::string& root,
                     const std::vector<RawDocument>& docs) {
  for (const auto& doc : docs) {
    fs::path dir = fs::path(root) / doc.region;
    fs::create_directories(dir);
    std::string name = doc.doc_id;
    if (auto slash = name.rfind('/'); slash != std::string::npos)
      name = name.substr(slash + 1);
    if (name.find('.') == std::string::npos) name += ".txt";
    std::ofstream out(dir / name);
    if (!out) throw std::runtime_error("cannot write document " + (dir / name).string());
    for (const auto& sentence : doc.sentences) {
      for (size_t i = 0; i < sentence.size(); ++i)
        out << (i ? " " : "") << sentence[i];
      out << '\n';
    }
  }
}

void save_samples_jsonl(const std::string& path,
                        const std::vector<Sample>& samples) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write samples to " + path);
  for (const auto& s : samples) {
    json j;
    j["sample_id"] = s.sample_id;
    j["region"] = s.region;
    j["tokens"] = s.tokens;
    j["provenance"] = s.provenance;
    out << j.dump() << '\n';
  }
}

std::vector<Sample> load_samples_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read samples from " + path);
  std::vector<Sample> samples;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      json j = json::parse(line);
      Sample s;
      s.sample_id = j.at("sample_id").get<std::string>();
      s.region = j.at("region").get<std::string>();
      s.tokens = j.at("tokens").get<std::vector<std::string>>();
      if (j.contains("provenance"))
        s.provenance = j.at("provenance").get<std::vector<std::string>>();
      samples.push_back(std::move(s));
    } catch (const json::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " +
                               e.what());
    }
  }
  return samples;
}

void save_features(const std::string& path, const FeatureMatrix& m,
                   const std::string& grammar_checksum) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write features to " + path);
  json header;
  header["type"] = "features";
  header["regions"] = m.regions;
  header["n_features"] = m.n_features;
  header["normalization"] = to_string(m.normalization);
  header["grammar_checksum"] = grammar_checksum;
  out << header.dump() << '\n';
  for (size_t i = 0; i < m.rows(); ++i) {
    json j;
    j["sample_id"] = m.sample_ids[i];
    j["region"] = m.labels[i];
    auto row = m.row(i);
    std::vector<long long> counts(row.begin(), row.end());
    j["counts"] = counts;
    out << j.dump() << '\n';
  }
}

FeaturesFile load_features(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read features from " + path);
  FeaturesFile file;
  std::string line;
  size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      json j = json::parse(line);
      if (!have_header) {
        if (j.value("type", "") != "features")
          throw std::runtime_error("missing features header record");
        file.matrix.regions = j.at("regions").get<std::vector<std::string>>();
        file.matrix.n_features = j.at("n_features").get<size_t>();
        file.matrix.normalization =
            normalization_from_string(j.value("normalization", "none"));
        file.grammar_checksum = j.value("grammar_checksum", "");
        have_header = true;
        continue;
      }
      file.matrix.sample_ids.push_back(j.at("sample_id").get<std::string>());
      file.matrix.labels.push_back(j.at("region").get<std::string>());
      auto counts = j.at("counts").get<std::vector<double>>();
      if (counts.size() != file.matrix.n_features)
        throw std::runtime_error("row has " + std::to_string(counts.size()) +
                                 " features, header declares " +
                                 std::to_string(file.matrix.n_features));
      file.matrix.x.insert(file.matrix.x.end(), counts.begin(), counts.end());
    } catch (const json::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " +
                               e.what());
    }
  }
  if (!have_header)
    throw std::runtime_error(path + ": empty features file (no header record)");
  return file;
}

json model_to_json(const LinearRegionModel& model) {
  json j;
  j["type"] = "linear-region-model";
  j["regions"] = model.regions;
  j["weights"] = model.weights;
  j["biases"] = model.biases;
  j["C"] = model.c;
  j["normalization"] = to_string(model.normalization);
  j["seed"] = model.seed;
  j["grammar_checksum"] = model.grammar_checksum;
  j["objective_history"] = model.objective_history;
  return j;
}

LinearRegionModel model_from_json(const json& j) {
  LinearRegionModel model;
  model.regions = j.at("regions").get<std::vector<std::string>>();
  model.weights = j.at("weights").get<std::vector<std::vector<double>>>();
  model.biases = j.at("biases").get<std::vector<double>>();
  model.c = j.at("C").get<double>();
  model.normalization = normalization_from_string(j.at("normalization").get<std::string>());
  model.seed = j.at("seed").get<uint64_t>();
  model.grammar_checksum = j.value("grammar_checksum", "");
  if (j.contains("objective_history"))
    model.objective_history =
        j.at("objective_history").get<std::vector<std::vector<double>>>();
  if (model.weights.size() != model.regions.size() ||
      model.biases.size() != model.regions.size())
    throw std::runtime_error("model weight/bias shape does not match regions");
  return model;
}

void save_model(const std::string& path, const LinearRegionModel& model) {
  write_file(path, model_to_json(model).dump(2) + "\n");
}

LinearRegionModel load_model(const std::string& path) {
  try {
    return model_from_json(json::parse(read_file(path)));
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

json report_to_json(const EvalReport& report) {
  json j;
  j["regions"] = report.regions;
  j["precision"] = report.precision;
  j["recall"] = report.recall;
  j["f1"] = report.f1;
  j["macro_precision"] = report.macro_precision;
  j["macro_recall"] = report.macro_recall;
  j["macro_f1"] = report.macro_f1;
  j["majority_baseline_f1"] = report.majority_baseline_f1;
  j["confusion"] = report.confusion;
  return j;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

uint64_t fnv1a64(const std::string& data) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace cxgdial
