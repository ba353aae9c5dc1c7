#ifndef CXGDIAL_IO_HPP
#define CXGDIAL_IO_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "cxgdial/classify.hpp"
#include "cxgdial/corpus.hpp"

namespace cxgdial {

// Directory layout corpus/<REGION>/<doc>.txt: one sentence per line, tokens
// whitespace-separated, UTF-8. Regions and files load in sorted order.
std::vector<RawDocument> load_corpus_dir(const std::string& root);
RawDocument load_document(const std::string& path, const std::string& region,
                          const std::string& doc_id);
void save_corpus_dir(const std::string& root,
                     const std::vector<RawDocument>& docs);

// Samples as JSON lines: {"sample_id","region","tokens","provenance"}.
void save_samples_jsonl(const std::string& path,
                        const std::vector<Sample>& samples);
std::vector<Sample> load_samples_jsonl(const std::string& path);

// Feature matrices as JSON lines with a metadata header record.
void save_features(const std::string& path, const FeatureMatrix& m,
                   const std::string& grammar_checksum);
struct FeaturesFile {
  FeatureMatrix matrix;
  std::string grammar_checksum;
};
FeaturesFile load_features(const std::string& path);

nlohmann::json model_to_json(const LinearRegionModel& model);
LinearRegionModel model_from_json(const nlohmann::json& j);
void save_model(const std::string& path, const LinearRegionModel& model);
LinearRegionModel load_model(const std::string& path);

nlohmann::json report_to_json(const EvalReport& report);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

uint64_t fnv1a64(const std::string& data);

}  // namespace cxgdial

#endif  // CXGDIAL_IO_HPP
