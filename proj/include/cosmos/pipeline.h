#ifndef COSMOS_PIPELINE_H_
#define COSMOS_PIPELINE_H_

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cosmos/analysis.h"
#include "cosmos/annotation.h"
#include "cosmos/config.h"
#include "cosmos/corpus.h"
#include "cosmos/extraction.h"
#include "cosmos/trainer.h"
#include "json.hpp"

// Stage functions shared by the command-line tool and the end-to-end checks.
// Every stage reads and writes JSON Lines files, reports per-record problems
// as warnings, and throws InputError / IoError for fatal user-facing errors.
namespace cosmos::pipeline {

using Path = std::filesystem::path;

struct StageReport {
  std::string stage;
  // Deterministic counts and settings; no timestamps or durations.
  nlohmann::json summary = nlohmann::json::object();
  std::vector<std::string> warnings;
  std::vector<Path> outputs;
};

// Writes one JSON object per warning ({"stage", "warning"}) to `log`.
void LogWarnings(const StageReport& report, std::ostream& log);
// One human-readable line per summary field plus the warning count.
std::string HumanSummary(const StageReport& report);

// ---- ingest: biography pages -> sentence records -------------------------

// {page_id, title, paragraph_index, sentence_index, text, tokens, paragraph}
nlohmann::json SentenceRecord(const Sentence& s, const BiographyPage& page);

struct SentenceTable {
  std::vector<Sentence> sentences;
  std::vector<std::string> titles;      // parallel to sentences
  std::vector<std::string> paragraphs;  // parallel to sentences
  std::vector<RecordError> errors;
};
SentenceTable LoadSentences(const Path& path);

struct IngestOptions {
  Path corpus;
  Path out;
};
StageReport Ingest(const IngestOptions& options);

// ---- extract: sentence records + annotations -> candidate triplets -------

struct ExtractOptions {
  Path sentences;
  Path annotations;
  Path out;
};
StageReport Extract(const ExtractOptions& options);

// Candidate extraction over a raw corpus, used to measure coverage against
// a hand-built trajectory list.
struct CoverageReport {
  size_t expected = 0;
  size_t matched = 0;
  size_t candidates = 0;
  double recall = 0.0;
  std::vector<nlohmann::json> missed;
  std::vector<std::string> warnings;
};
// Expected records carry page_id, paragraph_index, sentence_index, person,
// time and location. A candidate matches when it comes from the same
// sentence and its three element texts agree after whitespace collapsing and
// case folding.
CoverageReport MeasureCoverage(const Path& corpus, const Path& annotations,
                               const Path& expected);

// ---- annotate: sentences -> LLM-labeled examples --------------------------

struct AnnotateOptions {
  Path sentences;
  // When set, only target sentences (a time and a location entity) are sent.
  std::optional<Path> annotations;
  Path extraction_prompt;
  Path verification_prompt;
  Path out;
  AnnotationOptions protocol;
};
StageReport Annotate(const AnnotateOptions& options, ChatClient& client);

// ---- train ----------------------------------------------------------------

// Reads max_epochs, patience, batch_size and unlabeled_batch_size from the
// "train" object of a config document; unknown keys are rejected.
TrainOptions TrainOptionsFromJson(const nlohmann::json& j, const TrainOptions& base);

struct TrainStageOptions {
  ModelConfig model;
  TrainOptions train;
  Path labeled;
  std::optional<Path> unlabeled;
  Path out;
  std::optional<Path> test_out;
  std::optional<Path> log;
};
StageReport TrainStage(const TrainStageOptions& options);

// ---- classify -------------------------------------------------------------

struct ClassifyOptions {
  Path model;
  Path candidates;
  Path out;
};
// Output records are the input examples plus "probability" and "prediction".
StageReport Classify(const ClassifyOptions& options);

// ---- evaluate -------------------------------------------------------------

struct EvaluateOptions {
  Path model;
  Path test;
  std::optional<Path> regular;
  Path report;
};
StageReport Evaluate(const EvaluateOptions& options);

// ---- analyze --------------------------------------------------------------

struct AnalyzeOptions {
  Path trajectories;
  Path out_graph;
  std::optional<Path> verb_map;
  std::optional<Path> out_records;
  std::optional<Path> report;
  std::string snapshots = "1910:2020:10";
  std::vector<std::string> keywords = analysis::DefaultInstitutionKeywords();
  bool geocode = false;
  analysis::GeocoderOptions geocoder;
  size_t top_verbs = 15;
};
StageReport Analyze(const AnalyzeOptions& options);

// ---- pipeline -------------------------------------------------------------

struct PipelineConfig {
  Path corpus;
  Path annotations;
  Path labeled;
  std::optional<Path> regular;
  std::optional<Path> verb_map;
  std::string snapshots = "1910:2020:10";
  ModelConfig model;
  TrainOptions train;
  bool geocode = false;
  analysis::GeocoderOptions geocoder;

  // Relative paths resolve against `base_dir` (the config file's folder).
  static PipelineConfig FromJson(const nlohmann::json& doc, const Path& base_dir);
  static PipelineConfig Load(const Path& path);
  // Throws InputError naming the first missing input file.
  void Validate() const;
};

// Runs ingest, extract, train, classify, evaluate and analyze into
// `out_dir` and writes manifest.json listing every artifact with its size
// and digest. Outputs of a failed run are removed before rethrowing.
std::vector<StageReport> RunPipeline(const PipelineConfig& config, const Path& out_dir,
                                     std::ostream* log = nullptr);

}  // namespace cosmos::pipeline

#endif  // COSMOS_PIPELINE_H_
