#include "cli.h"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "cosmos/annotation.h"
#include "cosmos/config.h"
#include "cosmos/io.h"
#include "cosmos/pipeline.h"
#include "cosmos/trainer.h"

namespace cosmos::cli {
namespace {

namespace pl = pipeline;
using Path = std::filesystem::path;

// Values only set when the flag is given, so config files can supply the
// rest (flag > config > built-in default).
struct ModelOverrides {
  std::optional<uint64_t> seed;
  std::optional<double> lr, lambda, tau, gamma;
  std::optional<int> epochs, patience;
  std::optional<size_t> batch_size;
  bool no_scl = false;
  bool no_ssl = false;

  void Register(CLI::App& app) {
    app.add_option("--seed", seed, "Random seed for splitting, initialization and batching");
    app.add_option("--lr", lr, "Adam learning rate");
    app.add_option("--lambda", lambda, "Weight of the contrastive loss");
    app.add_option("--tau", tau, "Contrastive temperature");
    app.add_option("--gamma", gamma, "Pseudo-label weight ceiling during warm-up");
    app.add_option("--epochs", epochs, "Maximum number of epochs");
    app.add_option("--patience", patience, "Early-stopping patience in epochs");
    app.add_option("--batch-size", batch_size, "Labeled batch size");
    app.add_flag("--no-scl", no_scl, "Disable the supervised contrastive loss");
    app.add_flag("--no-ssl", no_ssl, "Disable pseudo-label semi-supervised training");
  }

  void Apply(ModelConfig& m, TrainOptions& t) const {
    if (seed) m.seed = *seed;
    if (lr) m.lr = *lr;
    if (lambda) m.lambda = *lambda;
    if (tau) m.tau = *tau;
    if (gamma) m.gamma = *gamma;
    if (no_scl) m.use_scl = false;
    if (no_ssl) m.use_ssl = false;
    if (epochs) t.max_epochs = *epochs;
    if (patience) t.patience = *patience;
    if (batch_size) t.batch_size = *batch_size;
  }
};

std::optional<Path> Opt(const std::string& s) {
  return s.empty() ? std::nullopt : std::optional<Path>(s);
}

void Emit(const pl::StageReport& report, std::ostream& events, std::ostream& err) {
  pl::LogWarnings(report, events);
  nlohmann::json outputs = nlohmann::json::array();
  for (const auto& p : report.outputs) outputs.push_back(p.string());
  events << JsonLine({{"stage", report.stage},
                      {"summary", report.summary},
                      {"warnings", report.warnings.size()},
                      {"outputs", outputs}});
  err << pl::HumanSummary(report) << "\n";
}

}  // namespace

int Run(int argc, const char* const* argv, std::ostream& events_default, std::ostream& err) {
  CLI::App app{"COSMOS: life-trajectory extraction, classification and analysis"};
  app.require_subcommand(1);
  std::string log_file;
  app.add_option("--log-file", log_file, "Write structured JSONL events here instead of stdout");

  // ingest
  pl::IngestOptions ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Segment biography pages into sentence records");
  c_ingest->add_option("--corpus", ingest.corpus, "Corpus JSONL (page_id, title, paragraphs)")
      ->required();
  c_ingest->add_option("--out", ingest.out, "Sentence records JSONL")->required();

  // extract
  pl::ExtractOptions extract;
  auto* c_extract = app.add_subcommand("extract", "Extract candidate triplets from sentences");
  c_extract->add_option("--sentences", extract.sentences, "Sentence records from ingest")
      ->required();
  c_extract->add_option("--annotations", extract.annotations,
                        "Per-sentence NER/POS/dependency JSONL")->required();
  c_extract->add_option("--out", extract.out, "Candidate triplets JSONL")->required();

  // annotate
  pl::AnnotateOptions annotate;
  std::string annotate_filter, prompts_dir = "prompts", endpoint, llm_model = "gpt-3.5-turbo";
  std::string api_key_env = "COSMOS_LLM_API_KEY";
  auto* c_annotate = app.add_subcommand("annotate", "Label sentences with an LLM");
  c_annotate->add_option("--sentences", annotate.sentences, "Sentence records from ingest")
      ->required();
  c_annotate->add_option("--annotations", annotate_filter,
                         "Annotation JSONL; when given only target sentences are sent");
  c_annotate->add_option("--prompts", prompts_dir,
                         "Folder with extraction.txt and verification.txt")->capture_default_str();
  c_annotate->add_option("--endpoint", endpoint,
                         "Chat-completions URL (default: $COSMOS_LLM_ENDPOINT)");
  c_annotate->add_option("--model", llm_model, "Model name sent to the endpoint")
      ->capture_default_str();
  c_annotate->add_option("--api-key-env", api_key_env, "Environment variable with the API key")
      ->capture_default_str();
  c_annotate->add_option("--trials", annotate.protocol.trials, "Extraction calls per sentence")
      ->capture_default_str();
  c_annotate->add_option("--concurrency", annotate.protocol.concurrency,
                         "Sentences annotated in parallel")->capture_default_str();
  c_annotate->add_option("--out", annotate.out, "LLM-labeled examples JSONL")->required();

  // train
  std::string train_config, train_unlabeled, test_out, train_log;
  pl::TrainStageOptions train;
  ModelOverrides train_flags;
  auto* c_train = app.add_subcommand("train", "Train the classifier");
  c_train->add_option("--config", train_config, "JSON/YAML with model and train sections");
  c_train->add_option("--labeled", train.labeled, "Labeled examples JSONL")->required();
  c_train->add_option("--unlabeled", train_unlabeled, "Unlabeled pool JSONL (e.g. candidates)");
  c_train->add_option("--out", train.out, "Model checkpoint")->required();
  c_train->add_option("--test-out", test_out, "Write the held-out test split here");
  c_train->add_option("--log", train_log, "Per-batch loss log JSONL");
  train_flags.Register(*c_train);

  // classify
  pl::ClassifyOptions classify;
  auto* c_classify = app.add_subcommand("classify", "Score candidate triplets");
  c_classify->add_option("--model", classify.model, "Model checkpoint")->required();
  c_classify->add_option("--candidates", classify.candidates, "Candidate triplets JSONL")
      ->required();
  c_classify->add_option("--out", classify.out, "Scored triplets JSONL")->required();

  // evaluate
  pl::EvaluateOptions evaluate;
  std::string regular;
  auto* c_evaluate = app.add_subcommand("evaluate", "Report metrics on labeled data");
  c_evaluate->add_option("--model", evaluate.model, "Model checkpoint")->required();
  c_evaluate->add_option("--test", evaluate.test, "Labeled test examples JSONL")->required();
  c_evaluate->add_option("--regular", regular, "Regular-page examples for per-page recall");
  c_evaluate->add_option("--report", evaluate.report, "Report JSON")->required();

  // analyze
  pl::AnalyzeOptions analyze;
  std::string verb_map, out_records, analysis_report, geocoder_cache;
  auto* c_analyze = app.add_subcommand("analyze", "Build trajectory records and the network");
  c_analyze->add_option("--trajectories", analyze.trajectories, "Classified triplets JSONL")
      ->required();
  c_analyze->add_option("--out-graph", analyze.out_graph, "Node-link graph JSON")->required();
  c_analyze->add_option("--snapshots", analyze.snapshots, "Snapshot years from:to:step")
      ->capture_default_str();
  c_analyze->add_option("--verb-map", verb_map, "Verb lemma to type TSV");
  c_analyze->add_option("--out-records", out_records, "Normalized trajectory records JSONL");
  c_analyze->add_option("--report", analysis_report, "Summary JSON with verb histogram");
  c_analyze->add_option("--keywords", analyze.keywords, "Institution keywords")
      ->capture_default_str();
  c_analyze->add_option("--top-verbs", analyze.top_verbs, "Histogram length")
      ->capture_default_str();
  c_analyze->add_flag("--geocode", analyze.geocode, "Geocode locations");
  c_analyze->add_option("--geocoder-url", analyze.geocoder.endpoint,
                        "Geocoder search URL (default: $COSMOS_GEOCODER_URL or Nominatim)");
  c_analyze->add_option("--geocoder-cache", geocoder_cache, "Geocoder cache JSON");

  // pipeline
  std::string pipeline_config;
  Path out_dir;
  ModelOverrides pipeline_flags;
  auto* c_pipeline = app.add_subcommand("pipeline", "Run every stage from a config file");
  c_pipeline->add_option("--config", pipeline_config, "Pipeline config JSON/YAML")->required();
  c_pipeline->add_option("--out-dir", out_dir, "Artifact folder")->required();
  pipeline_flags.Register(*c_pipeline);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {  // includes --help, which exits 0
    std::ostringstream out;
    const int code = app.exit(e, out, out);
    err << out.str();
    return code == 0 ? kExitOk : kExitUserError;
  }

  std::ofstream log_stream;
  std::ostream* events = &events_default;
  if (!log_file.empty()) {
    log_stream.open(log_file, std::ios::app);
    if (!log_stream) {
      err << "error: cannot open log file " << log_file << "\n";
      return kExitUserError;
    }
    events = &log_stream;
  }

  try {
    if (*c_ingest) {
      Emit(pl::Ingest(ingest), *events, err);
    } else if (*c_extract) {
      Emit(pl::Extract(extract), *events, err);
    } else if (*c_annotate) {
      annotate.annotations = Opt(annotate_filter);
      annotate.extraction_prompt = Path(prompts_dir) / "extraction.txt";
      annotate.verification_prompt = Path(prompts_dir) / "verification.txt";
      if (endpoint.empty()) {
        if (const char* env = std::getenv("COSMOS_LLM_ENDPOINT")) endpoint = env;
      }
      if (endpoint.empty()) throw InputError("annotate needs --endpoint or $COSMOS_LLM_ENDPOINT");
      HttpChatClient client(endpoint, llm_model, api_key_env);
      Emit(pl::Annotate(annotate, client), *events, err);
    } else if (*c_train) {
      if (!train_config.empty()) {
        const nlohmann::json doc = LoadConfigDocument(train_config);
        if (!doc.is_object()) throw InputError("config must be an object");
        const bool sectioned = doc.contains("model") || doc.contains("train");
        if (sectioned) {
          if (doc.contains("model")) train.model = ModelConfig::FromJson(doc["model"]);
          if (doc.contains("train")) train.train = pl::TrainOptionsFromJson(doc["train"], {});
        } else {
          train.model = ModelConfig::FromJson(doc);
        }
      }
      train_flags.Apply(train.model, train.train);
      train.unlabeled = Opt(train_unlabeled);
      train.test_out = Opt(test_out);
      train.log = Opt(train_log);
      Emit(pl::TrainStage(train), *events, err);
    } else if (*c_classify) {
      Emit(pl::Classify(classify), *events, err);
    } else if (*c_evaluate) {
      evaluate.regular = Opt(regular);
      Emit(pl::Evaluate(evaluate), *events, err);
    } else if (*c_analyze) {
      analyze.verb_map = Opt(verb_map);
      analyze.out_records = Opt(out_records);
      analyze.report = Opt(analysis_report);
      analyze.geocoder.cache_path = geocoder_cache;
      Emit(pl::Analyze(analyze), *events, err);
    } else if (*c_pipeline) {
      pl::PipelineConfig config = pl::PipelineConfig::Load(pipeline_config);
      pipeline_flags.Apply(config.model, config.train);
      for (const auto& r : pl::RunPipeline(config, out_dir, nullptr)) Emit(r, *events, err);
      err << "artifacts: " << out_dir.string() << "\n";
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUserError;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUserError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternalError;
  }
  return kExitOk;
}

}  // namespace cosmos::cli
