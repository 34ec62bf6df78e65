#include "cosmos/pipeline.h"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "cosmos/context.h"
#include "cosmos/encoder.h"
#include "cosmos/evaluator.h"
#include "cosmos/io.h"
#include "cosmos/text.h"

namespace cosmos::pipeline {
namespace {

std::string Where(const Path& path, const RecordError& e) {
  return path.filename().string() + ":" + std::to_string(e.line) + ": " + e.message;
}

void AddErrors(StageReport& report, const Path& path, const std::vector<RecordError>& errors) {
  for (const auto& e : errors) report.warnings.push_back(Where(path, e));
}

void WriteLines(const Path& path, const std::vector<nlohmann::json>& records) {
  AtomicOutput out(path);
  for (const auto& r : records) out.stream() << JsonLine(r);
  out.Commit();
}

void WriteJson(const Path& path, const nlohmann::json& j) { AtomicWriteFile(path, j.dump(2) + "\n"); }

std::string MatchKey(const std::string& s) {
  return text::AsciiLower(text::CollapseWhitespace(text::NormalizeNfc(s)));
}

std::string ElementText(const nlohmann::json& record, const char* key) {
  if (!record.contains(key)) throw InputError(std::string("missing field ") + key);
  const auto& v = record[key];
  if (v.is_string()) return v.get<std::string>();
  if (v.is_object() && v.contains("text") && v["text"].is_string()) {
    return v["text"].get<std::string>();
  }
  throw InputError(std::string("field ") + key + " must be a string or span object");
}

std::vector<Example> LabeledOnly(std::vector<Example> examples, StageReport& report,
                                 const Path& path) {
  std::vector<Example> out;
  for (auto& e : examples) {
    if (e.label) {
      out.push_back(std::move(e));
    } else {
      report.warnings.push_back(path.filename().string() + ": unlabeled example for " +
                                e.triplet.ref.page_id + " skipped");
    }
  }
  if (out.empty()) throw InputError("no labeled examples in " + path.string());
  return out;
}

std::unique_ptr<CosmosModel> LoadModel(const Path& path) {
  if (!std::filesystem::exists(path)) throw InputError("model file not found: " + path.string());
  return CosmosModel::Load(path);
}

nlohmann::json OptionalNumber(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

void LogWarnings(const StageReport& report, std::ostream& log) {
  for (const auto& w : report.warnings) log << JsonLine({{"stage", report.stage}, {"warning", w}});
}

std::string HumanSummary(const StageReport& report) {
  std::ostringstream out;
  out << report.stage << ":";
  for (const auto& [key, value] : report.summary.items()) {
    out << " " << key << "=" << (value.is_string() ? value.get<std::string>() : value.dump());
  }
  if (!report.warnings.empty()) out << " warnings=" << report.warnings.size();
  return out.str();
}

// ---------------------------------------------------------------- ingest

nlohmann::json SentenceRecord(const Sentence& s, const BiographyPage& page) {
  return {{"page_id", s.page_id},
          {"title", page.title},
          {"paragraph_index", s.paragraph_index},
          {"sentence_index", s.sentence_index},
          {"text", s.text},
          {"tokens", s.tokens},
          {"paragraph", page.paragraphs.at(s.paragraph_index)}};
}

SentenceTable LoadSentences(const Path& path) {
  SentenceTable table;
  auto errors = ForEachJsonLine(path, [&](size_t line, const nlohmann::json& j) {
    try {
      if (!j.is_object()) throw InputError("record is not an object");
      Sentence s;
      s.page_id = j.at("page_id").get<std::string>();
      s.paragraph_index = j.at("paragraph_index").get<int>();
      s.sentence_index = j.at("sentence_index").get<int>();
      s.text = j.at("text").get<std::string>();
      s.tokens = j.contains("tokens") ? j["tokens"].get<std::vector<std::string>>()
                                      : text::Tokenize(s.text);
      table.titles.push_back(j.value("title", std::string()));
      table.paragraphs.push_back(j.value("paragraph", s.text));
      table.sentences.push_back(std::move(s));
    } catch (const nlohmann::json::exception& e) {
      table.errors.push_back({line, std::string("bad sentence record: ") + e.what()});
    } catch (const InputError& e) {
      table.errors.push_back({line, e.what()});
    }
  });
  table.errors.insert(table.errors.end(), errors.begin(), errors.end());
  std::stable_sort(table.errors.begin(), table.errors.end(),
                   [](const auto& a, const auto& b) { return a.line < b.line; });
  return table;
}

StageReport Ingest(const IngestOptions& options) {
  StageReport report;
  report.stage = "ingest";
  CorpusLoadResult corpus = LoadCorpus(options.corpus);
  AddErrors(report, options.corpus, corpus.errors);
  std::vector<nlohmann::json> records;
  for (const auto& page : corpus.pages) {
    for (const auto& s : SegmentSentences(page)) records.push_back(SentenceRecord(s, page));
  }
  WriteLines(options.out, records);
  report.summary = {{"pages", corpus.pages.size()},
                    {"sentences", records.size()},
                    {"rejected_records", corpus.errors.size()}};
  report.outputs.push_back(options.out);
  return report;
}

// ---------------------------------------------------------------- extract

StageReport Extract(const ExtractOptions& options) {
  StageReport report;
  report.stage = "extract";
  SentenceTable table = LoadSentences(options.sentences);
  AddErrors(report, options.sentences, table.errors);
  FileAnnotationBackend backend = FileAnnotationBackend::Load(options.annotations);
  AddErrors(report, options.annotations, backend.errors());

  std::map<std::tuple<std::string, int, int>, size_t> row;
  for (size_t i = 0; i < table.sentences.size(); ++i) {
    const auto& s = table.sentences[i];
    row[{s.page_id, s.paragraph_index, s.sentence_index}] = i;
  }
  ExtractionResult extracted = ExtractFromSentences(table.sentences, backend);
  report.warnings.insert(report.warnings.end(), extracted.warnings.begin(),
                         extracted.warnings.end());
  std::vector<nlohmann::json> records;
  size_t rejected = 0;
  for (const auto& t : extracted.triplets) {
    const size_t i = row.at({t.ref.page_id, t.ref.paragraph_index, t.ref.sentence_index});
    nlohmann::json record = TripletToJson(t);
    record["paragraph"] = table.paragraphs[i];
    if (!table.titles[i].empty()) record["title"] = table.titles[i];
    try {
      ExampleFromRecord(record);
    } catch (const InputError& e) {
      ++rejected;
      report.warnings.push_back(t.ref.page_id + ":" + std::to_string(t.ref.paragraph_index) + ":" +
                                std::to_string(t.ref.sentence_index) + ": " + e.what());
      continue;
    }
    records.push_back(std::move(record));
  }
  WriteLines(options.out, records);
  report.summary = {{"sentences", table.sentences.size()},
                    {"candidates", records.size()},
                    {"rejected_candidates", rejected}};
  report.outputs.push_back(options.out);
  return report;
}

CoverageReport MeasureCoverage(const Path& corpus_path, const Path& annotations,
                               const Path& expected_path) {
  CoverageReport report;
  CorpusLoadResult corpus = LoadCorpus(corpus_path);
  for (const auto& e : corpus.errors) report.warnings.push_back(Where(corpus_path, e));
  std::vector<Sentence> sentences;
  for (const auto& page : corpus.pages) {
    auto s = SegmentSentences(page);
    sentences.insert(sentences.end(), s.begin(), s.end());
  }
  FileAnnotationBackend backend = FileAnnotationBackend::Load(annotations);
  for (const auto& e : backend.errors()) report.warnings.push_back(Where(annotations, e));
  ExtractionResult extracted = ExtractFromSentences(sentences, backend);
  report.warnings.insert(report.warnings.end(), extracted.warnings.begin(),
                         extracted.warnings.end());
  report.candidates = extracted.triplets.size();

  using Key = std::tuple<std::string, int, int, std::string, std::string, std::string>;
  std::set<Key> found;
  for (const auto& t : extracted.triplets) {
    found.insert({t.ref.page_id, t.ref.paragraph_index, t.ref.sentence_index,
                  MatchKey(t.person.text), MatchKey(t.time.text), MatchKey(t.location.text)});
  }
  auto errors = ForEachJsonLine(expected_path, [&](size_t line, const nlohmann::json& j) {
    try {
      Key key{j.at("page_id").get<std::string>(), j.at("paragraph_index").get<int>(),
              j.at("sentence_index").get<int>(), MatchKey(ElementText(j, "person")),
              MatchKey(ElementText(j, "time")), MatchKey(ElementText(j, "location"))};
      ++report.expected;
      if (found.count(key)) {
        ++report.matched;
      } else {
        report.missed.push_back(j);
      }
    } catch (const std::exception& e) {
      report.warnings.push_back(expected_path.filename().string() + ":" + std::to_string(line) +
                                ": " + e.what());
    }
  });
  for (const auto& e : errors) report.warnings.push_back(Where(expected_path, e));
  if (report.expected == 0) throw InputError("no expected trajectories in " + expected_path.string());
  report.recall = static_cast<double>(report.matched) / static_cast<double>(report.expected);
  return report;
}

// ---------------------------------------------------------------- annotate

StageReport Annotate(const AnnotateOptions& options, ChatClient& client) {
  StageReport report;
  report.stage = "annotate";
  SentenceTable table = LoadSentences(options.sentences);
  AddErrors(report, options.sentences, table.errors);
  const PromptTemplate extraction = PromptTemplate::Load(options.extraction_prompt);
  const PromptTemplate verification = PromptTemplate::Load(options.verification_prompt);

  std::optional<FileAnnotationBackend> backend;
  if (options.annotations) {
    backend.emplace(FileAnnotationBackend::Load(*options.annotations));
    AddErrors(report, *options.annotations, backend->errors());
  }
  std::vector<AnnotationInput> inputs;
  for (size_t i = 0; i < table.sentences.size(); ++i) {
    const Sentence& s = table.sentences[i];
    if (backend) {
      try {
        if (!IsTargetSentence(CategorizeEntities(backend->Annotate(s)))) continue;
      } catch (const std::exception& e) {
        report.warnings.push_back(e.what());
        continue;
      }
    }
    inputs.push_back({s, table.paragraphs[i], table.titles[i]});
  }
  AnnotationResult result = cosmos::Annotate(inputs, client, extraction, verification,
                                             options.protocol);
  report.warnings.insert(report.warnings.end(), result.warnings.begin(), result.warnings.end());
  report.warnings.insert(report.warnings.end(), result.errors.begin(), result.errors.end());
  if (!inputs.empty() && result.stats.failed_sentences == inputs.size()) {
    throw IoError("every annotation request failed; first error: " + result.errors.front());
  }
  std::vector<nlohmann::json> records;
  for (const auto& ex : result.examples) records.push_back(ExampleToRecord(ex));
  WriteLines(options.out, records);
  report.summary = {{"sentences", inputs.size()},
                    {"extracted", result.stats.extracted},
                    {"verified", result.stats.verified},
                    {"examples", records.size()},
                    {"failed_sentences", result.stats.failed_sentences}};
  report.outputs.push_back(options.out);
  return report;
}

// ---------------------------------------------------------------- train

TrainOptions TrainOptionsFromJson(const nlohmann::json& j, const TrainOptions& base) {
  if (!j.is_object()) throw InputError("train config must be an object");
  static const std::set<std::string> known = {"max_epochs", "patience", "batch_size",
                                              "unlabeled_batch_size"};
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw InputError("unknown train config key: " + key);
  }
  TrainOptions t = base;
  try {
    if (j.contains("max_epochs")) t.max_epochs = j["max_epochs"].get<int>();
    if (j.contains("patience")) t.patience = j["patience"].get<int>();
    if (j.contains("batch_size")) t.batch_size = j["batch_size"].get<size_t>();
    if (j.contains("unlabeled_batch_size")) {
      t.unlabeled_batch_size = j["unlabeled_batch_size"].get<size_t>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bad train config value: ") + e.what());
  }
  return t;
}

StageReport TrainStage(const TrainStageOptions& options) {
  StageReport report;
  report.stage = "train";
  options.model.Validate();
  DatasetLoadResult labeled = LoadDataset(options.labeled);
  AddErrors(report, options.labeled, labeled.errors);
  std::vector<Example> pool = LabeledOnly(std::move(labeled.examples), report, options.labeled);

  std::vector<Example> unlabeled;
  if (options.model.use_ssl) {
    if (!options.unlabeled) throw InputError("semi-supervised training needs --unlabeled");
    DatasetLoadResult u = LoadDataset(*options.unlabeled);
    AddErrors(report, *options.unlabeled, u.errors);
    for (auto& e : u.examples) {
      e.label.reset();
      e.source = LabelSource::kUnlabeled;
      unlabeled.push_back(std::move(e));
    }
  }
  const size_t pool_size = pool.size();
  Splits splits = SplitDataset(std::move(pool), options.model.seed);
  CosmosModel model(options.model);
  std::ostringstream log;
  TrainResult result = Train(model, splits.train, splits.val, unlabeled, options.train,
                             options.log ? &log : nullptr);
  model.Save(options.out);
  report.outputs.push_back(options.out);
  if (options.log) {
    AtomicWriteFile(*options.log, log.str());
    report.outputs.push_back(*options.log);
  }
  if (options.test_out) {
    std::vector<nlohmann::json> records;
    for (const auto& e : splits.test) records.push_back(ExampleToRecord(e));
    WriteLines(*options.test_out, records);
    report.outputs.push_back(*options.test_out);
  }
  report.summary = {{"labeled", pool_size},
                    {"unlabeled", unlabeled.size()},
                    {"train", splits.train.size()},
                    {"val", splits.val.size()},
                    {"test", splits.test.size()},
                    {"use_scl", options.model.use_scl},
                    {"use_ssl", options.model.use_ssl},
                    {"epochs_run", result.epochs_run},
                    {"best_epoch", result.best_epoch},
                    {"best_val_f1", result.best_f1}};
  return report;
}

// ---------------------------------------------------------------- classify

StageReport Classify(const ClassifyOptions& options) {
  StageReport report;
  report.stage = "classify";
  auto model = LoadModel(options.model);
  DatasetLoadResult data = LoadDataset(options.candidates);
  AddErrors(report, options.candidates, data.errors);
  const auto probs = PredictProbabilities(*model, data.examples);
  std::vector<nlohmann::json> records;
  size_t positives = 0;
  for (size_t i = 0; i < data.examples.size(); ++i) {
    nlohmann::json r = ExampleToRecord(data.examples[i]);
    r["probability"] = probs[i];
    r["prediction"] = Decide(probs[i]);
    positives += static_cast<size_t>(Decide(probs[i]));
    records.push_back(std::move(r));
  }
  WriteLines(options.out, records);
  report.summary = {{"candidates", records.size()},
                    {"predicted_positive", positives},
                    {"rejected_records", data.errors.size()}};
  report.outputs.push_back(options.out);
  return report;
}

// ---------------------------------------------------------------- evaluate

StageReport Evaluate(const EvaluateOptions& options) {
  StageReport report;
  report.stage = "evaluate";
  auto model = LoadModel(options.model);
  DatasetLoadResult test = LoadDataset(options.test);
  AddErrors(report, options.test, test.errors);
  std::vector<Example> examples = LabeledOnly(std::move(test.examples), report, options.test);
  std::vector<int> predictions, labels;
  for (double p : PredictProbabilities(*model, examples)) predictions.push_back(Decide(p));
  for (const auto& e : examples) labels.push_back(*e.label);
  const MetricReport metrics = ComputeMetrics(predictions, labels);

  nlohmann::json doc = {{"test", metrics.ToJson()},
                        {"by_source", SourceBreakdown(examples, predictions)}};
  report.summary = {{"examples", examples.size()},
                    {"accuracy", OptionalNumber(metrics.accuracy)},
                    {"precision", OptionalNumber(metrics.precision)},
                    {"recall", OptionalNumber(metrics.recall)},
                    {"f1", OptionalNumber(metrics.f1)}};
  if (options.regular) {
    DatasetLoadResult regular = LoadDataset(*options.regular);
    AddErrors(report, *options.regular, regular.errors);
    std::vector<Example> reg = LabeledOnly(std::move(regular.examples), report, *options.regular);
    const auto probs = PredictProbabilities(*model, reg);
    std::vector<PageOutcome> outcomes;
    for (size_t i = 0; i < reg.size(); ++i) {
      outcomes.push_back({reg[i].triplet.ref.page_id, *reg[i].label, Decide(probs[i])});
    }
    const PerPageReport per_page = PerPageRecall(outcomes);
    doc["regular"] = per_page.ToJson();
    report.summary["regular_avg_recall"] = per_page.avg_recall;
  }
  WriteJson(options.report, doc);
  report.outputs.push_back(options.report);
  return report;
}

// ---------------------------------------------------------------- analyze

StageReport Analyze(const AnalyzeOptions& options) {
  StageReport report;
  report.stage = "analyze";
  const std::vector<int> years = analysis::ParseYearRange(options.snapshots);
  std::vector<nlohmann::json> triplets;
  auto errors = ForEachJsonLine(options.trajectories, [&](size_t, const nlohmann::json& j) {
    triplets.push_back(j);
  });
  AddErrors(report, options.trajectories, errors);

  analysis::VerbTypeMap verbs;
  if (options.verb_map) {
    verbs = analysis::VerbTypeMap::Load(*options.verb_map);
  } else {
    report.warnings.push_back(std::string("no verb map given; every verb is typed ") +
                              analysis::kOtherVerbType);
  }
  std::optional<analysis::Geocoder> geocoder;
  if (options.geocode) geocoder.emplace(options.geocoder);
  // Page subjects seen in the input let mentions of one biography's subject
  // on another page resolve to the same person.
  std::vector<std::string> subjects;
  for (const auto& t : triplets) {
    if (t.contains("title") && t["title"].is_string()) {
      subjects.push_back(t["title"].get<std::string>());
    } else if (t.contains("page_id") && t["page_id"].is_string()) {
      std::string id = t["page_id"].get<std::string>();
      std::replace(id.begin(), id.end(), '_', ' ');
      subjects.push_back(id);
    }
  }
  const analysis::DefaultPersonResolver resolver(std::move(subjects));
  analysis::NormalizationResult norm = analysis::NormalizeTrajectories(
      triplets, resolver, verbs, geocoder ? &*geocoder : nullptr);
  if (geocoder) geocoder->SaveCache();

  const analysis::InteractionGraph graph =
      analysis::BuildInteractionNetwork(norm.records, options.keywords);
  auto rank = [&](const analysis::InteractionGraph& g) {
    return g.nodes.empty() ? std::map<std::string, double>{} : analysis::PageRank(g);
  };
  const auto scores = rank(graph);
  if (graph.nodes.empty()) report.warnings.push_back("interaction network is empty");

  nlohmann::json snapshots = nlohmann::json::array();
  for (int year : years) {
    const analysis::InteractionGraph snap = analysis::Snapshot(graph, year);
    const auto snap_scores = rank(snap);
    snapshots.push_back({{"year", year}, {"graph", snap.ToJson(&snap_scores)}});
  }
  WriteJson(options.out_graph, {{"graph", graph.ToJson(&scores)}, {"snapshots", snapshots}});
  report.outputs.push_back(options.out_graph);

  if (options.out_records) {
    std::vector<nlohmann::json> records;
    for (const auto& r : norm.records) records.push_back(r.ToJson());
    WriteLines(*options.out_records, records);
    report.outputs.push_back(*options.out_records);
  }

  report.summary = {{"triplets", triplets.size()},
                    {"records", norm.records.size()},
                    {"skipped_negative", norm.skipped_negative},
                    {"dropped_vague_time", norm.dropped_vague_time},
                    {"geocoded", norm.geocoded},
                    {"nodes", graph.nodes.size()},
                    {"edges", graph.edges.size()}};
  if (options.report) {
    nlohmann::json histogram = nlohmann::json::array();
    const auto hist = analysis::VerbHistogram(norm.records);
    for (size_t i = 0; i < hist.size() && i < options.top_verbs; ++i) {
      histogram.push_back({{"type", hist[i].first}, {"count", hist[i].second}});
    }
    std::vector<std::pair<std::string, double>> ranked(scores.begin(), scores.end());
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    nlohmann::json top = nlohmann::json::array();
    for (const auto& [person, score] : ranked) top.push_back({{"person", person}, {"pagerank", score}});
    nlohmann::json doc = report.summary;
    doc["verb_histogram"] = histogram;
    doc["pagerank"] = top;
    WriteJson(*options.report, doc);
    report.outputs.push_back(*options.report);
  }
  return report;
}

// ---------------------------------------------------------------- pipeline

PipelineConfig PipelineConfig::FromJson(const nlohmann::json& doc, const Path& base_dir) {
  if (!doc.is_object()) throw InputError("pipeline config must be an object");
  static const std::set<std::string> known = {"corpus", "annotations", "labeled",  "regular",
                                              "verb_map", "snapshots", "model",  "train",
                                              "geocode",  "geocoder"};
  for (const auto& [key, _] : doc.items()) {
    if (!known.count(key)) throw InputError("unknown pipeline config key: " + key);
  }
  auto path = [&](const char* key) -> std::optional<Path> {
    if (!doc.contains(key)) return std::nullopt;
    if (!doc[key].is_string()) throw InputError(std::string(key) + " must be a path string");
    const Path p = doc[key].get<std::string>();
    return p.is_absolute() ? p : base_dir / p;
  };
  auto required = [&](const char* key) {
    auto p = path(key);
    if (!p) throw InputError(std::string("pipeline config needs ") + key);
    return *p;
  };
  PipelineConfig c;
  c.corpus = required("corpus");
  c.annotations = required("annotations");
  c.labeled = required("labeled");
  c.regular = path("regular");
  c.verb_map = path("verb_map");
  try {
    if (doc.contains("snapshots")) c.snapshots = doc["snapshots"].get<std::string>();
    if (doc.contains("geocode")) c.geocode = doc["geocode"].get<bool>();
    if (doc.contains("geocoder")) {
      const auto& g = doc["geocoder"];
      if (g.contains("endpoint")) c.geocoder.endpoint = g["endpoint"].get<std::string>();
      if (g.contains("cache")) {
        const Path p = g["cache"].get<std::string>();
        c.geocoder.cache_path = p.is_absolute() ? p : base_dir / p;
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bad pipeline config value: ") + e.what());
  }
  if (doc.contains("model")) c.model = ModelConfig::FromJson(doc["model"], c.model);
  if (doc.contains("train")) c.train = TrainOptionsFromJson(doc["train"], c.train);
  analysis::ParseYearRange(c.snapshots);
  return c;
}

PipelineConfig PipelineConfig::Load(const Path& path) {
  return FromJson(LoadConfigDocument(path), path.parent_path());
}

void PipelineConfig::Validate() const {
  std::vector<std::pair<const char*, Path>> inputs = {
      {"corpus", corpus}, {"annotations", annotations}, {"labeled", labeled}};
  if (regular) inputs.emplace_back("regular", *regular);
  if (verb_map) inputs.emplace_back("verb_map", *verb_map);
  for (const auto& [name, p] : inputs) {
    if (!std::filesystem::is_regular_file(p)) {
      throw InputError(std::string(name) + " file not found: " + p.string());
    }
  }
  model.Validate();
}

std::vector<StageReport> RunPipeline(const PipelineConfig& config, const Path& out_dir,
                                     std::ostream* log) {
  config.Validate();
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  // Stages write into a staging folder that is promoted only on success, so
  // a failed run leaves no partial artifacts behind.
  const Path stage_dir = out_dir / ".staging";
  fs::remove_all(stage_dir, ec);
  fs::create_directories(stage_dir, ec);
  if (ec) throw IoError("cannot create " + stage_dir.string() + ": " + ec.message());
  auto at = [&](const char* name) { return stage_dir / name; };

  std::vector<StageReport> reports;
  auto record = [&](StageReport r) {
    if (log) LogWarnings(r, *log);
    reports.push_back(std::move(r));
  };
  try {
    record(Ingest({config.corpus, at("sentences.jsonl")}));
    record(Extract({at("sentences.jsonl"), config.annotations, at("candidates.jsonl")}));
    TrainStageOptions train{.model = config.model,
                            .train = config.train,
                            .labeled = config.labeled,
                            .unlabeled = at("candidates.jsonl"),
                            .out = at("model.bin"),
                            .test_out = at("test.jsonl"),
                            .log = at("train_log.jsonl")};
    record(TrainStage(train));
    record(Classify({at("model.bin"), at("candidates.jsonl"), at("classified.jsonl")}));
    record(Evaluate({at("model.bin"), at("test.jsonl"), config.regular, at("evaluation.json")}));
    AnalyzeOptions analyze{.trajectories = at("classified.jsonl"),
                           .out_graph = at("graph.json"),
                           .verb_map = config.verb_map,
                           .out_records = at("trajectories.jsonl"),
                           .report = at("analysis.json"),
                           .snapshots = config.snapshots,
                           .geocode = config.geocode,
                           .geocoder = config.geocoder};
    record(Analyze(analyze));

    nlohmann::json manifest;
    manifest["config"] = {{"model", config.model.ToJson()},
                          {"train",
                           {{"max_epochs", config.train.max_epochs},
                            {"patience", config.train.patience},
                            {"batch_size", config.train.batch_size},
                            {"unlabeled_batch_size", config.train.unlabeled_batch_size}}},
                          {"snapshots", config.snapshots},
                          {"geocode", config.geocode}};
    nlohmann::json inputs = nlohmann::json::array();
    auto add_input = [&](const char* name, const std::optional<Path>& p) {
      if (!p) return;
      const std::string bytes = ReadFile(*p);
      inputs.push_back({{"name", name}, {"bytes", bytes.size()}, {"digest", ContentDigest(bytes)}});
    };
    add_input("corpus", config.corpus);
    add_input("annotations", config.annotations);
    add_input("labeled", config.labeled);
    add_input("regular", config.regular);
    add_input("verb_map", config.verb_map);
    manifest["inputs"] = inputs;
    nlohmann::json stages = nlohmann::json::array();
    nlohmann::json artifacts = nlohmann::json::array();
    for (const auto& r : reports) {
      stages.push_back({{"stage", r.stage}, {"summary", r.summary}, {"warnings", r.warnings.size()}});
      for (const auto& p : r.outputs) {
        const std::string bytes = ReadFile(p);
        artifacts.push_back({{"path", p.filename().string()},
                             {"bytes", bytes.size()},
                             {"digest", ContentDigest(bytes)}});
      }
    }
    manifest["stages"] = stages;
    manifest["artifacts"] = artifacts;
    WriteJson(at("manifest.json"), manifest);

    for (const auto& entry : fs::directory_iterator(stage_dir)) {
      fs::rename(entry.path(), out_dir / entry.path().filename());
    }
    fs::remove_all(stage_dir);
  } catch (...) {
    fs::remove_all(stage_dir, ec);
    throw;
  }
  return reports;
}

}  // namespace cosmos::pipeline
