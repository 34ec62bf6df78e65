#include "cosmos/context.h"

#include <fstream>

#include "cosmos/text.h"

namespace cosmos {

std::string_view SourceName(LabelSource s) {
  switch (s) {
    case LabelSource::kManual: return "manual";
    case LabelSource::kLlm: return "llm";
    case LabelSource::kUnlabeled: return "unlabeled";
  }
  return "?";
}

namespace {

bool Mentions(const Sentence& s, const std::string& element) {
  const std::string needle = text::CollapseWhitespace(element);
  if (needle.empty()) return false;
  if (text::CollapseWhitespace(s.text).find(needle) != std::string::npos) return true;
  const auto tokens = text::Tokenize(needle);
  return text::FindTokenRun(s.tokens, tokens) >= 0;
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

EntitySpan LocateSpan(EntityCategory c, const std::string& element, const Sentence& s) {
  const std::string trimmed = text::Trim(element);
  auto tokens = text::Tokenize(trimmed);
  int at = text::FindTokenRun(s.tokens, tokens);
  if (at < 0) return {c, -1, -1, trimmed};
  return {c, at, at + static_cast<int>(tokens.size()), trimmed};
}

}  // namespace

std::vector<std::string> BuildContext(const CandidateTriplet& triplet,
                                      std::span<const Sentence> paragraph) {
  std::vector<std::string> context;
  for (const Sentence& s : paragraph) {
    const bool own = s.sentence_index == triplet.ref.sentence_index;
    if (own || Mentions(s, triplet.time.text) || Mentions(s, triplet.location.text)) {
      context.insert(context.end(), s.tokens.begin(), s.tokens.end());
    }
  }
  return context;
}

std::vector<std::string> BuildInputSequence(const CandidateTriplet& triplet,
                                            std::span<const std::string> context, size_t cap) {
  std::vector<std::string> seq;
  for (const EntitySpan* e : {&triplet.person, &triplet.time, &triplet.location}) {
    auto tokens = text::Tokenize(e->text);
    seq.insert(seq.end(), tokens.begin(), tokens.end());
  }
  seq.emplace_back(kSeparatorToken);
  const size_t room = seq.size() >= cap ? 0 : cap - seq.size();
  const size_t take = std::min(room, context.size());
  seq.insert(seq.end(), context.begin(), context.begin() + take);
  return seq;
}

Example ExampleFromRecord(const nlohmann::json& record) {
  if (!record.is_object()) throw InputError("record is not an object");
  Example ex;
  const std::string person = ElementText(record, "person");
  const std::string time = ElementText(record, "time");
  const std::string location = ElementText(record, "location");
  if (!record.contains("paragraph") || !record["paragraph"].is_string()) {
    throw InputError("missing string paragraph");
  }
  if (!record.contains("page_id") || !record["page_id"].is_string()) {
    throw InputError("missing string page_id");
  }
  ex.paragraph = text::NormalizeNfc(record["paragraph"].get<std::string>());
  ex.title = record.value("title", std::string());
  const std::string page_id = record["page_id"].get<std::string>();
  const int paragraph_index = record.value("paragraph_index", 0);
  auto sentences = SegmentParagraph(page_id, paragraph_index, ex.paragraph);
  if (sentences.empty()) throw InputError("empty paragraph");

  int source = -1;
  if (record.contains("sentence_index")) {
    source = record["sentence_index"].get<int>();
    if (source < 0 || source >= static_cast<int>(sentences.size())) {
      throw InputError("sentence_index outside the paragraph");
    }
  } else {
    for (const auto& s : sentences) {
      if (Mentions(s, time) && Mentions(s, location)) { source = s.sentence_index; break; }
    }
    for (size_t i = 0; source < 0 && i < sentences.size(); ++i) {
      if (Mentions(sentences[i], time) || Mentions(sentences[i], location)) source = static_cast<int>(i);
    }
    if (source < 0) throw InputError("neither time nor location occurs in the paragraph");
  }
  const Sentence& src = sentences[source];
  CandidateTriplet& t = ex.triplet;
  t.ref = {page_id, paragraph_index, source};
  t.person = LocateSpan(EntityCategory::kPerson, person, src);
  t.time = LocateSpan(EntityCategory::kTime, time, src);
  t.location = LocateSpan(EntityCategory::kLocation, location, src);
  t.verb = record.contains("verb") ? LocateSpan(EntityCategory::kVerb, ElementText(record, "verb"), src)
                                   : EntitySpan{EntityCategory::kVerb, -1, -1, ""};
  ex.context = BuildContext(t, sentences);
  for (const EntitySpan* e : {&t.person, &t.time, &t.location}) {
    if (text::FindTokenRun(ex.context, text::Tokenize(e->text)) < 0) {
      throw InputError("triplet element \"" + e->text + "\" not found in its context");
    }
  }

  const std::string source_name = record.value("source", std::string());
  if (record.contains("label") && !record["label"].is_null()) {
    const auto& l = record["label"];
    int label = l.is_boolean() ? static_cast<int>(l.get<bool>()) : l.get<int>();
    if (label != 0 && label != 1) throw InputError("label must be 0 or 1");
    if (source_name == "unlabeled") throw InputError("labeled record marked unlabeled");
    ex.label = label;
    ex.source = source_name == "llm" ? LabelSource::kLlm : LabelSource::kManual;
  } else {
    if (!source_name.empty() && source_name != "unlabeled") {
      throw InputError("record from source " + source_name + " has no label");
    }
    ex.source = LabelSource::kUnlabeled;
  }
  return ex;
}

nlohmann::json ExampleToRecord(const Example& ex) {
  nlohmann::json j = {{"page_id", ex.triplet.ref.page_id},
                      {"paragraph_index", ex.triplet.ref.paragraph_index},
                      {"sentence_index", ex.triplet.ref.sentence_index},
                      {"person", ex.triplet.person.text},
                      {"time", ex.triplet.time.text},
                      {"location", ex.triplet.location.text},
                      {"paragraph", ex.paragraph},
                      {"source", SourceName(ex.source)}};
  if (!ex.triplet.verb.text.empty()) j["verb"] = ex.triplet.verb.text;
  if (!ex.title.empty()) j["title"] = ex.title;
  if (ex.label) j["label"] = *ex.label;
  return j;
}

DatasetLoadResult LoadDataset(const std::filesystem::path& path) {
  DatasetLoadResult result;
  auto errs = ForEachJsonLine(path, [&](size_t line, const nlohmann::json& j) {
    try {
      result.examples.push_back(ExampleFromRecord(j));
    } catch (const std::exception& e) {
      result.errors.push_back({line, e.what()});
    }
  });
  result.errors.insert(result.errors.end(), errs.begin(), errs.end());
  std::stable_sort(result.errors.begin(), result.errors.end(),
                   [](const auto& a, const auto& b) { return a.line < b.line; });
  return result;
}

}  // namespace cosmos
