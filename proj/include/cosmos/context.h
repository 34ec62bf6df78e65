#ifndef COSMOS_CONTEXT_H_
#define COSMOS_CONTEXT_H_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cosmos/corpus.h"
#include "cosmos/extraction.h"
#include "json.hpp"

namespace cosmos {

enum class LabelSource { kManual, kLlm, kUnlabeled };

std::string_view SourceName(LabelSource s);

// A candidate with its context tokens and, unless unlabeled, a 0/1 label.
// For examples loaded from dataset files the element spans index the source
// sentence; an element that only occurs elsewhere in the context keeps
// token_start = token_end = -1.
struct Example {
  CandidateTriplet triplet;
  std::vector<std::string> context;
  std::optional<int> label;
  LabelSource source = LabelSource::kUnlabeled;
  std::string paragraph;
  std::string title;
};

inline constexpr std::string_view kSeparatorToken = "[SEP]";
inline constexpr size_t kMaxInputTokens = 512;

// Tokens of every paragraph sentence whose text contains the triplet's time
// or location string (whitespace-normalized), plus the triplet's own
// sentence, in document order.
std::vector<std::string> BuildContext(const CandidateTriplet& triplet,
                                      std::span<const Sentence> paragraph);

// [person, time, location, [SEP], context...], with the context truncated so
// the whole sequence fits in `cap` tokens. Triplet tokens are never cut.
std::vector<std::string> BuildInputSequence(const CandidateTriplet& triplet,
                                            std::span<const std::string> context,
                                            size_t cap = kMaxInputTokens);

// Dataset records: {"person", "time", "location", "label"?, "paragraph",
// "page_id", "source"?, "title"?, "paragraph_index"?, "sentence_index"?}.
// Element fields may be plain strings or {"text", "start", "end"} objects as
// written by the extractor. Throws InputError on schema violations or when a
// triplet element does not occur in the context.
Example ExampleFromRecord(const nlohmann::json& record);
nlohmann::json ExampleToRecord(const Example& example);

struct DatasetLoadResult {
  std::vector<Example> examples;
  std::vector<RecordError> errors;
};

DatasetLoadResult LoadDataset(const std::filesystem::path& path);

}  // namespace cosmos

#endif  // COSMOS_CONTEXT_H_
