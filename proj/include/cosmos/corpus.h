#ifndef COSMOS_CORPUS_H_
#define COSMOS_CORPUS_H_

#include <filesystem>
#include <istream>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cosmos/entity.h"
#include "cosmos/io.h"

namespace cosmos {

struct BiographyPage {
  std::string page_id;
  std::string title;
  std::vector<std::string> paragraphs;
};

struct Sentence {
  std::string page_id;
  int paragraph_index = 0;
  int sentence_index = 0;
  std::string text;
  std::vector<std::string> tokens;
};

struct CorpusLoadResult {
  std::vector<BiographyPage> pages;
  std::vector<RecordError> errors;
};

// Reads a JSON Lines corpus ({"page_id", "title", "paragraphs"} per line).
// Text is NFC-normalized. Malformed records and duplicate page ids are
// reported per line; an unreadable file throws IoError.
CorpusLoadResult LoadCorpus(const std::filesystem::path& path);
CorpusLoadResult ParseCorpus(std::istream& in);

class SentenceSplitter {
 public:
  virtual ~SentenceSplitter() = default;
  // Returns the sentences of `paragraph` in order. Each is a trimmed
  // substring, and together they cover every non-whitespace character.
  virtual std::vector<std::string> Split(std::string_view paragraph) const = 0;
};

// Splits after '.', '?' or '!' (plus closing quotes/brackets) when followed
// by whitespace and an uppercase letter, digit or opening quote. A period
// that ends a known abbreviation or a single-letter initial never splits.
class RuleBasedSplitter : public SentenceSplitter {
 public:
  RuleBasedSplitter();
  explicit RuleBasedSplitter(std::vector<std::string> abbreviations);
  std::vector<std::string> Split(std::string_view paragraph) const override;

 private:
  bool IsNonTerminal(std::string_view word) const;
  std::vector<std::string> abbreviations_;
};

const SentenceSplitter& DefaultSplitter();

std::vector<Sentence> SegmentSentences(const BiographyPage& page,
                                       const SentenceSplitter& splitter = DefaultSplitter());

// Sentences of one paragraph, in order.
std::vector<Sentence> SegmentParagraph(std::string_view page_id, int paragraph_index,
                                       std::string_view paragraph,
                                       const SentenceSplitter& splitter = DefaultSplitter());

// Keeps the sentences with at least one TIME span and at least one LOCATION
// span. `annotations[i]` belongs to `sentences[i]`; missing trailing entries
// count as "no entities".
std::vector<Sentence> FilterTargetSentences(std::span<const Sentence> sentences,
                                            std::span<const std::vector<EntitySpan>> annotations);

bool IsTargetSentence(std::span<const EntitySpan> spans);

}  // namespace cosmos

#endif  // COSMOS_CORPUS_H_
