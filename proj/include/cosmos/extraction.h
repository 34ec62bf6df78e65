#ifndef COSMOS_EXTRACTION_H_
#define COSMOS_EXTRACTION_H_

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "cosmos/corpus.h"
#include "cosmos/entity.h"
#include "json.hpp"

namespace cosmos {

// Backend NER label over [start, end) tokens: PERSON, DATE, TIME, DURATION,
// GPE, LOC, EVENT, FAC, ORG, ... Verbs arrive either as part-of-speech tags
// or as entities labelled VERB.
struct RawEntity {
  std::string label;
  int start = 0;
  int end = 0;
};

struct SentenceAnnotation {
  std::vector<std::string> tokens;
  std::vector<RawEntity> entities;
  std::vector<std::string> pos;  // optional, one tag per token
  std::vector<int> heads;        // root is -1 or its own index
};

// Dependency tree over the tokens of one sentence.
class ParseTree {
 public:
  // Throws InputError unless the heads describe exactly one root, no cycles
  // and in-range indices.
  explicit ParseTree(std::vector<int> heads);

  int size() const { return static_cast<int>(heads_.size()); }
  int root() const { return root_; }
  // Head of `token`; the root returns -1.
  int head(int token) const { return heads_.at(token); }
  int depth(int token) const { return depth_.at(token); }

 private:
  std::vector<int> heads_;
  std::vector<int> depth_;
  int root_ = -1;
};

// Edges from a to LCA(a, b) plus edges from b to the LCA. Throws
// std::out_of_range for invalid tokens.
int LcaDistance(const ParseTree& tree, int a, int b);

struct SentenceRef {
  std::string page_id;
  int paragraph_index = 0;
  int sentence_index = 0;
  bool operator==(const SentenceRef&) const = default;
};

struct CandidateTriplet {
  EntitySpan person;
  EntitySpan time;
  EntitySpan location;
  EntitySpan verb;
  SentenceRef ref;
};

// Maps backend labels onto the four categories, adds personal pronouns as
// PERSON and verbs as VERB, drops everything else. Overlapping spans of one
// category keep the longer span (earlier on ties).
std::vector<EntitySpan> CategorizeEntities(const SentenceAnnotation& annotation);

bool IsPersonalPronoun(std::string_view token);

// Token that represents `span` in the tree: the span token whose head lies
// outside the span (the shallowest one if several), else the last token.
int AnchorToken(const EntitySpan& span, const ParseTree& tree);

// For each PERSON span: the verb with minimal LCA distance, then the TIME and
// LOCATION spans closest to that verb. Ties prefer smaller linear token
// distance, then the leftmost span. Persons lacking a verb, time or location
// yield nothing.
std::vector<CandidateTriplet> SelectRelevantPairs(std::span<const EntitySpan> entities,
                                                  const ParseTree& tree,
                                                  const SentenceRef& ref = {});

// Supplies tokens, entities and a parse for a sentence. Implementations
// throw on failure. FileAnnotationBackend is safe to share between threads
// only in keyed mode; sequential mode keeps a cursor and is per-worker.
class NlpBackend {
 public:
  virtual ~NlpBackend() = default;
  virtual SentenceAnnotation Annotate(const Sentence& sentence) = 0;
};

// Precomputed annotations, one JSON object per line:
//   {"tokens": [...], "entities": [{"label", "start", "end"}], "heads": [...],
//    "pos": [...]?, "page_id"?, "paragraph_index"?, "sentence_index"?}
// Records carrying page/paragraph/sentence keys are looked up by key; records
// without keys are served in file order.
class FileAnnotationBackend : public NlpBackend {
 public:
  static FileAnnotationBackend Load(const std::filesystem::path& path);
  static FileAnnotationBackend Parse(std::istream& in);

  SentenceAnnotation Annotate(const Sentence& sentence) override;
  const std::vector<RecordError>& errors() const { return errors_; }

 private:
  using Key = std::tuple<std::string, int, int>;
  std::map<Key, SentenceAnnotation> keyed_;
  std::vector<SentenceAnnotation> ordered_;
  size_t cursor_ = 0;
  std::vector<RecordError> errors_;
};

SentenceAnnotation ParseSentenceAnnotation(const nlohmann::json& j);

struct ExtractionResult {
  std::vector<CandidateTriplet> triplets;
  std::vector<std::string> warnings;
};

inline constexpr int kMaxSentenceTokens = 512;

// Runs categorization, target filtering and pair selection over sentences in
// the given order. Backend failures skip the sentence with a warning.
ExtractionResult ExtractFromSentences(std::span<const Sentence> sentences, NlpBackend& backend);

ExtractionResult ExtractCandidates(const BiographyPage& page, NlpBackend& backend,
                                   const SentenceSplitter& splitter = DefaultSplitter());

nlohmann::json SpanToJson(const EntitySpan& span);
nlohmann::json TripletToJson(const CandidateTriplet& t);

}  // namespace cosmos

#endif  // COSMOS_EXTRACTION_H_
