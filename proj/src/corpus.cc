#include "cosmos/corpus.h"

#include <cctype>
#include <fstream>
#include <unordered_set>

#include "cosmos/text.h"

namespace cosmos {

std::string_view CategoryName(EntityCategory c) {
  switch (c) {
    case EntityCategory::kPerson: return "PERSON";
    case EntityCategory::kTime: return "TIME";
    case EntityCategory::kLocation: return "LOCATION";
    case EntityCategory::kVerb: return "VERB";
  }
  return "?";
}

std::optional<EntityCategory> ParseCategory(std::string_view name) {
  if (name == "PERSON") return EntityCategory::kPerson;
  if (name == "TIME") return EntityCategory::kTime;
  if (name == "LOCATION") return EntityCategory::kLocation;
  if (name == "VERB") return EntityCategory::kVerb;
  return std::nullopt;
}

CorpusLoadResult ParseCorpus(std::istream& in) {
  CorpusLoadResult result;
  std::unordered_set<std::string> seen;
  auto parse_errors = ForEachJsonLine(in, [&](size_t line, const nlohmann::json& j) {
    auto fail = [&](std::string msg) { result.errors.push_back({line, std::move(msg)}); };
    if (!j.is_object()) return fail("record is not an object");
    if (!j.contains("page_id") || !j["page_id"].is_string()) return fail("missing string page_id");
    if (!j.contains("title") || !j["title"].is_string()) return fail("missing string title");
    if (!j.contains("paragraphs") || !j["paragraphs"].is_array()) {
      return fail("missing paragraphs array");
    }
    BiographyPage page;
    try {
      page.page_id = text::NormalizeNfc(j["page_id"].get<std::string>());
      page.title = text::NormalizeNfc(j["title"].get<std::string>());
      for (const auto& p : j["paragraphs"]) {
        if (!p.is_string()) return fail("paragraph is not a string");
        std::string para = text::NormalizeNfc(p.get<std::string>());
        if (text::Trim(para).empty()) return fail("empty paragraph");
        page.paragraphs.push_back(std::move(para));
      }
    } catch (const std::runtime_error& e) {
      return fail(e.what());
    }
    if (!seen.insert(page.page_id).second) return fail("duplicate page_id " + page.page_id);
    result.pages.push_back(std::move(page));
  });
  // JSON syntax errors interleave with schema errors by line.
  result.errors.insert(result.errors.end(), parse_errors.begin(), parse_errors.end());
  std::stable_sort(result.errors.begin(), result.errors.end(),
                   [](const RecordError& a, const RecordError& b) { return a.line < b.line; });
  return result;
}

CorpusLoadResult LoadCorpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open corpus " + path.string());
  return ParseCorpus(in);
}

RuleBasedSplitter::RuleBasedSplitter()
    : RuleBasedSplitter({"Dr.", "Mr.", "Mrs.", "Ms.", "St.", "Prof.", "Jr.", "Sr.", "Gen.",
                         "Col.", "Lt.", "Capt.", "Rev.", "Hon.", "Mt.", "Ft.", "vs.", "No.",
                         "Sgt.", "Gov.", "Sen.", "Rep.", "Gen.", "Adm.", "Maj.", "e.g.",
                         "i.e.", "cf.", "ca.", "c.", "Jan.", "Feb.", "Mar.", "Apr.", "Aug.",
                         "Sept.", "Sep.", "Oct.", "Nov.", "Dec."}) {}

RuleBasedSplitter::RuleBasedSplitter(std::vector<std::string> abbreviations)
    : abbreviations_(std::move(abbreviations)) {}

bool RuleBasedSplitter::IsNonTerminal(std::string_view word) const {
  // Strip opening punctuation: "(Dr." -> "Dr."
  while (!word.empty() && (word.front() == '(' || word.front() == '"' || word.front() == '\'')) {
    word.remove_prefix(1);
  }
  for (const auto& a : abbreviations_) {
    if (word == a) return true;
  }
  if (word.size() == 2 && std::isupper(static_cast<unsigned char>(word[0]))) return true;
  // Dotted acronyms such as "U.S." are treated as non-terminal.
  return word.size() > 2 && word.substr(0, word.size() - 1).find('.') != std::string_view::npos &&
         std::isalpha(static_cast<unsigned char>(word[word.size() - 2]));
}

std::vector<std::string> RuleBasedSplitter::Split(std::string_view p) const {
  std::vector<std::string> out;
  auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  auto is_closer = [&](size_t i) {
    const char c = p[i];
    if (c == '"' || c == '\'' || c == ')' || c == ']') return size_t{1};
    if (i + 2 < p.size() && static_cast<unsigned char>(c) == 0xE2 &&
        static_cast<unsigned char>(p[i + 1]) == 0x80 &&
        (static_cast<unsigned char>(p[i + 2]) == 0x9D ||
         static_cast<unsigned char>(p[i + 2]) == 0x99)) {
      return size_t{3};
    }
    return size_t{0};
  };
  size_t start = 0;
  for (size_t i = 0; i < p.size(); ++i) {
    const char c = p[i];
    if (c != '.' && c != '?' && c != '!') continue;
    size_t end = i + 1;
    while (end < p.size()) {
      size_t w = is_closer(end);
      if (!w) break;
      end += w;
    }
    if (end < p.size() && !is_space(p[end])) continue;
    size_t next = end;
    while (next < p.size() && is_space(p[next])) ++next;
    if (next < p.size()) {
      const unsigned char n = p[next];
      const bool opener = n == '"' || n == '(' || n == '\'' || n == 0xE2;
      if (!std::isupper(n) && !std::isdigit(n) && !opener) continue;
    }
    if (c == '.') {
      size_t ws = i;
      while (ws > start && !is_space(p[ws - 1])) --ws;
      if (IsNonTerminal(p.substr(ws, i + 1 - ws))) continue;
    }
    std::string sentence = text::Trim(p.substr(start, end - start));
    if (!sentence.empty()) out.push_back(std::move(sentence));
    start = end;
    i = end - 1;
  }
  std::string tail = text::Trim(p.substr(start));
  if (!tail.empty()) out.push_back(std::move(tail));
  return out;
}

const SentenceSplitter& DefaultSplitter() {
  static const RuleBasedSplitter splitter;
  return splitter;
}

std::vector<Sentence> SegmentParagraph(std::string_view page_id, int paragraph_index,
                                       std::string_view paragraph,
                                       const SentenceSplitter& splitter) {
  std::vector<Sentence> out;
  int index = 0;
  for (auto& s : splitter.Split(paragraph)) {
    Sentence sentence;
    sentence.page_id = std::string(page_id);
    sentence.paragraph_index = paragraph_index;
    sentence.sentence_index = index++;
    sentence.tokens = text::Tokenize(s);
    sentence.text = std::move(s);
    out.push_back(std::move(sentence));
  }
  return out;
}

std::vector<Sentence> SegmentSentences(const BiographyPage& page,
                                       const SentenceSplitter& splitter) {
  std::vector<Sentence> out;
  for (size_t p = 0; p < page.paragraphs.size(); ++p) {
    auto para = SegmentParagraph(page.page_id, static_cast<int>(p), page.paragraphs[p], splitter);
    out.insert(out.end(), std::make_move_iterator(para.begin()),
               std::make_move_iterator(para.end()));
  }
  return out;
}

bool IsTargetSentence(std::span<const EntitySpan> spans) {
  bool has_time = false, has_location = false;
  for (const auto& s : spans) {
    has_time |= s.category == EntityCategory::kTime;
    has_location |= s.category == EntityCategory::kLocation;
  }
  return has_time && has_location;
}

std::vector<Sentence> FilterTargetSentences(std::span<const Sentence> sentences,
                                            std::span<const std::vector<EntitySpan>> annotations) {
  std::vector<Sentence> out;
  for (size_t i = 0; i < sentences.size(); ++i) {
    if (i < annotations.size() && IsTargetSentence(annotations[i])) out.push_back(sentences[i]);
  }
  return out;
}

}  // namespace cosmos
