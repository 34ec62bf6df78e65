#include "cosmos/corpus.h"

#include <sstream>

#include "cosmos/text.h"
#include "doctest.h"
#include "test_support.h"

namespace cosmos {
namespace {

std::vector<std::string> Split(std::string_view paragraph) {
  return DefaultSplitter().Split(paragraph);
}

TEST_CASE("text helpers") {
  CHECK(text::Trim("  a b \n") == "a b");
  CHECK(text::CollapseWhitespace(" a \t b\n\nc ") == "a b c");
  CHECK(text::AsciiLower("Harvard É") == "harvard É");
  // "e" + combining acute composes to U+00E9.
  CHECK(text::NormalizeNfc("Caf\x65\xCC\x81") == "Caf\xC3\xA9");
  CHECK_THROWS(text::NormalizeNfc("\xFF\xFE"));
}

TEST_CASE("tokenizer keeps internal punctuation and peels the edges") {
  using V = std::vector<std::string>;
  CHECK(text::Tokenize("He moved to Paris in 1920.") == V{"He", "moved", "to", "Paris", "in", "1920", "."});
  CHECK(text::Tokenize("(O'Brien, 1845\xE2\x80\x93" "1885)") ==
        V{"(", "O'Brien", ",", "1845\xE2\x80\x93" "1885", ")"});
  CHECK(text::Tokenize("the U.S. Army") == V{"the", "U.S.", "Army"});
  CHECK(text::Tokenize("Dr. Smith") == V{"Dr.", "Smith"});
  CHECK(text::Tokenize("").empty());
  const V hay = {"Moved", "to", "New", "York", "City"};
  CHECK(text::FindTokenRun(hay, V{"new", "york"}) == 2);
  CHECK(text::FindTokenRun(hay, V{"York", "New"}) == -1);
}

TEST_CASE("sentence splitting examples") {
  CHECK(Split("He was born in 1900. He died in 1970.") ==
        std::vector<std::string>{"He was born in 1900.", "He died in 1970."});
  CHECK(Split("").empty());
  CHECK(Split("   ").empty());
  CHECK(Split("Dr. Smith moved.").size() == 1);
  CHECK(Split("J. R. Smith studied in Boston. He left.").size() == 2);
  CHECK(Split("He joined the U.S. Army in 1941.").size() == 1);
  CHECK(Split("Was it 1920? Yes! It was.").size() == 3);
  CHECK(Split("She said \"Go.\" Then she left.").size() == 2);
}

TEST_CASE("segmentation partitions each paragraph") {
  const std::string paragraphs[] = {
      "He was born in 1900 in St. Louis. In 1920 he moved to Paris, France. Mr. Brown "
      "later taught at Harvard University (1950\xE2\x80\x93" "1960)! Did he return? No.",
      "One sentence only",
      "Trailing spaces.   Another one.  "};
  for (const auto& p : paragraphs) {
    auto parts = Split(p);
    std::string joined;
    for (const auto& s : parts) {
      CHECK(s == text::Trim(s));
      CHECK_FALSE(s.empty());
      joined += s;
    }
    std::string squeezed;
    for (char ch : p) {
      if (!std::isspace(static_cast<unsigned char>(ch))) squeezed += ch;
    }
    std::string joined_squeezed;
    for (char ch : joined) {
      if (!std::isspace(static_cast<unsigned char>(ch))) joined_squeezed += ch;
    }
    CHECK(joined_squeezed == squeezed);
  }
}

TEST_CASE("segment sentences numbers paragraphs and sentences densely") {
  BiographyPage page{"p1", "Ann", {"Ann was born in 1900. She moved.", "", "Later life."}};
  auto sentences = SegmentSentences(page);
  REQUIRE(sentences.size() == 3);
  CHECK(sentences[0].paragraph_index == 0);
  CHECK(sentences[1].sentence_index == 1);
  CHECK(sentences[2].paragraph_index == 2);
  CHECK(sentences[2].sentence_index == 0);
  CHECK(sentences[0].tokens.back() == ".");
  CHECK(SegmentSentences(page).size() == 3);
}

TEST_CASE("corpus loading reports malformed records with line numbers") {
  std::istringstream one(R"({"page_id": "a", "title": "A", "paragraphs": ["x."]})" "\n");
  auto r1 = ParseCorpus(one);
  CHECK(r1.pages.size() == 1);
  CHECK(r1.errors.empty());

  std::istringstream mixed(R"({"page_id": "a", "title": "A", "paragraphs": ["x."]})" "\n"
                           "{not json\n"
                           "\n"
                           R"({"page_id": "b", "paragraphs": ["y."]})" "\n"
                           R"({"page_id": "a", "title": "dup", "paragraphs": ["z."]})" "\n"
                           R"({"page_id": "c", "title": "C", "paragraphs": ["Café."]})" "\n");
  auto r2 = ParseCorpus(mixed);
  REQUIRE(r2.pages.size() == 2);
  CHECK(r2.pages[0].page_id == "a");
  CHECK(r2.pages[1].page_id == "c");
  CHECK(r2.pages[1].paragraphs[0] == "Caf\xC3\xA9.");
  REQUIRE(r2.errors.size() == 3);
  CHECK(r2.errors[0].line == 2);
  CHECK(r2.errors[1].line == 4);
  CHECK(r2.errors[2].line == 5);
  CHECK_THROWS_AS(LoadCorpus("/nonexistent/corpus.jsonl"), IoError);
}

TEST_CASE("target sentence filter needs a time and a location") {
  auto span = [](EntityCategory c) { return EntitySpan{c, 0, 1, "x"}; };
  using C = EntityCategory;
  std::vector<Sentence> s(4);
  for (int i = 0; i < 4; ++i) s[i].sentence_index = i;
  std::vector<std::vector<EntitySpan>> ann = {
      {span(C::kTime), span(C::kLocation), span(C::kPerson)},
      {span(C::kTime)},
      {span(C::kLocation), span(C::kTime)}};
  auto kept = FilterTargetSentences(s, ann);
  REQUIRE(kept.size() == 2);
  CHECK(kept[0].sentence_index == 0);
  CHECK(kept[1].sentence_index == 2);
  std::vector<std::vector<EntitySpan>> ann_kept = {ann[0], ann[2]};
  CHECK(FilterTargetSentences(kept, ann_kept).size() == 2);
}

TEST_CASE("target filter matches a brute-force scan on random annotations") {
  Rng rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Sentence> s(10);
    std::vector<std::vector<EntitySpan>> ann(10);
    std::vector<int> expect;
    for (int i = 0; i < 10; ++i) {
      s[i].sentence_index = i;
      bool t = false, l = false;
      const int k = static_cast<int>(rng.Below(4));
      for (int j = 0; j < k; ++j) {
        auto c = static_cast<EntityCategory>(rng.Below(4));
        t |= c == EntityCategory::kTime;
        l |= c == EntityCategory::kLocation;
        ann[i].push_back({c, j, j + 1, "w"});
      }
      if (t && l) expect.push_back(i);
    }
    auto kept = FilterTargetSentences(s, ann);
    std::vector<int> got;
    for (const auto& k : kept) got.push_back(k.sentence_index);
    CHECK(got == expect);
  }
}

}  // namespace
}  // namespace cosmos
