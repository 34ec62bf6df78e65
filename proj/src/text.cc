#include "cosmos/text.h"

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include <cctype>
#include <stdexcept>

namespace cosmos::text {
namespace {

bool IsSpace(unsigned char c) { return std::isspace(c) != 0; }

// Punctuation peeled from token edges. Multi-byte quotes are handled by
// CountEdgeQuote below.
bool IsEdgePunct(unsigned char c) {
  switch (c) {
    case '.': case ',': case ';': case ':': case '!': case '?':
    case '(': case ')': case '[': case ']': case '{': case '}':
    case '"': case '\'':
      return true;
    default:
      return false;
  }
}

// Length in bytes of a typographic quote (U+2018/2019/201C/201D) at `pos`.
size_t CurlyQuoteAt(std::string_view s, size_t pos) {
  if (pos + 3 <= s.size() && static_cast<unsigned char>(s[pos]) == 0xE2 &&
      static_cast<unsigned char>(s[pos + 1]) == 0x80) {
    const unsigned char c = s[pos + 2];
    if (c == 0x98 || c == 0x99 || c == 0x9C || c == 0x9D) return 3;
  }
  return 0;
}

bool KeepsTrailingPeriod(std::string_view word) {
  // Initials and dotted acronyms: "H.", "U.S.", "e.g."
  if (word.size() >= 2 && word.back() == '.') {
    bool has_inner_dot = word.substr(0, word.size() - 1).find('.') != std::string_view::npos;
    if (has_inner_dot) return true;
    if (word.size() == 2 && std::isupper(static_cast<unsigned char>(word[0]))) return true;
  }
  static const char* kAbbrev[] = {"Dr.", "Mr.", "Mrs.", "Ms.", "St.", "Prof.", "Jr.",
                                  "Sr.", "Gen.", "Col.", "Lt.", "Capt.", "Rev.", "Mt.",
                                  "Ft.", "vs.", "No.", "Sgt.", "Gov.", "Sen.", "Rep."};
  for (const char* a : kAbbrev) {
    if (word == a) return true;
  }
  return false;
}

}  // namespace

std::string NormalizeNfc(std::string_view utf8) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU NFC normalizer unavailable");
  icu::UnicodeString in = icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  if (in.indexOf(static_cast<UChar>(0xFFFD)) >= 0 &&
      utf8.find("\xEF\xBF\xBD") == std::string_view::npos) {
    throw std::runtime_error("invalid UTF-8 input");
  }
  icu::UnicodeString out = nfc->normalize(in, status);
  if (U_FAILURE(status)) throw std::runtime_error("NFC normalization failed");
  std::string result;
  out.toUTF8String(result);
  return result;
}

std::string Trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && IsSpace(s[b])) ++b;
  while (e > b && IsSpace(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::string CollapseWhitespace(std::string_view s) {
  std::string out;
  bool pending = false;
  for (char c : s) {
    if (IsSpace(c)) {
      pending = !out.empty();
    } else {
      if (pending) out.push_back(' ');
      pending = false;
      out.push_back(c);
    }
  }
  return out;
}

std::string AsciiLower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string> Tokenize(std::string_view s) {
  std::vector<std::string> tokens;
  size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && IsSpace(s[i])) ++i;
    if (i >= s.size()) break;
    size_t j = i;
    while (j < s.size() && !IsSpace(s[j])) ++j;
    std::string_view word = s.substr(i, j - i);
    i = j;

    std::vector<std::string> leading, trailing;
    while (!word.empty()) {
      if (size_t q = CurlyQuoteAt(word, 0)) {
        leading.emplace_back(word.substr(0, q));
        word.remove_prefix(q);
      } else if (word.size() > 1 && IsEdgePunct(word.front())) {
        leading.emplace_back(word.substr(0, 1));
        word.remove_prefix(1);
      } else {
        break;
      }
    }
    while (word.size() > 1) {
      if (word.size() >= 3 && CurlyQuoteAt(word, word.size() - 3) == 3 && word.size() > 3) {
        trailing.emplace_back(word.substr(word.size() - 3));
        word.remove_suffix(3);
      } else if (IsEdgePunct(word.back())) {
        if (word.back() == '.' && KeepsTrailingPeriod(word)) break;
        trailing.emplace_back(word.substr(word.size() - 1));
        word.remove_suffix(1);
      } else {
        break;
      }
    }
    for (auto& t : leading) tokens.push_back(std::move(t));
    if (!word.empty()) tokens.emplace_back(word);
    for (auto it = trailing.rbegin(); it != trailing.rend(); ++it) tokens.push_back(*it);
  }
  return tokens;
}

std::string Join(std::span<const std::string> tokens, std::string_view sep) {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.append(sep);
    out.append(tokens[i]);
  }
  return out;
}

int FindTokenRun(std::span<const std::string> hay, std::span<const std::string> needle) {
  if (needle.empty() || needle.size() > hay.size()) return -1;
  for (size_t i = 0; i + needle.size() <= hay.size(); ++i) {
    bool match = true;
    for (size_t k = 0; k < needle.size() && match; ++k) {
      match = AsciiLower(hay[i + k]) == AsciiLower(needle[k]);
    }
    if (match) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace cosmos::text
