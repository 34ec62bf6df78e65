#ifndef COSMOS_TEXT_H_
#define COSMOS_TEXT_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cosmos::text {

// Unicode NFC of a UTF-8 string. Throws std::runtime_error on invalid UTF-8.
std::string NormalizeNfc(std::string_view utf8);

std::string Trim(std::string_view s);
std::string CollapseWhitespace(std::string_view s);
std::string AsciiLower(std::string_view s);

// Word tokenizer: splits on whitespace and peels off leading/trailing
// punctuation. Internal hyphens, dashes, apostrophes and periods stay inside
// the token ("1845–1885", "O'Brien", "U.S.").
std::vector<std::string> Tokenize(std::string_view s);

std::string Join(std::span<const std::string> tokens, std::string_view sep = " ");

// First index at which `needle` occurs as a contiguous token run in `hay`
// (ASCII case-insensitive), or -1.
int FindTokenRun(std::span<const std::string> hay, std::span<const std::string> needle);

}  // namespace cosmos::text

#endif  // COSMOS_TEXT_H_
