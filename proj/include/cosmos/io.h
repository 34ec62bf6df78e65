#ifndef COSMOS_IO_H_
#define COSMOS_IO_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace cosmos {

// Input the user can fix (bad file, bad flag value, malformed schema).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A malformed record inside an otherwise readable file.
struct RecordError {
  size_t line = 0;  // 1-based
  std::string message;
};

std::string ReadFile(const std::filesystem::path& path);

// Writes `content` to a sibling temp file and renames it over `path`, so
// readers never observe a partial file.
void AtomicWriteFile(const std::filesystem::path& path, const std::string& content);

// Buffers output and commits it atomically; nothing is written unless
// Commit() is called.
class AtomicOutput {
 public:
  explicit AtomicOutput(std::filesystem::path path) : path_(std::move(path)) {}
  std::ostream& stream() { return buffer_; }
  void Commit() { AtomicWriteFile(path_, buffer_.str()); }

 private:
  std::filesystem::path path_;
  std::ostringstream buffer_;
};

// Calls `fn(line_number, object)` for every non-blank line. Lines that are
// not valid JSON are reported in the returned list and skipped.
std::vector<RecordError> ForEachJsonLine(
    const std::filesystem::path& path,
    const std::function<void(size_t, const nlohmann::json&)>& fn);
std::vector<RecordError> ForEachJsonLine(
    std::istream& in, const std::function<void(size_t, const nlohmann::json&)>& fn);

// Compact single-line serialization, newline included, used for every JSONL
// artifact.
std::string JsonLine(const nlohmann::json& j);

// 64-bit FNV-1a content digest, hex encoded. Used for artifact manifests.
std::string ContentDigest(const std::string& bytes);

}  // namespace cosmos

#endif  // COSMOS_IO_H_
