#include "cosmos/io.h"

#include <cstdio>
#include <fstream>
#include <iomanip>

namespace cosmos {

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return ss.str();
}

void AtomicWriteFile(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      out.close();
      std::filesystem::remove(tmp);
      throw IoError("write failed: " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IoError("rename failed for " + path.string() + ": " + ec.message());
  }
}

std::vector<RecordError> ForEachJsonLine(
    std::istream& in, const std::function<void(size_t, const nlohmann::json&)>& fn) {
  std::vector<RecordError> errors;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      errors.push_back({line_no, std::string("invalid JSON: ") + e.what()});
      continue;
    }
    fn(line_no, j);
  }
  if (in.bad()) throw IoError("read failed");
  return errors;
}

std::vector<RecordError> ForEachJsonLine(
    const std::filesystem::path& path,
    const std::function<void(size_t, const nlohmann::json&)>& fn) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return ForEachJsonLine(in, fn);
}

std::string JsonLine(const nlohmann::json& j) { return j.dump(-1, ' ', false) + "\n"; }

std::string ContentDigest(const std::string& bytes) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace cosmos
