#include "cosmos/http.h"

#include <regex>

#include "cosmos/io.h"
#include "httplib.h"

namespace cosmos::http {
namespace {

std::unique_ptr<httplib::Client> MakeClient(const Url& url, std::chrono::milliseconds timeout) {
  const std::string base = url.scheme + "://" + url.host + ":" + std::to_string(url.port);
  auto client = std::make_unique<httplib::Client>(base);
  if (!client->is_valid()) throw IoError("cannot create HTTP client for " + base);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
  client->set_connection_timeout(secs.count(), usecs.count());
  client->set_read_timeout(secs.count(), usecs.count());
  client->set_write_timeout(secs.count(), usecs.count());
  return client;
}

Response Unwrap(const httplib::Result& r, const Url& url) {
  if (!r) {
    throw IoError("request to " + url.host + url.path + " failed: " + httplib::to_string(r.error()));
  }
  return {r->status, r->body};
}

}  // namespace

Url ParseUrl(const std::string& url) {
  static const std::regex re(R"(^(https?)://([^/:?#]+)(?::(\d+))?([/?].*)?$)", std::regex::icase);
  std::smatch m;
  if (!std::regex_match(url, m, re)) throw InputError("unsupported URL: " + url);
  Url u;
  u.scheme = m[1].str();
  for (auto& c : u.scheme) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  u.host = m[2].str();
  u.port = m[3].matched ? std::stoi(m[3].str()) : (u.scheme == "https" ? 443 : 80);
  u.path = m[4].matched ? m[4].str() : "/";
  if (u.path.front() == '?') u.path = "/" + u.path;
  return u;
}

std::string PercentEncode(const std::string& s) {
  static const char* kHex = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 15];
    }
  }
  return out;
}

Response Get(const Url& url, const Headers& headers, std::chrono::milliseconds timeout) {
  auto client = MakeClient(url, timeout);
  httplib::Headers h(headers.begin(), headers.end());
  return Unwrap(client->Get(url.path, h), url);
}

Response PostJson(const Url& url, const std::string& body, const Headers& headers,
                  std::chrono::milliseconds timeout) {
  auto client = MakeClient(url, timeout);
  httplib::Headers h(headers.begin(), headers.end());
  return Unwrap(client->Post(url.path, h, body, "application/json"), url);
}

}  // namespace cosmos::http
