#ifndef COSMOS_HTTP_H_
#define COSMOS_HTTP_H_

#include <chrono>
#include <map>
#include <string>

namespace cosmos::http {

struct Url {
  std::string scheme;  // "http" or "https"
  std::string host;
  int port = 0;
  std::string path;  // begins with '/', may carry a query
};

// Throws InputError for anything but http(s)://host[:port][/path].
Url ParseUrl(const std::string& url);

std::string PercentEncode(const std::string& s);

struct Response {
  int status = 0;
  std::string body;
};

using Headers = std::multimap<std::string, std::string>;

// Blocking requests. Transport failures (refused, timeout, TLS) throw
// IoError; HTTP error statuses are returned to the caller.
Response Get(const Url& url, const Headers& headers, std::chrono::milliseconds timeout);
Response PostJson(const Url& url, const std::string& body, const Headers& headers,
                  std::chrono::milliseconds timeout);

}  // namespace cosmos::http

#endif  // COSMOS_HTTP_H_
