#include "cosmos/analysis.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <regex>
#include <set>
#include <thread>

#include "cosmos/extraction.h"
#include "cosmos/http.h"
#include "cosmos/io.h"
#include "cosmos/text.h"

namespace cosmos::analysis {

// ---------------------------------------------------------------- persons

namespace {

bool CoversMention(const std::string& name, const std::vector<std::string>& mention) {
  std::set<std::string> name_tokens;
  for (const auto& t : text::Tokenize(name)) name_tokens.insert(text::AsciiLower(t));
  for (const auto& t : mention) {
    if (!name_tokens.count(text::AsciiLower(t))) return false;
  }
  return true;
}

}  // namespace

DefaultPersonResolver::DefaultPersonResolver(std::vector<std::string> known_subjects) {
  for (auto& s : known_subjects) {
    s = text::CollapseWhitespace(s);
    if (!s.empty()) known_subjects_.push_back(std::move(s));
  }
  std::sort(known_subjects_.begin(), known_subjects_.end());
  known_subjects_.erase(std::unique(known_subjects_.begin(), known_subjects_.end()),
                        known_subjects_.end());
}

std::string DefaultPersonResolver::Resolve(const std::string& person,
                                           const std::string& page_title) const {
  const std::string surface = text::CollapseWhitespace(person);
  const std::string title = text::CollapseWhitespace(page_title);
  const auto tokens = text::Tokenize(surface);
  if (tokens.empty()) return surface;
  if (!title.empty()) {
    if (tokens.size() == 1 && IsPersonalPronoun(tokens[0])) return title;
    if (CoversMention(title, tokens)) return title;
  }
  if (tokens.size() == 1 && IsPersonalPronoun(tokens[0])) return surface;
  const std::string* match = nullptr;
  for (const auto& subject : known_subjects_) {
    if (!CoversMention(subject, tokens)) continue;
    if (match) return surface;  // ambiguous
    match = &subject;
  }
  return match ? *match : surface;
}

// ---------------------------------------------------------------- time

std::optional<int> NormalizeTime(const std::string& time_text) {
  static const std::regex kYear("(^|[^0-9])([0-9]{4})(?![0-9])");
  auto begin = std::sregex_iterator(time_text.begin(), time_text.end(), kYear);
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    const int year = std::stoi((*it)[2].str());
    if (year >= kMinYear && year <= kMaxYear) return year;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------- verbs

VerbTypeMap VerbTypeMap::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open verb map " + path.string());
  std::map<std::string, std::string> types;
  std::string line;
  for (size_t n = 1; std::getline(in, line); ++n) {
    const std::string trimmed = text::Trim(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    const size_t tab = trimmed.find('\t');
    if (tab == std::string::npos) {
      throw InputError(path.string() + ":" + std::to_string(n) + ": expected lemma<TAB>type");
    }
    const std::string lemma = text::AsciiLower(text::Trim(trimmed.substr(0, tab)));
    const std::string type = text::Trim(trimmed.substr(tab + 1));
    if (lemma.empty() || type.empty()) {
      throw InputError(path.string() + ":" + std::to_string(n) + ": empty lemma or type");
    }
    types[lemma] = type;
  }
  return VerbTypeMap(std::move(types));
}

namespace {

const std::map<std::string, std::string>& IrregularVerbs() {
  static const std::map<std::string, std::string> k = {
      {"am", "be"},         {"are", "be"},         {"is", "be"},        {"was", "be"},
      {"were", "be"},       {"been", "be"},        {"had", "have"},     {"has", "have"},
      {"did", "do"},        {"done", "do"},        {"went", "go"},      {"gone", "go"},
      {"died", "die"},      {"dies", "die"},       {"dying", "die"},    {"left", "leave"},
      {"taught", "teach"},  {"became", "become"},  {"took", "take"},    {"taken", "take"},
      {"made", "make"},     {"held", "hold"},      {"met", "meet"},     {"spent", "spend"},
      {"fought", "fight"},  {"won", "win"},        {"began", "begin"},  {"begun", "begin"},
      {"wrote", "write"},   {"written", "write"},  {"gave", "give"},    {"given", "give"},
      {"got", "get"},       {"came", "come"},      {"ran", "run"},      {"built", "build"},
      {"sent", "send"},     {"brought", "bring"},  {"sought", "seek"},  {"fled", "flee"},
      {"grew", "grow"},     {"grown", "grow"},     {"rose", "rise"},    {"risen", "rise"},
      {"undertook", "undertake"}, {"stood", "stand"}, {"led", "lead"},  {"fell", "fall"},
      {"fallen", "fall"},   {"found", "find"},     {"kept", "keep"},    {"lay", "lie"},
      {"sat", "sit"},       {"saw", "see"},        {"seen", "see"},     {"told", "tell"},
      {"thought", "think"}, {"bought", "buy"},     {"paid", "pay"},     {"laid", "lay"},
      {"rode", "ride"},     {"flew", "fly"},       {"flown", "fly"},    {"drove", "drive"},
      {"chose", "choose"},  {"chosen", "choose"},  {"overtook", "overtake"},
  };
  return k;
}

bool IsVowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

bool EndsWith(const std::string& s, const char* suffix) {
  const size_t n = std::strlen(suffix);
  return s.size() >= n && s.compare(s.size() - n, n, suffix) == 0;
}

// Candidate lemmas in rule order; the first is the fallback.
std::vector<std::string> LemmaCandidates(const std::string& w) {
  std::vector<std::string> out;
  // "planned" -> "plan" first; "called"/"passed" keep their double letter
  // unless the table knows the single form ("travelled" -> "travel").
  std::vector<std::string> late;
  auto undouble = [&](const std::string& stem) {
    const size_t n = stem.size();
    if (n >= 3 && stem[n - 1] == stem[n - 2] && !IsVowel(stem[n - 1])) {
      (stem[n - 1] == 'l' || stem[n - 1] == 's' ? late : out).push_back(stem.substr(0, n - 1));
    }
  };
  if (EndsWith(w, "ied") || EndsWith(w, "ies")) {
    out.push_back(w.substr(0, w.size() - 3) + "y");
  } else if (EndsWith(w, "ed") && w.size() > 3) {
    const std::string stem = w.substr(0, w.size() - 2);
    undouble(stem);
    const char last = stem.back();
    // "moved", "lived", "graduated": the silent e comes back.
    if (last == 'v' || last == 'z' || last == 'c' || last == 'g' || last == 'u' ||
        (last == 't' && stem.size() >= 2 && stem[stem.size() - 2] == 'a')) {
      out.push_back(stem + "e");
      out.push_back(stem);
    } else {
      out.push_back(stem);
      out.push_back(stem + "e");
    }
  } else if (EndsWith(w, "ing") && w.size() > 4) {
    const std::string stem = w.substr(0, w.size() - 3);
    undouble(stem);
    out.push_back(stem);
    out.push_back(stem + "e");
  } else if (EndsWith(w, "es") && w.size() > 3) {
    out.push_back(w.substr(0, w.size() - 2));
    out.push_back(w.substr(0, w.size() - 1));
  } else if (EndsWith(w, "s") && !EndsWith(w, "ss") && w.size() > 2) {
    out.push_back(w.substr(0, w.size() - 1));
  }
  out.push_back(w);
  out.insert(out.end(), late.begin(), late.end());
  return out;
}

}  // namespace

std::string VerbTypeMap::Lemmatize(const std::string& verb) const {
  const std::string w = text::AsciiLower(text::Trim(verb));
  if (w.empty()) return w;
  if (types_.count(w)) return w;
  auto irregular = IrregularVerbs().find(w);
  if (irregular != IrregularVerbs().end()) return irregular->second;
  const auto candidates = LemmaCandidates(w);
  for (const auto& c : candidates) {
    if (types_.count(c)) return c;
  }
  return candidates.front();
}

std::string VerbTypeMap::TypeOf(const std::string& verb) const {
  auto it = types_.find(Lemmatize(verb));
  return it == types_.end() ? kOtherVerbType : it->second;
}

// ---------------------------------------------------------------- geocoding

std::string NormalizeQuery(const std::string& location) {
  return text::AsciiLower(text::CollapseWhitespace(text::NormalizeNfc(location)));
}

namespace {

const char* kDefaultGeocoder = "https://nominatim.openstreetmap.org/search";

bool ValidPoint(const GeoPoint& p) {
  return std::isfinite(p.lat) && std::isfinite(p.lon) && p.lat >= -90.0 && p.lat <= 90.0 &&
         p.lon >= -180.0 && p.lon <= 180.0;
}

double CoordinateValue(const nlohmann::json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return std::stod(v.get<std::string>());
  throw std::invalid_argument("coordinate is neither string nor number");
}

}  // namespace

Geocoder::Geocoder(GeocoderOptions options, Clock clock, Sleep sleep)
    : options_(std::move(options)), clock_(std::move(clock)), sleep_(std::move(sleep)) {
  if (!clock_) clock_ = [] { return std::chrono::steady_clock::now(); };
  if (!sleep_) sleep_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  if (options_.max_attempts < 1) throw InputError("geocoder max_attempts must be at least 1");
  endpoint_ = options_.endpoint;
  if (endpoint_.empty()) {
    const char* env = std::getenv("COSMOS_GEOCODER_URL");
    endpoint_ = env && *env ? env : kDefaultGeocoder;
  }
  http::ParseUrl(endpoint_);
  if (!options_.cache_path.empty() && std::filesystem::exists(options_.cache_path)) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(ReadFile(options_.cache_path));
    } catch (const nlohmann::json::exception& e) {
      throw InputError("geocode cache " + options_.cache_path.string() + " is not JSON: " + e.what());
    }
    if (!j.is_object()) throw InputError("geocode cache must be a JSON object");
    for (const auto& [key, value] : j.items()) {
      if (value.is_null()) {
        cache_[key] = std::nullopt;
      } else if (value.is_array() && value.size() == 2 && value[0].is_number() && value[1].is_number()) {
        cache_[key] = GeoPoint{value[0].get<double>(), value[1].get<double>()};
      } else {
        throw InputError("geocode cache entry for \"" + key + "\" must be [lat, lon] or null");
      }
    }
  }
}

std::optional<GeoPoint> Geocoder::Geocode(const std::string& location) {
  const std::string key = NormalizeQuery(location);
  if (key.empty()) return std::nullopt;
  std::lock_guard lock(mu_);
  if (auto it = cache_.find(key); it != cache_.end()) {
    ++cache_hits_;
    return it->second;
  }
  http::Url url = http::ParseUrl(endpoint_);
  url.path += (url.path.find('?') == std::string::npos ? "?" : "&");
  url.path += "q=" + http::PercentEncode(key) + "&format=json";
  const http::Headers headers = {{"User-Agent", options_.user_agent}};

  for (int attempt = 1; attempt <= options_.max_attempts; ++attempt) {
    if (last_request_) {
      const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(clock_() - *last_request_);
      if (elapsed < options_.min_interval) sleep_(options_.min_interval - elapsed);
    }
    last_request_ = clock_();
    ++network_requests_;
    http::Response r;
    try {
      r = http::Get(url, headers, options_.timeout);
    } catch (const IoError&) {
      continue;
    }
    if (r.status == 429 || r.status >= 500) continue;
    if (r.status != 200) return std::nullopt;
    std::optional<GeoPoint> result;
    try {
      const auto j = nlohmann::json::parse(r.body);
      if (!j.is_array()) continue;
      if (!j.empty()) {
        GeoPoint p{CoordinateValue(j[0].at("lat")), CoordinateValue(j[0].at("lon"))};
        if (ValidPoint(p)) result = p;
      }
    } catch (const std::exception&) {
      continue;
    }
    cache_[key] = result;
    return result;
  }
  return std::nullopt;
}

void Geocoder::SaveCache() const {
  if (options_.cache_path.empty()) return;
  nlohmann::json j = nlohmann::json::object();
  {
    std::lock_guard lock(mu_);
    for (const auto& [key, value] : cache_) {
      j[key] = value ? nlohmann::json::array({value->lat, value->lon}) : nlohmann::json(nullptr);
    }
  }
  AtomicWriteFile(options_.cache_path, j.dump(2) + "\n");
}

// ---------------------------------------------------------------- records

nlohmann::json TrajectoryRecord::ToJson() const {
  nlohmann::json j = {{"person_id", person_id},   {"year", year},
                      {"location", location_text}, {"verb_lemma", verb_lemma},
                      {"verb_type", verb_type}};
  j["latitude"] = latitude ? nlohmann::json(*latitude) : nlohmann::json(nullptr);
  j["longitude"] = longitude ? nlohmann::json(*longitude) : nlohmann::json(nullptr);
  return j;
}

namespace {

std::string Field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) return "";
  const auto& v = j[key];
  if (v.is_string()) return v.get<std::string>();
  if (v.is_object() && v.contains("text") && v["text"].is_string()) return v["text"].get<std::string>();
  return "";
}

std::optional<int> Flag(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  const auto& v = j[key];
  if (v.is_boolean()) return v.get<bool>() ? 1 : 0;
  if (v.is_number_integer()) return v.get<int>();
  throw InputError(std::string("field ") + key + " must be 0/1 or boolean");
}

}  // namespace

NormalizationResult NormalizeTrajectories(std::span<const nlohmann::json> triplets,
                                          const PersonResolver& resolver, const VerbTypeMap& verbs,
                                          Geocoder* geocoder) {
  NormalizationResult out;
  for (const auto& j : triplets) {
    if (!j.is_object()) throw InputError("trajectory record is not an object");
    auto accepted = Flag(j, "prediction");
    if (!accepted) accepted = Flag(j, "label");
    if (accepted && *accepted == 0) {
      ++out.skipped_negative;
      continue;
    }
    const std::string person = Field(j, "person");
    const std::string location = text::CollapseWhitespace(Field(j, "location"));
    if (person.empty() || location.empty()) throw InputError("trajectory record lacks person or location");
    const auto year = NormalizeTime(Field(j, "time"));
    if (!year) {
      ++out.dropped_vague_time;
      continue;
    }
    std::string title = Field(j, "title");
    if (title.empty()) {
      title = Field(j, "page_id");
      std::replace(title.begin(), title.end(), '_', ' ');
    }
    TrajectoryRecord r;
    r.person_id = resolver.Resolve(person, title);
    r.year = *year;
    r.location_text = location;
    const std::string verb = Field(j, "verb");
    r.verb_lemma = verbs.Lemmatize(verb);
    r.verb_type = verbs.TypeOf(verb);
    if (geocoder) {
      if (auto p = geocoder->Geocode(location)) {
        r.latitude = p->lat;
        r.longitude = p->lon;
        ++out.geocoded;
      }
    }
    out.records.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------- network

std::string NormalizeLocation(const std::string& location) {
  std::string s = text::AsciiLower(text::NormalizeNfc(location));
  for (char& c : s) {
    if (std::ispunct(static_cast<unsigned char>(c))) c = ' ';
  }
  return text::CollapseWhitespace(s);
}

nlohmann::json InteractionGraph::ToJson(const std::map<std::string, double>* scores) const {
  nlohmann::json j = {{"nodes", nlohmann::json::array()}, {"edges", nlohmann::json::array()}};
  for (const auto& n : nodes) {
    nlohmann::json node = {{"id", n}};
    if (scores) {
      auto it = scores->find(n);
      if (it != scores->end()) node["pagerank"] = it->second;
    }
    j["nodes"].push_back(std::move(node));
  }
  for (const auto& e : edges) {
    j["edges"].push_back({{"source", e.a}, {"target", e.b}, {"year", e.year}, {"location", e.location}});
  }
  return j;
}

namespace {

InteractionGraph FromEdges(std::vector<GraphEdge> edges) {
  InteractionGraph g;
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  std::set<std::string> nodes;
  for (const auto& e : edges) {
    nodes.insert(e.a);
    nodes.insert(e.b);
  }
  g.nodes.assign(nodes.begin(), nodes.end());
  g.edges = std::move(edges);
  return g;
}

}  // namespace

InteractionGraph BuildInteractionNetwork(std::span<const TrajectoryRecord> records,
                                         const std::vector<std::string>& keywords) {
  std::vector<std::string> lowered;
  for (const auto& k : keywords) lowered.push_back(NormalizeLocation(k));
  std::map<std::pair<std::string, int>, std::set<std::string>> present;
  for (const auto& r : records) {
    const std::string loc = NormalizeLocation(r.location_text);
    const bool institution = std::any_of(lowered.begin(), lowered.end(), [&](const std::string& k) {
      return !k.empty() && loc.find(k) != std::string::npos;
    });
    if (institution) present[{loc, r.year}].insert(r.person_id);
  }
  std::vector<GraphEdge> edges;
  for (const auto& [key, persons] : present) {
    for (auto a = persons.begin(); a != persons.end(); ++a) {
      for (auto b = std::next(a); b != persons.end(); ++b) edges.push_back({*a, *b, key.second, key.first});
    }
  }
  return FromEdges(std::move(edges));
}

std::map<std::string, double> PageRank(const InteractionGraph& graph, double damping, double tol,
                                       int max_iterations) {
  const size_t n = graph.nodes.size();
  if (n == 0) throw InputError("PageRank of an empty graph");
  if (!(damping >= 0.0 && damping < 1.0) || !(tol > 0.0)) {
    throw InputError("PageRank needs damping in [0, 1) and a positive tolerance");
  }
  std::map<std::string, size_t> index;
  for (size_t i = 0; i < n; ++i) index[graph.nodes[i]] = i;
  std::vector<std::map<size_t, double>> adj(n);
  for (const auto& e : graph.edges) {
    auto a = index.find(e.a), b = index.find(e.b);
    if (a == index.end() || b == index.end()) throw InputError("edge endpoint is not a node");
    adj[a->second][b->second] += 1.0;
    adj[b->second][a->second] += 1.0;
  }
  std::vector<double> degree(n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    for (const auto& [_, w] : adj[i]) degree[i] += w;
  }
  std::vector<double> rank(n, 1.0 / n), next(n);
  for (int it = 0; it < max_iterations; ++it) {
    double dangling = 0.0;
    for (size_t i = 0; i < n; ++i) {
      if (degree[i] == 0.0) dangling += rank[i];
    }
    const double base = (1.0 - damping) / n + damping * dangling / n;
    std::fill(next.begin(), next.end(), base);
    for (size_t i = 0; i < n; ++i) {
      if (degree[i] == 0.0) continue;
      const double share = damping * rank[i] / degree[i];
      for (const auto& [j, w] : adj[i]) next[j] += share * w;
    }
    double diff = 0.0;
    for (size_t i = 0; i < n; ++i) diff += std::abs(next[i] - rank[i]);
    rank.swap(next);
    if (diff < tol) break;
  }
  double total = 0.0;
  for (double r : rank) total += r;
  std::map<std::string, double> out;
  for (size_t i = 0; i < n; ++i) out[graph.nodes[i]] = rank[i] / total;
  return out;
}

InteractionGraph Snapshot(const InteractionGraph& graph, int year) {
  std::vector<GraphEdge> edges;
  for (const auto& e : graph.edges) {
    if (e.year <= year) edges.push_back(e);
  }
  return FromEdges(std::move(edges));
}

std::vector<int> ParseYearRange(const std::string& spec) {
  static const std::regex kRange(R"(\s*(-?\d+)\s*:\s*(-?\d+)\s*:\s*(\d+)\s*)");
  std::smatch m;
  if (!std::regex_match(spec, m, kRange)) throw InputError("year range must be from:to:step, got " + spec);
  const int from = std::stoi(m[1].str()), to = std::stoi(m[2].str()), step = std::stoi(m[3].str());
  if (step <= 0 || from > to) throw InputError("year range needs from <= to and step > 0");
  std::vector<int> years;
  for (int y = from; y <= to; y += step) years.push_back(y);
  return years;
}

std::vector<std::pair<std::string, size_t>> VerbHistogram(std::span<const TrajectoryRecord> records) {
  std::map<std::string, size_t> counts;
  for (const auto& r : records) ++counts[r.verb_type.empty() ? kOtherVerbType : r.verb_type];
  std::vector<std::pair<std::string, size_t>> out(counts.begin(), counts.end());
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  return out;
}

}  // namespace cosmos::analysis
