#ifndef COSMOS_ANALYSIS_H_
#define COSMOS_ANALYSIS_H_

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace cosmos::analysis {

// ---------------------------------------------------------------- persons

// Maps the person element of an accepted triplet to a canonical id.
class PersonResolver {
 public:
  virtual ~PersonResolver() = default;
  virtual std::string Resolve(const std::string& person, const std::string& page_title) const = 0;
};

// Personal pronouns and partial names of the page subject ("Brown" on page
// "John Henry Brown") resolve to the page title. Other mentions resolve to a
// known subject (e.g. the title of another page) when that subject is the
// only one containing every token of the mention; anything else keeps its
// whitespace-normalized surface form.
class DefaultPersonResolver : public PersonResolver {
 public:
  DefaultPersonResolver() = default;
  explicit DefaultPersonResolver(std::vector<std::string> known_subjects);
  std::string Resolve(const std::string& person, const std::string& page_title) const override;

 private:
  std::vector<std::string> known_subjects_;
};

// ---------------------------------------------------------------- time

inline constexpr int kMinYear = 1;
inline constexpr int kMaxYear = 2100;

// First standalone 4-digit number in [kMinYear, kMaxYear]; a range yields its
// start. Vague expressions give nullopt.
std::optional<int> NormalizeTime(const std::string& time_text);

// ---------------------------------------------------------------- verbs

inline constexpr const char* kOtherVerbType = "other*";

// Flat lemma -> type table read from a two-column TSV (lemma, type; '#'
// comments). Surface forms are reduced to a lemma by an irregular-form table
// and suffix rules, preferring candidates present in the table.
class VerbTypeMap {
 public:
  VerbTypeMap() = default;
  explicit VerbTypeMap(std::map<std::string, std::string> lemma_to_type)
      : types_(std::move(lemma_to_type)) {}
  // Throws InputError on a malformed line; a missing file is an IoError.
  static VerbTypeMap Load(const std::filesystem::path& path);

  std::string Lemmatize(const std::string& verb) const;
  // kOtherVerbType for unmapped or empty verbs.
  std::string TypeOf(const std::string& verb) const;
  size_t size() const { return types_.size(); }

 private:
  std::map<std::string, std::string> types_;
};

// ---------------------------------------------------------------- geocoding

struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;
  bool operator==(const GeoPoint&) const = default;
};

// Cache key: NFC, whitespace-collapsed, lowercased.
std::string NormalizeQuery(const std::string& location);

struct GeocoderOptions {
  // Search endpoint answering "?q=<query>&format=json" with a JSON list of
  // objects carrying "lat"/"lon" strings. Empty: $COSMOS_GEOCODER_URL, else
  // the public Nominatim instance.
  std::string endpoint;
  std::filesystem::path cache_path;  // empty: in-memory only
  std::chrono::milliseconds min_interval{1000};
  int max_attempts = 3;
  std::chrono::milliseconds timeout{10000};
  std::string user_agent = "cosmos-trajectories/1.0";
};

// Cached, rate-limited geocoder. Results (including "not found") are cached
// by normalized query; transport failures are retried and then give nullopt
// without being cached. Calls are serialized.
class Geocoder {
 public:
  using Clock = std::function<std::chrono::steady_clock::time_point()>;
  using Sleep = std::function<void(std::chrono::milliseconds)>;

  explicit Geocoder(GeocoderOptions options, Clock clock = {}, Sleep sleep = {});

  std::optional<GeoPoint> Geocode(const std::string& location);
  // Writes the cache file (atomically) if one is configured.
  void SaveCache() const;

  size_t network_requests() const { return network_requests_; }
  size_t cache_hits() const { return cache_hits_; }
  const std::string& endpoint() const { return endpoint_; }

 private:
  GeocoderOptions options_;
  std::string endpoint_;
  Clock clock_;
  Sleep sleep_;
  mutable std::mutex mu_;
  std::map<std::string, std::optional<GeoPoint>> cache_;
  std::optional<std::chrono::steady_clock::time_point> last_request_;
  size_t network_requests_ = 0;
  size_t cache_hits_ = 0;
};

// ---------------------------------------------------------------- records

struct TrajectoryRecord {
  std::string person_id;
  int year = 0;
  std::string location_text;
  std::optional<double> latitude, longitude;
  std::string verb_lemma;
  std::string verb_type;

  nlohmann::json ToJson() const;
};

struct NormalizationResult {
  std::vector<TrajectoryRecord> records;
  size_t dropped_vague_time = 0;
  size_t skipped_negative = 0;  // records predicted/labeled 0
  size_t geocoded = 0;
};

// Turns classified triplet records (person, time, location, optional verb,
// title/page_id, and prediction or label) into analysis records. Records
// whose "prediction" (or, absent that, "label") is 0 are skipped. `geocoder`
// may be null.
NormalizationResult NormalizeTrajectories(std::span<const nlohmann::json> triplets,
                                          const PersonResolver& resolver, const VerbTypeMap& verbs,
                                          Geocoder* geocoder);

// ---------------------------------------------------------------- network

inline const std::vector<std::string>& DefaultInstitutionKeywords() {
  static const std::vector<std::string> k = {"University", "College", "Institute", "School",
                                             "Academy"};
  return k;
}

// Lowercase, ASCII punctuation removed, whitespace collapsed.
std::string NormalizeLocation(const std::string& location);

struct GraphEdge {
  std::string a, b;  // a < b
  int year = 0;
  std::string location;  // normalized
  auto operator<=>(const GraphEdge&) const = default;
};

// Undirected multigraph; nodes and edges kept sorted.
struct InteractionGraph {
  std::vector<std::string> nodes;
  std::vector<GraphEdge> edges;

  // Node-link form; `scores` adds a "pagerank" attribute per node.
  nlohmann::json ToJson(const std::map<std::string, double>* scores = nullptr) const;
};

// An edge for every pair of distinct persons with records at the same
// normalized location in the same year, where the location contains one of
// `keywords` (case-insensitive). One edge per (pair, year, location). Nodes
// are the persons that take part in at least one edge.
InteractionGraph BuildInteractionNetwork(
    std::span<const TrajectoryRecord> records,
    const std::vector<std::string>& keywords = DefaultInstitutionKeywords());

// Power iteration on the undirected graph; parallel edges add weight, and
// the mass of isolated nodes is spread uniformly. Throws InputError on an
// empty graph.
std::map<std::string, double> PageRank(const InteractionGraph& graph, double damping = 0.85,
                                       double tol = 1e-8, int max_iterations = 10000);

// Edges with year <= `year` and their endpoints.
InteractionGraph Snapshot(const InteractionGraph& graph, int year);

// Parses "from:to:step" (inclusive). Throws InputError.
std::vector<int> ParseYearRange(const std::string& spec);

// (type, count) by descending count, ties by type name.
std::vector<std::pair<std::string, size_t>> VerbHistogram(std::span<const TrajectoryRecord> records);

}  // namespace cosmos::analysis

#endif  // COSMOS_ANALYSIS_H_
