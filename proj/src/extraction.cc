#include "cosmos/extraction.h"

#include <algorithm>
#include <climits>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

#include "cosmos/text.h"

namespace cosmos {

ParseTree::ParseTree(std::vector<int> heads) : heads_(std::move(heads)) {
  const int n = size();
  if (n == 0) throw InputError("parse tree has no tokens");
  for (int i = 0; i < n; ++i) {
    if (heads_[i] == i) heads_[i] = -1;
    if (heads_[i] < -1 || heads_[i] >= n) throw InputError("parse head out of range");
    if (heads_[i] == -1) {
      if (root_ != -1) throw InputError("parse tree has more than one root");
      root_ = i;
    }
  }
  if (root_ == -1) throw InputError("parse tree has no root");
  depth_.assign(n, -1);
  depth_[root_] = 0;
  for (int i = 0; i < n; ++i) {
    // Walk up until a node of known depth; a walk longer than n is a cycle.
    std::vector<int> path;
    int cur = i;
    while (depth_[cur] < 0) {
      path.push_back(cur);
      if (static_cast<int>(path.size()) > n) throw InputError("parse tree contains a cycle");
      cur = heads_[cur];
    }
    int d = depth_[cur];
    for (auto it = path.rbegin(); it != path.rend(); ++it) depth_[*it] = ++d;
  }
}

int LcaDistance(const ParseTree& tree, int a, int b) {
  if (a < 0 || b < 0 || a >= tree.size() || b >= tree.size()) {
    throw std::out_of_range("LcaDistance: token index out of range");
  }
  int dist = 0;
  while (tree.depth(a) > tree.depth(b)) { a = tree.head(a); ++dist; }
  while (tree.depth(b) > tree.depth(a)) { b = tree.head(b); ++dist; }
  while (a != b) {
    a = tree.head(a);
    b = tree.head(b);
    dist += 2;
  }
  return dist;
}

bool IsPersonalPronoun(std::string_view token) {
  static const char* kPronouns[] = {"i", "me", "he", "him", "she", "they", "them", "we", "us"};
  const std::string lower = text::AsciiLower(token);
  for (const char* p : kPronouns) {
    if (lower == p) return true;
  }
  return false;
}

namespace {

std::optional<EntityCategory> CategoryForLabel(std::string_view label) {
  if (label == "PERSON") return EntityCategory::kPerson;
  if (label == "DATE" || label == "TIME" || label == "DURATION") return EntityCategory::kTime;
  if (label == "GPE" || label == "LOC" || label == "EVENT" || label == "FAC" || label == "ORG") {
    return EntityCategory::kLocation;
  }
  if (label == "VERB") return EntityCategory::kVerb;
  return std::nullopt;
}

bool Overlaps(const EntitySpan& a, const EntitySpan& b) {
  return a.token_start < b.token_end && b.token_start < a.token_end;
}

EntitySpan MakeSpan(EntityCategory c, int start, int end,
                    std::span<const std::string> tokens) {
  return {c, start, end, text::Join(tokens.subspan(start, end - start))};
}

}  // namespace

std::vector<EntitySpan> CategorizeEntities(const SentenceAnnotation& a) {
  const int n = static_cast<int>(a.tokens.size());
  std::vector<EntitySpan> candidates;
  for (const auto& raw : a.entities) {
    auto cat = CategoryForLabel(raw.label);
    if (!cat) continue;
    if (raw.start < 0 || raw.end > n || raw.start >= raw.end) {
      throw InputError("entity span out of range: " + raw.label);
    }
    candidates.push_back(MakeSpan(*cat, raw.start, raw.end, a.tokens));
  }
  for (int i = 0; i < static_cast<int>(a.pos.size()) && i < n; ++i) {
    if (a.pos[i] == "VERB") candidates.push_back(MakeSpan(EntityCategory::kVerb, i, i + 1, a.tokens));
  }
  std::stable_sort(candidates.begin(), candidates.end(), [](const auto& x, const auto& y) {
    if (x.length() != y.length()) return x.length() > y.length();
    return x.token_start < y.token_start;
  });
  std::vector<EntitySpan> kept;
  for (auto& c : candidates) {
    bool clash = std::any_of(kept.begin(), kept.end(), [&](const EntitySpan& k) {
      return k.category == c.category && Overlaps(k, c);
    });
    if (!clash) kept.push_back(std::move(c));
  }
  for (int i = 0; i < n; ++i) {
    if (!IsPersonalPronoun(a.tokens[i])) continue;
    EntitySpan pron = MakeSpan(EntityCategory::kPerson, i, i + 1, a.tokens);
    bool covered = std::any_of(kept.begin(), kept.end(), [&](const EntitySpan& k) {
      return k.category == EntityCategory::kPerson && Overlaps(k, pron);
    });
    if (!covered) kept.push_back(std::move(pron));
  }
  std::stable_sort(kept.begin(), kept.end(), [](const auto& x, const auto& y) {
    if (x.token_start != y.token_start) return x.token_start < y.token_start;
    return static_cast<int>(x.category) < static_cast<int>(y.category);
  });
  return kept;
}

int AnchorToken(const EntitySpan& span, const ParseTree& tree) {
  int best = -1;
  for (int t = span.token_start; t < span.token_end; ++t) {
    const int h = tree.head(t);
    const bool external = h < span.token_start || h >= span.token_end;
    if (!external) continue;
    if (best == -1 || tree.depth(t) <= tree.depth(best)) best = t;
  }
  return best == -1 ? span.token_end - 1 : best;
}

namespace {

struct Scored {
  int dist = INT_MAX;
  int linear = INT_MAX;
  int start = INT_MAX;
  bool operator<(const Scored& o) const {
    return std::tie(dist, linear, start) < std::tie(o.dist, o.linear, o.start);
  }
};

// Index into `pool` of the span closest to `target_anchor`, or -1.
int Closest(const std::vector<const EntitySpan*>& pool, const std::vector<int>& anchors,
            int target_anchor, const ParseTree& tree) {
  int best = -1;
  Scored best_score;
  for (size_t i = 0; i < pool.size(); ++i) {
    Scored s{LcaDistance(tree, anchors[i], target_anchor), std::abs(anchors[i] - target_anchor),
             pool[i]->token_start};
    if (s < best_score) {
      best_score = s;
      best = static_cast<int>(i);
    }
  }
  return best;
}

}  // namespace

std::vector<CandidateTriplet> SelectRelevantPairs(std::span<const EntitySpan> entities,
                                                  const ParseTree& tree,
                                                  const SentenceRef& ref) {
  std::vector<const EntitySpan*> persons, times, locations, verbs;
  for (const auto& e : entities) {
    if (e.token_end > tree.size() || e.token_start < 0 || e.token_start >= e.token_end) {
      throw InputError("entity span outside the parse tree");
    }
    switch (e.category) {
      case EntityCategory::kPerson: persons.push_back(&e); break;
      case EntityCategory::kTime: times.push_back(&e); break;
      case EntityCategory::kLocation: locations.push_back(&e); break;
      case EntityCategory::kVerb: verbs.push_back(&e); break;
    }
  }
  std::vector<CandidateTriplet> out;
  if (verbs.empty() || times.empty() || locations.empty()) return out;
  auto anchors_of = [&](const std::vector<const EntitySpan*>& pool) {
    std::vector<int> a;
    for (const auto* e : pool) a.push_back(AnchorToken(*e, tree));
    return a;
  };
  const auto verb_anchors = anchors_of(verbs);
  const auto time_anchors = anchors_of(times);
  const auto loc_anchors = anchors_of(locations);
  std::stable_sort(persons.begin(), persons.end(),
                   [](const auto* a, const auto* b) { return a->token_start < b->token_start; });
  for (const auto* person : persons) {
    const int pa = AnchorToken(*person, tree);
    const int v = Closest(verbs, verb_anchors, pa, tree);
    const int t = Closest(times, time_anchors, verb_anchors[v], tree);
    const int l = Closest(locations, loc_anchors, verb_anchors[v], tree);
    out.push_back({*person, *times[t], *locations[l], *verbs[v], ref});
  }
  return out;
}

SentenceAnnotation ParseSentenceAnnotation(const nlohmann::json& j) {
  if (!j.is_object()) throw InputError("annotation record is not an object");
  SentenceAnnotation a;
  try {
    a.tokens = j.at("tokens").get<std::vector<std::string>>();
    a.heads = j.at("heads").get<std::vector<int>>();
    if (j.contains("pos")) a.pos = j["pos"].get<std::vector<std::string>>();
    for (const auto& e : j.value("entities", nlohmann::json::array())) {
      a.entities.push_back({e.at("label").get<std::string>(), e.at("start").get<int>(),
                            e.at("end").get<int>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bad annotation record: ") + e.what());
  }
  if (a.heads.size() != a.tokens.size()) throw InputError("heads and tokens differ in length");
  if (!a.pos.empty() && a.pos.size() != a.tokens.size()) {
    throw InputError("pos and tokens differ in length");
  }
  return a;
}

FileAnnotationBackend FileAnnotationBackend::Parse(std::istream& in) {
  FileAnnotationBackend backend;
  auto errs = ForEachJsonLine(in, [&](size_t line, const nlohmann::json& j) {
    try {
      SentenceAnnotation a = ParseSentenceAnnotation(j);
      if (j.contains("page_id") && j.contains("paragraph_index") && j.contains("sentence_index")) {
        Key key{j["page_id"].get<std::string>(), j["paragraph_index"].get<int>(),
                j["sentence_index"].get<int>()};
        backend.keyed_[key] = std::move(a);
      } else {
        backend.ordered_.push_back(std::move(a));
      }
    } catch (const std::exception& e) {
      backend.errors_.push_back({line, e.what()});
    }
  });
  backend.errors_.insert(backend.errors_.end(), errs.begin(), errs.end());
  return backend;
}

FileAnnotationBackend FileAnnotationBackend::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open annotations " + path.string());
  return Parse(in);
}

SentenceAnnotation FileAnnotationBackend::Annotate(const Sentence& s) {
  auto it = keyed_.find(Key{s.page_id, s.paragraph_index, s.sentence_index});
  if (it != keyed_.end()) return it->second;
  if (cursor_ < ordered_.size()) return ordered_[cursor_++];
  throw std::runtime_error("no annotation for " + s.page_id + " paragraph " +
                           std::to_string(s.paragraph_index) + " sentence " +
                           std::to_string(s.sentence_index));
}

ExtractionResult ExtractFromSentences(std::span<const Sentence> sentences, NlpBackend& backend) {
  ExtractionResult result;
  for (const Sentence& s : sentences) {
    const std::string where = s.page_id + ":" + std::to_string(s.paragraph_index) + ":" +
                              std::to_string(s.sentence_index);
    try {
      SentenceAnnotation a = backend.Annotate(s);
      if (static_cast<int>(a.tokens.size()) > kMaxSentenceTokens) {
        result.warnings.push_back(where + ": sentence longer than " +
                                  std::to_string(kMaxSentenceTokens) + " tokens skipped");
        continue;
      }
      auto spans = CategorizeEntities(a);
      if (!IsTargetSentence(spans)) continue;
      ParseTree tree(a.heads);
      auto triplets = SelectRelevantPairs(spans, tree, {s.page_id, s.paragraph_index, s.sentence_index});
      result.triplets.insert(result.triplets.end(), std::make_move_iterator(triplets.begin()),
                             std::make_move_iterator(triplets.end()));
    } catch (const std::exception& e) {
      result.warnings.push_back(where + ": " + e.what());
    }
  }
  return result;
}

ExtractionResult ExtractCandidates(const BiographyPage& page, NlpBackend& backend,
                                   const SentenceSplitter& splitter) {
  auto sentences = SegmentSentences(page, splitter);
  return ExtractFromSentences(sentences, backend);
}

nlohmann::json SpanToJson(const EntitySpan& span) {
  return {{"text", span.text}, {"start", span.token_start}, {"end", span.token_end}};
}

nlohmann::json TripletToJson(const CandidateTriplet& t) {
  return {{"page_id", t.ref.page_id},
          {"paragraph_index", t.ref.paragraph_index},
          {"sentence_index", t.ref.sentence_index},
          {"person", SpanToJson(t.person)},
          {"time", SpanToJson(t.time)},
          {"location", SpanToJson(t.location)},
          {"verb", SpanToJson(t.verb)}};
}

}  // namespace cosmos
