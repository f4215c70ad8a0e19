#pragma once

// Document ingestion: JSONL loading with schema validation, language
// filtering, and deterministic synthetic fixtures for testing.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "passport/common.hpp"
#include "passport/document.hpp"
#include "passport/json_canonical.hpp"
#include "passport/preprocess.hpp"

namespace passport {

struct RejectedLine {
  std::size_t line_number = 0;  // 1-based
  std::string reason;
};

struct IngestResult {
  DocumentSet set;
  std::vector<RejectedLine> rejects;
};

// JSONL schema: {"id": str, "text": str, "lang"?: str, "author"?: str,
// "timestamp"?: str}. Malformed lines are recorded as rejects and skipped;
// duplicate ids are a hard error because silent dedup would distort
// retweet-frequency statistics.
inline IngestResult load_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open input file: " + path);

  IngestResult result;
  result.set.source = path;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    bool blank = true;
    for (char c : line) {
      if (c != ' ' && c != '\t') {
        blank = false;
        break;
      }
    }
    if (blank) continue;

    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      result.rejects.push_back({line_number, "malformed JSON"});
      continue;
    }
    if (!j.contains("id") || !j["id"].is_string() ||
        j["id"].get<std::string>().empty()) {
      result.rejects.push_back({line_number, "missing or empty \"id\""});
      continue;
    }
    if (!j.contains("text") || !j["text"].is_string()) {
      result.rejects.push_back({line_number, "missing \"text\""});
      continue;
    }

    RawDocument doc;
    doc.id = j["id"].get<std::string>();
    doc.text = j["text"].get<std::string>();
    if (j.contains("lang") && j["lang"].is_string())
      doc.lang = j["lang"].get<std::string>();
    if (j.contains("author") && j["author"].is_string())
      doc.author = j["author"].get<std::string>();
    if (j.contains("timestamp") && j["timestamp"].is_string())
      doc.timestamp = j["timestamp"].get<std::string>();

    if (!seen_ids.insert(doc.id).second)
      throw ValidationError("duplicate document id: " + doc.id);
    result.set.docs.push_back(std::move(doc));
  }
  return result;
}

inline nlohmann::json document_to_json(const RawDocument& doc) {
  nlohmann::json j;
  j["id"] = doc.id;
  j["text"] = doc.text;
  if (doc.lang) j["lang"] = *doc.lang;
  if (doc.author) j["author"] = *doc.author;
  if (doc.timestamp) j["timestamp"] = *doc.timestamp;
  return j;
}

// One canonical JSON object per line; load_jsonl(save_jsonl(s)) == s and the
// serialization is a fixed point, which gives the round-trip invariant.
inline void save_jsonl(const DocumentSet& set, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open output file: " + path);
  for (const auto& doc : set.docs) {
    out << canonical_dump(document_to_json(doc)) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

// ---------------------------------------------------------------------------
// Language filtering
// ---------------------------------------------------------------------------

// Stopword lists keyed by ISO-639-1 code; only English ships bundled.
inline const std::map<std::string, std::set<std::string>>& language_registry() {
  static const std::map<std::string, std::set<std::string>> registry = [] {
    std::map<std::string, std::set<std::string>> r;
    r["en"] = default_stopword_lists().english;
    return r;
  }();
  return registry;
}

// Metadata wins: docs tagged with the target language are kept, docs tagged
// otherwise are dropped. Untagged docs fall back to content analysis: kept iff
// they have >= 5 word tokens and their stopword-overlap fraction is >= the
// threshold (default 0.06).
inline DocumentSet filter_language(const DocumentSet& set, const std::string& lang,
                                   double overlap_threshold = 0.06) {
  auto registry_it = language_registry().find(lang);
  if (registry_it == language_registry().end())
    throw ConfigError("unknown language code: " + lang);
  const auto& stopwords = registry_it->second;

  DocumentSet out;
  out.source = set.source;
  for (const auto& doc : set.docs) {
    if (doc.lang) {
      if (*doc.lang == lang) out.docs.push_back(doc);
      continue;
    }
    std::size_t words = 0;
    std::size_t hits = 0;
    for (const auto& tok : tokenize(doc.text)) {
      if (tok.kind != TokenKind::Word) continue;
      ++words;
      if (stopwords.count(tok.surface)) ++hits;
    }
    if (words >= 5 &&
        static_cast<double>(hits) >= overlap_threshold * static_cast<double>(words))
      out.docs.push_back(doc);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic fixtures
// ---------------------------------------------------------------------------

enum class FixtureProfile { Zipfian, TwoGroup, PlantedTopics };

inline FixtureProfile fixture_profile_from_name(const std::string& name) {
  if (name == "zipfian") return FixtureProfile::Zipfian;
  if (name == "two_group") return FixtureProfile::TwoGroup;
  if (name == "planted_topics") return FixtureProfile::PlantedTopics;
  throw ValidationError("unknown fixture profile: " + name);
}

namespace detail {

// Pure-letter synthetic terms: prefix + 3 base-26 letters, so every term is a
// Word token of length >= 4 that is not a stopword.
inline std::string synthetic_term(char prefix, std::size_t index) {
  std::string term(4, 'a');
  term[0] = prefix;
  term[3] = static_cast<char>('a' + index % 26);
  term[2] = static_cast<char>('a' + (index / 26) % 26);
  term[1] = static_cast<char>('a' + (index / 676) % 26);
  return term;
}

// Inverse-CDF draw over cumulative weights.
inline std::size_t draw_cdf(const std::vector<double>& cdf, Rng& rng) {
  const double u = rng.uniform() * cdf.back();
  return static_cast<std::size_t>(
      std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
}

}  // namespace detail

// Deterministic per (seed, n_docs, profile).
//   zipfian        - 20 tokens per doc drawn from an exact Zipf(s=1) law over
//                    1000 synthetic types ("w" prefix).
//   two_group      - alternating docs draw content tokens from one of two
//                    disjoint 30-term vocabularies ("ga"/"gb" prefixes) mixed
//                    with shared English function words; group in `author`.
//   planted_topics - 15 tokens per doc mixing two disjoint 50-term topic
//                    vocabularies ("ta"/"tb") with a per-doc mixture weight;
//                    the realized topic-0 fraction is recorded in `author`
//                    and each token's topic is identified by its prefix.
inline DocumentSet generate_fixture(std::uint64_t seed, std::size_t n_docs,
                                    FixtureProfile profile) {
  if (n_docs < 1) throw ValidationError("n_docs must be >= 1");
  Rng rng(seed);
  DocumentSet set;
  set.source = "fixture";
  set.docs.reserve(n_docs);

  auto doc_id = [](std::size_t i) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "d%06zu", i);
    return std::string(buf);
  };

  switch (profile) {
    case FixtureProfile::Zipfian: {
      constexpr std::size_t kTypes = 1000;
      constexpr std::size_t kTokensPerDoc = 20;
      std::vector<double> cdf(kTypes);
      double acc = 0.0;
      for (std::size_t r = 0; r < kTypes; ++r) {
        acc += 1.0 / static_cast<double>(r + 1);
        cdf[r] = acc;
      }
      for (std::size_t i = 0; i < n_docs; ++i) {
        std::string text;
        for (std::size_t t = 0; t < kTokensPerDoc; ++t) {
          if (t > 0) text.push_back(' ');
          text += detail::synthetic_term('w', detail::draw_cdf(cdf, rng));
        }
        RawDocument doc;
        doc.id = doc_id(i);
        doc.text = std::move(text);
        doc.lang = "en";
        set.docs.push_back(std::move(doc));
      }
      break;
    }
    case FixtureProfile::TwoGroup: {
      constexpr std::size_t kGroupTerms = 30;
      static const char* kFunctionWords[] = {"the", "and", "for",
                                             "you", "with", "this"};
      for (std::size_t i = 0; i < n_docs; ++i) {
        const char prefix = i % 2 == 0 ? 'a' : 'b';
        std::string text;
        for (std::size_t t = 0; t < 16; ++t) {
          if (t > 0) text.push_back(' ');
          if (t % 4 == 3) {
            text += kFunctionWords[rng.below(6)];
          } else {
            std::string term = detail::synthetic_term('g', rng.below(kGroupTerms));
            term[1] = prefix;  // "ga.." or "gb.."
            text += term;
          }
        }
        RawDocument doc;
        doc.id = doc_id(i);
        doc.text = std::move(text);
        doc.lang = "en";
        doc.author = i % 2 == 0 ? "group0" : "group1";
        set.docs.push_back(std::move(doc));
      }
      break;
    }
    case FixtureProfile::PlantedTopics: {
      constexpr std::size_t kTopicTerms = 50;
      constexpr std::size_t kTokensPerDoc = 15;
      for (std::size_t i = 0; i < n_docs; ++i) {
        const double weight0 = rng.uniform();
        std::string text;
        std::size_t topic0_tokens = 0;
        for (std::size_t t = 0; t < kTokensPerDoc; ++t) {
          if (t > 0) text.push_back(' ');
          const bool topic0 = rng.uniform() < weight0;
          if (topic0) ++topic0_tokens;
          std::string term = detail::synthetic_term('t', rng.below(kTopicTerms));
          term[1] = topic0 ? 'a' : 'b';
          text += term;
        }
        RawDocument doc;
        doc.id = doc_id(i);
        doc.text = std::move(text);
        doc.lang = "en";
        doc.author = "topic0_frac=" +
                     format_double(static_cast<double>(topic0_tokens) /
                                   static_cast<double>(kTokensPerDoc));
        set.docs.push_back(std::move(doc));
      }
      break;
    }
  }
  return set;
}

}  // namespace passport
