#pragma once

// Corpus directory layout:
//   vocab.tsv   id \t term \t count \t kind
//   docs.jsonl  {"id": ..., "tokens": [...]} per document, input order
//   meta.json   variant, totals, stopword-list hashes

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "passport/common.hpp"
#include "passport/json_canonical.hpp"
#include "passport/preprocess.hpp"

namespace passport {

inline void save_corpus(const Corpus& corpus, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create corpus directory: " + dir);

  {
    std::ofstream out(dir + "/vocab.tsv", std::ios::binary);
    if (!out) throw IoError("cannot write " + dir + "/vocab.tsv");
    for (std::size_t id = 0; id < corpus.vocab.size(); ++id) {
      out << id << '\t' << corpus.vocab.id_to_term[id] << '\t'
          << corpus.vocab.counts[id] << '\t'
          << token_kind_name(corpus.vocab.id_to_kind[id]) << '\n';
    }
  }
  {
    std::ofstream out(dir + "/docs.jsonl", std::ios::binary);
    if (!out) throw IoError("cannot write " + dir + "/docs.jsonl");
    for (const auto& doc : corpus.docs) {
      nlohmann::json j;
      j["id"] = doc.doc_id;
      j["tokens"] = doc.tokens;
      out << canonical_dump(j) << '\n';
    }
  }
  {
    nlohmann::json meta;
    meta["variant"] = variant_name(corpus.variant);
    meta["vocabulary_size"] = corpus.vocab.size();
    meta["total_tokens"] = corpus.vocab.total_tokens;
    meta["doc_count"] = corpus.docs.size();
    meta["english_stopwords_hash"] = corpus.stopwords.english_hash();
    meta["platform_stopwords_hash"] = corpus.stopwords.platform_hash();
    std::ofstream out(dir + "/meta.json", std::ios::binary);
    if (!out) throw IoError("cannot write " + dir + "/meta.json");
    out << canonical_dump(meta, 2) << '\n';
  }
}

inline Corpus load_corpus(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::exists(dir + "/vocab.tsv") || !fs::exists(dir + "/docs.jsonl") ||
      !fs::exists(dir + "/meta.json"))
    throw IoError("not a corpus directory: " + dir);

  Corpus corpus;
  corpus.stopwords = default_stopword_lists();
  {
    std::ifstream in(dir + "/meta.json", std::ios::binary);
    nlohmann::json meta = nlohmann::json::parse(in, nullptr, false);
    if (meta.is_discarded()) throw IoError("malformed meta.json in " + dir);
    corpus.variant = variant_from_name(meta.at("variant").get<std::string>());
  }
  {
    std::ifstream in(dir + "/vocab.tsv", std::ios::binary);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::istringstream fields(line);
      std::string id_text, term, count_text, kind_name;
      if (!std::getline(fields, id_text, '\t') || !std::getline(fields, term, '\t') ||
          !std::getline(fields, count_text, '\t') ||
          !std::getline(fields, kind_name, '\t'))
        throw IoError("malformed vocab.tsv line in " + dir);
      const auto id = static_cast<std::int32_t>(corpus.vocab.id_to_term.size());
      if (std::stoll(id_text) != id)
        throw IoError("non-dense vocabulary ids in " + dir);
      corpus.vocab.id_to_term.push_back(term);
      corpus.vocab.id_to_kind.push_back(token_kind_from_name(kind_name));
      corpus.vocab.counts.push_back(std::stoll(count_text));
      corpus.vocab.term_to_id.emplace(term, id);
      corpus.vocab.total_tokens += corpus.vocab.counts.back();
    }
  }
  {
    std::ifstream in(dir + "/docs.jsonl", std::ios::binary);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded()) throw IoError("malformed docs.jsonl line in " + dir);
      CorpusDoc doc;
      doc.doc_id = j.at("id").get<std::string>();
      for (const auto& t : j.at("tokens")) {
        const auto id = t.get<std::int32_t>();
        if (id < 0 || static_cast<std::size_t>(id) >= corpus.vocab.size())
          throw IoError("token id out of range in " + dir);
        doc.tokens.push_back(id);
      }
      corpus.docs.push_back(std::move(doc));
    }
  }
  return corpus;
}

}  // namespace passport
