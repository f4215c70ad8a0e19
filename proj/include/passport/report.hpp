#pragma once

// Pipeline orchestration: runs ingest output through stats, embeddings,
// topics, SOMs and projections in dependency order, assembles the canonical
// JSON report and renders the plot set. One master seed derives every stage
// seed by a fixed offset, and the report is byte-identical across runs.

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "passport/common.hpp"
#include "passport/corpus_io.hpp"
#include "passport/embed.hpp"
#include "passport/embed_io.hpp"
#include "passport/ingest.hpp"
#include "passport/json_canonical.hpp"
#include "passport/preprocess.hpp"
#include "passport/som.hpp"
#include "passport/stats.hpp"
#include "passport/svg.hpp"
#include "passport/topics.hpp"
#include "passport/tsne.hpp"

namespace passport {

inline constexpr const char* kToolVersion = "0.1.0";

// Fixed per-stage seed offsets from the master seed.
enum : std::uint64_t {
  kSeedEmbedWords = 1000,
  kSeedEmbedDocs = 2000,
  kSeedTopics = 3000,
  kSeedSomWords = 4000,
  kSeedSomDocs = 5000,
  kSeedProjection = 6000,  // + projection index
};

struct StatsConfig {
  std::size_t top_terms = 30;
  std::size_t zipf_max_rank = 1000;
  std::size_t ngram_top = 30;
  std::size_t cooccurrence_top = 10;
};

struct PassportConfig {
  std::uint64_t master_seed = 42;
  StatsConfig stats;
  EmbedParams embed;
  LdaParams topics;
  SomParams som_words{.rows = 0, .cols = 0};  // 0 = heuristic from input size
  SomParams som_docs{.rows = 0, .cols = 0};
  TsneParams tsne;
  std::size_t topic_top_words = 12;
  std::size_t topic_top_docs = 10;
  std::size_t neighborhood_size = 20;
  std::size_t som_word_limit = 2000;
  std::vector<std::string> similarity_queries;  // empty = top 3 frequent terms
};

// ---------------------------------------------------------------------------
// Config file parsing (JSON; CLI flags override file values).
// ---------------------------------------------------------------------------

namespace detail {

template <typename T>
inline void maybe(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace detail

inline PassportConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  PassportConfig cfg;
  detail::maybe(j, "seed", cfg.master_seed);
  if (j.contains("stats")) {
    const auto& s = j.at("stats");
    detail::maybe(s, "top_terms", cfg.stats.top_terms);
    detail::maybe(s, "zipf_max_rank", cfg.stats.zipf_max_rank);
    detail::maybe(s, "ngram_top", cfg.stats.ngram_top);
    detail::maybe(s, "cooccurrence_top", cfg.stats.cooccurrence_top);
  }
  if (j.contains("embed")) {
    const auto& e = j.at("embed");
    detail::maybe(e, "dim", cfg.embed.dim);
    detail::maybe(e, "window", cfg.embed.window);
    detail::maybe(e, "negative", cfg.embed.negative);
    detail::maybe(e, "epochs", cfg.embed.epochs);
    detail::maybe(e, "initial_lr", cfg.embed.initial_lr);
    detail::maybe(e, "min_count", cfg.embed.min_count);
    detail::maybe(e, "subsample_t", cfg.embed.subsample_t);
    detail::maybe(e, "threads", cfg.embed.threads);
  }
  if (j.contains("topics")) {
    const auto& t = j.at("topics");
    detail::maybe(t, "k", cfg.topics.topics);
    cfg.topics.alpha = LdaParams::default_alpha(cfg.topics.topics);
    detail::maybe(t, "alpha", cfg.topics.alpha);
    detail::maybe(t, "beta", cfg.topics.beta);
    detail::maybe(t, "iterations", cfg.topics.iterations);
    detail::maybe(t, "burn_in", cfg.topics.burn_in);
  }
  for (const char* key : {"som_words", "som_docs"}) {
    if (!j.contains(key)) continue;
    SomParams& p = std::string(key) == "som_words" ? cfg.som_words : cfg.som_docs;
    const auto& s = j.at(key);
    detail::maybe(s, "rows", p.rows);
    detail::maybe(s, "cols", p.cols);
    detail::maybe(s, "epochs", p.epochs);
    detail::maybe(s, "sigma0", p.sigma0);
    detail::maybe(s, "sigma_final", p.sigma_final);
    detail::maybe(s, "lr0", p.lr0);
    detail::maybe(s, "lr_final", p.lr_final);
  }
  if (j.contains("tsne")) {
    const auto& t = j.at("tsne");
    detail::maybe(t, "perplexity", cfg.tsne.perplexity);
    detail::maybe(t, "iterations", cfg.tsne.iterations);
    detail::maybe(t, "learning_rate", cfg.tsne.learning_rate);
    detail::maybe(t, "early_exaggeration", cfg.tsne.early_exaggeration);
    detail::maybe(t, "exaggeration_steps", cfg.tsne.exaggeration_steps);
  }
  detail::maybe(j, "topic_top_words", cfg.topic_top_words);
  detail::maybe(j, "topic_top_docs", cfg.topic_top_docs);
  detail::maybe(j, "neighborhood_size", cfg.neighborhood_size);
  detail::maybe(j, "som_word_limit", cfg.som_word_limit);
  detail::maybe(j, "queries", cfg.similarity_queries);
  return cfg;
}

inline PassportConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file: " + path);
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("malformed config JSON: " + path);
  return parse_config(j);
}

// ---------------------------------------------------------------------------
// Ingest stage: documents.jsonl + meta.json + variants/{A,B,C}
// ---------------------------------------------------------------------------

struct IngestSummary {
  std::size_t loaded = 0;
  std::size_t rejected = 0;
  std::size_t kept = 0;
};

inline IngestSummary run_ingest(const std::string& input_path,
                                const std::string& lang,  // empty = no filter
                                const std::string& out_dir) {
  auto result = load_jsonl(input_path);
  IngestSummary summary;
  summary.loaded = result.set.docs.size();
  summary.rejected = result.rejects.size();

  DocumentSet kept =
      lang.empty() ? std::move(result.set) : filter_language(result.set, lang);
  summary.kept = kept.docs.size();

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + out_dir);
  save_jsonl(kept, out_dir + "/documents.jsonl");

  const auto lists = default_stopword_lists();
  for (const Variant variant : {Variant::A, Variant::B, Variant::C}) {
    const Corpus corpus = build_variant(kept, variant, lists);
    save_corpus(corpus, out_dir + "/variants/" + variant_name(variant));
  }

  nlohmann::json meta;
  meta["source"] = input_path;
  meta["lang_filter"] = lang;
  meta["loaded"] = summary.loaded;
  meta["rejected"] = summary.rejected;
  meta["kept"] = summary.kept;
  std::ofstream out(out_dir + "/meta.json", std::ios::binary);
  if (!out) throw IoError("cannot write " + out_dir + "/meta.json");
  out << canonical_dump(meta, 2) << '\n';
  return summary;
}

// ---------------------------------------------------------------------------
// Report assembly
// ---------------------------------------------------------------------------

namespace detail {

// Rethrows any pipeline error with the failing stage's name attached.
template <typename F>
inline auto stage(const char* name, F&& fn) {
  auto prefix = [&](const char* what) {
    return std::string("stage ") + name + ": " + what;
  };
  try {
    return fn();
  } catch (const ValidationError& e) {
    throw ValidationError(prefix(e.what()));
  } catch (const ConfigError& e) {
    throw ConfigError(prefix(e.what()));
  } catch (const IoError& e) {
    throw IoError(prefix(e.what()));
  } catch (const LookupError& e) {
    throw LookupError(prefix(e.what()));
  } catch (const TrainingError& e) {
    throw TrainingError(prefix(e.what()));
  }
}

inline nlohmann::json ngram_table_json(const NGramTable& table) {
  nlohmann::json j;
  j["n"] = table.n;
  j["total"] = table.total_ngrams;
  j["entries"] = nlohmann::json::array();
  for (const auto& [terms, count] : table.entries) {
    nlohmann::json entry;
    entry["terms"] = terms;
    entry["count"] = count;
    j["entries"].push_back(std::move(entry));
  }
  return j;
}

struct UMatrixSummary {
  double variance = 0.0;
  double center_edge_ratio = 1.0;
};

// Border ring vs interior mean; a grid without interior units reports 1.
inline UMatrixSummary summarize_umatrix(const UMatrix& um) {
  UMatrixSummary s;
  double mean = 0.0;
  for (double v : um.values) mean += v;
  mean /= static_cast<double>(um.values.size());
  for (double v : um.values) s.variance += (v - mean) * (v - mean);
  s.variance /= static_cast<double>(um.values.size());

  double edge_sum = 0.0, center_sum = 0.0;
  std::size_t edge_n = 0, center_n = 0;
  for (int r = 0; r < um.rows; ++r) {
    for (int c = 0; c < um.cols; ++c) {
      const bool border = r == 0 || c == 0 || r == um.rows - 1 || c == um.cols - 1;
      (border ? edge_sum : center_sum) += um.at(r, c);
      (border ? edge_n : center_n) += 1;
    }
  }
  if (center_n > 0 && edge_n > 0 && edge_sum > 0.0)
    s.center_edge_ratio = (center_sum / center_n) / (edge_sum / edge_n);
  return s;
}

inline nlohmann::json som_section_json(const SomGrid& grid, const Matrix& inputs) {
  const UMatrix um = u_matrix(grid);
  const auto summary = summarize_umatrix(um);
  nlohmann::json j;
  j["rows"] = grid.rows;
  j["cols"] = grid.cols;
  j["quantization_error"] = quantization_error(grid, inputs);
  j["topographic_error"] = topographic_error(grid, inputs);
  nlohmann::json values = nlohmann::json::array();
  for (int r = 0; r < um.rows; ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < um.cols; ++c) row.push_back(um.at(r, c));
    values.push_back(std::move(row));
  }
  j["umatrix"]["values"] = std::move(values);
  j["umatrix"]["variance"] = summary.variance;
  j["umatrix"]["center_edge_ratio"] = summary.center_edge_ratio;
  return j;
}

inline nlohmann::json embed_params_json(const EmbedParams& p) {
  nlohmann::json j;
  j["dim"] = p.dim;
  j["window"] = p.window;
  j["negative"] = p.negative;
  j["epochs"] = p.epochs;
  j["initial_lr"] = p.initial_lr;
  j["min_count"] = p.min_count;
  j["subsample_t"] = p.subsample_t;
  j["threads"] = p.threads;
  return j;
}

inline nlohmann::json som_params_json(const SomParams& p) {
  nlohmann::json j;
  j["rows"] = p.rows;
  j["cols"] = p.cols;
  j["epochs"] = p.epochs;
  j["sigma0"] = p.initial_sigma();
  j["sigma_final"] = p.sigma_final;
  j["lr0"] = p.lr0;
  j["lr_final"] = p.lr_final;
  return j;
}

}  // namespace detail

// Builds the full passport report from an ingested corpus directory.
// Structure stats run on variant A; frequency, n-grams, embeddings and topics
// on variant C, mirroring how the statistics are defined.
inline nlohmann::json build_passport(const std::string& corpus_dir,
                                     const PassportConfig& cfg) {
  namespace fs = std::filesystem;
  nlohmann::json report;

  const Corpus corpus_a = detail::stage("load", [&] {
    if (!fs::exists(corpus_dir))
      throw IoError("missing corpus directory: " + corpus_dir);
    return load_corpus(corpus_dir + "/variants/A");
  });
  const Corpus corpus_c =
      detail::stage("load", [&] { return load_corpus(corpus_dir + "/variants/C"); });
  const auto lists = default_stopword_lists();

  // --- stats ---
  const StructureStats structure = detail::stage(
      "structure", [&] { return corpus_structure(corpus_a, lists); });
  const FrequencyTable full_frequency =
      detail::stage("frequency", [&] { return term_frequency(corpus_c, 0); });

  report["structure"] = {{"total_tokens", structure.total_tokens},
                         {"unique_terms", structure.unique_terms},
                         {"unique_ratio", structure.unique_ratio},
                         {"special_count", structure.special_count},
                         {"special_fraction_all", structure.special_fraction_all},
                         {"meaningful_count", structure.meaningful_count},
                         {"special_to_meaningful", structure.special_to_meaningful}};

  {
    nlohmann::json entries = nlohmann::json::array();
    const std::size_t keep = std::min(cfg.stats.top_terms, full_frequency.entries.size());
    for (std::size_t i = 0; i < keep; ++i)
      entries.push_back({{"term", full_frequency.entries[i].first},
                         {"count", full_frequency.entries[i].second}});
    report["frequency"] = {{"entries", std::move(entries)},
                           {"total_tokens", full_frequency.total_tokens}};
  }

  detail::stage("zipf", [&] {
    const ZipfFit fit = zipf_fit(full_frequency, cfg.stats.zipf_max_rank);
    nlohmann::json curve = nlohmann::json::array();
    for (std::int64_t r = 0; r < fit.ranks_used; ++r)
      curve.push_back(full_frequency.entries[static_cast<std::size_t>(r)].second);
    report["zipf"] = {{"slope", fit.slope},
                      {"intercept", fit.intercept},
                      {"r_squared", fit.r_squared},
                      {"ranks_used", fit.ranks_used},
                      {"curve", std::move(curve)}};
    return 0;
  });

  detail::stage("ngrams", [&] {
    const auto bigram_counts = detail::count_ngrams(corpus_c, 2);
    const auto trigram_counts = detail::count_ngrams(corpus_c, 3);
    report["bigrams"] = detail::ngram_table_json(detail::table_from_counts(
        corpus_c, bigram_counts, 2, cfg.stats.ngram_top));
    report["trigrams"] = detail::ngram_table_json(detail::table_from_counts(
        corpus_c, trigram_counts, 3, cfg.stats.ngram_top));

    nlohmann::json cooc = nlohmann::json::object();
    for (const auto& entry : report["frequency"]["entries"]) {
      const std::string term = entry["term"].get<std::string>();
      const auto id = corpus_c.vocab.lookup(term);
      nlohmann::json phrases = nlohmann::json::array();
      for (const auto& [terms, count] : detail::cooccurrence_from_counts(
               corpus_c, bigram_counts, trigram_counts, id,
               cfg.stats.cooccurrence_top))
        phrases.push_back({{"terms", terms}, {"count", count}});
      cooc[term] = std::move(phrases);
    }
    report["cooccurrence"] = std::move(cooc);
    return 0;
  });

  // --- embeddings ---
  EmbedParams word_params = cfg.embed;
  word_params.seed = cfg.master_seed + kSeedEmbedWords;
  const EmbeddingModel word_model = detail::stage(
      "embed-words", [&] { return train_word2vec(corpus_c, word_params); });

  EmbedParams doc_params = cfg.embed;
  doc_params.seed = cfg.master_seed + kSeedEmbedDocs;
  const DocEmbeddingModel doc_model = detail::stage(
      "embed-docs", [&] { return train_doc2vec(corpus_c, doc_params); });

  // Query terms: configured, or the most frequent terms present in the model.
  std::vector<std::string> queries = cfg.similarity_queries;
  if (queries.empty()) {
    for (const auto& [term, count] : full_frequency.entries) {
      if (queries.size() >= 3) break;
      if (word_model.vocab.lookup(term) >= 0) queries.push_back(term);
    }
  }

  detail::stage("similarity", [&] {
    nlohmann::json neighborhoods = nlohmann::json::object();
    for (const auto& q : queries) {
      nlohmann::json list = nlohmann::json::array();
      for (const auto& [term, score] :
           most_similar(word_model, q, cfg.neighborhood_size))
        list.push_back({{"term", term}, {"score", score}});
      neighborhoods[q] = std::move(list);
    }
    report["similarity_neighborhoods"] = std::move(neighborhoods);
    return 0;
  });

  // --- topics ---
  LdaParams lda_params = cfg.topics;
  lda_params.seed = cfg.master_seed + kSeedTopics;
  const TopicModel topic_model =
      detail::stage("topics", [&] { return train_lda(corpus_c, lda_params); });
  {
    nlohmann::json topics = nlohmann::json::array();
    for (int k = 0; k < topic_model.topics; ++k) {
      nlohmann::json words = nlohmann::json::array();
      for (const auto& [term, prob] : top_words(topic_model, k, cfg.topic_top_words))
        words.push_back({{"term", term}, {"probability", prob}});
      nlohmann::json docs = nlohmann::json::array();
      for (const auto& [doc_id, theta] :
           top_documents(topic_model, k, cfg.topic_top_docs))
        docs.push_back({{"doc_id", doc_id}, {"theta", theta}});
      topics.push_back(
          {{"topic", k}, {"words", std::move(words)}, {"documents", std::move(docs)}});
    }
    report["topics"] = std::move(topics);
  }

  // --- SOMs ---
  detail::stage("som-words", [&] {
    // Top som_word_limit terms by frequency (count desc, term asc).
    std::vector<std::size_t> ids(word_model.vocab.size());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
    std::sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) {
      if (word_model.vocab.counts[a] != word_model.vocab.counts[b])
        return word_model.vocab.counts[a] > word_model.vocab.counts[b];
      return word_model.vocab.id_to_term[a] < word_model.vocab.id_to_term[b];
    });
    if (cfg.som_word_limit > 0 && ids.size() > cfg.som_word_limit)
      ids.resize(cfg.som_word_limit);
    Matrix inputs(ids.size(), word_model.input_vectors.cols);
    for (std::size_t i = 0; i < ids.size(); ++i)
      std::copy(word_model.input_vectors.row(ids[i]),
                word_model.input_vectors.row(ids[i]) + inputs.cols, inputs.row(i));

    SomParams p = cfg.som_words;
    if (p.rows <= 0 || p.cols <= 0)
      p.rows = p.cols = default_grid_side(inputs.rows);
    p.seed = cfg.master_seed + kSeedSomWords;
    const SomGrid grid = train_som(inputs, p, "words");
    report["som_words"] = detail::som_section_json(grid, inputs);
    report["metadata"]["params"]["som_words"] = detail::som_params_json(p);
    return 0;
  });

  detail::stage("som-docs", [&] {
    SomParams p = cfg.som_docs;
    if (p.rows <= 0 || p.cols <= 0)
      p.rows = p.cols = default_grid_side(doc_model.doc_vectors.rows);
    p.seed = cfg.master_seed + kSeedSomDocs;
    const SomGrid grid = train_som(doc_model.doc_vectors, p, "documents");
    report["som_docs"] = detail::som_section_json(grid, doc_model.doc_vectors);
    report["metadata"]["params"]["som_docs"] = detail::som_params_json(p);
    return 0;
  });

  // --- projections ---
  detail::stage("project", [&] {
    nlohmann::json projections = nlohmann::json::array();
    std::size_t index = 0;
    for (const auto& q : queries) {
      const auto query_id = word_model.vocab.lookup(q);
      if (query_id < 0) continue;
      const auto neighbors = most_similar(word_model, q, cfg.neighborhood_size);
      const std::size_t n = neighbors.size() + 1;
      if (n < 3) continue;

      Matrix vectors(n, word_model.input_vectors.cols);
      std::vector<std::string> labels;
      labels.push_back(q);
      std::copy(word_model.input_vectors.row(query_id),
                word_model.input_vectors.row(query_id) + vectors.cols,
                vectors.row(0));
      for (std::size_t i = 0; i < neighbors.size(); ++i) {
        const auto id = word_model.vocab.lookup(neighbors[i].first);
        labels.push_back(neighbors[i].first);
        std::copy(word_model.input_vectors.row(id),
                  word_model.input_vectors.row(id) + vectors.cols,
                  vectors.row(i + 1));
      }

      TsneParams p = cfg.tsne;
      p.perplexity = std::min(p.perplexity, static_cast<double>(n - 1));
      p.seed = cfg.master_seed + kSeedProjection + index;
      const Projection2D projection = tsne(vectors, labels, p);

      nlohmann::json points = nlohmann::json::array();
      for (std::size_t i = 0; i < n; ++i)
        points.push_back({{"label", projection.labels[i]},
                          {"x", projection.points(i, 0)},
                          {"y", projection.points(i, 1)}});
      projections.push_back({{"query", q},
                             {"perplexity", p.perplexity},
                             {"points", std::move(points)}});
      ++index;
    }
    report["projections"] = std::move(projections);
    return 0;
  });

  // --- metadata ---
  auto& meta = report["metadata"];
  meta["tool"] = "passport";
  meta["version"] = kToolVersion;
  meta["master_seed"] = cfg.master_seed;
  meta["stage_seeds"] = {{"embed_words", cfg.master_seed + kSeedEmbedWords},
                         {"embed_docs", cfg.master_seed + kSeedEmbedDocs},
                         {"topics", cfg.master_seed + kSeedTopics},
                         {"som_words", cfg.master_seed + kSeedSomWords},
                         {"som_docs", cfg.master_seed + kSeedSomDocs},
                         {"projections_base", cfg.master_seed + kSeedProjection}};
  meta["params"]["embed"] = detail::embed_params_json(cfg.embed);
  meta["params"]["topics"] = {{"k", lda_params.topics},
                              {"alpha", lda_params.alpha},
                              {"beta", lda_params.beta},
                              {"iterations", lda_params.iterations},
                              {"burn_in", lda_params.burn_in}};
  meta["params"]["tsne"] = {{"perplexity", cfg.tsne.perplexity},
                            {"iterations", cfg.tsne.iterations},
                            {"learning_rate", cfg.tsne.learning_rate},
                            {"early_exaggeration", cfg.tsne.early_exaggeration},
                            {"exaggeration_steps", cfg.tsne.exaggeration_steps}};
  meta["params"]["stats"] = {{"top_terms", cfg.stats.top_terms},
                             {"zipf_max_rank", cfg.stats.zipf_max_rank},
                             {"ngram_top", cfg.stats.ngram_top},
                             {"cooccurrence_top", cfg.stats.cooccurrence_top}};
  meta["variants"] = {{"structure", "A"},
                      {"frequency", "C"},
                      {"ngrams", "C"},
                      {"embeddings", "C"},
                      {"topics", "C"}};
  meta["stopword_hashes"] = {{"english", lists.english_hash()},
                             {"platform", lists.platform_hash()}};
  meta["corpus"] = {{"directory", corpus_dir},
                    {"documents", corpus_a.docs.size()},
                    {"tokens_variant_a", corpus_a.vocab.total_tokens},
                    {"tokens_variant_c", corpus_c.vocab.total_tokens},
                    {"vocabulary_a", corpus_a.vocab.size()},
                    {"vocabulary_c", corpus_c.vocab.size()}};
  meta["notes"] = {{"topic_inference", "collapsed gibbs sampling, final-state estimate"},
                   {"doc_vectors", "distributed bag of words"},
                   {"doc2vec_untrained_docs", doc_model.untrained_docs.size()}};
  meta["similarity_queries"] = queries;
  meta["neighborhood_size"] = cfg.neighborhood_size;
  meta["som_word_limit"] = cfg.som_word_limit;
  meta["topic_top_words"] = cfg.topic_top_words;
  meta["topic_top_docs"] = cfg.topic_top_docs;

  return report;
}

// ---------------------------------------------------------------------------
// Output rendering. Plots and CSVs are pure functions of the report JSON.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string sanitize_filename(const std::string& s) {
  std::string out;
  for (char c : s) {
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
        (c >= '0' && c <= '9') || c == '-' || c == '_')
      out.push_back(c);
    else
      out.push_back('_');
  }
  return out.empty() ? "q" : out;
}

inline void write_file(const std::string& path, const std::string& content,
                       std::vector<std::string>& written) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << content;
  if (!out) throw IoError("write failed: " + path);
  written.push_back(path);
}

inline std::string umatrix_csv(const nlohmann::json& som_section) {
  std::string csv;
  for (const auto& row : som_section.at("umatrix").at("values")) {
    bool first = true;
    for (const auto& v : row) {
      if (!first) csv.push_back(',');
      first = false;
      csv += format_double(v.get<double>());
    }
    csv.push_back('\n');
  }
  return csv;
}

}  // namespace detail

// Renders the fixed plot set from a report; returns the files written.
inline std::vector<std::string> render_plots(const nlohmann::json& report,
                                             const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create plot directory: " + out_dir);
  std::vector<std::string> written;

  {
    std::vector<std::pair<std::string, std::int64_t>> entries;
    for (const auto& e : report.at("frequency").at("entries"))
      entries.emplace_back(e.at("term").get<std::string>(),
                           e.at("count").get<std::int64_t>());
    detail::write_file(out_dir + "/frequency.svg",
                       svg::bar_chart(entries, "Most frequent terms"), written);
  }
  {
    const auto& zipf = report.at("zipf");
    std::vector<std::int64_t> curve;
    for (const auto& c : zipf.at("curve")) curve.push_back(c.get<std::int64_t>());
    detail::write_file(
        out_dir + "/zipf.svg",
        svg::zipf_plot(curve, zipf.at("slope").get<double>(),
                       zipf.at("intercept").get<double>(),
                       "Rank-frequency distribution (log-log)"),
        written);
  }
  for (const auto& [key, title] :
       {std::pair<const char*, const char*>{"som_words", "U-matrix (word vectors)"},
        std::pair<const char*, const char*>{"som_docs", "U-matrix (document vectors)"}}) {
    const auto& section = report.at(key);
    std::vector<double> values;
    for (const auto& row : section.at("umatrix").at("values"))
      for (const auto& v : row) values.push_back(v.get<double>());
    detail::write_file(out_dir + "/umatrix_" +
                           (std::string(key) == "som_words" ? "words" : "docs") +
                           ".svg",
                       svg::heatmap(values, section.at("rows").get<int>(),
                                    section.at("cols").get<int>(), title),
                       written);
  }
  for (const auto& projection : report.at("projections")) {
    std::vector<double> xs, ys;
    std::vector<std::string> labels;
    for (const auto& point : projection.at("points")) {
      xs.push_back(point.at("x").get<double>());
      ys.push_back(point.at("y").get<double>());
      labels.push_back(point.at("label").get<std::string>());
    }
    const std::string query = projection.at("query").get<std::string>();
    detail::write_file(
        out_dir + "/tsne_" + detail::sanitize_filename(query) + ".svg",
        svg::scatter_plot(xs, ys, labels, "Similarity neighborhood: " + query, true),
        written);
  }
  return written;
}

// Writes projection and u-matrix CSV exports next to the report.
inline std::vector<std::string> write_csv_exports(const nlohmann::json& report,
                                                  const std::string& out_dir) {
  std::vector<std::string> written;
  for (const auto& projection : report.at("projections")) {
    std::string csv = "label,x,y\n";
    for (const auto& point : projection.at("points")) {
      csv += point.at("label").get<std::string>();
      csv.push_back(',');
      csv += format_double(point.at("x").get<double>());
      csv.push_back(',');
      csv += format_double(point.at("y").get<double>());
      csv.push_back('\n');
    }
    const std::string query = projection.at("query").get<std::string>();
    detail::write_file(
        out_dir + "/tsne_" + detail::sanitize_filename(query) + ".csv", csv, written);
  }
  detail::write_file(out_dir + "/umatrix_words.csv",
                     detail::umatrix_csv(report.at("som_words")), written);
  detail::write_file(out_dir + "/umatrix_docs.csv",
                     detail::umatrix_csv(report.at("som_docs")), written);
  return written;
}

// Full pipeline entry point: builds the report, writes report.json, CSV
// exports and SVG plots. On failure every file already written is removed.
inline nlohmann::json run_passport(const std::string& corpus_dir,
                                   const std::string& out_dir,
                                   const PassportConfig& cfg) {
  std::vector<std::string> written;
  try {
    const std::string serialized =
        canonical_dump(build_passport(corpus_dir, cfg), 2) + "\n";
    // Plots and CSVs are rendered from the round-tripped document so they are
    // pure functions of the stored report, not of transient full-precision
    // intermediates.
    const nlohmann::json report = nlohmann::json::parse(serialized);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory: " + out_dir);
    detail::write_file(out_dir + "/report.json", serialized, written);
    for (const auto& path : write_csv_exports(report, out_dir))
      written.push_back(path);
    for (const auto& path : render_plots(report, out_dir + "/plots"))
      written.push_back(path);
    return report;
  } catch (...) {
    for (const auto& path : written) {
      std::error_code ec;
      std::filesystem::remove(path, ec);
    }
    throw;
  }
}

}  // namespace passport
