// passport CLI: ingest | stats | embed | topics | som | project | passport,
// plus `fixture` for generating synthetic test corpora.
//
// Exit codes: 0 success, 1 validation/configuration error, 2 I/O error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "passport/passport.hpp"

namespace {

using nlohmann::json;

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw passport::IoError("cannot write " + path);
  out << content;
  if (!out) throw passport::IoError("write failed: " + path);
}

passport::Corpus load_variant_corpus(const std::string& corpus_dir,
                                     const std::string& variant) {
  return passport::load_corpus(corpus_dir + "/variants/" +
                               passport::variant_name(
                                   passport::variant_from_name(variant)));
}

struct CliOptions {
  // ingest
  std::string input;
  std::string lang = "en";
  bool no_lang_filter = false;
  // shared
  std::string corpus_dir;
  std::string out;
  std::uint64_t seed = 42;
  // stats
  std::string variant = "C";
  std::size_t top = 30;
  std::size_t zipf_max_rank = 1000;
  // embed
  passport::EmbedParams embed;
  // topics
  passport::LdaParams lda;
  bool alpha_set = false;
  std::size_t top_words = 12;
  std::size_t top_docs = 10;
  // som
  std::string model_dir;
  std::string source = "words";
  std::string grid = "";
  passport::SomParams som;
  // project
  std::string term;
  std::size_t neighbors = 20;
  passport::TsneParams tsne;
  // passport
  std::string config_path;
  // fixture
  std::size_t n_docs = 100;
  std::string profile = "zipfian";
};

std::pair<int, int> parse_grid(const std::string& text) {
  const auto x = text.find('x');
  if (x == std::string::npos)
    throw passport::ValidationError("grid must look like 20x20");
  try {
    return {std::stoi(text.substr(0, x)), std::stoi(text.substr(x + 1))};
  } catch (const std::exception&) {
    throw passport::ValidationError("grid must look like 20x20");
  }
}

int cmd_ingest(const CliOptions& opt) {
  const auto summary = passport::run_ingest(
      opt.input, opt.no_lang_filter ? "" : opt.lang, opt.out);
  std::cout << "loaded " << summary.loaded << " documents, rejected "
            << summary.rejected << " lines, kept " << summary.kept << " after filtering\n";
  std::cout << "corpus written to " << opt.out << "\n";
  return 0;
}

int cmd_stats(const CliOptions& opt) {
  const auto lists = passport::default_stopword_lists();
  const auto corpus = load_variant_corpus(opt.corpus_dir, opt.variant);
  const auto corpus_a = load_variant_corpus(opt.corpus_dir, "A");

  json out;
  const auto structure = passport::corpus_structure(corpus_a, lists);
  out["structure"] = {{"total_tokens", structure.total_tokens},
                      {"unique_terms", structure.unique_terms},
                      {"unique_ratio", structure.unique_ratio},
                      {"special_count", structure.special_count},
                      {"special_fraction_all", structure.special_fraction_all},
                      {"meaningful_count", structure.meaningful_count},
                      {"special_to_meaningful", structure.special_to_meaningful}};

  const auto full = passport::term_frequency(corpus, 0);
  json entries = json::array();
  for (std::size_t i = 0; i < std::min(opt.top, full.entries.size()); ++i)
    entries.push_back(
        {{"term", full.entries[i].first}, {"count", full.entries[i].second}});
  out["frequency"] = {{"entries", std::move(entries)},
                      {"total_tokens", full.total_tokens}};

  if (full.entries.size() >= 3) {
    const auto fit = passport::zipf_fit(full, opt.zipf_max_rank);
    out["zipf"] = {{"slope", fit.slope},
                   {"intercept", fit.intercept},
                   {"r_squared", fit.r_squared},
                   {"ranks_used", fit.ranks_used}};
  } else {
    out["zipf"] = nullptr;
  }

  const auto bigram_counts = passport::detail::count_ngrams(corpus, 2);
  const auto trigram_counts = passport::detail::count_ngrams(corpus, 3);
  auto table_json = [](const passport::NGramTable& table) {
    json j;
    j["n"] = table.n;
    j["total"] = table.total_ngrams;
    j["entries"] = json::array();
    for (const auto& [terms, count] : table.entries)
      j["entries"].push_back({{"terms", terms}, {"count", count}});
    return j;
  };
  out["bigrams"] = table_json(
      passport::detail::table_from_counts(corpus, bigram_counts, 2, opt.top));
  out["trigrams"] = table_json(
      passport::detail::table_from_counts(corpus, trigram_counts, 3, opt.top));

  json cooc = json::object();
  for (const auto& entry : out["frequency"]["entries"]) {
    const auto term = entry["term"].get<std::string>();
    const auto id = corpus.vocab.lookup(term);
    json phrases = json::array();
    for (const auto& [terms, count] : passport::detail::cooccurrence_from_counts(
             corpus, bigram_counts, trigram_counts, id, 10))
      phrases.push_back({{"terms", terms}, {"count", count}});
    cooc[term] = std::move(phrases);
  }
  out["cooccurrence"] = std::move(cooc);

  write_text(opt.out, passport::canonical_dump(out, 2) + "\n");
  std::cout << "stats written to " << opt.out << "\n";
  return 0;
}

int cmd_embed(const CliOptions& opt) {
  auto params = opt.embed;
  params.seed = opt.seed;
  const auto corpus = load_variant_corpus(opt.corpus_dir, "C");
  const auto words = passport::train_word2vec(corpus, params);
  const auto docs = passport::train_doc2vec(corpus, params);
  passport::save_embedding_model(words, params, opt.out);
  passport::save_doc_model(docs, params, opt.out);
  std::cout << "trained " << words.vocab.size() << " word vectors and "
            << docs.doc_ids.size() << " document vectors (dim " << params.dim
            << ") -> " << opt.out << "\n";
  return 0;
}

int cmd_topics(const CliOptions& opt) {
  auto params = opt.lda;
  params.seed = opt.seed;
  if (!opt.alpha_set) params.alpha = passport::LdaParams::default_alpha(params.topics);
  const auto corpus = load_variant_corpus(opt.corpus_dir, "C");
  const auto model = passport::train_lda(corpus, params);

  json out;
  out["params"] = {{"k", params.topics},        {"alpha", params.alpha},
                   {"beta", params.beta},       {"iterations", params.iterations},
                   {"burn_in", params.burn_in}, {"seed", params.seed}};
  json topics = json::array();
  for (int k = 0; k < model.topics; ++k) {
    json words = json::array();
    for (const auto& [term, prob] : passport::top_words(model, k, opt.top_words))
      words.push_back({{"term", term}, {"probability", prob}});
    json docs = json::array();
    for (const auto& [doc_id, theta] : passport::top_documents(model, k, opt.top_docs))
      docs.push_back({{"doc_id", doc_id}, {"theta", theta}});
    topics.push_back({{"topic", k}, {"words", std::move(words)},
                      {"documents", std::move(docs)}});
  }
  out["topics"] = std::move(topics);
  out["log_likelihood"] = passport::log_likelihood(model, corpus);
  write_text(opt.out, passport::canonical_dump(out, 2) + "\n");
  std::cout << "topics written to " << opt.out << "\n";
  return 0;
}

int cmd_som(const CliOptions& opt) {
  const auto loaded = passport::load_vectors(opt.model_dir, opt.source);
  auto params = opt.som;
  params.seed = opt.seed;
  if (!opt.grid.empty()) {
    std::tie(params.rows, params.cols) = parse_grid(opt.grid);
  } else if (params.rows <= 0 || params.cols <= 0) {
    params.rows = params.cols = passport::default_grid_side(loaded.vectors.rows);
  }
  const auto grid = passport::train_som(
      loaded.vectors, params, opt.source == "docs" ? "documents" : "words");
  const auto um = passport::u_matrix(grid);

  std::error_code ec;
  std::filesystem::create_directories(opt.out, ec);
  if (ec) throw passport::IoError("cannot create output directory: " + opt.out);

  passport::Matrix weight_rows(grid.unit_count(), grid.dim);
  std::copy(grid.weights.begin(), grid.weights.end(), weight_rows.data.begin());
  passport::detail::write_matrix_binary(weight_rows, opt.out + "/grid.bin");

  json meta;
  meta["rows"] = grid.rows;
  meta["cols"] = grid.cols;
  meta["dim"] = grid.dim;
  meta["trained_on"] = grid.trained_on;
  meta["epochs"] = params.epochs;
  meta["sigma0"] = params.initial_sigma();
  meta["sigma_final"] = params.sigma_final;
  meta["lr0"] = params.lr0;
  meta["lr_final"] = params.lr_final;
  meta["seed"] = params.seed;
  meta["quantization_error"] = passport::quantization_error(grid, loaded.vectors);
  meta["topographic_error"] = passport::topographic_error(grid, loaded.vectors);
  write_text(opt.out + "/grid_meta.json", passport::canonical_dump(meta, 2) + "\n");

  std::string csv;
  for (int r = 0; r < um.rows; ++r) {
    for (int c = 0; c < um.cols; ++c) {
      if (c > 0) csv.push_back(',');
      csv += passport::format_double(um.at(r, c));
    }
    csv.push_back('\n');
  }
  write_text(opt.out + "/umatrix.csv", csv);
  write_text(opt.out + "/umatrix.svg",
             passport::svg::heatmap(um.values, um.rows, um.cols,
                                    "U-matrix (" + grid.trained_on + ")"));
  std::cout << "SOM (" << grid.rows << "x" << grid.cols << ") written to "
            << opt.out << "\n";
  return 0;
}

int cmd_project(const CliOptions& opt) {
  const auto model = passport::load_embedding_model(opt.model_dir);
  const auto neighbors = passport::most_similar(model, opt.term, opt.neighbors);
  const std::size_t n = neighbors.size() + 1;
  if (n < 3)
    throw passport::ValidationError("neighborhood too small for projection");

  passport::Matrix vectors(n, model.input_vectors.cols);
  std::vector<std::string> labels{opt.term};
  const auto query_id = model.vocab.lookup(opt.term);
  std::copy(model.input_vectors.row(query_id),
            model.input_vectors.row(query_id) + vectors.cols, vectors.row(0));
  for (std::size_t i = 0; i < neighbors.size(); ++i) {
    const auto id = model.vocab.lookup(neighbors[i].first);
    labels.push_back(neighbors[i].first);
    std::copy(model.input_vectors.row(id),
              model.input_vectors.row(id) + vectors.cols, vectors.row(i + 1));
  }

  auto params = opt.tsne;
  params.seed = opt.seed;
  params.perplexity = std::min(params.perplexity, static_cast<double>(n - 1));
  const auto projection = passport::tsne(vectors, labels, params);

  std::error_code ec;
  std::filesystem::create_directories(opt.out, ec);
  if (ec) throw passport::IoError("cannot create output directory: " + opt.out);

  std::string csv = "label,x,y\n";
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < n; ++i) {
    xs.push_back(projection.points(i, 0));
    ys.push_back(projection.points(i, 1));
    csv += projection.labels[i] + "," +
           passport::format_double(projection.points(i, 0)) + "," +
           passport::format_double(projection.points(i, 1)) + "\n";
  }
  const std::string stem = "tsne_" + passport::detail::sanitize_filename(opt.term);
  write_text(opt.out + "/" + stem + ".csv", csv);
  write_text(opt.out + "/" + stem + ".svg",
             passport::svg::scatter_plot(
                 xs, ys, labels, "Similarity neighborhood: " + opt.term, true));
  std::cout << "projection written to " << opt.out << "\n";
  return 0;
}

int cmd_fixture(const CliOptions& opt) {
  const auto set = passport::generate_fixture(
      opt.seed, opt.n_docs, passport::fixture_profile_from_name(opt.profile));
  passport::save_jsonl(set, opt.out);
  std::cout << "wrote " << set.docs.size() << " " << opt.profile
            << " documents to " << opt.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"corpus passport toolkit"};
  app.require_subcommand(1);
  CliOptions opt;
  passport::PassportConfig base_config;

  auto* ingest = app.add_subcommand("ingest", "load a JSONL corpus and build variants");
  ingest->add_option("--input", opt.input, "input JSONL file")->required();
  ingest->add_option("--lang", opt.lang, "language filter (ISO code)")
      ->capture_default_str();
  ingest->add_flag("--no-lang-filter", opt.no_lang_filter, "keep all languages");
  ingest->add_option("--out", opt.out, "output corpus directory")->required();

  auto* stats = app.add_subcommand("stats", "corpus statistics report");
  stats->add_option("--corpus", opt.corpus_dir, "corpus directory")->required();
  stats->add_option("--variant", opt.variant, "variant A|B|C for frequency/n-grams")
      ->capture_default_str();
  stats->add_option("--top", opt.top, "table size")->capture_default_str();
  stats->add_option("--zipf-max-rank", opt.zipf_max_rank, "ranks used in Zipf fit")
      ->capture_default_str();
  stats->add_option("--out", opt.out, "output JSON file")->required();

  auto* embed = app.add_subcommand("embed", "train word and document vectors");
  embed->add_option("--corpus", opt.corpus_dir, "corpus directory")->required();
  embed->add_option("--dim", opt.embed.dim, "vector dimensionality")
      ->capture_default_str();
  embed->add_option("--window", opt.embed.window, "max window span")
      ->capture_default_str();
  embed->add_option("--negative", opt.embed.negative, "negative samples per pair")
      ->capture_default_str();
  embed->add_option("--epochs", opt.embed.epochs, "training epochs")
      ->capture_default_str();
  embed->add_option("--lr", opt.embed.initial_lr, "initial learning rate")
      ->capture_default_str();
  embed->add_option("--min-count", opt.embed.min_count, "vocabulary count cutoff")
      ->capture_default_str();
  embed->add_option("--subsample", opt.embed.subsample_t,
                    "frequent-word subsampling threshold")
      ->capture_default_str();
  embed->add_option("--threads", opt.embed.threads,
                    "worker threads (>1 is non-deterministic)")
      ->capture_default_str();
  embed->add_option("--seed", opt.seed, "random seed")->capture_default_str();
  embed->add_option("--out", opt.out, "output model directory")->required();

  auto* topics = app.add_subcommand("topics", "LDA topic model");
  topics->add_option("--corpus", opt.corpus_dir, "corpus directory")->required();
  topics->add_option("--k", opt.lda.topics, "number of topics")->capture_default_str();
  auto* alpha_opt = topics->add_option("--alpha", opt.lda.alpha,
                                       "document-topic prior (default 50/k)");
  topics->add_option("--beta", opt.lda.beta, "topic-word prior")->capture_default_str();
  topics->add_option("--iters", opt.lda.iterations, "Gibbs iterations")
      ->capture_default_str();
  topics->add_option("--burn-in", opt.lda.burn_in, "burn-in iterations")
      ->capture_default_str();
  topics->add_option("--top-words", opt.top_words, "keywords per topic")
      ->capture_default_str();
  topics->add_option("--top-docs", opt.top_docs, "documents per topic")
      ->capture_default_str();
  topics->add_option("--seed", opt.seed, "random seed")->capture_default_str();
  topics->add_option("--out", opt.out, "output JSON file")->required();

  auto* som = app.add_subcommand("som", "train a self-organizing map");
  som->add_option("--model", opt.model_dir, "embedding model directory")->required();
  som->add_option("--source", opt.source, "words|docs")->capture_default_str();
  som->add_option("--grid", opt.grid, "grid size, e.g. 20x20 (default heuristic)");
  som->add_option("--epochs", opt.som.epochs, "training epochs")->capture_default_str();
  som->add_option("--sigma0", opt.som.sigma0, "initial neighborhood radius (0 = auto)")
      ->capture_default_str();
  som->add_option("--sigma-final", opt.som.sigma_final, "final neighborhood radius")
      ->capture_default_str();
  som->add_option("--lr0", opt.som.lr0, "initial learning rate")->capture_default_str();
  som->add_option("--lr-final", opt.som.lr_final, "final learning rate")
      ->capture_default_str();
  som->add_option("--seed", opt.seed, "random seed")->capture_default_str();
  som->add_option("--out", opt.out, "output directory")->required();

  auto* project = app.add_subcommand("project", "t-SNE projection of a similarity neighborhood");
  project->add_option("--model", opt.model_dir, "embedding model directory")->required();
  project->add_option("--term", opt.term, "query term")->required();
  project->add_option("--top", opt.neighbors, "neighborhood size")->capture_default_str();
  project->add_option("--perplexity", opt.tsne.perplexity, "t-SNE perplexity")
      ->capture_default_str();
  project->add_option("--iters", opt.tsne.iterations, "gradient steps")
      ->capture_default_str();
  project->add_option("--lr", opt.tsne.learning_rate, "learning rate")
      ->capture_default_str();
  project->add_option("--seed", opt.seed, "random seed")->capture_default_str();
  project->add_option("--out", opt.out, "output directory")->required();

  auto* full = app.add_subcommand("passport", "run the full pipeline");
  full->add_option("--corpus", opt.corpus_dir, "ingested corpus directory")->required();
  full->add_option("--config", opt.config_path, "JSON config file (flags override)");
  auto* seed_opt = full->add_option("--seed", opt.seed, "master seed");
  full->add_option("--out", opt.out, "output directory")->required();

  auto* fixture = app.add_subcommand("fixture", "generate a synthetic JSONL corpus");
  fixture->add_option("--seed", opt.seed, "random seed")->capture_default_str();
  fixture->add_option("--n-docs", opt.n_docs, "number of documents")
      ->capture_default_str();
  fixture->add_option("--profile", opt.profile, "zipfian|two_group|planted_topics")
      ->capture_default_str();
  fixture->add_option("--out", opt.out, "output JSONL file")->required();

  try {
    app.parse(argc, argv);
    opt.alpha_set = alpha_opt->count() > 0;

    if (ingest->parsed()) return cmd_ingest(opt);
    if (stats->parsed()) return cmd_stats(opt);
    if (embed->parsed()) return cmd_embed(opt);
    if (topics->parsed()) return cmd_topics(opt);
    if (som->parsed()) return cmd_som(opt);
    if (project->parsed()) return cmd_project(opt);
    if (fixture->parsed()) return cmd_fixture(opt);
    if (full->parsed()) {
      passport::PassportConfig cfg = opt.config_path.empty()
                                         ? base_config
                                         : passport::load_config_file(opt.config_path);
      if (seed_opt->count() > 0 || opt.config_path.empty())
        cfg.master_seed = opt.seed;
      passport::run_passport(opt.corpus_dir, opt.out, cfg);
      std::cout << "passport written to " << opt.out << "/report.json\n";
      return 0;
    }
    return 1;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);  // --help exits 0, usage errors exit nonzero
  } catch (const passport::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const passport::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
