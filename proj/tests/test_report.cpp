#include <doctest.h>

#include <cstdlib>
#include <sys/wait.h>

#include "passport/report.hpp"

#include "support/schema_check.hpp"
#include "support/temp_dir.hpp"

using namespace passport;
using test_support::TempDir;
using test_support::read_file;

namespace {

// Small, fast configuration used by the orchestration tests.
PassportConfig fast_config() {
  PassportConfig cfg;
  cfg.master_seed = 42;
  cfg.embed.dim = 16;
  cfg.embed.epochs = 2;
  cfg.embed.min_count = 2;
  cfg.topics.topics = 3;
  cfg.topics.alpha = 1.0;
  cfg.topics.iterations = 60;
  cfg.topics.burn_in = 30;
  cfg.som_words.epochs = 3;
  cfg.som_docs.epochs = 3;
  cfg.tsne.iterations = 150;
  cfg.stats.top_terms = 12;
  return cfg;
}

std::string make_corpus(const TempDir& dir, std::size_t docs = 150) {
  const auto set = generate_fixture(7, docs, FixtureProfile::Zipfian);
  save_jsonl(set, dir.file("fixture.jsonl"));
  run_ingest(dir.file("fixture.jsonl"), "en", dir.file("corpus"));
  return dir.file("corpus");
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(PASSPORT_CLI_PATH) + " " + args;
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("run_ingest writes documents, meta and all three variants") {
  TempDir dir;
  const auto corpus_dir = make_corpus(dir, 40);
  CHECK(std::filesystem::exists(corpus_dir + "/documents.jsonl"));
  CHECK(std::filesystem::exists(corpus_dir + "/meta.json"));
  for (const char* v : {"A", "B", "C"}) {
    const auto variant_dir = corpus_dir + std::string("/variants/") + v;
    CHECK(std::filesystem::exists(variant_dir + "/vocab.tsv"));
    CHECK(std::filesystem::exists(variant_dir + "/docs.jsonl"));
    CHECK(std::filesystem::exists(variant_dir + "/meta.json"));
  }
  const auto a = load_corpus(corpus_dir + "/variants/A");
  CHECK(a.docs.size() == 40);
}

TEST_CASE("build_passport produces a complete, schema-valid report") {
  TempDir dir;
  const auto corpus_dir = make_corpus(dir);
  const auto report = build_passport(corpus_dir, fast_config());

  for (const char* key :
       {"metadata", "structure", "frequency", "zipf", "bigrams", "trigrams",
        "cooccurrence", "similarity_neighborhoods", "topics", "som_words",
        "som_docs", "projections"})
    CHECK(report.contains(key));

  const auto schema_text = read_file(std::string(PASSPORT_DOCS_DIR) + "/report.schema.json");
  REQUIRE(!schema_text.empty());
  const auto schema = nlohmann::json::parse(schema_text);
  const auto violation = test_support::check_schema(schema, report, schema);
  CHECK_MESSAGE(violation.empty(), violation);
}

TEST_CASE("report values equal standalone module runs with the derived seeds") {
  TempDir dir;
  const auto corpus_dir = make_corpus(dir);
  const auto cfg = fast_config();
  const auto report = build_passport(corpus_dir, cfg);

  const auto lists = default_stopword_lists();
  const auto corpus_a = load_corpus(corpus_dir + "/variants/A");
  const auto corpus_c = load_corpus(corpus_dir + "/variants/C");

  // structure on variant A
  const auto structure = corpus_structure(corpus_a, lists);
  CHECK(report["structure"]["total_tokens"].get<std::int64_t>() == structure.total_tokens);
  CHECK(report["structure"]["unique_ratio"].get<double>() ==
        doctest::Approx(structure.unique_ratio).epsilon(1e-12));

  // zipf on the full variant-C table
  const auto fit = zipf_fit(term_frequency(corpus_c, 0), cfg.stats.zipf_max_rank);
  CHECK(report["zipf"]["slope"].get<double>() == doctest::Approx(fit.slope).epsilon(1e-12));
  CHECK(report["zipf"]["r_squared"].get<double>() ==
        doctest::Approx(fit.r_squared).epsilon(1e-12));

  // embeddings with the derived stage seed
  auto embed_params = cfg.embed;
  embed_params.seed = cfg.master_seed + kSeedEmbedWords;
  const auto model = train_word2vec(corpus_c, embed_params);
  const auto query = report["metadata"]["similarity_queries"][0].get<std::string>();
  const auto neighbors = most_similar(model, query, cfg.neighborhood_size);
  const auto reported = report["similarity_neighborhoods"][query];
  REQUIRE(reported.size() == neighbors.size());
  for (std::size_t i = 0; i < neighbors.size(); ++i) {
    CHECK(reported[i]["term"].get<std::string>() == neighbors[i].first);
    CHECK(reported[i]["score"].get<double>() ==
          doctest::Approx(neighbors[i].second).epsilon(1e-12));
  }

  // topics with the derived stage seed
  auto lda_params = cfg.topics;
  lda_params.seed = cfg.master_seed + kSeedTopics;
  const auto topic_model = train_lda(corpus_c, lda_params);
  const auto words = top_words(topic_model, 0, cfg.topic_top_words);
  REQUIRE(report["topics"][0]["words"].size() == words.size());
  CHECK(report["topics"][0]["words"][0]["term"].get<std::string>() == words[0].first);
}

TEST_CASE("run_passport is byte-identical across runs") {
  TempDir dir;
  const auto corpus_dir = make_corpus(dir);
  const auto cfg = fast_config();
  run_passport(corpus_dir, dir.file("out1"), cfg);
  run_passport(corpus_dir, dir.file("out2"), cfg);

  const auto report1 = read_file(dir.file("out1") + "/report.json");
  const auto report2 = read_file(dir.file("out2") + "/report.json");
  REQUIRE(!report1.empty());
  CHECK(report1 == report2);

  for (const auto& entry :
       std::filesystem::directory_iterator(dir.file("out1") + "/plots")) {
    const auto name = entry.path().filename().string();
    const auto svg1 = read_file(entry.path().string());
    const auto svg2 = read_file(dir.file("out2") + "/plots/" + name);
    CHECK_MESSAGE(svg1 == svg2, name);
    CHECK(svg1.rfind("<svg", 0) == 0);
  }

  // a different master seed must change the report
  auto other = cfg;
  other.master_seed = 43;
  run_passport(corpus_dir, dir.file("out3"), other);
  CHECK(read_file(dir.file("out3") + "/report.json") != report1);
}

TEST_CASE("run_passport on a missing corpus fails with a stage-named error") {
  TempDir dir;
  CHECK_THROWS_WITH_AS(
      run_passport(dir.file("nope"), dir.file("out"), fast_config()),
      doctest::Contains("stage load"), IoError);
  CHECK_FALSE(std::filesystem::exists(dir.file("out") + "/report.json"));
}

TEST_CASE("plots are regenerable from the stored report alone") {
  TempDir dir;
  const auto corpus_dir = make_corpus(dir);
  run_passport(corpus_dir, dir.file("out"), fast_config());

  const auto report = nlohmann::json::parse(read_file(dir.file("out") + "/report.json"));
  render_plots(report, dir.file("replot"));
  for (const auto& entry :
       std::filesystem::directory_iterator(dir.file("out") + "/plots")) {
    const auto name = entry.path().filename().string();
    CHECK_MESSAGE(read_file(entry.path().string()) ==
                      read_file(dir.file("replot") + "/" + name),
                  name);
  }
}

TEST_CASE("frequency bar chart binds one bar per entry") {
  std::vector<std::pair<std::string, std::int64_t>> entries;
  for (int i = 0; i < 30; ++i) entries.emplace_back("term" + std::to_string(i), 100 - i);
  const auto svg = svg::bar_chart(entries, "chart");
  std::size_t bars = 0;
  for (std::size_t at = svg.find("#4878a8"); at != std::string::npos;
       at = svg.find("#4878a8", at + 1))
    ++bars;
  CHECK(bars == 30);
}

TEST_CASE("zipf plot embeds the fitted slope from the report") {
  const auto svg_text = svg::zipf_plot({100, 50, 33, 25}, -1.0123456, 2.0, "zipf");
  CHECK(svg_text.find("slope -1.01235") != std::string::npos);  // 6 significant digits
}

TEST_CASE("all-zero u-matrix renders as a uniform heatmap") {
  const auto svg_text = svg::heatmap(std::vector<double>(16, 0.0), 4, 4, "flat");
  std::size_t white_cells = 0;
  for (std::size_t at = svg_text.find("rgb(255,255,255)"); at != std::string::npos;
       at = svg_text.find("rgb(255,255,255)", at + 1))
    ++white_cells;
  CHECK(white_cells == 16);
}

TEST_CASE("parse_config merges nested sections over defaults") {
  const auto cfg = parse_config(nlohmann::json::parse(R"({
    "seed": 7,
    "embed": {"dim": 32, "epochs": 3},
    "topics": {"k": 4},
    "som_words": {"rows": 8, "cols": 9},
    "tsne": {"perplexity": 3.5},
    "queries": ["alpha", "beta"],
    "som_word_limit": 500
  })"));
  CHECK(cfg.master_seed == 7);
  CHECK(cfg.embed.dim == 32);
  CHECK(cfg.embed.epochs == 3);
  CHECK(cfg.embed.window == 5);  // untouched default
  CHECK(cfg.topics.topics == 4);
  CHECK(cfg.topics.alpha == doctest::Approx(12.5));  // 50 / k
  CHECK(cfg.som_words.rows == 8);
  CHECK(cfg.som_words.cols == 9);
  CHECK(cfg.som_docs.rows == 0);  // still heuristic
  CHECK(cfg.tsne.perplexity == doctest::Approx(3.5));
  CHECK(cfg.similarity_queries == std::vector<std::string>{"alpha", "beta"});
  CHECK(cfg.som_word_limit == 500);

  CHECK_THROWS_AS(parse_config(nlohmann::json::parse("[1,2]")), ConfigError);
}

TEST_CASE("cli: help, error mapping and exit codes") {
  TempDir dir;
  CHECK(run_cli("--help > " + dir.file("help.txt") + " 2>&1") == 0);
  const auto help = read_file(dir.file("help.txt"));
  for (const char* sub : {"ingest", "stats", "embed", "topics", "som", "project", "passport"})
    CHECK_MESSAGE(help.find(sub) != std::string::npos, sub);

  // missing corpus directory -> I/O error -> exit 2
  CHECK(run_cli("stats --corpus " + dir.file("missing") + " --out " +
                dir.file("s.json") + " > /dev/null 2>&1") == 2);

  // unknown subcommand -> usage error, nonzero
  CHECK(run_cli("frobnicate > /dev/null 2>&1") != 0);

  // bad flag value -> validation error
  CHECK(run_cli("fixture --profile bogus --out " + dir.file("x.jsonl") +
                " > /dev/null 2>&1") == 1);
}

TEST_CASE("cli end-to-end: fixture -> ingest -> passport, schema-valid output") {
  TempDir dir;
  REQUIRE(run_cli("fixture --seed 5 --n-docs 120 --profile zipfian --out " +
                  dir.file("f.jsonl") + " > /dev/null") == 0);
  REQUIRE(run_cli("ingest --input " + dir.file("f.jsonl") + " --lang en --out " +
                  dir.file("corpus") + " > /dev/null") == 0);

  // config file + flag override for the master seed
  test_support::write_lines(dir.file("cfg.json"),
                            {R"({"seed": 1, "embed": {"dim": 12, "epochs": 2, "min_count": 2},)",
                             R"( "topics": {"k": 3, "iterations": 40, "burn_in": 20},)",
                             R"( "som_words": {"epochs": 2}, "som_docs": {"epochs": 2},)",
                             R"( "tsne": {"iterations": 120}})"});
  REQUIRE(run_cli("passport --corpus " + dir.file("corpus") + " --config " +
                  dir.file("cfg.json") + " --seed 9 --out " + dir.file("out") +
                  " > /dev/null") == 0);

  const auto report = nlohmann::json::parse(read_file(dir.file("out") + "/report.json"));
  CHECK(report["metadata"]["master_seed"].get<std::uint64_t>() == 9);  // flag wins
  CHECK(report["metadata"]["params"]["embed"]["dim"].get<int>() == 12);

  const auto schema = nlohmann::json::parse(
      read_file(std::string(PASSPORT_DOCS_DIR) + "/report.schema.json"));
  const auto violation = test_support::check_schema(schema, report, schema);
  CHECK_MESSAGE(violation.empty(), violation);
}
