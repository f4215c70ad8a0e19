#include <doctest.h>

#include <numeric>

#include "passport/ingest.hpp"
#include "passport/topics.hpp"

using namespace passport;

namespace {

Corpus planted_corpus(std::uint64_t seed, std::size_t docs = 200) {
  return build_variant(generate_fixture(seed, docs, FixtureProfile::PlantedTopics),
                       Variant::C, default_stopword_lists());
}

LdaParams small_params(std::uint64_t seed) {
  LdaParams p;
  p.topics = 2;
  p.alpha = 1.0;
  p.iterations = 200;
  p.burn_in = 100;
  p.seed = seed;
  return p;
}

// Hand-built model for the pure query operations.
TopicModel tiny_model() {
  TopicModel m;
  m.topics = 2;
  m.vocab_terms = {"a", "b", "c"};
  m.doc_ids = {"d0", "d1", "d2"};
  m.phi = Matrix(2, 3);
  m.phi(0, 0) = 0.5; m.phi(0, 1) = 0.3; m.phi(0, 2) = 0.2;
  m.phi(1, 0) = 0.1; m.phi(1, 1) = 0.1; m.phi(1, 2) = 0.8;
  m.theta = Matrix(3, 2);
  m.theta(0, 0) = 0.9; m.theta(0, 1) = 0.1;
  m.theta(1, 0) = 0.1; m.theta(1, 1) = 0.9;
  m.theta(2, 0) = 0.5; m.theta(2, 1) = 0.5;
  m.doc_tokens = {{0, 1}, {2}, {0, 2}};
  return m;
}

}  // namespace

TEST_CASE("lda params validate their invariants") {
  LdaParams p;
  p.topics = 1;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = {};
  p.alpha = 0.0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = {};
  p.burn_in = p.iterations;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  CHECK(LdaParams::default_alpha(10) == doctest::Approx(5.0));
}

TEST_CASE("train_lda rejects corpora with fewer tokens than topics") {
  DocumentSet set;
  set.docs.push_back({"d", "solo", {}, {}, {}});
  const auto corpus = build_variant(set, Variant::A, default_stopword_lists());
  LdaParams p;
  p.topics = 2;
  CHECK_THROWS_AS(train_lda(corpus, p), TrainingError);
}

TEST_CASE("same seed reproduces identical assignments") {
  const auto corpus = planted_corpus(61, 60);
  const auto p = small_params(8);
  const auto a = train_lda(corpus, p);
  const auto b = train_lda(corpus, p);
  CHECK(a.assignments == b.assignments);
  CHECK(a.phi.data == b.phi.data);

  auto p2 = p;
  p2.seed = 9;
  const auto c = train_lda(corpus, p2);
  CHECK(a.assignments != c.assignments);
}

TEST_CASE("count matrices reconstruct exactly from assignments") {
  const auto corpus = planted_corpus(62, 80);
  const auto model = train_lda(corpus, small_params(3));

  Matrix n_kw(model.topics, model.vocab_terms.size());
  Matrix n_dk(model.doc_ids.size(), model.topics);
  for (std::size_t d = 0; d < model.doc_tokens.size(); ++d) {
    for (std::size_t i = 0; i < model.doc_tokens[d].size(); ++i) {
      n_kw(model.assignments[d][i], model.doc_tokens[d][i]) += 1.0;
      n_dk(d, model.assignments[d][i]) += 1.0;
    }
  }
  CHECK(n_kw.data == model.n_kw.data);
  CHECK(n_dk.data == model.n_dk.data);

  // row sums of n_dk equal document lengths
  for (std::size_t d = 0; d < model.doc_ids.size(); ++d) {
    double row = 0;
    for (int k = 0; k < model.topics; ++k) row += model.n_dk(d, k);
    CHECK(row == static_cast<double>(model.doc_tokens[d].size()));
  }
}

TEST_CASE("phi and theta rows are probability simplices") {
  const auto corpus = planted_corpus(63, 80);
  const auto model = train_lda(corpus, small_params(4));
  for (int k = 0; k < model.topics; ++k) {
    double sum = 0;
    for (std::size_t w = 0; w < model.vocab_terms.size(); ++w) {
      CHECK(model.phi(k, w) >= 0.0);
      sum += model.phi(k, w);
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
  for (std::size_t d = 0; d < model.doc_ids.size(); ++d) {
    double sum = 0;
    for (int k = 0; k < model.topics; ++k) {
      CHECK(model.theta(d, k) >= 0.0);
      sum += model.theta(d, k);
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("planted topics are recovered with pure keyword lists") {
  const auto corpus = planted_corpus(64);
  auto p = small_params(5);
  p.iterations = 500;
  p.burn_in = 300;
  const auto model = train_lda(corpus, p);
  for (int k = 0; k < 2; ++k) {
    int group_a = 0;
    for (const auto& [term, prob] : top_words(model, k, 10))
      group_a += term[1] == 'a';
    const double purity = std::max(group_a, 10 - group_a) / 10.0;
    CHECK(purity >= 0.9);
  }
}

TEST_CASE("top_words ranks by probability with lexicographic ties") {
  const auto model = tiny_model();
  const auto top2 = top_words(model, 0, 2);
  REQUIRE(top2.size() == 2);
  CHECK(top2[0] == std::pair<std::string, double>{"a", 0.5});
  CHECK(top2[1] == std::pair<std::string, double>{"b", 0.3});

  // n > V truncates to V; probabilities non-increasing
  const auto all = top_words(model, 1, 10);
  CHECK(all.size() == 3);
  for (std::size_t i = 1; i < all.size(); ++i)
    CHECK(all[i - 1].second >= all[i].second);

  CHECK_THROWS_AS(top_words(model, 2, 1), ValidationError);
  CHECK_THROWS_AS(top_words(model, -1, 1), ValidationError);
}

TEST_CASE("top_documents ranks by theta and skips empty docs") {
  auto model = tiny_model();
  const auto top1 = top_documents(model, 0, 1);
  REQUIRE(top1.size() == 1);
  CHECK(top1[0].first == "d0");
  CHECK(top1[0].second == doctest::Approx(0.9));

  CHECK(top_documents(model, 0, 10).size() == 3);

  model.doc_tokens[1].clear();  // mark d1 empty
  const auto without_empty = top_documents(model, 1, 10);
  CHECK(without_empty.size() == 2);
  for (const auto& [id, theta] : without_empty) CHECK(id != "d1");

  CHECK_THROWS_AS(top_documents(model, 5, 1), ValidationError);
}

TEST_CASE("log_likelihood is finite, non-positive, and catches mismatches") {
  const auto corpus = planted_corpus(65, 80);
  const auto model = train_lda(corpus, small_params(6));
  const double ll = log_likelihood(model, corpus);
  CHECK(std::isfinite(ll));
  CHECK(ll <= 0.0);

  const auto other = planted_corpus(66, 30);
  CHECK_THROWS_AS(log_likelihood(model, other), ValidationError);
}

TEST_CASE("single-term vocabulary collapses to log-likelihood zero") {
  DocumentSet set;
  set.docs.push_back({"d", "word word", {}, {}, {}});
  const auto corpus = build_variant(set, Variant::A, default_stopword_lists());
  LdaParams p;
  p.topics = 2;
  p.iterations = 10;
  p.burn_in = 5;
  const auto model = train_lda(corpus, p);
  CHECK(log_likelihood(model, corpus) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("relabeling topics leaves the log-likelihood unchanged") {
  const auto corpus = planted_corpus(67, 80);
  auto p = small_params(7);
  p.topics = 3;
  const auto model = train_lda(corpus, p);
  const double ll = log_likelihood(model, corpus);

  TopicModel permuted = model;
  const int perm[3] = {2, 0, 1};
  for (int k = 0; k < 3; ++k)
    for (std::size_t w = 0; w < model.vocab_terms.size(); ++w)
      permuted.phi(perm[k], w) = model.phi(k, w);
  for (std::size_t d = 0; d < model.doc_ids.size(); ++d)
    for (int k = 0; k < 3; ++k) permuted.theta(d, perm[k]) = model.theta(d, k);

  CHECK(log_likelihood(permuted, corpus) == doctest::Approx(ll).epsilon(1e-9));
}

TEST_CASE("post-burn-in likelihood exceeds the early phase on planted data") {
  const auto corpus = planted_corpus(42);
  auto p = small_params(42);
  p.alpha = 2.0;
  p.iterations = 500;
  p.burn_in = 300;
  p.ll_every = 10;
  const auto model = train_lda(corpus, p);
  std::vector<double> early, late;
  for (const auto& [iter, ll] : model.ll_history) {
    if (iter <= 100) early.push_back(ll);
    if (iter >= 400) late.push_back(ll);
  }
  REQUIRE(!early.empty());
  REQUIRE(!late.empty());
  std::sort(early.begin(), early.end());
  std::sort(late.begin(), late.end());
  CHECK(late[late.size() / 2] > early[early.size() / 2]);
}

TEST_CASE("documents emptied by preprocessing get a uniform theta row") {
  DocumentSet set = generate_fixture(70, 30, FixtureProfile::PlantedTopics);
  set.docs[4].text = "the and of";  // all stopwords
  const auto corpus = build_variant(set, Variant::C, default_stopword_lists());
  const auto model = train_lda(corpus, small_params(12));
  REQUIRE(model.empty_docs == std::vector<std::size_t>{4});
  for (int k = 0; k < model.topics; ++k)
    CHECK(model.theta(4, k) == doctest::Approx(0.5));
}
