#include <doctest.h>

#include "passport/embed.hpp"
#include "passport/embed_io.hpp"
#include "passport/ingest.hpp"

#include "support/temp_dir.hpp"

using namespace passport;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t dim, double scale) {
  std::vector<double> v(dim);
  for (double& x : v) x = rng.uniform(-scale, scale);
  return v;
}

Corpus two_group_corpus(std::uint64_t seed, std::size_t docs = 200) {
  return build_variant(generate_fixture(seed, docs, FixtureProfile::TwoGroup),
                       Variant::C, default_stopword_lists());
}

}  // namespace

TEST_CASE("sgns_pair_loss closed forms") {
  const std::vector<double> zero{0, 0, 0};
  const std::vector<double> ortho{1, 0, 0};
  // c.o = 0, no negatives -> ln 2
  CHECK(sgns_pair_loss(zero, ortho, {}) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  // large positive dot -> loss approaches 0
  const std::vector<double> big{40, 0, 0};
  CHECK(sgns_pair_loss(big, ortho, {}) < 1e-15);

  // all-zero dots -> (1 + negatives) * ln 2
  CHECK(sgns_pair_loss(zero, ortho, {{0, 1, 0}, {0, 0, 1}}) ==
        doctest::Approx(3.0 * std::log(2.0)).epsilon(1e-12));

  CHECK_THROWS_AS(sgns_pair_loss({1, 2}, {1, 2, 3}, {}), ValidationError);
  CHECK_THROWS_AS(sgns_pair_loss({1, 2}, {1, 2}, {{1, 2, 3}}), ValidationError);
}

TEST_CASE("sgns_pair_loss is non-negative on random inputs") {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const auto c = random_vec(rng, 8, 3.0);
    const auto o = random_vec(rng, 8, 3.0);
    std::vector<std::vector<double>> negs;
    for (int k = 0; k < 3; ++k) negs.push_back(random_vec(rng, 8, 3.0));
    CHECK(sgns_pair_loss(c, o, negs) >= 0.0);
  }
}

TEST_CASE("sgns analytic gradients match central finite differences") {
  Rng rng(202);
  const double h = 1e-5;
  double max_rel = 0.0;
  for (int pair = 0; pair < 10; ++pair) {
    auto center = random_vec(rng, 10, 1.0);
    auto context = random_vec(rng, 10, 1.0);
    std::vector<std::vector<double>> negatives;
    for (int k = 0; k < 3; ++k) negatives.push_back(random_vec(rng, 10, 1.0));

    const auto grads = sgns_pair_gradients(center, context, negatives);
    auto check_component = [&](std::vector<double>& vec, std::size_t d, double analytic) {
      const double keep = vec[d];
      vec[d] = keep + h;
      const double up = sgns_pair_loss(center, context, negatives);
      vec[d] = keep - h;
      const double down = sgns_pair_loss(center, context, negatives);
      vec[d] = keep;
      const double fd = (up - down) / (2 * h);
      const double rel = std::abs(analytic - fd) / std::max({1e-8, std::abs(analytic), std::abs(fd)});
      max_rel = std::max(max_rel, rel);
    };
    for (std::size_t d = 0; d < 10; ++d) {
      check_component(center, d, grads.center[d]);
      check_component(context, d, grads.context[d]);
      for (std::size_t k = 0; k < negatives.size(); ++k)
        check_component(negatives[k], d, grads.negatives[k][d]);
    }
  }
  CHECK(max_rel < 1e-4);
}

TEST_CASE("cosine_similarity closed forms and errors") {
  CHECK(cosine_similarity({1, 0}, {1, 0}) == doctest::Approx(1.0));
  CHECK(cosine_similarity({1, 0}, {0, 1}) == doctest::Approx(0.0));
  CHECK(cosine_similarity({1, 0}, {1, 1}) == doctest::Approx(0.70711).epsilon(1e-5));
  CHECK_THROWS_AS(cosine_similarity({0, 0}, {1, 0}), ValidationError);
  CHECK_THROWS_AS(cosine_similarity({1, 0}, {1, 0, 0}), ValidationError);
}

TEST_CASE("train_word2vec produces finite matrices of the right shape") {
  const auto corpus = two_group_corpus(404);
  EmbedParams p;
  p.dim = 50;
  p.epochs = 2;
  p.subsample_t = 0;
  const auto model = train_word2vec(corpus, p);
  CHECK(model.dim == 50);
  CHECK(model.input_vectors.rows == model.vocab.size());
  CHECK(model.input_vectors.cols == 50);
  CHECK(model.output_vectors.rows == model.vocab.size());
  CHECK(model.input_vectors.all_finite());
  CHECK(model.output_vectors.all_finite());
}

TEST_CASE("min_count filters rare terms out of the model vocabulary") {
  DocumentSet set;
  set.docs.push_back({"d1", "common common common common rare", {}, {}, {}});
  const auto corpus = build_variant(set, Variant::A, default_stopword_lists());
  EmbedParams p;
  p.dim = 4;
  p.min_count = 2;
  p.epochs = 1;
  const auto model = train_word2vec(corpus, p);
  CHECK(model.vocab.lookup("common") >= 0);
  CHECK(model.vocab.lookup("rare") < 0);

  p.min_count = 100;
  CHECK_THROWS_AS(train_word2vec(corpus, p), TrainingError);
}

TEST_CASE("training is bit-reproducible for a fixed seed") {
  const auto corpus = two_group_corpus(505, 80);
  EmbedParams p;
  p.dim = 20;
  p.epochs = 3;
  p.seed = 99;
  p.subsample_t = 0;
  const auto a = train_word2vec(corpus, p);
  const auto b = train_word2vec(corpus, p);
  CHECK(a.input_vectors.data == b.input_vectors.data);
  CHECK(a.output_vectors.data == b.output_vectors.data);

  p.seed = 100;
  const auto c = train_word2vec(corpus, p);
  CHECK(a.input_vectors.data != c.input_vectors.data);

  const auto da = train_doc2vec(corpus, p);
  const auto db = train_doc2vec(corpus, p);
  CHECK(da.doc_vectors.data == db.doc_vectors.data);
}

TEST_CASE("two_group embedding separates the planted groups") {
  const auto corpus = two_group_corpus(1010);
  EmbedParams p;
  p.dim = 50;
  p.epochs = 5;
  p.seed = 1;
  p.subsample_t = 0;
  const auto model = train_word2vec(corpus, p);

  std::vector<std::size_t> ga, gb;
  for (std::size_t i = 0; i < model.vocab.size(); ++i)
    (model.vocab.id_to_term[i][1] == 'a' ? ga : gb).push_back(i);
  REQUIRE(!ga.empty());
  REQUIRE(!gb.empty());

  auto mean_cos = [&](const std::vector<std::size_t>& xs,
                      const std::vector<std::size_t>& ys, bool same) {
    double s = 0;
    int n = 0;
    for (std::size_t a = 0; a < xs.size(); ++a)
      for (std::size_t b = same ? a + 1 : 0; b < ys.size(); ++b) {
        s += cosine_similarity(vector_of(model.input_vectors, xs[a]),
                               vector_of(model.input_vectors, ys[b]));
        ++n;
      }
    return s / n;
  };
  const double intra = (mean_cos(ga, ga, true) + mean_cos(gb, gb, true)) / 2.0;
  const double inter = mean_cos(ga, gb, false);
  CHECK(intra - inter >= 0.2);
}

TEST_CASE("subsampling drops instances, never vocabulary entries") {
  const auto corpus = two_group_corpus(66, 100);
  EmbedParams p;
  p.dim = 10;
  p.epochs = 1;
  p.subsample_t = 1e-4;  // aggressive on this tiny vocabulary
  const auto model = train_word2vec(corpus, p);
  std::size_t eligible = 0;
  for (std::size_t id = 0; id < corpus.vocab.size(); ++id)
    eligible += corpus.vocab.counts[id] >= p.min_count;
  CHECK(model.vocab.size() == eligible);
}

TEST_CASE("mean pair loss decreases from first to final epoch") {
  const auto corpus = two_group_corpus(77);
  EmbedParams p;
  p.dim = 50;
  p.epochs = 5;
  p.seed = 3;
  p.subsample_t = 0;
  EmbedDiag diag;
  train_word2vec(corpus, p, &diag);
  REQUIRE(diag.epoch_mean_loss.size() == 5);
  CHECK(diag.epoch_mean_loss.back() < diag.epoch_mean_loss.front());
}

TEST_CASE("most_similar ranks by cosine and excludes the query") {
  EmbeddingModel model;
  model.dim = 2;
  model.input_vectors = Matrix(3, 2);
  const char* terms[] = {"a", "b", "c"};
  const double rows[3][2] = {{1, 0}, {0.9, 0.1}, {0, 1}};
  for (int i = 0; i < 3; ++i) {
    model.vocab.id_to_term.push_back(terms[i]);
    model.vocab.id_to_kind.push_back(TokenKind::Word);
    model.vocab.counts.push_back(1);
    model.vocab.term_to_id.emplace(terms[i], i);
    model.input_vectors(i, 0) = rows[i][0];
    model.input_vectors(i, 1) = rows[i][1];
  }

  const auto top1 = most_similar(model, "a", 1);
  REQUIRE(top1.size() == 1);
  CHECK(top1[0].first == "b");
  CHECK(top1[0].second == doctest::Approx(0.9 / std::sqrt(0.82)).epsilon(1e-9));

  const auto all = most_similar(model, "a", 10);
  CHECK(all.size() == 2);
  for (const auto& [term, score] : all) CHECK(term != "a");
  for (std::size_t i = 1; i < all.size(); ++i)
    CHECK(all[i - 1].second >= all[i].second);

  CHECK_THROWS_AS(most_similar(model, "zzz", 3), LookupError);
  CHECK_THROWS_AS(most_similar(model, "a", 0), ValidationError);
}

TEST_CASE("train_doc2vec shapes, zero-token docs, duplicates") {
  auto set = generate_fixture(909, 200, FixtureProfile::TwoGroup);
  set.docs[10].text = set.docs[0].text;  // duplicate token sequence
  set.docs[20].text = "the and for";     // all stopwords -> empty in variant C
  const auto corpus = build_variant(set, Variant::C, default_stopword_lists());

  EmbedParams p;
  p.dim = 50;
  p.epochs = 40;
  p.seed = 5;
  p.subsample_t = 0;
  const auto model = train_doc2vec(corpus, p);
  CHECK(model.doc_vectors.rows == 200);
  CHECK(model.doc_vectors.cols == 50);
  CHECK(model.doc_vectors.all_finite());

  // the emptied doc is flagged and keeps a zero vector
  REQUIRE(model.untrained_docs == std::vector<std::size_t>{20});
  for (std::size_t d = 0; d < 50; ++d) CHECK(model.doc_vectors(20, d) == 0.0);

  // duplicates end nearer to each other than to an unrelated document
  const double dup = cosine_similarity(vector_of(model.doc_vectors, 0),
                                       vector_of(model.doc_vectors, 10));
  const double other = cosine_similarity(vector_of(model.doc_vectors, 0),
                                         vector_of(model.doc_vectors, 37));
  CHECK(dup > other);

  CHECK_THROWS_AS(train_doc2vec(Corpus{}, p), TrainingError);
}

TEST_CASE("embedding params validate their invariants") {
  EmbedParams p;
  p.dim = 1;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = {};
  p.window = 0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = {};
  p.initial_lr = 1.5;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = {};
  p.negative = 0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
}

TEST_CASE("model persistence round-trips through binary float32") {
  test_support::TempDir dir;
  const auto corpus = two_group_corpus(123, 60);
  EmbedParams p;
  p.dim = 16;
  p.epochs = 2;
  p.subsample_t = 0;
  const auto model = train_word2vec(corpus, p);
  const auto docs = train_doc2vec(corpus, p);
  save_embedding_model(model, p, dir.file("model"));
  save_doc_model(docs, p, dir.file("model"));

  const auto loaded = load_embedding_model(dir.file("model"));
  REQUIRE(loaded.vocab.size() == model.vocab.size());
  CHECK(loaded.vocab.id_to_term == model.vocab.id_to_term);
  for (std::size_t i = 0; i < model.input_vectors.data.size(); ++i)
    CHECK(loaded.input_vectors.data[i] ==
          static_cast<double>(static_cast<float>(model.input_vectors.data[i])));

  const auto words = load_vectors(dir.file("model"), "words");
  CHECK(words.vectors.rows == model.vocab.size());
  const auto dvecs = load_vectors(dir.file("model"), "docs");
  CHECK(dvecs.vectors.rows == 60);
  CHECK(dvecs.labels[0] == "d000000");
  CHECK_THROWS_AS(load_vectors(dir.file("model"), "nope"), ValidationError);
  CHECK_THROWS_AS(load_vectors(dir.file("absent"), "words"), IoError);

  // text header carries the shape
  const auto text = test_support::read_file(dir.file("model") + "/words.txt");
  CHECK(text.rfind("passport-vectors kind=words", 0) == 0);
}
