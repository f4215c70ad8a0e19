#include <doctest.h>

#include <map>

#include "passport/ingest.hpp"
#include "passport/stats.hpp"

using namespace passport;

namespace {

// The three-document hand fixture used across structure/frequency tests.
DocumentSet hand_fixture() {
  DocumentSet set;
  set.docs.push_back({"d1", "great new design #mab16", {}, {}, {}});
  set.docs.push_back({"d2", "great design @alice http://t.co/x", {}, {}, {}});
  set.docs.push_back({"d3", "design is not new", {}, {}, {}});
  return set;
}

FrequencyTable table_of(std::vector<std::int64_t> counts) {
  FrequencyTable t;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    t.entries.emplace_back("t" + std::to_string(i), counts[i]);
    t.total_tokens += counts[i];
  }
  return t;
}

}  // namespace

TEST_CASE("corpus_structure on the hand fixture, exact") {
  const auto lists = default_stopword_lists();
  const auto corpus = build_variant(hand_fixture(), Variant::A, lists);
  const auto stats = corpus_structure(corpus, lists);
  CHECK(stats.total_tokens == 12);
  CHECK(stats.unique_terms == 8);
  CHECK(stats.unique_ratio == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(stats.special_count == 2);
  CHECK(stats.special_fraction_all == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(stats.meaningful_count == 5);
  CHECK(stats.special_to_meaningful == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("corpus_structure: single doc and empty corpus") {
  const auto lists = default_stopword_lists();
  DocumentSet one;
  one.docs.push_back({"d", "design", {}, {}, {}});
  const auto stats = corpus_structure(build_variant(one, Variant::A, lists), lists);
  CHECK(stats.total_tokens == 1);
  CHECK(stats.unique_terms == 1);
  CHECK(stats.unique_ratio == 1.0);
  CHECK(stats.special_count == 0);

  CHECK_THROWS_AS(corpus_structure(build_variant(DocumentSet{}, Variant::A, lists), lists),
                  ValidationError);
}

TEST_CASE("term_frequency ranks by count desc, term asc") {
  const auto lists = default_stopword_lists();
  const auto corpus = build_variant(hand_fixture(), Variant::A, lists);
  const auto top3 = term_frequency(corpus, 3);
  REQUIRE(top3.entries.size() == 3);
  CHECK(top3.entries[0] == std::pair<std::string, std::int64_t>{"design", 3});
  CHECK(top3.entries[1] == std::pair<std::string, std::int64_t>{"great", 2});
  CHECK(top3.entries[2] == std::pair<std::string, std::int64_t>{"new", 2});

  // top_k larger than V truncates to V
  CHECK(term_frequency(corpus, 100).entries.size() == 8);

  // untruncated counts sum to the corpus total
  const auto full = term_frequency(corpus, 0);
  std::int64_t sum = 0;
  for (const auto& [term, count] : full.entries) sum += count;
  CHECK(sum == corpus.vocab.total_tokens);
  CHECK(full.total_tokens == corpus.vocab.total_tokens);
}

TEST_CASE("zipf_fit recovers an exact power law") {
  const auto fit = zipf_fit(table_of({1200, 600, 400, 300}), 1000);
  CHECK(fit.slope == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(fit.ranks_used == 4);
}

TEST_CASE("zipf_fit on constant counts has slope 0") {
  const auto fit = zipf_fit(table_of({5, 5, 5, 5}), 1000);
  CHECK(fit.slope == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("zipf_fit needs at least 3 ranks") {
  CHECK_THROWS_AS(zipf_fit(table_of({4, 2}), 1000), ValidationError);
  CHECK_THROWS_AS(zipf_fit(table_of({9, 7, 3}), 2), ValidationError);
}

TEST_CASE("zipf_fit is scale-invariant in counts") {
  const auto base = table_of({977, 606, 333, 140, 88, 31, 17, 9, 5, 2});
  auto scaled = base;
  for (auto& [term, count] : scaled.entries) count *= 7;
  const auto f1 = zipf_fit(base, 10);
  const auto f2 = zipf_fit(scaled, 10);
  CHECK(f2.slope == doctest::Approx(f1.slope).epsilon(1e-9));
  CHECK(f2.r_squared == doctest::Approx(f1.r_squared).epsilon(1e-9));
  CHECK(f2.intercept == doctest::Approx(f1.intercept + std::log10(7.0)).epsilon(1e-9));
}

TEST_CASE("zipf_fit respects max_rank") {
  const auto table = table_of({1000, 500, 333, 250, 200, 7, 7, 7});
  const auto fit = zipf_fit(table, 5);
  CHECK(fit.ranks_used == 5);
  CHECK(fit.slope == doctest::Approx(-1.0).epsilon(1e-3));
}

TEST_CASE("ngrams counts adjacent pairs within documents") {
  DocumentSet set;
  set.docs.push_back({"d1", "design is not new", {}, {}, {}});
  const auto corpus = build_variant(set, Variant::A, default_stopword_lists());
  const auto table = ngrams(corpus, 2, 0);
  REQUIRE(table.entries.size() == 3);
  CHECK(table.total_ngrams == 3);
  std::map<std::vector<std::string>, std::int64_t> got(table.entries.begin(),
                                                       table.entries.end());
  CHECK(got.at({"design", "is"}) == 1);
  CHECK(got.at({"is", "not"}) == 1);
  CHECK(got.at({"not", "new"}) == 1);
}

TEST_CASE("ngrams: single-token docs, document boundaries, validation") {
  DocumentSet set;
  set.docs.push_back({"d1", "alpha", {}, {}, {}});
  set.docs.push_back({"d2", "beta", {}, {}, {}});
  const auto corpus = build_variant(set, Variant::A, default_stopword_lists());
  CHECK(ngrams(corpus, 2, 0).entries.empty());  // never across boundaries

  CHECK_THROWS_AS(ngrams(corpus, 4, 0), ValidationError);
  CHECK_THROWS_AS(ngrams(corpus, 1, 0), ValidationError);
}

TEST_CASE("ngrams equal a brute-force sliding-window oracle") {
  const auto set = generate_fixture(17, 300, FixtureProfile::Zipfian);
  const auto corpus = build_variant(set, Variant::C, default_stopword_lists());

  for (int n : {2, 3}) {
    std::map<std::vector<std::string>, std::int64_t> oracle;
    std::int64_t oracle_total = 0;
    for (const auto& doc : set.docs) {
      std::vector<std::string> words;
      for (const auto& tok : tokenize(doc.text)) words.push_back(tok.surface);
      for (std::size_t i = 0; i + n <= words.size(); ++i) {
        oracle[{words.begin() + i, words.begin() + i + n}] += 1;
        ++oracle_total;
      }
    }
    const auto table = ngrams(corpus, n, 0);
    REQUIRE(table.entries.size() == oracle.size());
    CHECK(table.total_ngrams == oracle_total);
    for (const auto& [terms, count] : table.entries)
      CHECK(oracle.at(terms) == count);
    // ordering: counts non-increasing, lexicographic within ties
    for (std::size_t i = 1; i < table.entries.size(); ++i) {
      const auto& prev = table.entries[i - 1];
      const auto& cur = table.entries[i];
      CHECK(prev.second >= cur.second);
      if (prev.second == cur.second) CHECK(prev.first < cur.first);
    }
    // total matches sum over docs of max(0, len - n + 1)
    std::int64_t expected_total = 0;
    for (const auto& doc : corpus.docs)
      expected_total += std::max<std::int64_t>(
          0, static_cast<std::int64_t>(doc.tokens.size()) - n + 1);
    CHECK(table.total_ngrams == expected_total);
  }
}

TEST_CASE("cooccurrence_around gathers n-grams containing the term") {
  DocumentSet set;
  set.docs.push_back({"d1", "new design", {}, {}, {}});
  set.docs.push_back({"d2", "great design", {}, {}, {}});
  const auto corpus = build_variant(set, Variant::A, default_stopword_lists());
  const auto hits = cooccurrence_around(corpus, "design", 10);
  REQUIRE(hits.size() == 2);
  CHECK(hits[0].first == std::vector<std::string>{"great", "design"});
  CHECK(hits[1].first == std::vector<std::string>{"new", "design"});

  for (const auto& [terms, count] : hits)
    CHECK(std::find(terms.begin(), terms.end(), "design") != terms.end());
}

TEST_CASE("cooccurrence_around: isolated term and unknown term") {
  DocumentSet set;
  set.docs.push_back({"d1", "solo", {}, {}, {}});
  set.docs.push_back({"d2", "pair here", {}, {}, {}});
  const auto corpus = build_variant(set, Variant::A, default_stopword_lists());
  CHECK(cooccurrence_around(corpus, "solo", 10).empty());
  CHECK_THROWS_AS(cooccurrence_around(corpus, "absent", 10), LookupError);
}

TEST_CASE("cooccurrence truncates to top_k and respects ordering") {
  const auto set = generate_fixture(4, 400, FixtureProfile::Zipfian);
  const auto corpus = build_variant(set, Variant::C, default_stopword_lists());
  const auto term = term_frequency(corpus, 1).entries[0].first;
  const auto hits = cooccurrence_around(corpus, term, 10);
  CHECK(hits.size() == 10);
  for (std::size_t i = 1; i < hits.size(); ++i) {
    CHECK(hits[i - 1].second >= hits[i].second);
    if (hits[i - 1].second == hits[i].second) CHECK(hits[i - 1].first < hits[i].first);
  }
}

TEST_CASE("compare_frequencies reports ranks and relative frequencies") {
  const auto a = table_of({10, 5, 4, 1});  // t0..t3, total 20
  FrequencyTable b;
  b.entries = {{"t1", 8}, {"t0", 2}};
  b.total_tokens = 10;

  const auto rows = compare_frequencies(a, b, {"t0", "t1", "t3"});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].rank_a == 1);
  CHECK(rows[0].rank_b == 2);
  CHECK(rows[0].rel_freq_a == doctest::Approx(0.5));
  CHECK(rows[0].rel_freq_b == doctest::Approx(0.2));
  CHECK(rows[1].rank_a == 2);
  CHECK(rows[1].rank_b == 1);
  // absent from b -> null rank, zero relative frequency
  CHECK(rows[2].rank_a == 4);
  CHECK_FALSE(rows[2].rank_b.has_value());
  CHECK(rows[2].rel_freq_b == 0.0);
}

TEST_CASE("compare_frequencies of identical tables has equal ranks") {
  const auto a = table_of({7, 6, 5});
  const auto rows = compare_frequencies(a, a, {"t0", "t1", "t2"});
  for (const auto& row : rows) {
    REQUIRE(row.rank_a.has_value());
    CHECK(row.rank_a == row.rank_b);
    CHECK(row.rel_freq_a == row.rel_freq_b);
  }
}
