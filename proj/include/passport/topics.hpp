#pragma once

// LDA by collapsed Gibbs sampling. Estimates come from the final
// post-burn-in state rather than sample averaging, which avoids topic-label
// switching; the sweep order (documents in order, tokens in order) and the
// seeded sampler make a run fully reproducible.

#include <cstdint>
#include <string>
#include <vector>

#include "passport/common.hpp"
#include "passport/preprocess.hpp"

namespace passport {

struct LdaParams {
  int topics = 10;
  double alpha = 5.0;  // 50 / topics by convention; see default_alpha()
  double beta = 0.01;
  int iterations = 500;
  int burn_in = 300;
  std::uint64_t seed = 42;
  int ll_every = 0;  // > 0 records log-likelihood every ll_every iterations

  static double default_alpha(int topics) { return 50.0 / topics; }

  void validate() const {
    if (topics < 2) throw ValidationError("topic count must be >= 2");
    if (!(alpha > 0.0) || !(beta > 0.0))
      throw ValidationError("alpha and beta must be > 0");
    if (!(iterations > burn_in) || burn_in < 0)
      throw ValidationError("iterations must exceed burn_in >= 0");
  }
};

struct TopicModel {
  int topics = 0;
  std::vector<std::string> vocab_terms;
  std::vector<std::string> doc_ids;
  Matrix phi;    // K x V topic-word probabilities
  Matrix theta;  // D x K document-topic probabilities
  std::vector<std::vector<std::int32_t>> assignments;  // per token, doc order
  std::vector<std::vector<std::int32_t>> doc_tokens;   // word ids per doc
  Matrix n_kw;  // K x V counts
  Matrix n_dk;  // D x K counts
  std::vector<std::size_t> empty_docs;  // uniform theta, excluded from training
  std::vector<std::pair<int, double>> ll_history;  // (iteration, logLikelihood)
};

namespace detail {

inline double lda_log_likelihood(const Matrix& theta, const Matrix& phi,
                                 const std::vector<std::vector<std::int32_t>>& docs) {
  double ll = 0.0;
  const std::size_t topics = phi.rows;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    const double* theta_row = theta.row(d);
    for (auto w : docs[d]) {
      double p = 0.0;
      for (std::size_t k = 0; k < topics; ++k) p += theta_row[k] * phi(k, w);
      ll += std::log(p);
    }
  }
  return ll;
}

}  // namespace detail

inline TopicModel train_lda(const Corpus& corpus, const LdaParams& p) {
  p.validate();
  const auto vocab_size = corpus.vocab.size();
  if (corpus.vocab.total_tokens < p.topics)
    throw TrainingError("fewer tokens than topics");

  const int K = p.topics;
  TopicModel model;
  model.topics = K;
  model.vocab_terms = corpus.vocab.id_to_term;
  model.doc_ids.reserve(corpus.docs.size());
  for (const auto& doc : corpus.docs) model.doc_ids.push_back(doc.doc_id);

  const std::size_t D = corpus.docs.size();
  model.doc_tokens.resize(D);
  model.assignments.resize(D);
  model.n_kw = Matrix(K, vocab_size);
  model.n_dk = Matrix(D, K);
  std::vector<double> n_k(K, 0.0);

  Rng rng(p.seed);
  for (std::size_t d = 0; d < D; ++d) {
    model.doc_tokens[d] = corpus.docs[d].tokens;
    if (model.doc_tokens[d].empty()) {
      model.empty_docs.push_back(d);
      continue;
    }
    model.assignments[d].reserve(model.doc_tokens[d].size());
    for (auto w : model.doc_tokens[d]) {
      const auto z = static_cast<std::int32_t>(rng.below(K));
      model.assignments[d].push_back(z);
      model.n_kw(z, w) += 1.0;
      model.n_dk(d, z) += 1.0;
      n_k[z] += 1.0;
    }
  }

  const double v_beta = static_cast<double>(vocab_size) * p.beta;
  std::vector<double> cumulative(K);

  auto estimate = [&]() {
    Matrix phi(K, vocab_size);
    Matrix theta(D, K);
    for (int k = 0; k < K; ++k) {
      const double denom = n_k[k] + v_beta;
      for (std::size_t w = 0; w < vocab_size; ++w)
        phi(k, w) = (model.n_kw(k, w) + p.beta) / denom;
    }
    for (std::size_t d = 0; d < D; ++d) {
      const double len = static_cast<double>(model.doc_tokens[d].size());
      if (model.doc_tokens[d].empty()) {
        for (int k = 0; k < K; ++k) theta(d, k) = 1.0 / K;
        continue;
      }
      const double denom = len + K * p.alpha;
      for (int k = 0; k < K; ++k)
        theta(d, k) = (model.n_dk(d, k) + p.alpha) / denom;
    }
    return std::make_pair(std::move(phi), std::move(theta));
  };

  for (int iter = 1; iter <= p.iterations; ++iter) {
    for (std::size_t d = 0; d < D; ++d) {
      const auto& tokens = model.doc_tokens[d];
      auto& z_row = model.assignments[d];
      double* dk = model.n_dk.row(d);
      for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto w = tokens[i];
        const auto old_z = z_row[i];
        model.n_kw(old_z, w) -= 1.0;
        dk[old_z] -= 1.0;
        n_k[old_z] -= 1.0;

        double total = 0.0;
        for (int k = 0; k < K; ++k) {
          total += (dk[k] + p.alpha) * (model.n_kw(k, w) + p.beta) /
                   (n_k[k] + v_beta);
          cumulative[k] = total;
        }
        const double u = rng.uniform() * total;
        int new_z = 0;
        while (new_z < K - 1 && cumulative[new_z] < u) ++new_z;

        z_row[i] = static_cast<std::int32_t>(new_z);
        model.n_kw(new_z, w) += 1.0;
        dk[new_z] += 1.0;
        n_k[new_z] += 1.0;
      }
    }
    if (p.ll_every > 0 && iter % p.ll_every == 0) {
      auto [phi, theta] = estimate();
      model.ll_history.emplace_back(
          iter, detail::lda_log_likelihood(theta, phi, model.doc_tokens));
    }
  }

  std::tie(model.phi, model.theta) = estimate();
  return model;
}

// Top-n terms of topic k by phi, ties lexicographic ascending.
inline std::vector<std::pair<std::string, double>> top_words(
    const TopicModel& model, int k, std::size_t n) {
  if (k < 0 || k >= model.topics) throw ValidationError("topic index out of range");
  std::vector<std::pair<std::string, double>> scored;
  scored.reserve(model.vocab_terms.size());
  for (std::size_t w = 0; w < model.vocab_terms.size(); ++w)
    scored.emplace_back(model.vocab_terms[w], model.phi(k, w));
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (scored.size() > n) scored.resize(n);
  return scored;
}

// Top-n documents of topic k by theta; zero-token documents are excluded.
inline std::vector<std::pair<std::string, double>> top_documents(
    const TopicModel& model, int k, std::size_t n) {
  if (k < 0 || k >= model.topics) throw ValidationError("topic index out of range");
  std::vector<std::pair<std::size_t, double>> scored;
  scored.reserve(model.doc_ids.size());
  for (std::size_t d = 0; d < model.doc_ids.size(); ++d) {
    if (model.doc_tokens[d].empty()) continue;
    scored.emplace_back(d, model.theta(d, k));
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;  // stable on doc position
  });
  if (scored.size() > n) scored.resize(n);
  std::vector<std::pair<std::string, double>> out;
  out.reserve(scored.size());
  for (const auto& [d, score] : scored)
    out.emplace_back(model.doc_ids[d], score);
  return out;
}

// Sum over tokens of ln sum_k theta_dk * phi_kw; <= 0 for any real corpus.
inline double log_likelihood(const TopicModel& model, const Corpus& corpus) {
  if (model.vocab_terms.size() != corpus.vocab.size() ||
      model.doc_ids.size() != corpus.docs.size())
    throw ValidationError("model/corpus mismatch");
  std::vector<std::vector<std::int32_t>> docs;
  docs.reserve(corpus.docs.size());
  for (const auto& doc : corpus.docs) docs.push_back(doc.tokens);
  return detail::lda_log_likelihood(model.theta, model.phi, docs);
}

}  // namespace passport
