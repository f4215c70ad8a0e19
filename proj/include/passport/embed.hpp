#pragma once

// Word vectors by skip-gram with negative sampling and document vectors by
// the distributed bag-of-words scheme, both trained from scratch with plain
// SGD. Training is bit-reproducible for a fixed seed in single-threaded mode;
// the opt-in lock-free parallel mode is not deterministic.

#include <atomic>
#include <cstdint>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include "passport/common.hpp"
#include "passport/preprocess.hpp"

namespace passport {

struct EmbedParams {
  int dim = 100;
  int window = 5;
  int negative = 5;
  int epochs = 5;
  double initial_lr = 0.025;
  int min_count = 5;
  double subsample_t = 1e-4;
  std::uint64_t seed = 42;
  int threads = 1;  // > 1 enables lock-free parallel training (non-deterministic)

  void validate() const {
    if (dim < 2) throw ValidationError("embedding dim must be >= 2");
    if (window < 1) throw ValidationError("window must be >= 1");
    if (negative < 1) throw ValidationError("negative must be >= 1");
    if (epochs < 1) throw ValidationError("epochs must be >= 1");
    if (!(initial_lr > 0.0 && initial_lr <= 1.0))
      throw ValidationError("initial_lr must be in (0, 1]");
    if (min_count < 1) throw ValidationError("min_count must be >= 1");
    if (subsample_t < 0.0) throw ValidationError("subsample_t must be >= 0");
    if (threads < 1) throw ValidationError("threads must be >= 1");
  }
};

struct EmbeddingModel {
  Vocabulary vocab;  // post min_count filtering, ids dense in corpus order
  int dim = 0;
  Matrix input_vectors;
  Matrix output_vectors;
};

struct DocEmbeddingModel {
  std::vector<std::string> doc_ids;
  int dim = 0;
  Matrix doc_vectors;
  Matrix output_vectors;                 // word output vectors, shared role
  std::vector<std::size_t> untrained_docs;  // zero-token docs, left at zero
};

// Mean pair loss over a fixed evaluation sample, recorded at every epoch end.
struct EmbedDiag {
  std::vector<double> epoch_mean_loss;
};

// ---------------------------------------------------------------------------
// Loss and gradients, exposed for verification.
// ---------------------------------------------------------------------------

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// -ln sigmoid(x), computed as softplus(-x) to stay finite for large |x|.
inline double neg_log_sigmoid(double x) {
  return x > 0.0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
}

// -ln s(c.o) - sum_n ln s(-c.n); >= 0, equals (1+|negatives|) ln 2 at zero.
inline double sgns_pair_loss(const std::vector<double>& center,
                             const std::vector<double>& context,
                             const std::vector<std::vector<double>>& negatives) {
  if (center.size() != context.size())
    throw ValidationError("sgns loss: dimension mismatch");
  double loss = neg_log_sigmoid(dot(center.data(), context.data(), center.size()));
  for (const auto& n : negatives) {
    if (n.size() != center.size())
      throw ValidationError("sgns loss: dimension mismatch");
    loss += neg_log_sigmoid(-dot(center.data(), n.data(), center.size()));
  }
  return loss;
}

struct SgnsGradients {
  std::vector<double> center;
  std::vector<double> context;
  std::vector<std::vector<double>> negatives;
};

inline SgnsGradients sgns_pair_gradients(
    const std::vector<double>& center, const std::vector<double>& context,
    const std::vector<std::vector<double>>& negatives) {
  if (center.size() != context.size())
    throw ValidationError("sgns gradients: dimension mismatch");
  const std::size_t dim = center.size();
  SgnsGradients g;
  g.center.assign(dim, 0.0);
  g.context.assign(dim, 0.0);

  const double gp = sigmoid(dot(center.data(), context.data(), dim)) - 1.0;
  for (std::size_t d = 0; d < dim; ++d) {
    g.center[d] += gp * context[d];
    g.context[d] = gp * center[d];
  }
  for (const auto& n : negatives) {
    if (n.size() != dim) throw ValidationError("sgns gradients: dimension mismatch");
    const double gn = sigmoid(dot(center.data(), n.data(), dim));
    std::vector<double> grad_n(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      g.center[d] += gn * n[d];
      grad_n[d] = gn * center[d];
    }
    g.negatives.push_back(std::move(grad_n));
  }
  return g;
}

inline double cosine_similarity(const std::vector<double>& a,
                                const std::vector<double>& b) {
  if (a.size() != b.size())
    throw ValidationError("cosine similarity: dimension mismatch");
  const double na = std::sqrt(dot(a.data(), a.data(), a.size()));
  const double nb = std::sqrt(dot(b.data(), b.data(), b.size()));
  if (na == 0.0 || nb == 0.0)
    throw ValidationError("cosine similarity undefined for zero vector");
  return dot(a.data(), b.data(), a.size()) / (na * nb);
}

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

namespace detail {

struct TrainingCorpus {
  Vocabulary vocab;                           // filtered, dense ids
  std::vector<std::vector<std::int32_t>> docs;  // filtered token ids
  std::vector<std::string> doc_ids;
  std::vector<double> neg_cdf;   // cumulative count^0.75
  std::vector<double> keep_prob; // subsampling keep probability per term
  std::int64_t total_tokens = 0;
};

inline TrainingCorpus prepare_training_corpus(const Corpus& corpus,
                                              const EmbedParams& p) {
  TrainingCorpus tc;
  std::vector<std::int32_t> remap(corpus.vocab.size(), -1);
  for (std::size_t id = 0; id < corpus.vocab.size(); ++id) {
    if (corpus.vocab.counts[id] < p.min_count) continue;
    remap[id] = static_cast<std::int32_t>(tc.vocab.id_to_term.size());
    tc.vocab.id_to_term.push_back(corpus.vocab.id_to_term[id]);
    tc.vocab.id_to_kind.push_back(corpus.vocab.id_to_kind[id]);
    tc.vocab.counts.push_back(corpus.vocab.counts[id]);
    tc.vocab.term_to_id.emplace(corpus.vocab.id_to_term[id], remap[id]);
    tc.vocab.total_tokens += corpus.vocab.counts[id];
  }
  if (tc.vocab.size() == 0)
    throw TrainingError("no term survives min_count filtering");

  tc.docs.reserve(corpus.docs.size());
  tc.doc_ids.reserve(corpus.docs.size());
  for (const auto& doc : corpus.docs) {
    std::vector<std::int32_t> mapped;
    mapped.reserve(doc.tokens.size());
    for (auto id : doc.tokens)
      if (remap[id] >= 0) mapped.push_back(remap[id]);
    tc.total_tokens += static_cast<std::int64_t>(mapped.size());
    tc.docs.push_back(std::move(mapped));
    tc.doc_ids.push_back(doc.doc_id);
  }

  tc.neg_cdf.resize(tc.vocab.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < tc.vocab.size(); ++i) {
    acc += std::pow(static_cast<double>(tc.vocab.counts[i]), 0.75);
    tc.neg_cdf[i] = acc;
  }

  tc.keep_prob.assign(tc.vocab.size(), 1.0);
  if (p.subsample_t > 0.0 && tc.vocab.total_tokens > 0) {
    for (std::size_t i = 0; i < tc.vocab.size(); ++i) {
      const double f = static_cast<double>(tc.vocab.counts[i]) /
                       static_cast<double>(tc.vocab.total_tokens);
      if (f > p.subsample_t) {
        const double keep =
            (std::sqrt(f / p.subsample_t) + 1.0) * p.subsample_t / f;
        tc.keep_prob[i] = keep < 1.0 ? keep : 1.0;
      }
    }
  }
  return tc;
}

inline std::int32_t draw_negative(const TrainingCorpus& tc, Rng& rng) {
  const double u = rng.uniform() * tc.neg_cdf.back();
  return static_cast<std::int32_t>(
      std::lower_bound(tc.neg_cdf.begin(), tc.neg_cdf.end(), u) -
      tc.neg_cdf.begin());
}

// One SGD step on the pair (input row, positive output row); negatives equal
// to the positive target are skipped, as in the reference trainer.
inline void sgns_update(double* in_row, Matrix& out, std::int32_t positive,
                        int negative, double alpha, const TrainingCorpus& tc,
                        Rng& rng, std::vector<double>& in_grad) {
  const std::size_t dim = out.cols;
  std::fill(in_grad.begin(), in_grad.end(), 0.0);

  double* pos_row = out.row(positive);
  double g = (1.0 - sigmoid(dot(in_row, pos_row, dim))) * alpha;
  for (std::size_t d = 0; d < dim; ++d) {
    in_grad[d] += g * pos_row[d];
    pos_row[d] += g * in_row[d];
  }
  for (int k = 0; k < negative; ++k) {
    const std::int32_t target = draw_negative(tc, rng);
    if (target == positive) continue;
    double* neg_row = out.row(target);
    g = -sigmoid(dot(in_row, neg_row, dim)) * alpha;
    for (std::size_t d = 0; d < dim; ++d) {
      in_grad[d] += g * neg_row[d];
      neg_row[d] += g * in_row[d];
    }
  }
  for (std::size_t d = 0; d < dim; ++d) in_row[d] += in_grad[d];
}

// Fixed evaluation sample for the per-epoch loss diagnostic: up to 256
// adjacent (center, context) pairs plus pre-drawn negatives.
struct EvalPair {
  std::int32_t center;
  std::int32_t context;
  std::vector<std::int32_t> negatives;
};

inline std::vector<EvalPair> build_eval_pairs(const TrainingCorpus& tc,
                                              const EmbedParams& p,
                                              bool doc_mode) {
  Rng rng(p.seed ^ 0xD1A6D1A6ULL);
  std::vector<EvalPair> pairs;
  for (std::size_t d = 0; d < tc.docs.size() && pairs.size() < 256; ++d) {
    const auto& doc = tc.docs[d];
    for (std::size_t i = 0; i + 1 < doc.size() && pairs.size() < 256; i += 4) {
      EvalPair pair;
      pair.center = doc_mode ? static_cast<std::int32_t>(d) : doc[i];
      pair.context = doc[i + 1];
      for (int k = 0; k < p.negative; ++k)
        pair.negatives.push_back(draw_negative(tc, rng));
      pairs.push_back(std::move(pair));
    }
  }
  return pairs;
}

inline double mean_eval_loss(const std::vector<EvalPair>& pairs,
                             const Matrix& in, const Matrix& out) {
  if (pairs.empty()) return 0.0;
  double total = 0.0;
  for (const auto& pair : pairs) {
    const double* cr = in.row(pair.center);
    const double* pr = out.row(pair.context);
    double loss = neg_log_sigmoid(dot(cr, pr, in.cols));
    for (auto n : pair.negatives)
      loss += neg_log_sigmoid(-dot(cr, out.row(n), in.cols));
    total += loss;
  }
  return total / static_cast<double>(pairs.size());
}

}  // namespace detail

// Skip-gram with negative sampling. Window span is drawn uniformly in
// [1, window] per center; windows never cross document boundaries. Input
// vectors start uniform in [-0.5/dim, 0.5/dim], output vectors at zero, and
// the learning rate decays linearly to initial_lr / 1e4.
inline EmbeddingModel train_word2vec(const Corpus& corpus, const EmbedParams& p,
                                     EmbedDiag* diag = nullptr) {
  p.validate();
  auto tc = detail::prepare_training_corpus(corpus, p);

  EmbeddingModel model;
  model.dim = p.dim;
  model.input_vectors = Matrix(tc.vocab.size(), p.dim);
  model.output_vectors = Matrix(tc.vocab.size(), p.dim);

  Rng rng(p.seed);
  const double half = 0.5 / static_cast<double>(p.dim);
  for (double& v : model.input_vectors.data) v = rng.uniform(-half, half);

  const auto eval_pairs =
      diag ? detail::build_eval_pairs(tc, p, false) : std::vector<detail::EvalPair>{};

  const double planned =
      static_cast<double>(p.epochs) * static_cast<double>(tc.total_tokens);

  auto train_range = [&](std::size_t doc_begin, std::size_t doc_end, Rng& worker_rng,
                         std::atomic<std::int64_t>& processed) {
    std::vector<double> in_grad(p.dim);
    std::vector<std::int32_t> kept;
    for (int epoch = 0; epoch < p.epochs; ++epoch) {
      for (std::size_t d = doc_begin; d < doc_end; ++d) {
        const auto& doc = tc.docs[d];
        const double progress =
            planned > 0.0
                ? static_cast<double>(processed.load(std::memory_order_relaxed)) /
                      planned
                : 1.0;
        const double alpha =
            p.initial_lr * std::max(1e-4, 1.0 - progress);
        processed.fetch_add(static_cast<std::int64_t>(doc.size()),
                            std::memory_order_relaxed);

        kept.clear();
        for (auto w : doc) {
          if (tc.keep_prob[w] >= 1.0 || worker_rng.uniform() < tc.keep_prob[w])
            kept.push_back(w);
        }
        const auto n = static_cast<std::ptrdiff_t>(kept.size());
        for (std::ptrdiff_t pos = 0; pos < n; ++pos) {
          const auto span =
              static_cast<std::ptrdiff_t>(1 + worker_rng.below(p.window));
          for (std::ptrdiff_t off = -span; off <= span; ++off) {
            if (off == 0) continue;
            const std::ptrdiff_t ctx = pos + off;
            if (ctx < 0 || ctx >= n) continue;
            detail::sgns_update(model.input_vectors.row(kept[pos]),
                                model.output_vectors, kept[ctx], p.negative,
                                alpha, tc, worker_rng, in_grad);
          }
        }
      }
      if (diag && p.threads == 1)
        diag->epoch_mean_loss.push_back(detail::mean_eval_loss(
            eval_pairs, model.input_vectors, model.output_vectors));
    }
  };

  std::atomic<std::int64_t> processed{0};
  if (p.threads <= 1) {
    train_range(0, tc.docs.size(), rng, processed);
  } else {
    std::vector<std::thread> workers;
    const std::size_t shard =
        (tc.docs.size() + p.threads - 1) / static_cast<std::size_t>(p.threads);
    for (int t = 0; t < p.threads; ++t) {
      const std::size_t begin = std::min(tc.docs.size(), shard * t);
      const std::size_t end = std::min(tc.docs.size(), begin + shard);
      workers.emplace_back([&, begin, end, t] {
        Rng worker_rng(p.seed + 0x9E3779B9ULL * static_cast<std::uint64_t>(t + 1));
        train_range(begin, end, worker_rng, processed);
      });
    }
    for (auto& w : workers) w.join();
  }

  model.vocab = std::move(tc.vocab);
  return model;
}

// Distributed bag-of-words document vectors: each document vector predicts
// its own (subsampled) tokens against shared word output vectors. Zero-token
// documents keep a zero vector and are listed in untrained_docs.
inline DocEmbeddingModel train_doc2vec(const Corpus& corpus, const EmbedParams& p,
                                       EmbedDiag* diag = nullptr) {
  p.validate();
  if (corpus.docs.empty()) throw TrainingError("empty corpus");
  auto tc = detail::prepare_training_corpus(corpus, p);

  DocEmbeddingModel model;
  model.dim = p.dim;
  model.doc_ids = tc.doc_ids;
  model.doc_vectors = Matrix(tc.docs.size(), p.dim);
  model.output_vectors = Matrix(tc.vocab.size(), p.dim);

  Rng rng(p.seed);
  const double half = 0.5 / static_cast<double>(p.dim);
  for (double& v : model.doc_vectors.data) v = rng.uniform(-half, half);
  for (std::size_t d = 0; d < tc.docs.size(); ++d) {
    if (!tc.docs[d].empty()) continue;
    model.untrained_docs.push_back(d);
    double* row = model.doc_vectors.row(d);
    std::fill(row, row + p.dim, 0.0);
  }

  const auto eval_pairs =
      diag ? detail::build_eval_pairs(tc, p, true) : std::vector<detail::EvalPair>{};

  const double planned =
      static_cast<double>(p.epochs) * static_cast<double>(tc.total_tokens);
  std::atomic<std::int64_t> processed{0};
  std::vector<double> in_grad(p.dim);
  for (int epoch = 0; epoch < p.epochs; ++epoch) {
    for (std::size_t d = 0; d < tc.docs.size(); ++d) {
      const auto& doc = tc.docs[d];
      if (doc.empty()) continue;
      const double progress =
          planned > 0.0
              ? static_cast<double>(processed.load(std::memory_order_relaxed)) /
                    planned
              : 1.0;
      const double alpha = p.initial_lr * std::max(1e-4, 1.0 - progress);
      processed.fetch_add(static_cast<std::int64_t>(doc.size()),
                          std::memory_order_relaxed);
      for (auto w : doc) {
        if (tc.keep_prob[w] < 1.0 && rng.uniform() >= tc.keep_prob[w]) continue;
        detail::sgns_update(model.doc_vectors.row(d), model.output_vectors, w,
                            p.negative, alpha, tc, rng, in_grad);
      }
    }
    if (diag)
      diag->epoch_mean_loss.push_back(detail::mean_eval_loss(
          eval_pairs, model.doc_vectors, model.output_vectors));
  }
  return model;
}

// ---------------------------------------------------------------------------
// Queries
// ---------------------------------------------------------------------------

inline std::vector<double> vector_of(const Matrix& m, std::size_t row) {
  return std::vector<double>(m.row(row), m.row(row) + m.cols);
}

// Top-n terms by cosine over input vectors, query excluded, ties broken
// lexicographically. Scores are non-increasing down the list.
inline std::vector<std::pair<std::string, double>> most_similar(
    const EmbeddingModel& model, const std::string& term, std::size_t n) {
  if (n < 1) throw ValidationError("most_similar: n must be >= 1");
  const auto query_id = model.vocab.lookup(term);
  if (query_id < 0) throw LookupError("term not in model vocabulary: " + term);

  const std::size_t dim = model.input_vectors.cols;
  const double* q = model.input_vectors.row(query_id);
  const double qn = std::sqrt(dot(q, q, dim));
  if (qn == 0.0) throw ValidationError("cosine similarity undefined for zero vector");

  std::vector<std::pair<std::string, double>> scored;
  scored.reserve(model.vocab.size());
  for (std::size_t id = 0; id < model.vocab.size(); ++id) {
    if (static_cast<std::int32_t>(id) == query_id) continue;
    const double* v = model.input_vectors.row(id);
    const double vn = std::sqrt(dot(v, v, dim));
    if (vn == 0.0) continue;  // untouched rows cannot rank
    scored.emplace_back(model.vocab.id_to_term[id], dot(q, v, dim) / (qn * vn));
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (scored.size() > n) scored.resize(n);
  return scored;
}

}  // namespace passport
